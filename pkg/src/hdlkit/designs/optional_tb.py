"""Stream readout into a plain vector and into the optional container.

The pacing counter raises the consumer's accept gate every tenth cycle, so a
transfer lands once per ten clock cycles: the plain vector is zero between
transfers, the optional container keeps the last payload and only its valid
bit pulses.
"""

from hdlkit import (Entity, architecture, end_architecture, rising_edge,
                    clock_generator, vec, bit, optional, get_handle)
from .axi_chain import Counter


class OptionalTb(Entity):
    def __init__(self):
        super().__init__()
        self.architecture()

    @architecture
    def architecture(self):
        clkgen = clock_generator()
        cnt = Counter(clkgen.clk)
        cnt_out = get_handle(cnt.Dout)
        data = vec(32)
        opt_data = optional(vec(32))
        pace_cnt = vec(8)
        pace = bit(0)
        cnt_out.gate_accept(pace)

        @rising_edge(clkgen.clk)
        def pacer():
            pace << 0
            pace_cnt << pace_cnt + 1
            if pace_cnt >= 9:
                pace << 1
                pace_cnt << 0

        @rising_edge(clkgen.clk)
        def proc():
            cnt_out >> data
            cnt_out >> opt_data

        end_architecture()
