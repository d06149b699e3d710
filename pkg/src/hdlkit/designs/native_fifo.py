"""Reader for a native FIFO interface with the combinational enable gate."""

from hdlkit import (Entity, ClockedEntity, architecture, end_architecture,
                    rising_edge, clock_generator, vec, port_in, get_handle,
                    v_switch, v_case, FifoStream)


class FifoReader(ClockedEntity):
    """Consumes a native FIFO: the handler keeps enable low whenever the
    FIFO reports empty, combinationally."""

    def __init__(self, clk):
        super().__init__(clk)
        self.Fin = port_in(FifoStream(vec(32)))
        self.architecture()

    @architecture
    def architecture(self):
        word = vec(32)
        fin = get_handle(self.Fin)

        @rising_edge(self.clk)
        def proc():
            fin >> word

        end_architecture()


class NativeFifoTb(Entity):
    """Deterministic testbench: empty follows a fixed on/off pattern while
    the reader keeps requesting words."""

    def __init__(self):
        super().__init__()
        self.architecture()

    @architecture
    def architecture(self):
        clkgen = clock_generator()
        reader = FifoReader(clkgen.clk)
        tick = vec(4)
        fill = vec(32, 5)

        @rising_edge(clkgen.clk)
        def fifo_model():
            tick << tick + 1
            reader.Fin.empty << v_switch(1, [v_case(tick >= 8, 0)])
            reader.Fin.data << fill
            fill << fill + 1

        end_architecture()
