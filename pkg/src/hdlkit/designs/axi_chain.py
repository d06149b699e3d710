"""Counting data source feeding a stream sink over the AXI-style link."""

from hdlkit import (Entity, ClockedEntity, architecture, end_architecture,
                    rising_edge, clock_generator, vec, port_in, port_out,
                    get_handle, AxiStream)


class Counter(ClockedEntity):
    """Sends 0, 1, 2, ... whenever the link can take a new word."""

    def __init__(self, clk):
        super().__init__(clk)
        self.Dout = port_out(AxiStream(vec(32)))
        self.architecture()

    @architecture
    def architecture(self):
        data = vec(32)
        data_out = get_handle(self.Dout)

        @rising_edge(self.clk)
        def proc():
            if data_out:
                data_out << data
                data << data + 1

        end_architecture()


class AxiPrinter(ClockedEntity):
    """Stream sink: copies each received word into a register; the handler
    keeps a host-side log of delivered words for testbenches."""

    def __init__(self, clk):
        super().__init__(clk)
        self.D_in = port_in(AxiStream(vec(32)))
        self.architecture()

    @architecture
    def architecture(self):
        word = vec(32)
        recv = get_handle(self.D_in)

        @rising_edge(self.clk)
        def proc():
            recv >> word

        end_architecture()


class AxiChainTb(Entity):
    def __init__(self):
        super().__init__()
        self.architecture()

    @architecture
    def architecture(self):
        clkgen = clock_generator()
        cnt = Counter(clkgen.clk)
        axprint = AxiPrinter(clkgen.clk)
        axprint.D_in << cnt.Dout
        end_architecture()
