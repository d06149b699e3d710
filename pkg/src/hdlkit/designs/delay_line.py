"""Stream delay stages composed with the pipe operator."""

from hdlkit import (Entity, ClockedEntity, architecture, end_architecture,
                    rising_edge, clock_generator, vec, pipeline_in,
                    pipeline_out, get_handle, AxiStream)
from .axi_chain import Counter, AxiPrinter


class DelayStage(ClockedEntity):
    """Delays the stream by one clock cycle: forwards the buffered word as
    soon as the output side is free."""

    def __init__(self, clk=None):
        super().__init__(clk)
        self.D_in = pipeline_in(AxiStream(vec(32)))
        self.D_out = pipeline_out(AxiStream(vec(32)))
        self.architecture()

    @architecture
    def architecture(self):
        rx = get_handle(self.D_in)
        tx = get_handle(self.D_out)

        @rising_edge(self.clk)
        def proc():
            if rx and tx:
                tx << rx

        end_architecture()


class InputDelay(ClockedEntity):
    """Two chained delay stages: a delay of two clock cycles.  More stages in
    the pipe make the delay longer."""

    def __init__(self, clk=None):
        super().__init__(clk)
        self.D_in = pipeline_in(AxiStream(vec(32)))
        self.D_out = pipeline_out(AxiStream(vec(32)))
        self.architecture()

    @architecture
    def architecture(self):
        self.D_in | DelayStage(self.clk) | DelayStage(self.clk) | self.D_out
        end_architecture()


class DelayLineTb(Entity):
    """Counter -> InputDelay -> sink, for conversion and CLI runs."""

    def __init__(self):
        super().__init__()
        self.architecture()

    @architecture
    def architecture(self):
        clkgen = clock_generator()
        cnt = Counter(clkgen.clk)
        delay = InputDelay(clkgen.clk)
        sink = AxiPrinter(clkgen.clk)
        delay.D_in << cnt.Dout
        sink.D_in << delay.D_out
        end_architecture()
