"""A 32-bit counter that wraps to zero once it reaches 300."""

from hdlkit import (Entity, architecture, end_architecture, rising_edge,
                    clock_generator, vec)


class CounterWrapTb(Entity):
    def __init__(self):
        super().__init__()
        self.architecture()

    @architecture
    def architecture(self):
        clkgen = clock_generator()

        counter = vec(32)
        max_cnt = vec(32, 300)

        @rising_edge(clkgen.clk)
        def proc():
            counter << counter + 1
            if counter >= max_cnt:
                counter << 0

        end_architecture()
