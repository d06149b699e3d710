"""Reference designs: the conversion/simulation corpus and CLI examples."""

from .counter_wrap import CounterWrapTb
from .axi_chain import Counter, AxiPrinter, AxiChainTb
from .delay_line import DelayStage, InputDelay, DelayLineTb
from .native_fifo import FifoReader, NativeFifoTb
from .optional_tb import OptionalTb

CORPUS = {
    "counter_wrap": CounterWrapTb,
    "axi_chain": AxiChainTb,
    "delay_line": DelayLineTb,
    "native_fifo": NativeFifoTb,
    "optional_tb": OptionalTb,
}
