"""Reference protocol library: the AXI-style stream interface with its
sender/receiver handlers, and the native FIFO read interface with its gated
handler.

The sender and receiver keep a variable view of the interface; the framework
copies incoming members in at activation start and outgoing members out at
activation end.  The receiver buffers exactly one word (a registered slice):
a word is captured when valid and ready are both high at the clock edge, and
ready rises again once the user has read the buffer.

The native FIFO handler exposes the same public read API as the stream
receiver (truthiness, read_data, the stream-out operator), so callers can
switch between the two interface types without touching their code.  Its
enable output is gated combinationally: forced low the same tick the FIFO
reports empty.
"""

from . import session as _session
from . import ir
from .entity import combinational, port_out, port_in
from .interfaces import (Interface, PrimaryHandler, SecondaryHandler, Handler,
                         variable_port_out, variable_port_in, free_view,
                         node_of)
from .signals import Node, bit, variable, v_switch, v_case


class AxiStream(Interface):
    """Streaming handshake link: valid/last/data flow primary -> secondary,
    ready flows back.  The data member's type is the template argument."""

    def __init__(self, data_type):
        super().__init__()
        self.valid = port_out(bit(0))
        self.last = port_out(bit(0))
        self.data = port_out(_fresh(data_type))
        self.ready = port_in(bit(0))


def _fresh(proto):
    if isinstance(proto, Node):
        return node_of(proto.td)
    return node_of(proto)


class AxiStreamSender(PrimaryHandler):
    """Sender side: send_data places a word on the wire; once the consumer's
    ready is seen high the steering flags clear and a new word may follow."""

    TRUTH = ir.BinOp("==", ir.Ref(("self", "tx", "valid")), ir.Const(0))

    def __init__(self, bus):
        super().__init__(bus)
        self.tx = variable_port_out(bus)
        self.send_log = []

    def ready_to_send(self):
        return bool(self)

    def send_data(self, value):
        self.tx.valid << 1
        self.tx.data << value

    def set_last(self, flag):
        self.tx.last << flag

    def _on_pull(self):
        if self.tx.ready == 1:
            self.tx.valid << 0
            self.tx.last << 0

    def __lshift__(self, source):
        if isinstance(source, Handler):
            source.read_data(source._take_buf)
            self.send_data(source._take_buf)
            return self
        self.send_data(source)
        self.send_log.append((_now(), _raw(source)))
        return self


class AxiStreamReceiver(SecondaryHandler):
    """Receiver side with a depth-1 buffer.

    accept gates the ready output (default source: constant 1); gate_accept
    reroutes it to a pacing signal so testbenches can throttle the consumer.
    """

    TRUTH = ir.BinOp("==", ir.Ref(("self", "word_valid")), ir.Const(1))

    def __init__(self, bus):
        super().__init__(bus)
        self.rx = variable_port_in(bus)
        self.word = _fresh(bus.member_node("data"))
        self.word_last = bit(0)
        self.word_valid = bit(0)
        self.was_read = bit(0)
        self.accept = bit(1)
        self._accept_source = None
        self._take_buf = variable(_fresh(bus.member_node("data")))
        self._take_buf.internal = True
        self.capture_log = []
        self.received_log = []

    def has_data(self):
        return bool(self)

    def gate_accept(self, node):
        """Route the accept gate to ``node`` (sampled at activation start)."""
        self._accept_source = node

    def framework_pull(self):
        if self._accept_source is not None:
            self.accept.drive(self._accept_source.value)
        else:
            self.accept.drive(1)
        before = self.word_valid.value.raw
        super().framework_pull()
        if before != 1 and self.word_valid.value.raw == 1:
            self.capture_log.append((_now(), self.word.value.raw))

    def _on_pull(self):
        if self.rx.valid == 1:
            if self.rx.ready == 1:
                self.word << self.rx.data
                self.word_last << self.rx.last
                self.word_valid << 1

    def _on_push(self):
        if self.was_read == 1:
            self.word_valid << 0
            self.was_read << 0
        self.rx.ready << v_switch(0, [v_case(self.word_valid == 0,
                                             self.accept)])

    def read_data(self, target):
        target.reset_target()
        if self.word_valid == 1:
            target.assign(self.word)
            self.was_read << 1

    def __rshift__(self, target):
        had = bool(self)
        self.read_data(target)
        if had:
            self.received_log.append((_now(), self.word.value.raw))
        return target


def _now():
    return getattr(_session.current(), "sim_now", None)


def _raw(source):
    from .types import Value
    if isinstance(source, Node):
        return source.value.raw
    if isinstance(source, Value):
        return source.raw
    return source


AxiStream.primary_handler = AxiStreamSender
AxiStream.secondary_handler = AxiStreamReceiver


class FifoStream(Interface):
    """Native FIFO read-side interface (data/empty from the FIFO, the read
    enable back to it); the FIFO is the primary side."""

    def __init__(self, data_type):
        super().__init__()
        self.data = port_out(_fresh(data_type))
        self.empty = port_out(bit(1))
        self.enable = port_in(bit(0))


class NativeFifoReadHandler(Handler):
    """Handler for the consumer side of a native FIFO.

    rx2 mirrors the external port and rx1 is the internal stage the
    user-facing variable view binds to; both are free views so the
    combinational gate may drive them.  The gate forces enable low whenever
    empty is high, the same tick.
    """

    TRUTH = ir.BinOp("==", ir.Ref(("self", "word_valid")), ir.Const(1))

    def __init__(self, bus):
        super().__init__(bus)
        self.rx2 = free_view(bus)
        self.rx2 << bus
        self.rx1 = free_view(bus, side="primary")
        self.rx = variable_port_in(self.rx1)
        self.word = _fresh(bus.member_node("data"))
        self.word_valid = bit(0)
        self.was_read = bit(0)
        self._take_buf = variable(_fresh(bus.member_node("data")))
        self._take_buf.internal = True
        self.capture_log = []
        self.received_log = []
        self._install_gate()

    def _install_gate(self):
        @combinational()
        def fifo_gate():
            self.rx2.enable << v_switch(
                0, [v_case(self.rx2.empty == 0, self.rx1.enable)])
            self.rx1.empty << self.rx2.empty
            self.rx1.data << self.rx2.data

        self._gate_block = fifo_gate

    def has_data(self):
        return bool(self)

    def framework_pull(self):
        before = self.word_valid.value.raw
        super().framework_pull()
        if before != 1 and self.word_valid.value.raw == 1:
            self.capture_log.append((_now(), self.word.value.raw))

    def _on_pull(self):
        if self.rx.enable == 1:
            if self.rx.empty == 0:
                self.word << self.rx.data
                self.word_valid << 1

    def _on_push(self):
        if self.was_read == 1:
            self.word_valid << 0
            self.was_read << 0
        self.rx.enable << 0
        if self.word_valid == 0:
            self.rx.enable << 1

    def read_data(self, target):
        target.reset_target()
        if self.word_valid == 1:
            target.assign(self.word)
            self.was_read << 1

    def __rshift__(self, target):
        had = bool(self)
        self.read_data(target)
        if had:
            self.received_log.append((_now(), self.word.value.raw))
        return target


FifoStream.secondary_handler = NativeFifoReadHandler
