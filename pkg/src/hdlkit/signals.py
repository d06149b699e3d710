"""Signal kernel: storage nodes with signal/variable/constant semantics.

A Node is a typed storage cell.  Signals commit pending values at delta
boundaries; variables commit immediately; constants never change after
elaboration.  Structural connection (the elaboration-phase ``<<``) merges the
two nodes' nets so both ends observe one electrical value, which mirrors VHDL
port association.  Composite nodes (records, arrays) hold child nodes and
dispatch reset/assignment so user containers can customize both.
"""

from . import session as _session
from .types import (
    LOGIC, LOGIC_VECTOR, INTEGER, BOOLEAN, RECORD, ARRAY, U,
    HdlTypeError, HdlRangeError, Value, TypeDescriptor,
    logic_type, vector_type, integer_type, boolean_type, record_type,
    coerce_value, value_add, value_sub, value_bitop, value_compare,
    boolean_value,
)

SIGNAL = "signal"
VARIABLE = "variable"
CONSTANT = "constant"


class DriveError(Exception):
    pass


class SingleDriverError(Exception):
    pass


class Net:
    """Shared storage behind one or more aliased nodes."""

    __slots__ = ("current", "pending", "has_pending", "nodes",
                 "subscribers", "driver_procs", "structural_source")

    def __init__(self, value):
        self.current = value
        self.pending = None
        self.has_pending = False
        self.nodes = []
        self.subscribers = {}       # process id -> ProcessBlock
        self.driver_procs = {}      # process id -> ProcessBlock (static)
        self.structural_source = None  # Node that structurally drives this net

    def schedule(self, value):
        first = not self.has_pending
        self.pending = value
        self.has_pending = True
        if first:
            _session.current().pending_nets.append(self)

    def commit(self):
        """Apply the pending value; returns True if the value changed."""
        self.has_pending = False
        changed = self.pending != self.current
        old = self.current
        self.current = self.pending
        self.pending = None
        return changed, old


class PortSpec:
    __slots__ = ("direction", "binding", "stream_role")

    def __init__(self, direction, binding="signal_port", stream_role="none"):
        self.direction = direction      # "in" | "out"
        self.binding = binding          # signal_port | variable_port | free_type
        self.stream_role = stream_role  # none | pipeline_in | pipeline_out


class Node:
    """A typed storage cell; the universal leaf of the design graph."""

    def __init__(self, td, storage=None, init=None, internal=False):
        ses = _session.current()
        self.id = ses.register(self)
        self.td = td
        if storage is None:
            storage = ses.storage_default[-1]
        self.storage = storage
        self.hdl_name = None
        self.owner = ses.current_entity()
        self.port_spec = None
        self.structural_driver = None
        self.parent = None          # composite parent node
        self.member_name = None
        self.internal = internal    # scratch cells: excluded from naming/VCD
        self._members = {}
        if td.kind in (RECORD, ARRAY):
            self.net = None
            names = (list(td.fields) if td.kind == RECORD
                     else [f"e{i}" for i in range(td.length)])
            tds = (list(td.fields.values()) if td.kind == RECORD
                   else [td.element] * td.length)
            for name, mtd in zip(names, tds):
                child = Node(mtd, storage=storage, internal=internal)
                child.parent = self
                child.member_name = name
                self._members[name] = child
        else:
            if init is None:
                value = Value(td, td.default_raw())
            else:
                value = coerce_value(td, init)
            self.init = value
            self.net = Net(value)
            self.net.nodes.append(self)

    # -- naming ------------------------------------------------------------

    def set_name(self, name):
        self.hdl_name = name

    def path(self):
        parts = []
        node = self
        while node is not None:
            parts.append(node.hdl_name or node.member_name or f"n{node.id}")
            node = node.parent
        owner = self.root().owner
        prefix = owner.inst_path() if owner is not None else []
        return prefix + list(reversed(parts))

    def path_str(self):
        return "/".join(self.path())

    def root(self):
        node = self
        while node.parent is not None:
            node = node.parent
        return node

    def members(self):
        return self._members

    def leaf_nodes(self):
        if self._members:
            out = []
            for child in self._members.values():
                out.extend(child.leaf_nodes())
            return out
        return [self]

    def __getattr__(self, name):
        members = object.__getattribute__(self, "_members")
        if name in members:
            return members[name]
        raise AttributeError(name)

    # -- reading -----------------------------------------------------------

    @property
    def value(self):
        if self._members:
            raws = tuple(m.value.raw for m in self._members.values())
            return Value(self.td, raws)
        return self.net.current

    def read(self):
        return self.value

    # -- driving -----------------------------------------------------------

    def drive(self, source):
        if self.storage == CONSTANT:
            raise DriveError(f"cannot drive constant {self.path_str()}")
        if isinstance(source, Node):
            source = source.value
        if self._members:
            self._drive_composite(source)
            return
        value = coerce_value(self.td, source)
        if self.storage == VARIABLE:
            self.net.current = value
        else:
            self.net.schedule(value)

    def _drive_composite(self, source):
        if isinstance(source, Value) and source.td == self.td:
            for member, raw in zip(self._members.values(), source.raw):
                member.drive(Value(member.td, raw))
            return
        raise HdlTypeError(
            f"cannot assign {source!r} to composite {self.td!r}")

    def assign(self, source):
        """Assignment entry point used by stream-out targets; user container
        types override this (and reset_target) to customize both hooks."""
        self.drive(source)

    def reset_target(self):
        """Reset dispatch: vectors and bits go to all-zero, records recurse."""
        if self._members:
            for member in self._members.values():
                member.reset_target()
            return
        if self.td.kind == LOGIC:
            self.drive(0)
        elif self.td.kind == LOGIC_VECTOR:
            self.drive(0)
        elif self.td.kind == INTEGER:
            self.drive(0)
        elif self.td.kind == BOOLEAN:
            self.drive(False)

    # -- operators ---------------------------------------------------------

    def __lshift__(self, source):
        ses = _session.current()
        if ses.phase == _session.ELABORATION:
            if isinstance(source, Node):
                connect_nodes(source, self)
                return self
            raise DriveError(
                "only structural connections are allowed while elaborating; "
                "drives belong inside process bodies")
        self.drive(source)
        return self

    def __add__(self, other):
        return value_add(self.value, _operand(other))

    def __radd__(self, other):
        return value_add(_operand(other), self.value)

    def __sub__(self, other):
        return value_sub(self.value, _operand(other))

    def __rsub__(self, other):
        return value_sub(_operand(other), self.value)

    def __and__(self, other):
        return value_bitop(self.value, _operand(other), "&")

    def __or__(self, other):
        return value_bitop(self.value, _operand(other), "|")

    def __xor__(self, other):
        return value_bitop(self.value, _operand(other), "^")

    def __eq__(self, other):
        return value_compare(self.value, _operand(other), "==")

    def __ne__(self, other):
        return value_compare(self.value, _operand(other), "!=")

    def __lt__(self, other):
        return value_compare(self.value, _operand(other), "<")

    def __le__(self, other):
        return value_compare(self.value, _operand(other), "<=")

    def __gt__(self, other):
        return value_compare(self.value, _operand(other), ">")

    def __ge__(self, other):
        return value_compare(self.value, _operand(other), ">=")

    def __hash__(self):
        return id(self)

    def __bool__(self):
        v = self.value
        if v.td.kind == LOGIC:
            return v.raw == 1
        if v.td.kind == BOOLEAN:
            return bool(v.raw)
        raise HdlTypeError(
            f"{self.td!r} node is not directly usable as a condition")

    def __repr__(self):
        name = self.hdl_name or self.member_name or f"n{self.id}"
        return f"<{self.storage} {name}: {self.td!r} = {self.value.raw!r}>"


class OptionalNode(Node):
    """Container holding a data member alongside a valid bit.

    Reset clears only the valid bit and leaves the data unchanged;
    assignment stores the data and raises the valid bit.
    """

    def __init__(self, inner_td, storage=None):
        td = record_type(f"optional_{inner_td.mangle()}",
                         {"data": inner_td, "valid": logic_type()})
        super().__init__(td, storage=storage)
        from .interfaces import register_data_monomorph
        self.concrete = register_data_monomorph("optional", (inner_td,), td)

    def reset_target(self):
        self._members["valid"].drive(0)

    def assign(self, source):
        self._members["data"].drive(source)
        self._members["valid"].drive(1)


def _operand(x):
    if isinstance(x, Node):
        return x.value
    return x


# -- constructors ------------------------------------------------------------

def vec(width, init=0, storage=None):
    """A logic vector node; init must satisfy 0 <= init < 2**width."""
    if not isinstance(width, int) or width < 1:
        raise HdlRangeError(f"vector width must be >= 1, got {width!r}")
    if not 0 <= init < (1 << width):
        raise HdlRangeError(
            f"init {init} out of range for a {width}-bit vector")
    return Node(vector_type(width), storage=storage, init=init)


def bit(init=None, storage=None):
    """A single logic bit; starts at U until first driven unless init given."""
    return Node(logic_type(), storage=storage, init=init)


def intsig(init=0, storage=None):
    return Node(integer_type(), storage=storage, init=init)


def boolsig(init=False, storage=None):
    return Node(boolean_type(), storage=storage, init=init)


def optional(inner, storage=None):
    """optional container around the type of ``inner`` (a node, a descriptor
    or a plain vector width)."""
    if isinstance(inner, Node):
        inner.internal = True  # throwaway type prototype
        inner_td = inner.td
    elif isinstance(inner, int):
        inner_td = vector_type(inner)
    else:
        inner_td = inner
    return OptionalNode(inner_td, storage=storage)


def variable(node):
    """Mark a freshly built node (and its members) as variable storage."""
    for leaf in node.leaf_nodes():
        leaf.storage = VARIABLE
    node.storage = VARIABLE
    return node


def constant(node):
    for leaf in node.leaf_nodes():
        leaf.storage = CONSTANT
    node.storage = CONSTANT
    return node


# -- operations ---------------------------------------------------------------

def drive(target, source):
    target.drive(source)


def reset(target):
    """Reset dispatching to the target's per-type override."""
    target.reset_target()


class v_case:
    __slots__ = ("condition", "value")

    def __init__(self, condition, value):
        self.condition = condition
        self.value = value


def v_switch(default, cases):
    """First case whose condition holds wins; otherwise the default.

    All branch values (and the default) must share one type; bare integer
    literals adopt the type of the first typed branch.
    """
    td = None
    for item in [default] + [c.value for c in cases]:
        if isinstance(item, Node):
            td = item.td
            break
        if isinstance(item, Value):
            td = item.td
            break
    for item in [default] + [c.value for c in cases]:
        itd = item.td if isinstance(item, (Node, Value)) else None
        if itd is not None and itd != td:
            raise HdlTypeError(
                f"switch branches disagree on type: {itd!r} vs {td!r}")
    chosen = default
    for case in cases:
        if bool(case.condition):
            chosen = case.value
            break
    if isinstance(chosen, Node):
        return chosen.value
    if isinstance(chosen, Value):
        return chosen
    if td is None:
        # all-literal branches: the drive target supplies the type
        return chosen
    return coerce_value(td, chosen)


# -- structural connection -----------------------------------------------------

def connect_nodes(source, target):
    """Alias two leaf-compatible nodes so they share one net.

    The source side becomes the structural driver of the merged net.  Used by
    the interface-level connect; direction resolution happens there.
    """
    if source is target:
        raise SingleDriverError("cannot connect a node to itself")
    if source.td != target.td:
        raise HdlTypeError(
            f"cannot connect {source.td!r} to {target.td!r}")
    if source._members:
        for name, child in source._members.items():
            connect_nodes(child, target._members[name])
        return
    src_net, dst_net = source.net, target.net
    if src_net is dst_net:
        raise SingleDriverError(
            f"nodes {source.path_str()} and {target.path_str()} are already "
            "on one net")
    # the target may only be the head of its own chain (a pass-through port
    # member): connecting into the middle would give the net two sources
    if dst_net.structural_source is not None \
            and dst_net.structural_source is not target:
        raise SingleDriverError(
            f"{target.path_str()} already driven by "
            f"{dst_net.structural_source.path_str()}")
    if dst_net.driver_procs:
        proc = next(iter(dst_net.driver_procs.values()))
        raise SingleDriverError(
            f"{target.path_str()} already driven by process '{proc.name}'")
    merged = src_net
    merged.nodes.extend(dst_net.nodes)
    for node in dst_net.nodes:
        node.net = merged
    merged.subscribers.update(dst_net.subscribers)
    target.structural_driver = source
    if merged.structural_source is None:
        merged.structural_source = source
