"""Transaction interface classes, handler bindings and monomorphization.

An Interface subclass declares directional members (directions are given
from the primary perspective: data flows primary -> secondary).  Creating an
instance with concrete type arguments monomorphizes the class: equal type
arguments always yield the identical concrete class object, and the concrete
name is the base name plus a type suffix (AxiStream with a 32-bit vector ->
AxiStream_32).

Handlers wrap one interface endpoint inside exactly one process block and
expose the protocol API (truthiness, send_data, read_data, lifecycle hooks).
A handler's local interface copies are variable views: their writes are
copied out to the signal port at process-activation end, reads are copied in
at activation start.
"""

from . import session as _session
from .capture import capture_body, closure_environment
from .signals import (Node, SIGNAL, VARIABLE, connect_nodes)
from .types import TypeDescriptor, HdlTypeError
from . import ir


class TemplateError(Exception):
    pass


class TruthinessError(Exception):
    pass


class MonomorphKey:
    """Class identity plus a tuple of type descriptors; equality is
    structural and keys every specialization registry."""

    __slots__ = ("base", "args")

    def __init__(self, base, args):
        self.base = base
        self.args = tuple(args)

    def _key(self):
        return (self.base, tuple(a._key() if isinstance(a, TypeDescriptor)
                                 else a for a in self.args))

    def __eq__(self, other):
        return isinstance(other, MonomorphKey) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"MonomorphKey({getattr(self.base, '__name__', self.base)}, " \
               f"{self.args})"


def mangle_suffix(type_args):
    return "_".join(td.mangle() for td in type_args)


def node_of(td):
    return Node(td)


class ConcreteInterfaceClass:
    """A monomorphized interface class: member names, types and declared
    directions, plus the emitted name."""

    def __init__(self, base, type_args, members):
        self.base = base
        self.type_args = tuple(type_args)
        self.members = members  # name -> (TypeDescriptor, "out"|"in")
        suffix = mangle_suffix(type_args)
        self.name = base.__name__ + (f"_{suffix}" if suffix else "")
        self.id = _session.current().register(self)

    def __repr__(self):
        return f"<interface class {self.name}>"


class ConcreteHandlerClass:
    def __init__(self, base, iface_concrete):
        self.base = base
        self.iface = iface_concrete
        suffix = mangle_suffix(iface_concrete.type_args)
        self.name = base.__name__ + (f"_{suffix}" if suffix else "")
        self.prototype = None      # first handler instance, used for emission
        self.member_specs = {}     # MonomorphKey -> MemberSpec
        self.pending_specs = []    # keys requested but not yet generated
        self.id = _session.current().register(self)

    def __repr__(self):
        return f"<handler class {self.name}>"


class ConcreteDataClass:
    """A monomorphized data container (e.g. the optional wrapper)."""

    def __init__(self, base_name, type_args, td):
        self.base_name = base_name
        self.type_args = tuple(type_args)
        self.td = td
        self.name = td.type_name
        self.member_specs = {}
        self.pending_specs = []
        self.id = _session.current().register(self)

    def __repr__(self):
        return f"<data class {self.name}>"


def register_data_monomorph(base_name, type_args, td):
    ses = _session.current()
    key = MonomorphKey(base_name, type_args)
    found = ses.data_monomorphs.get(key)
    if found is None:
        found = ConcreteDataClass(base_name, type_args, td)
        ses.data_monomorphs[key] = found
    return found


class InterfaceMeta(type):
    def __call__(cls, *args, **kwargs):
        inst = super().__call__(*args, **kwargs)
        type_args = []
        for a in list(args) + list(kwargs.values()):
            if isinstance(a, Node):
                type_args.append(a.td)
            elif isinstance(a, TypeDescriptor):
                type_args.append(a)
        inst._finalize_monomorph(tuple(type_args))
        return inst


class InterfaceInstance:
    """Common behavior of interface endpoint instances (ports, free views)."""

    def member_node(self, name):
        return self._members[name]

    def exterior_dir(self, name):
        declared = self.concrete.members[name][1]
        side = self.side
        if side is None:
            raise ConnectionSideUnknown(self)
        if side == "primary":
            return declared
        return "in" if declared == "out" else "out"

    def member_emits(self, name):
        """Whether this endpoint drives the member, as seen from the scope
        performing the connect; None when the side is not yet known."""
        ent = _session.current().current_entity()
        if self.port_spec is not None and self.owner is ent:
            # the enclosing entity's own port, seen from inside: it emits
            # inward exactly the members that arrive from outside
            return self.exterior_dir(name) == "in"
        if self.side is None:
            return None
        return self.exterior_dir(name) == "out"

    def member_writable_inside(self, name):
        return self.exterior_dir(name) == "out"

    def fresh_instance(self):
        protos = [node_of(td) for td in self.concrete.type_args]
        return type(self)(*protos)

    def leaf_nodes(self):
        out = []
        for m in self._members.values():
            out.extend(m.leaf_nodes())
        return out

    def set_name(self, name):
        self.hdl_name = name
        for mname, node in self._members.items():
            for leaf in node.leaf_nodes():
                if leaf.owner is None:
                    leaf.owner = self.owner

    def path(self):
        prefix = self.owner.inst_path() if self.owner is not None else []
        return prefix + [self.hdl_name or f"if{self.id}"]

    def path_str(self):
        return "/".join(self.path())

    def __or__(self, other):
        from .entity import pipe
        return pipe(self, other)

    def __lshift__(self, source):
        from .entity import connect
        if isinstance(source, VariableView):
            source.bind(self)
            return self
        connect(source, self)
        return self


class ConnectionSideUnknown(Exception):
    def __init__(self, iface):
        super().__init__(f"side of {iface!r} not resolved yet")
        self.iface = iface


class Interface(InterfaceInstance, metaclass=InterfaceMeta):
    """Base class for transaction interface definitions.

    Subclass constructors declare members with port_out/port_in wrappers;
    directions are from the primary perspective.
    """

    primary_handler = None
    secondary_handler = None

    def __init__(self):
        ses = _session.current()
        self.id = ses.register(self)
        self._members = {}
        self._declared = {}
        self.port_spec = None
        self.owner = ses.current_entity()
        self.hdl_name = None
        self.concrete = None
        self._side_override = None

    def __setattr__(self, name, value):
        if not name.startswith("_") and isinstance(value, Node) \
                and value.port_spec is not None:
            spec = value.port_spec
            value.port_spec = None
            value.member_of = self
            value.member_name = name
            self._members[name] = value
            self._declared[name] = spec.direction
        object.__setattr__(self, name, value)

    def _finalize_monomorph(self, type_args):
        ses = _session.current()
        key = MonomorphKey(type(self), type_args)
        concrete = ses.iface_monomorphs.get(key)
        if concrete is None:
            members = {name: (node.td, self._declared[name])
                       for name, node in self._members.items()}
            concrete = ConcreteInterfaceClass(type(self), type_args, members)
            ses.iface_monomorphs[key] = concrete
        self.concrete = concrete

    @property
    def side(self):
        if self.port_spec is not None:
            return "primary" if self.port_spec.direction == "out" else "secondary"
        return self._side_override

    def adopt_side(self, side):
        if self._side_override is not None and self._side_override != side:
            raise HdlTypeError(
                f"{self.path_str()} already resolved as {self._side_override}")
        self._side_override = side


def free_view(template, side=None):
    """A fresh signal-storage instance of the template's interface type,
    excluded from the emitted handler records (free_type binding)."""
    inst = template.fresh_instance()
    inst.free_type = True
    for leaf in inst.leaf_nodes():
        leaf.storage = SIGNAL
    if side is not None:
        inst.adopt_side(side)
    return inst


class VariableView:
    """Per-member variable copy of an interface endpoint.

    The view's polarity selects which member set it emits (primary emits the
    declared-out members).  Emitted members are copied to the bound bus at
    process-activation end; the rest are copied in at activation start.
    """

    def __init__(self, template, polarity):
        ses = _session.current()
        self.id = ses.register(self)
        self.polarity = polarity
        self.concrete = template.concrete
        self.hdl_name = None
        self.owner = ses.current_entity()
        self.bus = None
        self._members = {}
        for name, (td, _dir) in self.concrete.members.items():
            node = Node(td, storage=VARIABLE)
            node.member_of = self
            node.member_name = name
            self._members[name] = node
        self.bind(template)

    def member_node(self, name):
        return self._members[name]

    def emits(self, name):
        declared = self.concrete.members[name][1]
        return declared == "out" if self.polarity == "primary" \
            else declared == "in"

    def outgoing(self):
        return [n for n in self.concrete.members if self.emits(n)]

    def incoming(self):
        return [n for n in self.concrete.members if not self.emits(n)]

    def bind(self, bus):
        if not isinstance(bus, InterfaceInstance):
            raise HdlTypeError("variable views bind to interface endpoints")
        if bus.concrete is not self.concrete:
            raise HdlTypeError(
                f"interface type mismatch: {bus.concrete.name} vs "
                f"{self.concrete.name}")
        if bus.side is None:
            bus.adopt_side("secondary" if self.polarity == "primary"
                           else "primary")
        self.bus = bus

    def pull(self):
        for name in self.incoming():
            self._members[name].drive(self.bus.member_node(name).value)

    def push(self):
        for name in self.outgoing():
            self.bus.member_node(name).drive(self._members[name].value)

    def set_name(self, name):
        self.hdl_name = name

    def path_str(self):
        return self.hdl_name or f"view{self.id}"

    def __getattr__(self, name):
        members = object.__getattribute__(self, "_members")
        if name in members:
            return members[name]
        raise AttributeError(name)


def variable_port_out(bus):
    """Primary-polarity variable view bound to ``bus``."""
    return VariableView(bus, "primary")


def variable_port_in(bus):
    """Secondary-polarity variable view bound to ``bus``."""
    return VariableView(bus, "secondary")


class HandlerMeta(type):
    """While a handler constructor runs, freshly created nodes default to
    variable storage (architectures default to signals)."""

    def __call__(cls, *args, **kwargs):
        ses = _session.current()
        ses.storage_default.append(VARIABLE)
        try:
            inst = super().__call__(*args, **kwargs)
        finally:
            ses.storage_default.pop()
        return inst


class Handler(metaclass=HandlerMeta):
    """Per-process protocol handler for one interface endpoint.

    Subclasses define the protocol API; truthiness is declared as a
    class-level IR expression (TRUTH) that both the runtime __bool__ and the
    VHDL backend evaluate, so the two can never diverge.
    """

    role = "handle"
    TRUTH = None

    def __init__(self, bus):
        ses = _session.current()
        self.id = ses.register(self)
        self.bus = bus
        self.owner_process = None
        self.owner = ses.current_entity()
        self.hdl_name = None
        self._members = {}
        key = MonomorphKey(type(self), bus.concrete.type_args)
        concrete = ses.handler_monomorphs.get(key)
        if concrete is None:
            concrete = ConcreteHandlerClass(type(self), bus.concrete)
            ses.handler_monomorphs[key] = concrete
        self.concrete = concrete
        if concrete.prototype is None:
            concrete.prototype = self

    def __setattr__(self, name, value):
        if not name.startswith("_") \
                and isinstance(value, (Node, VariableView, InterfaceInstance)) \
                and name not in ("bus",):
            self._members[name] = value
            value.member_name = name
            if isinstance(value, (VariableView, InterfaceInstance)):
                value.set_name(name)
        object.__setattr__(self, name, value)

    def members(self):
        return self._members

    def views(self):
        return [m for m in self._members.values()
                if isinstance(m, VariableView)]

    def free_members(self):
        return {n: m for n, m in self._members.items()
                if isinstance(m, InterfaceInstance)
                and getattr(m, "free_type", False)}

    def record_partition(self):
        """Partition members into (signal record, variable record, free set)."""
        sig, var, free = {}, {}, {}
        for name, m in self._members.items():
            if isinstance(m, InterfaceInstance):
                if getattr(m, "free_type", False):
                    free[name] = m
                continue
            if isinstance(m, VariableView):
                var[name] = m
            elif isinstance(m, Node):
                if m.internal:
                    continue
                if m.storage == VARIABLE:
                    var[name] = m
                else:
                    sig[name] = m
        return sig, var, free

    def bind_process(self, proc):
        if self.owner_process is not None and self.owner_process is not proc:
            raise _session.ElaborationError(
                f"handler {self.path_str()} is used by process "
                f"'{self.owner_process.name}' and process '{proc.name}'; "
                "handlers belong to exactly one process")
        if self.owner_process is proc:
            return
        self.owner_process = proc
        from .entity import _register_driver
        for view in self.views():
            if view.bus is None:
                continue
            for name in view.outgoing():
                for leaf in view.bus.member_node(name).leaf_nodes():
                    if leaf.storage == SIGNAL:
                        _register_driver(leaf, proc)

    def framework_pull(self):
        for view in self.views():
            view.pull()
        hook = getattr(self, "_on_pull", None)
        if hook is not None:
            hook()

    def framework_push(self):
        hook = getattr(self, "_on_push", None)
        if hook is not None:
            hook()
        for view in self.views():
            view.push()

    def set_name(self, name):
        self.hdl_name = name
        # member names get the handler prefix so two handlers in one entity
        # cannot collide in waveforms or emitted declarations
        for mname, member in self._members.items():
            member.set_name(f"{name}_{mname}")

    def path_str(self):
        prefix = self.owner.inst_path() if self.owner is not None else []
        return "/".join(prefix + [self.hdl_name or f"h{self.id}"])

    def __bool__(self):
        if type(self).TRUTH is None:
            raise TruthinessError(
                f"{type(self).__name__} has no truth predicate")
        return bool(eval_ir_expr(type(self).TRUTH, {"self": self}))

    def __repr__(self):
        return f"<{type(self).__name__} {self.hdl_name or self.id}>"


class PrimaryHandler(Handler):
    role = "primary"


class SecondaryHandler(Handler):
    role = "secondary"


def get_handle(port):
    """Handler for an interface port.

    From inside the owning entity an out port gets the primary handler and an
    in port the secondary one; seen from outside (a child instance's port)
    the mapping flips.
    """
    ent = _session.current().current_entity()
    if port.port_spec is None:
        raise HdlTypeError("get_handle needs an interface port")
    interior = port.owner is ent
    primary_port = port.port_spec.direction == "out"
    want_primary = primary_port if interior else not primary_port
    base = port.concrete.base
    cls = base.primary_handler if want_primary else base.secondary_handler
    if cls is None:
        side = "primary" if want_primary else "secondary"
        raise TruthinessError(
            f"{base.__name__} registers no {side} handler")
    return cls(port)


# -- tiny IR evaluator (runtime truthiness and the v_switch in hooks) -----------

def eval_ir_expr(expr, env):
    from .capture import resolve_path
    from .signals import v_switch, v_case
    from .types import value_add, value_sub, value_bitop, value_compare
    if isinstance(expr, ir.Const):
        return expr.value
    if isinstance(expr, (ir.Ref, ir.Truthiness)):
        obj = resolve_path(expr.path, env)
        if isinstance(expr, ir.Truthiness):
            return bool(obj)
        return obj
    if isinstance(expr, ir.Not):
        return not bool(eval_ir_expr(expr.expr, env))
    if isinstance(expr, ir.BinOp):
        left = eval_ir_expr(expr.left, env)
        right = eval_ir_expr(expr.right, env)
        op = expr.op
        if op in ir.COMPARE_OPS:
            lv = left.value if isinstance(left, Node) else left
            rv = right.value if isinstance(right, Node) else right
            return value_compare(lv, rv, op)
        if op == "and":
            return bool(left) and bool(right)
        if op == "or":
            return bool(left) or bool(right)
        lv = left.value if isinstance(left, Node) else left
        rv = right.value if isinstance(right, Node) else right
        if op == "+":
            return value_add(lv, rv)
        if op == "-":
            return value_sub(lv, rv)
        return value_bitop(lv, rv, op)
    if isinstance(expr, ir.SwitchExpr):
        cases = [v_case(bool(eval_ir_expr(c, env)), eval_ir_expr(v, env))
                 for c, v in expr.cases]
        return v_switch(eval_ir_expr(expr.default, env), cases)
    raise HdlTypeError(f"cannot evaluate {expr!r}")
