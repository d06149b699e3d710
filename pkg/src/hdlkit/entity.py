"""Entity construction, architecture scopes, process registration and
structural connection.

An entity instance runs its architecture body exactly once; the body ends
with ``end_architecture()`` which names every locally created object after
its source-level binding, finalizes processes and runs the single-driver
check.  Rising-edge processes fire on literal 0 -> 1 clock transitions;
combinational blocks re-evaluate whenever any captured node commits a
change.  The pipe operator composes stream entities left to right.
"""

import sys

from . import session as _session
from . import ir
from .capture import (CaptureError, capture_body, closure_environment,
                      resolve_path)
from .signals import (Node, PortSpec, SIGNAL, VARIABLE, bit,
                      connect_nodes, SingleDriverError, DriveError)
from .types import LOGIC, HdlTypeError

ElaborationError = _session.ElaborationError


class PipelineShapeError(Exception):
    pass


class ConnectionError(Exception):
    pass


# -- port wrappers -------------------------------------------------------------

def _apply_port(target, direction, binding="signal_port", stream_role="none"):
    spec = PortSpec(direction, binding, stream_role)
    target.port_spec = spec
    return target


def port_out(target):
    """Primary-side port: members keep their declared directions."""
    return _apply_port(target, "out")


def port_in(target):
    """Secondary-side port: member directions are flipped."""
    return _apply_port(target, "in")


def pipeline_out(target):
    return _apply_port(target, "out", stream_role="pipeline_out")


def pipeline_in(target):
    return _apply_port(target, "in", stream_role="pipeline_in")


# -- entities ------------------------------------------------------------------

class Entity:
    """Base class for hardware entities; subclasses define an
    @architecture-decorated method holding the internal structure."""

    def __init__(self):
        ses = _session.current()
        self.id = ses.register(self)
        self.type_name = type(self).__name__
        self.hdl_name = None
        self.parent = ses.current_entity()
        self.ports = {}
        self.children = []
        self.processes = []
        self.clk = None
        self.elaborated = False
        self._arch_ran = False
        self._local_names = {}
        self._gen_counter = 0
        if self.parent is not None:
            self.parent.children.append(self)

    def __setattr__(self, name, value):
        object.__setattr__(self, name, value)
        if name.startswith("_"):
            return
        from .interfaces import InterfaceInstance
        if isinstance(value, (Node, InterfaceInstance)) \
                and getattr(value, "port_spec", None) is not None:
            value.owner = self
            value.set_name(name)
            self.ports[name] = value

    def inst_path(self):
        parts = []
        ent = self
        while ent is not None:
            parts.append(ent.hdl_name or ent.type_name)
            ent = ent.parent
        return list(reversed(parts))

    def set_name(self, name):
        self.hdl_name = name

    def elaborate(self):
        if not self._arch_ran and hasattr(self, "architecture"):
            self.architecture()
        return self

    def claim_name(self, wanted):
        """Uniquify a name within this entity (collisions get _1, _2, ...)."""
        if wanted not in self._local_names:
            self._local_names[wanted] = 0
            return wanted
        self._local_names[wanted] += 1
        return f"{wanted}_{self._local_names[wanted]}"

    def gen_name(self):
        name = f"gen_{self._gen_counter}"
        self._gen_counter += 1
        return name

    def stream_port(self, role):
        found = [p for p in self.ports.values()
                 if getattr(p, "port_spec", None) is not None
                 and p.port_spec.stream_role == role]
        if len(found) != 1:
            raise PipelineShapeError(
                f"{self.type_name} needs exactly one {role} port, has "
                f"{len(found)}")
        return found[0]

    def __or__(self, other):
        return pipe(self, other)

    def __repr__(self):
        return f"<entity {self.type_name} #{self.id}>"


class ClockedEntity(Entity):
    """Entity with a clock input port wired to the given clock node."""

    def __init__(self, clk):
        super().__init__()
        self.clk = port_in(bit())
        if clk is not None:
            self.clk << clk


def architecture(method):
    """Marks the architecture body of an entity; runs it exactly once."""

    def wrapper(self, *args, **kwargs):
        ses = _session.current()
        if self._arch_ran:
            raise ElaborationError(
                f"architecture of {self.type_name} already ran")
        self._arch_ran = True
        scope = _session.ArchScope(self, len(ses.objects))
        ses.arch_stack.append(scope)
        try:
            result = method(self, *args, **kwargs)
        finally:
            if ses.arch_stack and ses.arch_stack[-1] is scope:
                ses.arch_stack.pop()
        if not scope.finalized:
            raise ElaborationError(
                f"architecture of {self.type_name} returned without calling "
                "end_architecture()")
        return result

    wrapper._is_architecture = True
    wrapper.__name__ = method.__name__
    return wrapper


def end_architecture():
    """Close the current architecture scope: name every locally created
    object after its binding in the architecture body, finalize processes and
    run the single-driver check."""
    ses = _session.current()
    if not ses.arch_stack:
        raise ElaborationError("end_architecture() outside an architecture")
    scope = ses.arch_stack[-1]
    if scope.finalized:
        raise ElaborationError("end_architecture() called twice")
    entity = scope.entity
    frame = sys._getframe(1)
    created = ses.objects[scope.start_index:]
    created_ids = {id(obj) for obj in created}
    from .interfaces import InterfaceInstance, Handler
    nameable = (Node, InterfaceInstance, Handler, Entity)
    for name, obj in frame.f_locals.items():
        if name == "self" or not isinstance(obj, nameable):
            continue
        if id(obj) not in created_ids:
            continue
        if getattr(obj, "hdl_name", None) is None:
            obj.set_name(entity.claim_name(name))
            if isinstance(obj, Node) or isinstance(obj, InterfaceInstance):
                if getattr(obj, "owner", None) is None:
                    obj.owner = entity
    for obj in created:
        if isinstance(obj, nameable) and getattr(obj, "hdl_name", None) is None:
            if isinstance(obj, Node) and (obj.internal or obj.parent is not None):
                continue
            if isinstance(obj, Entity) and obj is not entity:
                obj.set_name(entity.claim_name(obj.type_name.lower()))
                continue
            if obj is entity:
                continue
            if getattr(obj, "member_of", None) is not None:
                continue
            obj.set_name(entity.claim_name(entity.gen_name()))
            if getattr(obj, "owner", None) is None:
                obj.owner = entity
    scope.finalized = True
    entity.elaborated = True
    _check_single_drivers(entity)


def _static_drive_nodes(proc):
    """Resolve the signal nodes a captured process drives."""
    targets = []
    if proc.statements is None:
        return targets
    from .interfaces import Handler
    for path in ir.drive_targets(proc.statements):
        try:
            obj = resolve_path(path, proc.env)
        except (KeyError, AttributeError):
            continue
        if isinstance(obj, Handler):
            continue
        if isinstance(obj, Node):
            targets.extend(
                leaf for leaf in obj.leaf_nodes() if leaf.storage == SIGNAL)
    return targets


def _check_single_drivers(entity):
    for proc in entity.processes:
        for node in _static_drive_nodes(proc):
            _register_driver(node, proc)
            _check_port_write(node, proc, entity)


def _register_driver(node, proc):
    net = node.net
    others = [p for pid, p in net.driver_procs.items() if pid != proc.id]
    if others:
        raise SingleDriverError(
            f"signal {node.path_str()} driven by process "
            f"'{others[0].name}' and process '{proc.name}'")
    if net.structural_source is not None \
            and net.structural_source.root() is not node.root():
        raise SingleDriverError(
            f"signal {node.path_str()} has a structural driver and is also "
            f"driven by process '{proc.name}'")
    net.driver_procs[proc.id] = proc


def _check_port_write(node, proc, entity):
    iface = getattr(node.root(), "member_of", None)
    if iface is None or getattr(iface, "port_spec", None) is None:
        return
    member = node.root().member_name or node.member_name
    if iface.owner is entity and not iface.member_writable_inside(member):
        raise DriveError(
            f"process '{proc.name}' drives {node.path_str()}, an input "
            f"member of its own entity's port")


# -- processes -----------------------------------------------------------------

class ProcessBlock:
    def __init__(self, kind, body, clk_node=None, convertible=True,
                 frame_locals=None):
        ses = _session.current()
        self.id = ses.register(self)
        self.kind = kind                  # "rising_edge" | "combinational"
        self.body = body
        self.clk_node = clk_node
        self.name = body.__name__
        self.entity = ses.current_entity()
        self.convertible = convertible
        self.statements = None
        self.env = {}
        self.handlers = []
        self.captured = []
        self.activations = 0
        if convertible:
            self.statements, _ = capture_body(body)
            self.env = closure_environment(body, frame_locals)
            self._bind_handlers()
            if kind == "combinational":
                self._derive_captured()
        else:
            self.env = closure_environment(body, frame_locals)
            self._bind_closure_handlers(body)
        if self.entity is not None:
            self.entity.processes.append(self)
        ses.processes.append(self)
        if kind == "rising_edge":
            if clk_node is None or clk_node.td.kind != LOGIC:
                raise HdlTypeError("rising_edge needs a logic clock node")
            self.clk_node.net.subscribers[self.id] = self

    @property
    def clk_net(self):
        # resolved lazily: the clock node's net may be merged by connects
        # that happen after this process is registered
        return self.clk_node.net if self.clk_node is not None else None

    def _api_paths(self):
        """Full paths through which the body touches objects: drive targets,
        expression references and call receivers.  A handler is bound only
        when one of these resolves to the handler itself (its API), never
        for mere member reads from combinational gates."""
        paths = list(ir.read_paths(self.statements))
        paths += list(ir.drive_targets(self.statements))
        for st in ir.iter_statements(self.statements):
            if isinstance(st, ir.Call):
                paths.append(st.path)
        return paths

    def _bind_handlers(self):
        from .interfaces import Handler
        for path in self._api_paths():
            try:
                obj = resolve_path(path, self.env)
            except (KeyError, AttributeError):
                continue
            if isinstance(obj, Handler):
                obj.bind_process(self)
                if not any(obj is h for h in self.handlers):
                    self.handlers.append(obj)

    def _bind_closure_handlers(self, body):
        from .interfaces import Handler
        if body.__closure__:
            for cell in body.__closure__:
                try:
                    obj = cell.cell_contents
                except ValueError:
                    continue
                if isinstance(obj, Handler):
                    obj.bind_process(self)
                    if not any(obj is h for h in self.handlers):
                        self.handlers.append(obj)

    def _derive_captured(self):
        from .interfaces import Handler
        nets = []
        for path in ir.read_paths(self.statements):
            try:
                obj = resolve_path(path, self.env)
            except (KeyError, AttributeError):
                continue
            if isinstance(obj, Handler):
                continue
            if isinstance(obj, Node):
                for leaf in obj.leaf_nodes():
                    if leaf.storage == SIGNAL:
                        nets.append(leaf)
        if not nets:
            raise ElaborationError(
                f"combinational block '{self.name}' captures no signals")
        for leaf in nets:
            leaf.net.subscribers[self.id] = self
            if not any(leaf is c for c in self.captured):
                self.captured.append(leaf)

    def activate(self):
        self.activations += 1
        for h in self.handlers:
            h.framework_pull()
        executor = _session.current().process_executor
        if executor is not None:
            executor(self)
        else:
            self.body()
        for h in self.handlers:
            h.framework_push()


def rising_edge(clk, convertible=True):
    """Decorator registering the body to run on every 0 -> 1 transition of
    ``clk`` during simulation (and as a clocked process in emitted VHDL)."""
    frame = sys._getframe(1)

    def deco(fn):
        return ProcessBlock("rising_edge", fn, clk_node=clk,
                            convertible=convertible,
                            frame_locals=dict(frame.f_locals))

    return deco


def combinational(convertible=True):
    """Decorator registering the body to re-run whenever any node it reads
    commits a change; evaluated once at time zero to establish outputs."""
    frame = sys._getframe(1)

    def deco(fn):
        return ProcessBlock("combinational", fn, convertible=convertible,
                            frame_locals=dict(frame.f_locals))

    return deco


def sim_process(clk):
    """Simulation-only rising-edge process; never convertible to VHDL."""
    frame = sys._getframe(1)

    def deco(fn):
        return ProcessBlock("rising_edge", fn, clk_node=clk,
                            convertible=False,
                            frame_locals=dict(frame.f_locals))

    return deco


# -- clock generation -----------------------------------------------------------

class ClockGenerator(Entity):
    """Free-running clock source: clk alternates 0/1 every period/2 ticks,
    starting low, so the first rising edge lands on tick period/2."""

    def __init__(self, period=2):
        super().__init__()
        if period < 2 or period % 2:
            raise ElaborationError("clock period must be an even tick count")
        self.period = period
        self.clk = port_out(bit())
        _session.current().clock_drivers.append((self.clk, period))
        self.elaborated = True
        self._arch_ran = True


def clock_generator(period=2):
    return ClockGenerator(period)


# -- connection and pipelines ----------------------------------------------------

def connect(a, b):
    """Wire two structurally compatible endpoints member by member.

    ``connect(dst, src)`` is direction-agnostic: each member is wired from
    whichever side emits it, resolved from the port roles and the viewpoint
    (a child's port seen from outside vs the enclosing entity's own port).
    """
    from .interfaces import InterfaceInstance
    if a is b:
        raise ConnectionError("cannot connect a port to itself")
    if isinstance(a, InterfaceInstance) and isinstance(b, InterfaceInstance):
        if a.concrete is not b.concrete:
            raise HdlTypeError(
                f"interface type mismatch: {a.concrete.name} vs "
                f"{b.concrete.name}")
        _session.current().connections.append((a, b))
        _resolve_free_sides(a, b)
        for name in a.concrete.members:
            a_emits = a.member_emits(name)
            b_emits = b.member_emits(name)
            if a_emits and b_emits:
                raise ConnectionError(
                    f"direction conflict on member {name}: both sides drive")
            if not a_emits and not b_emits:
                raise ConnectionError(
                    f"direction conflict on member {name}: no side drives")
            src, dst = (a, b) if a_emits else (b, a)
            connect_nodes(src.member_node(name), dst.member_node(name))
        return
    if isinstance(a, Node) and isinstance(b, Node):
        _session.current().connections.append((a, b))
        connect_nodes(a, b)
        return
    raise HdlTypeError(f"cannot connect {a!r} and {b!r}")


def _resolve_free_sides(a, b):
    """Free views adopt whichever side complements their connect partner."""
    for view, other in ((a, b), (b, a)):
        if view.side is not None:
            continue
        name0 = next(iter(view.concrete.members))
        other_emits = other.member_emits(name0)
        if other_emits is None:
            raise ConnectionError(
                "cannot resolve connection directions: both endpoints are "
                "free views")
        declared0 = view.concrete.members[name0][1]
        want_emit = not other_emits
        view.adopt_side("primary" if want_emit == (declared0 == "out")
                        else "secondary")


def _pipe_source(endpoint):
    from .interfaces import InterfaceInstance
    if isinstance(endpoint, Entity):
        return endpoint.stream_port("pipeline_out")
    if isinstance(endpoint, InterfaceInstance):
        return endpoint
    raise PipelineShapeError(f"{endpoint!r} cannot source a pipeline")


def _pipe_sink(endpoint):
    from .interfaces import InterfaceInstance
    if isinstance(endpoint, Entity):
        return endpoint.stream_port("pipeline_in")
    if isinstance(endpoint, InterfaceInstance):
        return endpoint
    raise PipelineShapeError(f"{endpoint!r} cannot terminate a pipeline")


def pipe(upstream, downstream):
    """Connect upstream's stream output to downstream's stream input and
    return the downstream endpoint so chains compose left to right."""
    src = _pipe_source(upstream)
    dst = _pipe_sink(downstream)
    connect(src, dst)
    return downstream
