"""Event-driven delta-cycle scheduler.

One tick runs: commit pending signal values, wake the processes subscribed
to the nodes that actually changed (rising-edge processes only on a literal
0 -> 1 of their clock), activate each woken process at most once per delta
(handler pulls, body, handler pushes), and repeat deltas until quiescent.
Time then advances.  A tick that exceeds the delta limit raises an
oscillation error naming the cycling nodes.
"""

import fnmatch
import json

from . import session as _session
from .signals import Node, SIGNAL, VARIABLE
from .entity import Entity
from .types import LOGIC, LOGIC_VECTOR, BOOLEAN, INTEGER, U, Value


class OscillationError(Exception):
    def __init__(self, message, nodes):
        super().__init__(message)
        self.nodes = nodes


class VcdNamingError(Exception):
    pass


class TraceEntry:
    __slots__ = ("index", "node", "scope", "name", "kind", "width",
                 "initial", "last")

    def __init__(self, index, node, scope, name):
        self.index = index
        self.node = node
        self.scope = tuple(scope)
        self.name = name
        self.kind = node.td.kind
        self.width = node.td.width or 1
        if node.td.kind == INTEGER:
            self.width = 32
        self.initial = node.value.raw
        self.last = self.initial

    def key(self):
        return "/".join(self.scope + (self.name,))


class SimulationReport:
    """Immutable-after-run record of a simulation: per-process activation
    counts, delta statistics, final values and the committed change events
    of every traced node (in commit order)."""

    def __init__(self):
        self.ticks = 0
        self.activations = {}
        self.total_deltas = 0
        self.max_deltas = 0
        self.traces = []
        self.events = []           # (tick, trace index, raw) in commit order
        self.final_values = {}
        self.change_counts = {}

    def series(self, pattern):
        """Change list [(tick, raw), ...] of the first trace whose key
        matches the glob pattern."""
        for t in self.traces:
            if fnmatch.fnmatch(t.key(), pattern) or t.key().endswith(pattern):
                idx = t.index
                return [(tick, raw) for tick, i, raw in self.events
                        if i == idx]
        raise KeyError(f"no traced node matches {pattern!r}")

    def value_at(self, pattern, tick):
        """Committed value of a traced node at the end of the given tick."""
        value = None
        for t in self.traces:
            if fnmatch.fnmatch(t.key(), pattern) or t.key().endswith(pattern):
                value = t.initial
                for ev_tick, raw in self.series(pattern):
                    if ev_tick > tick:
                        break
                    value = raw
                return value
        raise KeyError(f"no traced node matches {pattern!r}")

    def to_json(self):
        payload = {
            "ticks": self.ticks,
            "activations": self.activations,
            "deltas": {"total": self.total_deltas, "max_per_tick":
                       self.max_deltas},
            "final_values": {k: _jsonable(v)
                             for k, v in self.final_values.items()},
            "change_counts": self.change_counts,
        }
        return json.dumps(payload, indent=2, sort_keys=True)


def _jsonable(raw):
    if raw is U:
        return "U"
    if isinstance(raw, tuple):
        return [_jsonable(r) for r in raw]
    return raw


def _trace_scope(leaf):
    """(scope components, leaf name) for one traced leaf node."""
    parts = []
    owner = None
    node = leaf
    while node is not None:
        if node.parent is None:
            holder = getattr(node, "member_of", None)
            if holder is not None:
                parts.append(node.member_name or f"n{node.id}")
                parts.append(holder.hdl_name or f"if{holder.id}")
                owner = holder.owner
            else:
                parts.append(node.hdl_name or f"n{node.id}")
                owner = node.owner
        else:
            parts.append(node.member_name or f"n{node.id}")
        node = node.parent
    parts.reverse()
    scope = (owner.inst_path() if isinstance(owner, Entity) else ["design"])
    return scope + parts[:-1], parts[-1]


def _named(leaf):
    node = leaf
    while node.parent is not None:
        node = node.parent
    if node.hdl_name is not None:
        return True
    holder = getattr(node, "member_of", None)
    return holder is not None and holder.hdl_name is not None


class Scheduler:
    """Delta-cycle engine over a frozen, elaborated design."""

    def __init__(self, top, trace=None, include_variables=False,
                 delta_limit=1000):
        ses = _session.current()
        self.session = ses
        self.top = top
        self.now = 0
        self.delta = 0
        self.delta_limit = delta_limit
        self.queue = {}           # process id -> process, pending activation
        self.report = SimulationReport()
        self._trace_index = {}    # id(node) -> TraceEntry
        self._recent_changes = []  # per-delta changed node sets (last 3)
        self._var_traces = []
        _check_elaborated(top)
        ses.phase = _session.SIMULATION
        ses.frozen = True
        ses.scheduler = self
        self._build_traces(trace, include_variables)
        self._t0_done = False

    def _build_traces(self, patterns, include_variables):
        explicit_nodes = []
        globs = None
        if patterns is not None:
            globs = []
            for p in patterns:
                if isinstance(p, Node):
                    explicit_nodes.append(p)
                else:
                    globs.append(p)
        for obj in self.session.objects:
            if not isinstance(obj, Node) or obj._members:
                continue
            if obj.internal:
                continue
            explicit = any(obj is n for n in explicit_nodes)
            if obj.storage == VARIABLE and not (include_variables or explicit):
                continue
            if obj.storage != VARIABLE and not _named(obj) and not explicit:
                continue
            if explicit and not _named(obj):
                raise VcdNamingError(
                    f"node n{obj.id} in the trace set has no name")
            scope, name = _trace_scope(obj)
            key = "/".join(scope + [name])
            if globs is not None and not explicit:
                if not any(fnmatch.fnmatch(key, g) or key.endswith(g)
                           for g in globs):
                    continue
            entry = TraceEntry(len(self.report.traces), obj, scope, name)
            self._trace_index[id(obj)] = entry
            self.report.traces.append(entry)
            if obj.storage == VARIABLE:
                self._var_traces.append(entry)

    # -- delta machinery ----------------------------------------------------

    def step_delta(self):
        """One commit + activate round; returns the nodes whose committed
        value changed."""
        ses = self.session
        nets = ses.pending_nets
        ses.pending_nets = []
        changed_nodes = []
        woken = dict(self.queue)
        self.queue = {}
        for net in nets:
            changed, old = net.commit()
            if not changed:
                continue
            new = net.current
            for node in net.nodes:
                changed_nodes.append(node)
                self._record(node, new.raw)
            for pid in sorted(net.subscribers):
                proc = net.subscribers[pid]
                if proc.kind == "rising_edge":
                    if proc.clk_net is net and old.raw == 0 and new.raw == 1:
                        woken[pid] = proc
                else:
                    woken[pid] = proc
        for pid in sorted(woken):
            proc = woken[pid]
            proc.activate()
            key = proc.name
            if proc.entity is not None:
                key = "/".join(proc.entity.inst_path()) + ":" + proc.name
            self.report.activations[key] = \
                self.report.activations.get(key, 0) + 1
        self._recent_changes.append(changed_nodes)
        if len(self._recent_changes) > 3:
            self._recent_changes.pop(0)
        return changed_nodes

    def _record(self, node, raw):
        entry = self._trace_index.get(id(node))
        if entry is None:
            return
        if raw == entry.last:
            return
        entry.last = raw
        self.report.events.append((self.now, entry.index, raw))
        key = entry.key()
        self.report.change_counts[key] = \
            self.report.change_counts.get(key, 0) + 1

    def tick(self):
        ses = self.session
        ses.sim_now = self.now
        for node, period in ses.clock_drivers:
            level = 1 if (self.now % period) >= period // 2 else 0
            node.net.schedule(Value(node.td, level))
        if not self._t0_done:
            for proc in ses.processes:
                if proc.kind == "combinational":
                    self.queue[proc.id] = proc
            self._t0_done = True
        deltas = 0
        while ses.pending_nets or self.queue:
            if deltas > self.delta_limit:
                cycling = sorted({n.path_str()
                                  for batch in self._recent_changes
                                  for n in batch})
                raise OscillationError(
                    f"delta limit {self.delta_limit} exceeded at tick "
                    f"{self.now}; cycling nodes: {', '.join(cycling)}",
                    cycling)
            self.step_delta()
            deltas += 1
        for entry in self._var_traces:
            self._record(entry.node, entry.node.value.raw)
        self.report.total_deltas += deltas
        self.report.max_deltas = max(self.report.max_deltas, deltas)
        self.now += 1
        self.report.ticks = self.now

    def run_ticks(self, n):
        for _ in range(n):
            self.tick()
        self._finalize()
        return self.report

    def _finalize(self):
        for entry in self.report.traces:
            self.report.final_values[entry.key()] = entry.node.value.raw


def _check_elaborated(top):
    stack = [top]
    while stack:
        ent = stack.pop()
        if not ent.elaborated:
            if hasattr(ent, "architecture") and not ent._arch_ran:
                ent.elaborate()
            if not ent.elaborated:
                raise _session.ElaborationError(
                    f"entity {ent.type_name} was never elaborated "
                    "(missing end_architecture?)")
        stack.extend(ent.children)


def run(top, ticks, vcd=None, trace=None, include_variables=False,
        delta_limit=1000):
    """Simulate ``ticks`` ticks of the elaborated design under ``top``.

    Returns a SimulationReport; when ``vcd`` is given the waveform document
    is written there (a path or a file-like sink).
    """
    ses = _session.current()
    sched = ses.scheduler
    if sched is None or sched.top is not top:
        sched = Scheduler(top, trace=trace,
                          include_variables=include_variables,
                          delta_limit=delta_limit)
    report = sched.run_ticks(ticks)
    if vcd is not None:
        from .vcd import write_vcd
        write_vcd(report, vcd)
    return report


def run_cycles(top, cycles, **kwargs):
    """Simulate whole clock cycles of the default two-tick clock."""
    return run(top, 2 * cycles, **kwargs)
