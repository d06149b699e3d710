"""Value-change-dump output generated from a simulation report.

The document layout is the standard textual VCD: header sections, a $scope
tree following the entity hierarchy, one $var per traced node, an initial
$dumpvars block at time zero, then #<tick> blocks holding only the values
that actually changed.  Output is byte-deterministic for a given report (the
$date field carries a fixed string on purpose).
"""

from .types import LOGIC, LOGIC_VECTOR, BOOLEAN, INTEGER, U


def _id_codes():
    chars = [chr(i) for i in range(33, 127)]
    n = 0
    while True:
        q, r = divmod(n, len(chars))
        code = chars[r]
        while q > 0:
            q, r = divmod(q - 1, len(chars))
            code = chars[r] + code
        yield code
        n += 1


def _render(kind, width, raw, code):
    if kind == LOGIC:
        level = "x" if raw == U else str(raw)
        return f"{level}{code}"
    if kind == BOOLEAN:
        return f"{1 if raw else 0}{code}"
    if kind == INTEGER:
        bits = format(raw & 0xFFFFFFFF, "b")
        return f"b{bits} {code}"
    bits = format(raw, "b")
    return f"b{bits} {code}"


class VcdWriter:
    def __init__(self, sink, timescale="1ns"):
        self.sink = sink
        self.timescale = timescale

    def write(self, report):
        out = self.sink
        out.write("$date\n    (fixed for reproducible builds)\n$end\n")
        out.write("$version\n    hdlkit simulator\n$end\n")
        out.write(f"$timescale {self.timescale} $end\n")
        codes = {}
        gen = _id_codes()
        for entry in report.traces:
            codes[entry.index] = next(gen)
        self._write_scopes(out, report.traces, codes)
        out.write("$enddefinitions $end\n")
        out.write("#0\n$dumpvars\n")
        for entry in report.traces:
            out.write(_render(entry.kind, entry.width, entry.initial,
                              codes[entry.index]) + "\n")
        out.write("$end\n")
        current_tick = 0
        for tick, index, raw in report.events:
            if tick != current_tick:
                out.write(f"#{tick}\n")
                current_tick = tick
            entry = report.traces[index]
            out.write(_render(entry.kind, entry.width, raw,
                              codes[index]) + "\n")
        if report.ticks > current_tick:
            out.write(f"#{report.ticks}\n")

    def _write_scopes(self, out, traces, codes):
        """Emit the scope tree; traces are grouped by their scope chains in
        first-appearance order."""
        tree = {}
        order = []
        for entry in traces:
            if entry.scope not in tree:
                tree[entry.scope] = []
                order.append(entry.scope)
            tree[entry.scope].append(entry)
        open_scope = ()
        for scope in order:
            common = 0
            while (common < len(open_scope) and common < len(scope)
                   and open_scope[common] == scope[common]):
                common += 1
            for _ in range(len(open_scope) - common):
                out.write("$upscope $end\n")
            for part in scope[common:]:
                out.write(f"$scope module {part} $end\n")
            open_scope = scope
            for entry in tree[scope]:
                var_type = "integer" if entry.kind == INTEGER else "wire"
                out.write(f"$var {var_type} {entry.width} "
                          f"{codes[entry.index]} {entry.name} $end\n")
        for _ in range(len(open_scope)):
            out.write("$upscope $end\n")


def write_vcd(report, sink, timescale="1ns"):
    """Write the report's traces as a VCD document to a path or file."""
    if isinstance(sink, (str, bytes)):
        with open(sink, "w", newline="\n") as fh:
            VcdWriter(fh, timescale).write(report)
    else:
        VcdWriter(sink, timescale).write(report)
