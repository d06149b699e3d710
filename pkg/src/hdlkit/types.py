"""Type descriptors and immutable values for the signal kernel.

A TypeDescriptor describes the hardware type of a storage cell (single logic
bit, unsigned logic vector, integer, boolean, record, array).  Equality is
structural and keys the monomorphization caches.  A Value is an immutable
snapshot of a cell's content; vector payloads are always reduced modulo
2**width.
"""

LOGIC = "logic"
LOGIC_VECTOR = "logic_vector"
INTEGER = "integer"
BOOLEAN = "boolean"
RECORD = "record"
ARRAY = "array"

# uninitialized marker for single logic bits
U = "U"


class HdlTypeError(TypeError):
    pass


class HdlRangeError(ValueError):
    pass


class TypeDescriptor:
    __slots__ = ("kind", "width", "element", "length", "fields", "type_name")

    def __init__(self, kind, width=None, element=None, length=None,
                 fields=None, type_name=None):
        self.kind = kind
        self.width = width
        self.element = element
        self.length = length
        self.fields = fields
        self.type_name = type_name
        if kind == LOGIC_VECTOR:
            if not isinstance(width, int) or width < 1:
                raise HdlRangeError(f"vector width must be >= 1, got {width!r}")
        elif kind == RECORD:
            if not fields:
                raise HdlTypeError("record type needs at least one field")
            if len(set(fields)) != len(fields):
                raise HdlTypeError("record field names must be unique")
        elif kind == ARRAY:
            if element is None or not isinstance(length, int) or length < 1:
                raise HdlRangeError("array needs an element type and length >= 1")
        elif kind not in (LOGIC, INTEGER, BOOLEAN):
            raise HdlTypeError(f"unknown type kind {kind!r}")

    def _key(self):
        if self.kind == RECORD:
            fields = tuple((n, t._key()) for n, t in self.fields.items())
            return (self.kind, self.type_name, fields)
        if self.kind == ARRAY:
            return (self.kind, self.element._key(), self.length)
        return (self.kind, self.width)

    def __eq__(self, other):
        return isinstance(other, TypeDescriptor) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        if self.kind == LOGIC_VECTOR:
            return f"vec({self.width})"
        if self.kind == RECORD:
            return f"record<{self.type_name}>"
        if self.kind == ARRAY:
            return f"array<{self.element!r} x {self.length}>"
        return self.kind

    def mangle(self):
        """Suffix used in monomorphized names: vec -> width, logic -> sl,
        records -> their name, arrays -> <elem>_x<len>."""
        if self.kind == LOGIC_VECTOR:
            return str(self.width)
        if self.kind == LOGIC:
            return "sl"
        if self.kind == INTEGER:
            return "int"
        if self.kind == BOOLEAN:
            return "bool"
        if self.kind == RECORD:
            return self.type_name
        if self.kind == ARRAY:
            return f"{self.element.mangle()}_x{self.length}"
        raise HdlTypeError(self.kind)

    def default_raw(self):
        if self.kind == LOGIC:
            return U
        if self.kind == LOGIC_VECTOR:
            return 0
        if self.kind == INTEGER:
            return 0
        if self.kind == BOOLEAN:
            return False
        if self.kind == RECORD:
            return tuple(t.default_raw() for t in self.fields.values())
        if self.kind == ARRAY:
            return tuple(self.element.default_raw() for _ in range(self.length))
        raise HdlTypeError(self.kind)


def logic_type():
    return TypeDescriptor(LOGIC)


def vector_type(width):
    return TypeDescriptor(LOGIC_VECTOR, width=width)


def integer_type():
    return TypeDescriptor(INTEGER)


def boolean_type():
    return TypeDescriptor(BOOLEAN)


def record_type(name, fields):
    """fields: ordered mapping member name -> TypeDescriptor."""
    return TypeDescriptor(RECORD, fields=dict(fields), type_name=name)


def array_type(element, length):
    return TypeDescriptor(ARRAY, element=element, length=length)


class Value:
    """Immutable typed snapshot.  raw is kind-dependent: 0/1/U for logic,
    a reduced unsigned int for vectors, int/bool for integer/boolean, and a
    tuple of member Values' raws for records and arrays."""

    __slots__ = ("td", "raw")

    def __init__(self, td, raw):
        self.td = td
        self.raw = raw

    def __eq__(self, other):
        if isinstance(other, Value):
            return self.td == other.td and self.raw == other.raw
        if isinstance(other, bool) and self.td.kind == BOOLEAN:
            return self.raw == other
        if isinstance(other, int):
            if self.td.kind in (LOGIC_VECTOR, INTEGER):
                return self.raw == other
            if self.td.kind == LOGIC:
                return self.raw == other
        return NotImplemented

    def __hash__(self):
        return hash((self.td, self.raw))

    def __bool__(self):
        if self.td.kind == BOOLEAN:
            return bool(self.raw)
        if self.td.kind == LOGIC:
            return self.raw == 1
        raise HdlTypeError(f"{self.td!r} value is not usable as a condition")

    def __int__(self):
        if self.td.kind in (LOGIC_VECTOR, INTEGER):
            return int(self.raw)
        if self.td.kind == LOGIC:
            if self.raw == U:
                raise HdlRangeError("logic value is uninitialized (U)")
            return int(self.raw)
        raise HdlTypeError(f"cannot convert {self.td!r} value to int")

    def __repr__(self):
        return f"Value({self.td!r}, {self.raw!r})"


def logic_value(raw):
    if raw not in (0, 1, U):
        raise HdlRangeError(f"logic level must be 0, 1 or U, got {raw!r}")
    return Value(logic_type(), raw)


def vector_value(width, raw):
    return Value(vector_type(width), raw % (1 << width))


def integer_value(raw):
    return Value(integer_type(), int(raw))


def boolean_value(raw):
    return Value(boolean_type(), bool(raw))


def coerce_value(td, source):
    """Coerce a python int/bool or a Value into a Value of type td.

    Integer literals must fit the target range (out-of-range is an error,
    not a truncation).  Values must carry exactly the target descriptor.
    """
    if isinstance(source, Value):
        if source.td == td:
            return source
        if source.td.kind == INTEGER and td.kind == LOGIC_VECTOR:
            return coerce_value(td, source.raw)
        if source.td.kind == LOGIC_VECTOR and td.kind == LOGIC_VECTOR:
            raise HdlTypeError(
                f"width mismatch: cannot assign vec({source.td.width}) "
                f"to vec({td.width})")
        raise HdlTypeError(f"cannot assign {source.td!r} to {td!r}")
    if td.kind == LOGIC:
        if source in (0, 1, U):
            return Value(td, source)
        raise HdlRangeError(f"logic level must be 0 or 1, got {source!r}")
    if td.kind == LOGIC_VECTOR:
        if isinstance(source, bool) or not isinstance(source, int):
            raise HdlTypeError(f"cannot assign {source!r} to {td!r}")
        if not 0 <= source < (1 << td.width):
            raise HdlRangeError(
                f"literal {source} out of range for a {td.width}-bit vector")
        return Value(td, source)
    if td.kind == INTEGER:
        if isinstance(source, bool) or not isinstance(source, int):
            raise HdlTypeError(f"cannot assign {source!r} to {td!r}")
        return Value(td, source)
    if td.kind == BOOLEAN:
        if isinstance(source, bool):
            return Value(td, source)
        raise HdlTypeError(f"cannot assign {source!r} to {td!r}")
    raise HdlTypeError(f"cannot assign a literal to composite type {td!r}")


def _arith_operands(a, b, op):
    """Resolve the common vector descriptor for a binary arithmetic op."""
    av = a if isinstance(a, Value) else None
    bv = b if isinstance(b, Value) else None
    if av is not None and av.td.kind == LOGIC_VECTOR:
        td = av.td
    elif bv is not None and bv.td.kind == LOGIC_VECTOR:
        td = bv.td
    elif av is not None and av.td.kind == INTEGER:
        td = av.td
    elif bv is not None and bv.td.kind == INTEGER:
        td = bv.td
    else:
        raise HdlTypeError(f"cannot apply {op} to {a!r} and {b!r}")
    if (av is not None and bv is not None
            and av.td.kind == LOGIC_VECTOR and bv.td.kind == LOGIC_VECTOR
            and av.td.width != bv.td.width):
        raise HdlTypeError(
            f"width mismatch in {op}: vec({av.td.width}) vs vec({bv.td.width})")
    ai = int(coerce_value(td, a))
    bi = int(coerce_value(td, b))
    return td, ai, bi


def value_add(a, b):
    td, ai, bi = _arith_operands(a, b, "+")
    if td.kind == LOGIC_VECTOR:
        return Value(td, (ai + bi) % (1 << td.width))
    return Value(td, ai + bi)


def value_sub(a, b):
    td, ai, bi = _arith_operands(a, b, "-")
    if td.kind == LOGIC_VECTOR:
        return Value(td, (ai - bi) % (1 << td.width))
    return Value(td, ai - bi)


def value_bitop(a, b, op):
    td, ai, bi = _arith_operands(a, b, op)
    if td.kind != LOGIC_VECTOR:
        raise HdlTypeError(f"{op} is only defined for vectors")
    fn = {"&": int.__and__, "|": int.__or__, "^": int.__xor__}[op]
    return Value(td, fn(ai, bi) % (1 << td.width))


_RELATIONS = {
    "==": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
}


def value_compare(a, b, rel):
    """Unsigned comparison for vectors; vector vs in-range literal; logic vs
    0/1.  Returns a boolean Value usable as a process-body condition."""
    if rel not in _RELATIONS:
        raise HdlTypeError(f"unknown relation {rel!r}")
    av = a if isinstance(a, Value) else None
    bv = b if isinstance(b, Value) else None
    if av is not None and av.td.kind == LOGIC:
        if bv is not None and bv.td.kind == LOGIC:
            pass
        elif b in (0, 1, U):
            bv = Value(av.td, b)
        else:
            raise HdlTypeError(f"cannot compare logic with {b!r}")
        if rel not in ("==", "!="):
            raise HdlTypeError(f"relation {rel} is not defined for logic")
        return boolean_value(_RELATIONS[rel](av.raw, bv.raw))
    if bv is not None and bv.td.kind == LOGIC:
        flipped = {"<": ">", ">": "<", "<=": ">=", ">=": "<="}
        return value_compare(b, a, flipped.get(rel, rel))
    if av is not None and av.td.kind == BOOLEAN and isinstance(b, (bool, Value)):
        bb = bool(bv) if bv is not None else b
        if rel not in ("==", "!="):
            raise HdlTypeError(f"relation {rel} is not defined for booleans")
        return boolean_value(_RELATIONS[rel](bool(av), bb))
    td, ai, bi = _arith_operands(a, b, rel)
    return boolean_value(_RELATIONS[rel](ai, bi))
