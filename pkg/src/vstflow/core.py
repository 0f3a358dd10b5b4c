"""Shared vocabulary: labels, values, the C-lite AST, continuations, machine states."""
from __future__ import annotations

import enum
import re
from collections.abc import Iterator, Mapping
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Optional, Union

if TYPE_CHECKING:
    from .logic import IfcAssertTemplate, Term

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

INT_MIN = -(2**63)
INT_MAX = 2**63 - 1


class Label(enum.IntEnum):
    Lo = 0
    Hi = 1

    def __str__(self) -> str:
        return self.name


class ExitKind(enum.Enum):
    NRM = "nrm"
    BRK = "brk"
    CONT = "cont"
    RET = "ret"

    def __str__(self) -> str:
        return self.value


EXIT_KINDS = (ExitKind.NRM, ExitKind.BRK, ExitKind.CONT, ExitKind.RET)


@dataclass(frozen=True)
class Span:
    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


def span_field():
    return field(default=None, compare=False, repr=False)


# ---------------------------------------------------------------- values


@dataclass(frozen=True, slots=True)
class IntVal:
    value: int

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True, slots=True)
class BoolVal:
    value: bool

    def __str__(self) -> str:
        return "true" if self.value else "false"


@dataclass(frozen=True, slots=True)
class PtrVal:
    addr: int

    def __str__(self) -> str:
        return f"@{self.addr}"


class Undef:
    """Uninitialized value. Never low-equal to anything, itself included."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "UNDEF"

    __str__ = __repr__

    def __reduce__(self):
        return (Undef, ())


UNDEF = Undef()

Value = Union[IntVal, BoolVal, PtrVal, Undef]


class EvalError(Exception):
    """Runtime failure of a pure evaluation (uninitialized read, type mismatch)."""


def wrap64(n: int) -> int:
    n &= (1 << 64) - 1
    return n - (1 << 64) if n >= 1 << 63 else n


def truthy(v: Value) -> bool:
    match v:
        case BoolVal(b):
            return b
        case IntVal(n):
            return n != 0
        case Undef():
            raise EvalError("uninitialized read")
    raise EvalError(f"cannot branch on {v}")


def values_equal(a: Value, b: Value) -> bool:
    """Equality for low-equivalence: Undef is never equal."""
    if a is UNDEF or b is UNDEF:
        return False
    return a == b


def apply_unop(op: str, v: Value) -> Value:
    if v is UNDEF:
        raise EvalError("uninitialized read")
    if op == "!":
        return BoolVal(not truthy(v))
    if op == "-":
        if isinstance(v, IntVal):
            return IntVal(wrap64(-v.value))
        raise EvalError(f"type mismatch: -{v}")
    raise EvalError(f"unknown operator {op}")


def apply_binop(op: str, a: Value, b: Value) -> Value:
    if a is UNDEF or b is UNDEF:
        raise EvalError("uninitialized read")
    if op in ("+", "-", "*"):
        if not (isinstance(a, IntVal) and isinstance(b, IntVal)):
            raise EvalError(f"type mismatch: {a} {op} {b}")
        if op == "+":
            return IntVal(wrap64(a.value + b.value))
        if op == "-":
            return IntVal(wrap64(a.value - b.value))
        return IntVal(wrap64(a.value * b.value))
    if op == "==":
        return BoolVal(a == b)
    if op == "!=":
        return BoolVal(a != b)
    if op == "<":
        if not (isinstance(a, IntVal) and isinstance(b, IntVal)):
            raise EvalError(f"type mismatch: {a} < {b}")
        return BoolVal(a.value < b.value)
    if op == "&&":
        return BoolVal(truthy(a) and truthy(b))
    if op == "||":
        return BoolVal(truthy(a) or truthy(b))
    raise EvalError(f"unknown operator {op}")


UNOPS = ("!", "-")
BINOPS = ("+", "-", "*", "==", "!=", "<", "&&", "||")


# ---------------------------------------------------------------- environments


class Env(Mapping):
    """Immutable, hashable variable environment."""

    __slots__ = ("_d", "_h")

    def __init__(self, items=()):
        self._d = dict(items)
        self._h = None

    def __getitem__(self, key: str) -> Value:
        return self._d[key]

    def __iter__(self) -> Iterator[str]:
        return iter(self._d)

    def __len__(self) -> int:
        return len(self._d)

    def __hash__(self) -> int:
        if self._h is None:
            self._h = hash(frozenset(self._d.items()))
        return self._h

    def __eq__(self, other) -> bool:
        if isinstance(other, Env):
            return self._d == other._d
        if isinstance(other, Mapping):
            return self._d == dict(other.items())
        return NotImplemented

    def __repr__(self) -> str:
        return "Env(" + ", ".join(f"{k}={v}" for k, v in self._d.items()) + ")"

    def set(self, key: str, value: Value) -> "Env":
        d = dict(self._d)
        d[key] = value
        return Env(d)


# ---------------------------------------------------------------- expressions


@dataclass(frozen=True)
class Const:
    value: Value


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class UnOp:
    op: str
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Deref:
    """`*e`; only legal as the source of a load or the target of a store."""

    arg: "Expr"


@dataclass(frozen=True)
class AddrOfDeref:
    """`&*e`: the address denoted by the l-value `*e`, i.e. the pointer e itself."""

    arg: "Expr"


Expr = Union[Const, Var, UnOp, BinOp, Deref, AddrOfDeref]


def free_vars(e: Expr) -> frozenset[str]:
    match e:
        case Const():
            return frozenset()
        case Var(name):
            return frozenset((name,))
        case UnOp(_, a) | Deref(a) | AddrOfDeref(a):
            return free_vars(a)
        case BinOp(_, a, b):
            return free_vars(a) | free_vars(b)
    raise TypeError(f"not an expression: {e!r}")


def contains_deref(e: Expr) -> bool:
    match e:
        case Deref():
            return True
        case Const() | Var():
            return False
        case UnOp(_, a) | AddrOfDeref(a):
            return contains_deref(a)
        case BinOp(_, a, b):
            return contains_deref(a) or contains_deref(b)
    raise TypeError(f"not an expression: {e!r}")


# ---------------------------------------------------------------- statements


@dataclass(frozen=True)
class Skip:
    span: Optional[Span] = span_field()


@dataclass(frozen=True)
class Set:
    target: str
    expr: Expr
    span: Optional[Span] = span_field()


@dataclass(frozen=True)
class Load:
    target: str
    src: Deref
    span: Optional[Span] = span_field()


@dataclass(frozen=True)
class Store:
    dst: Deref
    expr: Expr
    span: Optional[Span] = span_field()


@dataclass(frozen=True)
class Seq:
    first: "Stmt"
    second: "Stmt"
    span: Optional[Span] = span_field()


@dataclass(frozen=True)
class If:
    cond: Expr
    then: "Stmt"
    els: "Stmt"
    span: Optional[Span] = span_field()


@dataclass(frozen=True)
class Loop:
    incr: "Stmt"
    body: "Stmt"
    invariant: "IfcAssertTemplate"
    incr_invariant: "IfcAssertTemplate"
    span: Optional[Span] = span_field()


@dataclass(frozen=True)
class Break:
    span: Optional[Span] = span_field()


@dataclass(frozen=True)
class Continue:
    span: Optional[Span] = span_field()


@dataclass(frozen=True)
class Return:
    expr: Optional[Expr] = None
    span: Optional[Span] = span_field()


@dataclass(frozen=True)
class Call:
    dest: Optional[str]
    fname: str
    args: tuple[Expr, ...]
    # explicit callee-logical instantiation: ((callee logical name, caller term), ...)
    witness: Optional[tuple[tuple[str, "Term"], ...]] = None
    span: Optional[Span] = span_field()


Stmt = Union[Skip, Set, Load, Store, Seq, If, Loop, Break, Continue, Return, Call]


def while_loop(cond: Expr, body: Stmt, invariant, span: Optional[Span] = None) -> Loop:
    """Desugar `while (cond) body` into `Loop(Skip, If(cond, body, Break))`."""
    return Loop(Skip(), If(cond, body, Break(), span=span), invariant, invariant, span=span)


def seq_of(stmts) -> Stmt:
    stmts = list(stmts)
    if not stmts:
        return Skip()
    out = stmts[-1]
    for s in reversed(stmts[:-1]):
        out = Seq(s, out, span=s.span)
    return out


def stmt_vars(c: Stmt) -> frozenset[str]:
    """Stack identifiers read or written anywhere in c (callees excluded)."""
    match c:
        case Skip() | Break() | Continue():
            return frozenset()
        case Set(t, e):
            return free_vars(e) | {t}
        case Load(t, src):
            return free_vars(src) | {t}
        case Store(dst, e):
            return free_vars(dst) | free_vars(e)
        case Seq(a, b):
            return stmt_vars(a) | stmt_vars(b)
        case If(b, c1, c2):
            return free_vars(b) | stmt_vars(c1) | stmt_vars(c2)
        case Loop(i, body, _, _):
            return stmt_vars(i) | stmt_vars(body)
        case Return(e):
            return free_vars(e) if e is not None else frozenset()
        case Call(dest, _, args):
            out = frozenset(dest and (dest,) or ())
            for a in args:
                out |= free_vars(a)
            return out
    raise TypeError(f"not a statement: {c!r}")


def substatements(c: Stmt) -> Iterator[Stmt]:
    yield c
    match c:
        case Seq(a, b) | If(_, a, b):
            yield from substatements(a)
            yield from substatements(b)
        case Loop(i, body, _, _):
            yield from substatements(i)
            yield from substatements(body)


# ---------------------------------------------------------------- continuations


@dataclass(frozen=True)
class Kseq:
    stmt: Stmt


@dataclass(frozen=True)
class KloopIncr:
    """Loop to be resumed at its increment statement (body is running)."""

    incr: Stmt
    body: Stmt


@dataclass(frozen=True)
class KloopBody:
    """Loop to be resumed at its body (increment is running)."""

    incr: Stmt
    body: Stmt


@dataclass(frozen=True)
class Kcall:
    fname: str
    dest: Optional[str]
    saved_env: Env


Continuation = Union[Kseq, KloopIncr, KloopBody, Kcall]


@dataclass(frozen=True)
class MachineState:
    env: Env
    conts: tuple[Continuation, ...]
    mem: tuple[Value, ...]

    @staticmethod
    def make(env=None, conts=(), mem=()) -> "MachineState":
        return MachineState(Env(env or {}), tuple(conts), tuple(mem))
