"""Assertions, classifications, the label lattice, satisfaction, entailment, low-equivalence.

Assertions are in PROP/LOCAL/SEP form and range over a record of logical
variables with finite domains. Entailment is decided by enumerating logical
environments and canonical witness states, so every check here is exact on
the finite fragment and needs no solver.
"""
from __future__ import annotations

import itertools
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass
from typing import Optional, Union

from .core import (
    EXIT_KINDS,
    UNDEF,
    AddrOfDeref,
    BinOp,
    BoolVal,
    Const,
    Deref,
    EvalError,
    ExitKind,
    Expr,
    IntVal,
    Label,
    MachineState,
    PtrVal,
    UnOp,
    Value,
    Var,
    apply_binop,
    apply_unop,
    free_vars,
    truthy,
    values_equal,
)

Lo, Hi = Label.Lo, Label.Hi

DEFAULT_DOMAIN_CAP = 16
DEFAULT_WITNESS_CAP = 20000


# ---------------------------------------------------------------- lattice


def lub(a: Label, b: Label) -> Label:
    return a if a >= b else b


def glb(a: Label, b: Label) -> Label:
    return a if a <= b else b


def lle(a: Label, b: Label) -> bool:
    return a <= b


# ---------------------------------------------------------------- terms


@dataclass(frozen=True)
class Lit:
    value: Value


@dataclass(frozen=True)
class LVar:
    """A logical variable: `x.name` for record fields, a bare name for EX binders."""

    name: str


@dataclass(frozen=True)
class TermOp:
    op: str
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class TermUn:
    op: str
    arg: "Term"


@dataclass(frozen=True)
class TermCond:
    cond: "Term"
    then: "Term"
    els: "Term"


@dataclass(frozen=True)
class Wildcard:
    pass


WILD = Wildcard()


@dataclass(frozen=True)
class Fits:
    """Internal: true iff `var` is defined and matches `pattern` (which may contain `_`)."""

    var: "Term"
    pattern: "Term"


Term = Union[Lit, LVar, TermOp, TermUn, TermCond, Wildcard, Fits]

TRUE = Lit(BoolVal(True))
FALSE = Lit(BoolVal(False))


def eval_term(x: Mapping[str, Value], t: Term):
    """Evaluate t under logical environment x. May return WILD for SEP value patterns."""
    match t:
        case Lit(v):
            return v
        case LVar(name):
            try:
                return x[name]
            except KeyError:
                raise EvalError(f"unbound logical variable {name}") from None
        case TermOp(op, a, b):
            va, vb = eval_term(x, a), eval_term(x, b)
            if va is WILD or vb is WILD:
                raise EvalError("wildcard in arithmetic")
            return apply_binop(op, va, vb)
        case TermUn(op, a):
            va = eval_term(x, a)
            if va is WILD:
                raise EvalError("wildcard in arithmetic")
            return apply_unop(op, va)
        case TermCond(c, a, b):
            vc = eval_term(x, c)
            if vc is WILD:
                raise EvalError("wildcard condition")
            return eval_term(x, a) if truthy(vc) else eval_term(x, b)
        case Wildcard():
            return WILD
        case Fits(v, p):
            vv, vp = eval_term(x, v), eval_term(x, p)
            if vv is UNDEF or vv is WILD:
                return BoolVal(False)
            return BoolVal(vp is WILD or vv == vp)
    raise TypeError(f"not a term: {t!r}")


def term_vars(t: Term) -> frozenset[str]:
    match t:
        case Lit() | Wildcard():
            return frozenset()
        case LVar(name):
            return frozenset((name,))
        case TermOp(_, a, b) | Fits(a, b):
            return term_vars(a) | term_vars(b)
        case TermUn(_, a):
            return term_vars(a)
        case TermCond(c, a, b):
            return term_vars(c) | term_vars(a) | term_vars(b)
    raise TypeError(f"not a term: {t!r}")


def term_literals(t: Term) -> Iterator[Value]:
    match t:
        case Lit(v):
            yield v
        case TermOp(_, a, b) | Fits(a, b):
            yield from term_literals(a)
            yield from term_literals(b)
        case TermUn(_, a):
            yield from term_literals(a)
        case TermCond(c, a, b):
            yield from term_literals(c)
            yield from term_literals(a)
            yield from term_literals(b)


def subst_term(t: Term, sub: Mapping[str, Term]) -> Term:
    match t:
        case LVar(name):
            return sub.get(name, t)
        case Lit() | Wildcard():
            return t
        case TermOp(op, a, b):
            return TermOp(op, subst_term(a, sub), subst_term(b, sub))
        case TermUn(op, a):
            return TermUn(op, subst_term(a, sub))
        case TermCond(c, a, b):
            return TermCond(subst_term(c, sub), subst_term(a, sub), subst_term(b, sub))
        case Fits(a, b):
            return Fits(subst_term(a, sub), subst_term(b, sub))
    raise TypeError(f"not a term: {t!r}")


def has_wildcard(t: Term) -> bool:
    match t:
        case Wildcard():
            return True
        case TermCond(c, a, b):
            return has_wildcard(c) or has_wildcard(a) or has_wildcard(b)
        case TermOp(_, a, b):
            return has_wildcard(a) or has_wildcard(b)
        case TermUn(_, a):
            return has_wildcard(a)
    return False


def expr_to_term(e: Expr, binding: Mapping[str, Term]) -> Term:
    """Translate a pure program expression into a term, resolving stack variables
    through `binding` (typically the LOCAL clause). Raises KeyError on an unbound
    variable."""
    match e:
        case Const(v):
            return Lit(v)
        case Var(name):
            return binding[name]
        case UnOp(op, a):
            return TermUn(op, expr_to_term(a, binding))
        case BinOp(op, a, b):
            return TermOp(op, expr_to_term(a, binding), expr_to_term(b, binding))
        case AddrOfDeref(a):
            return expr_to_term(a, binding)
        case Deref():
            raise ValueError("dereference inside a pure expression")
    raise TypeError(f"not an expression: {e!r}")


def case_term(selector: Term, options: list[Term]) -> Term:
    """`options[selector]` as nested conditionals."""
    out = options[-1]
    for i in range(len(options) - 2, -1, -1):
        out = TermCond(TermOp("==", selector, Lit(IntVal(i))), options[i], out)
    return out


# ---------------------------------------------------------------- label expressions


@dataclass(frozen=True)
class LitLabel:
    label: Label


@dataclass(frozen=True)
class CondLabel:
    cond: Term
    then: "LabelExpr"
    els: "LabelExpr"


@dataclass(frozen=True)
class JoinLabel:
    left: "LabelExpr"
    right: "LabelExpr"


@dataclass(frozen=True)
class MeetLabel:
    left: "LabelExpr"
    right: "LabelExpr"


LabelExpr = Union[LitLabel, CondLabel, JoinLabel, MeetLabel]

LO = LitLabel(Lo)
HI = LitLabel(Hi)


def eval_label(x: Mapping[str, Value], le: LabelExpr) -> Label:
    """Ground a label expression; a condition that fails to evaluate yields Hi."""
    match le:
        case LitLabel(lab):
            return lab
        case CondLabel(c, a, b):
            try:
                v = eval_term(x, c)
                branch = truthy(v) if v is not WILD else None
            except EvalError:
                return Hi
            if branch is None:
                return Hi
            return eval_label(x, a if branch else b)
        case JoinLabel(a, b):
            return lub(eval_label(x, a), eval_label(x, b))
        case MeetLabel(a, b):
            return glb(eval_label(x, a), eval_label(x, b))
    raise TypeError(f"not a label expression: {le!r}")


def join_labels(les: Iterable[LabelExpr]) -> LabelExpr:
    out: Optional[LabelExpr] = None
    for le in les:
        if le == HI:
            return HI
        if le == LO:
            continue
        out = le if out is None else (out if out == le else JoinLabel(out, le))
    return out if out is not None else LO


def meet_label(a: LabelExpr, b: LabelExpr) -> LabelExpr:
    if a == LO or b == LO:
        return LO
    if a == HI:
        return b
    if b == HI or a == b:
        return a
    return MeetLabel(a, b)


def label_vars(le: LabelExpr) -> frozenset[str]:
    match le:
        case LitLabel():
            return frozenset()
        case CondLabel(c, a, b):
            return term_vars(c) | label_vars(a) | label_vars(b)
        case JoinLabel(a, b) | MeetLabel(a, b):
            return label_vars(a) | label_vars(b)
    raise TypeError(le)


def subst_label(le: LabelExpr, sub: Mapping[str, Term]) -> LabelExpr:
    match le:
        case LitLabel():
            return le
        case CondLabel(c, a, b):
            return CondLabel(subst_term(c, sub), subst_label(a, sub), subst_label(b, sub))
        case JoinLabel(a, b):
            return JoinLabel(subst_label(a, sub), subst_label(b, sub))
        case MeetLabel(a, b):
            return MeetLabel(subst_label(a, sub), subst_label(b, sub))
    raise TypeError(le)


# ---------------------------------------------------------------- classifications


@dataclass(frozen=True)
class StackClsf:
    """Stack classification: explicit entries, everything else `default` (Hi)."""

    entries: tuple[tuple[str, LabelExpr], ...] = ()
    default: Label = Hi

    def lookup(self, ident: str) -> LabelExpr:
        for k, le in reversed(self.entries):
            if k == ident:
                return le
        return LitLabel(self.default)

    def update(self, ident: str, le: LabelExpr) -> "StackClsf":
        return StackClsf(tuple(e for e in self.entries if e[0] != ident) + ((ident, le),), self.default)


@dataclass(frozen=True)
class HeapClsf:
    """Heap classification keyed by address terms; later entries override earlier."""

    entries: tuple[tuple[Term, LabelExpr], ...] = ()
    default: Label = Hi

    def lookup(self, addr: Term) -> LabelExpr:
        acc: LabelExpr = LitLabel(self.default)
        for k, le in self.entries:
            if k == addr:
                acc = le
            else:
                acc = CondLabel(TermOp("==", k, addr), le, acc)
        return acc

    def update(self, addr: Term, le: LabelExpr) -> "HeapClsf":
        return HeapClsf(tuple(e for e in self.entries if e[0] != addr) + ((addr, le),), self.default)


def clsf_update(f, key, v: LabelExpr):
    """f[key := v] for either kind of classification."""
    return f.update(key, v)


class GroundClsf:
    """A classification instantiated at a logical environment: key -> Label."""

    __slots__ = ("labels", "default")

    def __init__(self, labels: Mapping, default: Label):
        self.labels = dict(labels)
        self.default = default

    def __call__(self, key) -> Label:
        return self.labels.get(key, self.default)

    def keys(self):
        return self.labels.keys()

    def __eq__(self, other):
        return isinstance(other, GroundClsf) and self.labels == other.labels and self.default == other.default

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}: {v}" for k, v in self.labels.items())
        return f"[{inner}; default {self.default}]"


def ground_stack(n: StackClsf, x: Mapping[str, Value]) -> GroundClsf:
    return GroundClsf({k: eval_label(x, le) for k, le in n.entries}, n.default)


def _as_addr(v) -> Optional[int]:
    if isinstance(v, PtrVal):
        return v.addr
    if isinstance(v, IntVal) and v.value >= 0:
        return v.value
    return None


def ground_heap(a: HeapClsf, x: Mapping[str, Value]) -> GroundClsf:
    labels: dict[int, Label] = {}
    for k, le in a.entries:
        try:
            addr = _as_addr(eval_term(x, k))
        except EvalError:
            continue
        if addr is not None:
            labels[addr] = eval_label(x, le)
    return GroundClsf(labels, a.default)


def lift_lub(f: GroundClsf, g: GroundClsf) -> GroundClsf:
    keys = set(f.keys()) | set(g.keys())
    return GroundClsf({k: lub(f(k), g(k)) for k in keys}, lub(f.default, g.default))


def lift_glb(f: GroundClsf, g: GroundClsf) -> GroundClsf:
    keys = set(f.keys()) | set(g.keys())
    return GroundClsf({k: glb(f(k), g(k)) for k in keys}, glb(f.default, g.default))


def lift_lle(f: GroundClsf, g: GroundClsf, universe: Iterable = ()) -> bool:
    keys = set(f.keys()) | set(g.keys()) | set(universe)
    return lle(f.default, g.default) and all(lle(f(k), g(k)) for k in keys)


def clsf_expr(n, e: Expr) -> Label:
    """Highest label of any variable in e under a ground stack classification."""
    out = Lo
    for v in free_vars(e):
        out = lub(out, n(v))
    return out


def clsf_lvalue(n, e: Expr) -> Label:
    match e:
        case Deref(a):
            return clsf_expr(n, a)
    return clsf_expr(n, e)


def clsf_exprs(n, es: Iterable[Expr]) -> list[Label]:
    return [clsf_expr(n, e) for e in es]


def clsf_expr_sym(n: StackClsf, e: Expr) -> LabelExpr:
    """clsf_expr over a (non-ground) stack classification, as a label expression."""
    return join_labels(n.lookup(v) for v in sorted(free_vars(e)))


def clsf_lvalue_sym(n: StackClsf, e: Expr) -> LabelExpr:
    match e:
        case Deref(a):
            return clsf_expr_sym(n, a)
    return clsf_expr_sym(n, e)


# ---------------------------------------------------------------- assertions


@dataclass(frozen=True)
class PointsTo:
    addr: Term
    val: Term  # may be WILD or contain WILD inside conditionals


@dataclass(frozen=True)
class Assertion:
    props: tuple[Term, ...] = ()
    locals: tuple[tuple[str, Term], ...] = ()
    seps: tuple[PointsTo, ...] = ()

    def local_map(self) -> dict[str, Term]:
        out: dict[str, Term] = {}
        for k, t in self.locals:
            out.setdefault(k, t)
        return out


FALSE_ASSERTION = Assertion(props=(FALSE,))


def is_false(a: Assertion) -> bool:
    return FALSE in a.props


@dataclass(frozen=True)
class LogicalVarDecl:
    name: str
    domain: tuple[Value, ...]

    def __post_init__(self):
        if not self.domain:
            raise ValueError(f"empty domain for logical variable {self.name}")


LogicalVarDecls = tuple[LogicalVarDecl, ...]


@dataclass(frozen=True)
class IfcAssertTemplate:
    assertion: Assertion = Assertion()
    stack: StackClsf = StackClsf()
    heap: HeapClsf = HeapClsf()
    # existentially quantified variables (EX binders and checker-introduced witnesses)
    exists: tuple[LogicalVarDecl, ...] = ()


FALSE_TRIPLE = IfcAssertTemplate(FALSE_ASSERTION, StackClsf((), Lo), HeapClsf((), Lo))


@dataclass(frozen=True)
class PostconditionTemplate:
    nrm: IfcAssertTemplate
    brk: IfcAssertTemplate = FALSE_TRIPLE
    cont: IfcAssertTemplate = FALSE_TRIPLE
    ret: IfcAssertTemplate = FALSE_TRIPLE

    def __getitem__(self, ek: ExitKind) -> IfcAssertTemplate:
        return getattr(self, ek.value)

    def replace(self, ek: ExitKind, tpl: IfcAssertTemplate) -> "PostconditionTemplate":
        d = {k.value: self[k] for k in EXIT_KINDS}
        d[ek.value] = tpl
        return PostconditionTemplate(**d)

    @staticmethod
    def select(nrm, brk, cont, ret) -> "PostconditionTemplate":
        """The exitkind selector (f1, f2, f3, f4)_ek."""
        return PostconditionTemplate(nrm, brk, cont, ret)


def nret(p: IfcAssertTemplate) -> PostconditionTemplate:
    return PostconditionTemplate(p, FALSE_TRIPLE, FALSE_TRIPLE, FALSE_TRIPLE)


def template_vars(t: IfcAssertTemplate) -> frozenset[str]:
    a = t.assertion
    out: set[str] = set()
    for p in a.props:
        out |= term_vars(p)
    for _, tm in a.locals:
        out |= term_vars(tm)
    for pt in a.seps:
        out |= term_vars(pt.addr) | term_vars(pt.val)
    for _, le in t.stack.entries:
        out |= label_vars(le)
    for k, le in t.heap.entries:
        out |= term_vars(k) | label_vars(le)
    return frozenset(out) - {d.name for d in t.exists}


def template_literals(t: IfcAssertTemplate) -> set[Value]:
    a = t.assertion
    out: set[Value] = set()
    terms = list(a.props) + [tm for _, tm in a.locals] + [p.addr for p in a.seps] + [p.val for p in a.seps]
    terms += [k for k, _ in t.heap.entries]
    for tm in terms:
        out.update(term_literals(tm))
    return out


def enumerate_envs(decls: Iterable[LogicalVarDecl]) -> Iterator[dict[str, Value]]:
    decls = list(decls)
    names = [d.name for d in decls]
    for combo in itertools.product(*(d.domain for d in decls)):
        yield dict(zip(names, combo))


def env_count(decls: Iterable[LogicalVarDecl]) -> int:
    n = 1
    for d in decls:
        n *= len(d.domain)
    return n


# ---------------------------------------------------------------- grounding & satisfaction


@dataclass
class GroundAssertion:
    locals: dict[str, Value]
    seps: dict[int, object]  # addr -> Value or WILD


def ground_assertion(x: Mapping[str, Value], a: Assertion, heap_size: Optional[int] = None) -> Optional[GroundAssertion]:
    """Instantiate `a` at x; None when it is unsatisfiable there (false prop,
    ill-defined term, invalid or overlapping addresses)."""
    try:
        for p in a.props:
            v = eval_term(x, p)
            if v is WILD or not truthy(v):
                return None
        locs: dict[str, Value] = {}
        for k, t in a.locals:
            v = eval_term(x, t)
            if v is WILD or v is UNDEF:
                return None
            if k in locs and locs[k] != v:
                return None
            locs[k] = v
        seps: dict[int, object] = {}
        for pt in a.seps:
            av = eval_term(x, pt.addr)
            if not isinstance(av, PtrVal):
                return None
            if heap_size is not None and not 0 <= av.addr < heap_size:
                return None
            if av.addr in seps:
                return None  # separation violated
            vv = eval_term(x, pt.val)
            if vv is UNDEF:
                return None
            seps[av.addr] = vv
    except EvalError:
        return None
    return GroundAssertion(locs, seps)


def ground_satisfied_by(g: GroundAssertion, s: MachineState) -> bool:
    env, mem = s.env, s.mem
    for k, v in g.locals.items():
        if env.get(k, UNDEF) != v:
            return False
    for addr, v in g.seps.items():
        if addr >= len(mem):
            return False
        cell = mem[addr]
        if v is WILD:
            if cell is UNDEF:
                return False
        elif cell != v:
            return False
    return True


def satisfies(x: Mapping[str, Value], a: Assertion, s: MachineState) -> bool:
    g = ground_assertion(x, a, len(s.mem))
    return g is not None and ground_satisfied_by(g, s)


def satisfies_template(x: Mapping[str, Value], t: IfcAssertTemplate, s: MachineState) -> bool:
    for y in enumerate_envs(t.exists):
        if satisfies({**x, **y}, t.assertion, s):
            return True
    return False


def satisfiable(x: Mapping[str, Value], a: Assertion, heap_size: Optional[int] = None) -> bool:
    return ground_assertion(x, a, heap_size) is not None


# ---------------------------------------------------------------- entailment


@dataclass
class EntailResult:
    holds: bool
    reason: str = ""
    witness: Optional[dict] = None
    unknown: bool = False

    def __bool__(self) -> bool:
        return self.holds


def default_witness_domain(decls: Iterable[LogicalVarDecl], *tpls: IfcAssertTemplate) -> tuple[Value, ...]:
    vals: set[Value] = {IntVal(0)}
    for d in decls:
        vals.update(d.domain)
    for t in tpls:
        for d in t.exists:
            vals.update(d.domain)
        vals.update(template_literals(t))
    vals.discard(UNDEF)
    return tuple(sorted(vals, key=value_sort_key))


def value_sort_key(v: Value):
    match v:
        case BoolVal(b):
            return (0, int(b))
        case IntVal(n):
            return (1, n)
        case PtrVal(a):
            return (2, a)
    return (3, 0)


def check_entails(
    decls: Iterable[LogicalVarDecl],
    a: IfcAssertTemplate,
    b: IfcAssertTemplate,
    heap_size: Optional[int] = None,
    witness_domain: Optional[tuple[Value, ...]] = None,
    cap: int = DEFAULT_WITNESS_CAP,
) -> EntailResult:
    """Decide a ⊢ b (assertion implication plus pointwise label order) by enumeration.

    Logical variables of `decls` and existentials of `a` are quantified
    universally; existentials occurring only in `b` are quantified existentially.
    """
    decls = list(decls)
    names = {d.name for d in decls}
    univ = decls + [d for d in a.exists if d.name not in names]
    univ_names = {d.name for d in univ}
    b_only = [d for d in b.exists if d.name not in univ_names]
    if witness_domain is None:
        witness_domain = default_witness_domain(decls, a, b)
    loose = tuple(witness_domain) + (UNDEF,)
    ybs = list(enumerate_envs(b_only))
    budget = cap

    for x in enumerate_envs(univ):
        ga = ground_assertion(x, a.assertion, heap_size)
        if ga is None:
            continue
        na, aa = ground_stack(a.stack, x), ground_heap(a.heap, x)
        cells = range(heap_size) if heap_size is not None else ()
        cands = []
        label_fail = None
        for y in ybs:
            xy = {**x, **y}
            gb = ground_assertion(xy, b.assertion, heap_size)
            if gb is None:
                continue
            nb, ab = ground_stack(b.stack, xy), ground_heap(b.heap, xy)
            ok = lift_lle(na, nb) and _heap_lle(aa, ab, heap_size)
            if not ok:
                label_fail = _label_gap(na, nb, aa, ab, cells)
            cands.append((gb, ok))
        good = [gb for gb, ok in cands if ok]
        if not good:
            if label_fail is not None and cands:
                return EntailResult(False, f"label order fails at {label_fail}", _show_env(x))
            return EntailResult(False, "consequent unsatisfiable", _show_env(x))

        env_slots: dict[str, tuple] = {k: (v,) for k, v in ga.locals.items()}
        mem_slots: dict[int, tuple] = {}
        for addr, v in ga.seps.items():
            mem_slots[addr] = tuple(witness_domain) if v is WILD else (v,)
        for gb in good:
            for k in gb.locals:
                env_slots.setdefault(k, loose)
            for addr in gb.seps:
                mem_slots.setdefault(addr, loose)
        size = heap_size if heap_size is not None else (max(mem_slots) + 1 if mem_slots else 0)
        count = 1
        for vs in itertools.chain(env_slots.values(), mem_slots.values()):
            count *= len(vs)
        budget -= count
        if budget < 0:
            return EntailResult(False, "witness enumeration exceeded cap", _show_env(x), unknown=True)
        ekeys, mkeys = list(env_slots), list(mem_slots)
        for combo in itertools.product(*(env_slots[k] for k in ekeys), *(mem_slots[m] for m in mkeys)):
            env = dict(zip(ekeys, combo[: len(ekeys)]))
            mem = [UNDEF] * size
            for m, v in zip(mkeys, combo[len(ekeys):]):
                if m < size:
                    mem[m] = v
            s = MachineState.make(env, (), mem)
            if not any(ground_satisfied_by(gb, s) for gb in good):
                w = _show_env(x)
                w["state"] = {"env": {k: str(v) for k, v in env.items()}, "mem": [str(v) for v in mem]}
                return EntailResult(False, "assertion not implied", w)
    return EntailResult(True)


def _heap_lle(aa: GroundClsf, ab: GroundClsf, heap_size: Optional[int]) -> bool:
    if heap_size is None:
        return lift_lle(aa, ab)
    return all(lle(aa(k), ab(k)) for k in range(heap_size))


def _label_gap(na, nb, aa, ab, cells) -> str:
    for k in sorted(set(na.keys()) | set(nb.keys())):
        if not lle(na(k), nb(k)):
            return f"stack {k}: {na(k)} vs {nb(k)}"
    if not lle(na.default, nb.default):
        return f"stack default: {na.default} vs {nb.default}"
    for k in sorted(set(aa.keys()) | set(ab.keys()) | set(cells)):
        if not lle(aa(k), ab(k)):
            return f"heap @{k}: {aa(k)} vs {ab(k)}"
    return f"heap default: {aa.default} vs {ab.default}"


def _show_env(x: Mapping[str, Value]) -> dict:
    return {k: str(v) for k, v in x.items()}


def entails(decls, a: IfcAssertTemplate, b: IfcAssertTemplate, heap_size: Optional[int] = None, **kw) -> bool:
    return check_entails(decls, a, b, heap_size, **kw).holds


# ---------------------------------------------------------------- low-equivalence


def _env_low_equiv(e1, e2, n1, n2) -> bool:
    for k in set(e1) | set(e2):
        if n1(k) is Lo and n2(k) is Lo:
            if not values_equal(e1.get(k, UNDEF), e2.get(k, UNDEF)):
                return False
    return True


def _mem_low_equiv(m1, m2, a1, a2) -> bool:
    for i in range(max(len(m1), len(m2))):
        if a1(i) is Lo and a2(i) is Lo:
            v1 = m1[i] if i < len(m1) else UNDEF
            v2 = m2[i] if i < len(m2) else UNDEF
            if not values_equal(v1, v2):
                return False
    return True


def low_equiv_simple(s: MachineState, s2: MachineState, n, a) -> bool:
    return _env_low_equiv(s.env, s2.env, n, n) and _mem_low_equiv(s.mem, s2.mem, a, a)


def low_equiv(s: MachineState, s2: MachineState, n, n2, a, a2) -> bool:
    """Pairwise low-equivalence: equality is demanded only where both sides say Lo."""
    return _env_low_equiv(s.env, s2.env, n, n2) and _mem_low_equiv(s.mem, s2.mem, a, a2)


env_low_equiv = _env_low_equiv
mem_low_equiv = _mem_low_equiv
