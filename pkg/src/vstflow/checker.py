"""Syntax-directed IFC Hoare-rule checker.

Midpoints of sequences are synthesized by forward symbolic execution; only
loops need annotations. Wherever a rule needs a consequence step
(`P ⊢ P' ∧ N ⊑ N' ∧ A ⊑ A'`) the entailment is decided by enumeration and
recorded in the derivation so it can be replayed.
"""
from __future__ import annotations

import itertools
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from typing import Optional, Union

from .core import (
    UNDEF,
    Break,
    Call,
    Continue,
    Deref,
    EvalError,
    EXIT_KINDS,
    ExitKind,
    Expr,
    If,
    IntVal,
    Label,
    Load,
    Loop,
    Return,
    Seq,
    Set,
    Skip,
    Span,
    Stmt,
    Store,
    free_vars,
    substatements,
    truthy,
)
from .logic import (
    FALSE_TRIPLE,
    LO,
    WILD,
    Assertion,
    CondLabel,
    EntailResult,
    Fits,
    HeapClsf,
    IfcAssertTemplate,
    LabelExpr,
    Lit,
    LitLabel,
    LogicalVarDecl,
    LVar,
    PointsTo,
    PostconditionTemplate,
    StackClsf,
    Term,
    TermOp,
    TermUn,
    case_term,
    check_entails,
    clsf_expr_sym,
    clsf_lvalue_sym,
    enumerate_envs,
    eval_label,
    eval_term,
    expr_to_term,
    ground_assertion,
    has_wildcard,
    is_false,
    join_labels,
    label_vars,
    lle,
    subst_label,
    subst_term,
    template_literals,
    term_vars,
    value_sort_key,
)
from .parser import FuncSpec, SourceProgram

RET_VAL = "ret_val"

RULES = (
    "ifc-seq", "ifc-loop", "ifc-if", "ifc-break", "ifc-continue", "ifc-return",
    "ifc-set", "ifc-load", "ifc-store", "ifc-call", "ifc-pre", "ifc-post", "ifc-skip",
)

# Deliberately broken rule variants, used to show the soundness harness has teeth.
MUTATIONS = ("if-no-guard", "set-lo", "store-lo")


class ConfigError(Exception):
    """Missing specification or similar problem outside the logic itself."""


@dataclass
class RuleFailure:
    rule: str
    span: Optional[Span]
    premise: str
    witness: Optional[dict] = None

    def __str__(self) -> str:
        where = f" at {self.span}" if self.span else ""
        w = f" (witness {self.witness})" if self.witness else ""
        return f"{self.rule}{where}: {self.premise}{w}"


class _Fail(Exception):
    def __init__(self, failure: RuleFailure):
        super().__init__(str(failure))
        self.failure = failure


@dataclass
class EntailRecord:
    decls: tuple[LogicalVarDecl, ...]
    antecedent: IfcAssertTemplate
    consequent: IfcAssertTemplate
    heap_size: Optional[int]
    witness_domain: tuple
    result: EntailResult

    def replay(self) -> bool:
        r = check_entails(self.decls, self.antecedent, self.consequent, self.heap_size, self.witness_domain)
        return r.holds == self.result.holds


@dataclass
class Derivation:
    rule: str
    span: Optional[Span] = None
    premises: list["Derivation"] = field(default_factory=list)
    entailments: list[EntailRecord] = field(default_factory=list)
    conclusion: str = ""

    def walk(self) -> Iterator["Derivation"]:
        yield self
        for p in self.premises:
            yield from p.walk()

    def replay(self) -> bool:
        """Re-decide every recorded entailment independently."""
        return all(e.replay() for d in self.walk() for e in d.entailments)

    def rules_used(self) -> set[str]:
        return {d.rule for d in self.walk()}


Verdict = Union[Derivation, RuleFailure]

# post entries may be None ("open"): the exit states are collected instead of checked
OpenPost = dict[ExitKind, Optional[IfcAssertTemplate]]


# ---------------------------------------------------------------- template helpers


def subst_template(t: IfcAssertTemplate, sub: Mapping[str, Term]) -> IfcAssertTemplate:
    a = t.assertion
    assertion = Assertion(
        tuple(subst_term(p, sub) for p in a.props),
        tuple((k, subst_term(v, sub)) for k, v in a.locals),
        tuple(PointsTo(subst_term(p.addr, sub), subst_term(p.val, sub)) for p in a.seps),
    )
    stack = StackClsf(tuple((k, subst_label(le, sub)) for k, le in t.stack.entries), t.stack.default)
    heap = HeapClsf(tuple((subst_term(k, sub), subst_label(le, sub)) for k, le in t.heap.entries), t.heap.default)
    exists = []
    for d in t.exists:
        r = sub.get(d.name)
        exists.append(LogicalVarDecl(r.name, d.domain) if isinstance(r, LVar) else d)
    return IfcAssertTemplate(assertion, stack, heap, tuple(exists))


def used_vars(t: IfcAssertTemplate) -> set[str]:
    a = t.assertion
    out: set[str] = set()
    for p in a.props:
        out |= term_vars(p)
    for _, v in a.locals:
        out |= term_vars(v)
    for p in a.seps:
        out |= term_vars(p.addr) | term_vars(p.val)
    for _, le in t.stack.entries:
        out |= label_vars(le)
    for k, le in t.heap.entries:
        out |= term_vars(k) | label_vars(le)
    return out


def prune(t: IfcAssertTemplate) -> IfcAssertTemplate:
    used = used_vars(t)
    keep = tuple(d for d in t.exists if d.name in used)
    if len(keep) == len(t.exists):
        return t
    return IfcAssertTemplate(t.assertion, t.stack, t.heap, keep)


def _with(t: IfcAssertTemplate, *, props=None, locals=None, seps=None, stack=None, heap=None, exists=None):
    a = t.assertion
    return IfcAssertTemplate(
        Assertion(
            a.props if props is None else tuple(props),
            a.locals if locals is None else tuple(locals),
            a.seps if seps is None else tuple(seps),
        ),
        t.stack if stack is None else stack,
        t.heap if heap is None else heap,
        t.exists if exists is None else tuple(exists),
    )


def case_label(sel: Term, options: list[LabelExpr]) -> LabelExpr:
    if all(o == options[0] for o in options):
        return options[0]
    out = options[-1]
    for i in range(len(options) - 2, -1, -1):
        out = CondLabel(TermOp("==", sel, Lit(IntVal(i))), options[i], out)
    return out


def _case(sel: Term, options: list[Term]) -> Term:
    if all(o == options[0] for o in options):
        return options[0]
    return case_term(sel, options)


# ---------------------------------------------------------------- checker


class Checker:
    def __init__(
        self,
        decls: Iterable[LogicalVarDecl],
        delta: Mapping[str, FuncSpec],
        heap_size: Optional[int] = None,
        witness_domain: Optional[tuple] = None,
        mutations: Iterable[str] = (),
    ):
        self.decls = tuple(decls)
        self.delta = dict(delta)
        self.heap_size = heap_size
        self.W = tuple(witness_domain) if witness_domain is not None else self._default_w()
        self.mutations = frozenset(mutations)
        self._fresh = 0

    def _default_w(self) -> tuple:
        vals = {IntVal(0), IntVal(1)}
        for d in self.decls:
            vals.update(d.domain)
        return tuple(sorted(vals, key=value_sort_key))

    def fresh(self, base: str) -> str:
        self._fresh += 1
        return f"_{base}{self._fresh}"

    # -- enumeration over satisfying environments
    def sat_envs(self, t: IfcAssertTemplate) -> Iterator[dict]:
        for x in enumerate_envs(self.decls + t.exists):
            if ground_assertion(x, t.assertion, self.heap_size) is not None:
                yield x

    def satisfiable(self, t: IfcAssertTemplate) -> bool:
        if is_false(t.assertion):
            return False
        return next(self.sat_envs(t), None) is not None

    def _defined(self, t: IfcAssertTemplate, term: Term, rule: str, span, what: str):
        for x in self.sat_envs(t):
            try:
                v = eval_term(x, term)
            except EvalError as err:
                raise _Fail(RuleFailure(rule, span, f"{what} may be undefined: {err}", _show(x)))
            if v is WILD or v is UNDEF:
                raise _Fail(RuleFailure(rule, span, f"{what} may be undefined", _show(x)))

    def _term(self, t: IfcAssertTemplate, e: Expr, rule: str, span) -> Term:
        binding = t.assertion.local_map()
        missing = sorted(v for v in free_vars(e) if v not in binding)
        if missing:
            raise _Fail(RuleFailure(rule, span, f"variable {missing[0]} has no LOCAL binding"))
        return expr_to_term(e, binding)

    # -- entailment
    def _rename_apart(self, a: IfcAssertTemplate, b: IfcAssertTemplate) -> IfcAssertTemplate:
        taken = {d.name for d in self.decls} | {d.name for d in a.exists}
        sub = {d.name: LVar(self.fresh("e")) for d in b.exists if d.name in taken}
        return subst_template(b, sub) if sub else b

    def entail(self, a: IfcAssertTemplate, b: IfcAssertTemplate, rule: str, span, what: str) -> EntailRecord:
        b = self._rename_apart(a, b)
        w = tuple(sorted(set(self.W) | template_literals(a) | template_literals(b), key=value_sort_key))
        r = check_entails(self.decls, a, b, self.heap_size, w)
        rec = EntailRecord(self.decls, a, b, self.heap_size, w, r)
        if not r.holds:
            raise _Fail(RuleFailure(rule, span, f"{what}: {r.reason}", r.witness))
        return rec

    # -- the join of a list of exit templates (disjunction)
    def join(self, ts: list[IfcAssertTemplate]) -> IfcAssertTemplate:
        ts = [t for t in ts if self.satisfiable(t)]
        uniq: list[IfcAssertTemplate] = []
        for t in ts:
            if t not in uniq:
                uniq.append(t)
        if not uniq:
            return FALSE_TRIPLE
        if len(uniq) == 1:
            return uniq[0]
        n = len(uniq)
        j = self.fresh("j")
        sel = LVar(j)
        props: list[Term] = []
        for i, t in enumerate(uniq):
            guard = TermUn("!", TermOp("==", sel, Lit(IntVal(i))))
            props += [TermOp("||", guard, p) for p in t.assertion.props]
        maps = [t.assertion.local_map() for t in uniq]
        locs = [(k, _case(sel, [m[k] for m in maps])) for k in maps[0] if all(k in m for m in maps)]
        seps = []
        for pt in uniq[0].assertion.seps:
            vals = []
            for t in uniq:
                match = [q for q in t.assertion.seps if q.addr == pt.addr]
                if not match:
                    break
                vals.append(match[0].val)
            else:
                seps.append(PointsTo(pt.addr, _case(sel, vals)))
        skeys = list(dict.fromkeys(k for t in uniq for k, _ in t.stack.entries))
        stack = StackClsf(
            tuple((k, case_label(sel, [t.stack.lookup(k) for t in uniq])) for k in skeys),
            max(t.stack.default for t in uniq),
        )
        hkeys = list(dict.fromkeys(k for t in uniq for k, _ in t.heap.entries))
        heap = HeapClsf(
            tuple((k, case_label(sel, [t.heap.lookup(k) for t in uniq])) for k in hkeys),
            max(t.heap.default for t in uniq),
        )
        exists = {d.name: d for t in uniq for d in t.exists}
        exists[j] = LogicalVarDecl(j, tuple(IntVal(i) for i in range(n)))
        return prune(IfcAssertTemplate(Assertion(tuple(props), tuple(locs), tuple(seps)), stack, heap, tuple(exists.values())))

    # -- points-to resolution
    def find_cell(self, t: IfcAssertTemplate, p: Term) -> Optional[int]:
        seps = t.assertion.seps
        for i, pt in enumerate(seps):
            if pt.addr == p:
                return i
        envs = list(self.sat_envs(t))
        for i, pt in enumerate(seps):
            ok = True
            for x in envs:
                try:
                    if eval_term(x, pt.addr) != eval_term(x, p):
                        ok = False
                        break
                except EvalError:
                    ok = False
                    break
            if ok:
                return i
        return None

    # -- primitive statements
    def symbolic_post(self, t: IfcAssertTemplate, c: Stmt) -> IfcAssertTemplate:
        match c:
            case Skip():
                return t
            case Set(x, e):
                tm = self._term(t, e, "ifc-set", c.span)
                self._defined(t, tm, "ifc-set", c.span, "assigned expression")
                locs = [(k, v) for k, v in t.assertion.locals if k != x] + [(x, tm)]
                le = LO if "set-lo" in self.mutations else clsf_expr_sym(t.stack, e)
                return prune(_with(t, locals=locs, stack=t.stack.update(x, le)))
            case Load(x, Deref(a) as src):
                p = self._term(t, a, "ifc-load", c.span)
                i = self.find_cell(t, p)
                if i is None:
                    raise _Fail(RuleFailure("ifc-load", c.span, "cannot resolve points-to"))
                seps = list(t.assertion.seps)
                props = list(t.assertion.props)
                exists = list(t.exists)
                val = seps[i].val
                if has_wildcard(val):
                    z = self.fresh("z")
                    exists.append(LogicalVarDecl(z, self.W))
                    props.append(Fits(LVar(z), val))
                    seps[i] = PointsTo(seps[i].addr, LVar(z))
                    val = LVar(z)
                locs = [(k, v) for k, v in t.assertion.locals if k != x] + [(x, val)]
                le = join_labels([clsf_lvalue_sym(t.stack, src), t.heap.lookup(p)])
                return prune(_with(t, props=props, locals=locs, seps=seps, exists=exists, stack=t.stack.update(x, le)))
            case Store(Deref(a) as dst, e):
                p = self._term(t, a, "ifc-store", c.span)
                v = self._term(t, e, "ifc-store", c.span)
                self._defined(t, v, "ifc-store", c.span, "stored expression")
                i = self.find_cell(t, p)
                if i is None:
                    raise _Fail(RuleFailure("ifc-store", c.span, "cannot resolve points-to"))
                seps = list(t.assertion.seps)
                seps[i] = PointsTo(seps[i].addr, v)
                if "store-lo" in self.mutations:
                    le: LabelExpr = LO
                else:
                    le = join_labels([clsf_lvalue_sym(t.stack, dst), clsf_expr_sym(t.stack, e)])
                return prune(_with(t, seps=seps, heap=t.heap.update(seps[i].addr, le)))
        raise ConfigError(f"symbolic_post needs a primitive statement, got {type(c).__name__}")

    # -- exits
    def _exit(self, t, ek: ExitKind, post: OpenPost, out: dict, rule: str, span, d: Derivation):
        target = post[ek]
        if target is None:
            out.setdefault(ek, []).append(t)
            return
        if ek is ExitKind.RET:
            target = _ret_only(target)
        d.entailments.append(self.entail(t, target, rule, span, f"{ek} postcondition"))

    # -- the main judgment
    def exec(self, t: IfcAssertTemplate, c: Stmt, post: OpenPost) -> tuple[Derivation, dict]:
        """Check {t} c {post}; returns the derivation and the collected exit
        templates for every open entry of post."""
        out: dict[ExitKind, list] = {}
        if not self.satisfiable(t):
            return Derivation("ifc-pre", c.span, conclusion="vacuous: precondition unsatisfiable"), out
        match c:
            case Skip() | Set() | Load() | Store():
                rule = {Skip: "ifc-skip", Set: "ifc-set", Load: "ifc-load", Store: "ifc-store"}[type(c)]
                q = self.symbolic_post(t, c)
                d = Derivation(rule, c.span)
                post_rule = "ifc-skip" if isinstance(c, Skip) else "ifc-post"
                self._exit(q, ExitKind.NRM, post, out, post_rule, c.span, d)
                return d, out
            case Seq(c1, c2):
                d1, o1 = self.exec(t, c1, {**post, ExitKind.NRM: None})
                q = self.join(o1.pop(ExitKind.NRM, []))
                d2, o2 = self.exec(q, c2, post)
                for ek, ts in itertools.chain(o1.items(), o2.items()):
                    out.setdefault(ek, []).extend(ts)
                return Derivation("ifc-seq", c.span, [d1, d2]), out
            case If(b, c1, c2):
                tb = self._term(t, b, "ifc-if", c.span)
                guard_label = clsf_expr_sym(t.stack, b)
                for x in self.sat_envs(t):
                    try:
                        truthy(eval_term(x, tb))
                    except (EvalError, AttributeError) as err:
                        raise _Fail(RuleFailure("ifc-if", c.span, f"guard may be undefined: {err}", _show(x)))
                    if "if-no-guard" not in self.mutations and eval_label(x, guard_label) is not Label.Lo:
                        raise _Fail(RuleFailure("ifc-if", c.span, "guard is not classified Lo", _show(x)))
                ta = _with(t, props=t.assertion.props + (tb,))
                tf = _with(t, props=t.assertion.props + (TermUn("!", tb),))
                d1, o1 = self.exec(ta, c1, post)
                d2, o2 = self.exec(tf, c2, post)
                for ek, ts in itertools.chain(o1.items(), o2.items()):
                    out.setdefault(ek, []).extend(ts)
                return Derivation("ifc-if", c.span, [d1, d2]), out
            case Loop(incr, body, inv, inv2):
                d = Derivation("ifc-loop", c.span)
                d.entailments.append(self.entail(t, inv, "ifc-pre", c.span, "loop invariant on entry"))
                body_post = {
                    ExitKind.NRM: inv2,
                    ExitKind.BRK: post[ExitKind.NRM],
                    ExitKind.CONT: inv2,
                    ExitKind.RET: post[ExitKind.RET],
                }
                db, ob = self.exec(inv, body, body_post)
                incr_post = {
                    ExitKind.NRM: inv,
                    ExitKind.BRK: FALSE_TRIPLE,
                    ExitKind.CONT: FALSE_TRIPLE,
                    ExitKind.RET: post[ExitKind.RET],
                }
                di, oi = self.exec(inv2, incr, incr_post)
                d.premises = [db, di]
                if ExitKind.BRK in ob:
                    out.setdefault(ExitKind.NRM, []).extend(ob.pop(ExitKind.BRK))
                for ek, ts in itertools.chain(ob.items(), oi.items()):
                    out.setdefault(ek, []).extend(ts)
                return d, out
            case Break():
                d = Derivation("ifc-break", c.span)
                self._exit(t, ExitKind.BRK, post, out, "ifc-break", c.span, d)
                return d, out
            case Continue():
                d = Derivation("ifc-continue", c.span)
                self._exit(t, ExitKind.CONT, post, out, "ifc-continue", c.span, d)
                return d, out
            case Return(e):
                q = t
                if e is not None:
                    tm = self._term(t, e, "ifc-return", c.span)
                    self._defined(t, tm, "ifc-return", c.span, "returned expression")
                    locs = [(k, v) for k, v in t.assertion.locals if k != RET_VAL] + [(RET_VAL, tm)]
                    q = _with(t, locals=locs, stack=t.stack.update(RET_VAL, clsf_expr_sym(t.stack, e)))
                d = Derivation("ifc-return", c.span)
                self._exit(q, ExitKind.RET, post, out, "ifc-return", c.span, d)
                return d, out
            case Call():
                q = self.call_post(t, c)
                d = Derivation("ifc-call", c.span)
                self._exit(q, ExitKind.NRM, post, out, "ifc-post", c.span, d)
                return d, out
        raise TypeError(f"not a statement: {c!r}")

    # -- calls
    def call_post(self, t: IfcAssertTemplate, c: Call) -> IfcAssertTemplate:
        span = c.span
        spec = self.delta.get(c.fname)
        if spec is None:
            raise ConfigError(f"no specification for {c.fname}")

        def fail(msg, x=None):
            raise _Fail(RuleFailure("ifc-call", span, msg, _show(x) if x is not None else None))

        if len(c.args) != len(spec.params):
            fail(f"{c.fname} expects {len(spec.params)} arguments")
        args = [self._term(t, a, "ifc-call", span) for a in c.args]
        for a in args:
            self._defined(t, a, "ifc-call", span, "argument")
        pre = spec.pre
        # rename the callee's own existentials apart
        callee_ex = {d.name: LVar(self.fresh("c")) for d in pre.exists}
        pre = subst_template(pre, callee_ex)

        sigma: dict[str, Term] = {}
        if c.witness is not None:
            sigma = dict(c.witness)
        else:
            cands: dict[str, list[Term]] = {}
            pmap = dict(zip(spec.params, args))
            for y, tm in pre.assertion.locals:
                if isinstance(tm, LVar) and y in pmap:
                    cands.setdefault(tm.name, []).append(pmap[y])
            for name, ts in cands.items():
                if any(u != ts[0] for u in ts):
                    fail(f"ambiguous instantiation of {name}")
                sigma[name] = ts[0]
            # logicals fixed by cell contents
            for pt in pre.assertion.seps:
                if isinstance(pt.val, LVar) and pt.val.name not in sigma and pt.val.name not in callee_ex.values():
                    addr = subst_term(pt.addr, sigma)
                    i = self.find_cell(t, addr)
                    if i is not None and not has_wildcard(t.assertion.seps[i].val):
                        sigma[pt.val.name] = t.assertion.seps[i].val
        declared = {d.name: d for d in spec.logicals}
        missing = [n for n in declared if n not in sigma]
        if missing:
            fail(f"cannot instantiate callee logical {missing[0]}")
        extra = [n for n in sigma if n not in declared]
        if extra:
            fail(f"{extra[0]} is not a logical of {c.fname}")

        pre_i = subst_template(pre, sigma)
        # the callee's existentials range over their domains, chosen per caller env
        envs = list(self.sat_envs(t))
        for x in envs:
            try:
                for n, d in declared.items():
                    if eval_term(x, sigma[n]) not in d.domain:
                        fail(f"instance of {n} outside its domain", x)
            except EvalError as err:
                fail(f"instance undefined: {err}", x)
        # value matching and label order, with the callee's existentials chosen per x
        cpre_vars = pre_i.exists
        for x in envs:
            ok_any = False
            reason = "callee precondition not satisfied"
            for y in enumerate_envs(cpre_vars):
                xy = {**x, **y}
                r = self._match_pre(t, pre_i, spec, args, c.args, xy)
                if r is None:
                    ok_any = True
                    break
                reason = r
            if not ok_any:
                fail(reason, x)
        # footprint (syntactic order of the callee's SEP)
        used: set[int] = set()
        foot_addrs: list[Term] = []
        for pt in pre_i.assertion.seps:
            i = self.find_cell(t, pt.addr)
            if i is None or i in used:
                fail(f"callee footprint cell {pt.addr} not owned by caller")
            used.add(i)
            foot_addrs.append(t.assertion.seps[i].addr)
        frame = [pt for i, pt in enumerate(t.assertion.seps) if i not in used]

        # ℓ_ret must be constant at this call site
        ret_le = subst_label(spec.post.ret.stack.lookup(RET_VAL), sigma)
        labels = {eval_label(x, ret_le) for x in envs}
        if len(labels) > 1:
            fail("return-value classification is not constant")
        l_ret = LitLabel(labels.pop() if labels else Label.Lo)

        outs = []
        for ek in (ExitKind.NRM, ExitKind.RET):
            q = spec.post[ek]
            if is_false(q.assertion):
                continue
            ren = {d.name: LVar(self.fresh("c")) for d in q.exists}
            q = subst_template(q, {**sigma, **ren})
            props = list(t.assertion.props) + list(q.assertion.props)
            exists = list(t.exists) + list(q.exists)
            locs = [(k, v) for k, v in t.assertion.locals if k != c.dest]
            if c.dest is not None and ek is ExitKind.RET:
                rv = q.assertion.local_map().get(RET_VAL)
                if rv is None:
                    r = self.fresh("r")
                    exists.append(LogicalVarDecl(r, self.W))
                    rv = LVar(r)
                locs.append((c.dest, rv))
            seps = frame + list(q.assertion.seps)
            stack = t.stack.update(c.dest, l_ret) if c.dest is not None else t.stack
            heap = t.heap
            for a in foot_addrs:
                heap = heap.update(a, q.heap.lookup(a))
            outs.append(prune(IfcAssertTemplate(Assertion(tuple(props), tuple(locs), tuple(seps)), stack, heap, tuple(exists))))
        return self.join(outs)

    def _match_pre(self, t, pre_i: IfcAssertTemplate, spec: FuncSpec, args, arg_exprs, x) -> Optional[str]:
        """None if the instantiated callee pre holds at caller env x, else a reason."""
        try:
            for p in pre_i.assertion.props:
                if not truthy(eval_term(x, p)):
                    return "callee precondition PROP fails"
            pmap = dict(zip(spec.params, args))
            for y, tm in pre_i.assertion.locals:
                if y not in pmap:
                    return f"callee LOCAL {y} is not a parameter"
                if eval_term(x, tm) != eval_term(x, pmap[y]):
                    return f"argument {y} does not match callee precondition"
            cells = {}
            for pt in t.assertion.seps:
                cells[eval_term(x, pt.addr)] = eval_term(x, pt.val)
            for pt in pre_i.assertion.seps:
                a = eval_term(x, pt.addr)
                if a not in cells:
                    return f"callee footprint {a} not owned by caller"
                want = eval_term(x, pt.val)
                if want is not WILD and cells[a] != want:
                    return f"contents of {a} do not match callee precondition"
            for y, arg_e in zip(spec.params, arg_exprs):
                if not lle(eval_label(x, clsf_expr_sym(t.stack, arg_e)), eval_label(x, pre_i.stack.lookup(y))):
                    return f"argument {y} is classified above the callee's expectation"
            for pt in pre_i.assertion.seps:
                a = pt.addr
                if not lle(eval_label(x, t.heap.lookup(a)), eval_label(x, pre_i.heap.lookup(a))):
                    return f"cell {eval_term(x, a)} is classified above the callee's expectation"
        except EvalError as err:
            return f"callee precondition undefined: {err}"
        return None


def _ret_only(t: IfcAssertTemplate) -> IfcAssertTemplate:
    """Only ret_val's classification matters for a return exit."""
    return _with(t, stack=StackClsf(tuple(e for e in t.stack.entries if e[0] == RET_VAL), Label.Hi))


def _show(x) -> Optional[dict]:
    if x is None:
        return None
    return {k: str(v) for k, v in x.items() if not k.startswith("_")}


def _post_dict(p: PostconditionTemplate) -> OpenPost:
    return {ek: p[ek] for ek in EXIT_KINDS}


# ---------------------------------------------------------------- public API


def _witness_domain(decls, *tpls, stmts=()) -> tuple:
    vals = {IntVal(0), IntVal(1)}
    for d in decls:
        vals.update(d.domain)
    for t in tpls:
        if is_false(t.assertion):
            continue
        vals.update(template_literals(t))
        for d in t.exists:
            vals.update(d.domain)
    for c in stmts:
        for s in substatements(c):
            if isinstance(s, Loop):
                for t in (s.invariant, s.incr_invariant):
                    vals.update(template_literals(t))
                    for d in t.exists:
                        vals.update(d.domain)
    vals.discard(UNDEF)
    return tuple(sorted(vals, key=value_sort_key))


def check_stmt(
    decls,
    delta: Mapping[str, FuncSpec],
    pre: IfcAssertTemplate,
    c: Stmt,
    post: PostconditionTemplate,
    heap_size: Optional[int] = None,
    mutations: Iterable[str] = (),
) -> Verdict:
    decls = tuple(decls)
    w = _witness_domain(decls, pre, *(post[ek] for ek in EXIT_KINDS), stmts=[c])
    for s in substatements(c):
        if isinstance(s, Call) and s.fname in delta:
            sp = delta[s.fname]
            w = tuple(sorted(set(w) | set(_witness_domain(sp.logicals, sp.pre, sp.post.nrm, sp.post.ret)), key=value_sort_key))
    ck = Checker(decls, delta, heap_size, w, mutations)
    try:
        d, _ = ck.exec(pre, c, _post_dict(post))
        return d
    except _Fail as f:
        return f.failure


def symbolic_post(decls, pre: IfcAssertTemplate, c: Stmt, heap_size: Optional[int] = None) -> IfcAssertTemplate:
    """Strongest postcondition of a primitive statement. Raises RuleFailureError."""
    ck = Checker(decls, {}, heap_size)
    try:
        return ck.symbolic_post(pre, c)
    except _Fail as f:
        raise RuleFailureError(f.failure) from None


class RuleFailureError(Exception):
    def __init__(self, failure: RuleFailure):
        super().__init__(str(failure))
        self.failure = failure


def call_graph_cycles(p: SourceProgram) -> set[str]:
    """Functions that can reach themselves through calls."""
    edges = {f.name: {s.fname for s in substatements(f.body) if isinstance(s, Call)} for f in p.functions}
    bad = set()
    for f in edges:
        seen, todo = set(), list(edges[f])
        while todo:
            g = todo.pop()
            if g == f:
                bad.add(f)
                break
            if g in seen or g not in edges:
                continue
            seen.add(g)
            todo.extend(edges[g])
    return bad


def check_program(
    p: SourceProgram,
    delta: Optional[Mapping[str, FuncSpec]] = None,
    only: Optional[str] = None,
    mutations: Iterable[str] = (),
) -> dict[str, Verdict]:
    delta = p.specs() if delta is None else delta
    recursive = call_graph_cycles(p)
    out: dict[str, Verdict] = {}
    for f in p.functions:
        if only is not None and f.name != only:
            continue
        if f.name not in delta:
            raise ConfigError(f"no specification for {f.name}")
        spec = delta[f.name]
        if f.name in recursive:
            sp = next((s.span for s in substatements(f.body) if isinstance(s, Call)), f.span)
            out[f.name] = RuleFailure("ifc-call", sp, "recursive call")
            continue
        out[f.name] = check_stmt(spec.logicals, delta, spec.pre, f.body, spec.post, p.heap_size or None, mutations)
    return out
