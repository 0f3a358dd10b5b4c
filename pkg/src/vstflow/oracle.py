"""Semantic ground truth by exhaustive two-run enumeration.

Two notions of non-interference are checked here. The first is direct
style: run both executions to their exit and compare the final states.
The second is guard style: states are "in sync" when equal-length runs
keep head-equivalent continuation stacks, and observations are encoded
as test continuations that branch on a location.
"""
from __future__ import annotations

import functools
import itertools
from collections.abc import Callable, Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from typing import Optional, Union

from .core import (
    EXIT_KINDS,
    UNDEF,
    BinOp,
    Break,
    Const,
    Continuation,
    Continue,
    Deref,
    Env,
    EvalError,
    ExitKind,
    If,
    IntVal,
    Kcall,
    KloopIncr,
    Kseq,
    Label,
    Load,
    MachineState,
    PtrVal,
    Return,
    Seq,
    Set,
    Skip,
    Stmt,
    Value,
    Var,
    stmt_vars,
    values_equal,
)
from .logic import (
    WILD,
    IfcAssertTemplate,
    LogicalVarDecl,
    PostconditionTemplate,
    enumerate_envs,
    ground_assertion,
    ground_heap,
    ground_stack,
    is_false,
    low_equiv,
    value_sort_key,
)
from .semantics import Done, FunctionTable, Next, Stuck, eval_expr, step

HARNESS = "__harness__"
RET_SLOT = "__ret"
RET_VAL = "ret_val"


@dataclass(frozen=True)
class EnumerationBudget:
    value_domain: tuple[Value, ...] = (IntVal(0), IntVal(1))
    max_pairs: int = 200_000
    fuel: int = 10_000
    sync_bound: int = 10_000
    slack: int = 0

    def __post_init__(self):
        if not self.value_domain:
            raise ValueError("empty value domain")
        if min(self.max_pairs, self.fuel, self.sync_bound) <= 0 or self.slack < 0:
            raise ValueError("budget entries must be positive")


def domain_range(k: int) -> tuple[Value, ...]:
    return tuple(IntVal(i) for i in range(k + 1))


# ---------------------------------------------------------------- verdicts


@dataclass
class Pass:
    pairs_checked: int = 0
    truncated: bool = False


@dataclass
class Counterexample:
    x: dict
    x2: dict
    s1: MachineState
    s2: MachineState
    kind: str  # finalLowEquiv | headEquiv | stuckMismatch
    detail: str = ""
    step: Optional[int] = None
    pairs_checked: int = 0

    def to_json(self) -> dict:
        return {
            "x": {k: str(v) for k, v in self.x.items()},
            "x2": {k: str(v) for k, v in self.x2.items()},
            "s1": state_json(self.s1),
            "s2": state_json(self.s2),
            "divergencePoint": {"kind": self.kind, "step": self.step, "detail": self.detail},
        }


@dataclass
class Inconclusive:
    pairs_checked: int = 0
    truncated: bool = False
    reason: str = "fuel exhausted"


@dataclass
class FailAt:
    n: int
    detail: str = ""


Verdict = Union[Pass, Counterexample, Inconclusive]


def state_json(s: MachineState) -> dict:
    return {"env": {k: str(v) for k, v in s.env.items()}, "mem": [str(v) for v in s.mem]}


# ---------------------------------------------------------------- pair enumeration


@dataclass
class Grounding:
    x: dict  # logical environment, without existential witnesses
    labels_env: dict  # with witnesses, used to ground classifications
    env_slots: dict
    mem_slots: list


class PairStream:
    """Iterable of (x, x', s1, s1') with a truncation flag set once the cap is hit."""

    def __init__(self, gen_factory: Callable[[], Iterator], max_pairs: int):
        self._factory = gen_factory
        self.max_pairs = max_pairs
        self.truncated = False
        self.count = 0

    def __iter__(self):
        self.count = 0
        for item in self._factory():
            if self.count >= self.max_pairs:
                self.truncated = True
                return
            self.count += 1
            yield item


@functools.lru_cache(maxsize=512)
def _groundings_cached(decls, pre, budget, variables, fixed_items, heap_size):
    gs = _groundings(decls, pre, budget, variables, dict(fixed_items), heap_size)
    by_x: dict = {}
    for g in gs:
        by_x.setdefault(_key(g.x), []).append(g)
    return gs, by_x


def _groundings(decls, pre: IfcAssertTemplate, budget, variables, fixed, heap_size) -> list[Grounding]:
    out = []
    seen = set()
    names = [d.name for d in decls]
    for xy in enumerate_envs(tuple(decls) + tuple(pre.exists)):
        ga = ground_assertion(xy, pre.assertion, heap_size)
        if ga is None:
            continue
        x = {k: xy[k] for k in names}
        env_slots: dict[str, tuple] = {}
        for v in variables:
            if v in ga.locals:
                env_slots[v] = (ga.locals[v],)
            elif v in fixed:
                env_slots[v] = (fixed[v],)
            else:
                env_slots[v] = budget.value_domain
        for k, val in ga.locals.items():
            env_slots.setdefault(k, (val,))
        size = heap_size if heap_size is not None else (max(ga.seps) + 1 if ga.seps else 0)
        mem_slots = []
        for a in range(size):
            if a in ga.seps:
                v = ga.seps[a]
                mem_slots.append(budget.value_domain if v is WILD else (v,))
            else:
                mem_slots.append((IntVal(0),))  # not owned: fixed filler
        key = (tuple(sorted(x.items(), key=str)), tuple(env_slots.items()), tuple(mem_slots))
        if key in seen:
            continue
        seen.add(key)
        out.append(Grounding(x, xy, env_slots, mem_slots))
    return out


def _slot_pairs(a: tuple, b: tuple, both_lo: bool) -> list[tuple]:
    if both_lo:
        return [(v, v) for v in a if v in b and v is not UNDEF]
    return list(itertools.product(a, b))


def _pairs_for(g1: Grounding, g2: Grounding, pre: IfcAssertTemplate) -> Iterator[tuple[MachineState, MachineState]]:
    n1, n2 = ground_stack(pre.stack, g1.labels_env), ground_stack(pre.stack, g2.labels_env)
    a1, a2 = ground_heap(pre.heap, g1.labels_env), ground_heap(pre.heap, g2.labels_env)
    keys = list(dict.fromkeys(list(g1.env_slots) + list(g2.env_slots)))
    per_slot = []
    for k in keys:
        sa = g1.env_slots.get(k, (UNDEF,))
        sb = g2.env_slots.get(k, (UNDEF,))
        per_slot.append(_slot_pairs(sa, sb, n1(k) is Label.Lo and n2(k) is Label.Lo))
    size = max(len(g1.mem_slots), len(g2.mem_slots))
    for a in range(size):
        sa = g1.mem_slots[a] if a < len(g1.mem_slots) else (UNDEF,)
        sb = g2.mem_slots[a] if a < len(g2.mem_slots) else (UNDEF,)
        per_slot.append(_slot_pairs(sa, sb, a1(a) is Label.Lo and a2(a) is Label.Lo))
    nk = len(keys)
    for combo in itertools.product(*per_slot):
        e1 = Env({k: combo[i][0] for i, k in enumerate(keys) if combo[i][0] is not UNDEF or k in g1.env_slots})
        e2 = Env({k: combo[i][1] for i, k in enumerate(keys) if combo[i][1] is not UNDEF or k in g2.env_slots})
        m1 = tuple(c[0] for c in combo[nk:])
        m2 = tuple(c[1] for c in combo[nk:])
        yield MachineState(e1, (), m1), MachineState(e2, (), m2)


def enumerate_initial_pairs(
    decls: Iterable[LogicalVarDecl],
    pre: IfcAssertTemplate,
    budget: EnumerationBudget = EnumerationBudget(),
    variables: Iterable[str] = (),
    fixed: Optional[Mapping[str, Value]] = None,
    heap_size: Optional[int] = None,
    only: Optional[tuple] = None,
) -> PairStream:
    """All (x, x', s1, s1') with both states satisfying pre and pairwise low-equivalent.

    `variables` are stack slots to materialize; those not fixed by LOCAL take
    `fixed[v]` if given, else range over the value domain."""
    decls = tuple(decls)
    variables = tuple(variables)
    fixed = dict(fixed or {})

    def gen():
        gs, by_x = _groundings_cached(decls, pre, budget, variables, tuple(sorted(fixed.items())), heap_size)
        if only is not None:
            prod = itertools.product(by_x.get(_key(only[0]), []), by_x.get(_key(only[1]), []))
        else:
            prod = itertools.product(gs, gs)
        seen = set()
        for g1, g2 in prod:
            for s1, s2 in _pairs_for(g1, g2, pre):
                key = (tuple(g1.x.items()), tuple(g2.x.items()), s1, s2)
                if key in seen:
                    continue
                seen.add(key)
                yield g1.x, g2.x, s1, s2

    return PairStream(gen, budget.max_pairs)


# ---------------------------------------------------------------- direct style


@dataclass(frozen=True)
class ExitResult:
    kind: str  # exit | stuck | fuel
    ek: Optional[ExitKind] = None
    state: Optional[MachineState] = None
    ret: Optional[Value] = None
    steps: int = 0
    reason: str = ""


def harness_stack(c: Stmt) -> tuple[Continuation, ...]:
    return (Kseq(c),) + _harness_tail()


def _harness_tail() -> tuple[Continuation, ...]:
    return (Kseq(Skip()), KloopIncr(Skip(), Skip()), Kcall(HARNESS, None, Env()))


def run_to_exit(s: MachineState, fuel: int, functions: Optional[FunctionTable] = None) -> ExitResult:
    """Run a harnessed state (see `harness_stack`) until c exits, with which exit kind."""
    tail = _harness_tail()
    targets = {
        tail: ExitKind.NRM,
        tail[2:]: ExitKind.BRK,
        tail[1:]: ExitKind.CONT,
    }
    for n in range(fuel + 1):
        ek = targets.get(s.conts)
        if ek is not None:
            return ExitResult("exit", ek, s, None, n)
        head = s.conts[0] if s.conts else None
        if isinstance(head, Kseq) and isinstance(head.stmt, Return):
            frame = next((c for c in s.conts[1:] if isinstance(c, Kcall)), None)
            if frame is not None and frame.fname == HARNESS:
                try:
                    v = eval_expr(s.env, head.stmt.expr) if head.stmt.expr is not None else None
                except EvalError as err:
                    return ExitResult("stuck", state=s, steps=n, reason=str(err))
                return ExitResult("exit", ExitKind.RET, s, v, n)
        if n == fuel:
            break
        r = step(s, functions)
        match r:
            case Next(s2):
                s = s2
            case Stuck(reason):
                return ExitResult("stuck", state=s, steps=n, reason=reason)
            case Done():
                return ExitResult("stuck", state=s, steps=n, reason="harness frame lost")
    return ExitResult("fuel", state=s, steps=fuel)


def _final_low_equiv(r1: ExitResult, r2: ExitResult, post: PostconditionTemplate, x, x2) -> Optional[str]:
    t = post[r1.ek]
    n1, n2 = ground_stack(t.stack, x), ground_stack(t.stack, x2)
    a1, a2 = ground_heap(t.heap, x), ground_heap(t.heap, x2)
    m1, m2 = r1.state.mem, r2.state.mem
    if r1.ek is ExitKind.RET:
        if n1(RET_VAL) is Label.Lo and n2(RET_VAL) is Label.Lo:
            same = (r1.ret is None and r2.ret is None) or (
                r1.ret is not None and r2.ret is not None and values_equal(r1.ret, r2.ret)
            )
            if not same:
                return f"ret_val: {r1.ret} vs {r2.ret}"
        s1 = MachineState(Env(), (), m1)
        s2 = MachineState(Env(), (), m2)
    else:
        s1 = MachineState(r1.state.env, (), m1)
        s2 = MachineState(r2.state.env, (), m2)
    if not low_equiv(s1, s2, n1, n2, a1, a2):
        return _diff(s1, s2, n1, n2, a1, a2)
    return None


def _diff(s1, s2, n1, n2, a1, a2) -> str:
    for k in sorted(set(s1.env) | set(s2.env)):
        if n1(k) is Label.Lo and n2(k) is Label.Lo:
            v1, v2 = s1.env.get(k, UNDEF), s2.env.get(k, UNDEF)
            if not values_equal(v1, v2):
                return f"{k}: {v1} vs {v2}"
    for i in range(max(len(s1.mem), len(s2.mem))):
        if a1(i) is Label.Lo and a2(i) is Label.Lo:
            v1 = s1.mem[i] if i < len(s1.mem) else UNDEF
            v2 = s2.mem[i] if i < len(s2.mem) else UNDEF
            if not values_equal(v1, v2):
                return f"@{i}: {v1} vs {v2}"
    return "low-equivalence fails"


def check_direct_ni(
    decls,
    pre: IfcAssertTemplate,
    c: Stmt,
    post: PostconditionTemplate,
    budget: EnumerationBudget = EnumerationBudget(),
    functions: Optional[FunctionTable] = None,
    heap_size: Optional[int] = None,
    variables: Optional[Iterable[str]] = None,
    fixed: Optional[Mapping[str, Value]] = None,
) -> Verdict:
    variables = sorted(stmt_vars(c)) if variables is None else list(variables)
    pairs = enumerate_initial_pairs(decls, pre, budget, variables, fixed, heap_size)
    cache: dict[MachineState, ExitResult] = {}

    def run(s: MachineState) -> ExitResult:
        h = MachineState(s.env, harness_stack(c), s.mem)
        if h not in cache:
            cache[h] = run_to_exit(h, budget.fuel, functions)
        return cache[h]

    inconclusive = 0
    checked = 0
    for x, x2, s1, s2 in pairs:
        checked += 1
        r1, r2 = run(s1), run(s2)
        if r1.kind == "fuel" or r2.kind == "fuel":
            inconclusive += 1
            continue
        if (r1.kind == "stuck") != (r2.kind == "stuck"):
            stuck = r1 if r1.kind == "stuck" else r2
            return Counterexample(x, x2, s1, s2, "stuckMismatch", stuck.reason, stuck.steps, checked)
        if r1.kind == "stuck":
            continue
        if r1.ek is not r2.ek:
            return Counterexample(x, x2, s1, s2, "headEquiv", f"exit kinds {r1.ek} vs {r2.ek}", None, checked)
        bad = _final_low_equiv(r1, r2, post, x, x2)
        if bad is not None:
            return Counterexample(x, x2, s1, s2, "finalLowEquiv", f"{r1.ek}: {bad}", None, checked)
    if inconclusive:
        return Inconclusive(checked, pairs.truncated, f"fuel exhausted on {inconclusive} pairs")
    return Pass(checked, pairs.truncated)


# ---------------------------------------------------------------- head equivalence and sync


def cont_equiv(c1: Continuation, c2: Continuation) -> bool:
    if c1 == c2:
        return True
    return isinstance(c1, Kcall) and isinstance(c2, Kcall) and c1.fname == c2.fname and c1.dest == c2.dest


def head_equiv(s: MachineState, s2: MachineState) -> bool:
    if not s.conts and not s2.conts:
        return True
    if not s.conts or not s2.conts:
        return False
    return cont_equiv(s.conts[0], s2.conts[0])


_DEFINED, _STUCK, _HALTED = "defined", "stuck", "halted"


def trajectory(s: MachineState, bound: int, functions: Optional[FunctionTable] = None) -> list:
    """States reached after 0..bound steps; ends early with a _STUCK or _HALTED marker."""
    out: list = [s]
    for _ in range(bound):
        r = step(s, functions)
        match r:
            case Next(s2):
                s = s2
                out.append(s)
            case Done():
                out.append(_HALTED)
                return out
            case Stuck():
                out.append(_STUCK)
                return out
    return out


def _sync_traj(t1: list, t2: list, bound: int, slack: int = 0) -> Union[Pass, FailAt]:
    for n in range(bound + 1):
        a = t1[n] if n < len(t1) else None
        b = t2[n] if n < len(t2) else None
        if a is None or b is None or a == _HALTED or b == _HALTED:
            # beyond the end of a run: no state is reached, nothing to compare
            if (a == _HALTED) != (b == _HALTED) and a is not None and b is not None:
                other = b if a == _HALTED else a
                if other != _STUCK:
                    return FailAt(n, "one run halted while the other continues")
            return Pass()
        if a == _STUCK or b == _STUCK:
            if a == b:
                return Pass()
            return FailAt(n, "stuck on one side only")
        if head_equiv(a, b):
            continue
        if slack and any(
            0 <= m < len(t2) and isinstance(t2[m], MachineState) and head_equiv(a, t2[m])
            for m in range(n - slack, n + slack + 1)
        ):
            continue
        return FailAt(n, "heads differ")
    return Pass()


def check_sync(s1: MachineState, s2: MachineState, bound: int, functions: Optional[FunctionTable] = None, slack: int = 0):
    return _sync_traj(trajectory(s1, bound, functions), trajectory(s2, bound, functions), bound, slack)


def _iguard_core(
    decls, p, stacks: Callable, budget, functions, heap_size, variables, fixed, only=None
) -> Verdict:
    pairs = enumerate_initial_pairs(decls, p, budget, variables, fixed, heap_size, only)
    cache: dict = {}
    keep: list = []  # keeps stacks alive so their ids stay unique

    def traj(s):
        key = (id(s.conts), s.env, s.mem)
        if key not in cache:
            keep.append(s.conts)
            cache[key] = trajectory(s, budget.sync_bound, functions)
        return cache[key]

    checked = 0
    for x, x2, s1, s2 in pairs:
        for k, k2 in stacks(x, x2):
            checked += 1
            a = MachineState(s1.env, tuple(k), s1.mem)
            b = MachineState(s2.env, tuple(k2), s2.mem)
            r = _sync_traj(traj(a), traj(b), budget.sync_bound, budget.slack)
            if isinstance(r, FailAt):
                return Counterexample(x, x2, a, b, "headEquiv", r.detail, r.n, checked)
    return Pass(checked, pairs.truncated)


def check_iguard(
    decls,
    p: IfcAssertTemplate,
    k: tuple,
    k2: tuple,
    budget: EnumerationBudget = EnumerationBudget(),
    functions: Optional[FunctionTable] = None,
    heap_size: Optional[int] = None,
    variables: Iterable[str] = (),
    fixed: Optional[Mapping[str, Value]] = None,
) -> Verdict:
    return _iguard_core(decls, p, lambda x, x2: [(k, k2)], budget, functions, heap_size, tuple(variables), fixed)


# ---------------------------------------------------------------- guard style


def test_harness(tn: Stmt = Skip(), tc: Stmt = Skip(), tb: Stmt = Skip(), tr: Stmt = Skip()) -> tuple:
    """Residual stack observing each exit kind: nrm runs tn, cont runs tc,
    brk runs tb, ret binds the value to `__ret` and runs tr."""
    return (
        Kseq(tn),
        KloopIncr(Seq(tc, Break()), Skip()),
        Kseq(tb),
        Kcall(HARNESS, RET_SLOT, Env()),
        Kseq(tr),
    )


def value_test(loc: str, values: Iterable[Value]) -> Stmt:
    """`if (loc == d0) __t = 0; else if (loc == d1) __t = 1; ... else __t = n`."""
    values = list(values)
    out: Stmt = Set("__t", Const(IntVal(len(values))))
    for i in range(len(values) - 1, -1, -1):
        out = If(BinOp("==", Var(loc), Const(values[i])), Set("__t", Const(IntVal(i))), out)
    return out


def cell_test(addr: int, values: Iterable[Value]) -> Stmt:
    return Seq(Load("__v", Deref(Const(PtrVal(addr)))), value_test("__v", values))


def _exit_stmt(ek: ExitKind) -> Stmt:
    return {
        ExitKind.NRM: Skip(),
        ExitKind.BRK: Break(),
        ExitKind.CONT: Continue(),
        ExitKind.RET: Return(Var(RET_VAL)),
    }[ek]


@dataclass
class GuardReport:
    verdict: Verdict
    skipped: list = field(default_factory=list)  # tests failing the return-guard premise


def check_judgment_guard_style(
    decls,
    pre: IfcAssertTemplate,
    c: Stmt,
    post: PostconditionTemplate,
    tests: Optional[Iterable[tuple]] = None,
    budget: EnumerationBudget = EnumerationBudget(),
    functions: Optional[FunctionTable] = None,
    heap_size: Optional[int] = None,
    variables: Optional[Iterable[str]] = None,
    fixed: Optional[Mapping[str, Value]] = None,
) -> Verdict:
    """Judgment meaning: for each test pair whose return guard holds, the
    precondition guards `c` on top of it. Without explicit tests the
    canonical bit-test family is generated per (x, x') slice."""
    rep = guard_style_report(decls, pre, c, post, tests, budget, functions, heap_size, variables, fixed)
    return rep.verdict


def guard_style_report(decls, pre, c, post, tests=None, budget=EnumerationBudget(), functions=None,
                       heap_size=None, variables=None, fixed=None) -> GuardReport:
    decls = tuple(decls)
    variables = sorted(stmt_vars(c)) if variables is None else list(variables)
    if tests is not None:
        tests = [(tuple(k), tuple(k2)) for k, k2 in tests]
        fam = lambda x, x2: tests  # noqa: E731
    else:
        fam = _canonical_family(decls, pre, c, post, budget, functions, heap_size, variables, fixed)

    # return-guard premise per exit kind
    skipped = []
    ok_tests: dict = {}

    def premise_ok(k, k2, x, x2) -> bool:
        key = (k, k2, _key(x), _key(x2))
        if key not in ok_tests:
            good = True
            for ek in EXIT_KINDS:
                t = post[ek]
                if is_false(t.assertion):
                    continue
                e = (Kseq(_exit_stmt(ek)),)
                # only slots the residual stacks read can influence the runs
                read = sorted(v for v in _stack_vars(e + k) | _stack_vars(e + k2) if not v.startswith("__"))
                r = _iguard_core(decls, t, lambda *_: [(e + k, e + k2)], budget, functions, heap_size,
                                 tuple(read), None, (x, x2))
                if isinstance(r, Counterexample):
                    good = False
                    skipped.append({"ek": str(ek), "detail": r.detail})
                    break
            ok_tests[key] = good
        return ok_tests[key]

    def stacks(x, x2):
        out = []
        for k, k2 in fam(x, x2):
            if premise_ok(k, k2, x, x2):
                out.append(((Kseq(c),) + k, (Kseq(c),) + k2))
        return out

    v = _iguard_core(decls, pre, stacks, budget, functions, heap_size, tuple(variables), fixed)
    return GuardReport(v, skipped)


def _canonical_family(decls, pre, c, post, budget, functions, heap_size, variables, fixed):
    """Per (x, x') slice: the all-Skip harness plus one value test per
    location classified Lo at both x and x' by post at some exit kind."""
    pairs = enumerate_initial_pairs(decls, pre, budget, variables, fixed, heap_size)
    finals: dict[tuple, list[ExitResult]] = {}
    envs: dict[tuple, dict] = {}
    for x, x2, s1, s2 in pairs:
        key = (_key(x), _key(x2))
        envs[key] = (x, x2)
        lst = finals.setdefault(key, [])
        for s in (s1, s2):
            lst.append(run_to_exit(MachineState(s.env, harness_stack(c), s.mem), budget.fuel, functions))
    cache: dict = {}

    def fam(x, x2):
        key = (_key(x), _key(x2))
        if key in cache:
            return cache[key]
        results = [r for r in finals.get(key, []) if r.kind == "exit"]
        vals: set = set(budget.value_domain)
        for r in results:
            vals.update(v for v in r.state.env.values() if v is not UNDEF)
            vals.update(v for v in r.state.mem if v is not UNDEF)
            if r.ret is not None and r.ret is not UNDEF:
                vals.add(r.ret)
        D = sorted(vals, key=value_sort_key)
        out = [(test_harness(), test_harness())]
        for ek in EXIT_KINDS:
            t = post[ek]
            if is_false(t.assertion):
                continue
            n1, n2 = ground_stack(t.stack, x), ground_stack(t.stack, x2)
            a1, a2 = ground_heap(t.heap, x), ground_heap(t.heap, x2)
            slot = {ExitKind.NRM: "tn", ExitKind.CONT: "tc", ExitKind.BRK: "tb", ExitKind.RET: "tr"}[ek]
            if ek is ExitKind.RET:
                locs = [RET_SLOT] if n1(RET_VAL) is Label.Lo and n2(RET_VAL) is Label.Lo else []
            else:
                names = set(variables) | {k for k, _ in t.stack.entries}
                for r in results:
                    names |= set(r.state.env)
                locs = [v for v in sorted(names) if n1(v) is Label.Lo and n2(v) is Label.Lo]
            for v in locs:
                h = test_harness(**{slot: value_test(v, D)})
                out.append((h, h))
            size = heap_size or max((len(r.state.mem) for r in results), default=0)
            for a in range(size):
                if a1(a) is Label.Lo and a2(a) is Label.Lo:
                    h = test_harness(**{slot: cell_test(a, D)})
                    out.append((h, h))
        cache[key] = out
        return out

    return fam


def _stack_vars(k: tuple) -> set[str]:
    out: set[str] = set()
    for c in k:
        match c:
            case Kseq(st):
                out |= stmt_vars(st)
            case KloopIncr(i, b):
                out |= stmt_vars(i) | stmt_vars(b)
    return out


def _key(x: Mapping) -> tuple:
    return tuple(sorted(((k, str(v)) for k, v in x.items())))


# ---------------------------------------------------------------- program level


def function_setup(prog, fname: str):
    """(decls, pre, body, post, functions, heap_size, variables, fixed) for a function."""
    f = prog.function(fname)
    spec = f.spec
    fixed = {l: UNDEF for l in f.local_names}
    variables = list(f.param_names) + list(f.local_names)
    return (spec.logicals, spec.pre, f.body, spec.post, prog.function_table(), prog.heap_size or None, variables, fixed)


def test_function(prog, fname: str, budget: EnumerationBudget = EnumerationBudget(), guard_style: bool = True):
    decls, pre, body, post, funcs, hs, variables, fixed = function_setup(prog, fname)
    direct = check_direct_ni(decls, pre, body, post, budget, funcs, hs, variables, fixed)
    guard = None
    if guard_style:
        guard = check_judgment_guard_style(decls, pre, body, post, None, budget, funcs, hs, variables, fixed)
    return direct, guard
