import itertools

from hypothesis import given, settings
from hypothesis import strategies as st

from vstflow.core import (
    BINOPS,
    UNDEF,
    BinOp,
    BoolVal,
    Const,
    EvalError,
    IntVal,
    MachineState,
    PtrVal,
    UnOp,
    Var,
    free_vars,
)
from vstflow.logic import (
    FALSE,
    FALSE_TRIPLE,
    HI,
    LO,
    Assertion,
    GroundClsf,
    IfcAssertTemplate,
    LogicalVarDecl,
    StackClsf,
    clsf_expr,
    clsf_exprs,
    clsf_lvalue,
    clsf_update,
    entails,
    ground_stack,
    lift_glb,
    lift_lle,
    lift_lub,
    glb,
    lle,
    low_equiv,
    low_equiv_simple,
    lub,
    nret,
    satisfies,
)
from vstflow.core import Deref, ExitKind, Label
from vstflow.parser import parse_triple
from vstflow.semantics import eval_expr

Lo, Hi = Label.Lo, Label.Hi
N_CASES = 1000

labels = st.sampled_from([Lo, Hi])
KEYS = ("a", "b", "c")
ground = st.builds(
    GroundClsf,
    st.dictionaries(st.sampled_from(KEYS), labels),
    labels,
)


# ---------------------------------------------------------------- lattice


def test_lattice_examples():
    assert lub(Lo, Hi) is Hi
    assert glb(Hi, Hi) is Hi
    assert lle(Lo, Hi)
    assert not lle(Hi, Lo)


@settings(max_examples=N_CASES)
@given(labels, labels, labels)
def test_label_lattice_laws(a, b, c):
    assert lub(a, b) == lub(b, a) and glb(a, b) == glb(b, a)
    assert lub(a, lub(b, c)) == lub(lub(a, b), c)
    assert glb(a, glb(b, c)) == glb(glb(a, b), c)
    assert lub(a, a) == a and glb(a, a) == a
    assert lub(a, glb(a, b)) == a and glb(a, lub(a, b)) == a
    assert lle(a, b) == (lub(a, b) == b)


def _same(f, g):
    return all(f(k) == g(k) for k in KEYS + ("zz",))


@settings(max_examples=N_CASES)
@given(ground, ground, ground)
def test_lifted_lattice_laws(f, g, h):
    assert _same(lift_lub(f, g), lift_lub(g, f))
    assert _same(lift_glb(f, g), lift_glb(g, f))
    assert _same(lift_lub(f, lift_lub(g, h)), lift_lub(lift_lub(f, g), h))
    assert _same(lift_glb(f, lift_glb(g, h)), lift_glb(lift_glb(f, g), h))
    assert _same(lift_lub(f, f), f) and _same(lift_glb(f, f), f)
    assert _same(lift_lub(f, lift_glb(f, g)), f)
    assert _same(lift_glb(f, lift_lub(f, g)), f)
    assert lift_lle(f, g) == _same(lift_lub(f, g), g)


# ---------------------------------------------------------------- clsf_expr


def test_clsf_expr_examples():
    n = GroundClsf({"sec": Hi, "pub": Lo}, Hi)
    assert clsf_expr(n, BinOp("+", Var("sec"), Var("pub"))) is Hi
    assert clsf_expr(n, Const(IntVal(5))) is Lo
    assert clsf_expr(GroundClsf({"pub": Lo}, Hi), Var("pub")) is Lo
    assert clsf_lvalue(n, Deref(Var("pub"))) is Lo
    assert clsf_exprs(n, [Var("sec"), Var("pub")]) == [Hi, Lo]


def exprs(depth):
    leaf = st.one_of(
        st.sampled_from(KEYS).map(Var),
        st.integers(0, 2).map(lambda i: Const(IntVal(i))),
    )
    if depth == 0:
        return leaf
    sub = exprs(depth - 1)
    return st.one_of(
        leaf,
        st.builds(UnOp, st.sampled_from(["!", "-"]), sub),
        st.builds(BinOp, st.sampled_from(BINOPS), sub, sub),
    )


def _outcome(env, e):
    try:
        return eval_expr(env, e)
    except EvalError:
        return "error"


@settings(max_examples=N_CASES)
@given(st.dictionaries(st.sampled_from(KEYS), labels), exprs(3))
def test_clsf_expr_semantic_soundness(entries, e):
    """A Lo expression evaluates identically under envs agreeing on Lo variables."""
    n = GroundClsf(entries, Hi)
    if clsf_expr(n, e) is not Lo:
        return
    dom = [IntVal(0), IntVal(1), IntVal(2)]
    for vals in itertools.product(dom, repeat=len(KEYS)):
        env = dict(zip(KEYS, vals))
        for vals2 in itertools.product(dom, repeat=len(KEYS)):
            env2 = dict(zip(KEYS, vals2))
            if all(env[k] == env2[k] for k in KEYS if n(k) is Lo):
                assert _outcome(env, e) == _outcome(env2, e)


@given(exprs(3))
def test_clsf_expr_is_fold_over_free_vars(e):
    n = GroundClsf({"a": Lo, "b": Hi}, Hi)
    want = Hi if any(n(v) is Hi for v in free_vars(e)) else Lo
    assert clsf_expr(n, e) is want


# ---------------------------------------------------------------- assertions


SEC3_PRE = parse_triple(
    "PROP(x.h != x.l) LOCAL(v = x.v, b = x.b, highptr = x.h, lowptr = x.l)"
    " SEP(x.h |-> _, x.l |-> _),"
    " [b: Lo, highptr: Hi, lowptr: Lo, v: (x.b ? Hi : Lo)], [x.l: Lo, x.h: Hi]"
)


def test_satisfies_examples():
    x = {"x.v": IntVal(5), "x.b": BoolVal(True), "x.h": PtrVal(0), "x.l": PtrVal(1)}
    env = {"v": IntVal(5), "b": BoolVal(True), "highptr": PtrVal(0), "lowptr": PtrVal(1)}
    s = MachineState.make(env, (), (IntVal(0), IntVal(9)))
    assert satisfies(x, SEC3_PRE.assertion, s)
    assert satisfies({}, Assertion(), s)
    assert not satisfies({}, Assertion(props=(FALSE,)), s)
    # wrong pointer
    s2 = MachineState.make({**env, "lowptr": PtrVal(0)}, (), s.mem)
    assert not satisfies(x, SEC3_PRE.assertion, s2)
    # aliasing violates PROP
    x2 = {**x, "x.l": PtrVal(0)}
    assert not satisfies(x2, SEC3_PRE.assertion, s2)


def test_stack_classification_value_dependent():
    n = SEC3_PRE.stack
    assert ground_stack(n, {"x.b": IntVal(1)})("v") is Hi
    assert ground_stack(n, {"x.b": IntVal(0)})("v") is Lo
    assert ground_stack(n, {"x.b": IntVal(0)})("other") is Hi


def test_entails_examples():
    decls = (LogicalVarDecl("x.k", (IntVal(0), IntVal(1))),)
    lo = parse_triple("PROP() LOCAL(pub = x.k) SEP(), [pub: Lo], []")
    hi = parse_triple("PROP() LOCAL(pub = x.k) SEP(), [pub: Hi], []")
    assert entails(decls, lo, lo)
    assert entails(decls, lo, hi)
    assert not entails(decls, hi, lo)
    wrong = parse_triple("PROP() LOCAL(pub = 7) SEP(), [pub: Hi], []")
    assert not entails(decls, lo, wrong)


def test_entails_transitive_on_chain():
    decls = (LogicalVarDecl("x.k", (IntVal(0), IntVal(1))),)
    a = parse_triple("PROP(x.k == 0) LOCAL(pub = x.k) SEP(), [pub: Lo], []")
    b = parse_triple("PROP() LOCAL(pub = x.k) SEP(), [pub: (x.k == 0 ? Lo : Hi)], []")
    c = parse_triple("PROP() LOCAL() SEP(), [], []")
    assert entails(decls, a, b) and entails(decls, b, c) and entails(decls, a, c)


def test_props_strengthening_is_monotone():
    decls = (LogicalVarDecl("x.k", (IntVal(0), IntVal(1))),)
    weak = parse_triple("PROP() LOCAL(pub = x.k) SEP(), [], []")
    strong = parse_triple("PROP(x.k == 1) LOCAL(pub = x.k) SEP(), [], []")
    assert entails(decls, strong, weak)
    assert not entails(decls, weak, strong)


def test_nret():
    p = parse_triple("PROP() LOCAL() SEP(), [a: Lo], []")
    q = nret(p)
    assert q[ExitKind.NRM] == p
    for ek in (ExitKind.BRK, ExitKind.CONT, ExitKind.RET):
        assert q[ek] == FALSE_TRIPLE
        assert entails((), q[ek], IfcAssertTemplate())
        assert entails((), q[ek], p)


def test_clsf_update():
    f = StackClsf((("pub", LO),))
    g = clsf_update(f, "pub", HI)
    assert ground_stack(g, {})("pub") is Hi
    assert ground_stack(g, {})("sec") is Hi
    same = clsf_update(f, "pub", f.lookup("pub"))
    assert ground_stack(same, {})("pub") == ground_stack(f, {})("pub")


# ---------------------------------------------------------------- low-equivalence


def st_of(env, mem=()):
    return MachineState.make(env, (), mem)


def test_low_equiv_simple_examples():
    n = GroundClsf({"sec": Hi, "pub": Lo}, Hi)
    a = GroundClsf({}, Hi)
    s = st_of({"sec": IntVal(5), "pub": IntVal(3)})
    assert low_equiv_simple(s, s, n, a)
    assert low_equiv_simple(s, st_of({"sec": IntVal(7), "pub": IntVal(3)}), n, a)
    n2 = GroundClsf({"pub": Lo}, Hi)
    assert not low_equiv_simple(st_of({"pub": IntVal(3)}), st_of({"pub": IntVal(4)}), n2, a)


def test_low_equiv_pairwise():
    a = GroundClsf({}, Hi)
    lo, hi = GroundClsf({"v": Lo}, Hi), GroundClsf({"v": Hi}, Hi)
    s, s2 = st_of({"v": IntVal(1)}), st_of({"v": IntVal(2)})
    assert low_equiv(s, s2, lo, hi, a, a)
    assert low_equiv(s, s, lo, lo, a, a)
    assert not low_equiv(s, s2, lo, lo, a, a)


def test_undef_at_lo_location_is_not_low_equivalent():
    n = GroundClsf({"v": Lo}, Hi)
    s = st_of({"v": UNDEF})
    assert not low_equiv_simple(s, s, n, GroundClsf({}, Hi))


values = st.sampled_from([IntVal(0), IntVal(1), IntVal(2), UNDEF])
defined = st.sampled_from([IntVal(0), IntVal(1), IntVal(2)])


def states(vals):
    return st.builds(
        lambda e, m: st_of(e, m),
        st.fixed_dictionaries({k: vals for k in KEYS}),
        st.lists(vals, min_size=2, max_size=2),
    )


heap_ground = st.builds(GroundClsf, st.dictionaries(st.sampled_from([0, 1]), labels), labels)


@settings(max_examples=N_CASES)
@given(states(values), states(values), ground, ground, heap_ground, heap_ground)
def test_low_equiv_symmetric(s, s2, n, n2, a, a2):
    assert low_equiv(s, s2, n, n2, a, a2) == low_equiv(s2, s, n2, n, a2, a)


@settings(max_examples=N_CASES)
@given(states(defined), ground, ground, heap_ground, heap_ground)
def test_low_equiv_reflexive(s, n, n2, a, a2):
    assert low_equiv(s, s, n, n2, a, a2)


@settings(max_examples=N_CASES)
@given(states(values), states(values), ground, heap_ground)
def test_low_equiv_coincides_with_simple(s, s2, n, a):
    assert low_equiv(s, s2, n, n, a, a) == low_equiv_simple(s, s2, n, a)
