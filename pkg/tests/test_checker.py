import itertools

import pytest

from conftest import CORPUS, corpus_files, corpus_with, tags
from vstflow.checker import (
    MUTATIONS,
    Derivation,
    RuleFailure,
    RuleFailureError,
    check_program,
    check_stmt,
    symbolic_post,
)
from vstflow.core import IntVal, Label
from vstflow.logic import LogicalVarDecl, enumerate_envs, ground_heap, ground_stack, nret
from vstflow.parser import parse, parse_file, parse_stmt, parse_triple

Lo, Hi = Label.Lo, Label.Hi
BIT = (IntVal(0), IntVal(1))
DECLS = tuple(LogicalVarDecl(n, BIT) for n in ("x.a", "x.b", "x.c"))


def verdicts():
    for path in corpus_files():
        for name, v in check_program(parse_file(path)).items():
            yield path, name, v


VERDICTS = list(verdicts())


def test_classify_store_accepted_at_if():
    d = check_program(parse_file(CORPUS / "classify_store.ifc.c"))["f"]
    assert isinstance(d, Derivation)
    assert d.rule == "ifc-if"
    assert d.rules_used() == {"ifc-if", "ifc-store"}


def test_leak_rejected_by_label_order():
    v = check_program(parse_file(CORPUS / "leak_assign.ifc.c"))["leak_assign"]
    assert isinstance(v, RuleFailure)
    assert v.rule in ("ifc-post", "ifc-set")
    assert "label order" in v.premise and "pub" in v.premise
    assert v.span is not None and v.span.line == 7


def test_empty_body_accepted_via_skip():
    pre = parse_triple("PROP() LOCAL(a = x.a) SEP(), [a: Lo], []")
    d = check_stmt(DECLS, {}, pre, parse_stmt("skip;"), nret(pre))
    assert isinstance(d, Derivation) and d.rule == "ifc-skip"


def test_if_on_hi_guard_rejected():
    pre = parse_triple("PROP() LOCAL(h = x.a) SEP(), [h: Hi], []")
    v = check_stmt(DECLS, {}, pre, parse_stmt("if (h) { skip; } else { skip; }"), nret(pre))
    assert isinstance(v, RuleFailure) and v.rule == "ifc-if"


def test_if_on_value_dependent_guard_rejected():
    pre = parse_triple("PROP() LOCAL(h = x.a) SEP(), [h: (x.b ? Hi : Lo)], []")
    v = check_stmt(DECLS, {}, pre, parse_stmt("if (h) { skip; } else { skip; }"), nret(pre))
    assert isinstance(v, RuleFailure) and v.rule == "ifc-if"
    assert v.witness["x.b"] == "1"


def test_set_raises_target_label():
    pre = parse_triple("PROP() LOCAL(sec = x.a, pub = x.b) SEP(), [sec: Hi, pub: Lo], []")
    q = symbolic_post(DECLS, pre, parse_stmt("pub = sec;"))
    assert ground_stack(q.stack, {})("pub") is Hi
    assert dict(q.assertion.locals)["pub"] == dict(pre.assertion.locals)["sec"]


def test_store_lo_into_lo_cell_accepted():
    pre = parse_triple("PROP() LOCAL(p = @0, k = x.a) SEP(@0 |-> _), [p: Lo, k: Lo], [@0: Lo]")
    post = parse_triple("PROP() LOCAL() SEP(@0 |-> x.a), [], [@0: Lo]")
    d = check_stmt(DECLS, {}, pre, parse_stmt("*p = k;"), nret(post), heap_size=1)
    assert isinstance(d, Derivation) and d.rule == "ifc-store"
    q = symbolic_post(DECLS, pre, parse_stmt("*p = k;"), heap_size=1)
    assert ground_heap(q.heap, {})(0) is Lo


def test_store_through_unowned_pointer_rejected():
    pre = parse_triple("PROP() LOCAL(p = @0, k = x.a) SEP(), [p: Lo, k: Lo], []")
    with pytest.raises(RuleFailureError):
        symbolic_post(DECLS, pre, parse_stmt("*p = k;"), heap_size=1)


def test_symbolic_post_examples():
    pre = parse_triple("PROP() LOCAL(p = @0, k = x.a) SEP(@0 |-> x.c), [p: Lo, k: Lo], [@0: Hi]")
    assert symbolic_post(DECLS, pre, parse_stmt("skip;")) == pre
    q = symbolic_post(DECLS, pre, parse_stmt("y = 3;"))
    assert dict(q.assertion.locals)["y"] == parse_triple("PROP() LOCAL(y = 3) SEP(), [], []").assertion.locals[0][1]
    assert ground_stack(q.stack, {})("y") is Lo
    q = symbolic_post(DECLS, pre, parse_stmt("y = *p;"), heap_size=1)
    assert ground_stack(q.stack, {})("y") is Hi


def test_recursion_rejected():
    src = (
        "void f()\n//@ logical x.a in {0..1};\n//@ pre PROP() LOCAL() SEP(), [], [];\n"
        "//@ post (nrm: PROP() LOCAL() SEP(), [], []);\n{ f(); }"
    )
    v = check_program(parse(src))["f"]
    assert isinstance(v, RuleFailure) and v.rule == "ifc-call" and "recursive" in v.premise


def test_value_dependent_return_label_rejected():
    src = (
        "int g(int a)\n//@ logical x.a in {0..1};\n"
        "//@ pre PROP() LOCAL(a = x.a) SEP(), [a: Lo], [];\n"
        "//@ post (nrm: PROP(false) LOCAL() SEP(), [], [], ret: PROP() LOCAL() SEP(), [ret_val: (x.a ? Hi : Lo)], []);\n"
        "{ return a; }\n"
        "void f(int b)\n//@ logical x.b in {0..1};\n"
        "//@ pre PROP() LOCAL(b = x.b) SEP(), [b: Lo], [];\n"
        "//@ post (nrm: PROP() LOCAL() SEP(), [], []);\n"
        "{ int r; r = g(b); }"
    )
    v = check_program(parse(src))["f"]
    assert isinstance(v, RuleFailure) and v.rule == "ifc-call"


def test_derivations_replay():
    accepted = [v for _, _, v in VERDICTS if isinstance(v, Derivation)]
    assert len(accepted) >= 8
    for v in accepted:
        assert v.replay()
        assert all(e.result.holds for d in v.walk() for e in d.entailments)


@pytest.mark.parametrize("path", corpus_files(), ids=lambda p: p.name)
def test_corpus_verdicts_match_categories(path):
    vs = [v for p, _, v in VERDICTS if p == path]
    if "secure" in tags(path):
        assert all(isinstance(v, Derivation) for v in vs), [str(v) for v in vs]
    else:
        assert any(isinstance(v, RuleFailure) for v in vs)


def test_hi_branch_programs_rejected_at_if():
    paths = corpus_with("hi-branch")
    assert len(paths) >= 5
    for path in paths:
        for v in check_program(parse_file(path)).values():
            assert isinstance(v, RuleFailure) and v.rule == "ifc-if", (path.name, str(v))


@pytest.mark.parametrize("mutation", MUTATIONS)
def test_mutations_accept_some_leak(mutation):
    accepted = []
    for path in corpus_with("insecure"):
        for name, v in check_program(parse_file(path), mutations=(mutation,)).items():
            if isinstance(v, Derivation):
                accepted.append(name)
    assert accepted


# ---------------------------------------------------------------- monotonicity

PRIMS = ["a = b;", "a = a + b;", "a = 3;", "a = *p;", "*p = a;", "*p = b + 1;", "b = *p;"]
SLOTS = ("a", "b", "p", "@0")


def _pre(labels):
    st = ", ".join(f"{k}: {l.name}" for k, l in zip(SLOTS[:3], labels))
    return parse_triple(
        f"PROP() LOCAL(a = x.a, b = x.b, p = @0) SEP(@0 |-> x.c), [{st}], [@0: {labels[3].name}]"
    )


def _out_labels(q):
    out = []
    for x in enumerate_envs(DECLS):
        n, h = ground_stack(q.stack, x), ground_heap(q.heap, x)
        out.append(tuple(n(k) for k in SLOTS[:3]) + (h(0),))
    return out


@pytest.mark.parametrize("stmt", PRIMS)
def test_symbolic_post_is_monotone(stmt):
    c = parse_stmt(stmt)
    results = {}
    for labels in itertools.product((Lo, Hi), repeat=4):
        try:
            results[labels] = _out_labels(symbolic_post(DECLS, _pre(labels), c, heap_size=1))
        except RuleFailureError:
            results[labels] = None
    for l1, l2 in itertools.product(results, repeat=2):
        if all(a <= b for a, b in zip(l1, l2)) and results[l1] is not None and results[l2] is not None:
            for o1, o2 in zip(results[l1], results[l2]):
                assert all(a <= b for a, b in zip(o1, o2)), (stmt, l1, l2)
