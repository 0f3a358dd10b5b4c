import pytest

from conftest import CORPUS, corpus_files
from vstflow.core import Break, Continue, If, PtrVal, Seq, Skip, Store, Var, Deref
from vstflow.logic import FALSE_TRIPLE, LogicalVarDecl
from vstflow.parser import ParseError, parse, parse_file, pretty, pretty_stmt


@pytest.mark.parametrize("path", corpus_files(), ids=lambda p: p.name)
def test_round_trip(path):
    p = parse_file(path)
    text = pretty(p)
    assert parse(text) == p
    assert pretty(parse(text)) == text


def test_corpus_is_large_enough():
    assert len(corpus_files()) >= 20


def test_classify_store_shape():
    p = parse_file(CORPUS / "classify_store.ifc.c")
    assert len(p.functions) == 1
    f = p.function("f")
    assert f.param_names == ("v", "b", "highptr", "lowptr")
    assert f.body == If(
        Var("b"),
        Store(Deref(Var("highptr")), Var("v")),
        Store(Deref(Var("lowptr")), Var("v")),
    )
    assert p.heap_size == 2
    assert LogicalVarDecl("x.h", (PtrVal(0), PtrVal(1))) in f.spec.logicals


def test_empty_function():
    p = parse("void g(){}")
    assert p.function("g").body == Skip()
    assert p.function("g").spec.post.brk == FALSE_TRIPLE


def test_pretty_statements():
    assert pretty_stmt(Skip()) == "skip;"
    assert pretty_stmt(Seq(Break(), Continue())) == "break; continue;"


@pytest.mark.parametrize(
    "src,msg,line,col",
    [
        ("void h(){ while (1) {} }", "loop without invariant", 1, 11),
        ("void f(){} void f(){}", "duplicate function f", 1, 12),
        ("void f(){ g(); }", "call to unknown function g", 1, 11),
        ("void g(){} void f(){ g(); }", "call to unspecified function g", 1, 22),
        ("void f(int a) {\n  a = 1 + *a;\n}", "dereference only allowed", 2, 11),
        ("void f() { x = ; }", "unexpected ';'", 1, 16),
        ("void f()\n//@ logical x.a in {0..1};\n//@ pre PROP(x.q == 1) LOCAL() SEP(), [], [];\n{}",
         "undeclared logical variable x.q", 1, 1),
        ("void f() { int a; int a; }", "duplicate local a", 1, 23),
        ("void f() { $ }", "unexpected character", 1, 12),
    ],
)
def test_errors_carry_spans(src, msg, line, col):
    with pytest.raises(ParseError) as ei:
        parse(src)
    assert msg in ei.value.message
    assert (ei.value.span.line, ei.value.span.col) == (line, col)


def test_domain_cap():
    src = "void f()\n//@ logical x.a in {0..20};\n{}"
    with pytest.raises(ParseError, match="cap"):
        parse(src)
