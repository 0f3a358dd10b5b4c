import pytest

from vstflow.core import (
    UNDEF,
    BinOp,
    BoolVal,
    Break,
    Const,
    Env,
    EvalError,
    If,
    IntVal,
    Label,
    Loop,
    Skip,
    UnOp,
    Var,
    apply_binop,
    free_vars,
    values_equal,
    while_loop,
    wrap64,
)


def test_free_vars_examples():
    assert free_vars(Const(IntVal(5))) == set()
    assert free_vars(BinOp("+", Var("sec"), Var("pub"))) == {"sec", "pub"}
    assert free_vars(UnOp("!", Var("b"))) == {"b"}


def test_label_order():
    assert list(Label) == [Label.Lo, Label.Hi]
    assert Label.Lo < Label.Hi


def test_undef_never_equal():
    assert not values_equal(UNDEF, UNDEF)
    assert not values_equal(UNDEF, IntVal(0))
    assert values_equal(IntVal(3), IntVal(3))
    with pytest.raises(EvalError):
        apply_binop("+", UNDEF, IntVal(1))


def test_arithmetic_wraps_to_64_bits():
    assert wrap64(2**63) == -(2**63)
    assert apply_binop("+", IntVal(2**63 - 1), IntVal(1)) == IntVal(-(2**63))


def test_type_mismatch():
    with pytest.raises(EvalError):
        apply_binop("+", BoolVal(True), IntVal(1))


def test_while_desugars_to_loop():
    inv = object()
    lp = while_loop(Var("b"), Skip(), inv)
    assert lp == Loop(Skip(), If(Var("b"), Skip(), Break()), inv, inv)


def test_env_is_hashable_and_persistent():
    e = Env({"a": IntVal(1)})
    e2 = e.set("a", IntVal(2))
    assert e["a"] == IntVal(1) and e2["a"] == IntVal(2)
    assert hash(e) == hash(Env({"a": IntVal(1)}))
    assert e == {"a": IntVal(1)}
