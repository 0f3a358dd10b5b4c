import random

import pytest

from conftest import corpus_files
from vstflow.core import (
    UNDEF,
    BinOp,
    BoolVal,
    Break,
    Call,
    Const,
    Env,
    ExitKind,
    If,
    IntVal,
    Kcall,
    KloopBody,
    KloopIncr,
    Kseq,
    Load,
    MachineState,
    PtrVal,
    Return,
    Seq,
    Set,
    Skip,
    Store,
    Var,
    stmt_vars,
    while_loop,
)
from vstflow.oracle import EnumerationBudget, enumerate_initial_pairs, function_setup
from vstflow.parser import parse_file, parse_stmt
from vstflow.semantics import (
    Done,
    FuelExhausted,
    FuncDef,
    Next,
    NoEnclosingFrame,
    Stuck,
    eval_expr,
    exit_cont,
    run_n,
    run_to_completion,
    step,
)
from vstflow.core import Deref, EvalError

BRK, CONT, RET, NRM = ExitKind.BRK, ExitKind.CONT, ExitKind.RET, ExitKind.NRM

a, b, c = Set("a", Const(IntVal(1))), Set("b", Const(IntVal(2))), Set("c", Const(IntVal(3)))
L1, L2 = KloopIncr(Skip(), a), KloopIncr(b, c)
B1 = KloopBody(Skip(), a)
F = Kcall("f", "r", Env({"z": IntVal(0)}))
G = Kcall("g", None, Env())

# (exit kind, stack, expected stack or None for "no enclosing frame")
EXIT_TABLE = [
    (BRK, (Kseq(b), L1, Kseq(c)), (Kseq(c),)),
    (NRM, (Kseq(b), L1), (Kseq(b), L1)),
    (CONT, (Kseq(b), L1), (L1,)),
    (BRK, (Kseq(a), L1, Kseq(b), L2, Kseq(c)), (Kseq(b), L2, Kseq(c))),
    (CONT, (Kseq(a), L1, Kseq(b), L2), (L1, Kseq(b), L2)),
    (BRK, (L2, Kseq(a), L1), (Kseq(a), L1)),
    (BRK, (Kseq(a), F, L1), None),
    (CONT, (Kseq(a), F, L1), None),
    (BRK, (), None),
    (CONT, (Kseq(a),), None),
    (RET, (Kseq(a), L1, F, Kseq(c)), (Kseq(c),)),
    (RET, (Kseq(a), F, Kseq(b), G, Kseq(c)), (Kseq(b), G, Kseq(c))),
    (RET, (Kseq(a), L1, Kseq(b)), ()),
    (BRK, (Kseq(a), B1, Kseq(c)), (Kseq(c),)),
    (CONT, (Kseq(a), B1, L2), None),
    (NRM, (), ()),
]


@pytest.mark.parametrize("ek,k,want", EXIT_TABLE)
def test_exit_cont_table(ek, k, want):
    if want is None:
        with pytest.raises(NoEnclosingFrame):
            exit_cont(ek, None, k)
    else:
        assert exit_cont(ek, None, k) == want


def test_exit_cont_table_size():
    assert len(EXIT_TABLE) >= 10


def test_break_inside_call_is_stuck():
    funcs = {"f": FuncDef((), (), Break())}
    s = MachineState.make({}, (Kseq(Call(None, "f", ())), L1), ())
    r1 = step(s, funcs)
    assert isinstance(r1, Next)
    assert isinstance(step(r1.state, funcs), Stuck)


def test_eval_expr_examples():
    assert eval_expr({"v": IntVal(5)}, Var("v")) == IntVal(5)
    assert eval_expr({"a": IntVal(2), "b": IntVal(3)}, BinOp("+", Var("a"), Var("b"))) == IntVal(5)
    with pytest.raises(EvalError, match="uninitialized read"):
        eval_expr({"a": UNDEF}, Var("a"))
    assert eval_expr({"a": IntVal(2)}, BinOp("<", Var("a"), Const(IntVal(3)))) == BoolVal(True)


def test_step_examples():
    m = (IntVal(0),)
    r = step(MachineState.make({}, (Kseq(Skip()),), m))
    assert r == Next(MachineState.make({}, (), m))

    s = MachineState.make({"b": BoolVal(True)}, (Kseq(If(Var("b"), Break(), Skip())), L1), m)
    s, n = run_n(s, 2)
    assert n == 2 and s.conts == ()

    s = MachineState.make({"p": PtrVal(0)}, (Kseq(Store(Deref(Var("p")), Const(IntVal(7)))),), m)
    r = step(s)
    assert isinstance(r, Next) and r.state.mem == (IntVal(7),)


def test_step_errors():
    assert isinstance(step(MachineState.make({"p": PtrVal(3)}, (Kseq(Load("x", Deref(Var("p")))),), ())), Stuck)
    assert isinstance(step(MachineState.make({"p": IntVal(0)}, (Kseq(Store(Deref(Var("p")), Const(IntVal(1)))),), (IntVal(0),))), Stuck)
    assert isinstance(step(MachineState.make({}, (Kseq(Call(None, "nope", ())),), ())), Stuck)


def test_call_and_return_restore_caller_env():
    funcs = {"inc": FuncDef(("n",), (), Return(BinOp("+", Var("n"), Const(IntVal(1)))))}
    s = MachineState.make({"y": IntVal(4), "r": UNDEF}, (Kseq(Call("r", "inc", (Var("y"),))),), ())
    r, _ = run_to_completion(s, 100, funcs)
    assert isinstance(r, Done)
    assert r.state.env == {"y": IntVal(4), "r": IntVal(5)}


def test_fall_through_call_sets_dest_undef():
    funcs = {"f": FuncDef((), (), Skip())}
    s = MachineState.make({"r": IntVal(1)}, (Kseq(Call("r", "f", ())),), ())
    r, _ = run_to_completion(s, 100, funcs)
    assert r.state.env["r"] is UNDEF


def test_top_level_return_is_done():
    s = MachineState.make({}, (Kseq(Seq(Return(None), Set("a", Const(IntVal(1))))),), ())
    r, n = run_to_completion(s, 10)
    assert isinstance(r, Done) and "a" not in r.state.env


def test_run_n_examples():
    s = MachineState.make({}, (Kseq(Skip()),), ())
    assert run_n(s, 0) == (s, 0)
    done = MachineState.make({}, (), ())
    assert run_n(done, 5) == (done, 0)


def test_run_n_reports_stuck_with_index():
    s = MachineState.make({}, (Kseq(Seq(Skip(), Set("a", Var("u")))),), ())
    r, n = run_n(s, 10)
    assert isinstance(r, Stuck) and n == 2


def test_run_to_completion_examples():
    r, n = run_to_completion(MachineState.make({}, (Kseq(Skip()),), ()), 10)
    assert isinstance(r, Done) and n == 1

    spin = while_loop(Const(IntVal(1)), Skip(), None)
    r, _ = run_to_completion(MachineState.make({}, (Kseq(spin),), ()), 100)
    assert isinstance(r, FuelExhausted)

    s = MachineState.make({"sec": IntVal(1), "pub": IntVal(0)}, (Kseq(Set("pub", Var("sec"))),), ())
    r, _ = run_to_completion(s, 10)
    assert isinstance(r, Done) and r.state.env == {"sec": IntVal(1), "pub": IntVal(1)}


def test_classify_store_trace():
    prog = parse_file(next(p for p in corpus_files() if p.name == "classify_store.ifc.c"))
    body = prog.function("f").body
    env = {"v": IntVal(3), "b": IntVal(1), "highptr": PtrVal(0), "lowptr": PtrVal(1)}
    mem = (IntVal(0), IntVal(9))
    r, _ = run_to_completion(MachineState.make(env, (Kseq(body),), mem), 100)
    assert r.state.mem == (IntVal(3), IntVal(9))
    r, _ = run_to_completion(MachineState.make({**env, "b": IntVal(0)}, (Kseq(body),), mem), 100)
    assert r.state.mem == (IntVal(0), IntVal(3))


def test_loop_with_increment():
    c = parse_stmt(
        "//@ invariant PROP() LOCAL() SEP(), [], [];\n"
        "//@ incr_invariant PROP() LOCAL() SEP(), [], [];\n"
        "loop (i = i + 1;) { if (i == 3) { break; } if (i == 1) { continue; } n = n + 10; }"
    )
    r, _ = run_to_completion(MachineState.make({"i": IntVal(0), "n": IntVal(0)}, (Kseq(c),), ()), 200)
    assert isinstance(r, Done)
    assert r.state.env == {"i": IntVal(3), "n": IntVal(20)}


def test_fuel_monotonicity():
    c = parse_stmt("//@ invariant PROP() LOCAL() SEP(), [], [];\nwhile (i < 5) { i = i + 1; }")
    s = MachineState.make({"i": IntVal(0)}, (Kseq(c),), ())
    r, n = run_to_completion(s, 1000)
    assert isinstance(r, Done)
    for f in range(n, n + 5):
        assert run_to_completion(s, f) == (r, n)
    assert isinstance(run_to_completion(s, n - 1)[0], FuelExhausted)


# ---------------------------------------------------------------- random reachable states


def reachable_states(count, seed=0):
    """States met while running corpus functions from pre-satisfying inputs."""
    rng = random.Random(seed)
    pool = []
    for path in corpus_files():
        prog = parse_file(path)
        for f in prog.functions:
            decls, pre, body, post, funcs, hs, variables, fixed = function_setup(prog, f.name)
            budget = EnumerationBudget(max_pairs=50)
            for _, _, s, _ in enumerate_initial_pairs(decls, pre, budget, variables, fixed, hs):
                s = MachineState(s.env, (Kseq(body),), s.mem)
                for _ in range(200):
                    pool.append((s, funcs))
                    r = step(s, funcs)
                    if not isinstance(r, Next):
                        break
                    s = r.state
    rng.shuffle(pool)
    return pool[:count]


STATES = reachable_states(500)


def test_enough_random_states():
    assert len(STATES) == 500


def test_step_is_deterministic():
    for s, funcs in STATES:
        assert step(s, funcs) == step(s, funcs)
        assert run_n(s, 20, funcs) == run_n(s, 20, funcs)


def test_step_frames_untouched_locals():
    for s, funcs in STATES:
        head = s.conts[0] if s.conts else None
        if not isinstance(head, Kseq) or isinstance(head.stmt, (Call, Return)):
            continue
        r = step(s, funcs)
        if not isinstance(r, Next):
            continue
        touched = stmt_vars(head.stmt)
        for k, v in s.env.items():
            if k not in touched:
                assert r.state.env[k] is v


def test_exit_cont_nrm_is_identity_on_reachable_stacks():
    for s, _ in STATES:
        assert exit_cont(NRM, IntVal(1), s.conts) == s.conts
