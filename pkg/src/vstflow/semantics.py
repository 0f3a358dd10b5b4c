"""Deterministic small-step machine over ⟨env, continuation stack, memory⟩."""
from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from typing import Optional, Union

from .core import (
    UNDEF,
    AddrOfDeref,
    BinOp,
    Break,
    Call,
    Const,
    Continuation,
    Continue,
    Deref,
    Env,
    EvalError,
    ExitKind,
    Expr,
    If,
    Kcall,
    KloopBody,
    KloopIncr,
    Kseq,
    Load,
    Loop,
    MachineState,
    PtrVal,
    Return,
    Seq,
    Set,
    Skip,
    Store,
    UnOp,
    Value,
    Var,
    apply_binop,
    apply_unop,
    truthy,
)

__all__ = [
    "ExitKind",
    "NoEnclosingFrame",
    "exit_cont",
    "eval_expr",
    "Next",
    "Done",
    "Stuck",
    "step",
    "run_n",
    "run_to_completion",
    "FuelExhausted",
    "FunctionTable",
]


class NoEnclosingFrame(Exception):
    """break/continue with no loop frame before the next call frame or stack end."""


@dataclass(frozen=True)
class FuncDef:
    params: tuple[str, ...]
    locals: tuple[str, ...]
    body: object


FunctionTable = Mapping[str, FuncDef]


def exit_cont(ek: ExitKind, v: Optional[Value], k: tuple[Continuation, ...]) -> tuple[Continuation, ...]:
    """Pop the continuation stack according to the exit kind.

    brk drops everything up to and including the innermost loop frame;
    cont keeps a KloopIncr frame at the head so the loop resumes at its
    increment; ret drops everything up to and including the innermost call
    frame (the caller's environment is restored by `step`, not here).
    Neither brk nor cont crosses a Kcall.
    """
    if ek is ExitKind.NRM:
        return k
    for i, c in enumerate(k):
        if ek is ExitKind.RET:
            if isinstance(c, Kcall):
                return k[i + 1:]
            continue
        if isinstance(c, Kcall):
            break
        if ek is ExitKind.BRK and isinstance(c, (KloopIncr, KloopBody)):
            return k[i + 1:]
        if ek is ExitKind.CONT:
            if isinstance(c, KloopIncr):
                return k[i:]
            if isinstance(c, KloopBody):
                break
    else:
        if ek is ExitKind.RET:
            return ()
    raise NoEnclosingFrame(f"{ek} outside of a loop")


def eval_expr(env: Mapping[str, Value], e: Expr) -> Value:
    match e:
        case Const(v):
            return v
        case Var(name):
            v = env.get(name, UNDEF)
            if v is UNDEF:
                raise EvalError(f"uninitialized read of {name}")
            return v
        case UnOp(op, a):
            return apply_unop(op, eval_expr(env, a))
        case BinOp(op, a, b):
            return apply_binop(op, eval_expr(env, a), eval_expr(env, b))
        case AddrOfDeref(a):
            v = eval_expr(env, a)
            if not isinstance(v, PtrVal):
                raise EvalError(f"&* of non-pointer {v}")
            return v
        case Deref():
            raise EvalError("dereference in pure expression")
    raise TypeError(f"not an expression: {e!r}")


@dataclass(frozen=True)
class Next:
    state: MachineState


@dataclass(frozen=True)
class Done:
    state: MachineState


@dataclass(frozen=True)
class Stuck:
    reason: str
    state: Optional[MachineState] = None


StepResult = Union[Next, Done, Stuck]


def _address(env, lv: Deref, mem) -> int:
    p = eval_expr(env, lv.arg)
    if not isinstance(p, PtrVal):
        raise EvalError(f"dereference of non-pointer {p}")
    if not 0 <= p.addr < len(mem):
        raise EvalError(f"address @{p.addr} out of bounds")
    return p.addr


def step(s: MachineState, functions: Optional[FunctionTable] = None) -> StepResult:
    """One transition. break/continue/return consume exactly one step."""
    if not s.conts:
        return Done(s)
    head, rest = s.conts[0], s.conts[1:]
    env, mem = s.env, s.mem
    try:
        match head:
            case Kseq(stmt):
                return _step_stmt(stmt, env, rest, mem, functions or {})
            case KloopIncr(i, c):
                return Next(MachineState(env, (Kseq(i), KloopBody(i, c)) + rest, mem))
            case KloopBody(i, c):
                return Next(MachineState(env, (Kseq(c), KloopIncr(i, c)) + rest, mem))
            case Kcall(_, dest, saved):
                # fell off the end of a function body: implicit `return;`
                env2 = saved.set(dest, UNDEF) if dest is not None else saved
                return Next(MachineState(env2, rest, mem))
    except EvalError as err:
        return Stuck(str(err), s)
    except NoEnclosingFrame as err:
        return Stuck(str(err), s)
    raise TypeError(f"not a continuation: {head!r}")


def _step_stmt(stmt, env: Env, rest, mem, functions) -> StepResult:
    match stmt:
        case Skip():
            return Next(MachineState(env, rest, mem))
        case Set(x, e):
            return Next(MachineState(env.set(x, eval_expr(env, e)), rest, mem))
        case Load(x, src):
            a = _address(env, src, mem)
            v = mem[a]
            if v is UNDEF:
                raise EvalError(f"uninitialized read of @{a}")
            return Next(MachineState(env.set(x, v), rest, mem))
        case Store(dst, e):
            a = _address(env, dst, mem)
            v = eval_expr(env, e)
            return Next(MachineState(env, rest, mem[:a] + (v,) + mem[a + 1:]))
        case Seq(c1, c2):
            return Next(MachineState(env, (Kseq(c1), Kseq(c2)) + rest, mem))
        case If(b, c1, c2):
            taken = c1 if truthy(eval_expr(env, b)) else c2
            return Next(MachineState(env, (Kseq(taken),) + rest, mem))
        case Loop(i, c, _, _):
            return Next(MachineState(env, (Kseq(c), KloopIncr(i, c)) + rest, mem))
        case Break():
            return Next(MachineState(env, exit_cont(ExitKind.BRK, None, rest), mem))
        case Continue():
            return Next(MachineState(env, exit_cont(ExitKind.CONT, None, rest), mem))
        case Return(e):
            v = eval_expr(env, e) if e is not None else None
            frame = next((c for c in rest if isinstance(c, Kcall)), None)
            k2 = exit_cont(ExitKind.RET, v, rest)
            if frame is None:
                return Next(MachineState(env, k2, mem))
            env2 = frame.saved_env
            if frame.dest is not None:
                env2 = env2.set(frame.dest, v if v is not None else UNDEF)
            return Next(MachineState(env2, k2, mem))
        case Call(dest, f, args):
            fd = functions.get(f)
            if fd is None:
                return Stuck(f"call to unknown function {f}")
            if len(args) != len(fd.params):
                return Stuck(f"arity mismatch calling {f}")
            vals = [eval_expr(env, a) for a in args]
            callee = Env({**{p: v for p, v in zip(fd.params, vals)}, **{l: UNDEF for l in fd.locals}})
            return Next(MachineState(callee, (Kseq(fd.body), Kcall(f, dest, env)) + rest, mem))
    raise TypeError(f"not a statement: {stmt!r}")


@dataclass(frozen=True)
class FuelExhausted:
    state: MachineState
    steps: int


def run_n(s: MachineState, n: int, functions: Optional[FunctionTable] = None):
    """Take min(n, steps-to-termination) steps. Returns (state, steps) or (Stuck, step index)."""
    if n < 0:
        raise ValueError("negative step count")
    taken = 0
    while taken < n:
        r = step(s, functions)
        match r:
            case Done():
                return s, taken
            case Stuck():
                return r, taken
            case Next(s2):
                s = s2
                taken += 1
    return s, taken


def run_to_completion(s: MachineState, fuel: int, functions: Optional[FunctionTable] = None):
    """Run until the stack empties. Returns (Done | Stuck | FuelExhausted, steps)."""
    if fuel < 0:
        raise ValueError("negative fuel")
    taken = 0
    while True:
        r = step(s, functions)
        match r:
            case Done():
                return r, taken
            case Stuck():
                return r, taken
            case Next(s2):
                if taken == fuel:
                    return FuelExhausted(s, taken), taken
                s = s2
                taken += 1
