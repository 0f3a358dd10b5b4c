"""Parser and pretty-printer for `.ifc.c` sources.

Specifications live in `//@` comments so a file still looks like C:

    //@ heap 2;
    void f(int v, bool b, int* highptr, int* lowptr)
    //@ logical x.v in {0..3}, x.b in {0,1}, x.h in {@0,@1}, x.l in {@0,@1};
    //@ pre PROP() LOCAL(v = x.v, b = x.b, highptr = x.h, lowptr = x.l)
    //@     SEP(x.h |-> _, x.l |-> _),
    //@     [b: Lo, highptr: Hi, lowptr: Lo, v: (x.b ? Hi : Lo)], [x.l: Lo, x.h: Hi];
    //@ post (nrm: PROP() LOCAL() SEP(x.h |-> (x.b ? x.v : _), x.l |-> (x.b ? _ : x.v)),
    //@     [], [x.l: Lo, x.h: Hi]);
    {
      if (b) { *highptr = v; } else { *lowptr = v; }
    }

Unlisted classification keys default to Hi; `*: Lo` overrides the default.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from .core import (
    AddrOfDeref,
    BinOp,
    BoolVal,
    Break,
    Call,
    Const,
    Continue,
    Deref,
    ExitKind,
    EXIT_KINDS,
    Expr,
    If,
    IntVal,
    Label,
    Load,
    Loop,
    PtrVal,
    Return,
    Seq,
    Set,
    Skip,
    Span,
    Stmt,
    Store,
    UnOp,
    Value,
    Var,
    substatements,
)
from .logic import (
    DEFAULT_DOMAIN_CAP,
    FALSE_TRIPLE,
    WILD,
    Assertion,
    CondLabel,
    Fits,
    HeapClsf,
    IfcAssertTemplate,
    JoinLabel,
    LabelExpr,
    Lit,
    LitLabel,
    LogicalVarDecl,
    LVar,
    MeetLabel,
    PointsTo,
    PostconditionTemplate,
    StackClsf,
    Term,
    TermCond,
    TermOp,
    TermUn,
    Wildcard,
)


class ParseError(Exception):
    def __init__(self, message: str, span: Span):
        super().__init__(f"{span}: {message}")
        self.message = message
        self.span = span


@dataclass(frozen=True)
class FuncSpec:
    name: str
    params: tuple[str, ...]
    logicals: tuple[LogicalVarDecl, ...]
    pre: IfcAssertTemplate
    post: PostconditionTemplate


@dataclass(frozen=True)
class FunctionDef:
    name: str
    ret_type: str
    params: tuple[tuple[str, str], ...]  # (type, name)
    locals: tuple[tuple[str, str], ...]
    body: Stmt
    spec: FuncSpec
    has_spec: bool = True
    span: Optional[Span] = field(default=None, compare=False, repr=False)

    @property
    def param_names(self) -> tuple[str, ...]:
        return tuple(n for _, n in self.params)

    @property
    def local_names(self) -> tuple[str, ...]:
        return tuple(n for _, n in self.locals)


@dataclass(frozen=True)
class SourceProgram:
    functions: tuple[FunctionDef, ...]
    heap_size: int = 0
    regions: tuple[tuple[str, int], ...] = ()

    def function(self, name: str) -> FunctionDef:
        for f in self.functions:
            if f.name == name:
                return f
        raise KeyError(name)

    def specs(self) -> dict[str, FuncSpec]:
        return {f.name: f.spec for f in self.functions}

    def function_table(self):
        from .semantics import FuncDef

        return {f.name: FuncDef(f.param_names, f.local_names, f.body) for f in self.functions}


DEFAULT_POST = PostconditionTemplate(IfcAssertTemplate(), FALSE_TRIPLE, FALSE_TRIPLE, IfcAssertTemplate())

# ---------------------------------------------------------------- lexer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<ann>//@)
  | (?P<comment>//[^\n]*|/\*.*?\*/)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>\|->|\.\.|==|!=|&&|\|\||[-+*<=!&(){}\[\],;:?.@])
    """,
    re.VERBOSE | re.DOTALL,
)


@dataclass(frozen=True)
class Token:
    kind: str  # 'int', 'ident', 'op', 'ann', 'eof'
    text: str
    span: Span


def lex(text: str) -> list[Token]:
    toks: list[Token] = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", Span(line, col))
        kind, s = m.lastgroup, m.group()
        if kind in ("int", "ident", "op", "ann"):
            toks.append(Token(kind, s, Span(line, col)))
        nl = s.count("\n")
        if nl:
            line += nl
            col = len(s) - s.rfind("\n")
        else:
            col += len(s)
        pos = m.end()
    toks.append(Token("eof", "", Span(line, col)))
    return toks


# ---------------------------------------------------------------- parser

TYPES = ("int", "bool", "void")
ANN_KEYWORDS = ("heap", "logical", "pre", "post", "invariant", "incr_invariant", "with")
EK_NAMES = {ek.value: ek for ek in EXIT_KINDS}


class _Parser:
    def __init__(self, text: str, domain_cap: int):
        self.toks = lex(text)
        self.i = 0
        self.in_ann = False
        self.domain_cap = domain_cap
        self.regions: dict[str, int] = {}
        self.scope: list[set[str]] = []  # EX binders in scope

    # -- token plumbing
    def _skip_cont(self):
        while self.in_ann and self.toks[self.i].kind == "ann":
            self.i += 1

    def peek(self, k: int = 0) -> Token:
        self._skip_cont()
        j = self.i
        while k:
            j += 1
            while self.in_ann and self.toks[j].kind == "ann":
                j += 1
            k -= 1
        return self.toks[j]

    def next(self) -> Token:
        self._skip_cont()
        t = self.toks[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def at(self, text: str, k: int = 0) -> bool:
        t = self.peek(k)
        return t.text == text and t.kind in ("op", "ident")

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.next()
            return True
        return False

    def expect(self, text: str) -> Token:
        t = self.peek()
        if not self.at(text):
            raise ParseError(f"expected {text!r}, found {t.text or 'end of input'!r}", t.span)
        return self.next()

    def ident(self) -> Token:
        t = self.peek()
        if t.kind != "ident":
            raise ParseError(f"expected identifier, found {t.text or 'end of input'!r}", t.span)
        return self.next()

    def at_ann(self, kw: Optional[str] = None) -> bool:
        t = self.toks[self.i]
        if t.kind != "ann":
            return False
        nxt = self.toks[self.i + 1]
        return nxt.kind == "ident" and (nxt.text == kw if kw else nxt.text in ANN_KEYWORDS)

    def begin_ann(self, kw: str) -> Span:
        sp = self.toks[self.i].span
        self.i += 1
        self.in_ann = True
        self.expect(kw)
        return sp

    def end_ann(self):
        self.expect(";")
        self.in_ann = False

    # -- program
    def program(self) -> SourceProgram:
        heap_size, regions = 0, []
        if self.at_ann("heap"):
            self.begin_ann("heap")
            heap_size = self.int_lit()
            while self.accept("region"):
                name = self.ident().text
                self.expect("@")
                addr = self.int_lit()
                regions.append((name, addr))
                self.regions[name] = addr
            self.end_ann()
        funcs: list[FunctionDef] = []
        seen: set[str] = set()
        while self.peek().kind != "eof":
            f = self.funcdef()
            if f.name in seen:
                raise ParseError(f"duplicate function {f.name}", f.span)
            seen.add(f.name)
            funcs.append(f)
        prog = SourceProgram(tuple(funcs), heap_size, tuple(regions))
        specified = {f.name for f in funcs if f.has_spec}
        for f in funcs:
            for s in substatements(f.body):
                if isinstance(s, Call):
                    if s.fname not in seen:
                        raise ParseError(f"call to unknown function {s.fname}", s.span)
                    if s.fname not in specified:
                        raise ParseError(f"call to unspecified function {s.fname}", s.span)
        return prog

    def int_lit(self) -> int:
        neg = self.accept("-")
        t = self.peek()
        if t.kind != "int":
            raise ParseError(f"expected integer, found {t.text!r}", t.span)
        self.next()
        return -int(t.text) if neg else int(t.text)

    def ctype(self) -> str:
        t = self.ident()
        if t.text not in TYPES:
            raise ParseError(f"expected a type, found {t.text!r}", t.span)
        ty = t.text
        while self.accept("*"):
            ty += "*"
        return ty

    def funcdef(self) -> FunctionDef:
        start = self.peek().span
        ret_type = self.ctype()
        name = self.ident().text
        self.expect("(")
        params: list[tuple[str, str]] = []
        if not self.at(")"):
            while True:
                ty = self.ctype()
                params.append((ty, self.ident().text))
                if not self.accept(","):
                    break
        self.expect(")")
        pnames = tuple(n for _, n in params)
        if len(set(pnames)) != len(pnames):
            raise ParseError(f"duplicate parameter in {name}", start)
        has_spec = False
        logicals: tuple[LogicalVarDecl, ...] = ()
        pre, post = IfcAssertTemplate(), DEFAULT_POST
        if self.at_ann("logical"):
            has_spec = True
            self.begin_ann("logical")
            logicals = self.ldecls()
            self.end_ann()
        if self.at_ann("pre"):
            has_spec = True
            self.begin_ann("pre")
            pre = self.triple()
            self.end_ann()
        if self.at_ann("post"):
            has_spec = True
            self.begin_ann("post")
            post = self.post()
            self.end_ann()
        declared = {d.name for d in logicals}
        for t in [pre] + [post[ek] for ek in EXIT_KINDS]:
            from .logic import template_vars

            unknown = template_vars(t) - declared
            if unknown:
                raise ParseError(f"undeclared logical variable {sorted(unknown)[0]}", start)
        locals_: list[tuple[str, str]] = []
        body = self.block(locals_)
        spec = FuncSpec(name, pnames, logicals, pre, post)
        return FunctionDef(name, ret_type, tuple(params), tuple(locals_), body, spec, has_spec, span=start)

    # -- annotations
    def value(self) -> Value:
        t = self.peek()
        if self.accept("true"):
            return BoolVal(True)
        if self.accept("false"):
            return BoolVal(False)
        if self.accept("@"):
            nt = self.peek()
            if nt.kind == "ident":
                self.next()
                if nt.text not in self.regions:
                    raise ParseError(f"unknown heap region {nt.text}", nt.span)
                return PtrVal(self.regions[nt.text])
            return PtrVal(self.int_lit())
        if t.kind == "int" or t.text == "-":
            return IntVal(self.int_lit())
        raise ParseError(f"expected a value, found {t.text!r}", t.span)

    def domain(self) -> tuple[Value, ...]:
        start = self.expect("{").span
        vals: list[Value] = []
        if not self.at("}"):
            while True:
                v = self.value()
                if self.accept(".."):
                    hi = self.int_lit()
                    if not isinstance(v, IntVal) or hi < v.value:
                        raise ParseError("bad range", start)
                    vals.extend(IntVal(n) for n in range(v.value, hi + 1))
                else:
                    vals.append(v)
                if not self.accept(","):
                    break
        self.expect("}")
        if not vals:
            raise ParseError("empty domain", start)
        if len(vals) > self.domain_cap:
            raise ParseError(f"domain larger than cap {self.domain_cap}", start)
        return tuple(dict.fromkeys(vals))

    def ldecls(self) -> tuple[LogicalVarDecl, ...]:
        out: list[LogicalVarDecl] = []
        while self.at("x"):
            self.expect("x")
            self.expect(".")
            name = "x." + self.ident().text
            self.expect("in")
            out.append(LogicalVarDecl(name, self.domain()))
            if not self.accept(","):
                break
        if len({d.name for d in out}) != len(out):
            raise ParseError("duplicate logical variable", self.peek().span)
        return tuple(out)

    def triple(self) -> IfcAssertTemplate:
        exists: list[LogicalVarDecl] = []
        if self.accept("EX"):
            while True:
                name = self.ident().text
                self.expect("in")
                exists.append(LogicalVarDecl(name, self.domain()))
                if not self.accept(","):
                    break
            self.expect(".")
        self.scope.append({d.name for d in exists})
        try:
            a = self.assertion()
            self.expect(",")
            n = self.stack_clsf()
            self.expect(",")
            h = self.heap_clsf()
        finally:
            self.scope.pop()
        return IfcAssertTemplate(a, n, h, tuple(exists))

    def assertion(self) -> Assertion:
        self.expect("PROP")
        self.expect("(")
        props: list[Term] = []
        if not self.at(")"):
            props.append(self.term())
            while self.accept(","):
                props.append(self.term())
        self.expect(")")
        self.expect("LOCAL")
        self.expect("(")
        locs: list[tuple[str, Term]] = []
        if not self.at(")"):
            while True:
                name = self.ident().text
                self.expect("=")
                locs.append((name, self.term()))
                if not self.accept(","):
                    break
        self.expect(")")
        self.expect("SEP")
        self.expect("(")
        seps: list[PointsTo] = []
        if not self.at(")"):
            while True:
                addr = self.term()
                self.expect("|->")
                seps.append(PointsTo(addr, self.term(allow_wild=True)))
                if not self.accept(","):
                    break
        self.expect(")")
        return Assertion(tuple(props), tuple(locs), tuple(seps))

    def stack_clsf(self) -> StackClsf:
        self.expect("[")
        entries: list[tuple[str, LabelExpr]] = []
        default = Label.Hi
        if not self.at("]"):
            while True:
                if self.accept("*"):
                    self.expect(":")
                    default = self.label_lit()
                else:
                    k = self.ident().text
                    self.expect(":")
                    entries.append((k, self.label_expr()))
                if not self.accept(","):
                    break
        self.expect("]")
        return StackClsf(tuple(entries), default)

    def heap_clsf(self) -> HeapClsf:
        self.expect("[")
        entries: list[tuple[Term, LabelExpr]] = []
        default = Label.Hi
        if not self.at("]"):
            while True:
                if self.accept("*"):
                    self.expect(":")
                    default = self.label_lit()
                else:
                    if self.peek().kind == "int":
                        k: Term = Lit(PtrVal(self.int_lit()))
                    else:
                        k = self.term()
                    self.expect(":")
                    entries.append((k, self.label_expr()))
                if not self.accept(","):
                    break
        self.expect("]")
        return HeapClsf(tuple(entries), default)

    def label_lit(self) -> Label:
        t = self.ident()
        if t.text not in ("Lo", "Hi"):
            raise ParseError(f"expected Lo or Hi, found {t.text!r}", t.span)
        return Label[t.text]

    def label_expr(self) -> LabelExpr:
        if self.at("Lo") or self.at("Hi"):
            return LitLabel(self.label_lit())
        if self.at("lub") or self.at("glb"):
            ctor = JoinLabel if self.next().text == "lub" else MeetLabel
            self.expect("(")
            a = self.label_expr()
            self.expect(",")
            b = self.label_expr()
            self.expect(")")
            return ctor(a, b)
        self.expect("(")
        c = self.term()
        self.expect("?")
        a = self.label_expr()
        self.expect(":")
        b = self.label_expr()
        self.expect(")")
        return CondLabel(c, a, b)

    def post(self) -> PostconditionTemplate:
        self.expect("(")
        got: dict[ExitKind, IfcAssertTemplate] = {}
        while True:
            t = self.ident()
            if t.text not in EK_NAMES:
                raise ParseError(f"expected exit kind, found {t.text!r}", t.span)
            ek = EK_NAMES[t.text]
            if ek in got:
                raise ParseError(f"duplicate exit kind {t.text}", t.span)
            self.expect(":")
            got[ek] = self.triple()
            if not self.accept(","):
                break
        self.expect(")")
        return PostconditionTemplate(*(got.get(ek, FALSE_TRIPLE) for ek in EXIT_KINDS))

    # -- terms (logical expressions)
    _PREC = [("||",), ("&&",), ("==", "!="), ("<",), ("+", "-"), ("*",)]

    def term(self, allow_wild: bool = False, level: int = 0) -> Term:
        if level == len(self._PREC):
            return self.term_unary(allow_wild)
        left = self.term(allow_wild, level + 1)
        while self.peek().kind == "op" and self.peek().text in self._PREC[level]:
            op = self.next().text
            left = TermOp(op, left, self.term(allow_wild, level + 1))
        return left

    def term_unary(self, allow_wild: bool) -> Term:
        if self.at("!") or self.at("-"):
            t = self.peek()
            if t.text == "-" and self.peek(1).kind == "int":
                return Lit(self.value())
            op = self.next().text
            return TermUn(op, self.term_unary(allow_wild))
        return self.term_primary(allow_wild)

    def term_primary(self, allow_wild: bool) -> Term:
        t = self.peek()
        if t.kind == "int" or t.text in ("true", "false", "@"):
            return Lit(self.value())
        if self.accept("("):
            c = self.term(allow_wild)
            if self.accept("?"):
                a = self.term(allow_wild)
                self.expect(":")
                b = self.term(allow_wild)
                self.expect(")")
                return TermCond(c, a, b)
            self.expect(")")
            return c
        if t.kind == "ident":
            if t.text == "x" and self.at(".", 1):
                self.next()
                self.next()
                return LVar("x." + self.ident().text)
            if t.text == "_":
                if not allow_wild:
                    raise ParseError("wildcard only allowed as a points-to value", t.span)
                self.next()
                return WILD
            if any(t.text in s for s in self.scope):
                self.next()
                return LVar(t.text)
            raise ParseError(f"unknown name {t.text!r} in assertion", t.span)
        raise ParseError(f"unexpected {t.text or 'end of input'!r} in term", t.span)

    # -- statements
    def block(self, locals_: list) -> Stmt:
        self.expect("{")
        stmts: list[Stmt] = []
        while not self.at("}"):
            if self.peek().kind == "eof":
                raise ParseError("unterminated block", self.peek().span)
            if self.peek().text in TYPES and self.peek().kind == "ident":
                ty = self.ctype()
                while True:
                    tok = self.ident()
                    name = tok.text
                    if any(n == name for _, n in locals_):
                        raise ParseError(f"duplicate local {name}", tok.span)
                    locals_.append((ty, name))
                    if not self.accept(","):
                        break
                self.expect(";")
                continue
            stmts.append(self.stmt(locals_))
        self.expect("}")
        return _seq(stmts)

    def branch(self, locals_: list) -> Stmt:
        if self.at("{"):
            return self.block(locals_)
        return self.stmt(locals_)

    def stmt(self, locals_: list) -> Stmt:
        if self.at_ann("invariant"):
            return self.loop_stmt(locals_)
        if self.at_ann("with"):
            sp = self.begin_ann("with")
            self.expect("{")
            wit: list[tuple[str, Term]] = []
            while not self.at("}"):
                self.expect("x")
                self.expect(".")
                name = "x." + self.ident().text
                self.expect("=")
                wit.append((name, self.term()))
                if not self.accept(","):
                    break
            self.expect("}")
            self.end_ann()
            call = self.stmt(locals_)
            if not isinstance(call, Call):
                raise ParseError("`with` annotation must precede a call", sp)
            return Call(call.dest, call.fname, call.args, tuple(wit), span=call.span)
        if self.at_ann():
            t = self.toks[self.i + 1]
            raise ParseError(f"misplaced annotation {t.text!r}", t.span)
        t = self.peek()
        sp = t.span
        if self.at("{"):
            return self.block(locals_)
        if self.accept("skip"):
            self.expect(";")
            return Skip(span=sp)
        if self.accept("break"):
            self.expect(";")
            return Break(span=sp)
        if self.accept("continue"):
            self.expect(";")
            return Continue(span=sp)
        if self.accept("return"):
            e = None if self.at(";") else self.expr()
            self.expect(";")
            return Return(e, span=sp)
        if self.accept("if"):
            self.expect("(")
            c = self.expr()
            self.expect(")")
            then = self.branch(locals_)
            els: Stmt = Skip()
            if self.accept("else"):
                els = self.branch(locals_)
            return If(c, then, els, span=sp)
        if self.at("while") or self.at("loop"):
            raise ParseError("loop without invariant", sp)
        if self.accept("*"):
            addr = self.expr_unary()
            self.expect("=")
            e = self.expr()
            self.expect(";")
            return Store(Deref(addr), e, span=sp)
        if t.kind == "ident":
            name = self.next().text
            if self.at("("):
                return self.call_rest(None, name, sp)
            self.expect("=")
            if self.peek().kind == "ident" and self.at("(", 1):
                fname = self.next().text
                return self.call_rest(name, fname, sp)
            if self.accept("*"):
                addr = self.expr_unary()
                self.expect(";")
                return Load(name, Deref(addr), span=sp)
            e = self.expr()
            self.expect(";")
            return Set(name, e, span=sp)
        raise ParseError(f"unexpected {t.text or 'end of input'!r}", sp)

    def call_rest(self, dest: Optional[str], fname: str, sp: Span) -> Call:
        self.expect("(")
        args: list[Expr] = []
        if not self.at(")"):
            while True:
                args.append(self.expr())
                if not self.accept(","):
                    break
        self.expect(")")
        self.expect(";")
        return Call(dest, fname, tuple(args), None, span=sp)

    def loop_stmt(self, locals_: list) -> Stmt:
        self.begin_ann("invariant")
        inv = self.triple()
        self.end_ann()
        incr_inv = inv
        if self.at_ann("incr_invariant"):
            self.begin_ann("incr_invariant")
            incr_inv = self.triple()
            self.end_ann()
        sp = self.peek().span
        if self.accept("while"):
            self.expect("(")
            c = self.expr()
            self.expect(")")
            body = self.branch(locals_)
            return Loop(Skip(), If(c, body, Break(), span=sp), inv, incr_inv, span=sp)
        if self.accept("loop"):
            self.expect("(")
            incr: list[Stmt] = []
            while not self.at(")"):
                incr.append(self.stmt(locals_))
            self.expect(")")
            body = self.branch(locals_)
            return Loop(_seq(incr), body, inv, incr_inv, span=sp)
        raise ParseError("invariant annotation must precede a loop", sp)

    # -- program expressions
    def expr(self, level: int = 0) -> Expr:
        if level == len(self._PREC):
            return self.expr_unary()
        left = self.expr(level + 1)
        while self.peek().kind == "op" and self.peek().text in self._PREC[level]:
            op = self.next().text
            left = BinOp(op, left, self.expr(level + 1))
        return left

    def expr_unary(self) -> Expr:
        t = self.peek()
        if self.at("&") and self.at("*", 1):
            self.next()
            self.next()
            return AddrOfDeref(self.expr_unary())
        if self.at("*"):
            raise ParseError("dereference only allowed in load/store position", t.span)
        if self.at("-") and self.peek(1).kind == "int":
            self.next()
            return Const(IntVal(-int(self.next().text)))
        if self.at("!") or self.at("-"):
            op = self.next().text
            return UnOp(op, self.expr_unary())
        return self.expr_primary()

    def expr_primary(self) -> Expr:
        t = self.peek()
        if t.kind == "int" or t.text in ("true", "false", "@"):
            return Const(self.value())
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        if t.kind == "ident":
            self.next()
            if self.at("("):
                raise ParseError("function calls are not expressions", t.span)
            return Var(t.text)
        raise ParseError(f"unexpected {t.text or 'end of input'!r} in expression", t.span)


def _seq(stmts: list[Stmt]) -> Stmt:
    if not stmts:
        return Skip()
    out = stmts[-1]
    for s in reversed(stmts[:-1]):
        out = Seq(s, out, span=s.span)
    return out


def parse(text: str, domain_cap: int = DEFAULT_DOMAIN_CAP) -> SourceProgram:
    return _Parser(text, domain_cap).program()


def parse_file(path, domain_cap: int = DEFAULT_DOMAIN_CAP) -> SourceProgram:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read(), domain_cap)


# ---------------------------------------------------------------- pretty printing


def show_value(v: Value) -> str:
    return str(v)


_OP_PREC = {op: i for i, ops in enumerate(_Parser._PREC) for op in ops}


def show_term(t: Term, prec: int = -1) -> str:
    match t:
        case Lit(v):
            return show_value(v)
        case LVar(name):
            return name
        case Wildcard():
            return "_"
        case TermOp(op, a, b):
            p = _OP_PREC[op]
            s = f"{show_term(a, p)} {op} {show_term(b, p + 1)}"
            return f"({s})" if p < prec else s
        case TermUn(op, a):
            return f"{op}{show_term(a, 99)}"
        case TermCond(c, a, b):
            return f"({show_term(c)} ? {show_term(a)} : {show_term(b)})"
        case Fits(v, p):
            return f"fits({show_term(v)}, {show_term(p)})"
    raise TypeError(t)


def show_label(le: LabelExpr) -> str:
    match le:
        case LitLabel(lab):
            return lab.name
        case CondLabel(c, a, b):
            return f"({show_term(c)} ? {show_label(a)} : {show_label(b)})"
        case JoinLabel(a, b):
            return f"lub({show_label(a)}, {show_label(b)})"
        case MeetLabel(a, b):
            return f"glb({show_label(a)}, {show_label(b)})"
    raise TypeError(le)


def show_assertion(a: Assertion) -> str:
    props = ", ".join(show_term(p) for p in a.props)
    locs = ", ".join(f"{k} = {show_term(t)}" for k, t in a.locals)
    seps = ", ".join(f"{show_term(p.addr)} |-> {show_term(p.val)}" for p in a.seps)
    return f"PROP({props}) LOCAL({locs}) SEP({seps})"


def _show_heap_key(t: Term) -> str:
    return show_term(t)


def show_stack_clsf(n: StackClsf) -> str:
    items = [f"{k}: {show_label(le)}" for k, le in n.entries]
    if n.default is not Label.Hi:
        items.append(f"*: {n.default.name}")
    return "[" + ", ".join(items) + "]"


def show_heap_clsf(h: HeapClsf) -> str:
    items = [f"{_show_heap_key(k)}: {show_label(le)}" for k, le in h.entries]
    if h.default is not Label.Hi:
        items.append(f"*: {h.default.name}")
    return "[" + ", ".join(items) + "]"


def show_domain(dom) -> str:
    return "{" + ", ".join(show_value(v) for v in dom) + "}"


def show_triple(t: IfcAssertTemplate) -> str:
    ex = ""
    if t.exists:
        ex = "EX " + ", ".join(f"{d.name} in {show_domain(d.domain)}" for d in t.exists) + ". "
    return f"{ex}{show_assertion(t.assertion)}, {show_stack_clsf(t.stack)}, {show_heap_clsf(t.heap)}"


def show_expr(e: Expr, prec: int = -1) -> str:
    match e:
        case Const(v):
            return show_value(v)
        case Var(name):
            return name
        case UnOp(op, a):
            return f"{op}{show_expr(a, 99)}"
        case BinOp(op, a, b):
            p = _OP_PREC[op]
            s = f"{show_expr(a, p)} {op} {show_expr(b, p + 1)}"
            return f"({s})" if p < prec else s
        case Deref(a):
            return f"*{show_expr(a, 99)}"
        case AddrOfDeref(a):
            return f"&*{show_expr(a, 99)}"
    raise TypeError(e)


def _is_while(c: Loop) -> bool:
    return isinstance(c.incr, Skip) and isinstance(c.body, If) and isinstance(c.body.els, Break)


def _flatten(c: Stmt) -> list[Stmt]:
    out = []
    while isinstance(c, Seq):
        out.append(c.first)
        c = c.second
    out.append(c)
    return out


def _stmt_lines(c: Stmt, ind: str) -> list[str]:
    """Statement c printed as lines at indentation `ind`."""
    match c:
        case Seq():
            lines = []
            for s in _flatten(c):
                if isinstance(s, Seq):
                    lines.append(ind + "{")
                    lines += _stmt_lines(s, ind + "  ")
                    lines.append(ind + "}")
                else:
                    lines += _stmt_lines(s, ind)
            return lines
        case Skip():
            return [ind + "skip;"]
        case Break():
            return [ind + "break;"]
        case Continue():
            return [ind + "continue;"]
        case Return(e):
            return [ind + ("return;" if e is None else f"return {show_expr(e)};")]
        case Set(x, e):
            return [ind + f"{x} = {show_expr(e)};"]
        case Load(x, src):
            return [ind + f"{x} = {show_expr(src)};"]
        case Store(dst, e):
            return [ind + f"{show_expr(dst)} = {show_expr(e)};"]
        case Call(dest, f, args, wit):
            lines = []
            if wit is not None:
                inner = ", ".join(f"{k} = {show_term(t)}" for k, t in wit)
                lines.append(ind + f"//@ with {{{inner}}};")
            call = f"{f}({', '.join(show_expr(a) for a in args)});"
            lines.append(ind + (f"{dest} = {call}" if dest is not None else call))
            return lines
        case If(b, c1, c2):
            lines = [ind + f"if ({show_expr(b)}) {{"] + _stmt_lines(c1, ind + "  ")
            if c2 == Skip():
                return lines + [ind + "}"]
            return lines + [ind + "} else {"] + _stmt_lines(c2, ind + "  ") + [ind + "}"]
        case Loop(incr, body, inv, incr_inv):
            lines = [ind + f"//@ invariant {show_triple(inv)};"]
            if incr_inv != inv:
                lines.append(ind + f"//@ incr_invariant {show_triple(incr_inv)};")
            if _is_while(c):
                lines.append(ind + f"while ({show_expr(body.cond)}) {{")
                return lines + _stmt_lines(body.then, ind + "  ") + [ind + "}"]
            head = " ".join(l.strip() for l in _stmt_lines(incr, ""))
            lines.append(ind + f"loop ({head}) {{")
            return lines + _stmt_lines(body, ind + "  ") + [ind + "}"]
    raise TypeError(c)


def pretty_stmt(c: Stmt) -> str:
    """Single-line rendering (annotations aside), e.g. `break; continue;`."""
    return " ".join(l.strip() for l in _stmt_lines(c, ""))


def show_post(p: PostconditionTemplate) -> str:
    cases = [f"{ek.value}: {show_triple(p[ek])}" for ek in EXIT_KINDS if p[ek] != FALSE_TRIPLE]
    if not cases:
        cases = [f"nrm: {show_triple(p.nrm)}"]
    return "(" + ", ".join(cases) + ")"


def pretty(p: SourceProgram) -> str:
    out: list[str] = []
    if p.heap_size or p.regions:
        regs = "".join(f" region {n} @ {a}" for n, a in p.regions)
        out.append(f"//@ heap {p.heap_size}{regs};")
    for f in p.functions:
        if out:
            out.append("")
        params = ", ".join(f"{ty} {n}" for ty, n in f.params)
        out.append(f"{f.ret_type} {f.name}({params})")
        if f.has_spec:
            sp = f.spec
            if sp.logicals:
                decls = ", ".join(f"{d.name} in {show_domain(d.domain)}" for d in sp.logicals)
                out.append(f"//@ logical {decls};")
            out.append(f"//@ pre {show_triple(sp.pre)};")
            out.append(f"//@ post {show_post(sp.post)};")
        out.append("{")
        for ty, n in f.locals:
            out.append(f"  {ty} {n};")
        if f.body != Skip():
            out += _stmt_lines(f.body, "  ")
        out.append("}")
    return "\n".join(out) + "\n"


def parse_triple(text: str, domain_cap: int = DEFAULT_DOMAIN_CAP) -> IfcAssertTemplate:
    """Parse `[EX ...] PROP(..) LOCAL(..) SEP(..), [stack], [heap]` on its own."""
    p = _Parser(text, domain_cap)
    p.in_ann = True
    t = p.triple()
    if p.peek().kind != "eof":
        raise ParseError(f"trailing input {p.peek().text!r}", p.peek().span)
    return t


def parse_stmt(text: str, domain_cap: int = DEFAULT_DOMAIN_CAP) -> Stmt:
    """Parse a statement list (as in a block body, without braces)."""
    p = _Parser("{" + text + "\n}", domain_cap)
    c = p.block([])
    if p.peek().kind != "eof":
        raise ParseError(f"trailing input {p.peek().text!r}", p.peek().span)
    return c
