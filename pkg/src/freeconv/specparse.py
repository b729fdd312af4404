"""Parser for the textual measure-spec format and its tiny expression DSL.

Grammar (UTF-8 text)::

    measure := family "{" kvlist "}"
    family  := "atomic" | "grid" | "semicircle" | "cauchy" | "bernoulli"
             | "free_poisson" | "arcsine" | "marchenko_pastur"
             | "rect_stable" | "square_id" | "rect_id" | "transform"
    kvlist  := key ":" value ("," key ":" value)*

Keys are identifiers, except inside ``atomic{...}`` where they are the
(signed) atom positions.  Values are numbers, nested measures, or quoted
strings; grid arrays are comma-separated numbers inside a quoted string.

``transform`` bodies carry ``which:"F"|"G"`` and ``expr:"<expression in z>"``
over + - * / ^ (integer powers), sqrt_principal(.), sqrt_upper(.), and
complex literals such as 1, 0.5, i, 2+3i.
"""

import numpy as np

from . import measures as ms
from .branchcuts import sqrt_principal, sqrt_upper
from .errors import SpecSemanticError, SpecSyntaxError

__all__ = ["parse_measure_spec", "parse_expression", "Expr"]


# ---------------------------------------------------------------------------
# tokenizer (shared by both grammars)
# ---------------------------------------------------------------------------

class _Token:
    def __init__(self, kind, value, line, col):
        self.kind = kind
        self.value = value
        self.line = line
        self.col = col

    def __repr__(self):
        return f"{self.kind}({self.value!r})@{self.line}:{self.col}"


_PUNCT = {"{": "LBRACE", "}": "RBRACE", ":": "COLON", ",": "COMMA",
          "(": "LPAREN", ")": "RPAREN", "+": "PLUS", "-": "MINUS",
          "*": "STAR", "/": "SLASH", "^": "CARET"}


def _tokenize(text, allow_imag=False):
    toks = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c.isspace():
            i += 1
            col += 1
            continue
        if c in _PUNCT:
            toks.append(_Token(_PUNCT[c], c, line, col))
            i += 1
            col += 1
            continue
        if c == '"':
            j = i + 1
            while j < n and text[j] != '"':
                if text[j] == "\n":
                    raise SpecSyntaxError("unterminated string", line, col)
                j += 1
            if j >= n:
                raise SpecSyntaxError("unterminated string", line, col)
            toks.append(_Token("STRING", text[i + 1:j], line, col))
            col += j + 1 - i
            i = j + 1
            continue
        if c.isdigit() or c == ".":
            j = i
            while j < n and (text[j].isdigit() or text[j] in ".eE" or
                             (text[j] in "+-" and j > i and text[j - 1] in "eE")):
                j += 1
            lit = text[i:j]
            kind = "NUMBER"
            if allow_imag and j < n and text[j] == "i":
                kind = "IMAG"
                j += 1
            try:
                val = float(lit)
            except ValueError:
                raise SpecSyntaxError(f"bad numeric literal {lit!r}", line, col) from None
            toks.append(_Token(kind, val, line, col))
            col += j - i
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            if allow_imag and word == "i":
                toks.append(_Token("IMAG", 1.0, line, col))
            else:
                toks.append(_Token("IDENT", word, line, col))
            col += j - i
            i = j
            continue
        raise SpecSyntaxError(f"unexpected character {c!r}", line, col)
    toks.append(_Token("EOF", None, line, col))
    return toks


class _Stream:
    def __init__(self, toks):
        self.toks = toks
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, kind):
        t = self.next()
        if t.kind != kind:
            raise SpecSyntaxError(f"expected {kind}, found {t.kind} {t.value!r}",
                                  t.line, t.col)
        return t


# ---------------------------------------------------------------------------
# expression DSL
# ---------------------------------------------------------------------------

class Expr:
    """AST node; ``eval`` is vectorized over complex arrays."""

    def eval(self, z):
        raise NotImplementedError


class _Const(Expr):
    def __init__(self, value):
        self.value = complex(value)

    def eval(self, z):
        return np.full(np.shape(z), self.value, dtype=np.complex128)

    def __repr__(self):
        return f"Const({self.value})"


class _Var(Expr):
    def eval(self, z):
        return np.asarray(z, dtype=np.complex128)

    def __repr__(self):
        return "z"


class _BinOp(Expr):
    def __init__(self, op, left, right):
        self.op = op
        self.left = left
        self.right = right

    def eval(self, z):
        a = self.left.eval(z)
        b = self.right.eval(z)
        if self.op == "+":
            return a + b
        if self.op == "-":
            return a - b
        if self.op == "*":
            return a * b
        if self.op == "/":
            with np.errstate(divide="ignore", invalid="ignore"):
                return a / b
        if self.op == "^":
            k = int(self.right.value.real)
            return a ** k
        raise AssertionError(self.op)

    def __repr__(self):
        return f"({self.left!r} {self.op} {self.right!r})"


class _Neg(Expr):
    def __init__(self, arg):
        self.arg = arg

    def eval(self, z):
        return -self.arg.eval(z)

    def __repr__(self):
        return f"(-{self.arg!r})"


def _sqrt_upper_lenient(u):
    # expression evaluation must tolerate boundary points: approach the cut
    # from above rather than raising
    u = np.asarray(u, dtype=np.complex128)
    theta = np.mod(np.angle(u), 2.0 * np.pi)
    return np.sqrt(np.abs(u)) * np.exp(0.5j * theta)


_FUNCS = {
    "sqrt_principal": lambda u: sqrt_principal(u, guard=False),
    "sqrt_upper": _sqrt_upper_lenient,
}


class _Call(Expr):
    def __init__(self, name, arg):
        self.name = name
        self.arg = arg

    def eval(self, z):
        return _FUNCS[self.name](self.arg.eval(z))

    def __repr__(self):
        return f"{self.name}({self.arg!r})"


def _parse_expr(s):
    node = _parse_term(s)
    while s.peek().kind in ("PLUS", "MINUS"):
        op = s.next()
        rhs = _parse_term(s)
        node = _BinOp("+" if op.kind == "PLUS" else "-", node, rhs)
    return node


def _parse_term(s):
    node = _parse_unary(s)
    while s.peek().kind in ("STAR", "SLASH"):
        op = s.next()
        rhs = _parse_unary(s)
        node = _BinOp("*" if op.kind == "STAR" else "/", node, rhs)
    return node


def _parse_unary(s):
    if s.peek().kind == "MINUS":
        s.next()
        return _Neg(_parse_unary(s))
    if s.peek().kind == "PLUS":
        s.next()
        return _parse_unary(s)
    return _parse_power(s)


def _parse_power(s):
    base = _parse_atom(s)
    if s.peek().kind == "CARET":
        t = s.next()
        exp = _parse_unary(s)
        if not isinstance(exp, _Const) or exp.value.imag != 0 or \
                exp.value.real != int(exp.value.real):
            raise SpecSyntaxError("exponent must be an integer literal", t.line, t.col)
        return _BinOp("^", base, exp)
    return base


def _parse_atom(s):
    t = s.next()
    if t.kind == "NUMBER":
        return _Const(t.value)
    if t.kind == "IMAG":
        return _Const(1j * t.value)
    if t.kind == "LPAREN":
        node = _parse_expr(s)
        s.expect("RPAREN")
        return node
    if t.kind == "IDENT":
        if t.value == "z":
            return _Var()
        if t.value in _FUNCS:
            s.expect("LPAREN")
            arg = _parse_expr(s)
            s.expect("RPAREN")
            return _Call(t.value, arg)
        raise SpecSyntaxError(f"unknown identifier {t.value!r}", t.line, t.col)
    raise SpecSyntaxError(f"unexpected token {t.value!r}", t.line, t.col)


def parse_expression(text):
    """Parse a complex expression in the single variable z."""
    s = _Stream(_tokenize(text, allow_imag=True))
    node = _parse_expr(s)
    tail = s.peek()
    if tail.kind != "EOF":
        raise SpecSyntaxError(f"trailing input {tail.value!r}", tail.line, tail.col)
    return node


# ---------------------------------------------------------------------------
# measure specs
# ---------------------------------------------------------------------------

_FAMILIES = ("atomic", "grid", "semicircle", "cauchy", "bernoulli",
             "free_poisson", "arcsine", "marchenko_pastur", "rect_stable",
             "square_id", "rect_id", "transform")


def parse_measure_spec(text):
    """Parse a measure spec; raises SpecSyntaxError / SpecSemanticError."""
    s = _Stream(_tokenize(text))
    m = _parse_measure(s, probability=True)
    tail = s.peek()
    if tail.kind != "EOF":
        raise SpecSyntaxError(f"trailing input {tail.value!r}", tail.line, tail.col)
    return m


def _parse_measure(s, probability):
    t = s.expect("IDENT")
    family = t.value
    if family not in _FAMILIES:
        raise SpecSyntaxError(f"unknown family {family!r}", t.line, t.col)
    s.expect("LBRACE")
    if family == "atomic":
        pairs = []
        while True:
            sign = 1.0
            tok = s.next()
            if tok.kind == "MINUS":
                sign = -1.0
                tok = s.next()
            if tok.kind != "NUMBER":
                raise SpecSyntaxError("expected atom position", tok.line, tok.col)
            s.expect("COLON")
            mtok = s.expect("NUMBER")
            pairs.append((sign * tok.value, mtok.value))
            nxt = s.next()
            if nxt.kind == "RBRACE":
                break
            if nxt.kind != "COMMA":
                raise SpecSyntaxError("expected ',' or '}'", nxt.line, nxt.col)
        return _build("atomic", {"_atoms": pairs}, t, probability)
    kv = {}
    if s.peek().kind != "RBRACE":
        while True:
            key = s.expect("IDENT").value
            s.expect("COLON")
            v = s.peek()
            if v.kind == "IDENT":
                kv[key] = _parse_measure(s, probability=False)
            elif v.kind == "STRING":
                kv[key] = s.next().value
            elif v.kind in ("NUMBER", "MINUS"):
                sign = 1.0
                if v.kind == "MINUS":
                    s.next()
                    sign = -1.0
                kv[key] = sign * s.expect("NUMBER").value
            else:
                raise SpecSyntaxError(f"unexpected value token {v.value!r}", v.line, v.col)
            nxt = s.next()
            if nxt.kind == "RBRACE":
                break
            if nxt.kind != "COMMA":
                raise SpecSyntaxError("expected ',' or '}'", nxt.line, nxt.col)
    else:
        s.next()
    return _build(t.value, kv, t, probability)


def _csv_floats(text, tok):
    try:
        return np.array([float(x) for x in text.split(",") if x.strip() != ""])
    except ValueError as e:
        raise SpecSemanticError(f"bad array literal: {e}", tok.line, tok.col) from None


def _build(family, kv, tok, probability):
    def need(*keys):
        missing = [k for k in keys if k not in kv]
        if missing:
            raise SpecSemanticError(f"{family}: missing keys {missing}", tok.line, tok.col)

    def err(msg):
        raise SpecSemanticError(f"{family}: {msg}", tok.line, tok.col)

    try:
        if family == "atomic":
            return ms.AtomicMeasure(kv["_atoms"], require_probability=probability)
        if family == "grid":
            need("x", "density")
            xs = _csv_floats(kv["x"], tok)
            vs = _csv_floats(kv["density"], tok)
            atom0 = float(kv.get("atom_at_zero", 0.0))
            return ms.GridDensityMeasure(xs, vs, atom_at_zero=atom0,
                                         expected_total=1.0 if probability else None)
        if family == "semicircle":
            need("variance")
            return ms.Semicircle(kv["variance"])
        if family == "cauchy":
            need("t")
            return ms.CauchyLaw(kv["t"])
        if family == "bernoulli":
            need("a")
            return ms.SymmetricBernoulli(kv["a"])
        if family == "free_poisson":
            need("rate")
            return ms.FreePoisson(kv["rate"], kv.get("scale", 1.0), kv.get("shift", 0.0))
        if family == "arcsine":
            need("radius")
            return ms.Arcsine(kv["radius"])
        if family == "marchenko_pastur":
            need("ratio")
            return ms.MarchenkoPastur(kv["ratio"], kv.get("scale", 1.0))
        if family == "rect_stable":
            need("alpha", "t", "lambda")
            return ms.RectStable(kv["alpha"], kv["t"], kv["lambda"])
        if family == "square_id":
            levy = kv.get("levy")
            if levy is not None and not isinstance(levy, ms.Measure):
                err("levy must be a nested measure")
            return ms.SquareIDLaw(kv.get("gamma", 0.0), levy, kv.get("cauchy", 0.0))
        if family == "rect_id":
            need("lambda")
            levy = kv.get("levy")
            if levy is not None and not isinstance(levy, ms.Measure):
                err("levy must be a nested measure")
            return ms.RectIDLaw(levy, kv["lambda"])
        if family == "transform":
            need("which", "expr")
            expr = parse_expression(kv["expr"])
            return ms.TransformDefinedMeasure(kv["which"], expr, text=kv["expr"])
    except ms.DomainError as e:
        raise SpecSemanticError(str(e), tok.line, tok.col) from None
    raise AssertionError(family)
