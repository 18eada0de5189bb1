"""Generator expressions and the plain-text subspace file format.

Grammar (whitespace insignificant, ``#`` starts a comment)::

    line  := expr ['=' expr]
    expr  := [sign] term (sign term)*
    term  := [coef '*'] atom
    coef  := int | 'r' | int '*' 'r'
    atom  := 'v(' j ',' i ')' | '[g' j ',g' i ']' | 'w(' j ',' i ',' k ')'

``a = b`` is sugar for ``a - b``. ``v(i,j)`` with ``i < j`` is read as
``-v(j,i)``. The symbol ``r`` stands for a parameter supplied at resolution
time (used by the catalog data). ``w`` atoms are only legal in files whose
header declares ``space=W``.

File layout: line 1 is ``p=<prime> n=<int>`` (optionally `` space=W``), then
one expression per line, blank lines and comments. A line ``@matrix`` switches
the rest of the body to raw coordinate rows.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .fpalg import DTYPE, PrimeModulus, Subspace, span
from .spaces import MAX_N, MIN_N, SpaceContext, make_context


class ParseError(ValueError):
    """Input that is outside the grammar; ``pos`` is a 0-based column."""

    def __init__(self, message: str, pos: int | None = None, line: int | None = None):
        self.message = message
        self.pos = pos
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if pos is not None:
            where.append(f"col {pos + 1}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)


@dataclass(frozen=True)
class GeneratorExpression:
    """``sum(c * atom) + r * sum(c' * atom)`` with atoms in canonical orientation.

    For ``V`` the atom is a pair ``(j, i)`` with ``j > i``; for ``W`` it is a
    triple ``(j, i, k)``. Repeated atoms are merged and zero terms dropped.
    """

    terms: tuple
    param_terms: tuple = ()

    def vector(self, ctx: SpaceContext, r: int | None = None, space: str = "V") -> np.ndarray:
        if self.param_terms and r is None:
            raise ValueError("expression uses the parameter r but no value was supplied")
        dim = ctx.dim_v if space == "V" else ctx.dim_w
        out = np.zeros(dim, dtype=DTYPE)
        for scale, terms in ((1, self.terms), (r or 0, self.param_terms)):
            for c, atom in terms:
                col = ctx.pair(*atom) if space == "V" else ctx.triple(*atom)
                out[col] = (out[col] + c * scale) % ctx.p
        return out % ctx.p


_TOKEN = re.compile(r"(\d+)|(v\(|w\(|\[g|,g|[-+*=(),\]r])")


def _tokenize(text: str):
    """Tokens with their columns in ``text``; whitespace between tokens is ignored."""
    text = text.split("#", 1)[0]
    chars, cols = [], []
    for col, ch in enumerate(text):
        if ch.isspace():
            continue
        if ch.isdigit() and chars and chars[-1].isdigit() and cols[-1] != col - 1:
            raise ParseError("whitespace inside an integer", col)
        chars.append(ch)
        cols.append(col)
    flat = "".join(chars)
    out = []
    pos = 0
    while pos < len(flat):
        m = _TOKEN.match(flat, pos)
        if not m:
            raise ParseError(f"unexpected character {flat[pos]!r}", cols[pos])
        out.append((m.group(0), cols[pos]))
        pos = m.end()
    out.append(("<end>", len(text.rstrip())))
    return out


class _Parser:
    def __init__(self, text: str, n: int, space: str):
        self.toks = _tokenize(text)
        self.k = 0
        self.n = n
        self.space = space

    def peek(self) -> str:
        return self.toks[self.k][0]

    def pos(self) -> int:
        return self.toks[self.k][1]

    def take(self, want: str | None = None) -> str:
        tok, pos = self.toks[self.k]
        if want is not None and tok != want:
            raise ParseError(f"expected {want!r}, found {tok!r}", pos)
        self.k += 1
        return tok

    def integer(self) -> int:
        tok, pos = self.toks[self.k]
        if not tok.isdigit():
            raise ParseError(f"expected an integer, found {tok!r}", pos)
        self.k += 1
        return int(tok)

    def index(self) -> int:
        pos = self.pos()
        v = self.integer()
        if not (1 <= v <= self.n):
            raise ParseError(f"index {v} out of range 1..{self.n}", pos)
        return v

    def line(self):
        acc: dict = {}
        pacc: dict = {}
        self.expr(acc, pacc, 1)
        if self.peek() == "=":
            self.take("=")
            self.expr(acc, pacc, -1)
        if self.peek() != "<end>":
            raise ParseError(f"unexpected {self.peek()!r}", self.pos())
        return acc, pacc

    def expr(self, acc, pacc, outer: int):
        sign = 1
        if self.peek() in ("+", "-"):
            sign = -1 if self.take() == "-" else 1
        self.term(acc, pacc, sign * outer)
        while self.peek() in ("+", "-"):
            sign = -1 if self.take() == "-" else 1
            self.term(acc, pacc, sign * outer)

    def term(self, acc, pacc, sign: int):
        coef = 1
        param = False
        if self.peek().isdigit():
            coef = self.integer()
            self.take("*")
            if self.peek() == "r":
                self.take("r")
                self.take("*")
                param = True
        elif self.peek() == "r":
            self.take("r")
            self.take("*")
            param = True
        atom, orient = self.atom()
        target = pacc if param else acc
        target[atom] = target.get(atom, 0) + sign * orient * coef

    def atom(self):
        tok, pos = self.toks[self.k]
        if tok == "v(" or tok == "[g":
            if self.space != "V":
                raise ParseError(f"{tok!r} atom in a W expression", pos)
            self.take()
            a = self.index()
            self.take("," if tok == "v(" else ",g")
            b = self.index()
            self.take(")" if tok == "v(" else "]")
            if a == b:
                raise ParseError(f"degenerate commutator with repeated index {a}", pos)
            return ((a, b), 1) if a > b else ((b, a), -1)
        if tok == "w(":
            if self.space != "W":
                raise ParseError("'w(' atom outside a W expression", pos)
            self.take()
            j = self.index()
            self.take(",")
            i = self.index()
            self.take(",")
            k = self.index()
            self.take(")")
            if not (i < j and i <= k):
                raise ParseError(f"w({j},{i},{k}) is not a basis vector (need i < j and i <= k)", pos)
            return (j, i, k), 1
        raise ParseError(f"expected an atom, found {tok!r}", pos)


def _normalize(acc: dict, p: int | None) -> tuple:
    items = []
    for atom in sorted(acc):
        c = acc[atom] % p if p is not None else acc[atom]
        if c:
            items.append((c, atom))
    return tuple(items)


def parse_expression(text: str, n: int, p: int | None = None, space: str = "V") -> GeneratorExpression:
    """Parse one generator expression in ``V(n)`` (or ``W(n)``).

    With ``p`` given, coefficients are reduced mod ``p``; otherwise they are
    kept as signed integers.
    """
    if space not in ("V", "W"):
        raise ValueError(f"space must be 'V' or 'W', got {space!r}")
    acc, pacc = _Parser(text, n, space).line()
    return GeneratorExpression(_normalize(acc, p), _normalize(pacc, p))


# -- files ---------------------------------------------------------------------

_HEADER = re.compile(r"p=(\d+) n=(\d+)(?: space=(V|W))?")


@dataclass(frozen=True)
class SubspaceFile:
    ctx: SpaceContext
    subspace: Subspace
    space: str = "V"


def parse_header(line: str) -> tuple[int, int, str]:
    m = _HEADER.fullmatch(line.rstrip("\r"))
    if not m:
        raise ParseError("malformed header; expected 'p=<prime> n=<int>'", 0, 1)
    try:
        p = int(PrimeModulus(int(m.group(1))))
    except ValueError as exc:
        raise ParseError(str(exc), 0, 1) from None
    n = int(m.group(2))
    if not (MIN_N <= n <= MAX_N):
        raise ParseError(f"n must satisfy {MIN_N} <= n <= {MAX_N}, got {n}", 0, 1)
    return p, n, m.group(3) or "V"


def loads_subspace(text: str) -> SubspaceFile:
    lines = text.split("\n")
    if not lines or not lines[0].strip():
        raise ParseError("missing header", 0, 1)
    p, n, space = parse_header(lines[0])
    ctx = make_context(n, p)
    dim = ctx.dim_v if space == "V" else ctx.dim_w
    rows = []
    matrix_mode = False
    for lineno, raw in enumerate(lines[1:], start=2):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        if body == "@matrix":
            if matrix_mode:
                raise ParseError("repeated '@matrix'", 0, lineno)
            matrix_mode = True
            continue
        if matrix_mode:
            parts = body.split()
            if len(parts) != dim or not all(re.fullmatch(r"-?\d+", t) for t in parts):
                raise ParseError(f"expected {dim} integers", 0, lineno)
            rows.append(np.array([int(t) for t in parts], dtype=DTYPE) % p)
            continue
        try:
            expr = parse_expression(raw.split("#", 1)[0], n, p, space)
        except ParseError as exc:
            raise ParseError(exc.message, exc.pos, lineno) from None
        if expr.param_terms:
            raise ParseError("parameter 'r' is not allowed in subspace files", 0, lineno)
        rows.append(expr.vector(ctx, space=space))
    return SubspaceFile(ctx, span(rows, dim, p), space)


def load_subspace(path) -> tuple[SpaceContext, Subspace]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"not valid UTF-8: {exc.reason}") from None
    f = loads_subspace(text)
    return f.ctx, f.subspace


def format_vector(ctx: SpaceContext, vec, space: str = "V") -> str:
    """Expression text for a vector; coefficients above ``p/2`` are written negative."""
    atoms = ctx.pairs if space == "V" else ctx.triples
    name = "v" if space == "V" else "w"
    out = []
    for c, atom in zip(np.asarray(vec) % ctx.p, atoms):
        c = int(c)
        if not c:
            continue
        neg = c > ctx.p // 2
        mag = ctx.p - c if neg else c
        body = f"{name}({','.join(map(str, atom))})"
        if mag != 1:
            body = f"{mag}*{body}"
        if not out:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f"{'-' if neg else '+'} {body}")
    return " ".join(out) if out else "0"


def dumps_subspace(ctx: SpaceContext, X: Subspace, space: str = "V", matrix: bool = False,
                   comment: str | None = None) -> str:
    head = f"p={ctx.p} n={ctx.n}" + (" space=W" if space == "W" else "")
    lines = [head]
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    if matrix:
        lines.append("@matrix")
        lines.extend(" ".join(str(int(x)) for x in row) for row in X.basis)
    else:
        lines.extend(format_vector(ctx, row, space) for row in X.basis)
    return "\n".join(lines) + "\n"


def dump_subspace(path, ctx: SpaceContext, X: Subspace, **kw) -> None:
    Path(path).write_text(dumps_subspace(ctx, X, **kw), encoding="utf-8", newline="\n")
