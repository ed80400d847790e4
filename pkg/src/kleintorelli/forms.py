"""Sparse homogeneous forms with exact integer coefficients.

A :class:`Form` is an immutable homogeneous polynomial in ``num_vars``
variables ``x0 .. x{num_vars-1}``.  Terms are kept in descending
lexicographic order of their exponent vectors, which is the order used
for rendering, JSON output and matrix column indexing everywhere else in
the package.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from math import comb, factorial
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence, Tuple

Monomial = Tuple[int, ...]


class FormError(ValueError):
    """Base class for malformed forms."""


class FormSyntaxError(FormError):
    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")


class NotHomogeneous(FormError):
    def __init__(self, degrees: Tuple[int, int]):
        self.degrees = degrees
        super().__init__(f"form is not homogeneous: found degrees {degrees[0]} and {degrees[1]}")


class UnknownVariable(FormError):
    def __init__(self, index: int, num_vars: int, position: int = -1):
        self.index = index
        self.position = position
        where = f" at position {position}" if position >= 0 else ""
        super().__init__(f"variable x{index} out of range for {num_vars} variables{where}")


class ZeroForm(FormError):
    def __init__(self):
        super().__init__("form is identically zero; its degree is undetermined")


class DimensionMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Form:
    num_vars: int
    degree: int
    terms: Tuple[Tuple[Monomial, int], ...]
    known_smooth: bool = field(default=False, compare=False)

    def __post_init__(self):
        if self.num_vars < 2:
            raise FormError("a form needs at least 2 variables")
        if not self.terms:
            raise ZeroForm()
        # degree 0 only arises as the derivative of a linear form
        if self.degree < 0:
            raise FormError("degree must be non-negative")
        prev = None
        for mono, coeff in self.terms:
            if len(mono) != self.num_vars:
                raise DimensionMismatch(f"monomial {mono} has length {len(mono)}, expected {self.num_vars}")
            if coeff == 0:
                raise FormError("zero coefficient stored")
            if sum(mono) != self.degree:
                raise NotHomogeneous((self.degree, sum(mono)))
            if prev is not None and not mono < prev:
                raise FormError("terms must be distinct and in descending lex order")
            prev = mono

    @classmethod
    def from_terms(
        cls,
        num_vars: int,
        terms: Mapping[Monomial, int] | Iterable[Tuple[Monomial, int]],
        known_smooth: bool = False,
    ) -> "Form":
        """Canonicalize ``terms`` (combining repeats, dropping zeros) into a Form."""
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Monomial, int] = {}
        for mono, coeff in items:
            mono = tuple(int(a) for a in mono)
            if len(mono) != num_vars:
                raise DimensionMismatch(f"monomial {mono} has length {len(mono)}, expected {num_vars}")
            if any(a < 0 for a in mono):
                raise FormError(f"negative exponent in {mono}")
            acc[mono] = acc.get(mono, 0) + int(coeff)
        kept = sorted(((m, c) for m, c in acc.items() if c != 0), reverse=True)
        if not kept:
            raise ZeroForm()
        degrees = sorted({sum(m) for m, _ in kept})
        if len(degrees) > 1:
            raise NotHomogeneous((degrees[0], degrees[-1]))
        return cls(num_vars, degrees[0], tuple(kept), known_smooth)

    @property
    def n(self) -> int:
        """Dimension of the hypersurface (num_vars - 2)."""
        return self.num_vars - 2

    def as_dict(self) -> dict[Monomial, int]:
        return dict(self.terms)

    def monomials(self) -> list[Monomial]:
        return [m for m, _ in self.terms]

    def coefficient(self, mono: Monomial) -> int:
        for m, c in self.terms:
            if m == mono:
                return c
        return 0

    def __len__(self) -> int:
        return len(self.terms)

    def __add__(self, other: "Form") -> "Form":
        if not isinstance(other, Form):
            return NotImplemented
        if other.num_vars != self.num_vars:
            raise DimensionMismatch("forms live in different variable counts")
        return Form.from_terms(self.num_vars, list(self.terms) + list(other.terms))

    def __neg__(self) -> "Form":
        return self.scale(-1)

    def scale(self, k: int) -> "Form":
        return Form.from_terms(self.num_vars, [(m, k * c) for m, c in self.terms])

    def times_variable(self, i: int) -> "Form":
        out = []
        for m, c in self.terms:
            e = list(m)
            e[i] += 1
            out.append((tuple(e), c))
        return Form.from_terms(self.num_vars, out)

    def render(self) -> str:
        return render_form(self)

    def to_json(self) -> dict:
        return {
            "num_vars": self.num_vars,
            "degree": self.degree,
            "terms": [{"coeff": str(c), "exps": list(m)} for m, c in self.terms],
        }

    def __str__(self) -> str:
        return self.render()


def add_forms(*forms: Optional[Form]) -> Optional[Form]:
    """Sum forms, treating ``None`` as zero; returns ``None`` if the sum vanishes."""
    present = [f for f in forms if f is not None]
    if not present:
        return None
    try:
        return Form.from_terms(present[0].num_vars, [t for f in present for t in f.terms])
    except ZeroForm:
        return None


# ---------------------------------------------------------------- rendering

def _render_monomial(mono: Monomial) -> str:
    factors = []
    for i, a in enumerate(mono):
        if a == 1:
            factors.append(f"x{i}")
        elif a > 1:
            factors.append(f"x{i}^{a}")
    return "*".join(factors)


def render_form(form: Form) -> str:
    pieces = []
    for k, (mono, coeff) in enumerate(form.terms):
        sign = "-" if coeff < 0 else "+"
        mag = abs(coeff)
        body = _render_monomial(mono)
        if not body:
            text = str(mag)
        elif mag == 1:
            text = body
        else:
            text = f"{mag}*{body}"
        if k == 0:
            pieces.append(text if sign == "+" else f"-{text}")
        else:
            pieces.append(f"{sign} {text}")
    return " ".join(pieces)


# ------------------------------------------------------------------ parsing

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<op>[x^*+\-]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if m is None:
            raise FormSyntaxError(f"unexpected character {text[pos]!r}", pos, text)
        start = m.start("int") if m.group("int") is not None else m.start("op")
        if m.group("int") is not None:
            tokens.append(("int", m.group("int"), start))
        else:
            tokens.append((m.group("op"), m.group("op"), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    """Recursive-descent parser for the form grammar::

        form    := term (('+'|'-') term)*
        term    := [integer '*'] factor ('*' factor)* | integer
        factor  := 'x' index ['^' exponent]
    """

    def __init__(self, text: str, num_vars: int):
        self.text = text
        self.num_vars = num_vars
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def take(self, kind: str) -> tuple[str, str, int]:
        tok = self.peek()
        if tok[0] != kind:
            what = "end of input" if tok[0] == "end" else repr(tok[1])
            raise FormSyntaxError(f"expected {kind!r}, found {what}", tok[2], self.text)
        self.i += 1
        return tok

    def parse(self) -> list[tuple[Monomial, int]]:
        terms = []
        sign = 1
        if self.peek()[0] in ("+", "-"):
            sign = -1 if self.take(self.peek()[0])[0] == "-" else 1
        terms.append(self.term(sign))
        while self.peek()[0] in ("+", "-"):
            sign = -1 if self.take(self.peek()[0])[0] == "-" else 1
            terms.append(self.term(sign))
        if self.peek()[0] != "end":
            tok = self.peek()
            raise FormSyntaxError(f"unexpected {tok[1]!r}", tok[2], self.text)
        return terms

    def term(self, sign: int) -> tuple[Monomial, int]:
        coeff = 1
        exps = [0] * self.num_vars
        if self.peek()[0] == "int":
            coeff = int(self.take("int")[1])
            if self.peek()[0] != "*":
                return tuple(exps), sign * coeff
            self.take("*")
        self.factor(exps)
        while self.peek()[0] == "*":
            self.take("*")
            self.factor(exps)
        return tuple(exps), sign * coeff

    def factor(self, exps: list[int]) -> None:
        self.take("x")
        _, idx_text, pos = self.take("int")
        idx = int(idx_text)
        if idx >= self.num_vars:
            raise UnknownVariable(idx, self.num_vars, pos)
        power = 1
        if self.peek()[0] == "^":
            self.take("^")
            power = int(self.take("int")[1])
        exps[idx] += power


def parse_form(text: str, num_vars: int, known_smooth: bool = False) -> Form:
    """Parse ``text`` into a canonical :class:`Form` over ``num_vars`` variables.

    >>> parse_form("x0^2*x1 + x1^2*x2 + x2^2*x0", 3).degree
    3
    """
    if num_vars < 2:
        raise FormError("a form needs at least 2 variables")
    terms = _Parser(text, num_vars).parse()
    return Form.from_terms(num_vars, terms, known_smooth)


_HEADER = re.compile(r"^\s*vars\s*=\s*(\d+)\s+degree\s*=\s*(\d+)\s*$")


def parse_form_file_text(text: str) -> Form:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FormSyntaxError("empty form file", 0, text)
    m = _HEADER.match(lines[0])
    if m is None:
        raise FormSyntaxError("header must read 'vars=<n+2> degree=<d>'", 0, lines[0])
    num_vars, degree = int(m.group(1)), int(m.group(2))
    if len(lines) < 2:
        raise FormSyntaxError("missing form expression", len(lines[0]), text)
    form = parse_form(" ".join(lines[1:]), num_vars)
    if form.degree != degree:
        raise NotHomogeneous((degree, form.degree))
    return form


def read_form_file(path: str | Path) -> Form:
    return parse_form_file_text(Path(path).read_text(encoding="utf-8"))


def format_form_file(form: Form) -> str:
    return f"vars={form.num_vars} degree={form.degree}\n{form.render()}\n"


def form_to_json_text(form: Form) -> str:
    return json.dumps(form.to_json(), sort_keys=True)


def form_from_json(data: Mapping) -> Form:
    terms = [(tuple(t["exps"]), int(t["coeff"])) for t in data["terms"]]
    form = Form.from_terms(int(data["num_vars"]), terms)
    if form.degree != int(data["degree"]):
        raise NotHomogeneous((int(data["degree"]), form.degree))
    return form


# ------------------------------------------------------------- derivatives

def partial_derivative(form: Form, i: int) -> Optional[Form]:
    """Exact ``dF/dx_i``; ``None`` stands for the zero polynomial."""
    if not 0 <= i < form.num_vars:
        raise IndexError(f"variable index {i} out of range")
    out = []
    for mono, coeff in form.terms:
        a = mono[i]
        if a:
            e = list(mono)
            e[i] = a - 1
            out.append((tuple(e), coeff * a))
    if not out:
        return None
    return Form.from_terms(form.num_vars, out)


def directional_derivative(form: Form, direction: Sequence[int]) -> Optional[Form]:
    """``sum_i c_i dF/dx_i``; ``None`` when the result vanishes."""
    if len(direction) != form.num_vars:
        raise DimensionMismatch(f"direction has length {len(direction)}, expected {form.num_vars}")
    if not any(direction):
        raise ValueError("direction must be nonzero")
    acc: dict[Monomial, int] = {}
    for i, c in enumerate(direction):
        if not c:
            continue
        for mono, coeff in form.terms:
            a = mono[i]
            if a:
                e = list(mono)
                e[i] = a - 1
                key = tuple(e)
                acc[key] = acc.get(key, 0) + c * a * coeff
    acc = {m: c for m, c in acc.items() if c}
    if not acc:
        return None
    return Form.from_terms(form.num_vars, acc)


# ------------------------------------------------------------ substitution

def _poly_mul(p: dict, q: dict) -> dict:
    out: dict = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            key = tuple(a + b for a, b in zip(m1, m2))
            out[key] = out.get(key, 0) + c1 * c2
    return {m: c for m, c in out.items() if c}


def _linear_power(row: Sequence[int], k: int, nv: int) -> dict:
    """Expand ``(sum_j row[j] x_j)^k`` by the multinomial theorem."""
    support = [j for j, a in enumerate(row) if a]
    out: dict = {}

    def rec(pos: int, remaining: int, exps: list[int], coeff: int, denom: int):
        if pos == len(support) - 1:
            j = support[pos]
            exps[j] = remaining
            value = coeff * row[j] ** remaining * factorial(k) // (denom * factorial(remaining))
            out[tuple(exps)] = out.get(tuple(exps), 0) + value
            exps[j] = 0
            return
        j = support[pos]
        for e in range(remaining + 1):
            exps[j] = e
            rec(pos + 1, remaining - e, exps, coeff * row[j] ** e, denom * factorial(e))
        exps[j] = 0

    if k == 0:
        return {(0,) * nv: 1}
    if not support:
        return {}
    rec(0, k, [0] * nv, 1, 1)
    return out


def apply_substitution(form: Form, matrix: Sequence[Sequence[int]]) -> Form:
    """Return ``F o A``, i.e. substitute ``x_i -> sum_j A[i][j] x_j``.

    Functorial in the sense ``F o (A B) = (F o A) o B``.
    """
    nv = form.num_vars
    if len(matrix) != nv or any(len(row) != nv for row in matrix):
        raise DimensionMismatch(f"substitution must be {nv}x{nv}")
    cache: dict[tuple[int, int], dict] = {}
    total: dict = {}
    for mono, coeff in form.terms:
        poly = {(0,) * nv: coeff}
        for i, a in enumerate(mono):
            if not a:
                continue
            key = (i, a)
            if key not in cache:
                cache[key] = _linear_power(matrix[i], a, nv)
            poly = _poly_mul(poly, cache[key])
            if not poly:
                break
        for m, c in poly.items():
            total[m] = total.get(m, 0) + c
    return Form.from_terms(nv, total)


def num_monomials(num_vars: int, degree: int) -> int:
    return comb(num_vars + degree - 1, degree)


# -------------------------------------------------------- family builders

def fermat(n: int, d: int) -> Form:
    nv = n + 2
    terms = []
    for i in range(nv):
        e = [0] * nv
        e[i] = d
        terms.append((tuple(e), 1))
    return Form.from_terms(nv, terms, known_smooth=True)


def klein(n: int, d: int) -> Form:
    """``x0^{d-1} x1 + x1^{d-1} x2 + ... + x_{n+1}^{d-1} x0``."""
    nv = n + 2
    terms = []
    for i in range(nv):
        e = [0] * nv
        e[i] += d - 1
        e[(i + 1) % nv] += 1
        terms.append((tuple(e), 1))
    return Form.from_terms(nv, terms, known_smooth=True)


def delsarte(n: int, d: int) -> Form:
    """``x0^{d-1} x1 + ... + x_n^{d-1} x_{n+1} + x_{n+1}^d``."""
    nv = n + 2
    terms = []
    for i in range(nv - 1):
        e = [0] * nv
        e[i] = d - 1
        e[i + 1] = 1
        terms.append((tuple(e), 1))
    e = [0] * nv
    e[nv - 1] = d
    terms.append((tuple(e), 1))
    return Form.from_terms(nv, terms, known_smooth=True)


FAMILIES = {"fermat": fermat, "delsarte": delsarte, "klein": klein}


def family_form(family: str, n: int, d: int) -> Form:
    try:
        return FAMILIES[family.lower()](n, d)
    except KeyError:
        raise ValueError(f"unknown family {family!r}") from None
