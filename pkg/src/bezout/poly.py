"""Sparse multivariate polynomials with complex coefficients.

A :class:`MultiPoly` maps exponent tuples to complex coefficients. Zero
coefficients are never stored, so two polynomials are equal exactly when
their term maps are equal.

Polynomials in the doubled variable set ``(x_1..x_n, y_1..y_n)`` used by the
Bezout constructions are ordinary ``MultiPoly`` objects with ``2n`` variables.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "MultiPoly",
    "PolySystem",
    "PolyParseError",
    "parse",
    "format_poly",
    "divided_difference",
    "grlex_key",
    "xy_names",
    "box_monomials",
    "from_terms",
    "to_terms",
]


class PolyParseError(ValueError):
    """Syntax error in a polynomial expression, with the offending position."""

    def __init__(self, message: str, text: str, pos: int):
        self.text = text
        self.pos = pos
        super().__init__(f"{message} at position {pos}: {text!r}")


def grlex_key(exponents: Sequence[int]) -> tuple:
    """Sort key putting higher total degree first, then lexicographically larger."""
    return (-sum(exponents), tuple(-e for e in exponents))


def _clean(value: complex) -> complex:
    # normalise -0.0 so that equality and formatting are stable
    return complex(value.real + 0.0, value.imag + 0.0)


@dataclass(frozen=True, eq=False)
class MultiPoly:
    nvars: int
    terms: Mapping[tuple, complex] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for exps, c in self.terms.items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != self.nvars:
                raise ValueError(f"monomial {exps} does not have {self.nvars} exponents")
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            c = complex(c)
            if c != 0:
                clean[exps] = _clean(clean.get(exps, 0) + c)
                if clean[exps] == 0:
                    del clean[exps]
        object.__setattr__(self, "terms", clean)

    # -- constructors -------------------------------------------------
    @classmethod
    def zero(cls, nvars: int) -> "MultiPoly":
        return cls(nvars, {})

    @classmethod
    def constant(cls, nvars: int, c: complex) -> "MultiPoly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def monomial(cls, exponents: Sequence[int], c: complex = 1) -> "MultiPoly":
        return cls(len(exponents), {tuple(exponents): c})

    @classmethod
    def variable(cls, nvars: int, j: int) -> "MultiPoly":
        """The polynomial ``x_{j+1}`` (``j`` is zero-based)."""
        e = [0] * nvars
        e[j] = 1
        return cls(nvars, {tuple(e): 1})

    @classmethod
    def from_coeffs(cls, monomials: np.ndarray, coeffs: np.ndarray,
                    tol: float = 0.0) -> "MultiPoly":
        """Build from an exponent array (T x n) and a coefficient vector.

        Coefficients with magnitude ``<= tol`` are dropped.
        """
        monomials = np.asarray(monomials)
        terms = {}
        for e, c in zip(monomials, coeffs):
            if abs(c) > tol:
                key = tuple(int(v) for v in e)
                terms[key] = terms.get(key, 0) + complex(c)
        return cls(monomials.shape[1], terms)

    # -- basic queries ------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, float, complex)):
            return self == MultiPoly.constant(self.nvars, other)
        return NotImplemented

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        return f"MultiPoly({format_poly(self)!r}, nvars={self.nvars})"

    def __str__(self):
        return format_poly(self)

    def is_zero(self) -> bool:
        return not self.terms

    def sorted_terms(self) -> list:
        """Terms in descending graded lexicographic order."""
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]))

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, j: int) -> int:
        """Degree in variable ``j`` (zero-based); ``-1`` for the zero polynomial."""
        return max((e[j] for e in self.terms), default=-1)

    def coefficient_norm(self) -> float:
        return float(np.sqrt(sum(abs(c) ** 2 for c in self.terms.values())))

    # -- arithmetic ---------------------------------------------------
    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.nvars != self.nvars:
                raise ValueError(f"nvars mismatch: {self.nvars} vs {other.nvars}")
            return other
        if isinstance(other, (int, float, complex, np.number)):
            return MultiPoly.constant(self.nvars, other)
        raise TypeError(f"cannot combine MultiPoly with {type(other).__name__}")

    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, 0) + c
        return MultiPoly(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return MultiPoly(self.nvars, {e: c * other for e, c in self.terms.items()})
        other = self._coerce(other)
        terms: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, 0) + c1 * c2
        return MultiPoly(self.nvars, terms)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = MultiPoly.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- evaluation ---------------------------------------------------
    def __call__(self, *point):
        if len(point) == 1 and np.ndim(point[0]) == 1:
            point = point[0]
        return self.eval(point)

    def eval(self, point) -> complex:
        """Value at a single point given as a length-``nvars`` sequence."""
        point = np.asarray(point, dtype=complex)
        if point.shape != (self.nvars,):
            raise ValueError(f"point has shape {point.shape}, expected ({self.nvars},)")
        total = 0j
        for e, c in self.terms.items():
            total += c * np.prod(point ** np.asarray(e))
        return complex(total)

    def evaluate(self, points) -> np.ndarray:
        """Vectorised evaluation at points of shape ``(..., nvars)``."""
        points = np.asarray(points, dtype=complex)
        if points.shape[-1] != self.nvars:
            raise ValueError(f"points last axis {points.shape[-1]} != nvars {self.nvars}")
        out = np.zeros(points.shape[:-1], dtype=complex)
        if not self.terms:
            return out
        maxdeg = [self.degree_in(j) for j in range(self.nvars)]
        powers = []
        for j in range(self.nvars):
            pj = [np.ones(points.shape[:-1], dtype=complex)]
            for _ in range(max(maxdeg[j], 0)):
                pj.append(pj[-1] * points[..., j])
            powers.append(pj)
        for e, c in self.terms.items():
            term = np.full(points.shape[:-1], c, dtype=complex)
            for j, ej in enumerate(e):
                if ej:
                    term *= powers[j][ej]
            out += term
        return out

    # -- substitution helpers ----------------------------------------
    def embed(self, nvars: int, positions: Sequence[int]) -> "MultiPoly":
        """Re-index variables: variable ``j`` of ``self`` becomes ``positions[j]``."""
        terms = {}
        for e, c in self.terms.items():
            new = [0] * nvars
            for j, ej in enumerate(e):
                new[positions[j]] += ej
            terms[tuple(new)] = terms.get(tuple(new), 0) + c
        return MultiPoly(nvars, terms)


@dataclass(frozen=True)
class PolySystem:
    """``n`` polynomials in ``n`` variables together with a multidegree bound."""

    polys: tuple
    multidegree: tuple = None
    varnames: tuple = None

    def __post_init__(self):
        polys = tuple(self.polys)
        if not polys:
            raise ValueError("empty system")
        n = polys[0].nvars
        if len(polys) != n or any(p.nvars != n for p in polys):
            raise ValueError(f"need exactly n polynomials in n variables, got {len(polys)} "
                             f"polynomials in {[p.nvars for p in polys]} variables")
        actual = tuple(max(max(p.degree_in(j) for p in polys), 0) for j in range(n))
        if self.multidegree is None:
            d = tuple(max(a, 1) for a in actual)
        else:
            d = tuple(int(v) for v in self.multidegree)
            if len(d) != n:
                raise ValueError("multidegree length must equal nvars")
            if any(dj < aj for dj, aj in zip(d, actual)):
                raise ValueError(f"declared multidegree {d} is below actual degrees {actual}")
            if any(dj < 1 for dj in d):
                raise ValueError("multidegree entries must be >= 1")
        names = self.varnames or tuple(f"x{j + 1}" for j in range(n))
        if len(names) != n:
            raise ValueError("need one variable name per variable")
        object.__setattr__(self, "polys", polys)
        object.__setattr__(self, "multidegree", d)
        object.__setattr__(self, "varnames", tuple(names))

    @property
    def nvars(self) -> int:
        return len(self.polys)

    def __len__(self):
        return len(self.polys)

    def __getitem__(self, i):
        return self.polys[i]

    def residuals(self, point) -> np.ndarray:
        return np.array([abs(p.eval(point)) for p in self.polys])

    @classmethod
    def from_strings(cls, exprs: Sequence[str], varnames: Sequence[str] = None,
                     multidegree=None) -> "PolySystem":
        n = len(exprs)
        names = tuple(varnames) if varnames else tuple(f"x{j + 1}" for j in range(n))
        return cls(tuple(parse(e, names) for e in exprs), multidegree, names)


# ---------------------------------------------------------------------------
# divided differences


def _telescope(a: int, b: int) -> list:
    """Exponent pairs (p, q) with ``(x^a y^b - x^b y^a) / (x - y) = sign * sum x^p y^q``.

    Returns ``(sign, pairs)``; exact, derived from
    ``(x^m - y^m)/(x - y) = sum_{t<m} x^t y^(m-1-t)``.
    """
    lo, hi = min(a, b), max(a, b)
    m = hi - lo
    sign = 1 if a >= b else -1
    return sign, [(lo + t, lo + m - 1 - t) for t in range(m)]


def divided_difference(f: MultiPoly, i: int, j: int, gamma_j: int = 0) -> MultiPoly:
    """Entry ``(i, j)`` of the finite-difference matrix, as a polynomial in ``(x, y)``.

    ``f`` is the system polynomial ``f_i`` (the index ``i`` is only carried for
    bookkeeping), ``j`` is the zero-based column and ``gamma_j`` the exponent of
    ``x_j`` in the monomial whose Bezout polynomial is being formed. The result
    is::

        (y_j^g f(y_1..y_{j-1}, x_j..x_n) - x_j^g f(y_1..y_j, x_{j+1}..x_n)) / (x_j - y_j)

    with the division carried out exactly, term by term. The returned
    polynomial has ``2n`` variables ordered ``x_1..x_n, y_1..y_n``.
    """
    n = f.nvars
    if not (0 <= j < n):
        raise IndexError(f"column index {j} out of range for {n} variables")
    if not (0 <= i < n):
        raise IndexError(f"row index {i} out of range for {n} variables")
    terms: dict = {}
    for e, c in f.terms.items():
        # y_1..y_{j-1} and x_{j+1}..x_n are common to both numerator terms
        base = [0] * (2 * n)
        for l in range(j):
            base[n + l] = e[l]
        for l in range(j + 1, n):
            base[l] = e[l]
        # y^g x^e - x^g y^e
        sign, pairs = _telescope(e[j], gamma_j)
        for p, q in pairs:
            mono = list(base)
            mono[j] += p
            mono[n + j] += q
            key = tuple(mono)
            terms[key] = terms.get(key, 0) + sign * c
    return MultiPoly(2 * n, terms)


# ---------------------------------------------------------------------------
# parsing and formatting

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?[ij]?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*^()])
""", re.VERBOSE)


def _tokenize(text: str) -> list:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise PolyParseError(f"unexpected character {text[pos]!r}", text, pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, varnames: Sequence[str]):
        self.text = text
        self.tokens = _tokenize(text)
        self.k = 0
        self.index = {name: j for j, name in enumerate(varnames)}
        self.nvars = len(varnames)

    def peek(self):
        return self.tokens[self.k]

    def take(self):
        tok = self.tokens[self.k]
        self.k += 1
        return tok

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise PolyParseError(msg, self.text, tok[2])

    def parse(self) -> MultiPoly:
        if self.peek()[0] == "end":
            self.error("empty expression")
        p = self.expr()
        if self.peek()[0] != "end":
            self.error(f"unexpected token {self.peek()[1]!r}")
        return p

    def expr(self) -> MultiPoly:
        sign = 1
        if self.peek()[1] in "+-" and self.peek()[0] == "op":
            sign = -1 if self.take()[1] == "-" else 1
        p = self.term() * sign
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            t = self.term()
            p = p + t if op == "+" else p - t
        return p

    def term(self) -> MultiPoly:
        p = self.power()
        while self.peek()[0] == "op" and self.peek()[1] == "*":
            self.take()
            p = p * self.power()
        return p

    def power(self) -> MultiPoly:
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            tok = self.take()
            if tok[0] != "num" or not tok[1].isdigit():
                self.error("exponent must be a non-negative integer", tok)
            base = base ** int(tok[1])
        return base

    def atom(self) -> MultiPoly:
        tok = self.take()
        kind, value, _ = tok
        if kind == "num":
            if value[-1] in "ij":
                return MultiPoly.constant(self.nvars, complex(0, float(value[:-1])))
            c = int(value) if value.isdigit() else float(value)
            return MultiPoly.constant(self.nvars, c)
        if kind == "name":
            if value in ("i", "j") and value not in self.index:
                return MultiPoly.constant(self.nvars, 1j)
            if value not in self.index:
                self.error(f"unknown variable {value!r}", tok)
            return MultiPoly.variable(self.nvars, self.index[value])
        if kind == "op" and value == "(":
            p = self.expr()
            if self.take()[1] != ")":
                self.error("expected ')'", self.tokens[self.k - 1])
            return p
        if kind == "op" and value in "+-":
            p = self.power()
            return -p if value == "-" else p
        self.error(f"unexpected token {value!r}", tok)


def parse(text: str, varnames=None) -> MultiPoly:
    """Parse an expression such as ``"3*x1^2*x2 - x3 + 2i"``.

    ``varnames`` is either a sequence of names or an integer ``n`` meaning
    ``x1..xn``. When omitted, ``n`` is the largest index of any ``x<k>`` name
    found in the text.
    """
    if varnames is None:
        found = [int(k) for k in re.findall(r"\bx(\d+)\b", text)]
        varnames = max(found, default=1)
    if isinstance(varnames, int):
        varnames = [f"x{j + 1}" for j in range(varnames)]
    if "i" in varnames or "j" in varnames:
        raise ValueError("'i' and 'j' are reserved for the imaginary unit")
    return _Parser(text, varnames).parse()


def _format_real(x: float) -> str:
    if float(x).is_integer() and abs(x) < 2 ** 53:
        return str(int(x))
    return repr(float(x))


def _format_coeff(c: complex) -> tuple:
    """(sign, magnitude text or None for unit) of a coefficient."""
    if c.imag == 0:
        sign = "-" if c.real < 0 else "+"
        mag = abs(c.real)
        return sign, (None if mag == 1 else _format_real(mag))
    if c.real == 0:
        sign = "-" if c.imag < 0 else "+"
        return sign, _format_real(abs(c.imag)) + "i"
    im = c.imag
    body = f"{_format_real(c.real)}{'-' if im < 0 else '+'}{_format_real(abs(im))}i"
    return "+", f"({body})"


def format_poly(p: MultiPoly, varnames=None) -> str:
    """Text form in descending grlex order; ``parse(format_poly(p))`` gives back ``p``."""
    if varnames is None:
        varnames = [f"x{j + 1}" for j in range(p.nvars)]
    if not p.terms:
        return "0"
    parts = []
    for e, c in p.sorted_terms():
        sign, mag = _format_coeff(c)
        factors = []
        for name, k in zip(varnames, e):
            if k == 1:
                factors.append(name)
            elif k > 1:
                factors.append(f"{name}^{k}")
        if mag is None:
            body = "*".join(factors) if factors else "1"
        else:
            body = "*".join([mag] + factors)
        parts.append((sign, body))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def xy_names(n: int) -> list:
    """Names for the doubled variable set ``x1..xn, y1..yn``."""
    return [f"x{j + 1}" for j in range(n)] + [f"y{j + 1}" for j in range(n)]


def box_monomials(extents: Sequence[int]) -> np.ndarray:
    """All exponent vectors with ``0 <= e_j < extents[j]``, first variable slowest."""
    return np.array(list(product(*(range(m) for m in extents))), dtype=int).reshape(-1, len(extents))


def from_terms(nvars: int, items: Iterable) -> MultiPoly:
    """Build from ``[{"e": [...], "c": [re, im]}, ...]`` term lists."""
    terms = {}
    for it in items:
        c = it["c"]
        c = complex(c[0], c[1]) if isinstance(c, (list, tuple)) else complex(c)
        e = tuple(it["e"])
        terms[e] = terms.get(e, 0) + c
    return MultiPoly(nvars, terms)


def to_terms(p: MultiPoly) -> list:
    return [{"e": list(e), "c": [c.real, c.imag]} for e, c in p.sorted_terms()]
