"""Exact scalar arithmetic and finite free commutative algebras.

Everything downstream is built on three kinds of scalars:

* ``QQ`` / ``ZZ``  -- arbitrary-precision rationals and integers.  Rational
  values are plain ``int`` when integral and ``fractions.Fraction``
  otherwise; the two mix freely and compare equal where they should.
* ``GF(p)``       -- prime fields, values are :class:`FpElem`.
* ``PolyRing``    -- sparse multivariate polynomials (:class:`MultiPoly`)
  over one of the above.

On top of the scalars sit dense matrix helpers (division-free determinant,
adjugate, field Gaussian elimination) and :class:`FiniteFreeAlgebra`, a
commutative algebra of finite rank given by structure constants that are
validated exhaustively at construction time.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import (
    BadUnit,
    NonAssociative,
    NonCommutative,
    ParseError,
    RingMismatch,
    UnsupportedBase,
    VariableMismatch,
)

__all__ = [
    "QQ",
    "ZZ",
    "GF",
    "CoeffRing",
    "FpElem",
    "MultiPoly",
    "PolyRing",
    "parse_expression",
    "det_generic",
    "adjugate",
    "solve_adjugate",
    "field_solve",
    "field_nullspace",
    "field_mat_mul",
    "FiniteFreeAlgebra",
    "AlgebraElem",
    "AlgebraMap",
    "make_finite_algebra",
]


def _is_prime(p):
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


class FpElem:
    """An element of a prime field, reduced representative in 0..p-1."""

    __slots__ = ("v", "p")

    def __init__(self, v, p):
        self.v = v % p
        self.p = p

    def _lift(self, other):
        if isinstance(other, FpElem):
            if other.p != self.p:
                raise RingMismatch(f"GF({self.p}) vs GF({other.p})")
            return other.v
        if isinstance(other, int):
            return other % self.p
        return NotImplemented

    def __add__(self, other):
        w = self._lift(other)
        if w is NotImplemented:
            return NotImplemented
        return FpElem(self.v + w, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        w = self._lift(other)
        if w is NotImplemented:
            return NotImplemented
        return FpElem(self.v - w, self.p)

    def __rsub__(self, other):
        w = self._lift(other)
        if w is NotImplemented:
            return NotImplemented
        return FpElem(w - self.v, self.p)

    def __mul__(self, other):
        w = self._lift(other)
        if w is NotImplemented:
            return NotImplemented
        return FpElem(self.v * w, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return FpElem(-self.v, self.p)

    def __truediv__(self, other):
        w = self._lift(other)
        if w is NotImplemented:
            return NotImplemented
        if w % self.p == 0:
            raise ZeroDivisionError(f"division by zero in GF({self.p})")
        return FpElem(self.v * pow(w, self.p - 2, self.p), self.p)

    def __rtruediv__(self, other):
        w = self._lift(other)
        if w is NotImplemented:
            return NotImplemented
        return FpElem(w, self.p) / self

    def __pow__(self, k):
        return FpElem(pow(self.v, k, self.p), self.p)

    def __eq__(self, other):
        if isinstance(other, FpElem):
            return self.p == other.p and self.v == other.v
        if isinstance(other, int):
            return self.v == other % self.p
        return NotImplemented

    def __hash__(self):
        return hash((self.v, self.p))

    def __bool__(self):
        return self.v != 0

    def __repr__(self):
        return f"FpElem({self.v}, {self.p})"


class CoeffRing:
    """Descriptor for a base scalar ring: Q, Z, or GF(p).

    Values are plain Python numbers (``int``/``Fraction``) or
    :class:`FpElem`; the descriptor supplies construction, parsing,
    rendering and the few arithmetic services that depend on the ring
    rather than on the value.
    """

    def __init__(self, kind, p=None):
        if kind not in ("Q", "Z", "Fp"):
            raise UnsupportedBase(f"unknown scalar kind {kind!r}")
        if kind == "Fp":
            if p is None or not _is_prime(p):
                raise UnsupportedBase(f"GF({p}): modulus must be prime")
        elif p is not None:
            raise UnsupportedBase(f"{kind} takes no modulus")
        self.kind = kind
        self.p = p

    def __eq__(self, other):
        return (
            isinstance(other, CoeffRing)
            and self.kind == other.kind
            and self.p == other.p
        )

    def __hash__(self):
        return hash((self.kind, self.p))

    def __repr__(self):
        return f"GF({self.p})" if self.kind == "Fp" else self.kind

    @property
    def is_field(self):
        return self.kind in ("Q", "Fp")

    def zero(self):
        return FpElem(0, self.p) if self.kind == "Fp" else 0

    def one(self):
        return FpElem(1, self.p) if self.kind == "Fp" else 1

    def from_int(self, k):
        return FpElem(k, self.p) if self.kind == "Fp" else k

    def normalize(self, v):
        # keep rationals as ints when integral so dict merges stay cheap
        if self.kind == "Q" and isinstance(v, Fraction) and v.denominator == 1:
            return int(v)
        return v

    def is_zero(self, v):
        return not v

    def is_unit(self, v):
        if self.kind == "Z":
            return v in (1, -1)
        return bool(v)

    def unit_inverse(self, v):
        if not self.is_unit(v):
            raise ZeroDivisionError(f"{v!r} is not a unit in {self!r}")
        if self.kind == "Z":
            return v
        if self.kind == "Q":
            return self.normalize(Fraction(1, 1) / v)
        return FpElem(1, self.p) / v

    def divide_exact(self, a, b):
        """a / b if it exists in the ring, else None."""
        if not b:
            return None
        if self.kind == "Q":
            return self.normalize(Fraction(a) / Fraction(b))
        if self.kind == "Z":
            return a // b if a % b == 0 else None
        return a / b

    def field_value(self, v):
        """Coerce v into a form supporting true division (fields only)."""
        if self.kind == "Q":
            return Fraction(v)
        if self.kind == "Fp":
            return v if isinstance(v, FpElem) else FpElem(v, self.p)
        raise UnsupportedBase("Z is not a field")

    def parse(self, text):
        poly = parse_expression(text, self, ())
        return poly.constant()

    def to_text(self, v):
        if self.kind == "Fp":
            return str(v.v if isinstance(v, FpElem) else v % self.p)
        return str(v)


QQ = CoeffRing("Q")
ZZ = CoeffRing("Z")

_GF_CACHE = {}


def GF(p):
    ring = _GF_CACHE.get(p)
    if ring is None:
        ring = _GF_CACHE[p] = CoeffRing("Fp", p)
    return ring


# ---------------------------------------------------------------------------
# sparse multivariate polynomials


def _deglex(key):
    return (sum(key), key)


class MultiPoly:
    """Sparse multivariate polynomial with exact coefficients.

    Terms map exponent tuples to nonzero coefficients; the zero polynomial
    has no terms.  Two polynomials are equal iff they live over the same
    ring and variables and have identical term dicts, so equality is
    representation equality of the canonical form.
    """

    __slots__ = ("ring", "vars", "terms")

    def __init__(self, ring, vars, terms, _clean=False):
        self.ring = ring
        self.vars = tuple(vars)
        if _clean:
            self.terms = terms
        else:
            self.terms = {k: ring.normalize(c) for k, c in terms.items() if c}

    @classmethod
    def zero(cls, ring, vars):
        return cls(ring, vars, {}, _clean=True)

    @classmethod
    def const(cls, ring, vars, c):
        k = (0,) * len(vars)
        return cls(ring, vars, {k: c})

    @classmethod
    def variable(cls, ring, vars, name):
        i = list(vars).index(name)
        key = tuple(1 if j == i else 0 for j in range(len(vars)))
        return cls(ring, vars, {key: ring.one()}, _clean=True)

    def _compat(self, other):
        if self.ring != other.ring or self.vars != other.vars:
            raise VariableMismatch(
                f"({self.ring!r}, {self.vars}) vs ({other.ring!r}, {other.vars})"
            )

    def _coerce(self, other):
        if isinstance(other, MultiPoly):
            self._compat(other)
            return other
        if isinstance(other, int):
            return MultiPoly.const(self.ring, self.vars, self.ring.from_int(other))
        if isinstance(other, (Fraction, FpElem)):
            return MultiPoly.const(self.ring, self.vars, other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        terms = dict(self.terms)
        norm = self.ring.normalize
        for k, c in other.terms.items():
            s = terms.get(k)
            if s is None:
                terms[k] = c
            else:
                s = norm(s + c)
                if s:
                    terms[k] = s
                else:
                    del terms[k]
        return MultiPoly(self.ring, self.vars, terms, _clean=True)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(
            self.ring, self.vars, {k: -c for k, c in self.terms.items()}, _clean=True
        )

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            if isinstance(other, (int, Fraction, FpElem)):
                if not other:
                    return MultiPoly.zero(self.ring, self.vars)
                norm = self.ring.normalize
                return MultiPoly(
                    self.ring,
                    self.vars,
                    {k: norm(c * other) for k, c in self.terms.items()},
                    _clean=True,
                )
            return NotImplemented
        self._compat(other)
        terms = {}
        norm = self.ring.normalize
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                c = c1 * c2
                s = terms.get(k)
                terms[k] = c if s is None else s + c
        return MultiPoly(
            self.ring, self.vars, {k: norm(c) for k, c in terms.items() if c},
            _clean=True,
        )

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            raise ValueError("negative power of a polynomial")
        result = MultiPoly.const(self.ring, self.vars, self.ring.one())
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, FpElem)):
            coerced = self._coerce(other)
            return self.terms == coerced.terms
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return (
            self.ring == other.ring
            and self.vars == other.vars
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.ring, self.vars, tuple(sorted(self.terms.items()))))

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self):
        return all(sum(k) == 0 for k in self.terms)

    def constant(self):
        """The constant value; raises unless the polynomial is constant."""
        if not self.terms:
            return self.ring.zero()
        if not self.is_constant():
            raise VariableMismatch(f"{self.to_text()} is not constant")
        return next(iter(self.terms.values()))

    def total_degree(self):
        return max((sum(k) for k in self.terms), default=0)

    def leading(self):
        """(exponent, coefficient) of the degree-lex leading term."""
        key = max(self.terms, key=_deglex)
        return key, self.terms[key]

    def evaluate(self, point):
        if len(point) != len(self.vars):
            raise VariableMismatch(
                f"point of length {len(point)} for vars {self.vars}"
            )
        acc = self.ring.zero()
        for k, c in self.terms.items():
            v = c
            for x, e in zip(point, k):
                if e:
                    v = v * x**e
            acc = acc + v
        return self.ring.normalize(acc)

    def substitute(self, images):
        """Substitute each variable by a polynomial from a common ring."""
        if len(images) != len(self.vars):
            raise VariableMismatch("one image per variable required")
        if not images:
            return self
        model = images[0]
        acc = MultiPoly.zero(model.ring, model.vars)
        for k, c in self.terms.items():
            v = MultiPoly.const(model.ring, model.vars, c)
            for img, e in zip(images, k):
                if e:
                    v = v * img**e
            acc = acc + v
        return acc

    def monomial_text(self, key):
        parts = []
        for name, e in zip(self.vars, key):
            if e == 1:
                parts.append(name)
            elif e > 1:
                parts.append(f"{name}^{e}")
        return "*".join(parts) if parts else "1"

    def to_text(self):
        """Canonical text, degree-lex descending, e.g. ``2*s^2-s+1``."""
        if not self.terms:
            return "0"
        out = []
        for key in sorted(self.terms, key=_deglex, reverse=True):
            c = self.terms[key]
            mono = self.monomial_text(key)
            neg = self.ring.kind != "Fp" and c < 0
            mag = -c if neg else c
            if mono == "1":
                body = self.ring.to_text(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{self.ring.to_text(mag)}*{mono}"
            if not out:
                out.append(f"-{body}" if neg else body)
            else:
                out.append(f"-{body}" if neg else f"+{body}")
        return "".join(out)

    def __repr__(self):
        return f"MultiPoly({self.to_text()!r})"


def dict_divide_exact(num, den, coeff_div):
    """Exact division of sparse term dicts under degree-lex order.

    Both dicts map equal-length exponent tuples to coefficients.  Returns
    the quotient dict, or None when the division leaves a remainder or a
    coefficient quotient does not exist.  ``coeff_div(a, b)`` must return
    None on failure.
    """
    if not den:
        return None
    if not num:
        return {}
    dkey = max(den, key=_deglex)
    dc = den[dkey]
    rem = dict(num)
    quot = {}
    while rem:
        rkey = max(rem, key=_deglex)
        qkey = tuple(a - b for a, b in zip(rkey, dkey))
        if any(e < 0 for e in qkey):
            return None
        qc = coeff_div(rem[rkey], dc)
        if qc is None or not qc:
            return None
        quot[qkey] = qc
        for k, c in den.items():
            kk = tuple(a + b for a, b in zip(qkey, k))
            s = rem.get(kk)
            s = -qc * c if s is None else s - qc * c
            if s:
                rem[kk] = s
            else:
                rem.pop(kk, None)
    return quot


class PolyRing:
    """Descriptor for a polynomial ring over a CoeffRing.

    Offers the same service surface as :class:`CoeffRing` so finite
    algebras can be based on either without caring which.
    """

    def __init__(self, coeff, vars):
        if not isinstance(coeff, CoeffRing):
            raise UnsupportedBase("polynomial scalars must be Q, Z or GF(p)")
        self.coeff = coeff
        self.vars = tuple(vars)
        if len(set(self.vars)) != len(self.vars):
            raise VariableMismatch(f"duplicate variable in {self.vars}")

    def __eq__(self, other):
        return (
            isinstance(other, PolyRing)
            and self.coeff == other.coeff
            and self.vars == other.vars
        )

    def __hash__(self):
        return hash((self.coeff, self.vars))

    def __repr__(self):
        return f"{self.coeff!r}[{', '.join(self.vars)}]"

    @property
    def is_field(self):
        return False

    def zero(self):
        return MultiPoly.zero(self.coeff, self.vars)

    def one(self):
        return MultiPoly.const(self.coeff, self.vars, self.coeff.one())

    def from_int(self, k):
        return MultiPoly.const(self.coeff, self.vars, self.coeff.from_int(k))

    def embed_scalar(self, c):
        return MultiPoly.const(self.coeff, self.vars, c)

    def variable(self, name):
        return MultiPoly.variable(self.coeff, self.vars, name)

    def normalize(self, v):
        return v

    def is_zero(self, v):
        return not v

    def is_unit(self, v):
        return v.is_constant() and self.coeff.is_unit(v.constant())

    def unit_inverse(self, v):
        if not self.is_unit(v):
            raise ZeroDivisionError(f"{v.to_text()} is not a unit in {self!r}")
        return self.embed_scalar(self.coeff.unit_inverse(v.constant()))

    def divide_exact(self, a, b):
        quot = dict_divide_exact(a.terms, b.terms, self.coeff.divide_exact)
        if quot is None:
            return None
        return MultiPoly(self.coeff, self.vars, quot)

    def parse(self, text):
        return parse_expression(text, self.coeff, self.vars)

    def to_text(self, v):
        return v.to_text()


# ---------------------------------------------------------------------------
# expression parsing (coefficient strings like "3/4", "2*s+1", "-(t^2-1)")


_TOKEN_CHARS = set("+-*/^() \t")


def _tokenize(text):
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch in " \t":
            i += 1
        elif ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            tokens.append(("num", int(text[i:j])))
            i = j
        elif ch.isalpha() or ch == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("name", text[i:j]))
            i = j
        elif text.startswith("**", i):
            tokens.append(("op", "^"))
            i += 2
        elif ch in _TOKEN_CHARS:
            tokens.append(("op", ch))
            i += 1
        else:
            raise ParseError(f"unexpected character {ch!r} in {text!r}")
    return tokens


class _ExprParser:
    def __init__(self, tokens, ring, vars):
        self.tokens = tokens
        self.pos = 0
        self.ring = ring
        self.vars = tuple(vars)

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def expect_op(self, op):
        kind, val = self.take()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}, got {val!r}")

    def parse(self):
        poly = self.expr()
        if self.pos != len(self.tokens):
            raise ParseError(f"trailing input at token {self.pos}")
        return poly

    def expr(self):
        kind, val = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            acc = self.term()
            if val == "-":
                acc = -acc
        else:
            acc = self.term()
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                rhs = self.term()
                acc = acc + rhs if val == "+" else acc - rhs
            else:
                return acc

    def term(self):
        acc = self.factor()
        while True:
            kind, val = self.peek()
            if kind == "op" and val == "*":
                self.take()
                acc = acc * self.factor()
            elif kind == "op" and val == "/":
                self.take()
                div = self.factor()
                if not div.is_constant():
                    raise ParseError("division only by constants")
                c = div.constant()
                if not c:
                    raise ParseError("division by zero")
                if self.ring.kind == "Q":
                    acc = acc * self.ring.normalize(Fraction(1) / Fraction(c))
                elif self.ring.kind == "Fp":
                    acc = acc * (FpElem(1, self.ring.p) / c)
                else:
                    inv = self.ring.divide_exact(self.ring.one(), c)
                    if inv is None:
                        raise ParseError(f"cannot divide by {c} over {self.ring!r}")
                    acc = acc * inv
            else:
                return acc

    def factor(self):
        kind, val = self.peek()
        if kind == "op" and val == "-":
            self.take()
            return -self.factor()
        base = self.atom()
        kind, val = self.peek()
        if kind == "op" and val == "^":
            self.take()
            kind, k = self.take()
            if kind != "num":
                raise ParseError("exponent must be a literal integer")
            return base**k
        return base

    def atom(self):
        kind, val = self.take()
        if kind == "num":
            return MultiPoly.const(self.ring, self.vars, self.ring.from_int(val))
        if kind == "name":
            if val not in self.vars:
                raise ParseError(f"unknown variable {val!r} (have {self.vars})")
            return MultiPoly.variable(self.ring, self.vars, val)
        if kind == "op" and val == "(":
            inner = self.expr()
            self.expect_op(")")
            return inner
        raise ParseError(f"unexpected token {val!r}")


def parse_expression(text, ring, vars):
    """Parse a polynomial expression over a CoeffRing and variable list."""
    if not isinstance(text, str):
        raise ParseError(f"expected string expression, got {type(text).__name__}")
    tokens = _tokenize(text)
    if not tokens:
        raise ParseError("empty expression")
    return _ExprParser(tokens, ring, vars).parse()


# ---------------------------------------------------------------------------
# matrices over a commutative ring (values support + - * and ==)


def det_generic(rows):
    """Division-free determinant via expansion over column subsets.

    Works over any commutative ring whose values implement +, *, unary -.
    Cost is O(2^n n), fine for the ranks handled here (n <= 8).
    """
    n = len(rows)
    if n == 0 or any(len(r) != n for r in rows):
        raise ValueError("square nonempty matrix required")
    cur = {1 << j: rows[0][j] for j in range(n)}
    for r in range(1, n):
        row = rows[r]
        nxt = {}
        for mask, minor in cur.items():
            for j in range(n):
                bit = 1 << j
                if mask & bit:
                    continue
                below = (mask & (bit - 1)).bit_count()
                term = row[j] * minor
                if (r + below) % 2:
                    term = -term
                key = mask | bit
                acc = nxt.get(key)
                nxt[key] = term if acc is None else acc + term
        cur = nxt
    return cur[(1 << n) - 1]


def _minor(rows, i, j):
    return [
        [rows[r][c] for c in range(len(rows)) if c != j]
        for r in range(len(rows))
        if r != i
    ]


def adjugate(rows):
    """Adjugate matrix: adj(M) M = det(M) I, division-free."""
    n = len(rows)
    if n == 1:
        raise ValueError("adjugate of a 1x1 matrix needs a ring one; use det")
    adj = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            d = det_generic(_minor(rows, i, j))
            adj[j][i] = -d if (i + j) % 2 else d
    return adj


def solve_adjugate(rows, vec, scalars):
    """Solve M x = vec where det(M) is a unit of the scalar ring.

    Returns the solution list, or None when det(M) is not a unit.
    """
    n = len(rows)
    det = det_generic(rows)
    if not scalars.is_unit(det):
        return None
    inv = scalars.unit_inverse(det)
    if n == 1:
        return [scalars.normalize(inv * vec[0])]
    adj = adjugate(rows)
    out = []
    for i in range(n):
        acc = adj[i][0] * vec[0]
        for j in range(1, n):
            acc = acc + adj[i][j] * vec[j]
        out.append(scalars.normalize(inv * acc))
    return out


def _field_rref(aug, ring, width):
    """Row-reduce in place over a field; returns pivot column list."""
    rows = len(aug)
    pivots = []
    r = 0
    for c in range(width):
        pr = next((i for i in range(r, rows) if aug[i][c]), None)
        if pr is None:
            continue
        aug[r], aug[pr] = aug[pr], aug[r]
        inv = ring.field_value(ring.one()) / aug[r][c]
        aug[r] = [x * inv for x in aug[r]]
        for i in range(rows):
            if i != r and aug[i][c]:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return pivots


def field_solve(A, b, ring):
    """One solution of A x = b over a field, or None if inconsistent."""
    m = len(A)
    n = len(A[0]) if m else 0
    fv = ring.field_value
    aug = [[fv(x) for x in row] + [fv(y)] for row, y in zip(A, b)]
    pivots = _field_rref(aug, ring, n)
    rank = len(pivots)
    for i in range(rank, m):
        if aug[i][n]:
            return None
    x = [fv(ring.zero())] * n
    for r, c in enumerate(pivots):
        x[c] = aug[r][n]
    return [ring.normalize(v) for v in x]


def field_nullspace(A, ring):
    """Basis of the nullspace of A over a field."""
    m = len(A)
    n = len(A[0]) if m else 0
    fv = ring.field_value
    mat = [[fv(x) for x in row] for row in A]
    pivots = _field_rref(mat, ring, n)
    pivot_set = set(pivots)
    basis = []
    one = fv(ring.one())
    for free in range(n):
        if free in pivot_set:
            continue
        vec = [fv(ring.zero())] * n
        vec[free] = one
        for r, c in enumerate(pivots):
            vec[c] = -mat[r][free]
        basis.append([ring.normalize(v) for v in vec])
    return basis


def field_mat_mul(A, B, ring):
    n, k, m = len(A), len(B), len(B[0]) if B else 0
    fv = ring.field_value
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = fv(ring.zero())
            for t in range(k):
                acc = acc + fv(A[i][t]) * fv(B[t][j])
            row.append(ring.normalize(acc))
        out.append(row)
    return out


# ---------------------------------------------------------------------------
# finite free commutative algebras


class AlgebraElem:
    """Element of a FiniteFreeAlgebra, a coordinate vector with operators."""

    __slots__ = ("alg", "coords")

    def __init__(self, alg, coords):
        self.alg = alg
        self.coords = tuple(coords)

    def _compat(self, other):
        if isinstance(other, AlgebraElem):
            if other.alg is self.alg or other.alg == self.alg:
                return other
            raise RingMismatch("elements of different algebras")
        if isinstance(other, int):
            return self.alg.from_int(other)
        return None

    def __add__(self, other):
        other = self._compat(other)
        if other is None:
            return NotImplemented
        return AlgebraElem(self.alg, [a + b for a, b in zip(self.coords, other.coords)])

    __radd__ = __add__

    def __neg__(self):
        return AlgebraElem(self.alg, [-a for a in self.coords])

    def __sub__(self, other):
        other = self._compat(other)
        if other is None:
            return NotImplemented
        return AlgebraElem(self.alg, [a - b for a, b in zip(self.coords, other.coords)])

    def __rsub__(self, other):
        other = self._compat(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        coerced = self._compat(other)
        if coerced is not None:
            return AlgebraElem(self.alg, self.alg.mul_vec(self.coords, coerced.coords))
        # base scalar action
        return AlgebraElem(self.alg, [self.alg._scale(other, a) for a in self.coords])

    def __rmul__(self, other):
        return self.__mul__(other)

    def __pow__(self, k):
        acc = self.alg.one()
        base = self
        while k:
            if k & 1:
                acc = acc * base
            base = base * base
            k >>= 1
        return acc

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.alg.from_int(other)
        if not isinstance(other, AlgebraElem):
            return NotImplemented
        return self.alg == other.alg and self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    def __bool__(self):
        return any(bool(c) for c in self.coords)

    def __repr__(self):
        return f"AlgebraElem({self.alg.to_text(self)})"


class FiniteFreeAlgebra:
    """Commutative unital algebra, free of finite rank over its base.

    ``structure[i][j]`` lists the coordinates of e_i * e_j in the basis
    e_1..e_rank; ``unit`` is the coordinate vector of 1.  Construction
    validates commutativity, associativity and the unit law exhaustively
    over basis elements, which pins down the laws on everything by
    bilinearity.
    """

    _SCALAR_PROTOCOL = ("zero", "one", "from_int", "normalize", "is_zero")

    def __init__(self, base, rank, structure, unit):
        # any scalar descriptor will do; isinstance would shut out wrappers
        if not all(callable(getattr(base, m, None)) for m in self._SCALAR_PROTOCOL):
            raise UnsupportedBase(f"unsupported base {base!r}")
        if rank < 1:
            raise UnsupportedBase("rank must be >= 1")
        self.base = base
        self.rank = rank
        self.structure = tuple(
            tuple(tuple(base.normalize(c) for c in structure[i][j]) for j in range(rank))
            for i in range(rank)
        )
        self.unit = tuple(base.normalize(c) for c in unit)
        bad = [
            (i, j)
            for i in range(rank)
            for j in range(rank)
            if len(self.structure[i][j]) != rank
        ]
        if bad or len(self.unit) != rank:
            raise UnsupportedBase("structure/unit dimensions do not match rank")
        self._pairs = tuple(
            tuple(
                tuple((k, c) for k, c in enumerate(self.structure[i][j]) if c)
                for j in range(rank)
            )
            for i in range(rank)
        )
        self._validate()

    # -- scalar-descriptor surface, so an algebra can be a base itself

    @property
    def is_field(self):
        return False

    def zero(self):
        return AlgebraElem(self, [self.base.zero()] * self.rank)

    def one(self):
        return AlgebraElem(self, self.unit)

    def from_int(self, k):
        kk = self.base.from_int(k)
        return AlgebraElem(self, [self._scale(kk, c) for c in self.unit])

    def normalize(self, v):
        return v

    def is_zero(self, v):
        return not v

    def parse(self, text):
        raise UnsupportedBase("algebra elements are not parsed from text")

    def to_text(self, v):
        coords = v.coords if isinstance(v, AlgebraElem) else v
        return "(" + ", ".join(self.base.to_text(c) for c in coords) + ")"

    def is_unit(self, v):
        return self.base.is_unit(det_generic(self.mult_matrix(v)))

    def unit_inverse(self, v):
        sol = solve_adjugate(self.mult_matrix(v), list(self.unit), self.base)
        if sol is None:
            raise ZeroDivisionError(f"{self.to_text(v)} is not a unit")
        return AlgebraElem(self, sol)

    def divide_exact(self, a, b):
        """a / b when unique, via the multiplication matrix of b."""
        av = a.coords if isinstance(a, AlgebraElem) else tuple(a)
        M = self.mult_matrix(b)
        if isinstance(self.base, CoeffRing) and self.base.is_field:
            sol = field_solve(M, list(av), self.base)
        else:
            sol = solve_adjugate(M, list(av), self.base)
        return None if sol is None else AlgebraElem(self, sol)

    # -- algebra proper

    def _scale(self, c, v):
        return self.base.normalize(c * v)

    def element(self, coords):
        coords = tuple(self.base.normalize(c) for c in coords)
        if len(coords) != self.rank:
            raise UnsupportedBase(f"expected {self.rank} coordinates")
        return AlgebraElem(self, coords)

    def basis_elem(self, i):
        zero, one = self.base.zero(), self.base.one()
        return AlgebraElem(self, [one if j == i else zero for j in range(self.rank)])

    def mul_vec(self, u, v):
        zero = self.base.zero()
        out = [zero] * self.rank
        norm = self.base.normalize
        for i, a in enumerate(u):
            if not a:
                continue
            row = self._pairs[i]
            for j, b in enumerate(v):
                if not b:
                    continue
                ab = a * b
                for k, c in row[j]:
                    out[k] = out[k] + ab * c
        return [norm(x) for x in out]

    def mult_matrix(self, e):
        """Matrix of multiplication by e; column k is e * e_k."""
        coords = e.coords if isinstance(e, AlgebraElem) else tuple(e)
        cols = [self.mul_vec(coords, self.basis_elem(k).coords) for k in range(self.rank)]
        return [[cols[k][i] for k in range(self.rank)] for i in range(self.rank)]

    def trace(self, e):
        M = self.mult_matrix(e)
        acc = M[0][0]
        for i in range(1, self.rank):
            acc = acc + M[i][i]
        return self.base.normalize(acc)

    def det_norm(self, e):
        return self.base.normalize(det_generic(self.mult_matrix(e)))

    def _validate(self):
        n = self.rank
        for i in range(n):
            for j in range(i + 1, n):
                if self.structure[i][j] != self.structure[j][i]:
                    raise NonCommutative(f"e{i + 1}*e{j + 1} != e{j + 1}*e{i + 1}")
        for j in range(n):
            e_j = self.basis_elem(j).coords
            if tuple(self.mul_vec(self.unit, e_j)) != e_j:
                raise BadUnit(f"unit * e{j + 1} != e{j + 1}")
        for i in range(n):
            e_i = self.basis_elem(i).coords
            for j in range(n):
                ij = self.mul_vec(e_i, self.basis_elem(j).coords)
                for k in range(n):
                    e_k = self.basis_elem(k).coords
                    left = self.mul_vec(ij, e_k)
                    right = self.mul_vec(e_i, self.mul_vec(self.basis_elem(j).coords, e_k))
                    if left != right:
                        raise NonAssociative(
                            f"(e{i + 1}*e{j + 1})*e{k + 1} != e{i + 1}*(e{j + 1}*e{k + 1})"
                        )

    def __eq__(self, other):
        if not isinstance(other, FiniteFreeAlgebra):
            return NotImplemented
        return (
            self.base == other.base
            and self.rank == other.rank
            and self.structure == other.structure
            and self.unit == other.unit
        )

    def __hash__(self):
        return hash((self.base, self.rank))

    def __repr__(self):
        return f"FiniteFreeAlgebra(base={self.base!r}, rank={self.rank})"


def make_finite_algebra(base, rank, structure, unit):
    """Build and validate a finite free algebra from structure constants."""
    return FiniteFreeAlgebra(base, rank, structure, unit)


class AlgebraMap:
    """Algebra homomorphism from a polynomial ring into a finite algebra.

    Determined by one target element per source variable; evaluation sends
    each monomial to the product of the images, which is multiplicative by
    construction.  A short fixed spot-check at build time guards against a
    target whose own arithmetic is inconsistent.
    """

    def __init__(self, source, target, images):
        if not isinstance(source, PolyRing):
            raise UnsupportedBase("source must be a polynomial ring")
        self.source = source
        self.target = target
        self.images = tuple(
            img if isinstance(img, AlgebraElem) else target.element(img)
            for img in images
        )
        if len(self.images) != len(source.vars):
            raise VariableMismatch("one image per source variable required")
        self._embed = _scalar_embedding(source.coeff, target.base)
        if self(self.source.one()) != target.one():
            raise RingMismatch("map does not send 1 to 1")
        if source.vars:
            v = source.variable(source.vars[0])
            if self((v + 1) * v) != (self(v) + target.one()) * self(v):
                raise RingMismatch("map fails multiplicativity spot-check")

    def __call__(self, poly):
        if poly.vars != self.source.vars or poly.ring != self.source.coeff:
            raise VariableMismatch("polynomial from a different source ring")
        acc = self.target.zero()
        for k, c in poly.terms.items():
            v = self.target.one() * self._embed(c)
            for img, e in zip(self.images, k):
                if e:
                    v = v * img**e
            acc = acc + v
        return acc


def _scalar_embedding(coeff, base):
    """Embedding of a CoeffRing into a base descriptor, or RingMismatch."""
    if isinstance(base, CoeffRing):
        if base != coeff:
            raise RingMismatch(f"cannot embed {coeff!r} into {base!r}")
        return lambda c: c
    if isinstance(base, PolyRing):
        if base.coeff != coeff:
            raise RingMismatch(f"cannot embed {coeff!r} into {base!r}")
        return base.embed_scalar
    if isinstance(base, FiniteFreeAlgebra):
        inner = _scalar_embedding(coeff, base.base)
        return lambda c: base.one() * inner(c)
    raise UnsupportedBase(f"no embedding into {base!r}")
