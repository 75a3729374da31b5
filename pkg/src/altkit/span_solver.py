"""Coordinates over the inverted alternator square.

Once the square of the alternator of a fixed tuple x is inverted, the
co-projections of the x_i into the last slot form a free basis of the
partially-invariant subring over the fully-invariant one.  This module
carries the fraction arithmetic for that localization and the coordinate
formulas: slot substitution for ring elements, signed drop-a-slot
expansion for invariant tensors, structure constants of the basis, and
the adjugate argument that bounds torsion in a claimed linear relation.

Fractions are pairs (numerator tensor, power of the alternator square).
Equality is by cross-multiplication, which is only sound when the
ambient tensor power is a domain; construction therefore requires a
polynomial ambient over Q, Z or a prime field.  Multiplication divides
out common alternator-square factors eagerly so exponents stay small.
"""

from __future__ import annotations

from dataclasses import dataclass

from .alternator import AlternatorInstance, alpha, alpha_map
from .errors import (
    ContextMismatch,
    LevelMismatch,
    NotInvariant,
    RelationDoesNotHold,
    UnsupportedAmbient,
)
from .ring_core import FiniteFreeAlgebra, dict_divide_exact
from .tensor_algebra import (
    Tensor,
    coprojection,
    is_sym_n11,
    is_symmetric,
    unit_tensor,
)

__all__ = [
    "LocalizedElem",
    "CoordinateVector",
    "tensor_divide_exact",
    "coordinates",
    "coordinates_of_invariant",
    "structure_constants_R",
    "r_algebra",
    "verify_independence",
    "LocalizedScalars",
]

LEVEL_FULL = "A"
LEVEL_PARTIAL = "R"


def _require_poly_domain(space):
    if not space.is_poly:
        raise UnsupportedAmbient(
            "localized arithmetic needs a polynomial ambient ring"
        )
    if space.scalars.kind not in ("Q", "Z", "Fp"):
        raise UnsupportedAmbient(f"unsupported scalars {space.scalars!r}")


def tensor_divide_exact(num, den):
    """num / den in the ambient tensor power, or None; exact only."""
    _require_poly_domain(num.space)
    num._compat(den)
    quot = dict_divide_exact(num.terms, den.terms, num.space.scalars.divide_exact)
    if quot is None:
        return None
    return Tensor(num.space, quot)


def _asq_power(ctx, k):
    # small cache of alternator-square powers on the context; a published
    # list is never mutated, so concurrent readers cannot see a torn state
    powers = getattr(ctx, "_asq_powers", None)
    if powers is None:
        powers = [unit_tensor(ctx.space), ctx.alpha_sq]
    if len(powers) <= k:
        powers = list(powers)
        while len(powers) <= k:
            powers.append(powers[-1] * ctx.alpha_sq)
    ctx._asq_powers = powers
    return powers[k]


class LocalizedElem:
    """numerator / alpha_sq(x)^exp at a declared invariance level.

    Level "A" asserts a fully invariant numerator, level "R" one that is
    invariant in the first n-1 slots.  Addition insists on equal levels;
    promote() moves A into R explicitly.  Multiplication is defined for
    any level pair and lands in the finer of the two.
    """

    __slots__ = ("ctx", "level", "num", "exp")

    def __init__(self, ctx, level, num, exp, _checked=False):
        if level not in (LEVEL_FULL, LEVEL_PARTIAL):
            raise LevelMismatch(f"unknown level {level!r}")
        _require_poly_domain(ctx.space)
        if num.space != ctx.space:
            raise ContextMismatch("numerator from a different tensor power")
        if exp < 0:
            raise UnsupportedAmbient("negative exponent")
        if not _checked:
            if level == LEVEL_FULL and not is_symmetric(num):
                raise NotInvariant("numerator is not fully invariant")
            if level == LEVEL_PARTIAL and not is_sym_n11(num):
                raise NotInvariant("numerator is not invariant in the first n-1 slots")
        if not num:
            exp = 0
        self.ctx = ctx
        self.level = level
        self.num = num
        self.exp = exp

    @classmethod
    def from_scalar(cls, ctx, c, level=LEVEL_FULL):
        return cls(ctx, level, unit_tensor(ctx.space).scale(c), 0, _checked=True)

    @classmethod
    def zero(cls, ctx, level=LEVEL_FULL):
        return cls(ctx, level, ctx.space.zero(), 0, _checked=True)

    def _compat(self, other):
        if not isinstance(other, LocalizedElem):
            raise ContextMismatch(f"expected a localized element, got {other!r}")
        if self.ctx is not other.ctx and self.ctx != other.ctx:
            raise ContextMismatch("fractions over different anchor tuples")

    def promote(self):
        """View an A-level fraction at R level."""
        if self.level == LEVEL_PARTIAL:
            return self
        return LocalizedElem(self.ctx, LEVEL_PARTIAL, self.num, self.exp, _checked=True)

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        self._compat(other)
        if self.level != other.level:
            raise LevelMismatch(
                f"{self.level}-level plus {other.level}-level; promote() first"
            )
        m = max(self.exp, other.exp)
        a = self.num * _asq_power(self.ctx, m - self.exp) if m > self.exp else self.num
        b = (
            other.num * _asq_power(self.ctx, m - other.exp)
            if m > other.exp
            else other.num
        )
        return LocalizedElem(self.ctx, self.level, a + b, m, _checked=True)

    __radd__ = __add__

    def __neg__(self):
        return LocalizedElem(self.ctx, self.level, -self.num, self.exp, _checked=True)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, LocalizedElem):
            # scalar action
            return LocalizedElem(
                self.ctx, self.level, self.num.scale(other), self.exp, _checked=True
            )
        self._compat(other)
        level = (
            LEVEL_FULL
            if self.level == other.level == LEVEL_FULL
            else LEVEL_PARTIAL
        )
        out = LocalizedElem(
            self.ctx, level, self.num * other.num, self.exp + other.exp, _checked=True
        )
        return out.normalize()

    __rmul__ = __mul__

    def normalize(self):
        """Strip alternator-square factors from the numerator, exactly."""
        num, exp = self.num, self.exp
        if not num:
            return LocalizedElem(self.ctx, self.level, num, 0, _checked=True)
        asq = self.ctx.alpha_sq
        while exp > 0:
            quot = tensor_divide_exact(num, asq)
            if quot is None:
                break
            num, exp = quot, exp - 1
        if exp == self.exp:
            return self
        return LocalizedElem(self.ctx, self.level, num, exp, _checked=True)

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.num
        if not isinstance(other, LocalizedElem):
            return NotImplemented
        self._compat(other)
        a = self.num * _asq_power(self.ctx, other.exp)
        b = other.num * _asq_power(self.ctx, self.exp)
        return a == b

    def __bool__(self):
        return bool(self.num)

    def to_text(self):
        if self.exp == 0:
            return self.num.to_text()
        return f"({self.num.to_text()}) / asq^{self.exp}"

    def __repr__(self):
        return f"LocalizedElem({self.level}, {self.to_text()!r})"


@dataclass
class CoordinateVector:
    """Coordinates of an element in the co-projection basis."""

    ctx: AlternatorInstance
    entries: tuple

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def __len__(self):
        return len(self.entries)


def coordinates(ctx, z):
    """Coordinates of the last-slot co-projection of a ring element.

    Entry i is the alternator of x with slot i replaced by z, times the
    alternator of x, over the alternator square.  The defining expansion
    is re-checked exactly before returning.
    """
    _require_poly_domain(ctx.space)
    space = ctx.space
    z = space.as_element(z)
    entries = []
    lhs = space.zero()
    for i in range(1, space.n + 1):
        num = alpha(space, ctx.x_replaced(i, z)) * ctx.alpha_x
        entries.append(LocalizedElem(ctx, LEVEL_FULL, num, 1, _checked=True))
        lhs = lhs + num * ctx.phi_n_x[i - 1]
    target = coprojection(space, space.n, z) * ctx.alpha_sq
    assert lhs == target, "coordinate expansion failed to reconstruct the input"
    return CoordinateVector(ctx=ctx, entries=tuple(e.normalize() for e in entries))


def coordinates_of_invariant(ctx, y):
    """Coordinates of a partially invariant tensor in the same basis.

    Entry i carries sign (-1)^(n-i) on the alternator of x with slot i
    dropped, multiplied by y, under the full alternating sum.
    """
    _require_poly_domain(ctx.space)
    space = ctx.space
    if not is_sym_n11(y):
        raise NotInvariant("input must be invariant in the first n-1 slots")
    n = space.n
    entries = []
    lhs = space.zero()
    for i in range(1, n + 1):
        num = alpha_map(ctx.x_dropped(i) * y) * ctx.alpha_x
        if (n - i) % 2:
            num = -num
        entries.append(LocalizedElem(ctx, LEVEL_FULL, num, 1, _checked=True))
        lhs = lhs + num * ctx.phi_n_x[i - 1]
    assert lhs == y * ctx.alpha_sq, "invariant expansion failed to reconstruct"
    return CoordinateVector(ctx=ctx, entries=tuple(e.normalize() for e in entries))


def structure_constants_R(ctx):
    """Structure constants of the co-projection basis, as fractions.

    constants[i][j][k] is coordinate k of x_i * x_j; the table is
    symmetric in (i, j) because the ambient ring is commutative.
    """
    _require_poly_domain(ctx.space)
    n = ctx.space.n
    table = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            coords = coordinates(ctx, ctx.x[i] * ctx.x[j])
            table[i][j] = tuple(coords.entries)
            table[j][i] = table[i][j]
    return tuple(tuple(row) for row in table)


class LocalizedScalars:
    """Scalar-descriptor view of the localized invariants of a context.

    Lets the finite-algebra machinery run its exhaustive validator with
    localized fractions as the base scalars.
    """

    is_field = False

    def __init__(self, ctx):
        _require_poly_domain(ctx.space)
        self.ctx = ctx

    def zero(self):
        return LocalizedElem.zero(self.ctx)

    def one(self):
        return LocalizedElem.from_scalar(self.ctx, self.ctx.space.scalars.one())

    def from_int(self, k):
        return LocalizedElem.from_scalar(self.ctx, self.ctx.space.scalars.from_int(k))

    def normalize(self, v):
        return v.normalize()

    def is_zero(self, v):
        return not v

    def is_unit(self, v):
        raise UnsupportedAmbient("no unit test for localized scalars")

    def parse(self, text):
        raise UnsupportedAmbient("localized scalars are not parsed from text")

    def to_text(self, v):
        return v.to_text()

    def __eq__(self, other):
        return isinstance(other, LocalizedScalars) and self.ctx == other.ctx

    def __hash__(self):
        return hash((id(type(self)), self.ctx.space.n))


def r_algebra(ctx):
    """The co-projection basis as a validated finite free algebra.

    Runs the same commutativity/associativity/unit validator as any other
    structure-constant algebra, with localized fractions for scalars.
    """
    constants = structure_constants_R(ctx)
    unit_coords = coordinates(ctx, ctx.space.ring.one())
    return FiniteFreeAlgebra(
        LocalizedScalars(ctx), ctx.space.n, constants, tuple(unit_coords.entries)
    )


def verify_independence(ctx, relation):
    """Check a claimed relation sum(a_i phi_n(x_i)) = 0 and bound torsion.

    Each coefficient must be fully invariant.  The adjugate of the
    co-projection matrix turns the relation into alpha(x) * a_i = 0, so
    every coefficient must die after multiplying by at most two powers of
    the alternator; returns True exactly when all of them do.
    """
    space = ctx.space
    if len(relation) != space.n:
        raise RelationDoesNotHold(f"expected {space.n} coefficients")
    for a in relation:
        if not is_symmetric(a):
            raise NotInvariant("relation coefficients must be fully invariant")
    total = space.zero()
    for a, phi in zip(relation, ctx.phi_n_x):
        total = total + a * phi
    if total:
        raise RelationDoesNotHold(
            f"claimed relation has nonzero value {total.to_text()}"
        )
    for a in relation:
        if not a:
            continue
        if not (a * ctx.alpha_x) or not (a * ctx.alpha_sq):
            continue
        return False
    return True
