"""Blow-up fractions and the norm map past non-invertible discriminants.

When the discriminant is a nonzerodivisor but not a unit, dividing by it
outright is no longer available.  The fix is to shrink the source to the
subring generated by pair fractions: products of two alternators over one
power of the alternator square.  Those generators map to trace-pairing
determinants over one power of the discriminant, and every division that
the theory promises is performed by exact solving, never by inverting.

The quotient that makes the discriminant a nonzerodivisor is computed
explicitly: for a finite-dimensional base the annihilator of all powers
of the discriminant is stabilized kernel linear algebra, and the quotient
ring is rebuilt with its own validated structure constants.  A separate
probe decides repeated-point support through vanishing of evaluation
determinants, the blow-up's degenerate locus in coordinates.
"""

from __future__ import annotations

import itertools

from .errors import (
    ArityMismatch,
    ContextMismatch,
    DivisionFails,
    LevelMismatch,
    NotGenericallyEtale,
    PreconditionViolated,
    UnsupportedAmbient,
    UnsupportedBase,
)
from .norm_universal import (
    alternator_pair_presentation,
    trace_pairing_det,
    vector_text,
)
from .alternator import Witness, alpha
from .ring_core import (
    CoeffRing,
    FiniteFreeAlgebra,
    PolyRing,
    _field_rref,
    _scalar_embedding,
    det_generic,
    field_mat_mul,
    field_nullspace,
)
from .span_solver import LEVEL_FULL, LocalizedElem, coordinates
from .tensor_algebra import unit_tensor

__all__ = [
    "ReesFraction",
    "rees_one",
    "rees_pair",
    "rees_from_localized",
    "canonical_generators",
    "is_nonzerodivisor",
    "is_generically_etale",
    "BPlus",
    "b_plus",
    "NormMapPlus",
    "make_norm_map_plus",
    "verify_pullback_plus",
    "diagonal_support_probe",
]


# ---------------------------------------------------------------------------
# formal pair fractions


class ReesFraction:
    """Signed sum of alternator-pair products over one square power.

    Each term is a coefficient and a tuple of m pairs of anchor-length
    tuples; the term stands for the product of the pair alternators over
    the m-th power of the alternator square.  All terms share m: addition
    pads the shorter side with the anchor pair, which is exactly 1.
    """

    __slots__ = ("ctx", "m", "terms")

    def __init__(self, ctx, m, terms):
        self.ctx = ctx
        self.m = m
        cleaned = []
        for c, pairs in terms:
            if not c:
                continue
            if len(pairs) != m:
                raise ArityMismatch(f"term has {len(pairs)} pairs, expected {m}")
            cleaned.append((c, tuple((tuple(y), tuple(z)) for y, z in pairs)))
        self.terms = tuple(cleaned)

    def _compat(self, other):
        if not isinstance(other, ReesFraction):
            raise ContextMismatch(f"expected a pair fraction, got {other!r}")
        if self.ctx is not other.ctx and self.ctx != other.ctx:
            raise ContextMismatch("fractions over different anchor tuples")

    def _padded(self, k):
        if k == 0:
            return self.terms
        pad = ((self.ctx.x, self.ctx.x),) * k
        return tuple((c, pairs + pad) for c, pairs in self.terms)

    def __add__(self, other):
        self._compat(other)
        m = max(self.m, other.m)
        return ReesFraction(
            self.ctx, m, self._padded(m - self.m) + other._padded(m - other.m)
        )

    def __neg__(self):
        return ReesFraction(self.ctx, self.m, [(-c, p) for c, p in self.terms])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, ReesFraction):
            return self.scale(other)
        self._compat(other)
        terms = [
            (c1 * c2, p1 + p2)
            for c1, p1 in self.terms
            for c2, p2 in other.terms
        ]
        return ReesFraction(self.ctx, self.m + other.m, terms)

    __rmul__ = __mul__

    def scale(self, c):
        return ReesFraction(self.ctx, self.m, [(c * c0, p) for c0, p in self.terms])

    def expand(self):
        """The fraction as a localized element; polynomial ambients only."""
        space = self.ctx.space
        num = space.zero()
        for c, pairs in self.terms:
            prod = unit_tensor(space)
            for ys, zs in pairs:
                prod = prod * (alpha(space, ys) * alpha(space, zs))
            num = num + prod.scale(c)
        return LocalizedElem(self.ctx, LEVEL_FULL, num, self.m, _checked=True)

    def equal_in_A(self, other):
        """Equality after expansion, by cross-multiplication."""
        self._compat(other)
        return self.expand() == other.expand()

    def to_text(self):
        if not self.terms:
            return "0"
        space = self.ctx.space
        ring = space.ring

        def tup(t):
            return ", ".join(ring.to_text(v) for v in t)

        parts = []
        for c, pairs in self.terms:
            factors = "*".join(f"a({tup(y)})*a({tup(z)})" for y, z in pairs)
            parts.append(f"{space.scalars.to_text(c)}*{factors}")
        joined = " + ".join(parts)
        return f"({joined}) / asq^{self.m}"

    def __repr__(self):
        return f"ReesFraction({self.to_text()!r})"


def rees_one(ctx):
    """The anchor pair over one square power: the unit fraction."""
    one = ctx.space.scalars.one()
    return ReesFraction(ctx, 1, [(one, ((ctx.x, ctx.x),))])


def rees_pair(ctx, ys, zs):
    """A single pair fraction alpha(y)alpha(z) over one square power."""
    space = ctx.space
    if len(ys) != space.n or len(zs) != space.n:
        raise ArityMismatch(f"pair tuples must have length {space.n}")
    ys = tuple(space.as_element(y) for y in ys)
    zs = tuple(space.as_element(z) for z in zs)
    return ReesFraction(ctx, 1, [(space.scalars.one(), ((ys, zs),))])


def rees_from_localized(ctx, le):
    """Rewrite an invariant element through pair generators, verified.

    Only fractions that normalize to exponent zero rewrite: padding with
    the anchor pair scales the numerator along with the power, so a
    leftover square in the denominator cannot be traded for extra pairs.
    Term by term the numerator times the anchor alternator is a sum of
    plain alternators; each becomes one pair with the anchor.
    """
    if le.level != LEVEL_FULL:
        raise UnsupportedAmbient("only fully invariant fractions rewrite")
    if le.ctx is not ctx and le.ctx != ctx:
        raise ContextMismatch("fraction over a different anchor tuple")
    le = le.normalize()
    if le.exp:
        raise PreconditionViolated(
            "fraction keeps a square power after normalizing; "
            "no pair rewriting exists"
        )
    terms = [
        (c, ((ctx.x, w),))
        for c, w in alternator_pair_presentation(ctx, le.num)
    ]
    out = ReesFraction(ctx, 1, terms)
    assert out.expand() == le, "pair rewriting changed the fraction"
    return out


def canonical_generators(ctx, tuples=()):
    """Pair generators anchored at x: the unit pair first, then (x, w)."""
    gens = [rees_one(ctx)]
    for w in tuples:
        gens.append(rees_pair(ctx, ctx.x, w))
    return gens


# ---------------------------------------------------------------------------
# nonzerodivisor test and the saturated quotient


def is_nonzerodivisor(desc, v):
    """Multiplication by v is injective on the ring described by desc."""
    if isinstance(desc, (CoeffRing, PolyRing)):
        # scalar and polynomial rings here are all domains
        return not desc.is_zero(v)
    if isinstance(desc, FiniteFreeAlgebra):
        return is_nonzerodivisor(desc.base, det_generic(desc.mult_matrix(v)))
    raise UnsupportedBase(f"no zerodivisor test for {desc!r}")


def is_generically_etale(inst):
    """The instance discriminant is a nonzerodivisor in the base."""
    return is_nonzerodivisor(inst.E.base, inst.d)


class BPlus:
    """The base ring modulo everything some discriminant power kills.

    For domains that is the base itself, or the zero ring when the
    discriminant is zero.  For a finite-dimensional base over a field the
    annihilator of high discriminant powers is a stabilized kernel, and
    the quotient comes back as a validated algebra on the surviving
    coordinates.  Afterwards the reduced discriminant is always a
    nonzerodivisor, which is checked before returning.
    """

    def __init__(self, base, d):
        self.base = base
        self.d = d
        if isinstance(base, (CoeffRing, PolyRing)):
            self.is_zero_ring = base.is_zero(d)
            self.desc = None if self.is_zero_ring else base
            self._kernel = []
            self._pivots = []
        elif isinstance(base, FiniteFreeAlgebra):
            if not (isinstance(base.base, CoeffRing) and base.base.is_field):
                raise UnsupportedBase(
                    "saturation needs a finite-dimensional base over a field"
                )
            self._build_quotient(base, d)
        else:
            raise UnsupportedBase(f"no saturation for {base!r}")
        if not self.is_zero_ring:
            assert is_nonzerodivisor(self.desc, self.reduce(d)), (
                "reduced discriminant still kills something"
            )

    def _build_quotient(self, base, d):
        field = base.base
        rank = base.rank
        M = [[field.field_value(v) for v in row] for row in base.mult_matrix(d)]
        power = M
        kernel = field_nullspace(power, field)
        while len(kernel) < rank:
            power = field_mat_mul(power, M, field)
            bigger = field_nullspace(power, field)
            if len(bigger) == len(kernel):
                break
            kernel = bigger
        # row-reduce the kernel so each row leads at its own column
        rows = [[field.field_value(v) for v in vec] for vec in kernel]
        lead_cols = _field_rref(rows, field, rank)
        self._kernel = list(zip(lead_cols, rows))
        self._pivots = [c for c in range(rank) if c not in set(lead_cols)]
        self.is_zero_ring = not self._pivots
        if self.is_zero_ring:
            self.desc = None
            return
        structure = [
            [
                self._restrict(self._clear(base.mul_vec(
                    base.basis_elem(p).coords, base.basis_elem(q).coords
                )))
                for q in self._pivots
            ]
            for p in self._pivots
        ]
        unit = self._restrict(self._clear(list(base.unit)))
        self.desc = FiniteFreeAlgebra(field, len(self._pivots), structure, unit)

    def _clear(self, coords):
        coords = list(coords)
        for col, vec in self._kernel:
            f = coords[col]
            if f:
                coords = [a - f * b for a, b in zip(coords, vec)]
        return coords

    def _restrict(self, coords):
        return tuple(coords[p] for p in self._pivots)

    @property
    def rank(self):
        if self.is_zero_ring:
            return 0
        if isinstance(self.desc, FiniteFreeAlgebra):
            return self.desc.rank
        return 1

    def reduce(self, v):
        """Image of a base element in the quotient; None in the zero ring."""
        if self.is_zero_ring:
            return None
        if self.desc is self.base:
            return v
        coords = v.coords if hasattr(v, "coords") else tuple(v)
        return self.desc.element(self._restrict(self._clear(list(coords))))


def b_plus(inst):
    return BPlus(inst.E.base, inst.d)


# ---------------------------------------------------------------------------
# the norm map by exact solving


class NormMapPlus:
    """Norm map defined on pair fractions, dividing by exact solving.

    Requires the discriminant to be a nonzerodivisor, so every division
    it performs has at most one answer; a missing answer raises instead
    of approximating.
    """

    def __init__(self, inst):
        if not is_generically_etale(inst):
            raise NotGenericallyEtale(
                f"discriminant {inst.E.base.to_text(inst.d)} is a zerodivisor"
            )
        self.inst = inst
        self._emb = _scalar_embedding(inst.space.scalars, inst.E.base)
        self._d_pows = [inst.E.base.one(), inst.d]

    def _d_power(self, m):
        # published power lists are never mutated, same as the square cache
        pows = self._d_pows
        if len(pows) <= m:
            pows = list(pows)
            while len(pows) <= m:
                pows.append(
                    self.inst.E.base.normalize(pows[-1] * self.inst.d)
                )
            self._d_pows = pows
        return pows[m]

    def _divide(self, value, m):
        base = self.inst.E.base
        if m == 0:
            return base.normalize(value)
        out = base.divide_exact(value, self._d_power(m))
        if out is None:
            raise DivisionFails(
                f"{base.to_text(value)} is not divisible by the {m}-th "
                "discriminant power"
            )
        return base.normalize(out)

    def pair_image(self, ys, zs):
        """Image of one pair fraction: its pairing value over one power."""
        return self._divide(trace_pairing_det(self.inst, ys, zs), 1)

    def fraction_image(self, rf):
        """Image of a pair fraction sum, one exact division at the end."""
        if rf.ctx is not self.inst.ctx and rf.ctx != self.inst.ctx:
            raise ContextMismatch("fraction over a different anchor tuple")
        base = self.inst.E.base
        total = base.zero()
        for c, pairs in rf.terms:
            prod = base.one()
            for ys, zs in pairs:
                prod = prod * trace_pairing_det(self.inst, ys, zs)
            total = total + self._emb(c) * prod
        return self._divide(total, rf.m)

    def localized_image(self, le):
        """Image of an invariant fraction.

        Exponent-free fractions go through the verified pair rewriting.
        A power surviving normalization costs one exact division per
        square; when the quotient does not exist the fraction has no
        image here and the division error says so.
        """
        ctx = self.inst.ctx
        if le.level != LEVEL_FULL:
            raise LevelMismatch("only fully invariant fractions map down")
        if le.ctx is not ctx and le.ctx != ctx:
            raise ContextMismatch("fraction over a different anchor tuple")
        le = le.normalize()
        if not le.exp:
            return self.fraction_image(rees_from_localized(ctx, le))
        base = self.inst.E.base
        total = base.zero()
        for c, w in alternator_pair_presentation(ctx, le.num):
            total = total + self._emb(c) * trace_pairing_det(self.inst, ctx.x, w)
        return self._divide(total, le.exp + 1)


def make_norm_map_plus(inst):
    return NormMapPlus(inst)


def verify_pullback_plus(inst):
    """Mapped constants against the algebra's own, along two routes.

    Route one pushes the coordinate fractions through the pair rewriting.
    Route two expresses each coordinate directly as a single pair: the
    anchor with one entry replaced by the product, against the anchor.
    Both must land on the image-basis coordinates computed in the algebra.
    """
    nm = make_norm_map_plus(inst)
    E, base = inst.E, inst.E.base
    ctx = inst.ctx
    witnesses = []
    mapped_unit = [
        nm.localized_image(c) for c in coordinates(ctx, inst.space.ring.one())
    ]
    direct_unit = inst.basis_coords(E.one())
    witnesses.append(
        Witness(
            "pullback_plus[unit]",
            all(base.normalize(m) == u for m, u in zip(mapped_unit, direct_unit)),
            vector_text(base, mapped_unit),
            vector_text(base, direct_unit),
        )
    )
    for i in range(E.rank):
        for j in range(i, E.rank):
            prod = ctx.x[i] * ctx.x[j]
            direct = inst.basis_coords(inst.fx[i] * inst.fx[j])
            mapped = [
                nm.localized_image(c) for c in coordinates(ctx, prod)
            ]
            witnesses.append(
                Witness(
                    f"pullback_plus[{i + 1},{j + 1}]",
                    all(
                        base.normalize(m) == u for m, u in zip(mapped, direct)
                    ),
                    vector_text(base, mapped),
                    vector_text(base, direct),
                )
            )
            single = [
                nm.fraction_image(rees_pair(ctx, ctx.x_replaced(k, prod), ctx.x))
                for k in range(1, E.rank + 1)
            ]
            witnesses.append(
                Witness(
                    f"pair_route[{i + 1},{j + 1}]",
                    all(
                        base.normalize(s) == u for s, u in zip(single, direct)
                    ),
                    vector_text(base, single),
                    vector_text(base, direct),
                )
            )
    return witnesses


# ---------------------------------------------------------------------------
# repeated-point support probe


def _grid_monomials(k, n):
    return list(itertools.product(range(n), repeat=k))


def diagonal_support_probe(scalars, points, tuples=None):
    """Do the points sit on the repeated-point locus?

    Evaluates monomial tuples at the points and checks the determinants:
    a repeated point forces every such determinant to vanish, while
    pairwise distinct points always leave one nonzero, as long as the
    monomials run over a full degree-below-n grid per variable.  Returns
    True exactly when every determinant vanishes.
    """
    n = len(points)
    if n == 0:
        raise ArityMismatch("no points given")
    k = len(points[0])
    if any(len(p) != k for p in points):
        raise ArityMismatch("points of mixed dimension")
    pts = [tuple(scalars.normalize(scalars.from_int(c) if isinstance(c, int) else c)
                 for c in p) for p in points]
    if tuples is None:
        tuples = itertools.combinations(_grid_monomials(k, n), n)

    def mono(point, exps):
        acc = scalars.one()
        for c, e in zip(point, exps):
            for _ in range(e):
                acc = acc * c
        return acc

    for monos in tuples:
        if len(monos) != n:
            raise ArityMismatch(f"need {n} monomials per determinant")
        rows = [[mono(p, m) for m in monos] for p in pts]
        if not scalars.is_zero(scalars.normalize(det_generic(rows))):
            return False
    return True
