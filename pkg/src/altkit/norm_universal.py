"""Trace pairing, discriminant, and the map onto a presented algebra.

A finite free algebra pairs its elements through traces of multiplication
operators; the determinant of that pairing on a basis is the discriminant.
When the algebra is presented as the image of a polynomial tuple, the
coordinate fractions of the tuple push forward: a fully invariant tensor
times the tuple's alternator rewrites as a signed sum of plain
alternators, an alternator pair goes to a trace-pairing determinant, and
the alternator square goes to the discriminant.  Everything here divides
by the discriminant outright, so it insists on the discriminant being a
unit; the nonzerodivisor relaxation lives in the blow-up module.
"""

from __future__ import annotations

from .alternator import AlternatorInstance, Witness, alpha
from .errors import (
    ArityMismatch,
    ContextMismatch,
    LevelMismatch,
    NotABasis,
    NotEtale,
    NotInvariant,
)
from .ring_core import (
    AlgebraElem,
    _scalar_embedding,
    det_generic,
    solve_adjugate,
)
from .span_solver import (
    LEVEL_FULL,
    LocalizedElem,
    coordinates,
    structure_constants_R,
)
from .tensor_algebra import (
    TensorSpace,
    is_symmetric,
    polarized_power_sum,
    unit_tensor,
)

__all__ = [
    "discriminant",
    "trace_pairing_det",
    "trace_formula_check",
    "traceexp_check",
    "alternator_pair_presentation",
    "PullbackInstance",
    "NormMap",
    "make_norm_map",
    "verify_pullback",
    "free_case_check",
]


def _as_elems(alg, vec):
    return tuple(v if isinstance(v, AlgebraElem) else alg.element(v) for v in vec)


def vector_text(base, vec):
    return "(" + ", ".join(base.to_text(v) for v in vec) + ")"


def trace_pairing_det(inst, vs, ws):
    """Determinant of the trace pairing of two mapped tuples."""
    E, f, space = inst.E, inst.f, inst.space
    vs = tuple(space.as_element(v) for v in vs)
    ws = tuple(space.as_element(w) for w in ws)
    rows = [[E.trace(f(v) * f(w)) for w in ws] for v in vs]
    return E.base.normalize(det_generic(rows))


def discriminant(alg, basis):
    """Determinant of the trace pairing on a basis of the algebra.

    The claimed basis is checked first: its coordinate matrix against the
    built-in basis must have unit determinant.
    """
    basis = _as_elems(alg, basis)
    if len(basis) != alg.rank:
        raise NotABasis(f"{len(basis)} elements for rank {alg.rank}")
    change = [[b.coords[r] for b in basis] for r in range(alg.rank)]
    det = det_generic(change)
    if not alg.base.is_unit(det):
        raise NotABasis(
            f"coordinate determinant {alg.base.to_text(det)} is not a unit"
        )
    gram = [[alg.trace(bi * bj) for bj in basis] for bi in basis]
    return alg.base.normalize(det_generic(gram))


def trace_formula_check(ctx, z):
    """Trace of multiplication by the last co-projection of z, vs power sum.

    The diagonal coordinate entries of z times the anchor entries must add
    up to the sum of co-projections of z, as localized fractions.
    """
    space = ctx.space
    z = space.as_element(z)
    total = LocalizedElem.zero(ctx)
    for k in range(space.n):
        total = total + coordinates(ctx, z * ctx.x[k])[k]
    expected = LocalizedElem(
        ctx, LEVEL_FULL, polarized_power_sum(space, z), 0, _checked=True
    )
    return Witness("trace_formula", total == expected, total, expected)


def traceexp_check(ctx, ys):
    """Alternator pair against the determinant of pairwise power sums.

    Plain tensor arithmetic on both sides, so any ambient ring works.
    """
    space = ctx.space
    if len(ys) != space.n:
        raise ArityMismatch(f"{len(ys)} entries for arity {space.n}")
    ys = tuple(space.as_element(y) for y in ys)
    lhs = ctx.alpha_x * alpha(space, ys)
    rows = [
        [polarized_power_sum(space, xi * yj) for yj in ys] for xi in ctx.x
    ]
    rhs = det_generic(rows)
    return Witness("traceexp", lhs == rhs, lhs, rhs)


def alternator_pair_presentation(ctx, num):
    """A fully invariant tensor times alpha(x), as signed plain alternators.

    Term by term: the slot labels of the tensor multiply into the anchor
    entries, giving one alternator per term.  The rewriting is re-checked
    exactly before returning.
    """
    space = ctx.space
    if not is_symmetric(num):
        raise NotInvariant("presentation needs a fully invariant tensor")
    terms = []
    acc = space.zero()
    for key, c in num.terms.items():
        labels = space.key_slots(key)
        w = tuple(
            xj * space.label_elem(lab) for xj, lab in zip(ctx.x, labels)
        )
        terms.append((c, w))
        acc = acc + alpha(space, w).scale(c)
    assert acc == num * ctx.alpha_x, "presentation failed to rebuild the input"
    return tuple(terms)


class PullbackInstance:
    """A finite free algebra presented as the image of a polynomial tuple.

    Bundles the presenting map, the anchor tuple in the source ring, the
    image basis, and the discriminant of that basis.  The image tuple
    must genuinely be a basis; how invertible the discriminant is decides
    which norm map applies.
    """

    def __init__(self, f, xs):
        self.E = f.target
        self.f = f
        if len(xs) != self.E.rank:
            raise ArityMismatch(
                f"{len(xs)} anchor entries for rank {self.E.rank}"
            )
        self.space = TensorSpace(self.E.rank, f.source)
        self.ctx = AlternatorInstance(self.space, xs)
        self.fx = tuple(f(x) for x in self.ctx.x)
        self.d = discriminant(self.E, self.fx)

    @property
    def is_etale(self):
        return self.E.base.is_unit(self.d)

    def require_etale(self):
        if not self.is_etale:
            raise NotEtale(
                f"discriminant {self.E.base.to_text(self.d)} is not a unit"
            )

    def basis_coords(self, e):
        """Coordinates of an algebra element in the image basis."""
        change = [[b.coords[r] for b in self.fx] for r in range(self.E.rank)]
        sol = solve_adjugate(change, list(e.coords), self.E.base)
        if sol is None:
            raise NotABasis("image basis failed to solve; should be impossible")
        return tuple(self.E.base.normalize(c) for c in sol)

    def __repr__(self):
        return f"PullbackInstance(rank={self.E.rank}, d={self.E.base.to_text(self.d)})"


class NormMap:
    """Push localized coordinate fractions into the algebra's base ring.

    Defined when the discriminant is a unit.  An invariant numerator at
    square exponent m lands on its pairing value divided by the m+1 power
    of the discriminant.
    """

    def __init__(self, inst):
        inst.require_etale()
        self.inst = inst
        base = inst.E.base
        self._emb = _scalar_embedding(inst.space.scalars, base)
        self._d_inv = base.unit_inverse(inst.d)

    def pair_image(self, vs, ws):
        """Image of alpha(v)*alpha(w): determinant of the trace pairing."""
        return trace_pairing_det(self.inst, vs, ws)

    def invariant_image(self, num, exp=0):
        """Image of num / alpha_sq^exp for a fully invariant numerator."""
        base = self.inst.E.base
        x = self.inst.ctx.x
        total = base.zero()
        for c, w in alternator_pair_presentation(self.inst.ctx, num):
            total = total + self._emb(c) * self.pair_image(x, w)
        for _ in range(exp + 1):
            total = total * self._d_inv
        return base.normalize(total)

    def localized_image(self, le):
        if le.ctx != self.inst.ctx:
            raise ContextMismatch("fraction from a different anchor tuple")
        if le.level != LEVEL_FULL:
            raise LevelMismatch("only fully invariant fractions have an image")
        return self.invariant_image(le.num, le.exp)


def make_norm_map(inst):
    return NormMap(inst)


def verify_pullback(inst):
    """Mapped structure constants against the algebra's own, witness each.

    The anchor tuple's coordinate fractions are pushed through the norm
    map and compared with the image basis coordinates computed directly
    in the algebra; the unit row rides along.
    """
    nm = make_norm_map(inst)
    E, base = inst.E, inst.E.base
    constants = structure_constants_R(inst.ctx)
    witnesses = []
    mapped_unit = [
        nm.localized_image(c) for c in coordinates(inst.ctx, inst.space.ring.one())
    ]
    direct_unit = inst.basis_coords(E.one())
    witnesses.append(
        Witness(
            "pullback[unit]",
            all(base.normalize(m) == u for m, u in zip(mapped_unit, direct_unit)),
            vector_text(base, mapped_unit),
            vector_text(base, direct_unit),
        )
    )
    for i in range(E.rank):
        for j in range(i, E.rank):
            mapped = [nm.localized_image(c) for c in constants[i][j]]
            direct = inst.basis_coords(inst.fx[i] * inst.fx[j])
            witnesses.append(
                Witness(
                    f"pullback[{i + 1},{j + 1}]",
                    all(
                        base.normalize(m) == u
                        for m, u in zip(mapped, direct)
                    ),
                    vector_text(base, mapped),
                    vector_text(base, direct),
                )
            )
    return witnesses


def free_case_check(alg, basis, extra=()):
    """A free algebra as its own coordinate ring: the two collapse laws.

    Over the algebra ambient, the power sum of z collapses to the trace
    of z once multiplied by the alternator square, and the alternator
    square itself collapses to the discriminant.  Both are exact tensor
    statements, no fractions involved.
    """
    basis = _as_elems(alg, basis)
    space = TensorSpace(alg.rank, alg)
    ctx = AlternatorInstance(space, basis)
    d = discriminant(alg, basis)
    unit = unit_tensor(space)
    witnesses = []
    for z in list(basis) + [alg.normalize(e) for e in extra]:
        lhs = (polarized_power_sum(space, z) - unit.scale(alg.trace(z))) * ctx.alpha_sq
        witnesses.append(
            Witness(
                "power_sum_collapses_to_trace",
                not lhs,
                lhs,
                space.zero(),
                detail=f"z = {alg.to_text(z)}",
            )
        )
    lhs = (ctx.alpha_sq - unit.scale(d)) * ctx.alpha_sq
    witnesses.append(
        Witness(
            "square_collapses_to_discriminant",
            not lhs,
            lhs,
            space.zero(),
            detail=f"d = {alg.base.to_text(d)}",
        )
    )
    return witnesses
