"""Alternating sums: values, linearity, and the six exchange identities."""

import random
from itertools import permutations

import pytest

from altkit.alternator import (
    IDENTITY_NAMES,
    AlternatorInstance,
    IdentityData,
    Witness,
    alpha,
    alpha_map,
    alpha_n11,
    alpha_via_det,
    check_identity,
    random_case,
    random_invariant,
    random_tensor,
)
from altkit.errors import PreconditionViolated
from altkit.ring_core import GF, QQ, PolyRing, make_finite_algebra
from altkit.tensor_algebra import (
    Permutation,
    TensorSpace,
    is_symmetric,
    pure_tensor,
)

RT = PolyRing(QQ, ("t",))


def space(n, ring=RT):
    return TensorSpace(n, ring)


def brute_force_alpha(sp, xs):
    """Sum of signed permuted pure tensors, written out directly."""
    acc = sp.zero()
    for images in permutations(range(sp.n)):
        perm = Permutation(images)
        term = pure_tensor(sp, [xs[images[i]] for i in range(sp.n)])
        acc = acc + term.scale(sp.scalars.from_int(perm.sign()))
    return acc


def test_alpha_golden_n2():
    sp = space(2)
    t = RT.variable("t")
    a = alpha(sp, [RT.one(), t])
    assert a.terms == {(0, 1): 1, (1, 0): -1}
    assert a.to_text() == "1*[1|t] - 1*[t|1]"


def test_alpha_vanishes_on_repeats():
    sp = space(3)
    t = RT.variable("t")
    assert not alpha(sp, [t, t, t * t])
    assert not alpha(space(2), [t + 1, t + 1])


def test_alpha_antisymmetric_in_arguments():
    sp = space(2)
    t = RT.variable("t")
    assert alpha(sp, [t, t * t]) == -alpha(sp, [t * t, t])


def test_alpha_matches_brute_force_and_det():
    rng = random.Random(11)
    for n in (1, 2, 3):
        sp = space(n)
        for _ in range(8):
            xs = [
                sum(
                    (rng.randint(-2, 2) * RT.variable("t") ** k for k in range(3)),
                    RT.zero(),
                )
                for _ in range(n)
            ]
            direct = alpha(sp, xs)
            assert direct == brute_force_alpha(sp, xs)
            assert direct == alpha_via_det(sp, xs)


def test_alpha_map_is_linear_and_alternating():
    sp = space(3)
    rng = random.Random(5)
    t1 = random_tensor(rng, sp, 3, 3)
    t2 = random_tensor(rng, sp, 3, 3)
    assert alpha_map(t1 + t2) == alpha_map(t1) + alpha_map(t2)
    assert alpha_map(t1.scale(7)) == alpha_map(t1).scale(7)
    swap = Permutation.transposition(3, 0, 2)
    assert alpha_map(t1.permute(swap)) == -alpha_map(t1)


def test_alpha_map_output_is_antisymmetric():
    sp = space(3)
    rng = random.Random(6)
    out = alpha_map(random_tensor(rng, sp, 4, 3))
    swap = Permutation.transposition(3, 1, 2)
    assert out.permute(swap) == -out


def test_alpha_n11_identity_at_n2():
    sp = space(2)
    t = RT.variable("t")
    x = pure_tensor(sp, [t, t * t])
    assert alpha_n11(x) == x


def test_alpha_n11_alternates_leading_slots():
    sp = space(3)
    t = RT.variable("t")
    x = pure_tensor(sp, [RT.one(), t, t * t])
    got = alpha_n11(x)
    # 1 (x) t - t (x) 1 in the first two slots, t^2 fixed in the last
    assert got.terms == {(0, 1, 2): 1, (1, 0, 2): -1}
    swapped = x.permute(Permutation.transposition(3, 0, 1))
    assert alpha_n11(swapped) == -got


def test_alpha_n1_degenerate():
    sp = space(1)
    t = RT.variable("t")
    x = pure_tensor(sp, [t + 2])
    assert alpha_map(x) == x
    assert alpha_n11(x) == x
    assert alpha(sp, [t]) == pure_tensor(sp, [t])


def test_instance_caches_square():
    sp = space(2)
    t = RT.variable("t")
    inst = AlternatorInstance(sp, [RT.one(), t])
    assert inst.alpha_sq.terms == {(0, 2): 1, (1, 1): -2, (2, 0): 1}
    assert inst.alpha_sq.to_text() == "1*[1|t^2] - 2*[t|t] + 1*[t^2|1]"
    assert is_symmetric(inst.alpha_sq)
    assert inst.x_dropped(1).terms == {(1, 0): 1}  # (t) (x) 1
    assert inst.x_replaced(2, t * t) == (RT.one(), t * t)


def test_instance_over_algebra():
    alg = make_finite_algebra(QQ, 2, [[(1, 0), (0, 1)], [(0, 1), (2, 0)]], (1, 0))
    sp = TensorSpace(2, alg)
    inst = AlternatorInstance(sp, [alg.one(), alg.element((0, 1))])
    assert inst.alpha_x.terms == {(0, 1): 1, (1, 0): -1}
    assert inst.alpha_sq.terms == {(0, 0): 4, (1, 1): -2}
    assert is_symmetric(inst.alpha_sq)


# -- the six identities


def fixed_cases(sp):
    t = RT.variable("t")
    one = RT.one()
    n = sp.n
    xs = tuple(t**k for k in range(n))
    rng = random.Random(17)
    return {
        "ts_linearity": IdentityData(
            t=random_tensor(rng, sp, 3, 3),
            y=random_invariant(rng, sp, 3, full=True),
        ),
        "degree_relation": IdentityData(t=random_tensor(rng, sp, 3, 3)),
        "n11_linearity": IdentityData(
            t=random_tensor(rng, sp, 3, 3),
            y=random_invariant(rng, sp, 3, full=False),
        ),
        "symmetric_span": IdentityData(
            x=xs, y=random_invariant(rng, sp, 3, full=False)
        ),
        "coefficient": IdentityData(
            x=xs,
            scalars=tuple(QQ.from_int(k - 1) for k in range(n)),
            slot=min(2, n),
        ),
        "r_span": IdentityData(x=xs, z=(t + one) ** 2),
    }


@pytest.mark.parametrize("name", IDENTITY_NAMES)
@pytest.mark.parametrize("n", [1, 2, 3])
def test_identities_fixed_cases(name, n):
    sp = space(n)
    data = fixed_cases(sp)[name]
    w = check_identity(name, sp, data)
    assert w.ok, f"{name} at n={n}: {w.lhs_text} != {w.rhs_text}"


@pytest.mark.parametrize("ring", [RT, PolyRing(GF(5), ("t",)), PolyRing(GF(2), ("t",))])
@pytest.mark.parametrize("name", IDENTITY_NAMES)
def test_identities_random_cases(ring, name):
    for n in (2, 3):
        sp = TensorSpace(n, ring)
        rng = random.Random(f"{name}:{n}:{ring.coeff!r}")
        for _ in range(10):
            data = random_case(name, rng, sp, 3, 3)
            w = check_identity(name, sp, data)
            assert w.ok, f"{name} n={n}: {w.lhs_text} != {w.rhs_text}"


def test_identities_two_variable_ambient():
    ring = PolyRing(QQ, ("u", "v"))
    sp = TensorSpace(2, ring)
    rng = random.Random(23)
    for name in IDENTITY_NAMES:
        data = random_case(name, rng, sp, 3, 2)
        assert check_identity(name, sp, data).ok


def test_precondition_violations():
    sp = space(2)
    t = RT.variable("t")
    skew = pure_tensor(sp, [t, RT.one()])
    with pytest.raises(PreconditionViolated):
        check_identity("ts_linearity", sp, IdentityData(t=skew, y=skew))
    with pytest.raises(PreconditionViolated):
        check_identity("no_such_identity", sp, IdentityData())
    with pytest.raises(PreconditionViolated):
        check_identity("coefficient", sp, IdentityData(x=(t, t), scalars=(1, 1), slot=9))


def test_witness_reports_both_sides():
    sp = space(2)
    t = RT.variable("t")
    a = pure_tensor(sp, [RT.one(), t])
    b = pure_tensor(sp, [t, RT.one()])
    w = Witness(name="demo", ok=False, lhs=a, rhs=b)
    assert not w
    assert w.lhs_text == "1*[1|t]"
    assert w.rhs_text == "1*[t|1]"


def test_random_data_is_seed_deterministic():
    sp = space(3)
    a = random_case("symmetric_span", random.Random(99), sp, 4, 3)
    b = random_case("symmetric_span", random.Random(99), sp, 4, 3)
    assert a.x == b.x and a.y == b.y
