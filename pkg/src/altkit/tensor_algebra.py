"""n-fold tensor powers of a free ring, with the symmetric group action.

A tensor lives in the n-fold tensor power of R over its scalar ring A,
where R is either a polynomial ring (labels are monomials) or a finite
free algebra (labels are basis elements).  Terms are stored sparsely as a
dict from a flat label tuple to a nonzero coefficient: each slot
contributes ``width`` integers to the key (the exponent vector of its
monomial, or a single basis index), so permuting factors is a tuple
reshuffle and multiplying monomial labels is a pointwise sum.

Supported arity is 1 <= n <= 5; everything here is exact.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import permutations, product

from .errors import (
    ArityMismatch,
    IndexOutOfRange,
    RingMismatch,
    UnsupportedBase,
)
from .ring_core import (
    AlgebraElem,
    CoeffRing,
    FiniteFreeAlgebra,
    FpElem,
    Fraction,
    MultiPoly,
    PolyRing,
)

__all__ = [
    "Permutation",
    "TensorSpace",
    "Tensor",
    "pure_tensor",
    "tensor_add",
    "tensor_mul",
    "scalar_mul",
    "permute",
    "coprojection",
    "is_symmetric",
    "is_sym_n11",
    "polarized_power_sum",
    "unit_tensor",
    "all_signed_permutations",
]

MAX_ARITY = 5


class Permutation:
    """Permutation of n slots, 0-based images: i goes to images[i]."""

    __slots__ = ("n", "images")

    def __init__(self, images):
        self.images = tuple(images)
        self.n = len(self.images)
        if sorted(self.images) != list(range(self.n)):
            raise IndexOutOfRange(f"not a permutation of 0..{self.n - 1}: {images}")

    @classmethod
    def identity(cls, n):
        return cls(range(n))

    @classmethod
    def transposition(cls, n, a, b):
        images = list(range(n))
        images[a], images[b] = images[b], images[a]
        return cls(images)

    def __call__(self, i):
        return self.images[i]

    def compose(self, other):
        """self after other: (self . other)(i) = self(other(i))."""
        if self.n != other.n:
            raise ArityMismatch(f"{self.n} vs {other.n}")
        return Permutation(tuple(self.images[other.images[i]] for i in range(self.n)))

    def inverse(self):
        inv = [0] * self.n
        for i, img in enumerate(self.images):
            inv[img] = i
        return Permutation(inv)

    def sign(self):
        inversions = sum(
            1
            for i in range(self.n)
            for j in range(i + 1, self.n)
            if self.images[i] > self.images[j]
        )
        return -1 if inversions % 2 else 1

    def __eq__(self, other):
        return isinstance(other, Permutation) and self.images == other.images

    def __hash__(self):
        return hash(self.images)

    def __repr__(self):
        return f"Permutation({self.images})"


@lru_cache(maxsize=None)
def all_signed_permutations(n):
    """All of S_n with signs, identity first, in a fixed enumeration order."""
    out = []
    for images in permutations(range(n)):
        p = Permutation(images)
        out.append((p, p.sign()))
    return tuple(out)


class TensorSpace:
    """The n-fold tensor power of R over its scalars, as a key codec.

    Knows how to decompose an element of R into (label, coefficient)
    pairs, how to multiply labels, and how to render them; tensors defer
    to their space for everything that depends on R.
    """

    def __init__(self, n, ring):
        if not 1 <= n <= MAX_ARITY:
            raise UnsupportedBase(f"arity {n} outside 1..{MAX_ARITY}")
        if isinstance(ring, PolyRing):
            self.width = len(ring.vars)
            if self.width == 0:
                raise UnsupportedBase("polynomial ambient needs at least one variable")
            self.scalars = ring.coeff
        elif isinstance(ring, FiniteFreeAlgebra):
            self.width = 1
            self.scalars = ring.base
        else:
            raise UnsupportedBase(f"tensor ambient must be PolyRing or FiniteFreeAlgebra, got {ring!r}")
        self.n = n
        self.ring = ring

    @property
    def is_poly(self):
        return isinstance(self.ring, PolyRing)

    def __eq__(self, other):
        return (
            isinstance(other, TensorSpace)
            and self.n == other.n
            and self.ring == other.ring
        )

    def __hash__(self):
        return hash((self.n, self.width))

    def __repr__(self):
        return f"TensorSpace(n={self.n}, ring={self.ring!r})"

    def as_element(self, x):
        """Coerce x to an element of R."""
        if self.is_poly:
            if isinstance(x, MultiPoly):
                if x.ring != self.scalars or x.vars != self.ring.vars:
                    raise RingMismatch(f"{x!r} not in {self.ring!r}")
                return x
            if isinstance(x, int):
                return self.ring.from_int(x)
            if isinstance(x, (Fraction, FpElem)):
                return MultiPoly.const(self.scalars, self.ring.vars, x)
            raise RingMismatch(f"cannot coerce {x!r} into {self.ring!r}")
        if isinstance(x, AlgebraElem):
            if x.alg != self.ring:
                raise RingMismatch("element of a different algebra")
            return x
        if isinstance(x, (tuple, list)):
            return self.ring.element(x)
        if isinstance(x, int):
            return self.ring.from_int(x)
        raise RingMismatch(f"cannot coerce {x!r} into {self.ring!r}")

    def decompose(self, x):
        """(label, coefficient) pairs of an element of R; labels are tuples."""
        x = self.as_element(x)
        if self.is_poly:
            return list(x.terms.items())
        return [((i,), c) for i, c in enumerate(x.coords) if c]

    def label_elem(self, label):
        """The element of R carried by one slot label."""
        if self.is_poly:
            return MultiPoly(self.scalars, self.ring.vars, {label: self.scalars.one()}, _clean=True)
        return self.ring.basis_elem(label[0])

    def label_text(self, label):
        if self.is_poly:
            parts = []
            for name, e in zip(self.ring.vars, label):
                if e == 1:
                    parts.append(name)
                elif e > 1:
                    parts.append(f"{name}^{e}")
            return "*".join(parts) if parts else "1"
        return f"e{label[0] + 1}"

    def label_sort_key(self, label):
        if self.is_poly:
            return (sum(label), label)
        return label

    def key_slots(self, key):
        w = self.width
        return [key[i * w : (i + 1) * w] for i in range(self.n)]

    def zero(self):
        return Tensor(self, {})

    def one_coeff(self):
        return self.scalars.one()


class Tensor:
    """Sparse tensor: flat label keys to nonzero scalar coefficients."""

    __slots__ = ("space", "terms")

    def __init__(self, space, terms, _clean=False):
        self.space = space
        if _clean:
            self.terms = terms
        else:
            norm = space.scalars.normalize
            self.terms = {k: norm(c) for k, c in terms.items() if c}

    def _compat(self, other):
        if not isinstance(other, Tensor):
            raise RingMismatch(f"expected a tensor, got {other!r}")
        if self.space.n != other.space.n:
            raise ArityMismatch(f"{self.space.n} vs {other.space.n}")
        if self.space.ring != other.space.ring:
            raise RingMismatch("tensors over different rings")

    def __add__(self, other):
        self._compat(other)
        terms = dict(self.terms)
        for k, c in other.terms.items():
            s = terms.get(k)
            if s is None:
                terms[k] = c
            else:
                s = s + c
                if s:
                    terms[k] = self.space.scalars.normalize(s)
                else:
                    del terms[k]
        return Tensor(self.space, terms, _clean=True)

    def __neg__(self):
        return Tensor(self.space, {k: -c for k, c in self.terms.items()}, _clean=True)

    def __sub__(self, other):
        self._compat(other)
        terms = dict(self.terms)
        for k, c in other.terms.items():
            s = terms.get(k)
            if s is None:
                terms[k] = -c
            else:
                s = s - c
                if s:
                    terms[k] = self.space.scalars.normalize(s)
                else:
                    del terms[k]
        return Tensor(self.space, terms, _clean=True)

    def scale(self, c):
        if not c:
            return self.space.zero()
        norm = self.space.scalars.normalize
        return Tensor(
            self.space, {k: norm(v * c) for k, v in self.terms.items()}, _clean=True
        )

    def __mul__(self, other):
        if isinstance(other, Tensor):
            self._compat(other)
            if self.space.is_poly:
                return self._mul_poly(other)
            return self._mul_algebra(other)
        return self.scale(other)

    def __rmul__(self, other):
        if isinstance(other, Tensor):
            return NotImplemented
        return self.scale(other)

    def _mul_poly(self, other):
        acc = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                c = c1 * c2
                s = acc.get(k)
                acc[k] = c if s is None else s + c
        norm = self.space.scalars.normalize
        return Tensor(
            self.space, {k: norm(c) for k, c in acc.items() if c}, _clean=True
        )

    def _mul_algebra(self, other):
        alg = self.space.ring
        pairs = alg._pairs
        acc = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                c12 = c1 * c2
                slot_lists = [pairs[a][b] for a, b in zip(k1, k2)]
                for choice in product(*slot_lists):
                    key = tuple(k for k, _ in choice)
                    c = c12
                    for _, sc in choice:
                        c = c * sc
                    s = acc.get(key)
                    acc[key] = c if s is None else s + c
        norm = self.space.scalars.normalize
        return Tensor(
            self.space, {k: norm(c) for k, c in acc.items() if c}, _clean=True
        )

    def __pow__(self, k):
        acc = unit_tensor(self.space)
        base = self
        while k:
            if k & 1:
                acc = acc * base
            base = base * base
            k >>= 1
        return acc

    def permute(self, perm):
        """Move the factor in slot i to slot perm(i)."""
        n, w = self.space.n, self.space.width
        if perm.n != n:
            raise ArityMismatch(f"permutation of {perm.n} on arity {n}")
        inv = perm.inverse().images
        idx = [inv[i] * w + c for i in range(n) for c in range(w)]
        return Tensor(
            self.space,
            {tuple(key[t] for t in idx): c for key, c in self.terms.items()},
            _clean=True,
        )

    def __eq__(self, other):
        if not isinstance(other, Tensor):
            return NotImplemented
        return (
            self.space.n == other.space.n
            and self.space.ring == other.space.ring
            and self.terms == other.terms
        )

    def __bool__(self):
        return bool(self.terms)

    def sorted_keys(self):
        space = self.space
        return sorted(
            self.terms,
            key=lambda k: tuple(space.label_sort_key(s) for s in space.key_slots(k)),
        )

    def to_text(self):
        """Stable text form: ``2*[t|1] - 1*[1|t^2]`` style, sorted terms."""
        if not self.terms:
            return "0"
        space = self.space
        scalars = space.scalars
        signable = isinstance(scalars, CoeffRing) and scalars.kind != "Fp"
        chunks = []
        for key in self.sorted_keys():
            c = self.terms[key]
            body = "[" + "|".join(space.label_text(s) for s in space.key_slots(key)) + "]"
            if signable:
                neg = c < 0
                mag = -c if neg else c
                text = f"{scalars.to_text(mag)}*{body}"
                if not chunks:
                    chunks.append(f"-{text}" if neg else text)
                else:
                    chunks.append(f" - {text}" if neg else f" + {text}")
            else:
                ctext = scalars.to_text(c)
                if "+" in ctext or "-" in ctext:
                    ctext = f"({ctext})"
                text = f"{ctext}*{body}"
                chunks.append(text if not chunks else f" + {text}")
        return "".join(chunks)

    def __repr__(self):
        return f"Tensor({self.to_text()!r})"


def pure_tensor(space, elems):
    """Expand r_1 (x) ... (x) r_n multilinearly into a tensor."""
    if len(elems) != space.n:
        raise ArityMismatch(f"{len(elems)} factors for arity {space.n}")
    items = [((), space.one_coeff())]
    for e in elems:
        decomp = space.decompose(e)
        items = [(k + lbl, c * c2) for k, c in items for lbl, c2 in decomp]
        if not items:
            return space.zero()
    return Tensor(space, dict(items))


def tensor_add(a, b):
    return a + b


def tensor_mul(a, b):
    """Componentwise product, extended bilinearly."""
    return a * b


def scalar_mul(c, t):
    return t.scale(c)


def permute(t, perm):
    return t.permute(perm)


def coprojection(space, p, r):
    """The tensor 1 (x) .. (x) r (x) .. (x) 1 with r in slot p (1-based)."""
    if not 1 <= p <= space.n:
        raise IndexOutOfRange(f"slot {p} outside 1..{space.n}")
    one = space.ring.one()
    elems = [one] * space.n
    elems[p - 1] = space.as_element(r)
    return pure_tensor(space, elems)


def unit_tensor(space):
    return pure_tensor(space, [space.ring.one()] * space.n)


def is_symmetric(t):
    """Invariance under all of S_n, checked on adjacent transpositions."""
    n = t.space.n
    for i in range(n - 1):
        tau = Permutation.transposition(n, i, i + 1)
        if t.permute(tau).terms != t.terms:
            return False
    return True


def is_sym_n11(t):
    """Invariance under S_{n-1} permuting the first n-1 slots only."""
    n = t.space.n
    for i in range(n - 2):
        tau = Permutation.transposition(n, i, i + 1)
        if t.permute(tau).terms != t.terms:
            return False
    return True


def polarized_power_sum(space, z):
    """Sum of the n co-projections of z, an S_n-invariant tensor."""
    acc = space.zero()
    for p in range(1, space.n + 1):
        acc = acc + coprojection(space, p, z)
    return acc
