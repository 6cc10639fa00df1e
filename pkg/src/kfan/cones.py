"""Strongly convex rational polyhedral cones and fans.

A cone carries both descriptions -- primitive extreme rays and integer
facet inequalities -- cross-checked at construction, since faces want
the inequality side and duals want the generator side.  Fans are finite
face-closed collections of cones; their subfans are the open sets of
the poset topology used by the sheaf layer.

The double-description step enumerates candidate facet normals from
subsets of rays, which is exact and entirely adequate at the ambient
ranks this package supports (<= 4).
"""

from __future__ import annotations

import math
from itertools import combinations
from typing import Iterable, Sequence

from .intlinalg import (
    IntMatrix,
    Lattice,
    QuotientLattice,
    Vec,
    as_vec,
    dot,
    kernel,
    quotient,
    smith_with_inverses,
    stack_rows,
    vec_neg,
)

MAX_RANK = 4


class NotStronglyConvex(Exception):
    """The generated cone contains a line."""


class NotAFan(Exception):
    """Two cones intersect in something that is not a common face."""

    def __init__(self, i: int, j: int, message: str = ""):
        self.pair = (i, j)
        super().__init__(message or f"cones {i} and {j} do not intersect in a common face")


class ConeNotInFan(Exception):
    pass


class UnsupportedRank(Exception):
    pass


class DomainNotOpen(Exception):
    """A subfan member set is not downward closed under the face order."""


def primitive(v: Sequence[int]) -> Vec | None:
    """v divided by the gcd of its entries; None for the zero vector."""
    g = 0
    for x in v:
        g = math.gcd(g, x)
    if g == 0:
        return None
    return tuple(x // g for x in v)


def _unique_primitives(vectors: Iterable[Sequence[int]]) -> list[Vec]:
    out: list[Vec] = []
    seen: set[Vec] = set()
    for v in vectors:
        p = primitive(as_vec(v))
        if p is not None and p not in seen:
            seen.add(p)
            out.append(p)
    return out


def dual_ray_generators(
    vectors: Sequence[Sequence[int]], rank: int
) -> tuple[list[Vec], list[Vec]]:
    """Generators of {u : u.v >= 0 for all given v}.

    Returns (lineality_basis, pointed_rays): the dual cone is the span
    of +-lineality_basis plus nonnegative combinations of pointed_rays.
    Every extreme ray of the pointed part is cut out by a rank-(d-1)
    subset of the input vectors inside their span, so enumerating
    (d-1)-subsets finds them all.
    """
    vecs = _unique_primitives(vectors)
    mat = IntMatrix(vecs, ncols=rank)
    lin = kernel(mat)  # both the dual's lineality and the span constraints
    d = rank - lin.nrows
    if d == 0:
        return list(lin.rows), []
    pointed: set[Vec] = set()
    for subset in combinations(range(len(vecs)), d - 1):
        stacked = stack_rows([IntMatrix([vecs[i] for i in subset], ncols=rank), lin], rank)
        ker = kernel(stacked)
        if ker.nrows != 1:
            continue
        u = ker.row(0)
        if all(dot(u, w) >= 0 for w in vecs):
            pointed.add(u)
        elif all(dot(u, w) <= 0 for w in vecs):
            pointed.add(vec_neg(u))
    return list(lin.rows), sorted(pointed)


class Cone:
    """A rational polyhedral cone with rays and facet inequalities.

    Cones built by ``from_rays`` are strongly convex; duals of
    lower-dimensional cones contain lines and store them as opposite
    ray pairs, with ``pointed`` False.  Immutable; equality and hashing
    go by the sorted primitive ray set.
    """

    __slots__ = ("lattice", "rays", "facets", "dim", "pointed", "_faces", "_charq")

    def __init__(self, lattice: Lattice, rays, facets, dim: int, pointed: bool):
        self.lattice = lattice
        self.rays = tuple(sorted(as_vec(r) for r in rays))
        self.facets = tuple(sorted(as_vec(f) for f in facets))
        self.dim = dim
        self.pointed = pointed
        self._faces = None
        self._charq = None

    @classmethod
    def from_rays(cls, lattice: Lattice, rays: Iterable[Sequence[int]]) -> "Cone":
        n = lattice.rank
        if n > MAX_RANK:
            raise UnsupportedRank(f"ambient rank {n} > {MAX_RANK}")
        prim = _unique_primitives(rays)
        if any(len(r) != n for r in prim):
            raise ValueError("ray length does not match the lattice rank")
        lin, pnt = dual_ray_generators(prim, n)
        facets = list(pnt)
        for l in lin:
            facets.append(l)
            facets.append(vec_neg(l))
        facet_mat = IntMatrix(facets, ncols=n)
        if n - kernel(facet_mat).nrows < n:
            raise NotStronglyConvex(f"cone on {prim} contains a line")
        dual_lin, extreme = dual_ray_generators(facets, n)
        assert not dual_lin
        dim = n - len(lin)
        cone = cls(lattice, extreme, facets, dim, pointed=True)
        # cross-checks between the two descriptions
        for r in prim:
            assert cone.contains(r)
        proper = cone._proper_facets()
        for u in proper:
            tight = [r for r in extreme if dot(u, r) == 0]
            assert n - kernel(IntMatrix(tight, ncols=n)).nrows == dim - 1
        return cone

    def _proper_facets(self) -> list[Vec]:
        fs = set(self.facets)
        return [u for u in self.facets if vec_neg(u) not in fs]

    def contains(self, v: Sequence[int]) -> bool:
        return all(dot(u, v) >= 0 for u in self.facets)

    def dual(self) -> "Cone":
        """The dual cone, in the dual lattice.

        Not strongly convex unless this cone is full-dimensional; the
        lineality shows up as opposite ray pairs.
        """
        n = self.lattice.rank
        ray_mat = IntMatrix(self.facets, ncols=n)
        dim = n - kernel(ray_mat).nrows
        return Cone(
            self.lattice.dual(),
            rays=self.facets,
            facets=self.rays,
            dim=dim,
            pointed=(self.dim == n),
        )

    def faces(self) -> tuple["Cone", ...]:
        """All faces, from the zero cone up to the cone itself."""
        if self._faces is not None:
            return self._faces
        assert self.pointed, "face enumeration needs a strongly convex cone"
        proper = self._proper_facets()
        seen: dict[tuple, Cone] = {}
        for k in range(len(proper) + 1):
            for subset in combinations(proper, k):
                tight = tuple(
                    r for r in self.rays if all(dot(u, r) == 0 for u in subset)
                )
                if tight not in seen:
                    seen[tight] = Cone.from_rays(self.lattice, tight)
        faces = tuple(sorted(seen.values(), key=lambda c: (c.dim, c.rays)))
        self._faces = faces
        return faces

    def is_face(self, other: "Cone") -> bool:
        """Is this cone a face of ``other``?"""
        return any(self == f for f in other.faces())

    def intersection(self, other: "Cone") -> "Cone":
        if self.lattice != other.lattice:
            raise ValueError("cones live in different lattices")
        n = self.lattice.rank
        lin, rays = dual_ray_generators(list(self.facets) + list(other.facets), n)
        assert not lin
        return Cone.from_rays(self.lattice, rays)

    def perp_lattice(self) -> IntMatrix:
        """Generators of the functionals vanishing on the cone."""
        return kernel(IntMatrix(self.rays, ncols=self.lattice.rank))

    def character_quotient(self) -> QuotientLattice:
        """M modulo the functionals vanishing on the cone: the character
        group of the minimal orbit of the affine toric variety.  Always
        free, of rank dim."""
        if self._charq is None:
            q = quotient(Lattice(self.lattice.rank), self.perp_lattice())
            assert q.is_free and q.free_rank == self.dim
            self._charq = q
        return self._charq

    def is_simplicial(self) -> bool:
        return len(self.rays) == self.dim

    def is_smooth(self) -> bool:
        """Do the rays extend to a basis of the lattice?"""
        if not self.is_simplicial():
            return False
        if not self.rays:
            return True
        _, d, _, _, _ = smith_with_inverses(IntMatrix(self.rays))
        return all(d.rows[i][i] == 1 for i in range(len(self.rays)))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Cone)
            and self.lattice == other.lattice
            and self.rays == other.rays
        )

    def __hash__(self) -> int:
        return hash((self.lattice, self.rays))

    def __repr__(self) -> str:
        return f"Cone(rays={[list(r) for r in self.rays]})"


def zero_cone(lattice: Lattice) -> Cone:
    return Cone.from_rays(lattice, [])


class Fan:
    """A finite face-closed collection of strongly convex cones whose
    pairwise intersections are common faces.

    ``max_cones`` keeps the order the maximal cones were given in; the
    alternating signs of the cover complex depend on it, so it is fixed
    for the fan's lifetime.  ``cones`` is canonically sorted and the
    zero cone is always present.
    """

    __slots__ = ("lattice", "cones", "max_cones", "_canon", "_faces_of")

    def __init__(self, lattice: Lattice, cones, max_cones, faces_of):
        self.lattice = lattice
        self.cones = cones
        self.max_cones = max_cones
        self._canon = {c: c for c in cones}
        self._faces_of = faces_of

    @classmethod
    def from_max_cones(cls, lattice: Lattice, max_cones: Iterable[Cone]) -> "Fan":
        if lattice.rank > MAX_RANK:
            raise UnsupportedRank(f"ambient rank {lattice.rank} > {MAX_RANK}")
        given = list(max_cones)
        for c in given:
            if c.lattice != lattice:
                raise ValueError("cone lattice does not match the fan lattice")
        # drop duplicates and cones that are proper faces of other input cones
        maximal: list[Cone] = []
        for c in given:
            if any(c != d and c.is_face(d) for d in given):
                continue
            if c not in maximal:
                maximal.append(c)
        for i in range(len(maximal)):
            for j in range(i + 1, len(maximal)):
                meet = maximal[i].intersection(maximal[j])
                if not (meet.is_face(maximal[i]) and meet.is_face(maximal[j])):
                    raise NotAFan(i, j)
        collected: dict[Cone, Cone] = {}
        for c in maximal:
            for f in c.faces():
                collected.setdefault(f, f)
        z = zero_cone(lattice)
        collected.setdefault(z, z)
        if not maximal:
            maximal = [collected[z]]
        cones = tuple(sorted(collected.values(), key=lambda c: (c.dim, c.rays)))
        canon = {c: c for c in cones}
        faces_of = {
            c: tuple(canon[f] for f in c.faces()) for c in cones
        }
        return cls(lattice, cones, tuple(canon[c] for c in maximal), faces_of)

    @classmethod
    def from_rays_and_indices(
        cls,
        lattice: Lattice,
        rays: Sequence[Sequence[int]],
        max_cone_indices: Sequence[Sequence[int]],
    ) -> "Fan":
        rays = [as_vec(r) for r in rays]
        cones = []
        for idxs in max_cone_indices:
            for i in idxs:
                if not 0 <= i < len(rays):
                    raise ValueError(f"ray index {i} out of range")
            cones.append(Cone.from_rays(lattice, [rays[i] for i in idxs]))
        return cls.from_max_cones(lattice, cones)

    def canonical(self, cone: Cone) -> Cone:
        """The fan's own instance of an equal cone (KeyError if absent)."""
        return self._canon[cone]

    def __contains__(self, cone: Cone) -> bool:
        return cone in self._canon

    def faces_of(self, cone: Cone) -> tuple[Cone, ...]:
        if cone not in self._canon:
            raise ConeNotInFan(repr(cone))
        return self._faces_of[self._canon[cone]]

    def is_face(self, tau: Cone, sigma: Cone) -> bool:
        return tau in self.faces_of(sigma)

    def intersection(self, a: Cone, b: Cone) -> Cone:
        return self.canonical(a.intersection(b))

    def star_open(self, sigma: Cone) -> "Subfan":
        """The smallest open set containing sigma: sigma and its faces."""
        return Subfan(self, self.faces_of(sigma))

    def full_subfan(self) -> "Subfan":
        return Subfan(self, self.cones)

    def subfan(self, members: Iterable[Cone]) -> "Subfan":
        return Subfan(self, members)

    def is_smooth(self) -> bool:
        return all(c.is_smooth() for c in self.max_cones)

    def is_complete(self) -> bool:
        """Does the fan cover the whole space?  Decided by the ridge
        criterion: rank <= 3 only."""
        n = self.lattice.rank
        if n > 3:
            raise UnsupportedRank("completeness test implemented for rank <= 3")
        if any(c.dim != n for c in self.max_cones):
            return False
        for ridge in self.cones:
            if ridge.dim != n - 1:
                continue
            count = sum(1 for c in self.max_cones if self.is_face(ridge, c))
            if count != 2:
                return False
        return True

    def index_of(self, cone: Cone) -> int:
        if cone not in self._canon:
            raise ConeNotInFan(repr(cone))
        return self.cones.index(self._canon[cone])

    def __repr__(self) -> str:
        return f"Fan({len(self.cones)} cones, {len(self.max_cones)} maximal)"


class Subfan:
    """A downward-closed set of cones of a fan: an open set of the
    poset topology."""

    __slots__ = ("parent", "members")

    def __init__(self, parent: Fan, members: Iterable[Cone]):
        canon = []
        for c in members:
            if c not in parent._canon:
                raise ConeNotInFan(repr(c))
            canon.append(parent.canonical(c))
        self.parent = parent
        self.members = frozenset(canon)
        for c in self.members:
            for f in parent.faces_of(c):
                if f not in self.members:
                    raise DomainNotOpen(f"missing face {f!r} of {c!r}")

    def max_cones(self) -> tuple[Cone, ...]:
        out = [
            c
            for c in self.members
            if not any(c != d and self.parent.is_face(c, d) for d in self.members)
        ]
        return tuple(sorted(out, key=lambda c: (c.dim, c.rays)))

    def __contains__(self, cone: Cone) -> bool:
        return cone in self.members

    def __le__(self, other: "Subfan") -> bool:
        return self.members <= other.members

    def union(self, other: "Subfan") -> "Subfan":
        return Subfan(self.parent, self.members | other.members)

    def intersection(self, other: "Subfan") -> "Subfan":
        return Subfan(self.parent, self.members & other.members)

    def is_full(self) -> bool:
        return self.members == frozenset(self.parent.cones)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Subfan)
            and self.parent is other.parent
            and self.members == other.members
        )

    def __hash__(self) -> int:
        return hash((id(self.parent), self.members))

    def __repr__(self) -> str:
        return f"Subfan({len(self.members)} cones)"
