"""Sheaves on the poset topology of a fan.

A sheaf here is the contravariant-functor data: a stalk group for every
cone and a quotient surjection for every face pair, functorial along
chains.  Sections over an open subfan are stored on its maximal cones;
compatibility over pairwise meets pins the whole limit.

The sheaf of interest assigns to each cone the group ring of its
minimal-orbit character group; for smooth fans it is flasque, i.e.
every section of every open subfan extends to a global one, and the
extension is searched for by the expanding-support integer solver.
"""

from __future__ import annotations

import random

from .cones import Cone, Fan, Subfan
from .intlinalg import (
    QuotientLattice,
    QuotientSurjection,
    canonical_surjection,
    compose,
    identity_surjection,
    kernel,
    IntMatrix,
)
from .monoids import GroupRingElement
from .support_solver import Constraint, SolverGaveUp, solve_pushforward_system


class NotSmoothFan(Exception):
    """The requested operation is only guaranteed for smooth fans."""


class FanSheaf:
    """Stalks indexed by cones, restriction surjections indexed by face
    pairs (bigger cone -> smaller cone), functoriality checked at
    construction."""

    __slots__ = ("fan", "_stalks", "_restrictions")

    def __init__(self, fan: Fan, stalks: dict, restrictions: dict):
        self.fan = fan
        self._stalks = stalks
        self._restrictions = restrictions
        for sigma in fan.cones:
            assert self.restriction(sigma, sigma).maps_equal(
                identity_surjection(self.stalk(sigma))
            )
        for sigma in fan.cones:
            for tau in fan.faces_of(sigma):
                for rho in fan.faces_of(tau):
                    direct = self.restriction(sigma, rho)
                    via = compose(self.restriction(tau, rho), self.restriction(sigma, tau))
                    assert direct.maps_equal(via)

    def stalk(self, sigma: Cone) -> QuotientLattice:
        return self._stalks[self.fan.canonical(sigma)]

    def restriction(self, sigma: Cone, tau: Cone) -> QuotientSurjection:
        """The map from the stalk at sigma to the stalk at a face tau."""
        key = (self.fan.canonical(sigma), self.fan.canonical(tau))
        return self._restrictions[key]


def sheaf_a0(fan: Fan) -> FanSheaf:
    """The structure sheaf of this package: cone -> Z[M_sigma], face
    inclusion -> pushforward along the canonical character surjection."""
    stalks = {c: c.character_quotient() for c in fan.cones}
    restrictions = {}
    for sigma in fan.cones:
        for tau in fan.faces_of(sigma):
            restrictions[(sigma, tau)] = canonical_surjection(
                stalks[sigma], stalks[tau]
            )
    return FanSheaf(fan, stalks, restrictions)


class Section:
    """A compatible-in-waiting family over the maximal cones of an open
    subfan; ``check`` decides whether it actually is a section."""

    __slots__ = ("sheaf", "domain", "components")

    def __init__(self, sheaf: FanSheaf, domain: Subfan, components: dict):
        if domain.parent is not sheaf.fan:
            raise ValueError("domain belongs to a different fan")
        self.sheaf = sheaf
        self.domain = domain
        max_cones = domain.max_cones()
        comps = {}
        for c in max_cones:
            if c not in components:
                raise ValueError(f"missing component at {c!r}")
            val = components[c]
            if val.group != sheaf.stalk(c):
                raise ValueError(f"component at {c!r} lives over the wrong group")
            comps[c] = val
        self.components = comps

    def incompatible_pair(self):
        """The first pair of maximal cones whose components disagree on
        the meet, or None; checking the meet suffices because smaller
        common faces factor through it."""
        cones = self.domain.max_cones()
        fan = self.sheaf.fan
        for i in range(len(cones)):
            for j in range(i + 1, len(cones)):
                meet = fan.intersection(cones[i], cones[j])
                a = self.components[cones[i]].pushforward(
                    self.sheaf.restriction(cones[i], meet)
                )
                b = self.components[cones[j]].pushforward(
                    self.sheaf.restriction(cones[j], meet)
                )
                if a != b:
                    return cones[i], cones[j], meet
        return None

    def check(self) -> bool:
        return self.incompatible_pair() is None

    def value_at(self, cone: Cone) -> GroupRingElement:
        """The component at any cone of the domain, derived by pushing
        forward from a maximal cone containing it."""
        fan = self.sheaf.fan
        cone = fan.canonical(cone)
        if cone not in self.domain:
            raise ValueError("cone outside the section's domain")
        for top in self.domain.max_cones():
            if fan.is_face(cone, top):
                return self.components[top].pushforward(
                    self.sheaf.restriction(top, cone)
                )
        raise AssertionError("open sets contain a maximal cone above each member")

    def restrict(self, smaller: Subfan) -> "Section":
        if not smaller <= self.domain:
            raise ValueError("not a subset of the section's domain")
        comps = {c: self.value_at(c) for c in smaller.max_cones()}
        return Section(self.sheaf, smaller, comps)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Section)
            and self.sheaf is other.sheaf
            and self.domain == other.domain
            and self.components == other.components
        )

    def __repr__(self) -> str:
        return f"Section(on {len(self.components)} maximal cones)"


def extend_section(
    section: Section, depth: int = 3, allow_nonsmooth: bool = False
) -> Section | SolverGaveUp:
    """Search for a global section restricting to the given one.

    For smooth fans the sheaf is flasque, so an extension exists; the
    solver looks for one over splitting-generated supports and a
    ``SolverGaveUp`` outcome is a search failure, never a proof of
    nonexistence.  Non-smooth fans are refused unless explicitly
    allowed, since nothing guarantees an extension exists there.
    """
    sheaf = section.sheaf
    fan = sheaf.fan
    if not fan.is_smooth() and not allow_nonsmooth:
        raise NotSmoothFan("extension is only guaranteed over smooth fans")
    if section.domain.is_full():
        return section

    maxes = fan.max_cones
    slot_of = {c: i for i, c in enumerate(maxes)}
    slot_groups = {i: sheaf.stalk(c) for i, c in enumerate(maxes)}
    constraints = []
    for i in range(len(maxes)):
        for j in range(i + 1, len(maxes)):
            meet = fan.intersection(maxes[i], maxes[j])
            constraints.append(
                Constraint(
                    key=("compat", i, j),
                    target=sheaf.stalk(meet),
                    terms=(
                        (i, 1, sheaf.restriction(maxes[i], meet)),
                        (j, -1, sheaf.restriction(maxes[j], meet)),
                    ),
                    rhs=GroupRingElement.zero(sheaf.stalk(meet)),
                )
            )
    for lam in section.domain.max_cones():
        for i, top in enumerate(maxes):
            if fan.is_face(lam, top):
                constraints.append(
                    Constraint(
                        key=("restrict", fan.index_of(lam), i),
                        target=sheaf.stalk(lam),
                        terms=((i, 1, sheaf.restriction(top, lam)),),
                        rhs=section.components[lam],
                    )
                )
    outcome = solve_pushforward_system(slot_groups, constraints, depth)
    if isinstance(outcome, SolverGaveUp):
        return outcome
    solution, _rounds = outcome
    comps = {c: solution[slot_of[c]] for c in maxes}
    extended = Section(sheaf, fan.full_subfan(), comps)
    assert extended.check()
    assert extended.restrict(section.domain) == section
    return extended


def random_open_subfan(fan: Fan, rng: random.Random) -> Subfan:
    """A random nonempty open subfan: the union of the stars of a
    random subset of cones."""
    picks = [c for c in fan.cones if rng.random() < 0.5]
    if not picks:
        picks = [fan.cones[rng.randrange(len(fan.cones))]]
    members = set()
    for c in picks:
        members.update(fan.faces_of(c))
    return Subfan(fan, members)


def random_section(
    sheaf: FanSheaf,
    domain: Subfan,
    rng: random.Random,
    max_points: int = 3,
    coord_bound: int = 3,
    coeff_bound: int = 5,
    max_attempts: int = 50,
) -> Section:
    """Sample a genuine section: pick supports on the maximal cones,
    compute the integer kernel of the pairwise compatibility map on
    those supports, and take a random combination of its basis.

    Supports mix splitting-lifts of random meet-stalk points (so that
    fibers actually collide and the kernel is usually nonzero) with
    purely random points."""
    cones = domain.max_cones()
    fan = sheaf.fan

    def random_coords(q):
        return q.reduce(
            tuple(rng.randint(-coord_bound, coord_bound) for _ in range(q.coords_len))
        )

    for _ in range(max_attempts):
        support = {c: set() for c in cones}
        for i in range(len(cones)):
            for j in range(i + 1, len(cones)):
                meet = fan.intersection(cones[i], cones[j])
                phi_i = sheaf.restriction(cones[i], meet)
                phi_j = sheaf.restriction(cones[j], meet)
                for _ in range(rng.randint(1, max_points)):
                    t = random_coords(sheaf.stalk(meet))
                    support[cones[i]].add(phi_i.lift(t))
                    support[cones[j]].add(phi_j.lift(t))
        for c in cones:
            for _ in range(rng.randint(1 if not support[c] else 0, 2)):
                support[c].add(random_coords(sheaf.stalk(c)))
        support = {c: sorted(pts) for c, pts in support.items()}
        variables = [(i, m) for i, c in enumerate(cones) for m in support[c]]
        var_col = {v: k for k, v in enumerate(variables)}
        rows = []
        for i in range(len(cones)):
            for j in range(i + 1, len(cones)):
                meet = fan.intersection(cones[i], cones[j])
                phi_i = sheaf.restriction(cones[i], meet)
                phi_j = sheaf.restriction(cones[j], meet)
                images: dict = {}
                for m in support[cones[i]]:
                    images.setdefault(phi_i.apply(m), {})[(i, m)] = 1
                for m in support[cones[j]]:
                    t = phi_j.apply(m)
                    images.setdefault(t, {})
                    images[t][(j, m)] = images[t].get((j, m), 0) - 1
                for t in sorted(images):
                    row = [0] * len(variables)
                    for v, coeff in images[t].items():
                        row[var_col[v]] += coeff
                    rows.append(row)
        mat = IntMatrix(rows, ncols=len(variables))
        basis = kernel(mat)
        if basis.nrows == 0:
            continue
        combo = [0] * len(variables)
        for row in basis.rows:
            k = rng.randint(-coeff_bound, coeff_bound)
            combo = [a + k * b for a, b in zip(combo, row)]
        if not any(combo):
            continue
        comps = {}
        for i, c in enumerate(cones):
            terms = {m: combo[var_col[(i, m)]] for m in support[c]}
            comps[c] = GroupRingElement(sheaf.stalk(c), terms)
        section = Section(sheaf, domain, comps)
        assert section.check()
        return section
    raise RuntimeError("could not sample a nonzero section")
