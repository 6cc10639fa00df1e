"""The cover complex of a fan: alternating-sign differentials on tuples
of maximal cones, degree-zero cohomology as the global equivariant K_0
ring, and randomized exactness verification.

Level p holds one group-ring slot per strictly increasing (p+1)-tuple
of maximal-cone indices, valued in the character group of the tuple's
intersection cone.  The differential takes the standard alternating
signed sum of pushforwards; only the level-zero formula is forced by
the geometry (difference of the two restrictions), the higher signs are
the usual simplicial convention over the fixed ordering of the maximal
cones, and d . d = 0 holds by telescoping.

For smooth fans the complex is exact in positive levels; the coboundary
solver searches for preimages over splitting-generated supports, and a
``SolverGaveUp`` is a search failure, never a counterexample.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

from .cones import Cone, Fan
from .intlinalg import IntMatrix, QuotientLattice, kernel
from .monoids import GroupRingElement
from .sheaves import FanSheaf, NotSmoothFan, Section, sheaf_a0
from .support_solver import Constraint, SolverGaveUp, solve_pushforward_system


class LevelOverflow(Exception):
    """No differential out of the top level."""


class NotACocycle(Exception):
    pass


class CechComplex:
    """Tuples, stalks and incidence surjections for the maximal-cone
    cover of a fan."""

    __slots__ = ("fan", "sheaf", "tuples", "_cone_of", "_phi")

    def __init__(self, fan: Fan, sheaf: FanSheaf | None = None):
        self.fan = fan
        self.sheaf = sheaf if sheaf is not None else sheaf_a0(fan)
        maxes = fan.max_cones
        n = len(maxes)
        self.tuples = {
            p: tuple(combinations(range(n), p + 1)) for p in range(n)
        }
        self._cone_of = {}
        for p in range(n):
            for t in self.tuples[p]:
                if p == 0:
                    self._cone_of[t] = maxes[t[0]]
                else:
                    prev = self._cone_of[t[:-1]]
                    self._cone_of[t] = fan.intersection(prev, maxes[t[-1]])
        # incidence surjections: dropping index j from tuple t maps the
        # bigger intersection onto the smaller one
        self._phi = {}
        for p in range(1, n):
            for t in self.tuples[p]:
                for j in range(len(t)):
                    s = t[:j] + t[j + 1 :]
                    self._phi[(t, j)] = self.sheaf.restriction(
                        self._cone_of[s], self._cone_of[t]
                    )

    @property
    def top_level(self) -> int:
        return len(self.fan.max_cones) - 1

    def cone_of(self, t: tuple) -> Cone:
        return self._cone_of[t]

    def stalk(self, t: tuple) -> QuotientLattice:
        return self.sheaf.stalk(self._cone_of[t])

    def incidence(self, t: tuple, j: int):
        return self._phi[(t, j)]

    def zero_cochain(self, level: int) -> "Cochain":
        return Cochain(self, level, {})

    def cochain(self, level: int, components: dict) -> "Cochain":
        return Cochain(self, level, components)

    def d(self, c: "Cochain") -> "Cochain":
        """The alternating-sign differential."""
        if c.level >= self.top_level:
            raise LevelOverflow(f"level {c.level} is the top of the complex")
        out = {}
        for t in self.tuples[c.level + 1]:
            acc = GroupRingElement.zero(self.stalk(t))
            for j in range(len(t)):
                s = t[:j] + t[j + 1 :]
                comp = c.components.get(s)
                if comp is None:
                    continue
                pushed = comp.pushforward(self.incidence(t, j))
                acc = acc + (pushed if j % 2 == 0 else -pushed)
            if not acc.is_zero():
                out[t] = acc
        return Cochain(self, c.level + 1, out)

    def is_cocycle(self, c: "Cochain") -> bool:
        if c.level >= self.top_level:
            return True
        return self.d(c).is_zero()

    def solve_coboundary(
        self, z: "Cochain", depth: int = 3, allow_nonsmooth: bool = False
    ) -> "Cochain | SolverGaveUp":
        """A cochain b with d(b) = z, searched over splitting-generated
        supports; re-verified exactly before being returned."""
        if z.level < 1:
            raise ValueError("coboundaries live above level zero")
        if not self.is_cocycle(z):
            raise NotACocycle("the right-hand side has nonzero differential")
        if not self.fan.is_smooth() and not allow_nonsmooth:
            raise NotSmoothFan("exactness is only guaranteed for smooth fans")
        slots = self.tuples[z.level - 1]
        slot_groups = {s: self.stalk(s) for s in slots}
        constraints = []
        for t in self.tuples[z.level]:
            terms = []
            for j in range(len(t)):
                s = t[:j] + t[j + 1 :]
                terms.append((s, 1 if j % 2 == 0 else -1, self.incidence(t, j)))
            rhs = z.components.get(t, GroupRingElement.zero(self.stalk(t)))
            constraints.append(
                Constraint(key=t, target=self.stalk(t), terms=tuple(terms), rhs=rhs)
            )
        outcome = solve_pushforward_system(slot_groups, constraints, depth)
        if isinstance(outcome, SolverGaveUp):
            return outcome
        solution, _rounds = outcome
        b = Cochain(
            self,
            z.level - 1,
            {s: val for s, val in solution.items() if not val.is_zero()},
        )
        assert self.d(b) == z
        return b

    def random_cocycle(
        self,
        level: int,
        rng: random.Random,
        max_points: int = 3,
        coord_bound: int = 3,
        coeff_bound: int = 5,
        max_attempts: int = 50,
    ) -> "Cochain":
        """A genuine random cocycle: random supports per tuple, integer
        kernel of the restricted differential, random combination."""
        if level > self.top_level:
            raise LevelOverflow(f"no level {level} in this complex")

        def random_coords(q):
            return q.reduce(
                tuple(
                    rng.randint(-coord_bound, coord_bound)
                    for _ in range(q.coords_len)
                )
            )

        for _ in range(max_attempts):
            # supports mix splitting-lifts of random points in the next
            # level's stalks (so images collide there) with random points
            support = {t: set() for t in self.tuples[level]}
            if level < self.top_level:
                for t in self.tuples[level + 1]:
                    for _ in range(rng.randint(1, max_points)):
                        tgt = random_coords(self.stalk(t))
                        for j in range(len(t)):
                            s = t[:j] + t[j + 1 :]
                            support[s].add(self.incidence(t, j).lift(tgt))
            for t in self.tuples[level]:
                for _ in range(rng.randint(1 if not support[t] else 0, max_points)):
                    support[t].add(random_coords(self.stalk(t)))
            support = {t: sorted(pts) for t, pts in support.items()}
            variables = [
                (t, m) for t in self.tuples[level] for m in support[t]
            ]
            var_col = {v: k for k, v in enumerate(variables)}
            rows = []
            if level < self.top_level:
                for t in self.tuples[level + 1]:
                    images: dict = {}
                    for j in range(len(t)):
                        s = t[:j] + t[j + 1 :]
                        phi = self.incidence(t, j)
                        sign = 1 if j % 2 == 0 else -1
                        for m in support[s]:
                            tgt = phi.apply(m)
                            images.setdefault(tgt, {})
                            images[tgt][(s, m)] = images[tgt].get((s, m), 0) + sign
                    for tgt in sorted(images):
                        row = [0] * len(variables)
                        for v, coeff in images[tgt].items():
                            row[var_col[v]] += coeff
                        rows.append(row)
            basis = kernel(IntMatrix(rows, ncols=len(variables)))
            if basis.nrows == 0:
                continue
            combo = [0] * len(variables)
            for row in basis.rows:
                k = rng.randint(-coeff_bound, coeff_bound)
                combo = [a + k * b for a, b in zip(combo, row)]
            if not any(combo):
                continue
            comps = {}
            for t in self.tuples[level]:
                terms = {m: combo[var_col[(t, m)]] for m in support[t]}
                el = GroupRingElement(self.stalk(t), terms)
                if not el.is_zero():
                    comps[t] = el
            z = Cochain(self, level, comps)
            assert self.is_cocycle(z)
            return z
        raise RuntimeError("could not sample a nonzero cocycle")


class Cochain:
    """Finitely supported components on the level's tuples."""

    __slots__ = ("complex", "level", "components")

    def __init__(self, complex: CechComplex, level: int, components: dict):
        if level < 0 or level > complex.top_level:
            raise LevelOverflow(f"no level {level} in this complex")
        valid = set(complex.tuples[level])
        comps = {}
        for t, val in components.items():
            t = tuple(t)
            if t not in valid:
                raise ValueError(f"{t} is not a level-{level} tuple")
            if val.group != complex.stalk(t):
                raise ValueError(f"component at {t} lives over the wrong group")
            if not val.is_zero():
                comps[t] = val
        self.complex = complex
        self.level = level
        self.components = comps

    def component(self, t: tuple) -> GroupRingElement:
        t = tuple(t)
        return self.components.get(
            t, GroupRingElement.zero(self.complex.stalk(t))
        )

    def is_zero(self) -> bool:
        return not self.components

    def __add__(self, other: "Cochain") -> "Cochain":
        assert self.complex is other.complex and self.level == other.level
        keys = set(self.components) | set(other.components)
        return Cochain(
            self.complex,
            self.level,
            {t: self.component(t) + other.component(t) for t in keys},
        )

    def __sub__(self, other: "Cochain") -> "Cochain":
        assert self.complex is other.complex and self.level == other.level
        keys = set(self.components) | set(other.components)
        return Cochain(
            self.complex,
            self.level,
            {t: self.component(t) - other.component(t) for t in keys},
        )

    def scale(self, k: int) -> "Cochain":
        return Cochain(
            self.complex,
            self.level,
            {t: v.scale(k) for t, v in self.components.items()},
        )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Cochain)
            and self.complex is other.complex
            and self.level == other.level
            and self.components == other.components
        )

    def __repr__(self) -> str:
        return f"Cochain(level={self.level}, support={sorted(self.components)})"


def build_complex(fan: Fan) -> CechComplex:
    return CechComplex(fan)


class H0Ring:
    """Degree-zero cohomology of the cover complex: level-zero cocycles
    with componentwise ring structure.  For smooth fans this is the
    global equivariant K_0; membership is meaningful for any fan."""

    def __init__(self, complex: CechComplex):
        self.complex = complex
        self.fan = complex.fan

    def cochain(self, components: dict) -> Cochain:
        """Build a level-0 cochain from {max-cone index: element}."""
        return self.complex.cochain(
            0, {(i,): val for i, val in components.items()}
        )

    def membership(self, c: Cochain):
        """(True, None) for members; (False, witness) otherwise, the
        witness being the first index pair whose restrictions differ."""
        if c.level != 0:
            raise ValueError("membership is about level-0 cochains")
        if c.complex.top_level == 0:
            return True, None
        dc = self.complex.d(c)
        if dc.is_zero():
            return True, None
        t = sorted(dc.components)[0]
        return False, (t, dc.components[t])

    def contains(self, c: Cochain) -> bool:
        return self.membership(c)[0]

    def unit(self) -> Cochain:
        return self.complex.cochain(
            0,
            {
                (i,): GroupRingElement.one(self.complex.stalk((i,)))
                for i in range(len(self.fan.max_cones))
            },
        )

    def multiply(self, a: Cochain, b: Cochain) -> Cochain:
        assert a.level == 0 and b.level == 0
        keys = set(a.components) & set(b.components)
        return self.complex.cochain(
            0, {t: a.components[t] * b.components[t] for t in keys}
        )

    def add(self, a: Cochain, b: Cochain) -> Cochain:
        return a + b

    def restrict_to_piece(self, c: Cochain, index: int) -> GroupRingElement:
        """The image in Z[M_sigma] of one affine piece of the cover."""
        return c.component((index,))

    def character_tuple(self, m: Sequence[int]) -> Cochain:
        """The member chi^[m] on every piece, for a character m of the
        big torus; a cocycle by functoriality of the quotients."""
        comps = {}
        for i in range(len(self.fan.max_cones)):
            q = self.complex.stalk((i,))
            comps[(i,)] = GroupRingElement.character(q, m)
        return self.complex.cochain(0, comps)

    def as_section(self, c: Cochain) -> Section:
        """The same data as a section of the structure sheaf on the
        whole fan."""
        comps = {
            self.fan.max_cones[t[0]]: val for t, val in c.components.items()
        }
        for i, cone in enumerate(self.fan.max_cones):
            comps.setdefault(cone, GroupRingElement.zero(self.complex.stalk((i,))))
        return Section(self.complex.sheaf, self.fan.full_subfan(), comps)


def h0(fan: Fan) -> H0Ring:
    return H0Ring(build_complex(fan))


@dataclass
class ExactnessTrial:
    index: int
    cocycle_support: int
    solved: bool
    rounds: int | None
    witness_support: int | None
    gave_up: SolverGaveUp | None


@dataclass
class ExactnessReport:
    level: int
    trials: int
    solved: int
    resolutions: list[ExactnessTrial] = field(default_factory=list)
    witnesses: list[tuple] = field(default_factory=list)

    @property
    def all_solved(self) -> bool:
        return self.solved == self.trials


def verify_exactness(
    fan: Fan,
    level: int,
    trials: int,
    depth: int,
    seed: int,
    allow_nonsmooth: bool = False,
) -> ExactnessReport:
    """Sample random cocycles at the given level and solve each one back
    to a coboundary, re-verifying every witness exactly.

    Also re-checks d(d(.)) = 0 on the way: each sampled cocycle is
    verified to be killed by the differential before solving.
    """
    if not fan.is_smooth() and not allow_nonsmooth:
        raise NotSmoothFan("exactness is only guaranteed for smooth fans")
    if level < 1:
        raise ValueError("exactness questions start at level 1")
    complex = build_complex(fan)
    if level > complex.top_level:
        raise LevelOverflow(f"fan cover has no level {level}")
    rng = random.Random(seed)
    report = ExactnessReport(level=level, trials=trials, solved=0)
    for i in range(trials):
        z = complex.random_cocycle(level, rng)
        assert complex.is_cocycle(z)
        outcome = complex.solve_coboundary(z, depth=depth, allow_nonsmooth=allow_nonsmooth)
        if isinstance(outcome, SolverGaveUp):
            report.resolutions.append(
                ExactnessTrial(
                    index=i,
                    cocycle_support=sum(len(v.terms) for v in z.components.values()),
                    solved=False,
                    rounds=None,
                    witness_support=None,
                    gave_up=outcome,
                )
            )
            continue
        b = outcome
        assert complex.d(b) == z
        report.solved += 1
        report.resolutions.append(
            ExactnessTrial(
                index=i,
                cocycle_support=sum(len(v.terms) for v in z.components.values()),
                solved=True,
                rounds=None,
                witness_support=sum(len(v.terms) for v in b.components.values()),
                gave_up=None,
            )
        )
        report.witnesses.append((z, b))
    return report
