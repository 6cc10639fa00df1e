"""Expanding-support solver for signed pushforward equations.

The unknowns are group-ring elements x_s, one per slot, and every
constraint says that a signed sum of pushforwards equals a given
right-hand side:

    sum_i  sign_i * push_{phi_i}(x_{slot_i})  =  rhs      (over Q_target)

Such systems have infinitely many coordinates, so the solver restricts
the unknowns to finite candidate supports: right-hand-side support
points are lifted into the slots through the stored splittings of the
surjections, then the candidate sets are closed under the constraint
maps (push a candidate to a target, lift the image into every other
participating slot) for a bounded number of rounds.  On each round one
integer linear system over the chosen support is solved exactly; it is
block-diagonal in the connected components of the variable/equation
incidence graph, and the blocks are solved independently.

A failure to solve within the configured depth is reported as
``SolverGaveUp`` and is never a claim that no solution exists.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Sequence

from .intlinalg import IntMatrix, QuotientLattice, QuotientSurjection, solve
from .monoids import GroupRingElement


@dataclass(frozen=True)
class SolverGaveUp:
    """Outcome of an unsuccessful bounded search; carries the support
    sizes tried per round."""

    rounds: int
    support_sizes: tuple[int, ...]

    def __str__(self) -> str:
        return (
            f"solver gave up after {self.rounds} expansion rounds "
            f"(support sizes {list(self.support_sizes)})"
        )


@dataclass(frozen=True)
class Constraint:
    """sum of sign * pushforward(x_slot) over ``terms`` equals ``rhs``."""

    key: tuple
    target: QuotientLattice
    terms: tuple[tuple[Hashable, int, QuotientSurjection], ...]
    rhs: GroupRingElement


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, a):
        self.parent.setdefault(a, a)
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def _initial_candidates(constraints: Sequence[Constraint]) -> dict:
    cand: dict = {}
    for c in constraints:
        for t in c.rhs.support():
            for slot, _sign, phi in c.terms:
                cand.setdefault(slot, set())
                if phi.splitting is not None:
                    cand[slot].add(phi.lift(t))
    for c in constraints:
        for slot, _, _ in c.terms:
            cand.setdefault(slot, set())
    return cand


def _expand(cand: dict, constraints: Sequence[Constraint]) -> None:
    """One closure round: push candidates to targets, lift every target
    point back into each participating slot, and add joint lifts --
    points hitting prescribed targets of two constraints at once, which
    single splittings miss."""
    new_targets: dict[tuple, set] = {}
    for c in constraints:
        pts = set(c.rhs.support())
        for slot, _sign, phi in c.terms:
            for m in cand[slot]:
                pts.add(phi.apply(m))
        new_targets[c.key] = pts
    for c in constraints:
        for t in sorted(new_targets[c.key]):
            for slot, _sign, phi in c.terms:
                if phi.splitting is not None:
                    cand[slot].add(phi.lift(t))
    by_slot: dict = {}
    for c in constraints:
        for slot, _sign, phi in c.terms:
            by_slot.setdefault(slot, []).append((c.key, phi))
    for slot, involved in by_slot.items():
        source = involved[0][1].source
        if source.coords_len == 0:
            continue
        for a in range(len(involved)):
            for b in range(a + 1, len(involved)):
                _, phi1 = involved[a]
                _, phi2 = involved[b]
                stacked = IntMatrix(
                    list(phi1.matrix.rows) + list(phi2.matrix.rows),
                    ncols=source.coords_len,
                )
                for t1 in sorted(new_targets[involved[a][0]]):
                    for t2 in sorted(new_targets[involved[b][0]]):
                        m = solve(stacked, tuple(t1) + tuple(t2))
                        if m is not None:
                            cand[slot].add(source.reduce(m))


def _try_solve(cand: dict, constraints: Sequence[Constraint]) -> dict | None:
    variables = sorted(
        (slot, m) for slot, ms in cand.items() for m in ms
    )
    var_index = {v: i for i, v in enumerate(variables)}
    # materialize equations: one per (constraint, reachable target point)
    equations = []  # (eq id, {var: coeff}, rhs int)
    for c in constraints:
        pts = set(c.rhs.support())
        rows: dict[tuple, dict] = {}
        for slot, sign, phi in c.terms:
            for m in sorted(cand[slot]):
                t = phi.apply(m)
                pts.add(t)
                rows.setdefault(t, {})
                key = (slot, m)
                rows[t][key] = rows[t].get(key, 0) + sign
        for t in sorted(pts):
            coeffs = rows.get(t, {})
            rhs = c.rhs.terms.get(t, 0)
            if not coeffs and rhs != 0:
                return None
            if coeffs or rhs != 0:
                equations.append(((c.key, t), coeffs, rhs))

    uf = _UnionFind()
    for eq_id, coeffs, _rhs in equations:
        uf.union(("eq", eq_id), ("eq", eq_id))
        for v in coeffs:
            uf.union(("eq", eq_id), ("var", v))
    for v in variables:
        uf.find(("var", v))

    blocks: dict = {}
    for eq in equations:
        root = uf.find(("eq", eq[0]))
        blocks.setdefault(root, ([], []))[0].append(eq)
    for v in variables:
        root = uf.find(("var", v))
        blocks.setdefault(root, ([], []))[1].append(v)

    values = {v: 0 for v in variables}
    for eqs, vs in blocks.values():
        if not eqs:
            continue
        vs = sorted(vs)
        col = {v: i for i, v in enumerate(vs)}
        a = IntMatrix(
            [
                [coeffs.get(v, 0) for v in vs]
                for _eq_id, coeffs, _rhs in eqs
            ],
            ncols=len(vs),
        )
        b = [rhs for _eq_id, _coeffs, rhs in eqs]
        x = solve(a, b)
        if x is None:
            return None
        for v in vs:
            values[v] = x[col[v]]

    out: dict = {}
    for slot, ms in cand.items():
        out[slot] = {m: values[(slot, m)] for m in sorted(ms)}
    return out


def solve_pushforward_system(
    slot_groups: dict, constraints: Sequence[Constraint], depth: int
) -> tuple[dict[Hashable, GroupRingElement], int] | SolverGaveUp:
    """Search for group-ring unknowns satisfying all constraints.

    Returns (solution, rounds_used) on success; the solution maps every
    slot to a GroupRingElement over its group.  The caller should
    re-verify the solution exactly through its own arithmetic.
    """
    constraints = sorted(constraints, key=lambda c: c.key)
    cand = _initial_candidates(constraints)
    sizes = []
    for round_no in range(depth + 1):
        if round_no > 0:
            _expand(cand, constraints)
        sizes.append(sum(len(s) for s in cand.values()))
        raw = _try_solve(cand, constraints)
        if raw is not None:
            solution = {
                slot: GroupRingElement(slot_groups[slot], terms)
                for slot, terms in raw.items()
            }
            return solution, round_no
    return SolverGaveUp(depth, tuple(sizes))
