"""Asymmetric travel-time tours between structures.

The cost matrix connects the exit pose of one node to the entry pose of
the next, so costs[i][j] != costs[j][i] in general. The solver is a
multi-start nearest-neighbor construction followed by a first-improvement
local search over 2-opt, segment-relocation (Or-opt) and
orientation-preserving 3-opt moves, run until no move in any of the three
neighborhoods improves the tour. Because the matrix is asymmetric, 2-opt
deltas re-evaluate every reversed arc exactly (via backward prefix sums)
instead of using the symmetric shortcut.

Open routes are reduced to the cycle problem with a virtual depot whose
arcs cost zero in both directions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import VehicleConfig
from .geometry import Pose

# A move must beat this margin to count as improving; guards against
# float-noise cycling in the first-improvement loops.
_EPS = 1e-12

BRUTE_FORCE_MAX_NODES = 10


@dataclass(frozen=True)
class CostMatrix:
    """n x n travel times; entry i -> j reads costs[i, j]. Diagonal unused."""

    costs: np.ndarray
    entry_poses: tuple[Pose, ...] | None = None
    exit_poses: tuple[Pose, ...] | None = None

    def __post_init__(self) -> None:
        costs = np.asarray(self.costs, dtype=float)
        if costs.ndim != 2 or costs.shape[0] != costs.shape[1]:
            raise ValueError(f"cost matrix must be square, got {costs.shape}")
        off_diag = costs[~np.eye(costs.shape[0], dtype=bool)]
        if off_diag.size and (not np.all(np.isfinite(off_diag)) or off_diag.min() < 0.0):
            raise ValueError("off-diagonal costs must be finite and >= 0")
        object.__setattr__(self, "costs", costs)

    @property
    def n(self) -> int:
        return self.costs.shape[0]


@dataclass(frozen=True)
class Tour:
    """A visiting order with its total travel cost.

    For closed tours the cost includes the return arc from the last node
    back to the first; for open routes it does not.
    """

    order: tuple[int, ...]
    cost: float
    closed: bool

    def __post_init__(self) -> None:
        if sorted(self.order) != list(range(len(self.order))):
            raise ValueError(f"tour order is not a permutation: {self.order}")


def build_cost_matrix(nodes: Sequence[tuple[Pose, Pose]], vehicle: VehicleConfig,
                      speed: float | None = None) -> CostMatrix:
    """Travel-time matrix over (entry, exit) pose pairs.

    costs[i][j] is the time to fly from node i's exit pose to node j's
    entry pose at `speed` (default: vehicle.v_travel) under the yaw-rate
    cap. Asymmetric whenever entry and exit poses differ.
    """
    if len(nodes) < 1:
        raise ValueError("need at least one node")
    if speed is None:
        speed = vehicle.v_travel
    entries = tuple(entry for entry, _ in nodes)
    exits = tuple(exit_ for _, exit_ in nodes)
    entry_pos = np.array([[p.x, p.y, p.z] for p in entries])
    exit_pos = np.array([[p.x, p.y, p.z] for p in exits])
    entry_psi = np.array([p.psi for p in entries])
    exit_psi = np.array([p.psi for p in exits])

    dist = np.linalg.norm(exit_pos[:, None, :] - entry_pos[None, :, :], axis=2)
    dpsi = np.abs((entry_psi[None, :] - exit_psi[:, None] + np.pi) % (2.0 * np.pi) - np.pi)
    costs = np.maximum(dist / speed, dpsi / vehicle.yaw_rate_max)
    np.fill_diagonal(costs, 0.0)
    return CostMatrix(costs, entries, exits)


def tour_cost(costs: np.ndarray, order: Sequence[int], closed: bool) -> float:
    """Sum of consecutive arc costs, plus the return arc iff closed."""
    total = 0.0
    for a, b in zip(order, order[1:]):
        total += costs[a, b]
    if closed and len(order) > 1:
        total += costs[order[-1], order[0]]
    return float(total)


def _nearest_neighbor(costs: np.ndarray, start: int) -> list[int]:
    m = costs.shape[0]
    order = [start]
    unvisited = np.ones(m, dtype=bool)
    unvisited[start] = False
    current = start
    for _ in range(m - 1):
        row = np.where(unvisited, costs[current], np.inf)
        current = int(np.argmin(row))
        unvisited[current] = False
        order.append(current)
    return order


def _two_opt_pass(costs: np.ndarray, order: list[int]) -> bool:
    """Exhaust the 2-opt neighborhood; first improvement, rescan after each move."""
    m = len(order)
    improved = False
    if m < 3:
        return False
    rescan = True
    while rescan:
        rescan = False
        # Prefix sums of forward and reversed arc costs along the current
        # order make the reversed-segment delta O(1).
        fwd = np.empty(m)
        bwd = np.empty(m)
        fwd[0] = bwd[0] = 0.0
        for k in range(m - 1):
            fwd[k + 1] = fwd[k] + costs[order[k], order[k + 1]]
            bwd[k + 1] = bwd[k] + costs[order[k + 1], order[k]]
        for i in range(m - 1):
            ti = order[i]
            ti1 = order[i + 1]
            for j in range(i + 2, m):
                tj = order[j]
                tj1 = order[(j + 1) % m]
                removed = costs[ti, ti1] + (fwd[j] - fwd[i + 1]) + costs[tj, tj1]
                added = costs[ti, tj] + (bwd[j] - bwd[i + 1]) + costs[ti1, tj1]
                if added - removed < -_EPS:
                    order[i + 1:j + 1] = reversed(order[i + 1:j + 1])
                    improved = True
                    rescan = True
                    break
            if rescan:
                break
    return improved


def _or_opt_pass(costs: np.ndarray, order: list[int]) -> bool:
    """Relocate segments of length 1..3, forward or reversed."""
    m = len(order)
    improved = False
    if m < 3:
        return False
    rescan = True
    while rescan:
        rescan = False
        for s in (1, 2, 3):
            if s >= m:
                break
            for p in range(0, m - s + 1):
                if p == 0 and s == m:
                    continue
                head = order[p]
                tail = order[p + s - 1]
                prev = order[(p - 1) % m]
                nxt = order[(p + s) % m]
                seg = order[p:p + s]
                internal_fwd = sum(costs[seg[a], seg[a + 1]] for a in range(s - 1))
                internal_rev = sum(costs[seg[a + 1], seg[a]] for a in range(s - 1))
                base = costs[prev, head] + internal_fwd + costs[tail, nxt]
                bridge = costs[prev, nxt]
                for q in range(m):
                    # Skip insertion points touching the segment or its old slot.
                    if p - 1 <= q <= p + s - 1 or (p == 0 and q == m - 1):
                        continue
                    tq = order[q]
                    tq1 = order[(q + 1) % m]
                    removed = base + costs[tq, tq1]
                    delta_f = (bridge + costs[tq, head] + internal_fwd
                               + costs[tail, tq1]) - removed
                    delta_r = (bridge + costs[tq, tail] + internal_rev
                               + costs[head, tq1]) - removed
                    if delta_f < -_EPS or delta_r < -_EPS:
                        piece = seg if delta_f <= delta_r else seg[::-1]
                        rest = order[:p] + order[p + s:]
                        qq = q if q < p else q - s
                        order[:] = rest[:qq + 1] + piece + rest[qq + 1:]
                        improved = True
                        rescan = True
                        break
                if rescan:
                    break
            if rescan:
                break
    return improved


def _three_opt_pass(costs: np.ndarray, order: list[int]) -> bool:
    """Orientation-preserving 3-opt: swap the two blocks between the cut arcs."""
    m = len(order)
    improved = False
    if m < 4:
        return False
    rescan = True
    while rescan:
        rescan = False
        for i in range(m - 2):
            for j in range(i + 1, m - 1):
                cut_ij = costs[order[i], order[i + 1]] + costs[order[j], order[j + 1]]
                for k in range(j + 1, m):
                    tk1 = order[(k + 1) % m]
                    removed = cut_ij + costs[order[k], tk1]
                    added = (costs[order[i], order[j + 1]]
                             + costs[order[k], order[i + 1]]
                             + costs[order[j], tk1])
                    if added - removed < -_EPS:
                        order[:] = (order[:i + 1] + order[j + 1:k + 1]
                                    + order[i + 1:j + 1] + order[k + 1:])
                        improved = True
                        rescan = True
                        break
                if rescan:
                    break
            if rescan:
                break
    return improved


def _local_search(costs: np.ndarray, order: list[int]) -> None:
    while True:
        _two_opt_pass(costs, order)
        if _or_opt_pass(costs, order):
            continue
        if _three_opt_pass(costs, order):
            continue
        break


def _solve_cycle(costs: np.ndarray, seed: int) -> list[int]:
    m = costs.shape[0]
    if m == 1:
        return [0]
    rng = np.random.default_rng(seed)
    if m <= 10:
        starts = list(range(m))
    else:
        starts = [int(v) for v in rng.choice(m, size=8, replace=False)]
    best_order: list[int] | None = None
    best_cost = np.inf
    for start in starts:
        order = _nearest_neighbor(costs, start)
        _local_search(costs, order)
        cost = tour_cost(costs, order, closed=True)
        if cost < best_cost - _EPS:
            best_cost = cost
            best_order = order
    assert best_order is not None
    return best_order


def solve_tsp(c: CostMatrix, closed: bool, seed: int = 0) -> Tour:
    """Near-optimal visiting order over the cost matrix.

    Deterministic for a given (matrix, closed, seed). The returned tour is
    locally optimal: no 2-opt, Or-opt or block-swap 3-opt move improves it.
    """
    n = c.n
    if n == 1:
        return Tour((0,), 0.0, closed)
    if closed:
        order = _solve_cycle(c.costs, seed)
        pivot = order.index(min(order))
        order = order[pivot:] + order[:pivot]
        return Tour(tuple(order), tour_cost(c.costs, order, True), True)
    # Virtual depot with zero-cost arcs turns the open-route problem into
    # a cycle problem on n + 1 nodes.
    augmented = np.zeros((n + 1, n + 1))
    augmented[:n, :n] = c.costs
    order = _solve_cycle(augmented, seed)
    pivot = order.index(n)
    order = order[pivot + 1:] + order[:pivot]
    return Tour(tuple(order), tour_cost(c.costs, order, False), False)


def brute_force_tsp(c: CostMatrix, closed: bool) -> Tour:
    """Exact optimum by exhaustive enumeration; rejects n > 10."""
    n = c.n
    if n > BRUTE_FORCE_MAX_NODES:
        raise ValueError(f"brute force limited to n <= {BRUTE_FORCE_MAX_NODES}, got {n}")
    if n == 1:
        return Tour((0,), 0.0, closed)
    costs = c.costs
    best_order: tuple[int, ...] | None = None
    best_cost = np.inf
    if closed:
        # Cycles are rotation-invariant, so fixing the first node
        # enumerates each directed cycle exactly once.
        for perm in itertools.permutations(range(1, n)):
            order = (0,) + perm
            cost = tour_cost(costs, order, True)
            if cost < best_cost:
                best_cost = cost
                best_order = order
    else:
        for perm in itertools.permutations(range(n)):
            cost = tour_cost(costs, perm, False)
            if cost < best_cost:
                best_cost = cost
                best_order = perm
    assert best_order is not None
    return Tour(best_order, float(best_cost), closed)


def is_two_opt_optimal(c: CostMatrix, tour: Tour, tolerance: float = 1e-9) -> bool:
    """True iff no single 2-opt move improves the tour by more than tolerance.

    Open routes are checked on their virtual-depot cycle, which is the
    search space the solver actually optimized.
    """
    if tour.closed:
        costs = c.costs
        order = list(tour.order)
    else:
        n = c.n
        costs = np.zeros((n + 1, n + 1))
        costs[:n, :n] = c.costs
        order = [n] + list(tour.order)
    m = len(order)
    if m < 3:
        return True
    for i in range(m - 1):
        for j in range(i + 2, m):
            removed = (costs[order[i], order[i + 1]]
                       + sum(costs[order[k], order[k + 1]] for k in range(i + 1, j))
                       + costs[order[j], order[(j + 1) % m]])
            added = (costs[order[i], order[j]]
                     + sum(costs[order[k + 1], order[k]] for k in range(i + 1, j))
                     + costs[order[i + 1], order[(j + 1) % m]])
            if added - removed < -tolerance:
                return False
    return True
