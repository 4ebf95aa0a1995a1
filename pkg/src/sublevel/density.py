"""Largest subsets of ``{1..N}^d`` free of homothetic copies ``x + nS``.

``n`` ranges over nonzero integers of both signs. A one-point pattern is
contained in every nonempty set, so its maximum is 0.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence

Cell = tuple[int, ...]

#: Largest grid (number of cells) handed to the exact solver.
EXACT_CELL_CAP = 4096
#: Search nodes the exact solver may visit before giving up.
NODE_LIMIT = 2_000_000


class SolverCapExceeded(ValueError):
    pass


@dataclass(frozen=True)
class PatternInstance:
    pattern: tuple[Cell, ...]
    grid_side: int

    def __post_init__(self):
        pat = tuple(tuple(int(a) for a in p) for p in self.pattern)
        if not pat:
            raise ValueError("pattern must be nonempty")
        if len({len(p) for p in pat}) != 1:
            raise ValueError("pattern points have different dimensions")
        if len(set(pat)) != len(pat):
            raise ValueError("pattern points must be distinct")
        if self.grid_side < 1:
            raise ValueError("grid side must be >= 1")
        object.__setattr__(self, "pattern", pat)

    @property
    def dimension(self) -> int:
        return len(self.pattern[0])

    @property
    def cell_count(self) -> int:
        return self.grid_side**self.dimension

    def cells(self) -> list[Cell]:
        """Grid cells in row-major order."""
        return list(product(range(1, self.grid_side + 1), repeat=self.dimension))


def enumerate_copies(inst: PatternInstance) -> list[frozenset[Cell]]:
    """All distinct sets ``x + nS`` inside the grid, ``n != 0``."""
    N, d = inst.grid_side, inst.dimension
    if len(inst.pattern) == 1:
        return [frozenset([c]) for c in inst.cells()]
    seen: set[frozenset[Cell]] = set()
    out = []
    for n in [k for k in range(1, N) for k in (k, -k)]:
        scaled = [tuple(n * a for a in p) for p in inst.pattern]
        lo = [1 - min(p[i] for p in scaled) for i in range(d)]
        hi = [N - max(p[i] for p in scaled) for i in range(d)]
        if any(a > b for a, b in zip(lo, hi)):
            continue
        for x in product(*(range(a, b + 1) for a, b in zip(lo, hi))):
            copy = frozenset(tuple(xi + pi for xi, pi in zip(x, p)) for p in scaled)
            if copy not in seen:
                seen.add(copy)
                out.append(copy)
    return out


def is_pattern_free(A: Iterable[Sequence[int]], pattern: Sequence[Sequence[int]], N: int) -> bool:
    """Independent check: no ``x + nS`` (n != 0) lies inside ``A``.

    ``A`` is assumed to sit inside ``{1..N}^d``; every copy is anchored at a
    point of ``A`` matched to some pattern point.
    """
    A = {tuple(a) for a in A}
    pattern = [tuple(p) for p in pattern]
    if not A:
        return True
    if len(pattern) == 1:
        return False
    for a in A:
        for s0 in pattern:
            for n in range(-(N - 1), N):
                if n == 0:
                    continue
                x = tuple(ai - n * si for ai, si in zip(a, s0))
                if all(tuple(xi + n * si for xi, si in zip(x, s)) in A for s in pattern):
                    return False
    return True


def _copy_masks(inst: PatternInstance, cells: list[Cell]):
    index = {c: i for i, c in enumerate(cells)}
    by_cell: list[list[int]] = [[] for _ in cells]
    for copy in enumerate_copies(inst):
        mask = 0
        for c in copy:
            mask |= 1 << index[c]
        for c in copy:
            by_cell[index[c]].append(mask)
    return by_cell


def greedy_pattern_free(inst: PatternInstance, seed: int = 0) -> tuple[Cell, ...]:
    """Randomized greedy insertion; a lower bound for :func:`max_pattern_free`."""
    if len(inst.pattern) == 1:
        return ()
    cells = inst.cells()
    by_cell = _copy_masks(inst, cells)
    order = list(range(len(cells)))
    random.Random(seed).shuffle(order)
    chosen = 0
    for i in order:
        bit = 1 << i
        if all((m & ~chosen) != bit for m in by_cell[i]):
            chosen |= bit
    return tuple(c for i, c in enumerate(cells) if chosen >> i & 1)


def max_pattern_free(
    inst: PatternInstance, cap: int = EXACT_CELL_CAP, node_limit: int = NODE_LIMIT
) -> tuple[int, tuple[Cell, ...]]:
    """Exact maximum size of a pattern-free subset, with one maximizer.

    Depth-first branch and bound over cells in row-major order, include
    branch first. Including a cell forbids every cell that would complete a
    copy; the bound is current size plus the undecided, unforbidden cells.
    """
    if inst.cell_count > cap:
        raise SolverCapExceeded(
            f"{inst.cell_count} cells exceed the exact-solver cap of {cap}; "
            "use greedy_pattern_free"
        )
    if len(inst.pattern) == 1:
        return 0, ()
    cells = inst.cells()
    n = len(cells)
    by_cell = _copy_masks(inst, cells)

    incumbent = greedy_pattern_free(inst, seed=0)
    index = {c: i for i, c in enumerate(cells)}
    best_size = len(incumbent)
    best_mask = sum(1 << index[c] for c in incumbent)

    full = (1 << n) - 1
    # (next cell, chosen mask, forbidden mask, size)
    stack = [(0, 0, 0, 0)]
    nodes = 0
    while stack:
        nodes += 1
        if nodes > node_limit:
            raise SolverCapExceeded(f"exact search exceeded {node_limit} nodes")
        i, chosen, banned, size = stack.pop()
        undecided = full & ~((1 << i) - 1) & ~banned
        if size + undecided.bit_count() <= best_size:
            continue
        while i < n and banned >> i & 1:
            i += 1
        if i == n:
            if size > best_size:
                best_size, best_mask = size, chosen
            continue
        bit = 1 << i
        stack.append((i + 1, chosen, banned, size))
        new_banned = banned
        ok = True
        for m in by_cell[i]:
            rest = m & ~chosen & ~bit
            if rest == 0:
                ok = False
                break
            if rest & (rest - 1) == 0:
                new_banned |= rest
        if ok:
            stack.append((i + 1, chosen | bit, new_banned, size + 1))
    return best_size, tuple(c for k, c in enumerate(cells) if best_mask >> k & 1)


@dataclass(frozen=True)
class DensityRow:
    N: int
    max_size: int
    density: Fraction
    example: tuple[Cell, ...]
    exact: bool


def density_curve(
    pattern: Sequence[Sequence[int]],
    N_values: Iterable[int],
    cap: int = EXACT_CELL_CAP,
    seed: int = 0,
    greedy_restarts: int = 32,
) -> list[DensityRow]:
    """Maximum pattern-free sizes per grid side.

    Rows beyond the cell cap or the node limit fall back to the best of
    ``greedy_restarts`` greedy runs and are marked ``exact=False``.
    """
    rows = []
    for N in N_values:
        inst = PatternInstance(tuple(map(tuple, pattern)), N)
        try:
            size, example = max_pattern_free(inst, cap)
            exact = True
        except SolverCapExceeded:
            example = max(
                (greedy_pattern_free(inst, seed + k) for k in range(greedy_restarts)), key=len
            )
            size, exact = len(example), False
        rows.append(DensityRow(N, size, Fraction(size, inst.cell_count), example, exact))
    return rows
