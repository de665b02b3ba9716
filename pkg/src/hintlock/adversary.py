"""Exact adversary oracles shared by the two-hint and multi-disk schemes.

A realized scheme is flattened into *cells*: one positive-mass realization
(prob, x, views), where `views` lists the contexts the adversary's accomplice
can steer this realization into (one per revealable hint subset, each context
id already carrying the side information and the revealed values).

Eve's exact ambiguity, min over accomplice maps of the optimal guessing
moment given (context, revealed values), reduces to a min-cost assignment:
within a context the optimal order pairs larger masses with smaller ranks, so
jointly choosing routes and ranks is a bipartite matching of cells to
(context, rank-position) slots with cost prob * position^rho.  The reduction
is exact whenever no two distinct cells share the same (x, context) pair;
otherwise routing both into that context would merge their posterior mass,
which the matching cannot price, and we fall back to exhaustive enumeration
of accomplice maps (or certified bounds when over budget).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations, product

import numpy as np
from scipy.optimize import linear_sum_assignment

from .prob import BudgetExceededError


@dataclass(frozen=True)
class Cell:
    prob: float
    x: object
    views: tuple  # hashable context ids, one per revealable subset


def _aggregate_moment(groups: dict, rho: float) -> float:
    """Sum over contexts of the optimal (posterior-sorted) guessing moment."""
    total = 0.0
    for by_x in groups.values():
        masses = sorted(by_x.values(), reverse=True)
        total += sum(p * (r + 1) ** rho for r, p in enumerate(masses))
    return total


def moment_for_assignment(cells: list[Cell], choice: list[int], rho: float) -> float:
    """Objective for one accomplice map: cells routed per `choice`, then sorted."""
    groups: dict = {}
    for cell, k in zip(cells, choice):
        ctx = cell.views[k]
        groups.setdefault(ctx, {})
        groups[ctx][cell.x] = groups[ctx].get(cell.x, 0.0) + cell.prob
    return _aggregate_moment(groups, rho)


def moment_for_constant(cells: list[Cell], k: int, rho: float) -> float:
    return moment_for_assignment(cells, [k] * len(cells), rho)


def has_mergeable_cells(cells: list[Cell]) -> bool:
    """True if two distinct cells could land in one context with the same x."""
    seen = set()
    for cell in cells:
        for ctx in set(cell.views):
            key = (cell.x, ctx)
            if key in seen:
                return True
            seen.add(key)
    return False


def _components(cells: list[Cell]) -> list[list[Cell]]:
    """Split cells into connected components of the shared-context graph."""
    parent = list(range(len(cells)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    by_ctx: dict = {}
    for i, cell in enumerate(cells):
        for ctx in cell.views:
            by_ctx.setdefault(ctx, []).append(i)
    for members in by_ctx.values():
        for j in members[1:]:
            a, b = find(members[0]), find(j)
            parent[a] = b
    comps: dict = {}
    for i in range(len(cells)):
        comps.setdefault(find(i), []).append(cells[i])
    return list(comps.values())


def eve_exact_matching(cells: list[Cell], rho: float) -> float:
    """Exact accomplice-optimal moment via min-cost assignment.

    Raises BudgetExceededError if cells can merge (see module docstring); the
    caller should then use `eve_exact_enumeration` or bounds.
    """
    if has_mergeable_cells(cells):
        raise BudgetExceededError("mergeable cells: matching reduction is not exact here")
    total = 0.0
    for comp in _components(cells):
        incident: dict = {}
        for i, cell in enumerate(comp):
            for ctx in set(cell.views):
                incident.setdefault(ctx, []).append(i)
        slots = []  # (ctx, position)
        for ctx, members in incident.items():
            slots.extend((ctx, t) for t in range(1, len(members) + 1))
        big = 1e18
        cost = np.full((len(comp), len(slots)), big)
        slot_of_ctx: dict = {}
        for s, (ctx, t) in enumerate(slots):
            slot_of_ctx.setdefault(ctx, []).append((s, t))
        for i, cell in enumerate(comp):
            for ctx in set(cell.views):
                for s, t in slot_of_ctx[ctx]:
                    cost[i, s] = cell.prob * t**rho
        rows, cols = linear_sum_assignment(cost)
        comp_cost = float(cost[rows, cols].sum())
        if comp_cost >= big:
            raise RuntimeError("assignment failed to avoid forbidden slots")
        total += comp_cost
    return total


def eve_exact_enumeration(cells: list[Cell], rho: float, budget_bits: int = 26) -> float:
    """Exact accomplice-optimal moment by exhausting deterministic maps.

    Valid for arbitrary cells (handles merging).  Components are enumerated
    independently; each must satisfy n_cells * log2(n_views) <= budget_bits.
    """
    total = 0.0
    for comp in _components(cells):
        options = [len(c.views) for c in comp]
        bits = sum(math.log2(o) for o in options if o > 1)
        if bits > budget_bits:
            raise BudgetExceededError(
                f"component needs {bits:.1f} assignment bits > budget {budget_bits}"
            )
        if all(o == 1 for o in options):
            total += moment_for_constant(comp, 0, rho)
            continue
        total += _enumerate_component(comp, rho)
    return total


def _enumerate_component(comp: list[Cell], rho: float) -> float:
    options = [len(c.views) for c in comp]
    contexts = sorted({ctx for c in comp for ctx in c.views}, key=repr)
    return _enumerate_component_tables(comp, rho, options, contexts)


def _enumerate_component_tables(comp, rho, options, contexts) -> float:
    """Vectorized enumeration: per-context moment tables indexed by sub-mask.

    Table entries aggregate masses by x before sorting, so cells that merge
    inside a context are priced correctly.
    """
    incidence = []  # per context: list of (cell index, option indices routing here)
    for ctx in contexts:
        inc = []
        for i, cell in enumerate(comp):
            ks = tuple(k for k, v in enumerate(cell.views) if v == ctx)
            if ks:
                inc.append((i, ks))
        if len(inc) > 22:
            raise BudgetExceededError(f"context incident to {len(inc)} cells: table too large")
        incidence.append(inc)
    tables = []
    for inc in incidence:
        d = len(inc)
        table = np.zeros(1 << d)
        members = [(comp[i].x, comp[i].prob) for i, _ in inc]
        for mask in range(1, 1 << d):
            by_x: dict = {}
            for t in range(d):
                if mask >> t & 1:
                    x, p = members[t]
                    by_x[x] = by_x.get(x, 0.0) + p
            present = sorted(by_x.values(), reverse=True)
            table[mask] = sum(p * (r + 1) ** rho for r, p in enumerate(present))
        tables.append(table)
    strides = np.ones(len(comp), dtype=np.int64)
    for i in range(len(comp) - 2, -1, -1):
        strides[i] = strides[i + 1] * options[i + 1]
    total_assignments = int(strides[0]) * options[0]
    best = math.inf
    chunk = 1 << 18
    for start in range(0, total_assignments, chunk):
        idx = np.arange(start, min(start + chunk, total_assignments), dtype=np.int64)
        digits = [(idx // strides[i]) % options[i] for i in range(len(comp))]
        obj = np.zeros(len(idx))
        for inc, table in zip(incidence, tables):
            submask = np.zeros(len(idx), dtype=np.int64)
            for t, (i, ks) in enumerate(inc):
                hit = digits[i] == ks[0]
                for k in ks[1:]:
                    hit |= digits[i] == k
                submask |= hit.astype(np.int64) << t
            obj += table[submask]
        best = min(best, float(obj.min()))
    return best


def eve_local_search(cells: list[Cell], rho: float, rounds: int = 50) -> float:
    """Alternating accomplice/guesser descent; a certified upper bound on Eve.

    Starts from each constant route and from a per-cell greedy, keeps the best
    reachable value.  Every iterate corresponds to an actual deterministic
    accomplice map, so the result always upper-bounds the exact minimum.
    """
    n = len(cells)
    n_opt = max(len(c.views) for c in cells)
    best = math.inf
    starts = [[k % len(c.views) for c in cells] for k in range(n_opt)]
    for choice in starts:
        val = moment_for_assignment(cells, choice, rho)
        for _ in range(rounds):
            ranks: dict = {}
            groups: dict = {}
            for cell, k in zip(cells, choice):
                ctx = cell.views[k]
                groups.setdefault(ctx, {})
                groups[ctx][cell.x] = groups[ctx].get(cell.x, 0.0) + cell.prob
            for ctx, by_x in groups.items():
                for r, (x, _) in enumerate(
                    sorted(by_x.items(), key=lambda kv: (-kv[1], repr(kv[0]))), start=1
                ):
                    ranks[(ctx, x)] = r
            new_choice = []
            for cell in cells:
                # unseen (ctx, x) would enter at the context's next free rank
                sizes = {ctx: len(by_x) for ctx, by_x in groups.items()}
                options = []
                for k, ctx in enumerate(cell.views):
                    r = ranks.get((ctx, cell.x), sizes.get(ctx, 0) + 1)
                    options.append((r, k))
                new_choice.append(min(options)[1])
            new_val = moment_for_assignment(cells, new_choice, rho)
            if new_val >= val - 1e-15:
                break
            choice, val = new_choice, new_val
        best = min(best, val)
    return best


def eve_strategy_pair_bruteforce(cells: list[Cell], x_alphabet: tuple, rho: float, budget: int = 10**7) -> float:
    """min over per-context rank tables of E[min over views of rank(x)]^rho.

    Factorial cross-check of the accomplice formulation; only for tiny
    instances.
    """
    contexts = sorted({ctx for c in cells for ctx in c.views}, key=repr)
    n = len(x_alphabet)
    perms = list(permutations(range(1, n + 1)))
    if len(perms) ** len(contexts) > budget:
        raise BudgetExceededError("strategy-pair enumeration too large")
    xi = {x: i for i, x in enumerate(x_alphabet)}
    best = math.inf
    for combo in product(perms, repeat=len(contexts)):
        table = dict(zip(contexts, combo))
        val = 0.0
        for cell in cells:
            r = min(table[ctx][xi[cell.x]] for ctx in cell.views)
            val += cell.prob * r**rho
        if val < best:
            best = val
    return best


def bob_minmax_bracket(cells: list[Cell], rho: float) -> tuple[float, float]:
    """(lower, upper) for Bob's min-max guessing ambiguity.

    lower: best fixed subset, i.e. max over view positions of the per-subset
    optimal moment.  upper: per-subset optimal guessers evaluated under the
    worst-case per-realization subset.  The bracket closes whenever every
    revealable subset pins down the same posterior (true for every scheme
    built here).
    """
    n_opt = {len(c.views) for c in cells}
    if len(n_opt) != 1:
        raise ValueError("all cells must offer the same number of views")
    k_count = n_opt.pop()
    lower = max(moment_for_constant(cells, k, rho) for k in range(k_count))
    groups: dict = {}
    for cell in cells:
        for ctx in cell.views:
            groups.setdefault(ctx, {})
            groups[ctx][cell.x] = groups[ctx].get(cell.x, 0.0) + cell.prob
    ranks: dict = {}
    for ctx, by_x in groups.items():
        for r, (x, _) in enumerate(
            sorted(by_x.items(), key=lambda kv: (-kv[1], repr(kv[0]))), start=1
        ):
            ranks[(ctx, x)] = r
    upper = sum(
        cell.prob * max(ranks[(ctx, cell.x)] for ctx in cell.views) ** rho for cell in cells
    )
    return lower, upper
