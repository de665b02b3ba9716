"""Guessing functions, optimal guessing moments, and the side-information encoder.

A guessing function assigns, per observed context, a permutation rank to every
source symbol; the rho-th guessing moment E[G(X|ctx)^rho] is the ambiguity
measure used throughout.  Ties between equal posteriors are broken by
ascending symbol index so every oracle is reproducible, and zero-posterior
symbols always rank after positive ones.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .prob import DomainError, JointPmf, RenyiOrder, renyi_cond_entropy


@dataclass(frozen=True)
class GuessingFunction:
    """Per-context bijection from symbols to guess ranks 1..|X|."""

    x_alphabet: tuple
    context_alphabet: tuple
    ranks: tuple  # ranks[j][i] = rank of symbol i under context j, a permutation of 1..|X|

    def __post_init__(self):
        object.__setattr__(self, "x_alphabet", tuple(self.x_alphabet))
        object.__setattr__(self, "context_alphabet", tuple(self.context_alphabet))
        object.__setattr__(self, "ranks", tuple(tuple(r) for r in self.ranks))
        n = len(self.x_alphabet)
        for row in self.ranks:
            if sorted(row) != list(range(1, n + 1)):
                raise DomainError("ranks must form a permutation of 1..|X| per context")

    def rank(self, x, ctx) -> int:
        return self.ranks[self.context_alphabet.index(ctx)][self.x_alphabet.index(x)]

    def order(self, ctx) -> tuple:
        """Symbols in guessing order for one context."""
        row = self.ranks[self.context_alphabet.index(ctx)]
        return tuple(s for _, s in sorted(zip(row, self.x_alphabet)))

    def to_json(self) -> str:
        return json.dumps({repr(c): list(self.order(c)) for c in self.context_alphabet})


def optimal_guesser(joint: JointPmf) -> GuessingFunction:
    """Rank symbols by descending posterior per context; ties by symbol index.

    `joint` is a JointPmf whose Y axis plays the role of the conditioning
    context.  Contexts of zero mass get the same deterministic index order.
    """
    nx = len(joint.x_alphabet)
    rank_rows = []
    for j in range(len(joint.y_alphabet)):
        col = [float(p) for p in joint.y_column(j)]
        order = sorted(range(nx), key=lambda i: (-col[i], i))
        row = [0] * nx
        for r, i in enumerate(order, start=1):
            row[i] = r
        rank_rows.append(tuple(row))
    return GuessingFunction(joint.x_alphabet, joint.y_alphabet, tuple(rank_rows))


def guess_moment(g: GuessingFunction, joint: JointPmf, rho: float) -> float:
    """E[G(X|ctx)^rho] under the joint law."""
    if g.x_alphabet != joint.x_alphabet or g.context_alphabet != joint.y_alphabet:
        raise DomainError("guessing function defined on different alphabets")
    total = 0.0
    for j in range(len(joint.y_alphabet)):
        row = g.ranks[j]
        for i, p in enumerate(joint.y_column(j)):
            pf = float(p)
            if pf > 0:
                total += pf * row[i] ** rho
    return total


def optimal_guess_moment(joint: JointPmf, rho: float) -> float:
    """min over guessing functions of E[G(X|ctx)^rho]: sort each context."""
    total = 0.0
    for j in range(len(joint.y_alphabet)):
        col = sorted((float(p) for p in joint.y_column(j)), reverse=True)
        total += sum(p * (r + 1) ** rho for r, p in enumerate(col) if p > 0)
    return total


def arikan_bounds(joint: JointPmf, rho: float) -> tuple[float, float]:
    """(lower, upper) bounds on the optimal guessing moment.

    upper = 2^(rho * H_a(X|Y)) at a = 1/(1+rho); lower = the same divided by
    (1+ln|X|)^rho, floored at 1.
    """
    if not rho > 0:
        raise DomainError("rho must be > 0")
    h = renyi_cond_entropy(joint, RenyiOrder.from_rho(rho))
    upper = 2.0 ** (rho * h)
    lower = max(1.0, (1.0 + math.log(len(joint.x_alphabet))) ** (-rho) * upper)
    return lower, upper


def side_info_encoder(joint: JointPmf, z_count: int) -> dict:
    """Optimal descriptor for a guessing decoder: f(x,ctx) = (rank-1) mod z_count.

    The induced optimal guesser given (ctx, Z) attains E[ceil(G*/z_count)^rho]
    exactly; `ceil_moment(joint, z_count, rho)` evaluates that target.
    """
    if z_count < 1:
        raise DomainError("z_count must be >= 1")
    g = optimal_guesser(joint)
    return {
        (x, c): (g.rank(x, c) - 1) % z_count
        for c in joint.y_alphabet
        for x in joint.x_alphabet
    }


def ceil_moment(joint: JointPmf, z_count: int, rho: float) -> float:
    """E[ceil(G*(X|ctx)/z_count)^rho] for the optimal guesser."""
    g = optimal_guesser(joint)
    total = 0.0
    for j, c in enumerate(joint.y_alphabet):
        row = g.ranks[j]
        for i, p in enumerate(joint.y_column(j)):
            pf = float(p)
            if pf > 0:
                total += pf * math.ceil(row[i] / z_count) ** rho
    return total


def encoder_guess_moment(joint: JointPmf, encoder: dict, rho: float) -> float:
    """Optimal guessing moment given (ctx, Z) for a deterministic descriptor map.

    `encoder` maps (x, ctx) to a descriptor value; the decoder observes the
    pair (ctx, z) and guesses with the posterior-sorted order.
    """
    cells: dict[tuple, float] = {}
    for j, c in enumerate(joint.y_alphabet):
        for i, x in enumerate(joint.x_alphabet):
            p = float(joint.table[i][j])
            if p > 0:
                key = (c, encoder[(x, c)])
                cells.setdefault(key, {})
                cells[key][x] = cells[key].get(x, 0.0) + p
    total = 0.0
    for group in cells.values():
        probs = sorted(group.values(), reverse=True)
        total += sum(p * (r + 1) ** rho for r, p in enumerate(probs))
    return total


def stochastic_side_info_moment(joint: JointPmf, z_rows: np.ndarray, rho: float) -> float:
    """Optimal guessing moment given (ctx, Z) for a stochastic Z-law.

    `z_rows[i, j, :]` is the conditional law of Z given (x_i, ctx_j).
    Used to certify that the deterministic remainder encoder beats random
    descriptor laws of the same cardinality.
    """
    nx, ny, nz = z_rows.shape
    total = 0.0
    for j in range(ny):
        col = np.array([float(p) for p in joint.y_column(j)])
        mass = col[:, None] * z_rows[:, j, :]  # shape (nx, nz): P(x, Z=z | ctx total mass)
        ranked = np.sort(mass, axis=0)[::-1]
        ranks = (np.arange(1, nx + 1) ** rho)[:, None]
        total += float((ranked * ranks).sum())
    return total


def side_info_lower_bound(joint: JointPmf, z_count: int, rho: float) -> float:
    """Certified floor |Z|^(-rho) * min_G E[G^rho], at least 1, for any Z-law."""
    return max(1.0, z_count ** (-rho) * optimal_guess_moment(joint, rho))


def random_joint(
    rng: np.random.Generator,
    nx: int,
    nctx: int,
    exact: bool = False,
    zeros: float = 0.0,
) -> JointPmf:
    """A seeded random joint: flat-Dirichlet cells, optionally with planted zeros.

    With `exact=True` the float draw is snapped to a rational grid so support
    logic stays exact downstream.
    """
    w = rng.dirichlet(np.ones(nx * nctx))
    if zeros > 0.0:
        mask = rng.random(nx * nctx) < zeros
        if mask.all():
            mask[rng.integers(nx * nctx)] = False
        w = np.where(mask, 0.0, w)
        w = w / w.sum()
    if exact:
        denom = 1 << 32
        counts = np.floor(w * denom).astype(np.int64)
        counts[int(np.argmax(counts))] += denom - int(counts.sum())
        cells = [Fraction(int(c), denom) for c in counts]
    else:
        cells = [float(v) for v in w]
    table = [tuple(cells[i * nctx : (i + 1) * nctx]) for i in range(nx)]
    return JointPmf(tuple(range(nx)), tuple(range(nctx)), tuple(table))
