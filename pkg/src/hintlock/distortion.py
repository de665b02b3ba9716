"""Guessing a reconstruction within a distortion budget.

Guesses take the form "is the reconstruction xhat within average distortion
Delta of the source tuple?".  A guessing function orders the reconstruction
tuples; its success function ranks each source tuple by the first guess that
lands within Delta, and the reconstruction function records that first hit.
Every distortion table must offer a zero-distortion reconstruction for each
source symbol, which guarantees the scan terminates.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .guessing import GuessingFunction
from .prob import BudgetExceededError, DomainError, JointPmf, product_pmf

BALL_SLACK = 1e-12  # float-mode boundary slack for "within Delta"


@dataclass(frozen=True)
class DistortionSpec:
    x_alphabet: tuple
    xhat_alphabet: tuple
    d: tuple  # |X| x |Xhat| nonnegative entries
    delta: float

    def __post_init__(self):
        object.__setattr__(self, "x_alphabet", tuple(self.x_alphabet))
        object.__setattr__(self, "xhat_alphabet", tuple(self.xhat_alphabet))
        object.__setattr__(self, "d", tuple(tuple(row) for row in self.d))
        if self.delta < 0:
            raise DomainError("delta must be nonnegative")
        for i, row in enumerate(self.d):
            if len(row) != len(self.xhat_alphabet):
                raise DomainError("distortion table shape mismatch")
            if min(row) != 0:
                raise DomainError(
                    f"row {i}: every source symbol needs a zero-distortion reconstruction"
                )
            if any(v < 0 for v in row):
                raise DomainError("distortion entries must be nonnegative")

    @classmethod
    def hamming(cls, alphabet, delta: float = 0.0) -> "DistortionSpec":
        n = len(alphabet)
        d = tuple(tuple(0.0 if i == j else 1.0 for j in range(n)) for i in range(n))
        return cls(tuple(alphabet), tuple(alphabet), d, delta)

    def dist(self, x, xhat) -> float:
        return self.d[self.x_alphabet.index(x)][self.xhat_alphabet.index(xhat)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["", *map(repr, self.xhat_alphabet)])
        for x, row in zip(self.x_alphabet, self.d):
            w.writerow([repr(x), *row])
        return buf.getvalue()


def avg_distortion(x_tuple, xhat_tuple, spec: DistortionSpec) -> float:
    if len(x_tuple) != len(xhat_tuple):
        raise DomainError("tuples must have equal length")
    return sum(spec.dist(a, b) for a, b in zip(x_tuple, xhat_tuple)) / len(x_tuple)


def within(x_tuple, xhat_tuple, spec: DistortionSpec) -> bool:
    return avg_distortion(x_tuple, xhat_tuple, spec) <= spec.delta + BALL_SLACK


def tuple_alphabet(alphabet, n: int) -> tuple:
    out = [()]
    for _ in range(n):
        out = [t + (s,) for t in out for s in alphabet]
    return tuple(out)


@dataclass(frozen=True)
class SuccessFunction:
    """Ranks of source tuples induced by a guessing order on reconstructions."""

    ghat: GuessingFunction  # over xhat tuples, per context
    spec: DistortionSpec
    ranks: dict  # (x_tuple, ctx) -> rank of the first within-Delta guess
    recon: dict  # (x_tuple, ctx) -> the reconstruction at that rank
    certified_optimal: bool = False

    def moment(self, joint: JointPmf, rho: float) -> float:
        total = 0.0
        for i, x in enumerate(joint.x_alphabet):
            for j, c in enumerate(joint.y_alphabet):
                p = float(joint.table[i][j])
                if p > 0:
                    total += p * self.ranks[(x, c)] ** rho
        return total

    def to_json(self) -> str:
        return json.dumps({repr(k): v for k, v in sorted(self.ranks.items(), key=repr)})


def success_function(
    ghat: GuessingFunction, spec: DistortionSpec, joint: JointPmf, certified: bool = False
) -> SuccessFunction:
    """Scan each context's guessing order for the first within-Delta hit."""
    ranks: dict = {}
    recon: dict = {}
    for c in ghat.context_alphabet:
        order = ghat.order(c)
        for x in joint.x_alphabet:
            for j, xhat in enumerate(order, start=1):
                if within(x, xhat, spec):
                    ranks[(x, c)] = j
                    recon[(x, c)] = xhat
                    break
            else:
                raise DomainError(f"no reconstruction within delta for {x!r}")
    return SuccessFunction(ghat, spec, ranks, recon, certified)


def _ball_matrix(x_tuples, xhat_tuples, spec: DistortionSpec) -> np.ndarray:
    return np.array([[within(x, xh, spec) for xh in xhat_tuples] for x in x_tuples])


def brute_optimal_distortion_guesser(
    spec: DistortionSpec, joint: JointPmf, n: int, rho: float, budget: int = 8
) -> tuple[SuccessFunction, float]:
    """Exact factorial search over reconstruction orderings; |Xhat|^n <= budget.

    This is the independent oracle every other distortion routine is checked
    against.  Contexts are optimized separately (the objective is additive).
    """
    big = product_pmf(joint, n) if n > 1 else _tuple_wrap(joint)
    xhat_tuples = tuple_alphabet(spec.xhat_alphabet, n)
    if len(xhat_tuples) > budget:
        raise BudgetExceededError(f"|Xhat|^n = {len(xhat_tuples)} exceeds budget {budget}")
    balls = _ball_matrix(big.x_alphabet, xhat_tuples, spec)
    nh = len(xhat_tuples)
    perms = np.array(list(permutations(range(nh))))
    best_rows = []
    total = 0.0
    for j in range(len(big.y_alphabet)):
        col = np.array([float(p) for p in big.y_column(j)])
        hits = balls[:, perms]  # (nx, nperms, nh)
        first = hits.argmax(axis=2) + 1  # first within-Delta position per (x, perm)
        moments = (col[:, None] * first.astype(float) ** rho).sum(axis=0)
        k = int(moments.argmin())
        total += float(moments[k])
        best_rows.append(perms[k])
    rank_rows = []
    for row in best_rows:
        rr = [0] * nh
        for pos, idx in enumerate(row, start=1):
            rr[idx] = pos
        rank_rows.append(tuple(rr))
    ghat = GuessingFunction(xhat_tuples, big.y_alphabet, tuple(rank_rows))
    sf = success_function(ghat, spec, big, certified=True)
    return sf, total


def greedy_cover_guesser(spec: DistortionSpec, joint: JointPmf, n: int, rho: float) -> SuccessFunction:
    """Heuristic: repeatedly guess the reconstruction covering the most
    remaining posterior mass (ties by index).  Not certified optimal; measure
    its gap against the brute-force oracle where that is feasible."""
    big = product_pmf(joint, n) if n > 1 else _tuple_wrap(joint)
    xhat_tuples = tuple_alphabet(spec.xhat_alphabet, n)
    balls = _ball_matrix(big.x_alphabet, xhat_tuples, spec)
    nh = len(xhat_tuples)
    rank_rows = []
    for j in range(len(big.y_alphabet)):
        col = np.array([float(p) for p in big.y_column(j)])
        remaining = col.copy()
        order = []
        unused = list(range(nh))
        while remaining.sum() > 0 and unused:
            cover = [(float(remaining[balls[:, h]].sum()), h) for h in unused]
            _, h = max(cover, key=lambda t: (t[0], -t[1]))
            order.append(h)
            unused.remove(h)
            remaining = np.where(balls[:, h], 0.0, remaining)
        order.extend(unused)
        rr = [0] * nh
        for pos, idx in enumerate(order, start=1):
            rr[idx] = pos
        rank_rows.append(tuple(rr))
    ghat = GuessingFunction(xhat_tuples, big.y_alphabet, tuple(rank_rows))
    return success_function(ghat, spec, big)


def _tuple_wrap(joint: JointPmf) -> JointPmf:
    """Lift symbols to length-1 tuples so n = 1 shares the tuple code paths."""
    return JointPmf(
        tuple((x,) for x in joint.x_alphabet),
        joint.y_alphabet,
        joint.table,
    )


def _sf_joint(sf: SuccessFunction, joint: JointPmf, n: int) -> JointPmf:
    return product_pmf(joint, n) if n > 1 else _tuple_wrap(joint)


def rd_side_info_encoder(
    sf: SuccessFunction, joint: JointPmf, n: int, z_count: int, rho: float
) -> tuple[dict, dict]:
    """Descriptor Z from the reconstruction's rank remainder, plus bound checks.

    Returns (encoder map, report) where report carries the achieved moment,
    the ceil-moment target, and the cardinality floor.  Requires an
    oracle-certified optimal success function.
    """
    if not sf.certified_optimal:
        raise DomainError("side-information construction needs an oracle-certified optimal input")
    big = _sf_joint(sf, joint, n)
    enc = {
        (x, c): (sf.ghat.rank(sf.recon[(x, c)], c) - 1) % z_count
        for c in big.y_alphabet
        for x in big.x_alphabet
    }
    ceil_target = 0.0
    for i, x in enumerate(big.x_alphabet):
        for j, c in enumerate(big.y_alphabet):
            p = float(big.table[i][j])
            if p > 0:
                ceil_target += p * math.ceil(sf.ranks[(x, c)] / z_count) ** rho
    achieved = _optimal_rd_moment_given(big, sf.spec, enc, rho)
    floor = z_count ** (-rho) * sf.moment(big, rho)
    report = {"achieved": achieved, "ceil_target": ceil_target, "floor": max(1.0, floor)}
    return enc, report


def _optimal_rd_moment_given(big: JointPmf, spec: DistortionSpec, enc: dict, rho: float) -> float:
    """Exact optimal distortion-guessing moment given (ctx, Z): brute per cell group."""
    xhat_tuples = tuple_alphabet(spec.xhat_alphabet, len(big.x_alphabet[0]))
    balls = _ball_matrix(big.x_alphabet, xhat_tuples, spec)
    xi = {x: i for i, x in enumerate(big.x_alphabet)}
    groups: dict = {}
    for i, x in enumerate(big.x_alphabet):
        for j, c in enumerate(big.y_alphabet):
            p = float(big.table[i][j])
            if p > 0:
                groups.setdefault((c, enc[(x, c)]), []).append((x, p))
    nh = len(xhat_tuples)
    if math.factorial(nh) > 50000:
        raise BudgetExceededError("refined-context oracle needs |Xhat|^n small")
    perms = np.array(list(permutations(range(nh))))
    total = 0.0
    for members in groups.values():
        col = np.zeros(len(big.x_alphabet))
        for x, p in members:
            col[xi[x]] += p
        hits = balls[:, perms]
        first = hits.argmax(axis=2) + 1
        moments = (col[:, None] * first.astype(float) ** rho).sum(axis=0)
        total += float(moments.min())
    return total


def rd_encoder_from_guessing(
    sf: SuccessFunction, joint: JointPmf, n: int, omega: int, z_count: int, rho: float
) -> tuple[dict, dict, float]:
    """Offset/refinement task-encoder driven by the success function.

    Returns (encoder, lists of reconstructions, list moment).  The lists
    satisfy the fidelity requirement by construction (they contain the
    realized reconstruction) and E[|L|^rho] <= E[ceil(G_Delta/omega)^rho].
    """
    big = _sf_joint(sf, joint, n)
    nh = len(sf.ghat.x_alphabet)
    ns = 1 + math.floor(math.log2(math.ceil(nh / omega)))
    if not 1 <= omega <= nh:
        raise DomainError("omega must be in 1..|Xhat|^n")
    if z_count < omega * ns:
        raise DomainError("descriptor capacity violated")
    enc: dict = {}
    lists: dict = {}
    for i, x in enumerate(big.x_alphabet):
        for j, c in enumerate(big.y_alphabet):
            rank = sf.ranks[(x, c)]
            o = (rank - 1) % omega
            s = math.floor(math.log2(math.ceil(rank / omega)))
            z = o * ns + s
            enc[(x, c)] = z
            if float(big.table[i][j]) > 0:
                lists.setdefault((c, z), set()).add(sf.recon[(x, c)])
    lists = {k: tuple(sorted(v, key=repr)) for k, v in lists.items()}
    moment = 0.0
    for i, x in enumerate(big.x_alphabet):
        for j, c in enumerate(big.y_alphabet):
            p = float(big.table[i][j])
            if p > 0:
                moment += p * len(lists[(c, enc[(x, c)])]) ** rho
    return enc, lists, moment


def rd_guessing_from_lists(
    lists: dict, enc: dict, spec: DistortionSpec, joint: JointPmf, n: int
) -> SuccessFunction:
    """Order reconstruction lists by size to induce a guessing function.

    `lists` maps (ctx, z) to reconstruction tuples, `enc` maps (x_tuple, ctx)
    to z.  Every positive-mass (x, ctx) must have a within-Delta member in its
    list (fidelity); violations raise DomainError.
    """
    big = product_pmf(joint, n) if n > 1 else _tuple_wrap(joint)
    for i, x in enumerate(big.x_alphabet):
        for j, c in enumerate(big.y_alphabet):
            if float(big.table[i][j]) > 0:
                members = lists.get((c, enc[(x, c)]), ())
                if not any(within(x, xh, spec) for xh in members):
                    raise DomainError(f"fidelity violation at ({x!r}, {c!r})")
    xhat_tuples = tuple_alphabet(spec.xhat_alphabet, n)
    hi = {xh: i for i, xh in enumerate(xhat_tuples)}
    rank_rows = []
    for c in big.y_alphabet:
        ctx_lists = sorted(
            ((z, mem) for (cc, z), mem in lists.items() if cc == c),
            key=lambda kv: (len(kv[1]), repr(kv[0])),
        )
        order: list = []
        seen = set()
        for _, mem in ctx_lists:
            for xh in sorted(mem, key=lambda t: hi[t]):
                if xh not in seen:
                    seen.add(xh)
                    order.append(xh)
        for xh in xhat_tuples:
            if xh not in seen:
                seen.add(xh)
                order.append(xh)
        rr = [0] * len(xhat_tuples)
        for pos, xh in enumerate(order, start=1):
            rr[hi[xh]] = pos
        rank_rows.append(tuple(rr))
    ghat = GuessingFunction(xhat_tuples, big.y_alphabet, tuple(rank_rows))
    return success_function(ghat, spec, big)
