"""Task-encoders, decoding lists, derandomization, and the guess/list conversions.

A task-encoder maps each source symbol (given a context) to a short
description; its decoder outputs the list of all symbols with positive
posterior given the description.  List membership is support-defined, so all
the machinery here works on exact zeros: a tiny positive posterior still puts
a symbol in the list.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from fractions import Fraction

from .prob import (
    AlphabetMismatchError,
    DomainError,
    JointPmf,
    RenyiOrder,
    renyi_cond_entropy,
)
from .guessing import GuessingFunction


@dataclass(frozen=True)
class DetTaskEncoder:
    """Deterministic description map: (x, ctx) -> z."""

    x_alphabet: tuple
    context_alphabet: tuple
    z_alphabet: tuple
    mapping: dict  # (x, ctx) -> z, total

    def __post_init__(self):
        for c in self.context_alphabet:
            for x in self.x_alphabet:
                if (x, c) not in self.mapping:
                    raise DomainError(f"encoder not total: missing ({x!r}, {c!r})")

    def emit_set(self, x, ctx) -> tuple:
        return (self.mapping[(x, ctx)],)

    def prob(self, z, x, ctx) -> int:
        return 1 if self.mapping[(x, ctx)] == z else 0

    def to_json(self) -> str:
        return json.dumps(
            {repr(c): {repr(x): self.mapping[(x, c)] for x in self.x_alphabet} for c in self.context_alphabet}
        )


@dataclass(frozen=True)
class StochTaskEncoder:
    """Stochastic description law: rows[(x, ctx)] = dict z -> prob."""

    x_alphabet: tuple
    context_alphabet: tuple
    z_alphabet: tuple
    rows: dict  # (x, ctx) -> {z: prob}

    def emit_set(self, x, ctx) -> tuple:
        return tuple(z for z, p in self.rows[(x, ctx)].items() if p > 0)

    def prob(self, z, x, ctx):
        return self.rows[(x, ctx)].get(z, 0)


@dataclass(frozen=True)
class DecodingListTable:
    """lists[(ctx, z)] = tuple of symbols with positive posterior."""

    lists: dict

    def list_for(self, ctx, z) -> tuple:
        return self.lists.get((ctx, z), ())

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["ctx", "z", "members"])
        for (ctx, z) in sorted(self.lists, key=repr):
            w.writerow([repr(ctx), repr(z), *map(repr, self.lists[(ctx, z)])])
        return buf.getvalue()


def decoding_lists(enc, joint: JointPmf) -> DecodingListTable:
    """L^ctx_z = {x : P(x|ctx) > 0 and the encoder can emit z at (x, ctx)}."""
    if enc.x_alphabet != joint.x_alphabet or enc.context_alphabet != joint.y_alphabet:
        raise AlphabetMismatchError("encoder alphabets do not match the joint")
    lists: dict = {}
    for j, c in enumerate(joint.y_alphabet):
        for i, x in enumerate(joint.x_alphabet):
            if joint.table[i][j] > 0:
                for z in enc.emit_set(x, c):
                    lists.setdefault((c, z), []).append(x)
    return DecodingListTable({k: tuple(v) for k, v in lists.items()})


def list_moment(lists: DecodingListTable, joint: JointPmf, rho: float, enc) -> float:
    """E[|L^ctx_Z|^rho] under the encoder's description law."""
    total = 0.0
    for j, c in enumerate(joint.y_alphabet):
        for i, x in enumerate(joint.x_alphabet):
            p = float(joint.table[i][j])
            if p <= 0:
                continue
            for z in enc.emit_set(x, c):
                pz = float(enc.prob(z, x, c))
                total += p * pz * len(lists.list_for(c, z)) ** rho
    return total


def derandomize(enc: StochTaskEncoder, joint: JointPmf) -> DetTaskEncoder:
    """Pick, per positive-mass (x, ctx), the shortest list containing x.

    Ties go to the smallest z index.  The deterministic encoder's list moment
    never exceeds the stochastic one.
    """
    src_lists = decoding_lists(enc, joint)
    zi = {z: k for k, z in enumerate(enc.z_alphabet)}
    mapping: dict = {}
    for j, c in enumerate(joint.y_alphabet):
        for i, x in enumerate(joint.x_alphabet):
            if joint.table[i][j] > 0:
                candidates = [z for z in enc.emit_set(x, c)]
                best = min(candidates, key=lambda z: (len(src_lists.list_for(c, z)), zi[z]))
                mapping[(x, c)] = best
            else:
                mapping[(x, c)] = enc.z_alphabet[0]
    return DetTaskEncoder(enc.x_alphabet, enc.context_alphabet, enc.z_alphabet, mapping)


def bunte_bounds(joint: JointPmf, z_count: int, rho: float) -> tuple[float | None, float]:
    """(achievability RHS or None, converse floor) for |Z|-ary task-encoding.

    The achievability bound applies only when |Z| > log2|X| + 2; otherwise it
    is returned as None.  The converse holds for every stochastic encoder.
    """
    if not rho > 0:
        raise DomainError("rho must be > 0")
    h = renyi_cond_entropy(joint, RenyiOrder.from_rho(rho))
    log_x = math.log2(len(joint.x_alphabet))
    converse = max(1.0, 2.0 ** (rho * (h - math.log2(z_count))))
    if z_count > log_x + 2:
        ach = 1.0 + 2.0 ** (rho * (h - math.log2(z_count - log_x - 2) + 2))
    else:
        ach = None
    return ach, converse


def s_alphabet_size(nx: int, omega: int) -> int:
    """Size of the refinement part of an (offset, refinement) description."""
    return 1 + math.floor(math.log2(math.ceil(nx / omega)))


def encoder_from_guessing(g: GuessingFunction, omega: int, z_count: int) -> DetTaskEncoder:
    """Two-step descriptor built from a guessing function.

    Step 1 takes the rank's remainder O = (G(x|ctx)-1) mod omega; step 2 adds
    S = floor(log2 ceil(G(x|ctx)/omega)).  Pairs are flattened to integers
    z = O * |S| + S.  Requires z_count >= omega * (1 + floor(log2 ceil(|X|/omega))).
    """
    nx = len(g.x_alphabet)
    if not 1 <= omega <= nx:
        raise DomainError(f"omega must be in 1..|X|, got {omega}")
    ns = s_alphabet_size(nx, omega)
    if z_count < omega * ns:
        raise DomainError(
            f"descriptor capacity violated: z_count {z_count} < omega*(1+floor(log2 ceil(|X|/omega))) = {omega * ns}"
        )
    mapping = {}
    for c in g.context_alphabet:
        for x in g.x_alphabet:
            rank = g.rank(x, c)
            o = (rank - 1) % omega
            s = math.floor(math.log2(math.ceil(rank / omega)))
            mapping[(x, c)] = o * ns + s
    return DetTaskEncoder(g.x_alphabet, g.context_alphabet, tuple(range(z_count)), mapping)


def guessing_from_lists(lists: DecodingListTable, joint: JointPmf) -> GuessingFunction:
    """Guess shortest lists first, members by symbol index, skipping repeats.

    Requires the lists to cover every positive-mass symbol per context.  The
    induced moment satisfies E[G^rho] <= |Z|^rho * E[|L|^rho].
    """
    xi = {x: i for i, x in enumerate(joint.x_alphabet)}
    rank_rows = []
    for j, c in enumerate(joint.y_alphabet):
        ctx_lists = sorted(
            ((z, members) for (cc, z), members in lists.lists.items() if cc == c),
            key=lambda kv: (len(kv[1]), repr(kv[0])),
        )
        order: list = []
        seen = set()
        for _, members in ctx_lists:
            for x in sorted(members, key=lambda s: xi[s]):
                if x not in seen:
                    seen.add(x)
                    order.append(x)
        for i, x in enumerate(joint.x_alphabet):
            if joint.table[i][j] > 0 and x not in seen:
                raise DomainError(f"lists do not cover positive-mass symbol {x!r} in context {c!r}")
        for x in joint.x_alphabet:
            if x not in seen:
                seen.add(x)
                order.append(x)
        row = [0] * len(joint.x_alphabet)
        for r, x in enumerate(order, start=1):
            row[xi[x]] = r
        rank_rows.append(tuple(row))
    return GuessingFunction(joint.x_alphabet, joint.y_alphabet, tuple(rank_rows))


def fact1_census(k: int) -> int:
    """|{m >= 1 : floor(log2 m) = floor(log2 k)}| = 2^floor(log2 k), always <= k."""
    if k < 1:
        raise DomainError("k must be a positive integer")
    count = 2 ** math.floor(math.log2(k))
    assert count <= k
    return count


def random_stoch_encoder(rng, joint: JointPmf, z_count: int, exact: bool = True) -> StochTaskEncoder:
    """Seeded random stochastic encoder with planted zero entries.

    Rows are rational by default so downstream support logic is exact.
    """
    z_alphabet = tuple(range(z_count))
    rows = {}
    for c in joint.y_alphabet:
        for x in joint.x_alphabet:
            k = int(rng.integers(1, z_count + 1))
            chosen = sorted(rng.choice(z_count, size=k, replace=False).tolist())
            weights = rng.integers(1, 8, size=k)
            denom = int(weights.sum())
            if exact:
                row = {z_alphabet[z]: Fraction(int(w), denom) for z, w in zip(chosen, weights)}
            else:
                row = {z_alphabet[z]: float(w) / denom for z, w in zip(chosen, weights)}
            rows[(x, c)] = row
    return StochTaskEncoder(joint.x_alphabet, joint.y_alphabet, z_alphabet, rows)
