"""Two-hint storage schemes: construction, exact ambiguities, and verifiers.

Alice maps (X, Y) to a descriptor triple (v_s, v_1, v_2), draws a uniform pad
U on {0..c_s-1}, and stores M1 = (v_s + U mod c_s, v_1), M2 = (U, v_2).  Bob
sees both hints and recovers the descriptor; Eve sees the hint her accomplice
picks after observing the realization.  Everything here works on the realized
joint law, stored densely over its support, so all ambiguities are exact
expectations.

Scheme variants: the secret-hint scenario (Eve always sees the public hint),
the secret-key scenario (one hint, shared key as one-time pad), and the
full-support scheme that defeats a list-forming Eve.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

from .adversary import (
    Cell,
    eve_exact_enumeration,
    eve_exact_matching,
    eve_local_search,
    moment_for_constant,
)
from .guessing import optimal_guesser
from .prob import (
    BudgetExceededError,
    DomainError,
    JointPmf,
    RenyiOrder,
    renyi_cond_entropy,
)
from .report import ReportRow
from .tasks import encoder_from_guessing, s_alphabet_size

LN = math.log


# ---------------------------------------------------------------------------
# Realized-law helpers.  A law is a dict {(x, y, obs...) : prob} over the
# support; observation coordinates differ per scheme variant.
# ---------------------------------------------------------------------------


def _law_guess_moment(law: dict, obs_of, rho: float) -> float:
    """Optimal guessing moment of X given the observation key."""
    groups: dict = {}
    for key, p in law.items():
        if p <= 0:
            continue
        obs = obs_of(key)
        groups.setdefault(obs, {})
        groups[obs][key[0]] = groups[obs].get(key[0], 0.0) + float(p)
    total = 0.0
    for by_x in groups.values():
        masses = sorted(by_x.values(), reverse=True)
        total += sum(p * (r + 1) ** rho for r, p in enumerate(masses))
    return total


def _law_list_moment(law: dict, obs_of, rho: float) -> float:
    """E[|support of X given observation|^rho]; membership is exact-zero based."""
    supports: dict = {}
    mass: dict = {}
    for key, p in law.items():
        if p <= 0:
            continue
        obs = obs_of(key)
        supports.setdefault(obs, set()).add(key[0])
        mass[obs] = mass.get(obs, 0.0) + float(p)
    return sum(mass[obs] * len(supports[obs]) ** rho for obs in supports)


def _law_min_list_moment(law: dict, obs_list, rho: float) -> float:
    """E[min_k |support given obs_k|^rho] (the list-forming Eve)."""
    supports: dict = {}
    for key, p in law.items():
        if p <= 0:
            continue
        for k, obs_of in enumerate(obs_list):
            supports.setdefault((k, obs_of(key)), set()).add(key[0])
    total = 0.0
    for key, p in law.items():
        if p <= 0:
            continue
        best = min(len(supports[(k, obs_of(key))]) for k, obs_of in enumerate(obs_list))
        total += float(p) * best**rho
    return total


# ---------------------------------------------------------------------------
# Descriptor construction shared by all variants.
# ---------------------------------------------------------------------------


def _descriptor_map(joint: JointPmf, size: int, version: str) -> dict:
    """Deterministic descriptor (x, y) -> z in {0..size-1}.

    Guessing version: remainder of the optimal rank, which attains the
    ceil-moment equality.  List version: the offset/refinement construction
    with the largest feasible offset cardinality.
    """
    g = optimal_guesser(joint)
    if version == "guessing":
        return {
            (x, y): (g.rank(x, y) - 1) % size
            for y in joint.y_alphabet
            for x in joint.x_alphabet
        }
    if version != "list":
        raise DomainError(f"unknown version {version!r}")
    nx = len(joint.x_alphabet)
    feasible = [w for w in range(1, nx + 1) if w * s_alphabet_size(nx, w) <= size]
    if not feasible:
        raise DomainError(f"descriptor size {size} cannot host an offset/refinement pair")
    enc = encoder_from_guessing(g, max(feasible), size)
    return {(x, y): enc.mapping[(x, y)] for y in joint.y_alphabet for x in joint.x_alphabet}


def _split3(z: int, cs: int, c1: int) -> tuple[int, int, int]:
    return z % cs, (z // cs) % c1, z // (cs * c1)


@dataclass(frozen=True)
class TwoHintScheme:
    joint: JointPmf
    cs: int
    c1: int
    c2: int
    m1_size: int
    m2_size: int
    version: str
    descriptor: dict  # (x, y) -> (v_s, v_1, v_2)
    law: dict  # (x, y, m1, m2) -> prob; m1 = vtilde*c1+v1, m2 = u*c2+v2

    def eve_cells(self) -> list[Cell]:
        return [
            Cell(float(p), x, (("h1", y, m1), ("h2", y, m2)))
            for (x, y, m1, m2), p in self.law.items()
            if p > 0
        ]

    def pad_coordinate_laws(self) -> tuple[dict, dict]:
        """Conditional laws of M1's padded coordinate and M2's pad, per (x, y).

        Both must be exactly uniform over {0..cs-1} for every positive-mass
        (x, y): either hint alone then carries nothing through that slot.
        """
        pad1: dict = {}
        pad2: dict = {}
        for (x, y, m1, m2), p in self.law.items():
            if p > 0:
                pad1.setdefault((x, y), {})
                pad2.setdefault((x, y), {})
                vt, u = m1 // self.c1, m2 // self.c2
                pad1[(x, y)][vt] = pad1[(x, y)].get(vt, 0) + p
                pad2[(x, y)][u] = pad2[(x, y)].get(u, 0) + p
        return pad1, pad2

    def to_json(self) -> str:
        return json.dumps(
            {
                "kind": "two-hint",
                "version": self.version,
                "cs": self.cs,
                "c1": self.c1,
                "c2": self.c2,
                "m1_size": self.m1_size,
                "m2_size": self.m2_size,
                "descriptor": [[list(k), list(v)] for k, v in sorted(self.descriptor.items(), key=repr)],
                "source": json.loads(self.joint.to_json()),
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "TwoHintScheme":
        doc = json.loads(text)
        if doc.get("kind") != "two-hint":
            raise DomainError(f"not a two-hint scheme document: kind={doc.get('kind')!r}")
        joint = JointPmf.from_json(json.dumps(doc["source"]))
        cs, c1, c2 = doc["cs"], doc["c1"], doc["c2"]
        descriptor = {tuple(k): tuple(v) for k, v in doc["descriptor"]}
        exact = joint.exact
        inv_cs = Fraction(1, cs) if exact else 1.0 / cs
        law: dict = {}
        for i, x in enumerate(joint.x_alphabet):
            for j, y in enumerate(joint.y_alphabet):
                p = joint.table[i][j]
                if p <= 0:
                    continue
                vs, v1, v2 = descriptor[(x, y)]
                for u in range(cs):
                    m1 = ((vs + u) % cs) * c1 + v1
                    m2 = u * c2 + v2
                    law[(x, y, m1, m2)] = p * inv_cs
        return cls(joint, cs, c1, c2, doc["m1_size"], doc["m2_size"], doc["version"], descriptor, law)


def build_two_hint(
    joint: JointPmf,
    cs: int,
    c1: int,
    c2: int,
    version: str = "guessing",
    m1_size: int | None = None,
    m2_size: int | None = None,
) -> TwoHintScheme:
    """Build the padded two-hint scheme for an admissible (cs, c1, c2)."""
    m1_size = m1_size if m1_size is not None else cs * c1
    m2_size = m2_size if m2_size is not None else cs * c2
    if min(cs, c1, c2) < 1:
        raise DomainError("cs, c1, c2 must be positive integers")
    if cs > min(m1_size, m2_size):
        raise DomainError(f"cs={cs} exceeds min(|M1|,|M2|)={min(m1_size, m2_size)}")
    if c1 > m1_size // cs:
        raise DomainError(f"c1={c1} exceeds floor(|M1|/cs)={m1_size // cs}")
    if c2 > m2_size // cs:
        raise DomainError(f"c2={c2} exceeds floor(|M2|/cs)={m2_size // cs}")
    size = cs * c1 * c2
    if version == "list" and not size > math.log2(len(joint.x_alphabet)) + 2:
        raise DomainError(
            f"list version needs cs*c1*c2 > log2|X|+2: {size} <= {math.log2(len(joint.x_alphabet)) + 2:.3f}"
        )
    zmap = _descriptor_map(joint, size, version)
    descriptor = {k: _split3(z, cs, c1) for k, z in zmap.items()}
    exact = joint.exact
    inv_cs = Fraction(1, cs) if exact else 1.0 / cs
    law: dict = {}
    for i, x in enumerate(joint.x_alphabet):
        for j, y in enumerate(joint.y_alphabet):
            p = joint.table[i][j]
            if p <= 0:
                continue
            vs, v1, v2 = descriptor[(x, y)]
            for u in range(cs):
                m1 = ((vs + u) % cs) * c1 + v1
                m2 = u * c2 + v2
                law[(x, y, m1, m2)] = p * inv_cs
    return TwoHintScheme(joint, cs, c1, c2, m1_size, m2_size, version, descriptor, law)


def scheme_from_law(
    joint: JointPmf, law: dict, m1_size: int, m2_size: int, version: str = "guessing"
) -> TwoHintScheme:
    """Wrap an arbitrary realized law {(x, y, m1, m2): prob} for the verifiers.

    Cardinality parameters cs, c1, c2 are recorded as 1 (they only matter for
    schemes built by `build_two_hint`); every ambiguity and converse check
    works directly on the law.
    """
    return TwoHintScheme(joint, 1, m1_size, m2_size, m1_size, m2_size, version, {}, law)


def bob_ambiguity(scheme, rho: float, version: str | None = None) -> float:
    """Bob's exact ambiguity from the realized law (guessing moment or list moment)."""
    version = version or scheme.version
    obs = lambda key: key[1:]
    if version == "guessing":
        return _law_guess_moment(scheme.law, obs, rho)
    if version == "list":
        return _law_list_moment(scheme.law, obs, rho)
    raise DomainError(f"unknown version {version!r}")


def eve_ambiguity_exact(scheme, rho: float, budget_bits: int = 26) -> float:
    """Exact accomplice-optimal guessing moment for Eve.

    Uses the assignment reduction when valid, otherwise exhaustive map
    enumeration; raises BudgetExceededError when neither fits the budget
    (callers then fall back to `eve_ambiguity_bounds`).
    """
    cells = scheme.eve_cells()
    try:
        return eve_exact_matching(cells, rho)
    except BudgetExceededError:
        return eve_exact_enumeration(cells, rho, budget_bits)


def eve_ambiguity_bounds(scheme, rho: float) -> tuple[float, float]:
    """Certified (lower, upper) bracket for Eve when the exact oracle is out of budget.

    Lower: revealing the accomplice's index and both coordinates can shrink
    the moment by at most the revealed cardinality; evaluated on the exact
    pad-augmented law.  Upper: best reachable deterministic accomplice map.
    """
    cells = scheme.eve_cells()
    upper = min(
        eve_local_search(cells, rho),
        min(moment_for_constant(cells, k, rho) for k in range(2)),
    )
    aug = _law_guess_moment(scheme.law, lambda key: (key[1],), rho)  # given Y only
    z_count = scheme.cs * (scheme.c1 + scheme.c2)
    pair = _pair_moment_with_pad(scheme, rho)
    lower = max(1.0, z_count ** (-rho) * pair, (scheme.m1_size * scheme.m2_size) ** (-rho) * aug)
    return lower, upper


def _pair_moment_with_pad(scheme: TwoHintScheme, rho: float) -> float:
    """Optimal moment of the pair (X, U) given Y; U is the uniform pad."""
    groups: dict = {}
    for (x, y, m1, m2), p in scheme.law.items():
        if p > 0:
            u = m2 // scheme.c2
            groups.setdefault(y, {})
            groups[y][(x, u)] = groups[y].get((x, u), 0.0) + float(p)
    total = 0.0
    for by_xu in groups.values():
        masses = sorted(by_xu.values(), reverse=True)
        total += sum(p * (r + 1) ** rho for r, p in enumerate(masses))
    return total


def eve_ambiguity_weak(scheme, rho: float) -> float:
    """Accomplice picks the hint before seeing the realization: min of two moments."""
    m1 = _law_guess_moment(scheme.law, lambda key: (key[1], key[2]), rho)
    m2 = _law_guess_moment(scheme.law, lambda key: (key[1], key[3]), rho)
    return min(m1, m2)


def verify_finite_blocklength(
    scheme: TwoHintScheme, rho: float, version: str | None = None, instance: str = ""
) -> list[ReportRow]:
    """Check the achievability and converse inequalities on the built scheme."""
    version = version or scheme.version
    joint = scheme.joint
    h = renyi_cond_entropy(joint, RenyiOrder.from_rho(rho))
    nx = len(joint.x_alphabet)
    cs, c1, c2 = scheme.cs, scheme.c1, scheme.c2
    m1, m2 = scheme.m1_size, scheme.m2_size
    a_b = bob_ambiguity(scheme, rho, version)
    note = ""
    try:
        a_e = eve_ambiguity_exact(scheme, rho)
        a_e_low = a_e_high = a_e
    except BudgetExceededError:
        a_e_low, a_e_high = eve_ambiguity_bounds(scheme, rho)
        note = "eve: bounds-only"
    a_e_weak = eve_ambiguity_weak(scheme, rho)
    suite = f"two-hint-{version}"
    tag = version[0]  # g / l
    if version == "guessing":
        bob_dir = 1 + 2 ** (rho * (h - math.log2(cs * c1 * c2) + 1))
        bob_conv = max(1.0, (1 + LN(nx)) ** (-rho) * 2 ** (rho * (h - math.log2(m1 * m2))))
    else:
        bob_dir = 1 + 2 ** (rho * (h - math.log2(cs * c1 * c2 - math.log2(nx) - 2) + 2))
        bob_conv = max(1.0, 2 ** (rho * (h - math.log2(m1 * m2))))
    eve_dir = (1 + LN(nx)) ** (-rho) * 2 ** (rho * (h - math.log2(c1 + c2)))
    eve_conv = min(min(m1, m2) ** rho * a_b, 2 ** (rho * h))
    rows = [
        ReportRow(suite, instance, f"bob-direct-{tag}", "<", a_b, bob_dir, note),
        ReportRow(suite, instance, f"eve-direct-{tag}", ">=", a_e_low, eve_dir, note),
        ReportRow(suite, instance, f"bob-converse-{tag}", ">=", a_b, bob_conv, note),
        ReportRow(suite, instance, f"eve-converse-{tag}", "<=", a_e_high, eve_conv, note),
        ReportRow(suite, instance, f"eve-weak-converse-{tag}", "<=", a_e_weak, eve_conv, note),
        ReportRow(suite, instance, "eve-exact-below-weak", "<=", a_e_low, a_e_weak, note),
    ]
    return rows


# ---------------------------------------------------------------------------
# Picking (cs, c1, c2) from a Bob-ambiguity budget.
# ---------------------------------------------------------------------------


class InfeasibleBoundError(ValueError):
    """The requested Bob bound is below the converse floor."""


def choose_triple(
    u_bound: float,
    m1_size: int,
    m2_size: int,
    renyi_value: float,
    rho: float,
    version: str = "guessing",
    nx: int | None = None,
) -> tuple[int, int, int]:
    """Pick (cs, c1, c2) guaranteeing Bob's ambiguity < u_bound.

    Implements the three-case rule; the returned triple is admissible and the
    matching direct bound is below u_bound.  Raises InfeasibleBoundError when
    u_bound is under the converse floor, DomainError when it is above the
    floor but below the achievability threshold this rule needs.
    """
    h = renyi_value
    if version == "list" and nx is None:
        raise DomainError("list version needs nx (for the log|X| terms)")
    swapped = m2_size > m1_size
    big, small = (m2_size, m1_size) if swapped else (m1_size, m2_size)

    if version == "guessing":
        floor = max(1.0, (1 + LN(nx)) ** (-rho) * 2 ** (rho * (h - math.log2(big * small)))) if nx else 1.0
        threshold = 1 + 2**rho * (big * small) ** (-rho) * 2 ** (rho * h)
        if nx is not None and u_bound < floor:
            raise InfeasibleBoundError(f"u_bound {u_bound} below converse floor {floor}")
        if u_bound < threshold:
            raise DomainError(f"u_bound {u_bound} below achievability threshold {threshold}")
        if u_bound >= 1 + 2 ** (rho * (h - math.log2(small) + 1)):
            triple = (small, 1, 1)
        elif u_bound >= 1 + (big // small) ** (-rho) * 2 ** (rho * (h - math.log2(small) + 1)):
            c1 = math.ceil(2 ** (h - math.log2(small) + 1 - math.log2(u_bound - 1) / rho))
            triple = (small, max(1, min(c1, big // small)), 1)
        else:
            k = _largest_k(
                lambda k: 1
                + 2**rho * (k * (big // k) * (small // k)) ** (-rho) * 2 ** (rho * h)
                <= u_bound,
                small,
            )
            triple = (k, big // k, small // k)
    else:
        lx = math.log2(nx)
        if not big * small > lx + 2:
            raise DomainError("list version needs |M1||M2| > log2|X| + 2")
        floor = max(1.0, (big * small) ** (-rho) * 2 ** (rho * h))
        threshold = 1 + 2 ** (rho * (h - math.log2(big * small - lx - 2) + 2))
        if u_bound < floor:
            raise InfeasibleBoundError(f"u_bound {u_bound} below converse floor {floor}")
        if u_bound < threshold:
            raise DomainError(f"u_bound {u_bound} below achievability threshold {threshold}")
        if small > lx + 2 and u_bound >= 1 + 2 ** (rho * (h - math.log2(small - lx - 2) + 2)):
            triple = (small, 1, 1)
        elif small * (big // small) > lx + 2 and u_bound >= 1 + 2 ** (
            rho * (h - math.log2(small * (big // small) - lx - 2) + 2)
        ):
            c1 = math.ceil((2 ** (h + 2 - math.log2(u_bound - 1) / rho) + lx + 2) / small)
            triple = (small, max(1, min(c1, big // small)), 1)
        else:
            k = _largest_k(
                lambda k: k * (big // k) * (small // k) > lx + 2
                and 1
                + 2 ** (rho * (h - math.log2(k * (big // k) * (small // k) - lx - 2) + 2))
                <= u_bound,
                small,
            )
            triple = (k, big // k, small // k)
    cs, cb, csm = triple
    return (cs, csm, cb) if swapped else (cs, cb, csm)


def _largest_k(pred, upper: int) -> int:
    best = None
    for k in range(1, upper + 1):
        if pred(k):
            best = k
    if best is None:
        raise DomainError("no feasible cardinality; u_bound too tight for this rule")
    return best


# ---------------------------------------------------------------------------
# Secret hint: Eve always sees the public hint, never the secret one.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SecretHintScheme:
    joint: JointPmf
    c: int
    mp_size: int
    ms_size: int
    version: str
    law: dict  # (x, y, m_public, m_secret) -> prob (deterministic descriptor)


def build_secret_hint(
    joint: JointPmf, c: int, ms_size: int, version: str = "guessing", mp_size: int | None = None
) -> SecretHintScheme:
    mp_size = mp_size if mp_size is not None else c
    if not 1 <= c <= mp_size:
        raise DomainError(f"need 1 <= c <= |Mp|, got c={c}, |Mp|={mp_size}")
    nx = len(joint.x_alphabet)
    if version == "list":
        if not mp_size * ms_size > math.log2(nx) + 2:
            raise DomainError("list version needs |Mp||Ms| > log2|X| + 2")
        if not c * ms_size > math.log2(nx) + 2:
            raise DomainError("list version needs c*|Ms| > log2|X| + 2")
    zmap = _descriptor_map(joint, c * ms_size, version)
    law: dict = {}
    for i, x in enumerate(joint.x_alphabet):
        for j, y in enumerate(joint.y_alphabet):
            p = joint.table[i][j]
            if p <= 0:
                continue
            z = zmap[(x, y)]
            law[(x, y, z % c, z // c)] = p
    return SecretHintScheme(joint, c, mp_size, ms_size, version, law)


def verify_secret_hint(scheme: SecretHintScheme, rho: float, instance: str = "") -> list[ReportRow]:
    joint = scheme.joint
    h = renyi_cond_entropy(joint, RenyiOrder.from_rho(rho))
    nx = len(joint.x_alphabet)
    c, mp, ms = scheme.c, scheme.mp_size, scheme.ms_size
    version = scheme.version
    if version == "guessing":
        a_b = _law_guess_moment(scheme.law, lambda key: key[1:], rho)
        bob_dir = 1 + 2 ** (rho * (h - math.log2(c * ms) + 1))
        bob_conv = max(1.0, (1 + LN(nx)) ** (-rho) * 2 ** (rho * (h - math.log2(mp * ms))))
    else:
        a_b = _law_list_moment(scheme.law, lambda key: key[1:], rho)
        bob_dir = 1 + 2 ** (rho * (h - math.log2(c * ms - math.log2(nx) - 2) + 2))
        bob_conv = max(1.0, 2 ** (rho * (h - math.log2(mp * ms))))
    a_e = _law_guess_moment(scheme.law, lambda key: (key[1], key[2]), rho)
    eve_dir = (1 + LN(nx)) ** (-rho) * 2 ** (rho * (h - math.log2(c)))
    eve_conv = min(ms**rho * a_b, 2 ** (rho * h))
    suite = f"secret-hint-{version}"
    tag = version[0]
    return [
        ReportRow(suite, instance, f"bob-direct-{tag}", "<", a_b, bob_dir),
        ReportRow(suite, instance, f"eve-direct-{tag}", ">=", a_e, eve_dir),
        ReportRow(suite, instance, f"bob-converse-{tag}", ">=", a_b, bob_conv),
        ReportRow(suite, instance, f"eve-converse-{tag}", "<=", a_e, eve_conv),
    ]


# ---------------------------------------------------------------------------
# Secret key: one public hint, the shared key pads the sensitive coordinate.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SecretKeyScheme:
    joint: JointPmf
    c: int
    k_size: int
    m_size: int
    version: str
    law: dict  # (x, y, k, m) -> prob with m = (ms + k mod |K|)*c + mp


def build_secret_key(
    joint: JointPmf, c: int, k_size: int, version: str = "guessing", m_size: int | None = None
) -> SecretKeyScheme:
    m_size = m_size if m_size is not None else c * k_size
    if k_size > m_size:
        raise DomainError("need |K| <= |M|")
    if c * k_size > m_size:
        raise DomainError(f"need c*|K| <= |M|: {c}*{k_size} > {m_size}")
    nx = len(joint.x_alphabet)
    if version == "list":
        if not (m_size // k_size) * k_size > math.log2(nx) + 2:
            raise DomainError("list version needs floor(|M|/|K|)*|K| > log2|X| + 2")
        if not c * k_size > math.log2(nx) + 2:
            raise DomainError("list version needs c*|K| > log2|X| + 2")
    zmap = _descriptor_map(joint, c * k_size, version)
    exact = joint.exact
    inv_k = Fraction(1, k_size) if exact else 1.0 / k_size
    law: dict = {}
    for i, x in enumerate(joint.x_alphabet):
        for j, y in enumerate(joint.y_alphabet):
            p = joint.table[i][j]
            if p <= 0:
                continue
            z = zmap[(x, y)]
            ms, mp = z % k_size, z // k_size
            for k in range(k_size):
                m = ((ms + k) % k_size) * c + mp
                law[(x, y, k, m)] = p * inv_k
    return SecretKeyScheme(joint, c, k_size, m_size, version, law)


def verify_secret_key(scheme: SecretKeyScheme, rho: float, instance: str = "") -> list[ReportRow]:
    joint = scheme.joint
    h = renyi_cond_entropy(joint, RenyiOrder.from_rho(rho))
    nx = len(joint.x_alphabet)
    c, ksz, msz = scheme.c, scheme.k_size, scheme.m_size
    version = scheme.version
    if version == "guessing":
        a_b = _law_guess_moment(scheme.law, lambda key: key[1:], rho)
        bob_dir = 1 + 2 ** (rho * (h - math.log2(c * ksz) + 1))
        bob_conv = max(1.0, (1 + LN(nx)) ** (-rho) * 2 ** (rho * (h - math.log2(msz))))
    else:
        a_b = _law_list_moment(scheme.law, lambda key: key[1:], rho)
        bob_dir = 1 + 2 ** (rho * (h - math.log2(c * ksz - math.log2(nx) - 2) + 2))
        bob_conv = max(1.0, 2 ** (rho * (h - math.log2(msz))))
    a_e = _law_guess_moment(scheme.law, lambda key: (key[1], key[3]), rho)
    eve_dir = (1 + LN(nx)) ** (-rho) * 2 ** (rho * (h - math.log2(c)))
    eve_conv = min(ksz**rho * a_b, 2 ** (rho * h))
    suite = f"secret-key-{version}"
    tag = version[0]
    return [
        ReportRow(suite, instance, f"bob-direct-{tag}", "<", a_b, bob_dir),
        ReportRow(suite, instance, f"eve-direct-{tag}", ">=", a_e, eve_dir),
        ReportRow(suite, instance, f"bob-converse-{tag}", ">=", a_b, bob_conv),
        ReportRow(suite, instance, f"eve-converse-{tag}", "<=", a_e, eve_conv),
    ]


# ---------------------------------------------------------------------------
# Defeating a list-forming Eve: full-support hints.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EveListScheme:
    joint: JointPmf
    cs: int
    c1: int
    c2: int
    m1_size: int
    m2_size: int
    epsilon: float
    law: dict  # (x, y, m1, m2) -> prob


def build_eve_list_scheme(
    joint: JointPmf, m1_size: int, m2_size: int, epsilon: float
) -> EveListScheme:
    """Scheme whose single-hint decoding lists equal the no-hint list exactly.

    The unpadded coordinates are resampled so every pair (v1, v2) has positive
    probability: stay with probability 1 - 2^-epsilon, otherwise move
    uniformly to one of the other pairs.
    """
    nx = len(joint.x_alphabet)
    cs = 1 + math.floor(math.log2(nx))
    if min(m1_size, m2_size) < cs:
        raise DomainError(f"need min(|M1|,|M2|) >= 1 + floor(log2|X|) = {cs}")
    c1, c2 = m1_size // cs, m2_size // cs
    if 1 - 2.0**-epsilon * (1 + 1.0 / (c1 * c2)) < 0:
        raise DomainError(f"epsilon {epsilon} makes the mixing weight negative")
    zmap = _descriptor_map(joint, c1 * c2, "guessing")
    exact = joint.exact and float(epsilon).is_integer() and epsilon >= 0
    if exact:
        move_total = Fraction(1, 2 ** int(epsilon))
        stay = 1 - move_total
    else:
        move_total = 2.0**-epsilon
        stay = 1.0 - move_total
    # posterior-sorted ranks of X given (y, v1', v2') under the smoothed law
    cells: dict = {}
    for i, x in enumerate(joint.x_alphabet):
        for j, y in enumerate(joint.y_alphabet):
            p = joint.table[i][j]
            if p <= 0:
                continue
            z = zmap[(x, y)]
            for zp in range(c1 * c2):
                if c1 * c2 == 1:
                    w = p
                elif zp == z:
                    w = p * stay
                else:
                    w = p * move_total / (c1 * c2 - 1)
                if w > 0:
                    cells[(x, y, zp)] = cells.get((x, y, zp), 0) + w
    ranks: dict = {}
    groups: dict = {}
    xi = {x: i for i, x in enumerate(joint.x_alphabet)}
    for (x, y, zp), w in cells.items():
        groups.setdefault((y, zp), []).append((x, w))
    for ctx, members in groups.items():
        ordered = sorted(members, key=lambda kv: (-float(kv[1]), xi[kv[0]]))
        for r, (x, _) in enumerate(ordered, start=1):
            ranks[(ctx, x)] = r
    inv_cs = Fraction(1, cs) if exact else 1.0 / cs
    law: dict = {}
    for (x, y, zp), w in cells.items():
        vs = math.floor(math.log2(ranks[((y, zp), x)]))
        v1, v2 = zp % c1, zp // c1
        for u in range(cs):
            m1 = ((vs + u) % cs) * c1 + v1
            m2 = u * c2 + v2
            key = (x, y, m1, m2)
            law[key] = law.get(key, 0) + w * inv_cs
    return EveListScheme(joint, cs, c1, c2, m1_size, m2_size, epsilon, law)


def eve_list_ambiguity(scheme: EveListScheme, rho: float) -> float:
    """E[min(|L given (Y, M1)|, |L given (Y, M2)|)^rho]."""
    return _law_min_list_moment(
        scheme.law, [lambda key: (key[1], key[2]), lambda key: (key[1], key[3])], rho
    )


def verify_eve_list(scheme: EveListScheme, rho: float, instance: str = "") -> list[ReportRow]:
    joint = scheme.joint
    h = renyi_cond_entropy(joint, RenyiOrder.from_rho(rho))
    nx = len(joint.x_alphabet)
    a_b = _law_list_moment(scheme.law, lambda key: key[1:], rho)
    a_e = eve_list_ambiguity(scheme, rho)
    no_hint = _law_list_moment(scheme.law, lambda key: (key[1],), rho)
    bob_dir = 1 + 2 ** (
        rho
        * (
            h
            - math.log2(scheme.m1_size * scheme.m2_size)
            + 2 * math.log2(1 + math.floor(math.log2(nx)))
            + 3
        )
    )
    bob_conv = max(1.0, 2 ** (rho * (h - math.log2(scheme.m1_size * scheme.m2_size))))
    suite = "eve-list"
    return [
        ReportRow(suite, instance, "bob-direct-list", "<=", a_b, bob_dir),
        ReportRow(suite, instance, "eve-equals-no-hint-list", "==", a_e, no_hint),
        ReportRow(suite, instance, "bob-converse-list", ">=", a_b, bob_conv),
        ReportRow(suite, instance, "eve-converse-list", "<=", a_e, no_hint),
    ]


# ---------------------------------------------------------------------------
# Asymptotics.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExponentOutcome:
    value: float  # -inf when Bob's constraint cannot be met
    witness: tuple | None  # (rate_pad, rate_1, rate_2) splitting, when achievable
    boundary: bool = False  # True when the rate sum sits exactly on the threshold

    def __float__(self):
        return self.value


def two_hint_exponents(
    r1: float, r2: float, rho: float, entropy_rate: float, e_bob: float | None = None
) -> ExponentOutcome:
    """Privacy exponent (e_bob None) or modest privacy exponent for rate pair (r1, r2).

    The plain exponent is undetermined exactly at r1 + r2 = entropy rate; that
    input returns the achievable-side value with `boundary=True`.
    """
    if r1 <= 0 or r2 <= 0:
        raise DomainError("rates must be positive")
    if rho <= 0 or entropy_rate < 0:
        raise DomainError("rho must be > 0 and the entropy rate >= 0")
    h = entropy_rate
    if e_bob is None:
        if r1 + r2 < h:
            return ExponentOutcome(-math.inf, None)
        boundary = r1 + r2 == h
        value = rho * min(r1, r2, h)
        return ExponentOutcome(value, _rate_split(r1, r2, h), boundary)
    if e_bob < 0:
        raise DomainError("e_bob must be >= 0")
    heff = h - e_bob / rho
    if r1 + r2 < heff:
        return ExponentOutcome(-math.inf, None)
    value = min(rho * min(r1, r2) + e_bob, rho * h)
    return ExponentOutcome(value, _rate_split(r1, r2, max(heff, 0.0)), False)


def _rate_split(r1: float, r2: float, h: float) -> tuple[float, float, float]:
    """The pad/plain rate triple used in the three-case achievability argument."""
    lo = min(r1, r2)
    if lo <= h / 2:
        split = (0.0, h - lo, lo)
    elif lo <= h:
        split = (2 * lo - h, h - lo, h - lo)
    else:
        split = (lo, 0.0, 0.0)
    return split
