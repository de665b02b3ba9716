"""Coded multi-disk hint schemes robust to disk failures.

Alice describes (X, Y) by a pair (V, W), spreads V over delta disks with an
MDS code over GF(2^p), and spreads W together with a uniform pad U using
nested MDS codes over GF(2^r), so that any nu hints determine (V, W, U)
while any eta hints are exactly independent of W.  Each hint carries s = p + r
bits: the p-bit coordinate of the V-codeword then the r-bit coordinate of the
padded codeword.

Bob is shown the nu hints that maximize his ambiguity, Eve the eta hints that
minimize hers; both choices are made after the realization is known.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from .adversary import (
    Cell,
    bob_minmax_bracket,
    eve_exact_enumeration,
    eve_exact_matching,
    eve_local_search,
    moment_for_constant,
)
from .gf import field_make, rs_generator
from .prob import (
    BudgetExceededError,
    DomainError,
    JointPmf,
    RenyiOrder,
    renyi_cond_entropy,
)
from .report import ReportRow
from .tasks import encoder_from_guessing, s_alphabet_size
from .guessing import optimal_guesser

LN = math.log


def _admissible_pr(p: int, r: int, s: int, delta: int) -> None:
    if p + r != s:
        raise DomainError(f"need p + r = s, got {p}+{r} != {s}")
    need = math.ceil(math.log2(delta))
    for name, v in (("p", p), ("r", r)):
        if v != 0 and v < need:
            raise DomainError(f"{name}={v} must be 0 or at least ceil(log2 delta)={need}")


@dataclass(frozen=True)
class DeltaHintScheme:
    joint: JointPmf
    delta: int
    nu: int
    eta: int
    s: int
    p: int
    r: int
    version: str
    descriptor: dict  # (x, y) -> (V tuple, W tuple)
    law: dict  # (x, y, hints tuple) -> prob

    def bob_cells(self) -> list[Cell]:
        subsets = list(combinations(range(self.delta), self.nu))
        return [
            Cell(float(p), x, tuple(("B", b, y, tuple(m[i] for i in b)) for b in subsets))
            for (x, y, m), p in self.law.items()
            if p > 0
        ]

    def eve_cells(self) -> list[Cell]:
        subsets = list(combinations(range(self.delta), self.eta))
        return [
            Cell(float(p), x, tuple(("E", e, y, tuple(m[i] for i in e)) for e in subsets))
            for (x, y, m), p in self.law.items()
            if p > 0
        ]

    def share_blob(self, hints: tuple) -> bytes:
        width = max(1, (self.s + 7) // 8)
        return b"".join(int(h).to_bytes(width, "big") for h in hints)

    def unpack_blob(self, blob: bytes) -> tuple:
        width = max(1, (self.s + 7) // 8)
        vals = [int.from_bytes(blob[i * width : (i + 1) * width], "big") for i in range(self.delta)]
        return tuple(vals)

    def split_hint(self, h: int) -> tuple[int, int]:
        return h >> self.r, h & ((1 << self.r) - 1)


def _int_to_symbols(z: int, count: int, bits: int) -> tuple:
    """Big-endian split of an integer into `count` field symbols of `bits` bits."""
    if bits == 0 or count == 0:
        return (0,) * count
    out = []
    for i in range(count):
        shift = bits * (count - 1 - i)
        out.append((z >> shift) & ((1 << bits) - 1))
    return tuple(out)


def build_delta_scheme(
    joint: JointPmf,
    delta: int,
    nu: int,
    eta: int,
    s: int,
    p: int,
    r: int,
    version: str = "guessing",
    budget: int = 1 << 22,
) -> DeltaHintScheme:
    """Build the nested-MDS hint scheme for admissible (p, r)."""
    if not 0 <= eta < nu <= delta:
        raise DomainError(f"need 0 <= eta < nu <= delta, got eta={eta}, nu={nu}, delta={delta}")
    _admissible_pr(p, r, s, delta)
    nx = len(joint.x_alphabet)
    desc_bits = nu * s - eta * r  # = nu*p + (nu-eta)*r
    if version == "list" and not 2**desc_bits > math.log2(nx) + 2:
        raise DomainError(f"list version needs 2^(nu*s - eta*r) > log2|X| + 2")
    support = sum(1 for row in joint.table for v in row if v > 0)
    if support << (eta * r) > budget:
        raise BudgetExceededError("realized support exceeds the enumeration budget")

    size = 1 << desc_bits
    g = optimal_guesser(joint)
    if version == "guessing":
        zmap = {
            (x, y): (g.rank(x, y) - 1) % size for y in joint.y_alphabet for x in joint.x_alphabet
        }
    else:
        feasible = [w for w in range(1, nx + 1) if w * s_alphabet_size(nx, w) <= size]
        enc = encoder_from_guessing(g, max(feasible), size)
        zmap = {k: enc.mapping[k] for k in enc.mapping}

    fp = field_make(p) if p > 0 else None
    fr = field_make(r) if r > 0 else None
    g_v = rs_generator(nu, delta, fp) if p > 0 else None
    g_uw = rs_generator(nu, delta, fr) if r > 0 else None

    w_bits = (nu - eta) * r
    descriptor: dict = {}
    for key, z in zmap.items():
        v_sym = _int_to_symbols(z >> w_bits, nu, p)
        w_sym = _int_to_symbols(z & ((1 << w_bits) - 1), nu - eta, r)
        descriptor[key] = (v_sym, w_sym)

    exact = joint.exact
    n_pad = 1 << (eta * r)
    inv_pad = Fraction(1, n_pad) if exact else 1.0 / n_pad
    law: dict = {}
    for i, x in enumerate(joint.x_alphabet):
        for j, y in enumerate(joint.y_alphabet):
            prob = joint.table[i][j]
            if prob <= 0:
                continue
            v_sym, w_sym = descriptor[(x, y)]
            mp = g_v.encode(np.array(v_sym)) if g_v is not None else np.zeros(delta, dtype=np.int64)
            for pad_idx in range(n_pad):
                u_sym = _int_to_symbols(pad_idx, eta, r)
                if g_uw is not None:
                    mr = g_uw.encode(np.array(u_sym + w_sym))
                else:
                    mr = np.zeros(delta, dtype=np.int64)
                hints = tuple(int(a) << r | int(b) for a, b in zip(mp, mr))
                law[(x, y, hints)] = prob * inv_pad
    return DeltaHintScheme(joint, delta, nu, eta, s, p, r, version, descriptor, law)


# ---------------------------------------------------------------------------
# Exact recovery / secrecy checks on the realized law.
# ---------------------------------------------------------------------------


def check_reconstruction(scheme: DeltaHintScheme) -> bool:
    """Every size-nu subset of hints determines (V, W, pad) on the support."""
    for b in combinations(range(scheme.delta), scheme.nu):
        seen: dict = {}
        for (x, y, m), p in scheme.law.items():
            if p <= 0:
                continue
            key = (y, tuple(m[i] for i in b))
            val = (scheme.descriptor[(x, y)], tuple(m))
            if seen.setdefault(key, val) != val:
                return False
    return True


def check_eta_independence(scheme: DeltaHintScheme) -> bool:
    """The r-parts of any eta hints are uniform and independent of (X, Y, W).

    Exact: conditional mass of each observed r-part tuple must be exactly
    2^(-eta*r) for every positive-mass (x, y).
    """
    if scheme.eta == 0:
        return True
    target = Fraction(1, 1 << (scheme.eta * scheme.r)) if scheme.joint.exact else 2.0 ** -(
        scheme.eta * scheme.r
    )
    for e in combinations(range(scheme.delta), scheme.eta):
        cond: dict = {}
        total: dict = {}
        for (x, y, m), p in scheme.law.items():
            if p <= 0:
                continue
            rparts = tuple(scheme.split_hint(m[i])[1] for i in e)
            cond[(x, y, rparts)] = cond.get((x, y, rparts), 0) + p
            total[(x, y)] = total.get((x, y), 0) + p
        for (x, y, _), mass in cond.items():
            if mass != target * total[(x, y)]:
                if abs(float(mass) - float(target * total[(x, y)])) > 1e-12:
                    return False
    return True


# ---------------------------------------------------------------------------
# Ambiguities.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AmbiguityResult:
    value: float | None  # exact value when available
    lower: float
    upper: float
    method: str

    @property
    def exact(self) -> bool:
        return self.value is not None


def bob_ambiguity_minmax(scheme: DeltaHintScheme, rho: float, version: str | None = None) -> AmbiguityResult:
    """Bob's min-max ambiguity; exact for the list version and whenever the
    per-subset-optimal bracket closes (it does for every built scheme)."""
    version = version or scheme.version
    if version == "list":
        supports: dict = {}
        subsets = list(combinations(range(scheme.delta), scheme.nu))
        for (x, y, m), p in scheme.law.items():
            if p <= 0:
                continue
            for b in subsets:
                supports.setdefault((b, y, tuple(m[i] for i in b)), set()).add(x)
        val = 0.0
        for (x, y, m), p in scheme.law.items():
            if p <= 0:
                continue
            worst = max(len(supports[(b, y, tuple(m[i] for i in b))]) for b in subsets)
            val += float(p) * worst**rho
        return AmbiguityResult(val, val, val, "exact-list")
    lower, upper = bob_minmax_bracket(scheme.bob_cells(), rho)
    if upper - lower <= 1e-12 * max(1.0, upper):
        return AmbiguityResult(upper, lower, upper, "bracket-closed")
    return AmbiguityResult(None, lower, upper, "bracket")


def eve_ambiguity_minmin(
    scheme: DeltaHintScheme, rho: float, budget_bits: int = 26
) -> AmbiguityResult:
    """Eve's exact min-min ambiguity, or a certified bracket when over budget."""
    cells = scheme.eve_cells()
    try:
        val = eve_exact_matching(cells, rho)
        return AmbiguityResult(val, val, val, "matching")
    except BudgetExceededError:
        pass
    try:
        val = eve_exact_enumeration(cells, rho, budget_bits)
        return AmbiguityResult(val, val, val, "enumeration")
    except BudgetExceededError:
        lower, upper = eve_bounds(scheme, rho)
        return AmbiguityResult(None, lower, upper, "bounds")


def eve_bounds(scheme: DeltaHintScheme, rho: float) -> tuple[float, float]:
    """Certified Eve bracket when exact enumeration is out of budget.

    Lower: revealing the accomplice's subset index and eta hints multiplies
    the moment by at most (#subsets * 2^(eta*s))^-rho; evaluated on the exact
    pad-lifted law, which is valid because eta hints pin the pad given (X, Y)
    through the top MDS rows.  Upper: best reachable deterministic accomplice.
    """
    cells = scheme.eve_cells()
    n_sub = math.comb(scheme.delta, scheme.eta)
    upper = min(
        eve_local_search(cells, rho),
        min(moment_for_constant(cells, k, rho) for k in range(n_sub)),
    )
    pair = _pair_moment_with_pad(scheme, rho)
    reveal = n_sub * 2 ** (scheme.eta * scheme.s)
    lower = max(1.0, reveal ** (-rho) * pair)
    return lower, upper


def _pair_moment_with_pad(scheme: DeltaHintScheme, rho: float) -> float:
    """Optimal moment of (X, pad) given Y; the pad is the uniform 2^(eta*r)-ary U."""
    groups: dict = {}
    for (x, y, m), p in scheme.law.items():
        if p <= 0:
            continue
        groups.setdefault(y, {})
        groups[y][(x, m)] = groups[y].get((x, m), 0.0) + float(p)
    # (x, m) refines (x, pad): m is a function of (x, y, pad)
    total = 0.0
    for by_cell in groups.values():
        masses = sorted(by_cell.values(), reverse=True)
        total += sum(q * (rk + 1) ** rho for rk, q in enumerate(masses))
    return total


def eve_fixed_subset_optimum(scheme: DeltaHintScheme, rho: float) -> float:
    """min over fixed eta-subsets of the optimal moment (accomplice ignores (X,Y))."""
    cells = scheme.eve_cells()
    n_sub = math.comb(scheme.delta, scheme.eta)
    return min(moment_for_constant(cells, k, rho) for k in range(n_sub))


def bob_fixed_subset_optimum(scheme: DeltaHintScheme, rho: float) -> float:
    """max over fixed nu-subsets of the per-subset optimal moment."""
    cells = scheme.bob_cells()
    n_sub = math.comb(scheme.delta, scheme.nu)
    return max(moment_for_constant(cells, k, rho) for k in range(n_sub))


# ---------------------------------------------------------------------------
# Theorem verification.
# ---------------------------------------------------------------------------


def verify_disk_theorems(
    scheme: DeltaHintScheme, rho: float, version: str | None = None, instance: str = ""
) -> list[ReportRow]:
    version = version or scheme.version
    joint = scheme.joint
    h = renyi_cond_entropy(joint, RenyiOrder.from_rho(rho))
    nx = len(joint.x_alphabet)
    delta, nu, eta, s, r = scheme.delta, scheme.nu, scheme.eta, scheme.s, scheme.r
    bob = bob_ambiguity_minmax(scheme, rho, version)
    eve = eve_ambiguity_minmin(scheme, rho)
    note = "" if (bob.exact and eve.exact) else "bounds-only sides flagged"
    bob_hi = bob.value if bob.exact else bob.upper
    bob_lo = bob.value if bob.exact else bob.lower
    eve_hi = eve.value if eve.exact else eve.upper
    eve_lo = eve.value if eve.exact else eve.lower
    if version == "guessing":
        bob_dir = 1 + 2 ** (rho * (h - nu * s + eta * r + 1))
        bob_conv = max(1.0, 2 ** (rho * (h - nu * s - math.log2(1 + LN(nx)))))
    else:
        bob_dir = 1 + 2 ** (rho * (h - math.log2(2 ** (nu * s - eta * r) - math.log2(nx) - 2) + 2))
        bob_conv = max(1.0, 2 ** (rho * (h - nu * s)))
    eve_dir = 2 ** (rho * (h - eta * (s - r) - eta * math.log2(delta) - math.log2(1 + LN(nx))))
    eve_conv = min(2 ** (rho * (nu - eta) * s) * bob_lo, 2 ** (rho * h))
    suite = f"disks-{version}"
    tag = version[0]
    return [
        ReportRow(suite, instance, f"bob-direct-{tag}", "<", bob_hi, bob_dir, note),
        ReportRow(suite, instance, f"eve-direct-{tag}", ">=", eve_lo, eve_dir, note),
        ReportRow(suite, instance, f"bob-converse-{tag}", ">=", bob_lo, bob_conv, note),
        ReportRow(suite, instance, f"eve-converse-{tag}", "<=", eve_hi, eve_conv, note),
    ]


def verify_unequal_converse(
    joint: JointPmf,
    law: dict,
    sizes: tuple,
    nu: int,
    eta: int,
    rho: float,
    instance: str = "",
) -> list[ReportRow]:
    """Converse floors for arbitrary schemes whose disk l stores sizes[l] bits.

    `law` maps (x, y, hints tuple) -> prob for any encoder (hint l must fit in
    sizes[l] bits).  Uses certifiable sides of the ambiguity brackets, so a
    pass is always sound.
    """
    delta = len(sizes)
    h = renyi_cond_entropy(joint, RenyiOrder.from_rho(rho))
    nx = len(joint.x_alphabet)
    ssort = sorted(sizes)
    sub_b = list(combinations(range(delta), nu))
    sub_e = list(combinations(range(delta), eta))
    bob_cells = [
        Cell(float(p), x, tuple(("B", b, y, tuple(m[i] for i in b)) for b in sub_b))
        for (x, y, m), p in law.items()
        if p > 0
    ]
    eve_cells = [
        Cell(float(p), x, tuple(("E", e, y, tuple(m[i] for i in e)) for e in sub_e))
        for (x, y, m), p in law.items()
        if p > 0
    ]
    bob_lo, bob_hi = bob_minmax_bracket(bob_cells, rho)
    try:
        eve_val = eve_exact_matching(eve_cells, rho)
    except BudgetExceededError:
        eve_val = eve_exact_enumeration(eve_cells, rho)
    bob_conv_g = max(1.0, 2 ** (rho * (h - sum(ssort[:nu]) - math.log2(1 + LN(nx)))))
    eve_conv = min(2 ** (rho * sum(ssort[: nu - eta])) * bob_lo, 2 ** (rho * h))
    suite = "disks-unequal"
    return [
        ReportRow(suite, instance, "bob-converse-unequal-g", ">=", bob_lo, bob_conv_g),
        ReportRow(suite, instance, "eve-converse-unequal", "<=", eve_val, eve_conv),
    ]


def equal_size_envelope_rows(
    sizes: tuple, nu: int, eta: int, rho: float, h: float, nx: int, grid: int = 5
) -> list[ReportRow]:
    """Equal disks match the unequal converse box up to explicit polylog factors.

    For sampled Bob targets b on the unequal converse frontier, some
    admissible split (p, r) of the equal scheme's s-bar bits guarantees
    Bob <= 1 + F*(b - 1 + base) and F * Eve-floor >= the frontier's Eve value,
    where F collects the delta^eta and (1 + ln|X|) factors.
    """
    delta = len(sizes)
    ssort = sorted(sizes)
    sbar = sum(sizes) // delta
    need = math.ceil(math.log2(delta))
    admissible_r = [0] + [r for r in range(need, sbar - need + 1)] + ([sbar] if sbar >= need else [])
    factor = (
        (2 * delta) ** (rho * eta)
        * (delta**eta * (1 + LN(nx))) ** rho
        * 2 ** (rho * (nu + 2))
        * (1 + LN(nx)) ** rho
    )
    b_floor = max(1.0, 2 ** (rho * (h - sum(ssort[:nu]) - math.log2(1 + LN(nx)))))
    base = 2 ** (rho * (h - nu * sbar + 1))
    rows = []
    for t in range(grid):
        b = b_floor * 2 ** (rho * t)
        e = min(2 ** (rho * sum(ssort[: nu - eta])) * b, 2 ** (rho * h))
        ok = False
        for r in admissible_r:
            bob_rhs = 1 + 2 ** (rho * (h - nu * sbar + eta * r + 1))
            eve_floor = 2 ** (rho * (h - eta * (sbar - r) - eta * math.log2(delta) - math.log2(1 + LN(nx))))
            if bob_rhs <= 1 + factor * max(b - 1, base) and factor * eve_floor >= e:
                ok = True
                break
        rows.append(
            ReportRow(
                "disks-envelope",
                f"sizes={sizes},b-step={t}",
                "equal-size-covers-corner",
                ">=",
                1.0 if ok else 0.0,
                1.0,
            )
        )
    return rows


# ---------------------------------------------------------------------------
# Parameter selection and asymptotics.
# ---------------------------------------------------------------------------


def choose_pr(
    u_bound: float,
    s: int,
    nu: int,
    eta: int,
    delta: int,
    renyi_value: float,
    rho: float,
    version: str = "guessing",
    nx: int | None = None,
) -> tuple[int, int]:
    """Pick an admissible (p, r) making Bob's direct bound beat u_bound.

    Clamps the ideal pad width into {0} union [ceil(log2 delta), s] respecting
    the admissibility constraints; raises on infeasible u_bound.
    """
    h = renyi_value
    if version == "guessing":
        if not u_bound >= 1 + 2 ** (rho * (h - nu * s + 1)):
            raise DomainError("u_bound below the achievability threshold")
        r_tilde = (nu * s + math.log2(u_bound - 1) / rho - h - 1) / eta if eta else s
    else:
        if nx is None:
            raise DomainError("list version needs nx")
        if not u_bound >= 1 + 2 ** (rho * (h - math.log2(2 ** (nu * s) - math.log2(nx) - 2) + 2)):
            raise DomainError("u_bound below the achievability threshold")
        inner = 2 ** (h - math.log2(u_bound - 1) / rho + 2) + math.log2(nx) + 2
        r_tilde = (nu * s - math.log2(inner)) / eta if eta else s
    log_d = math.log2(delta)
    fl = math.floor(r_tilde)
    if fl < log_d:
        r = 0
    elif fl < s - log_d:
        r = fl
    elif fl < s:
        r = s - math.ceil(log_d)
    else:
        r = s
    if r not in (0, s) and r < math.ceil(log_d):
        r = 0
    p = s - r
    if p not in (0,) and p < math.ceil(log_d):
        raise DomainError(f"no admissible split for s={s}, delta={delta}")
    return p, r


def disk_exponents(
    rate_s: float, nu: int, eta: int, rho: float, entropy_rate: float, e_bob: float | None = None
):
    """Privacy exponent (or modest variant) for per-disk rate rate_s."""
    from .twohint import ExponentOutcome

    if rate_s < 0 or rho <= 0 or entropy_rate < 0:
        raise DomainError("rates and rho must be nonnegative (rho positive)")
    h = entropy_rate
    if e_bob is None:
        if nu * rate_s < h:
            return ExponentOutcome(-math.inf, None)
        boundary = nu * rate_s == h
        return ExponentOutcome(rho * min(rate_s * (nu - eta), h), None, boundary)
    if e_bob < 0:
        raise DomainError("e_bob must be >= 0")
    if nu * rate_s < h - e_bob / rho:
        return ExponentOutcome(-math.inf, None)
    return ExponentOutcome(min(rho * rate_s * (nu - eta) + e_bob, rho * h), None, False)
