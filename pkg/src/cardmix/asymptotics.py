"""First-order constants: c1, kappa1 (fixed source) and kappabar1 (fixed target).

``kappabar1`` runs the theta-distribution recursion over every sub-composition
of the target.  Theta values are kept as integers scaled by a common
denominator, and bucket counts as residues modulo a few 56-bit primes in
int64 numpy arrays; the exact counts are rebuilt by CRT at the end and checked
against the multinomial orbit size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .deck import (
    DEFAULT_ORBIT_BUDGET,
    BudgetExceeded,
    CompositionMismatch,
    Deck,
    cut,
    enumerate_orbit,
    w_matrix,
    z_matrix,
)
from .exact import DEFAULT_MAX_N, eulerian_row, transition_sets
from .report import exact_fields

DEFAULT_STATE_BUDGET = 5_000_000

# largest primes below 2**56; sums of up to 127 residues stay inside int64
_PRIMES = (
    72057594037927931, 72057594037927909, 72057594037927889, 72057594037927879,
    72057594037927847, 72057594037927843, 72057594037927789, 72057594037927759,
)


@dataclass(frozen=True)
class KappaResult:
    value: Fraction
    context: str
    N: int
    kind: str = "kappabar1"
    scale_L: int | None = None

    def __float__(self) -> float:
        return float(self.value)

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "context": self.context, **exact_fields(self.value),
               "N": str(self.N)}
        out["kappa"] = out["exact"]
        if self.scale_L is not None:
            out["scale_L"] = self.scale_L
        return out


@dataclass
class ThetaDistribution:
    """Counts of decks in the orbit by ``scale * theta`` (an integer key)."""

    scale: int
    counts: dict[int, int] = field(default_factory=dict)
    composition: tuple[int, ...] = ()

    def total(self) -> int:
        return sum(self.counts.values())

    def abs_moment(self) -> Fraction:
        """Sum over decks of |theta|."""
        return Fraction(sum(c * abs(s) for s, c in self.counts.items()), self.scale)


def _aligned(source: Deck, target: Deck) -> Deck:
    if not source.same_orbit(target):
        raise CompositionMismatch(f"{target.cards!r} is not a reordering of {source.cards!r}")
    return Deck(target.cards, source.alphabet)


def c1(source: Deck, target: Deck) -> Fraction:
    """Coefficient of 1/a in the large-a expansion of P_a(source -> target)."""
    target = _aligned(source, target)
    comp = source.composition()
    w = w_matrix(source).entries
    z = z_matrix(target).entries
    return _c1(w, z, comp.counts, comp.n, comp.orbit_size())


def _c1(w, z, counts, n, N) -> Fraction:
    k = len(counts)
    total = Fraction(0)
    for u in range(k):
        for v in range(u + 1, k):
            if w[u][v] and z[u][v]:
                total += Fraction(w[u][v] * z[u][v], counts[u] * counts[v])
    return total * n / (2 * N)


def expected_asc_minus_des(source: Deck, target: Deck, max_n: int = DEFAULT_MAX_N) -> Fraction:
    """Mean of asc - des over T(source, target), by brute-force enumeration."""
    n = len(source)
    total = count = 0
    for perm in transition_sets(source, target, max_n):
        des = sum(1 for i in range(n - 1) if perm[i] > perm[i + 1])
        total += n - 1 - 2 * des
        count += 1
    return Fraction(total, count)


def theta(source: Deck, target: Deck) -> Fraction:
    """Sum over digraphs of ``source`` of Z(target, u, v) / (n_u n_v)."""
    target = _aligned(source, target)
    comp = target.composition()
    z = z_matrix(target).entries
    index = {v: i for i, v in enumerate(target.alphabet)}
    total = Fraction(0)
    c = source.cards
    for i in range(len(c) - 1):
        u, v = index[c[i]], index[c[i + 1]]
        if z[u][v]:
            total += Fraction(z[u][v], comp.counts[u] * comp.counts[v])
    return total


def kappa1_distinct(n: int) -> Fraction:
    """kappa1 of an n-card deck with all cards distinct, via Eulerian numbers."""
    if n < 1:
        raise ValueError("n must be positive")
    row = eulerian_row(n)
    s = sum(e * abs(n - 1 - 2 * d) for d, e in enumerate(row))
    return Fraction(n * s, 4 * math.factorial(n))


def kappa1_approx(n: int) -> float:
    return n * math.sqrt((n + 1) / (24 * math.pi))


def kappa1_enum(source: Deck, budget: int = DEFAULT_ORBIT_BUDGET) -> KappaResult:
    """kappa1 for a fixed source deck: half the sum of |c1| over all targets."""
    comp = source.composition()
    N, n = comp.orbit_size(), comp.n
    w = w_matrix(source).entries
    total = Fraction(0)
    for target in enumerate_orbit(comp, budget):
        total += abs(_c1(w, z_matrix(target).entries, comp.counts, n, N))
    return KappaResult(total / 2, source.cards, N, kind="kappa1")


def kappabar1_enum(target: Deck, budget: int = DEFAULT_ORBIT_BUDGET) -> KappaResult:
    """kappabar1 for a fixed target by summing |c1| over every source deck."""
    comp = target.composition()
    N, n = comp.orbit_size(), comp.n
    z = z_matrix(target).entries
    total = Fraction(0)
    for source in enumerate_orbit(comp, budget):
        total += abs(_c1(w_matrix(source).entries, z, comp.counts, n, N))
    return KappaResult(total / 2, target.cards, N, kind="kappabar1")


def theta_scale(target: Deck) -> tuple[int, list[list[int]]]:
    """Common denominator L and the integer exponents L * Z(u,v) / (n_u n_v)."""
    comp = target.composition()
    if any(c == 0 for c in comp.counts):
        raise ValueError("every alphabet value must occur in the pattern")
    z = z_matrix(target).entries
    k = len(comp.counts)
    L = 1
    for u in range(k):
        for v in range(u + 1, k):
            nn = comp.counts[u] * comp.counts[v]
            L = math.lcm(L, nn // math.gcd(abs(z[u][v]), nn))
    s = [[z[u][v] * L // (comp.counts[u] * comp.counts[v]) for v in range(k)] for u in range(k)]
    return L, s


def _crt(residues: np.ndarray, primes: tuple[int, ...]) -> list[int]:
    """Rebuild nonnegative integers from residues of shape (len(primes), m)."""
    M = math.prod(primes)
    parts = []
    for p in primes:
        Mp = M // p
        parts.append(Mp * pow(Mp, -1, p))
    out = []
    for col in residues.T.tolist():
        out.append(sum(r * c for r, c in zip(col, parts)) % M)
    return out


def theta_distribution(target: Deck, state_budget: int = DEFAULT_STATE_BUDGET) -> ThetaDistribution:
    """Distribution of theta over the orbit of ``target``, by the last-card recursion.

    g[m, v] (decks with composition m ending in v) is the sum over u of
    g[m - e_v, u] shifted by the exponent for the digraph u-v.  One-card decks
    start as a point mass at zero.
    """
    comp = target.composition()
    counts = comp.counts
    k, n, N = len(counts), comp.n, comp.orbit_size()
    L, s = theta_scale(target)
    step = 0
    for row in s:
        for x in row:
            step = math.gcd(step, abs(x))
    step = step or 1
    s = np.array(s, dtype=np.int64) // step

    radix = np.array([c + 1 for c in counts], dtype=np.int64)
    n_states = int(np.prod(radix))
    if n_states * k > state_budget:
        raise BudgetExceeded("theta recursion states", n_states * k, state_budget)
    if k > 127:
        raise ValueError("too many card values")
    strides = np.cumprod(np.concatenate(([1], radix[:-1])))
    codes = np.arange(n_states, dtype=np.int64)
    digits = (codes[:, None] // strides[None, :]) % radix[None, :]
    sizes = digits.sum(axis=1)

    n_primes = max(1, -(-(N.bit_length() + 1) // 55))
    if n_primes > len(_PRIMES):
        raise BudgetExceeded("orbit size bits", N.bit_length(), 55 * len(_PRIMES))
    primes = _PRIMES[:n_primes]
    pcol = np.array(primes, dtype=np.int64)[:, None, None]

    # layer of one-card decks: point mass at key 0 for the matching last value
    prev_codes = codes[sizes == 1]
    prev_digits = digits[sizes == 1]
    prev_lo = 0
    prev_valid = prev_digits > 0
    big = np.iinfo(np.int64).max // 4
    prev_hi_b = np.where(prev_valid, 0, -big)
    prev_lo_b = np.where(prev_valid, 0, big)
    G = np.zeros((n_primes, len(prev_codes), k, 1), dtype=np.int64)
    for r, m in enumerate(prev_digits):
        G[:, r, int(np.argmax(m)), 0] = 1

    for t in range(2, n + 1):
        sel = sizes == t
        cur_codes, cur_digits = codes[sel], digits[sel]
        S = len(cur_codes)
        valid = cur_digits > 0
        hi_b = np.full((S, k), -big, dtype=np.int64)
        lo_b = np.full((S, k), big, dtype=np.int64)
        preds = []
        for v in range(k):
            rows = np.nonzero(valid[:, v])[0]
            pred = np.searchsorted(prev_codes, cur_codes[rows] - strides[v])
            preds.append((rows, pred))
            cand_hi = np.where(prev_valid[pred], prev_hi_b[pred] + s[:, v][None, :], -big)
            cand_lo = np.where(prev_valid[pred], prev_lo_b[pred] + s[:, v][None, :], big)
            hi_b[rows, v] = cand_hi.max(axis=1)
            lo_b[rows, v] = cand_lo.min(axis=1)
        lo = int(lo_b[valid].min())
        hi = int(hi_b[valid].max())
        R, R_prev = hi - lo + 1, G.shape[3]
        newG = np.zeros((n_primes, S, k, R), dtype=np.int64)
        for v in range(k):
            rows, pred = preds[v]
            acc = np.zeros((n_primes, len(rows), R), dtype=np.int64)
            for u in range(k):
                start = prev_lo + int(s[u, v]) - lo
                a0, a1 = max(0, start), min(R, start + R_prev)
                if a0 >= a1:
                    continue
                acc[:, :, a0:a1] += G[:, pred, u, a0 - start : a1 - start]
            acc %= pcol
            newG[:, rows, v, :] = acc
        G, prev_codes, prev_valid, prev_lo = newG, cur_codes, valid, lo
        prev_hi_b, prev_lo_b = hi_b, lo_b

    final = G[:, 0, :, :].sum(axis=1) % pcol[:, :, 0]
    exact = _crt(final, primes)
    dist = {(prev_lo + i) * step: c for i, c in enumerate(exact) if c}
    result = ThetaDistribution(L, dist, tuple(counts))
    if result.total() != N:
        raise ArithmeticError("theta recursion lost decks: counts do not sum to the orbit size")
    return result


def kappabar1(target: Deck, state_budget: int = DEFAULT_STATE_BUDGET) -> KappaResult:
    """kappabar1 of a dealing pattern: (n / 4N) * sum over the orbit of |theta|."""
    comp = target.composition()
    N, n = comp.orbit_size(), comp.n
    dist = theta_distribution(target, state_budget)
    value = dist.abs_moment() * n / (4 * N)
    return KappaResult(value, target.cards, N, kind="kappabar1", scale_L=dist.scale)


@dataclass
class CutSweep:
    pattern: Deck
    rows: list[tuple[int, KappaResult]]

    @property
    def argmin(self) -> int:
        return min(self.rows, key=lambda r: (r[1].value, r[0]))[0]

    def value_at(self, k: int) -> Fraction:
        return self.rows[k][1].value


def canonical_form(deck: Deck) -> str:
    """Representative of ``deck`` up to relabelling values and reversal.

    kappabar1 is invariant under both: relabelling permutes the orbit, and
    reversal negates every Z entry, which negates theta on the whole orbit.
    """
    def relabel(cards):
        names: dict[str, str] = {}
        return "".join(names.setdefault(c, chr(0x41 + len(names))) for c in cards)

    return min(relabel(deck.cards), relabel(deck.cards[::-1]))


def cut_sweep(target: Deck, state_budget: int = DEFAULT_STATE_BUDGET) -> CutSweep:
    """kappabar1 of every cut of ``target``."""
    seen: dict[str, tuple[Fraction, int | None]] = {}
    rows = []
    for k in range(len(target)):
        pattern = cut(target, k)
        key = canonical_form(pattern)
        if key in seen:
            N = pattern.composition().orbit_size()
            res = KappaResult(seen[key][0], pattern.cards, N, "kappabar1", seen[key][1])
        else:
            res = kappabar1(pattern, state_budget)
            seen[key] = (res.value, res.scale_L)
        rows.append((k, res))
    return CutSweep(target, rows)
