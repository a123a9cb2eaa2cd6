"""Monte Carlo a-shuffles (GSR model) and empirical variation distance.

An a-shuffle is drawn as a word of n i.i.d. digits in 1..a.  The digit word
fixes both the cut (packet j holds the next n_j cards, n_j = #digits equal to
j) and the riffle (output position p takes the next card of packet w_p), so
every cut/riffle combination has probability a**-n.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np
from scipy.special import gammaincc

from .deck import BudgetExceeded, Deck, enumerate_orbit
from .exact import prob_from_descents, descent_polynomial

TALLY_LIMIT = 10**5
POOL_THRESHOLD = 5


class OrbitTooLarge(BudgetExceeded):
    pass


def permutation_from_word(word) -> np.ndarray:
    """Position map of the a-shuffle encoded by ``word`` (0-based, card i -> out[i])."""
    return np.argsort(np.asarray(word), kind="stable")


@dataclass
class ShuffleSampler:
    a: int
    n: int
    seed: int | None = None
    rng: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        if self.a < 1 or self.n < 1:
            raise ValueError("a and n must be positive")
        self.rng = np.random.default_rng(self.seed)

    def spawn(self, count: int) -> list[ShuffleSampler]:
        """Independent child samplers, e.g. one per worker."""
        children = []
        for child_seq in self.rng.bit_generator.seed_seq.spawn(count):
            s = ShuffleSampler(self.a, self.n)
            s.rng = np.random.default_rng(child_seq)
            children.append(s)
        return children

    def words(self, size: int) -> np.ndarray:
        return self.rng.integers(0, self.a, size=(size, self.n), dtype=np.int64)

    def sample(self, size: int | None = None) -> np.ndarray:
        """One permutation (shape (n,)) or a batch of shape (size, n)."""
        if size is None:
            return permutation_from_word(self.words(1)[0])
        return np.argsort(self.words(size), axis=1, kind="stable")


def sample_a_shuffle(sampler: ShuffleSampler) -> tuple[int, ...]:
    return tuple(int(x) for x in sampler.sample())


def _codes(deck: Deck) -> np.ndarray:
    index = {v: i for i, v in enumerate(deck.alphabet)}
    return np.array([index[c] for c in deck.cards], dtype=np.int64)


def _decode(codes_row, alphabet) -> str:
    return "".join(alphabet[int(c)] for c in codes_row)


def shuffle_deck(sampler: ShuffleSampler, deck: Deck) -> Deck:
    if len(deck) != sampler.n:
        raise ValueError("deck size does not match sampler")
    perm = sampler.sample()
    out = [""] * len(deck)
    for i, j in enumerate(perm):
        out[j] = deck.cards[i]
    return Deck("".join(out), deck.alphabet)


def _shuffled_batch(perms: np.ndarray, deck: Deck, mode: str) -> np.ndarray:
    codes = _codes(deck)
    if mode == "fixed_source":
        out = np.empty_like(perms)
        np.put_along_axis(out, perms, np.broadcast_to(codes, perms.shape), axis=1)
        return out
    # fixed target: card i of the fresh deck lands at perms[i] and goes to hand target[perms[i]]
    return codes[perms]


def _tally(rows: np.ndarray, k: int) -> Counter:
    n = rows.shape[1]
    if k**n < 2**62:
        weights = k ** np.arange(n - 1, -1, -1, dtype=np.int64)
        keys, cnt = np.unique(rows @ weights, return_counts=True)
        out = Counter()
        for key, c in zip(keys.tolist(), cnt.tolist()):
            digits = []
            for _ in range(n):
                key, r = divmod(key, k)
                digits.append(r)
            out[tuple(reversed(digits))] = c
        return out
    uniq, cnt = np.unique(rows, axis=0, return_counts=True)
    return Counter({tuple(r): c for r, c in zip(uniq.tolist(), cnt.tolist())})


@dataclass
class SimReport:
    trials: int
    a: int
    mode: str
    deck: str
    N: int
    frequencies: dict[str, int]
    tv_estimate: float
    std_error: float
    bias_bound: float
    seed: int | None = None
    chi2: float | None = None
    df: int | None = None
    p: float | None = None
    exact_tv: Fraction | None = None

    def to_dict(self) -> dict:
        out = {
            "trials": self.trials,
            "a": self.a,
            "mode": self.mode,
            "deck": self.deck,
            "N": self.N,
            "tv_estimate": self.tv_estimate,
            "std_error": self.std_error,
            "bias_bound": self.bias_bound,
            "chi2": self.chi2,
            "df": self.df,
            "p": self.p,
            "seed": self.seed,
        }
        if self.exact_tv is not None:
            out["exact_tv"] = f"{self.exact_tv.numerator}/{self.exact_tv.denominator}"
            out["exact_tv_approx"] = float(self.exact_tv)
        return out


def plug_in_tv(counts: Mapping, trials: int, N: int) -> tuple[float, float, float]:
    """TV estimate, delta-method standard error, and upper bias bound."""
    u = 1.0 / N
    tv = 0.5 * (N - len(counts)) * u
    plus = minus = 0.0
    for c in counts.values():
        f = c / trials
        tv += 0.5 * abs(f - u)
        if f > u:
            plus += f
        elif f < u:
            minus += f
    # cells never observed sit below uniform
    drift = plus - minus
    se = 0.5 * math.sqrt(max(0.0, 1.0 - drift * drift) / trials)
    bias = 0.5 * math.sqrt((N - 1) / trials)
    return tv, se, bias


def exact_distribution(a: int, deck: Deck, mode: str) -> dict[str, Fraction]:
    """Exact outcome probabilities for ``estimate_tv`` outcomes (small orbits only)."""
    out = {}
    for other in enumerate_orbit(deck.composition(), TALLY_LIMIT):
        if mode == "fixed_source":
            out[other.cards] = prob_from_descents(a, descent_polynomial(deck, other))
        else:
            out[other.cards] = prob_from_descents(a, descent_polynomial(other, deck))
    return out


def estimate_tv(sampler: ShuffleSampler, mode: str, deck: Deck, trials: int,
                batch: int = 200_000, exact: Mapping[str, Fraction] | None = None) -> SimReport:
    """Empirical variation distance from uniform for a small orbit.

    ``mode`` is ``fixed_source`` (tally the shuffled deck) or ``fixed_target``
    (shuffle a fresh deck, deal it by ``deck`` and tally which hand got each
    original card).  With ``exact`` given, a chi-square test is attached.
    """
    if mode not in ("fixed_source", "fixed_target"):
        raise ValueError(f"unknown mode {mode!r}")
    if trials < 1:
        raise ValueError("trials must be positive")
    if len(deck) != sampler.n:
        raise ValueError("deck size does not match sampler")
    comp = deck.composition()
    N = comp.orbit_size()
    if N > TALLY_LIMIT:
        raise OrbitTooLarge("orbit", N, TALLY_LIMIT)
    k = len(deck.alphabet)
    tally: Counter = Counter()
    done = 0
    while done < trials:
        m = min(batch, trials - done)
        tally.update(_tally(_shuffled_batch(sampler.sample(m), deck, mode), k))
        done += m
    freqs = {_decode(key, deck.alphabet): c for key, c in sorted(tally.items())}
    tv, se, bias = plug_in_tv(freqs, trials, N)
    report = SimReport(trials, sampler.a, mode, deck.cards, N, freqs, tv, se, bias, sampler.seed)
    if exact is not None:
        report.chi2, report.df, report.p = gof_test(freqs, exact)
        u = Fraction(1, N)
        report.exact_tv = sum((abs(p - u) for p in exact.values()), Fraction(0)) / 2
    return report


def gof_test(empirical: Mapping | SimReport, exact: Mapping) -> tuple[float, int, float]:
    """Pearson chi-square of observed counts against exact cell probabilities.

    Cells with expected count below 5 are pooled into one cell.  The p-value is
    the regularized upper incomplete gamma Q(df/2, chi2/2).  Cells of exact
    probability zero are dropped; observing one of them gives p = 0.
    """
    counts = empirical.frequencies if isinstance(empirical, SimReport) else empirical
    extra = set(counts) - set(exact)
    if extra:
        raise ValueError(f"observed outcomes with no exact probability: {sorted(extra)[:3]}")
    if any(p < 0 for p in exact.values()):
        raise ValueError("exact cell probabilities must be non-negative")
    impossible = {k for k, p in exact.items() if p == 0}
    if any(counts.get(k, 0) for k in impossible):
        return float("inf"), max(len(exact) - len(impossible) - 1, 1), 0.0
    exact = {k: p for k, p in exact.items() if p != 0}
    if len(exact) < 2:
        raise ValueError("goodness of fit needs at least two cells")
    total = sum(counts.values())
    cells = [(total * float(p), counts.get(key, 0)) for key, p in exact.items()]
    big = [(e, o) for e, o in cells if e >= POOL_THRESHOLD]
    small = [(e, o) for e, o in cells if e < POOL_THRESHOLD]
    if small:
        pooled = (sum(e for e, _ in small), sum(o for _, o in small))
        if pooled[0] < POOL_THRESHOLD and big:
            big.sort()
            e0, o0 = big.pop(0)
            pooled = (pooled[0] + e0, pooled[1] + o0)
        big.append(pooled)
    if len(big) < 2:
        raise ValueError("all cells pooled into one; need more trials")
    stat = sum((o - e) ** 2 / e for e, o in big)
    df = len(big) - 1
    return stat, df, float(gammaincc(df / 2, stat / 2))


def enumerate_words(a: int, n: int) -> Counter:
    """Tally permutations over all a**n digit words (the sampler's deterministic core)."""
    tally: Counter = Counter()
    for word in itertools.product(range(a), repeat=n):
        tally[tuple(int(x) for x in permutation_from_word(word))] += 1
    return tally


def permutation_counts(perms: np.ndarray) -> Counter:
    return _tally(perms, perms.shape[1])
