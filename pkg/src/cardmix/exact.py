"""Exact rational computations for a-shuffles.

All probabilities are :class:`fractions.Fraction`; floats only appear when a
caller formats a result for display.
"""

from __future__ import annotations

import itertools
import math
import threading
from fractions import Fraction
from typing import Iterator

from .deck import (
    DEFAULT_ORBIT_BUDGET,
    BudgetExceeded,
    CompositionMismatch,
    Deck,
    enumerate_orbit,
)

DEFAULT_MAX_N = 12

_euler_rows: list[tuple[int, ...]] = [(), (1,)]
_euler_lock = threading.Lock()


def eulerian_row(n: int) -> tuple[int, ...]:
    """Eulerian numbers <n, d> for d = 0..n-1."""
    if n < 1:
        raise ValueError("n must be positive")
    if n >= len(_euler_rows):
        with _euler_lock:
            while len(_euler_rows) <= n:
                m = len(_euler_rows)
                prev = _euler_rows[-1]
                row = tuple(
                    (d + 1) * (prev[d] if d < m - 1 else 0)
                    + (m - d) * (prev[d - 1] if d >= 1 else 0)
                    for d in range(m)
                )
                _euler_rows.append(row)
    return _euler_rows[n]


def eulerian(n: int, d: int) -> int:
    if d < 0 or d >= n:
        if n < 1:
            raise ValueError("n must be positive")
        return 0
    return eulerian_row(n)[d]


def shuffle_binomial(a: int, n: int, d: int) -> int:
    """C(a+n-d-1, n) as a falling-factorial product; zero when a <= d."""
    lo = a - d
    if lo <= 0:
        # the product a-d .. a-d+n-1 passes through zero since d <= n-1
        return 0
    return math.prod(range(lo, lo + n)) // math.factorial(n)


def shuffle_prob_distinct(a: int, n: int, d: int) -> Fraction:
    """Probability of one particular permutation with d descents after an a-shuffle."""
    if a < 1 or n < 1:
        raise ValueError("a and n must be positive")
    if not 0 <= d <= n - 1:
        raise ValueError("descent count out of range")
    return Fraction(shuffle_binomial(a, n, d), a**n)


def tv_distinct(a: int, n: int) -> Fraction:
    """Variation distance from uniform of an n-card all-distinct deck after an a-shuffle."""
    if a < 1 or n < 1:
        raise ValueError("a and n must be positive")
    row = eulerian_row(n)
    denom = a**n
    nfact = math.factorial(n)
    # |C/a^n - 1/n!| = |C*n! - a^n| / (a^n n!)
    total = sum(e * abs(shuffle_binomial(a, n, d) * nfact - denom) for d, e in enumerate(row))
    return Fraction(total, 2 * denom * nfact)


def descents(perm) -> int:
    return sum(1 for i in range(len(perm) - 1) if perm[i] > perm[i + 1])


def apply_permutation(perm, deck: Deck) -> Deck:
    """Move the card at position i to position perm[i] (0-based)."""
    out = [""] * len(deck)
    for i, j in enumerate(perm):
        out[j] = deck.cards[i]
    return Deck("".join(out), deck.alphabet)


def _check_pair(source: Deck, target: Deck, max_n: int):
    if not source.same_orbit(target):
        raise CompositionMismatch(f"{target.cards!r} is not a reordering of {source.cards!r}")
    if len(source) > max_n:
        raise BudgetExceeded("deck", len(source), max_n)


def transition_sets(source: Deck, target: Deck, max_n: int = DEFAULT_MAX_N) -> Iterator[tuple[int, ...]]:
    """All 0-based position maps taking ``source`` to ``target``."""
    _check_pair(source, target, max_n)
    values = sorted(set(source.cards))
    src_pos = [[i for i, c in enumerate(source.cards) if c == v] for v in values]
    dst_pos = [[i for i, c in enumerate(target.cards) if c == v] for v in values]
    n = len(source)
    for choice in itertools.product(*(itertools.permutations(d) for d in dst_pos)):
        perm = [0] * n
        for srcs, dsts in zip(src_pos, choice):
            for i, j in zip(srcs, dsts):
                perm[i] = j
        yield tuple(perm)


def descent_polynomial(source: Deck, target: Deck, max_n: int = DEFAULT_MAX_N) -> list[int]:
    """Coefficients b_d counting permutations of T(source, target) by descents.

    Dynamic programme over source positions; state is the set of target slots
    already used plus the slot of the previous card.
    """
    _check_pair(source, target, max_n)
    n = len(source)
    slots = {v: [j for j, c in enumerate(target.cards) if c == v] for v in set(target.cards)}
    # state: (used mask, last slot) -> descent-count vector
    layer: dict[tuple[int, int], list[int]] = {}
    for j in slots[source.cards[0]]:
        layer[(1 << j, j)] = [1] + [0] * (n - 1)
    for i in range(1, n):
        nxt: dict[tuple[int, int], list[int]] = {}
        candidates = slots[source.cards[i]]
        for (mask, last), poly in layer.items():
            for j in candidates:
                if mask >> j & 1:
                    continue
                key = (mask | 1 << j, j)
                acc = nxt.get(key)
                if acc is None:
                    acc = nxt[key] = [0] * n
                if last > j:
                    for d in range(n - 1):
                        acc[d + 1] += poly[d]
                else:
                    for d in range(n):
                        acc[d] += poly[d]
        layer = nxt
    b = [0] * n
    for poly in layer.values():
        for d in range(n):
            b[d] += poly[d]
    return b


def descent_polynomials_from(source: Deck, max_n: int = 9) -> dict[str, list[int]]:
    """Descent polynomials from ``source`` to every target, by scanning S_n once."""
    n = len(source)
    if n > max_n:
        raise BudgetExceeded("deck", n, max_n)
    out: dict[str, list[int]] = {}
    cards = source.cards
    for perm in itertools.permutations(range(n)):
        slots = [""] * n
        for i, j in enumerate(perm):
            slots[j] = cards[i]
        key = "".join(slots)
        b = out.get(key)
        if b is None:
            b = out[key] = [0] * n
        b[descents(perm)] += 1
    return out


def prob_from_descents(a: int, b: list[int]) -> Fraction:
    n = len(b)
    return Fraction(sum(bd * shuffle_binomial(a, n, d) for d, bd in enumerate(b) if bd), a**n)


def transition_prob(a: int, source: Deck, target: Deck, max_n: int = DEFAULT_MAX_N) -> Fraction:
    if a < 1:
        raise ValueError("a must be positive")
    return prob_from_descents(a, descent_polynomial(source, target, max_n))


def _orbit_and_check(deck: Deck, max_n: int, budget: int):
    if len(deck) > max_n:
        raise BudgetExceeded("deck", len(deck), max_n)
    return list(enumerate_orbit(deck.composition(), budget))


def tv_fixed_source(a: int, source: Deck, max_n: int = DEFAULT_MAX_N,
                    budget: int = DEFAULT_ORBIT_BUDGET) -> Fraction:
    """Variation distance of the deck distribution after a-shuffling ``source``."""
    orbit = _orbit_and_check(source, max_n, budget)
    u = Fraction(1, len(orbit))
    return sum((abs(transition_prob(a, source, t, max_n) - u) for t in orbit), Fraction(0)) / 2


def tv_fixed_target(a: int, target: Deck, max_n: int = DEFAULT_MAX_N,
                    budget: int = DEFAULT_ORBIT_BUDGET) -> Fraction:
    """Variation distance of the dealt partition when shuffling then dealing by ``target``."""
    orbit = _orbit_and_check(target, max_n, budget)
    u = Fraction(1, len(orbit))
    return sum((abs(transition_prob(a, s, target, max_n) - u) for s in orbit), Fraction(0)) / 2


def error_bound(a: int, n: int) -> Fraction:
    """Upper bound on |TV - kappa/a| depending only on deck size and a."""
    if n < 2:
        raise ValueError("n must be at least 2")
    row = eulerian_row(n)
    an = a**n
    nfact = math.factorial(n)
    # common denominator 2 * a^n * n! ; first-order term (n-1-2d)/(2 a (n-1)!)
    total = 0
    for d, e in enumerate(row):
        term = (
            2 * nfact * shuffle_binomial(a, n, d)
            - 2 * an
            - n * (n - 1 - 2 * d) * a ** (n - 1)
        )
        total += e * abs(term)
    return Fraction(total, 4 * an * nfact)
