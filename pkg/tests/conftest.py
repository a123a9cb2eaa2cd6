import itertools
import math
import random
from fractions import Fraction

import pytest

from cardmix.deck import Deck, enumerate_orbit
from cardmix.exact import shuffle_binomial

_RESULTS: list[tuple[str, bool, str]] = []


def canonical_decks(n, max_values=4):
    """Every deck of n cards over <= max_values values, up to relabelling (A, B, ... in order of first use)."""
    def grow(prefix, used):
        if len(prefix) == n:
            yield "".join(prefix)
            return
        for i in range(min(used + 1, max_values)):
            yield from grow(prefix + [chr(65 + i)], max(used, i + 1))

    for cards in grow([], 0):
        yield Deck(cards)


def random_decks(count, n_range, max_values=4, seed=2024, max_orbit=None, max_stabilizer=None):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        n = rng.randint(*n_range)
        k = rng.randint(1, max_values)
        cards = "".join(rng.choice("ABCD"[:k]) for _ in range(n))
        deck = Deck(cards)
        if max_orbit and deck.composition().orbit_size() > max_orbit:
            continue
        if max_stabilizer and deck.composition().stabilizer_size() > max_stabilizer:
            continue
        out.append(deck)
    return out


def brute_shuffle_distribution(a, n):
    """P_a over S_n by listing every cut into a packets and every riffle of them.

    A cut is a composition (n_1..n_a) of n; a riffle assigns output slots to
    packets.  Each (cut, riffle) pair is equally likely.
    """
    dist = {}
    total = 0
    for cuts in itertools.product(range(n + 1), repeat=a):
        if sum(cuts) != n:
            continue
        starts = [sum(cuts[:j]) for j in range(a)]
        # choose the slots for each packet in turn
        def place(j, free):
            if j == a:
                yield []
                return
            for slots in itertools.combinations(free, cuts[j]):
                rest = [f for f in free if f not in slots]
                for tail in place(j + 1, rest):
                    yield [slots] + tail

        for assignment in place(0, list(range(n))):
            perm = [0] * n
            for j, slots in enumerate(assignment):
                for offset, slot in enumerate(slots):
                    perm[starts[j] + offset] = slot
            key = tuple(perm)
            dist[key] = dist.get(key, 0) + 1
            total += 1
    assert total == a**n
    return {k: Fraction(v, total) for k, v in dist.items()}


def bayer_diaconis(a, perm):
    n = len(perm)
    des = sum(1 for i in range(n - 1) if perm[i] > perm[i + 1])
    return Fraction(shuffle_binomial(a, n, des), a**n)


@pytest.fixture
def criterion(request):
    """Record one acceptance criterion result for the end-of-run summary."""
    def record(label, ok, detail=""):
        _RESULTS.append((label, bool(ok), detail))
        print(f"{label}: {'PASS' if ok else 'FAIL'} {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in _RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}  {detail}")
