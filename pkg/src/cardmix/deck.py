"""Decks, dealing patterns, and the digraph/pair statistics W and Z.

A deck is a string of single-character card values together with an ordered
alphabet.  The same type doubles as a dealing pattern: position ``i`` holds
the hand (player) that receives the ``i``-th card of the shuffled deck.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

DEFAULT_ORBIT_BUDGET = 10**7

_FORBIDDEN = set("()^") | set(" \t\r\n")


class PatternError(ValueError):
    """Malformed pattern string; ``pos`` is the 0-based offset of the problem."""

    def __init__(self, message: str, pos: int | None = None):
        self.pos = pos
        if pos is not None:
            message = f"{message} (at position {pos})"
        super().__init__(message)


class CompositionMismatch(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    """A computation would exceed its configured enumeration budget."""

    def __init__(self, what: str, size: int, budget: int):
        self.what = what
        self.size = size
        self.budget = budget
        super().__init__(f"{what} of size {size} exceeds budget {budget}")


@dataclass(frozen=True)
class Composition:
    alphabet: tuple[str, ...]
    counts: tuple[int, ...]

    def __post_init__(self):
        if len(self.alphabet) != len(self.counts):
            raise ValueError("alphabet and counts differ in length")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ValueError("repeated symbol in alphabet")
        if any(c < 0 for c in self.counts):
            raise ValueError("negative card count")

    @classmethod
    def from_mapping(cls, counts: dict[str, int]) -> Composition:
        return cls(tuple(counts), tuple(counts.values()))

    @property
    def n(self) -> int:
        return sum(self.counts)

    def count(self, value: str) -> int:
        return self.counts[self.alphabet.index(value)]

    def orbit_size(self) -> int:
        """Number of distinct reorderings, n! / prod(n_v!)."""
        size, used = 1, 0
        for c in self.counts:
            used += c
            size *= math.comb(used, c)
        return size

    def stabilizer_size(self) -> int:
        return math.prod(math.factorial(c) for c in self.counts)

    def sorted_deck(self) -> Deck:
        cards = "".join(v * c for v, c in zip(self.alphabet, self.counts))
        return Deck(cards, self.alphabet)

    def as_dict(self) -> dict[str, int]:
        return dict(zip(self.alphabet, self.counts))


@dataclass(frozen=True)
class Deck:
    cards: str
    alphabet: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.cards:
            raise ValueError("a deck needs at least one card")
        if not self.alphabet:
            object.__setattr__(self, "alphabet", tuple(dict.fromkeys(self.cards)))
        else:
            object.__setattr__(self, "alphabet", tuple(self.alphabet))
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ValueError("repeated symbol in alphabet")
        missing = set(self.cards) - set(self.alphabet)
        if missing:
            raise ValueError(f"cards {sorted(missing)} not in alphabet")
        bad = _FORBIDDEN.intersection(self.alphabet)
        if bad or any(len(s) != 1 for s in self.alphabet):
            raise ValueError("card values must be single printable characters")

    def __len__(self) -> int:
        return len(self.cards)

    def __iter__(self):
        return iter(self.cards)

    def __getitem__(self, i):
        return self.cards[i]

    def __str__(self) -> str:
        return self.cards

    @property
    def n(self) -> int:
        return len(self.cards)

    def composition(self) -> Composition:
        return Composition(self.alphabet, tuple(self.cards.count(v) for v in self.alphabet))

    def with_alphabet(self, alphabet: Sequence[str]) -> Deck:
        return Deck(self.cards, tuple(alphabet))

    def same_orbit(self, other: Deck) -> bool:
        return sorted(self.cards) == sorted(other.cards)

    def relabel(self, mapping: dict[str, str]) -> Deck:
        cards = "".join(mapping[c] for c in self.cards)
        return Deck(cards, tuple(mapping[v] for v in self.alphabet))


def parse_pattern(text: str, alphabet: Sequence[str] | None = None) -> Deck:
    """Expand a pattern such as ``(NESW)^13`` or ``(1234)^5(5)^32``.

    Grammar: ``term+`` where a term is a symbol or ``(symbol+)^count``.
    A bare symbol may also carry a count (``N^13``).  Whitespace is ignored.
    """
    out: list[str] = []
    i, size = 0, len(text)

    def skip_ws(j):
        while j < size and text[j].isspace():
            j += 1
        return j

    def read_count(j):
        j = skip_ws(j)
        if j >= size or text[j] != "^":
            return 1, j, False
        j = skip_ws(j + 1)
        start = j
        while j < size and text[j].isdigit():
            j += 1
        if start == j:
            raise PatternError("expected repetition count after '^'", start)
        count = int(text[start:j])
        if count == 0:
            raise PatternError("repetition count must be positive", start)
        return count, j, True

    while True:
        i = skip_ws(i)
        if i >= size:
            break
        ch = text[i]
        if ch == "(":
            j = i + 1
            group = []
            while True:
                j = skip_ws(j)
                if j >= size:
                    raise PatternError("unclosed '('", i)
                if text[j] == ")":
                    break
                if text[j] in "(^":
                    raise PatternError(f"unexpected {text[j]!r} inside group", j)
                group.append(text[j])
                j += 1
            if not group:
                raise PatternError("empty group", i)
            count, j, explicit = read_count(j + 1)
            if not explicit:
                raise PatternError("group must be followed by '^count'", j)
            out.append("".join(group) * count)
            i = j
        elif ch in ")^":
            raise PatternError(f"unexpected {ch!r}", i)
        else:
            count, j, _ = read_count(i + 1)
            out.append(ch * count)
            i = j
    cards = "".join(out)
    if not cards:
        raise PatternError("pattern expands to an empty deck", 0)
    return Deck(cards, tuple(alphabet) if alphabet else ())


def default_symbols(players: int) -> str:
    if players <= 4:
        return "NESW"[:players]
    pool = "123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz"
    if players > len(pool):
        raise ValueError(f"at most {len(pool)} players have default symbols")
    return pool[:players]


def make_pattern(style: str, players: int, hand_size: int, symbols: str | None = None) -> Deck:
    """Dealing pattern for ``players`` hands of ``hand_size`` cards.

    ``ordered`` gives each player a contiguous block, ``cyclic`` deals round
    robin, and ``back_and_forth`` alternates forward and reversed rounds
    starting forward.
    """
    if players < 1 or hand_size < 1:
        raise ValueError("players and hand_size must be positive")
    symbols = symbols or default_symbols(players)
    if len(symbols) != players:
        raise ValueError("need exactly one symbol per player")
    if style == "ordered":
        cards = "".join(s * hand_size for s in symbols)
    elif style == "cyclic":
        cards = symbols * hand_size
    elif style in ("back_and_forth", "back-and-forth", "bf"):
        cards = "".join(symbols if r % 2 == 0 else symbols[::-1] for r in range(hand_size))
    else:
        raise ValueError(f"unknown dealing style {style!r}")
    return Deck(cards, tuple(symbols))


def cut(pattern: Deck, k: int) -> Deck:
    """Pattern in pre-cut coordinates after moving the top ``k`` cards to the bottom.

    ``result[i] = pattern[(i - k) mod n]``.
    """
    n = len(pattern)
    if not 0 <= k < n:
        raise ValueError(f"cut position {k} out of range 0..{n - 1}")
    if k == 0:
        return pattern
    return Deck(pattern.cards[-k:] + pattern.cards[:-k], pattern.alphabet)


def _check_values(deck: Deck, *values: str):
    for v in values:
        if v not in deck.alphabet:
            raise ValueError(f"value {v!r} not in alphabet {deck.alphabet}")


def count_digraphs(deck: Deck, u: str, v: str) -> int:
    _check_values(deck, u, v)
    c = deck.cards
    return sum(1 for i in range(len(c) - 1) if c[i] == u and c[i + 1] == v)


def count_pairs(deck: Deck, u: str, v: str) -> int:
    _check_values(deck, u, v)
    total = seen_u = 0
    for ch in deck.cards:
        if ch == v:
            total += seen_u
        if ch == u:
            seen_u += 1
    return total


def w_stat(deck: Deck, u: str, v: str) -> int:
    return count_digraphs(deck, u, v) - count_digraphs(deck, v, u)


def z_stat(deck: Deck, u: str, v: str) -> int:
    return count_pairs(deck, u, v) - count_pairs(deck, v, u)


@dataclass(frozen=True)
class StatMatrix:
    """Antisymmetric k x k matrix of W or Z values in alphabet order."""

    alphabet: tuple[str, ...]
    entries: tuple[tuple[int, ...], ...]
    kind: str = "z"

    def __getitem__(self, key: tuple[str, str]) -> int:
        u, v = key
        return self.entries[self.alphabet.index(u)][self.alphabet.index(v)]

    def to_lists(self) -> list[list[int]]:
        return [list(row) for row in self.entries]

    def to_json(self) -> str:
        return json.dumps({"alphabet": list(self.alphabet), self.kind: self.to_lists()})

    def scaled_by(self, other: StatMatrix):
        """Return lambda with self == lambda * other entrywise, or None."""
        ratio = None
        for row_a, row_b in zip(self.entries, other.entries):
            for a, b in zip(row_a, row_b):
                if b == 0:
                    if a != 0:
                        return None
                    continue
                r = Fraction(a, b)
                if ratio is None:
                    ratio = r
                elif r != ratio:
                    return None
        return ratio


ZMatrix = StatMatrix


def _pair_counts(deck: Deck) -> list[list[int]]:
    k = len(deck.alphabet)
    index = {v: i for i, v in enumerate(deck.alphabet)}
    pairs = [[0] * k for _ in range(k)]
    seen = [0] * k
    for ch in deck.cards:
        j = index[ch]
        for i in range(k):
            pairs[i][j] += seen[i]
        seen[j] += 1
    return pairs


def _digraph_counts(deck: Deck) -> list[list[int]]:
    k = len(deck.alphabet)
    index = {v: i for i, v in enumerate(deck.alphabet)}
    dig = [[0] * k for _ in range(k)]
    c = deck.cards
    for i in range(len(c) - 1):
        dig[index[c[i]]][index[c[i + 1]]] += 1
    return dig


def _antisym(counts: list[list[int]]) -> tuple[tuple[int, ...], ...]:
    k = len(counts)
    return tuple(tuple(counts[i][j] - counts[j][i] for j in range(k)) for i in range(k))


def z_matrix(deck: Deck) -> StatMatrix:
    return StatMatrix(deck.alphabet, _antisym(_pair_counts(deck)), "z")


def w_matrix(deck: Deck) -> StatMatrix:
    return StatMatrix(deck.alphabet, _antisym(_digraph_counts(deck)), "w")


@dataclass(frozen=True)
class LatticePath:
    u: str
    v: str
    steps: str  # "N" for each u card, "E" for each v card
    southeast_area: int  # u-v pairs
    northwest_area: int  # v-u pairs

    @property
    def difference(self) -> int:
        return self.southeast_area - self.northwest_area

    def to_dict(self) -> dict:
        return {
            "u": self.u,
            "v": self.v,
            "steps": self.steps,
            "width": self.steps.count("E"),
            "height": self.steps.count("N"),
            "southeast_area": self.southeast_area,
            "northwest_area": self.northwest_area,
            "z": self.difference,
        }


def lattice_path(deck: Deck, u: str, v: str) -> LatticePath:
    """North-east lattice path of ``deck`` restricted to values ``u`` and ``v``.

    Each square southeast of the path is a u-v pair, each square in the
    northwest shape a v-u pair.
    """
    _check_values(deck, u, v)
    if u == v:
        raise ValueError("lattice path needs two different values")
    steps = []
    height = se = nw = 0
    width = 0
    for ch in deck.cards:
        if ch == u:
            steps.append("N")
            height += 1
            nw += width
        elif ch == v:
            steps.append("E")
            width += 1
            se += height
    return LatticePath(u, v, "".join(steps), se, nw)


def enumerate_orbit(comp: Composition | Deck, budget: int = DEFAULT_ORBIT_BUDGET) -> Iterator[Deck]:
    """Yield every reordering once, in lexicographic order by alphabet position."""
    if isinstance(comp, Deck):
        comp = comp.composition()
    size = comp.orbit_size()
    if size > budget:
        raise BudgetExceeded("orbit", size, budget)
    return _orbit_iter(comp)


def _orbit_iter(comp: Composition) -> Iterator[Deck]:
    alphabet = comp.alphabet
    idx = [i for i, c in enumerate(comp.counts) for _ in range(c)]
    n = len(idx)
    while True:
        yield Deck("".join(alphabet[i] for i in idx), alphabet)
        # next permutation in lexicographic order
        i = n - 2
        while i >= 0 and idx[i] >= idx[i + 1]:
            i -= 1
        if i < 0:
            return
        j = n - 1
        while idx[j] <= idx[i]:
            j -= 1
        idx[i], idx[j] = idx[j], idx[i]
        idx[i + 1 :] = reversed(idx[i + 1 :])
