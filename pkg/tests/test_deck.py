import itertools
import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cardmix.deck import (
    BudgetExceeded,
    Composition,
    Deck,
    PatternError,
    count_digraphs,
    count_pairs,
    cut,
    enumerate_orbit,
    lattice_path,
    make_pattern,
    parse_pattern,
    w_matrix,
    w_stat,
    z_matrix,
    z_stat,
)

from conftest import canonical_decks

decks = st.text(alphabet="ABCD", min_size=1, max_size=12).map(Deck)


class TestParsePattern:
    def test_cyclic_bridge(self):
        d = parse_pattern("(NESW)^13")
        assert len(d) == 52
        assert d.composition().as_dict() == {"N": 13, "E": 13, "S": 13, "W": 13}

    def test_single_card(self):
        d = parse_pattern("A")
        assert d.cards == "A" and d.alphabet == ("A",)

    def test_poker(self):
        d = parse_pattern("(1234)^5(5)^32")
        assert len(d) == 52
        assert d.composition().counts == (5, 5, 5, 5, 32)

    def test_mixed_terms_and_bare_powers(self):
        assert parse_pattern("(NESWWSEN)^6NESW").cards == "NESWWSEN" * 6 + "NESW"
        assert parse_pattern("N^2 E^2").cards == "NNEE"

    def test_explicit_alphabet(self):
        d = parse_pattern("BA", alphabet="AB")
        assert d.alphabet == ("A", "B")

    @pytest.mark.parametrize("text,pos", [
        ("(AB)^0", 5),
        ("(AB", 0),
        ("(AB)", 4),
        ("A)", 1),
        ("()^2", 0),
        ("(A)^", 4),
    ])
    def test_errors_report_position(self, text, pos):
        with pytest.raises(PatternError) as exc:
            parse_pattern(text)
        assert exc.value.pos == pos

    def test_empty(self):
        with pytest.raises(PatternError):
            parse_pattern("   ")


class TestMakePattern:
    def test_back_and_forth_bridge(self):
        assert make_pattern("back_and_forth", 4, 13) == parse_pattern("(NESWWSEN)^6NESW")

    def test_cyclic_bridge(self):
        assert make_pattern("cyclic", 4, 13) == parse_pattern("(NESW)^13")

    def test_ordered_degenerate(self):
        assert make_pattern("ordered", 2, 1).cards == "NE"

    def test_many_players_use_digits(self):
        assert make_pattern("cyclic", 5, 1).cards == "12345"

    def test_bad_style(self):
        with pytest.raises(ValueError):
            make_pattern("shuffled", 2, 2)


class TestCut:
    def test_poker_cut16(self):
        poker = parse_pattern("(1234)^5(5)^32")
        assert cut(poker, 16).cards == parse_pattern("(5)^16(1234)^5(5)^16").cards
        z = z_matrix(cut(poker, 16))
        assert all(z[u, "5"] == 0 for u in "1234")

    def test_identity_and_inverse(self):
        d = Deck("ABCAAB")
        assert cut(d, 0) == d
        for k in range(1, len(d)):
            assert cut(cut(d, k), len(d) - k) == d

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            cut(Deck("AB"), 2)

    @given(decks, st.integers(0, 11))
    def test_composition_preserved(self, d, k):
        k %= len(d)
        assert cut(d, k).composition() == d.composition()


class TestStatistics:
    example = Deck("ABAAABABB")

    def test_digraphs(self):
        assert count_digraphs(self.example, "A", "B") == 3
        assert count_digraphs(self.example, "B", "A") == 2
        assert count_digraphs(Deck("AAAA", ("A", "B")), "A", "B") == 0

    def test_pairs(self):
        assert count_pairs(self.example, "A", "B") == 15
        assert count_pairs(self.example, "B", "A") == 5
        assert count_pairs(Deck("AB"), "A", "A") == 0

    def test_w_and_z(self):
        assert w_stat(self.example, "A", "B") == 1
        assert z_stat(self.example, "A", "B") == 10

    def test_poker_z(self):
        z = z_matrix(parse_pattern("(1234)^5(5)^32"))
        assert z["1", "2"] == 5 and z["3", "4"] == 5
        assert all(z[u, "5"] == 160 for u in "1234")

    def test_bridge_ordered_z(self):
        z = z_matrix(parse_pattern("N^13E^13S^13W^13"))
        assert z.to_lists() == [[0, 169, 169, 169], [-169, 0, 169, 169],
                                [-169, -169, 0, 169], [-169, -169, -169, 0]]

    def test_json(self):
        doc = json.loads(z_matrix(Deck("AB")).to_json())
        assert doc == {"alphabet": ["A", "B"], "z": [[0, 1], [-1, 0]]}

    def test_scale_ratio(self):
        ordered = z_matrix(make_pattern("ordered", 4, 13))
        cyclic = z_matrix(make_pattern("cyclic", 4, 13))
        assert ordered.scaled_by(cyclic) == 13

    def test_unknown_value(self):
        with pytest.raises(ValueError):
            count_pairs(Deck("AB"), "A", "C")

    @given(decks)
    def test_antisymmetry(self, d):
        for m in (w_matrix(d), z_matrix(d)):
            k = len(d.alphabet)
            for i, j in itertools.product(range(k), repeat=2):
                assert m.entries[i][j] == -m.entries[j][i]

    @given(decks)
    def test_totals(self, d):
        pairs = sum(count_pairs(d, u, v) for u in d.alphabet for v in d.alphabet)
        digraphs = sum(count_digraphs(d, u, v) for u in d.alphabet for v in d.alphabet)
        assert pairs == len(d) * (len(d) - 1) // 2
        assert digraphs == len(d) - 1

    @given(decks)
    def test_pair_complement(self, d):
        comp = d.composition().as_dict()
        for u, v in itertools.permutations(d.alphabet, 2):
            assert count_pairs(d, u, v) + count_pairs(d, v, u) == comp[u] * comp[v]

    @given(st.text(alphabet="12", min_size=1, max_size=14))
    def test_two_value_boundary_law(self, cards):
        d = Deck(cards, ("1", "2"))
        expected = 0
        if cards[0] == "1" and cards[-1] == "2":
            expected = 1
        elif cards[0] == "2" and cards[-1] == "1":
            expected = -1
        assert w_stat(d, "1", "2") == expected

    def test_z_not_rotation_invariant(self):
        d = parse_pattern("(1234)^5(5)^32")
        assert z_matrix(cut(d, 16)) != z_matrix(d)


class TestLatticePath:
    def test_cyclic_staircase(self):
        p = lattice_path(parse_pattern("(NESW)^13"), "N", "E")
        assert p.steps == "NE" * 13
        assert (p.southeast_area, p.northwest_area, p.difference) == (91, 78, 13)

    def test_ordered(self):
        p = lattice_path(parse_pattern("N^13E^13"), "N", "E")
        assert (p.southeast_area, p.northwest_area) == (169, 0)

    def test_back_and_forth(self):
        p = lattice_path(make_pattern("back_and_forth", 4, 13), "N", "E")
        assert (p.southeast_area, p.northwest_area) == (85, 84)

    def test_trivial(self):
        p = lattice_path(Deck("NE"), "N", "E")
        assert (p.southeast_area, p.northwest_area) == (1, 0)

    def test_same_value(self):
        with pytest.raises(ValueError):
            lattice_path(Deck("NE"), "N", "N")

    def test_area_difference_is_z_exhaustive(self):
        for n in range(2, 9):
            for d in canonical_decks(n, 3):
                for u, v in itertools.permutations(d.alphabet, 2):
                    p = lattice_path(d, u, v)
                    assert p.southeast_area == count_pairs(d, u, v)
                    assert p.northwest_area == count_pairs(d, v, u)
                    assert p.difference == z_stat(d, u, v)


class TestOrbit:
    def test_small(self):
        comp = Composition(("A", "B"), (2, 1))
        assert [d.cards for d in enumerate_orbit(comp)] == ["AAB", "ABA", "BAA"]

    def test_distinct(self):
        assert len(list(enumerate_orbit(Deck("ABC")))) == 6

    def test_alphabet_order_sets_lex_order(self):
        comp = Composition(("B", "A"), (1, 1))
        assert [d.cards for d in enumerate_orbit(comp)] == ["BA", "AB"]

    def test_bridge_budget(self):
        comp = make_pattern("ordered", 4, 13).composition()
        with pytest.raises(BudgetExceeded) as exc:
            enumerate_orbit(comp)
        assert exc.value.size == math.factorial(52) // math.factorial(13) ** 4

    @settings(max_examples=40)
    @given(st.lists(st.integers(0, 3), min_size=1, max_size=4).filter(lambda c: 0 < sum(c) <= 8))
    def test_count_and_uniqueness(self, counts):
        comp = Composition(tuple("ABCD"[: len(counts)]), tuple(counts))
        orbit = [d.cards for d in enumerate_orbit(comp)]
        assert len(orbit) == len(set(orbit)) == comp.orbit_size()
        assert orbit == sorted(orbit)
