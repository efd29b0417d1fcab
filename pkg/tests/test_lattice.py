import itertools
from functools import reduce
from operator import xor

import pytest
from hypothesis import given, settings, strategies as st

from toricbloch.errors import BlockTooLarge
from toricbloch.lattice import (Link, RegionCombinatorics, TorusLattice, block_combinatorics,
                                block_sigma, classify_stars, enumerate_block_links, gf2_rank,
                                subset_combinatorics)


def brute_force_exponents(lat, a_mask):
    """Enumerate every product of the first n_s - 1 stars."""
    gens = lat.star_masks[:-1]
    b_mask = lat.full_mask & ~a_mask
    group = {0}
    for g in gens:
        group |= {h ^ g for h in group}
    d_A = sum(1 for g in group if g & b_mask == 0)
    d_B = sum(1 for g in group if g & a_mask == 0)
    return len(group), d_A, d_B


class TestTorus:
    @pytest.mark.parametrize("k", [2, 3, 5])
    def test_counts(self, k):
        lat = TorusLattice(k)
        assert len(lat.links) == 2 * k * k
        assert len(lat.stars) == k * k
        assert len(set(lat.links)) == len(lat.links)

    @pytest.mark.parametrize("k", [2, 3, 4, 7])
    def test_each_link_in_two_stars(self, k):
        lat = TorusLattice(k)
        for i in range(lat.n_links):
            assert sum(m >> i & 1 for m in lat.star_masks) == 2
            assert sum(m >> i & 1 for m in lat.plaquette_masks) == 2

    @pytest.mark.parametrize("k", [2, 3, 4, 6])
    def test_global_constraint(self, k):
        lat = TorusLattice(k)
        assert reduce(xor, lat.star_masks) == 0
        assert reduce(xor, lat.plaquette_masks) == 0

    def test_link_order(self):
        lat = TorusLattice(3)
        assert lat.links[:4] == (Link("h", 0, 0), Link("v", 0, 0), Link("h", 1, 0), Link("v", 1, 0))
        assert lat.link_index(Link("v", 2, 2)) == 17

    def test_k2_star(self, lat2):
        assert set(lat2.star_links(0, 0)) == {
            Link("h", 0, 0), Link("h", 1, 0), Link("v", 0, 0), Link("v", 0, 1)}

    def test_link_string_roundtrip(self):
        assert str(Link("h", 3, 1)) == "h:3,1"
        assert Link.parse("v:0,2") == Link("v", 0, 2)
        with pytest.raises(ValueError):
            Link.parse("x:1,1")

    def test_rejects_k1(self):
        with pytest.raises(ValueError):
            TorusLattice(1)


class TestBlock:
    @pytest.mark.parametrize("k,L,expected", [
        (3, 1, (1, 4, 4)),
        (20, 10, (100, 260, 40)),
        (12, 3, (9, 123, 12)),
    ])
    def test_sigma(self, k, L, expected):
        s = block_sigma(k, L)
        assert (s.sigma_A, s.sigma_B, s.sigma_AB) == expected
        assert s.n_stars == k * k

    @pytest.mark.parametrize("k,L", [(2, 1), (4, 3), (5, 5), (3, 0)])
    def test_too_large(self, k, L):
        with pytest.raises(BlockTooLarge):
            block_sigma(k, L)
        with pytest.raises(BlockTooLarge):
            enumerate_block_links(k, L)

    def test_single_vertex_block(self, lat3):
        region = enumerate_block_links(3, 1)
        assert region.link_set == frozenset(lat3.star_links(0, 0))

    @pytest.mark.parametrize("k,L", [(3, 1), (5, 2), (6, 3), (8, 4), (10, 6)])
    def test_links_and_star_classification(self, k, L):
        lat = TorusLattice(k)
        region = enumerate_block_links(k, L)
        assert len(region.link_set) == 2 * L * L + 2 * L
        assert classify_stars(lat, lat.mask(region.link_set)) == block_sigma(k, L)

    @pytest.mark.parametrize("k,L", [(3, 1), (4, 2), (5, 2), (7, 4), (20, 10)])
    def test_gf2_matches_sigma_formulas(self, k, L):
        lat = TorusLattice(k)
        comb = subset_combinatorics(lat, enumerate_block_links(k, L).link_set)
        assert comb == block_combinatorics(k, L)
        assert comb.log2_f == block_sigma(k, L).sigma_AB - 1 + L * L


class TestSubsetCombinatorics:
    def test_k2_star_subset(self, lat2, star00_k2):
        comb = subset_combinatorics(lat2, star00_k2)
        assert (comb.log2_G, comb.log2_dA, comb.log2_dB, comb.log2_f) == (3, 1, 1, 2)

    @pytest.mark.parametrize("k", [2, 3, 4])
    def test_empty_subset(self, k):
        comb = subset_combinatorics(TorusLattice(k), set())
        assert comb.log2_dA == 0
        assert comb.log2_dB == comb.log2_G == k * k - 1

    def test_k2_exhaustive_against_enumeration(self, lat2):
        for a_mask in range(1 << lat2.n_links):
            G, d_A, d_B = brute_force_exponents(lat2, a_mask)
            comb = subset_combinatorics(lat2, a_mask)
            assert (2**comb.log2_G, 2**comb.log2_dA, 2**comb.log2_dB) == (G, d_A, d_B)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(min_value=0, max_value=(1 << 18) - 1))
    def test_k3_against_enumeration(self, a_mask):
        lat = TorusLattice(3)
        G, d_A, d_B = brute_force_exponents(lat, a_mask)
        comb = subset_combinatorics(lat, a_mask)
        assert (2**comb.log2_dA, 2**comb.log2_dB) == (d_A, d_B)
        assert comb.log2_f == comb.log2_G - comb.log2_dB

    def test_rejects_foreign_links(self, lat2):
        with pytest.raises(ValueError):
            subset_combinatorics(lat2, 1 << 8)


def test_gf2_rank_small():
    assert gf2_rank([]) == 0
    assert gf2_rank([0b11, 0b01, 0b10]) == 2
    assert gf2_rank([1 << i for i in range(50)]) == 50
    rows = [0b101, 0b011, 0b110]
    assert gf2_rank(rows) == 2
    for r in itertools.permutations(rows):
        assert gf2_rank(r) == 2


def test_region_combinatorics_validation():
    with pytest.raises(ValueError):
        RegionCombinatorics(log2_G=3, log2_dA=0, log2_dB=4)
