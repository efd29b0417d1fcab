"""
Torus geometry and GF(2) combinatorics of the star group.

Links of the k x k torus are labelled ``h(x, y)`` (joining vertex (x, y) to
(x+1, y)) and ``v(x, y)`` (joining (x, y) to (x, y+1)), coordinates mod k.
Link index is ``2 * (y * k + x)`` for the horizontal link and one more for
the vertical link, so a set of links is a Python ``int`` bitmask.

The star group G is generated by all stars but the last vertex; the product
of every star is the identity, so ``|G| = 2**(k*k - 1)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple

from .errors import BlockTooLarge


class Link(NamedTuple):
    kind: str  # "h" or "v"
    x: int
    y: int

    def __str__(self) -> str:
        return f"{self.kind}:{self.x},{self.y}"

    @classmethod
    def parse(cls, text: str) -> "Link":
        """Parse ``"h:x,y"`` / ``"v:x,y"``."""
        kind, _, coords = text.strip().partition(":")
        if kind not in ("h", "v") or not coords:
            raise ValueError(f"malformed link identifier {text!r}")
        x, y = (int(c) for c in coords.split(","))
        return cls(kind, x, y)


@dataclass(frozen=True)
class TorusLattice:
    """Square k x k lattice on a torus with qubits on the links."""

    k: int

    def __post_init__(self):
        if self.k < 2:
            raise ValueError(f"torus needs k >= 2, got {self.k}")

    @property
    def n_links(self) -> int:
        return 2 * self.k * self.k

    @property
    def n_stars(self) -> int:
        return self.k * self.k

    @cached_property
    def links(self) -> tuple[Link, ...]:
        k = self.k
        out = []
        for y in range(k):
            for x in range(k):
                out.append(Link("h", x, y))
                out.append(Link("v", x, y))
        return tuple(out)

    @cached_property
    def stars(self) -> tuple[tuple[int, int], ...]:
        return tuple((x, y) for y in range(self.k) for x in range(self.k))

    def link_index(self, link: Link) -> int:
        k = self.k
        if link.kind not in ("h", "v"):
            raise ValueError(f"unknown link kind {link.kind!r}")
        x, y = link.x % k, link.y % k
        return 2 * (y * k + x) + (0 if link.kind == "h" else 1)

    def star_links(self, x: int, y: int) -> tuple[Link, ...]:
        """The four links meeting at vertex (x, y)."""
        k = self.k
        x, y = x % k, y % k
        return (
            Link("h", x, y),
            Link("h", (x - 1) % k, y),
            Link("v", x, y),
            Link("v", x, (y - 1) % k),
        )

    def plaquette_links(self, x: int, y: int) -> tuple[Link, ...]:
        """The four links bounding the face whose lower-left corner is (x, y)."""
        k = self.k
        x, y = x % k, y % k
        return (
            Link("h", x, y),
            Link("h", x, (y + 1) % k),
            Link("v", x, y),
            Link("v", (x + 1) % k, y),
        )

    def mask(self, links: Iterable[Link]) -> int:
        m = 0
        for link in links:
            m |= 1 << self.link_index(link)
        return m

    def links_of_mask(self, mask: int) -> list[Link]:
        return [lk for i, lk in enumerate(self.links) if mask >> i & 1]

    @cached_property
    def star_masks(self) -> tuple[int, ...]:
        return tuple(self.mask(self.star_links(x, y)) for x, y in self.stars)

    @cached_property
    def plaquette_masks(self) -> tuple[int, ...]:
        return tuple(self.mask(self.plaquette_links(x, y)) for x, y in self.stars)

    @property
    def full_mask(self) -> int:
        return (1 << self.n_links) - 1


@dataclass(frozen=True)
class BlockRegion:
    k: int
    L: int
    link_set: frozenset[Link]


@dataclass(frozen=True)
class SigmaCounts:
    sigma_A: int
    sigma_B: int
    sigma_AB: int

    @property
    def n_stars(self) -> int:
        return self.sigma_A + self.sigma_B + self.sigma_AB


@dataclass(frozen=True)
class RegionCombinatorics:
    """Base-2 exponents of |G|, d_A = |G_A|, d_B = |G_B| and f = |G| / d_B."""

    log2_G: int
    log2_dA: int
    log2_dB: int

    def __post_init__(self):
        if min(self.log2_G, self.log2_dA, self.log2_dB) < 0 or self.log2_dB > self.log2_G:
            raise ValueError(f"inconsistent exponents {self}")

    @property
    def log2_f(self) -> int:
        return self.log2_G - self.log2_dB

    @classmethod
    def from_sigma(cls, sigma: SigmaCounts) -> "RegionCombinatorics":
        return cls(log2_G=sigma.n_stars - 1, log2_dA=sigma.sigma_A, log2_dB=sigma.sigma_B)


def check_block(k: int, L: int) -> None:
    if k < 1 or L < 1:
        raise BlockTooLarge(f"k and L must be positive, got k={k}, L={L}")
    if k < L + 2 or k * k - L * L - 4 * L < 0:
        raise BlockTooLarge(f"block L={L} does not fit a k={k} torus (need k >= L + 2)")


def block_sigma(k: int, L: int) -> SigmaCounts:
    check_block(k, L)
    return SigmaCounts(L * L, k * k - L * L - 4 * L, 4 * L)


def enumerate_block_links(k: int, L: int) -> BlockRegion:
    """All links touching at least one vertex of the block {0..L-1}^2."""
    check_block(k, L)
    lat = TorusLattice(k)
    links = set()
    for y in range(L):
        for x in range(L):
            links.update(lat.star_links(x, y))
    return BlockRegion(k, L, frozenset(links))


def classify_stars(lattice: TorusLattice, subset_mask: int) -> SigmaCounts:
    """Count stars lying wholly in A, wholly in B, or straddling both."""
    a = b = ab = 0
    for m in lattice.star_masks:
        inside = m & subset_mask
        if inside == m:
            a += 1
        elif inside == 0:
            b += 1
        else:
            ab += 1
    return SigmaCounts(a, b, ab)


def gf2_rank(rows: Iterable[int]) -> int:
    """Rank over GF(2) of bitmask row vectors."""
    pivots: dict[int, int] = {}
    rank = 0
    for r in rows:
        while r:
            top = r.bit_length() - 1
            p = pivots.get(top)
            if p is None:
                pivots[top] = r
                rank += 1
                break
            r ^= p
    return rank


def subset_combinatorics(lattice: TorusLattice, subset: Iterable[Link] | int) -> RegionCombinatorics:
    """
    Group exponents for an arbitrary link subset A.

    ``log2 d_A`` is the dimension of the null space of the generator matrix
    restricted to B (products acting trivially outside A); likewise for d_B.
    """
    a_mask = subset if isinstance(subset, int) else lattice.mask(subset)
    if a_mask & ~lattice.full_mask:
        raise ValueError("subset contains links outside the lattice")
    b_mask = lattice.full_mask & ~a_mask
    gens = lattice.star_masks[:-1]
    n_gen = len(gens)
    if gf2_rank(gens) != n_gen:  # pragma: no cover - torus geometry guarantees this
        raise AssertionError("star generators are not independent")
    log2_dA = n_gen - gf2_rank(g & b_mask for g in gens)
    log2_dB = n_gen - gf2_rank(g & a_mask for g in gens)
    return RegionCombinatorics(log2_G=n_gen, log2_dA=log2_dA, log2_dB=log2_dB)


def block_combinatorics(k: int, L: int) -> RegionCombinatorics:
    return RegionCombinatorics.from_sigma(block_sigma(k, L))
