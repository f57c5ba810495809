r"""
Combinatorics of separating multi-curves on a genus-g surface with n
punctures: the split families I_m of fixed smaller Euler size m, and the
orbit multiplicities of puncture-pair families.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Iterator, List, Tuple

__all__ = [
    "SplitPair",
    "PantsPairing",
    "enumerate_splits",
    "all_pairings",
    "pairing_multiplicity",
    "split_type_count",
]


@dataclass(frozen=True)
class SplitPair:
    """
    A two-piece boundary split (g1,n1 | g2,n2) of a surface of signature
    (g, n).  The cut size k and the smaller Euler size m are derived,
    never stored, so inconsistent tuples cannot be built.
    """

    g1: int
    n1: int
    g2: int
    n2: int

    @property
    def m(self) -> int:
        return 2 * self.g1 - 2 + self.n1

    def k_for(self, n: int) -> int:
        """Number of cut curves when the ambient surface has n punctures."""
        return (self.n1 + self.n2 - n) // 2

    def validate(self, g: int, n: int) -> int:
        """Check membership in I_m for (g, n); returns k."""
        chi = 2 * g - 2 + n
        m = self.m
        other = 2 * self.g2 - 2 + self.n2
        if min(self.g1, self.g2) < 0 or min(self.n1, self.n2) < 1:
            raise ValueError(f"{self}: pieces need n_i >= 1 and g_i >= 0")
        if m + other != chi:
            raise ValueError(f"{self}: Euler sizes {m}+{other} != {chi}")
        if not (1 <= m <= other):
            raise ValueError(f"{self}: requires 1 <= m <= {other}")
        if not (n - self.n1 <= self.n2 <= n + self.n1):
            raise ValueError(f"{self}: puncture balance violated for n={n}")
        two_k = self.n1 + self.n2 - n
        if two_k <= 0 or two_k % 2:
            raise ValueError(f"{self}: cut size (n1+n2-n)/2 = {two_k}/2 invalid")
        k = two_k // 2
        if self.g1 + self.g2 + k - 1 != g:
            raise ValueError(f"{self}: genus bookkeeping fails for g={g}")
        return k

    def render(self, n: int) -> str:
        """CSV form '(g1,n1|g2,n2|k)' for an ambient surface with n punctures."""
        return f"({self.g1},{self.n1}|{self.g2},{self.n2}|{self.k_for(n)})"


def enumerate_splits(m: int, g: int, n: int) -> List[SplitPair]:
    """
    The split family I_m of (g, n): all (g1,n1,g2,n2) with Euler sizes
    (m, chi-m), m the smaller one, puncture counts balanced, and an
    integral positive number of cut curves.  There are at most m+2
    choices of (g1,n1), so the family has at most 2(m+3)^2 elements.
    """
    chi = 2 * g - 2 + n
    if chi < 2:
        raise ValueError(f"({g},{n}) has chi={chi} < 2: no separating splits")
    if not (1 <= m <= chi // 2):
        raise ValueError(f"m={m} outside [1, {chi // 2}]")
    out: List[SplitPair] = []
    for n1 in range(1, m + 2 + 1):
        if (m + 2 - n1) % 2:
            continue
        g1 = (m + 2 - n1) // 2
        if g1 < 0:
            continue
        for n2 in range(max(1, n - n1), n + n1 + 1):
            g2_twice = chi - m + 2 - n2
            if g2_twice < 0 or g2_twice % 2:
                continue
            g2 = g2_twice // 2
            two_k = n1 + n2 - n
            if two_k <= 0 or two_k % 2:
                continue
            k = two_k // 2
            if g1 + g2 + k - 1 != g:
                continue
            out.append(SplitPair(g1, n1, g2, n2))
    assert len(out) <= 2 * (m + 3) ** 2
    return out


@dataclass(frozen=True)
class PantsPairing:
    """
    An ordered family of k disjoint unordered puncture pairs {i, j} in
    {1, ..., n}; each pair is the puncture set cut off by one curve.
    """

    pairs: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        seen = set()
        normalized = []
        for i, j in self.pairs:
            if i == j or i < 1 or j < 1:
                raise ValueError(f"bad pair ({i},{j})")
            if i in seen or j in seen:
                raise ValueError(f"pair ({i},{j}) reuses a puncture")
            seen.update((i, j))
            normalized.append((min(i, j), max(i, j)))
        object.__setattr__(self, "pairs", tuple(normalized))

    @property
    def k(self) -> int:
        return len(self.pairs)

    def punctures(self) -> set:
        return {p for pair in self.pairs for p in pair}


def all_pairings(n: int, k: int) -> Iterator[PantsPairing]:
    """All ordered k-families of disjoint pairs; pairing_multiplicity(n,k) many."""
    if k < 1 or n < 2 * k:
        raise ValueError(f"need n >= 2k >= 2, got n={n}, k={k}")

    def rec(chosen: List[Tuple[int, int]], used: frozenset):
        if len(chosen) == k:
            yield PantsPairing(tuple(chosen))
            return
        rest = [p for p in range(1, n + 1) if p not in used]
        for a_idx in range(len(rest)):
            for b_idx in range(a_idx + 1, len(rest)):
                i, j = rest[a_idx], rest[b_idx]
                yield from rec(chosen + [(i, j)], used | {i, j})

    yield from rec([], frozenset())


def pairing_multiplicity(n: int, k: int) -> int:
    """
    Number of ordered k-tuples of disjoint unordered puncture pairs
    drawn from n punctures: n! / (2^k (n-2k)!).
    """
    if k < 1 or n < 2 * k:
        raise ValueError(f"need n >= 2k >= 2, got n={n}, k={k}")
    out = 1
    for i in range(2 * k):
        out *= n - i
    return out // (2 ** k)


def split_type_count(n: int, n1: int, k: int) -> int:
    """Puncture assignments for a split piece: binomial(n, n1-k)."""
    if not (0 <= n1 - k <= n):
        raise ValueError(f"n1-k={n1 - k} outside [0, {n}]")
    return comb(n, n1 - k)
