r"""
Volume polynomials of moduli spaces assembled from the bracket engine,
exact volume values, and the volume-ratio diagnostics used by the lab.

A volume polynomial is stored as a symmetric coefficient table: the
multiset d = (d_1 >= d_2 >= ...) keys the coefficient of the monomial
orbit prod x_i^(2 d_i), and that coefficient equals

    [prod tau_{d_i}]_{g,n} / (2^(2|d|) * prod (2 d_i + 1)!)

in the undoubled boundary variables.  The constant term is V_{g,n}.
"""

from __future__ import annotations

from typing import Dict, Iterator, List, Sequence, Tuple

from .exact import PiPoly, PiScalar, Rat, _coeff_b_rat, eval_numeric, factorial
from .brackets import (
    BracketCache,
    _decode_counts,
    _encode_counts,
    bracket_rat,
    c_m,
    default_cache,
    stable,
)
from .topology import SplitPair

__all__ = [
    "VolumePolynomial",
    "volume",
    "volume_rat",
    "volume_poly",
    "volume_at",
    "mz_ratio",
    "ratio_R",
    "identity_check",
    "cor1_bound_check",
    "lratio_check",
    "partitions_upto",
    "poly_dump",
    "poly_load",
]

VOL_VERSION = "wpvol v1"


def partitions_upto(max_sum: int, max_parts: int) -> Iterator[Tuple[int, ...]]:
    """Non-increasing positive tuples with sum <= max_sum, length <= max_parts."""
    yield ()

    def rec(prefix: List[int], cap: int, rem: int, slots: int):
        if slots == 0:
            return
        for v in range(1, min(cap, rem) + 1):
            prefix.append(v)
            yield tuple(prefix)
            yield from rec(prefix, v, rem - v, slots - 1)
            prefix.pop()

    yield from rec([], max_sum, max_sum, max_parts)


def _require_stable(g: int, n: int) -> None:
    if g < 0 or n < 0 or not stable(g, n):
        raise ValueError(f"unstable signature ({g},{n})")


def volume_rat(g: int, n: int, cache: BracketCache | None = None) -> Rat:
    """Rational part of V_{g,n} (pi-power 2*(3g-3+n))."""
    _require_stable(g, n)
    return bracket_rat(g, [0] * n, cache)


def volume(g: int, n: int, cache: BracketCache | None = None) -> PiScalar:
    """Exact Weil-Petersson volume V_{g,n} = [tau_0^n]_{g,n}."""
    _require_stable(g, n)
    return PiScalar(volume_rat(g, n, cache), 2 * (3 * g - 3 + n))


class VolumePolynomial:
    """Even symmetric polynomial V_{g,n}(x_1,...,x_n) as a coefficient table."""

    __slots__ = ("g", "n", "coeffs")

    def __init__(self, g: int, n: int, coeffs: Dict[Tuple[int, ...], PiScalar]):
        self.g = g
        self.n = n
        self.coeffs = coeffs

    def coefficient(self, d: Sequence[int]) -> PiScalar:
        """Coefficient of the monomial orbit of prod x_i^(2 d_i)."""
        key = tuple(sorted((x for x in d if x), reverse=True))
        return self.coeffs.get(key, PiScalar.zero())

    def constant(self) -> PiScalar:
        return self.coeffs[()]

    def restricted(self, k: int) -> Dict[Tuple[int, ...], PiScalar]:
        """Coefficients surviving when all but the first k variables are 0."""
        return {e: c for e, c in self.coeffs.items() if len(e) <= k}

    def at(self, lengths: Sequence) -> PiPoly:
        """Exact evaluation at a list of n exact values (PiPoly-convertible)."""
        if len(lengths) != self.n:
            raise ValueError(f"expected {self.n} lengths, got {len(lengths)}")
        xs = [_to_poly(x) for x in lengths]
        total = PiPoly.zero()
        for part, coeff in self.coeffs.items():
            total = total + coeff.to_poly() * _monomial_symmetric(part, xs)
        return total

    def __repr__(self):
        return f"VolumePolynomial(g={self.g}, n={self.n}, terms={len(self.coeffs)})"


def _to_poly(x) -> PiPoly:
    if isinstance(x, PiPoly):
        return x
    if isinstance(x, PiScalar):
        return x.to_poly()
    return PiPoly.constant(Rat(x))


def _monomial_symmetric(part: Tuple[int, ...], xs: List[PiPoly]) -> PiPoly:
    """
    Sum over distinct assignments of the parts to distinct variables of
    prod x^(2*part).  Dynamic program over variables with a remaining-
    count state per distinct part value; unassigned variables carry
    exponent zero.
    """
    if not part:
        return PiPoly.constant(1)
    values: List[int] = []
    counts: List[int] = []
    for v in part:
        if values and values[-1] == v:
            counts[-1] += 1
        else:
            values.append(v)
            counts.append(1)
    start = tuple(counts)
    dp: Dict[Tuple[int, ...], PiPoly] = {start: PiPoly.constant(1)}
    for x in xs:
        powers = {v: x ** (2 * v) for v in values}
        nxt: Dict[Tuple[int, ...], PiPoly] = {}
        for state, acc in dp.items():
            prev = nxt.get(state)
            nxt[state] = acc if prev is None else prev + acc
            for j, r in enumerate(state):
                if r:
                    new_state = state[:j] + (r - 1,) + state[j + 1 :]
                    term = acc * powers[values[j]]
                    prev = nxt.get(new_state)
                    nxt[new_state] = term if prev is None else prev + term
        dp = nxt
    done = tuple(0 for _ in values)
    return dp.get(done, PiPoly.zero())


def volume_poly(g: int, n: int, cache: BracketCache | None = None) -> VolumePolynomial:
    """Complete coefficient table of V_{g,n} over all |d| <= 3g-3+n."""
    _require_stable(g, n)
    cache = default_cache() if cache is None else cache
    budget = 3 * g - 3 + n
    coeffs: Dict[Tuple[int, ...], PiScalar] = {}
    for part in partitions_upto(budget, n):
        s = sum(part)
        q = bracket_rat(g, list(part) + [0] * (n - len(part)), cache)
        if q == 0:
            continue
        den = 4 ** s
        for v in part:
            den *= factorial(2 * v + 1)
        coeffs[part] = PiScalar(q / Rat(den), 2 * (budget - s))
    return VolumePolynomial(g, n, coeffs)


def volume_at(
    g: int, n: int, lengths: Sequence, cache: BracketCache | None = None
) -> PiPoly:
    """Exact V_{g,n}(x_1,...,x_n) at exact boundary lengths."""
    return volume_poly(g, n, cache).at(lengths)


def mz_ratio(g: int, n: int, cache: BracketCache | None = None) -> PiScalar:
    """(2g-2+n) V_{g,n} / V_{g,n+1}; exact, pi-degree -2."""
    _require_stable(g, n)
    _require_stable(g, n + 1)
    q = (2 * g - 2 + n) * volume_rat(g, n, cache) / volume_rat(g, n + 1, cache)
    return PiScalar(q, -2)


def ratio_R(g: int, n: int, cache: BracketCache | None = None) -> Rat:
    """V_{g,n}^2 / (V_{g,n-1} V_{g,n+1}); the pi-degrees cancel exactly."""
    if n < 1:
        raise ValueError("ratio_R needs n >= 1 (V_{g,n-1} must exist)")
    _require_stable(g, n - 1)
    _require_stable(g, n)
    _require_stable(g, n + 1)
    num = volume_rat(g, n, cache) ** 2
    return num / (volume_rat(g, n - 1, cache) * volume_rat(g, n + 1, cache))


def identity_check(
    g: int, n: int, cache: BracketCache | None = None
) -> Tuple[bool, PiScalar]:
    """
    Exact check of (2g-2+n) V_{g,n} / V_{g,n+1} against the alternating
    sum (1/2) sum_{m=1}^{3g-2+n} (-1)^(m-1) b_m c_m(g,n).  Returns
    (equal, residual); the residual is the exact difference.
    """
    _require_stable(g, n)
    _require_stable(g, n + 1)
    lhs = mz_ratio(g, n, cache)
    rhs = Rat(0)
    for m in range(1, 3 * g - 2 + n + 1):
        # b_m c_m has pi-degree (2m-2) + (-2m) = -2 for every m
        rhs += (-1) ** (m - 1) * _coeff_b_rat(m) * c_m(g, n, m, cache).coeff
    rhs /= 2
    residual = lhs - PiScalar(rhs, -2)
    return residual.is_zero(), residual


def cor1_bound_check(
    g: int, n: int, digits: int = 30, cache: BracketCache | None = None
) -> float:
    """
    eval(V_{g,n}) divided by (2g-3+n)! (4 pi^2)^(2g-3+n) / sqrt(2g-2+n).
    Finite and positive on every stable signature.
    """
    _require_stable(g, n)
    chi = 2 * g - 2 + n
    box = eval_numeric(volume(g, n, cache), digits)
    import mpmath

    with mpmath.workdps(digits):
        denom = mpmath.mpf(factorial(2 * g - 3 + n)) * (4 * mpmath.pi ** 2) ** (
            2 * g - 3 + n
        )
        return float(box.mid() * mpmath.sqrt(chi) / denom)


def lratio_check(
    m: int,
    split: SplitPair,
    g: int,
    n: int,
    digits: int = 30,
    cache: BracketCache | None = None,
) -> Tuple[float, float]:
    """
    Pair (eval(V_{g1,n1} V_{g2,n2} / V_{g,n}),
          m^m (chi-m)^(chi-m) / chi^chi) for a split in I_m of (g,n).
    """
    split.validate(g, n)
    if split.m != m:
        raise ValueError(f"split has m={split.m}, expected {m}")
    chi = 2 * g - 2 + n
    num = volume_rat(split.g1, split.n1, cache) * volume_rat(split.g2, split.n2, cache)
    den = volume_rat(g, n, cache)
    # pi-degree of the ratio: 2*(3g1-3+n1 + 3g2-3+n2 - (3g-3+n)) = 2*(k-3)
    pideg = 2 * (
        (3 * split.g1 - 3 + split.n1)
        + (3 * split.g2 - 3 + split.n2)
        - (3 * g - 3 + n)
    )
    lhs = float(eval_numeric(PiScalar(num / den, pideg), digits).mid())
    rhs = float(
        Rat(m ** m * (chi - m) ** (chi - m), chi ** chi)
    )
    return lhs, rhs


# ---------------------------------------------------------------------------
# Coefficient-table dump format
# ---------------------------------------------------------------------------


def poly_dump(poly: VolumePolynomial, path) -> int:
    """One line per coefficient, canonical order; returns line count."""
    keys = sorted(poly.coeffs)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(VOL_VERSION + "\n")
        for part in keys:
            full = (poly.g, poly.n, part)
            fh.write(
                f"{poly.g}|{poly.n}|{_encode_counts(full)}|{poly.coeffs[part].render()}\n"
            )
    return len(keys)


def poly_load(path) -> VolumePolynomial:
    coeffs: Dict[Tuple[int, ...], PiScalar] = {}
    g = n = None
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if header != VOL_VERSION:
            raise ValueError(f"volume table version mismatch: {header!r}")
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            try:
                g_s, n_s, counts_s, value_s = line.split("|")
                g_i, n_i = int(g_s), int(n_s)
                total, part = _decode_counts(counts_s)
                if total != n_i:
                    raise ValueError(f"multiset carries {total} entries, n={n_i}")
                value = PiScalar.parse(value_s)
            except ValueError as exc:
                raise ValueError(f"{path}: line {lineno}: {exc}") from None
            if g is None:
                g, n = g_i, n_i
            elif (g, n) != (g_i, n_i):
                raise ValueError(f"{path}: line {lineno}: mixed signatures")
            coeffs[part] = value
    if g is None:
        raise ValueError(f"{path}: empty volume table")
    return VolumePolynomial(g, n, coeffs)
