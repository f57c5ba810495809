r"""
Exact arithmetic in the ring of finite sums sum_k q_k pi^k (q_k rational,
k in Z), plus the Bernoulli / zeta(2i) machinery behind the recursion
coefficients and certified numeric evaluation of exact values.

Two rational backends are supported and selected by the environment
variable ``WPLAB_RAT``:

* ``gmpy2``    -- gmpy2.mpq, C-speed big rationals (default when installed)
* ``fraction`` -- pure-Python fractions.Fraction fallback

Both are arbitrary precision and always reduced to lowest terms with a
positive denominator, which is all the code relies on.
"""

from __future__ import annotations

import os
import re
import threading
from math import comb
from typing import Dict, List, Union

from mpmath import iv, mp

__all__ = [
    "Rat",
    "RAT_BACKEND",
    "rat",
    "PiScalar",
    "PiPoly",
    "NumInterval",
    "ComparisonError",
    "eval_numeric",
    "sign",
    "compare",
    "bernoulli",
    "zeta_even",
    "coeff_a",
    "coeff_b",
    "factorial",
]

_env = os.environ.get("WPLAB_RAT", "auto").lower()
if _env not in ("auto", "gmpy2", "fraction"):
    raise ValueError(f"WPLAB_RAT must be 'gmpy2' or 'fraction', got {_env!r}")

if _env in ("auto", "gmpy2"):
    try:
        from gmpy2 import mpq as Rat

        RAT_BACKEND = "gmpy2"
    except ImportError:
        if _env == "gmpy2":
            raise
        from fractions import Fraction as Rat

        RAT_BACKEND = "fraction"
else:
    from fractions import Fraction as Rat

    RAT_BACKEND = "fraction"

RatLike = Union[int, "Rat"]


def rat(num: int, den: int = 1) -> Rat:
    """Reduced rational num/den with positive denominator."""
    if den == 0:
        raise ZeroDivisionError("rational with zero denominator")
    return Rat(num, den)


_fact_cache: List[int] = [1]


def factorial(n: int) -> int:
    """n! with a grow-on-demand cache (n >= 0)."""
    if n < 0:
        raise ValueError("factorial of negative integer")
    while len(_fact_cache) <= n:
        _fact_cache.append(_fact_cache[-1] * len(_fact_cache))
    return _fact_cache[n]


# ---------------------------------------------------------------------------
# Bernoulli numbers and the recursion coefficients
# ---------------------------------------------------------------------------

_bern_lock = threading.Lock()
_bern: List[Rat] = [Rat(1)]


def bernoulli(m: int) -> Rat:
    """
    m-th Bernoulli number, convention B_1 = -1/2, via the recurrence
    sum_{j=0}^{m} C(m+1, j) B_j = 0.
    """
    if m < 0:
        raise ValueError("bernoulli index must be >= 0")
    if m >= len(_bern):
        with _bern_lock:
            while len(_bern) <= m:
                k = len(_bern)
                s = Rat(0)
                for j in range(k):
                    s += comb(k + 1, j) * _bern[j]
                _bern.append(-s / (k + 1))
    return _bern[m]


def _zeta_even_rat(i: int) -> Rat:
    # zeta(2i) = (-1)^(i+1) B_{2i} (2 pi)^(2i) / (2 (2i)!); rational part only
    s = 1 if i % 2 == 1 else -1
    return s * bernoulli(2 * i) * Rat(2 ** (2 * i), 2 * factorial(2 * i))


def zeta_even(i: int) -> "PiScalar":
    """zeta(2i) as an exact rational multiple of pi^(2i), i >= 1."""
    if i < 1:
        raise ValueError("zeta_even requires i >= 1 (i = 0 is a pole)")
    return PiScalar(_zeta_even_rat(i), 2 * i)


_ahat_lock = threading.Lock()
_ahat: List[Rat] = [Rat(1, 2)]


def _coeff_a_rat(i: int) -> Rat:
    """Rational part of a_i (a_i = _coeff_a_rat(i) * pi^(2i); a_0 = 1/2)."""
    if i >= len(_ahat):
        with _ahat_lock:
            while len(_ahat) <= i:
                k = len(_ahat)
                _ahat.append(_zeta_even_rat(k) * (1 - Rat(1, 2 ** (2 * k - 1))))
    return _ahat[i]


def coeff_a(i: int) -> "PiScalar":
    """Recursion coefficient: a_0 = 1/2, a_i = zeta(2i)(1 - 2^(1-2i))."""
    if i < 0:
        raise ValueError("coeff_a index must be >= 0")
    return PiScalar(_coeff_a_rat(i), 0 if i == 0 else 2 * i)


def _coeff_b_rat(m: int) -> Rat:
    return Rat(m, factorial(2 * m + 1))


def coeff_b(m: int) -> "PiScalar":
    """Alternating-sum coefficient b_m = m pi^(2m-2) / (2m+1)!, m >= 1."""
    if m < 1:
        raise ValueError("coeff_b requires m >= 1")
    return PiScalar(_coeff_b_rat(m), 2 * m - 2)


# ---------------------------------------------------------------------------
# PiScalar: a single rational multiple of an integer power of pi
# ---------------------------------------------------------------------------

_SCALAR_RE = re.compile(r"^(-?\d+)/(\d+)\*pi\^(-?\d+)$")


class PiScalar:
    """
    coeff * pi^pideg with coeff rational and pideg in Z (negative allowed).
    Canonical zero has pideg 0.  Values are immutable.
    """

    __slots__ = ("coeff", "pideg")

    def __init__(self, coeff: RatLike, pideg: int = 0):
        c = Rat(coeff) if not isinstance(coeff, Rat) else coeff
        if c == 0:
            pideg = 0
        object.__setattr__(self, "coeff", c)
        object.__setattr__(self, "pideg", int(pideg))

    def __setattr__(self, name, value):
        raise AttributeError("PiScalar is immutable")

    @staticmethod
    def zero() -> "PiScalar":
        return PiScalar(0, 0)

    @staticmethod
    def one() -> "PiScalar":
        return PiScalar(1, 0)

    def is_zero(self) -> bool:
        return self.coeff == 0

    def is_rational(self) -> bool:
        return self.pideg == 0

    def __bool__(self) -> bool:
        return self.coeff != 0

    def __eq__(self, other) -> bool:
        if isinstance(other, PiScalar):
            return self.coeff == other.coeff and self.pideg == other.pideg
        if isinstance(other, (int, Rat)):
            return self.pideg == 0 and self.coeff == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash((str(self.coeff), self.pideg))

    def __neg__(self) -> "PiScalar":
        return PiScalar(-self.coeff, self.pideg)

    def __add__(self, other) -> "PiScalar":
        other = _as_scalar(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.pideg != other.pideg:
            raise ValueError(
                f"adding pi-degrees {self.pideg} and {other.pideg}; use PiPoly"
            )
        return PiScalar(self.coeff + other.coeff, self.pideg)

    __radd__ = __add__

    def __sub__(self, other) -> "PiScalar":
        return self + (-_as_scalar(other))

    def __rsub__(self, other) -> "PiScalar":
        return _as_scalar(other) + (-self)

    def __mul__(self, other) -> "PiScalar":
        other = _as_scalar(other)
        if other is NotImplemented:
            return NotImplemented
        return PiScalar(self.coeff * other.coeff, self.pideg + other.pideg)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "PiScalar":
        other = _as_scalar(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("division by zero PiScalar")
        return PiScalar(self.coeff / other.coeff, self.pideg - other.pideg)

    def __rtruediv__(self, other) -> "PiScalar":
        return _as_scalar(other) / self

    def __pow__(self, k: int) -> "PiScalar":
        if not isinstance(k, int):
            raise TypeError("PiScalar power must be an integer")
        if k < 0:
            if self.is_zero():
                raise ZeroDivisionError("0 ** negative")
            return PiScalar(1 / (self.coeff ** (-k)), self.pideg * k)
        return PiScalar(self.coeff ** k, self.pideg * k)

    def to_poly(self) -> "PiPoly":
        if self.is_zero():
            return PiPoly({})
        return PiPoly({self.pideg: self.coeff})

    def render(self) -> str:
        """Bit-exact interchange format, e.g. '7/720*pi^4'."""
        return f"{self.coeff.numerator}/{self.coeff.denominator}*pi^{self.pideg}"

    @staticmethod
    def parse(text: str) -> "PiScalar":
        m = _SCALAR_RE.match(text.strip())
        if not m:
            raise ValueError(f"malformed PiScalar {text!r}")
        num, den, k = m.groups()
        return PiScalar(rat(int(num), int(den)), int(k))

    def __repr__(self) -> str:
        return f"PiScalar({self.render()})"

    def __float__(self) -> float:
        return float(eval_numeric(self, 30).mid())


def _as_scalar(x) -> "PiScalar":
    if isinstance(x, PiScalar):
        return x
    if isinstance(x, (int, Rat)):
        return PiScalar(x, 0)
    return NotImplemented


# ---------------------------------------------------------------------------
# PiPoly: finite sums over distinct pi-degrees
# ---------------------------------------------------------------------------


class PiPoly:
    """
    Finite sum sum_k q_k pi^k as a pideg -> coefficient table; zero
    coefficients are never stored.  Ring operations close over the type.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Dict[int, RatLike] | None = None):
        tbl: Dict[int, Rat] = {}
        if terms:
            for k, v in terms.items():
                q = Rat(v) if not isinstance(v, Rat) else v
                if q != 0:
                    tbl[int(k)] = q
        object.__setattr__(self, "terms", tbl)

    def __setattr__(self, name, value):
        raise AttributeError("PiPoly is immutable")

    @staticmethod
    def zero() -> "PiPoly":
        return PiPoly({})

    @staticmethod
    def from_scalar(s: PiScalar) -> "PiPoly":
        return s.to_poly()

    @staticmethod
    def constant(q: RatLike) -> "PiPoly":
        return PiPoly({0: q})

    @staticmethod
    def pi_power(k: int, coeff: RatLike = 1) -> "PiPoly":
        return PiPoly({k: coeff})

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(tuple(sorted((k, str(v)) for k, v in self.terms.items())))

    def __neg__(self) -> "PiPoly":
        return PiPoly({k: -v for k, v in self.terms.items()})

    def __add__(self, other) -> "PiPoly":
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self.terms)
        for k, v in other.terms.items():
            s = out.get(k, 0) + v
            if s == 0:
                out.pop(k, None)
            else:
                out[k] = s
        return PiPoly(out)

    __radd__ = __add__

    def __sub__(self, other) -> "PiPoly":
        return self + (-_as_poly(other))

    def __rsub__(self, other) -> "PiPoly":
        return _as_poly(other) + (-self)

    def __mul__(self, other) -> "PiPoly":
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        out: Dict[int, Rat] = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                k = k1 + k2
                s = out.get(k, 0) + v1 * v2
                if s == 0:
                    out.pop(k, None)
                else:
                    out[k] = s
        return PiPoly(out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "PiPoly":
        if not isinstance(e, int) or e < 0:
            raise TypeError("PiPoly power must be a non-negative integer")
        out = PiPoly.constant(1)
        base = self
        while e:
            if e & 1:
                out = out * base
            e >>= 1
            if e:
                base = base * base
        return out

    def as_scalar(self) -> PiScalar:
        """Convert to PiScalar; requires at most one stored term."""
        if not self.terms:
            return PiScalar.zero()
        if len(self.terms) > 1:
            raise ValueError("PiPoly with several pi-degrees is not a PiScalar")
        ((k, v),) = self.terms.items()
        return PiScalar(v, k)

    def render(self) -> str:
        if not self.terms:
            return "0/1*pi^0"
        parts = []
        for k in sorted(self.terms, reverse=True):
            v = self.terms[k]
            parts.append(f"{v.numerator}/{v.denominator}*pi^{k}")
        return "+".join(parts)

    @staticmethod
    def parse(text: str) -> "PiPoly":
        out: Dict[int, Rat] = {}
        for piece in text.strip().split("+"):
            s = PiScalar.parse(piece)
            if s.is_zero():
                continue
            if s.pideg in out:
                raise ValueError(f"duplicate pi-degree {s.pideg} in {text!r}")
            out[s.pideg] = s.coeff
        return PiPoly(out)

    def __repr__(self) -> str:
        return f"PiPoly({self.render()})"

    def __float__(self) -> float:
        return float(eval_numeric(self, 30).mid())


def _as_poly(x) -> "PiPoly":
    if isinstance(x, PiPoly):
        return x
    if isinstance(x, PiScalar):
        return x.to_poly()
    if isinstance(x, (int, Rat)):
        return PiPoly({0: x})
    return NotImplemented


# ---------------------------------------------------------------------------
# Certified numeric evaluation
# ---------------------------------------------------------------------------


class NumInterval:
    """Closed interval [lo, hi] guaranteed to contain the exact real value."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi):
        if lo > hi:
            raise ValueError(f"invalid interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def __setattr__(self, name, value):
        raise AttributeError("NumInterval is immutable")

    def width(self):
        return self.hi - self.lo

    def mid(self):
        return (self.lo + self.hi) / 2

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi

    def strictly_positive(self) -> bool:
        return self.lo > 0

    def strictly_negative(self) -> bool:
        return self.hi < 0

    def __float__(self) -> float:
        return float(self.mid())

    def __repr__(self) -> str:
        return f"NumInterval({self.lo!r}, {self.hi!r})"


_iv_lock = threading.Lock()


def eval_numeric(x, precision_digits: int = 30) -> NumInterval:
    """
    Certified enclosure of an exact value (PiScalar, PiPoly, Rat or int).
    All interval operations round outward, so the true real value is
    always contained; width shrinks as precision grows.
    """
    if precision_digits < 1:
        raise ValueError("precision_digits must be >= 1")
    poly = _as_poly(x)
    if poly is NotImplemented:
        raise TypeError(f"cannot evaluate {type(x).__name__}")
    # mpmath interval context is global state; serialize access
    with _iv_lock:
        old_iv, old_mp = iv.dps, mp.dps
        try:
            iv.dps = precision_digits + 10
            mp.dps = precision_digits + 10
            if poly.is_zero():
                z = mp.mpf(0)
                return NumInterval(z, z)
            total = iv.mpf(0)
            pi = iv.pi
            for k, q in poly.terms.items():
                t = iv.mpf(int(q.numerator)) / iv.mpf(int(q.denominator))
                if k:
                    t = t * pi ** k
                total = total + t
            return NumInterval(mp.convert(total.a), mp.convert(total.b))
        finally:
            iv.dps, mp.dps = old_iv, old_mp


class ComparisonError(ArithmeticError):
    """Adaptive-precision separation failed below the hard cap."""


_COMPARE_START = 50
_COMPARE_CAP = 3200


def sign(x) -> int:
    """
    Sign of an exact value: symbolic when the representation is zero,
    otherwise by interval separation at 50 digits doubling up to 3200.
    A nonzero coefficient table never evaluates to 0 (pi transcendental),
    so failure to separate indicates an accidental-equality bug upstream.
    """
    poly = _as_poly(x)
    if poly is NotImplemented:
        raise TypeError(f"cannot compare {type(x).__name__}")
    if poly.is_zero():
        return 0
    digits = _COMPARE_START
    while digits <= _COMPARE_CAP:
        box = eval_numeric(poly, digits)
        if box.strictly_positive():
            return 1
        if box.strictly_negative():
            return -1
        digits *= 2
    raise ComparisonError(
        f"could not separate {poly.render()} from 0 within {_COMPARE_CAP} digits"
    )


def compare(x, y) -> int:
    """-1, 0 or 1; exact equality is decided symbolically."""
    return sign(_as_poly(x) - _as_poly(y))
