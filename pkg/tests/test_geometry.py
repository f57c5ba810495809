import math
import random

import pytest

from wplab.geometry import (
    CurveData,
    H_to_h_bounds,
    c_to_h_threshold,
    collar_halfwidth,
    curve_H,
    neighbor_curve,
    phi,
    phi_min,
    rayq_bounds,
    regime_constants,
    sphere_h_upper,
)


def test_curve_H() -> None:
    two_pi = 2 * math.pi
    assert curve_H(CurveData(two_pi, two_pi)) == pytest.approx(1.0)
    assert curve_H(CurveData(1.0, two_pi)) == pytest.approx(1 / two_pi)
    h = curve_H(CurveData(30 * math.sqrt(8 * math.pi), 4 * math.pi))
    assert h == pytest.approx(15 * math.sqrt(2 * math.pi) / math.pi, rel=1e-12)
    assert h == pytest.approx(11.96826841204298, rel=1e-9)
    with pytest.raises(ValueError):
        CurveData(0.0, 1.0)


def test_collar_halfwidth() -> None:
    fp = 2 * math.asinh(1.0)
    assert collar_halfwidth(fp) == pytest.approx(math.asinh(1.0), abs=1e-13)
    assert collar_halfwidth(2.0) == pytest.approx(math.asinh(1 / math.sinh(1.0)), rel=1e-12)
    assert collar_halfwidth(50.0) < 1e-10
    prev = collar_halfwidth(0.5)
    for l in (1.0, 2.0, 4.0, 8.0):
        cur = collar_halfwidth(l)
        assert cur < prev
        prev = cur
    with pytest.raises(ValueError):
        collar_halfwidth(0.0)


def test_neighbor_curve() -> None:
    length, offset, ok = neighbor_curve(3.0, 0.0)
    assert (length, offset, ok) == (3.0, 0.0, True)
    length, offset, ok = neighbor_curve(2.0, math.asinh(1.0))
    assert length == pytest.approx(2 * math.sqrt(2.0), rel=1e-12)
    assert offset == pytest.approx(2.0, rel=1e-12)
    _, _, inside = neighbor_curve(2.0, 10.0)
    assert not inside
    with pytest.raises(ValueError):
        neighbor_curve(2.0, -0.1)


def test_cosh_sinh_invariant_random() -> None:
    rng = random.Random(12)
    for _ in range(200):
        l = rng.uniform(0.05, 8.0)
        t = rng.uniform(0.0, 3.0)
        length, offset, _ = neighbor_curve(l, t)
        assert length ** 2 - offset ** 2 == pytest.approx(l * l, rel=1e-12)


def test_H_to_h_bounds() -> None:
    assert H_to_h_bounds(0.0) == (0.0, 0.0)
    assert H_to_h_bounds(1.0) == (0.5, 1.0)
    lo, hi = H_to_h_bounds(math.log(2) / (2 * math.pi))
    assert lo == pytest.approx(math.log(2) / (2 * math.pi + math.log(2)), rel=1e-12)
    assert hi == pytest.approx(math.log(2) / (2 * math.pi), rel=1e-12)
    for H in (0.01, 0.3, 2.0, 50.0):
        lo, hi = H_to_h_bounds(H)
        assert lo < hi


def test_phi_and_phi_min() -> None:
    assert phi(0.7, 0.0) == pytest.approx(0.7)
    assert phi_min(1.0) == pytest.approx(1 / math.sqrt(2.0), rel=1e-14)
    for H in (0.05, 0.11, 0.5, 1.0, 2.0):
        grid = min(phi(H, 1e-4 * i) for i in range(0, 50001))
        assert abs(grid - phi_min(H)) < 1e-6
        assert phi(H, math.asinh(H)) == pytest.approx(phi_min(H), rel=1e-14)
    # dense-grid domination and the sign change of the slope at arcsinh(H)
    H = 0.8
    t_star = math.asinh(H)
    for i in range(0, 5000):
        t = 1e-3 * i
        assert phi(H, t) >= phi_min(H) - 1e-15
    assert phi(H, t_star - 0.05) > phi(H, t_star)
    assert phi(H, t_star + 0.05) > phi(H, t_star)


def test_c_to_h_threshold() -> None:
    assert c_to_h_threshold(0.0) == 0.0
    assert c_to_h_threshold(1.0) == pytest.approx(1 / math.sqrt(2.0), rel=1e-14)
    prev = -1.0
    for i in range(0, 60):
        cur = c_to_h_threshold(0.25 * i)
        assert cur > prev
        assert cur < 1.0
        prev = cur
    # inverse consistency with phi_min on a grid
    for H in (0.05, 0.13, 0.7, 1.5, 3.0):
        assert c_to_h_threshold(H) == pytest.approx(phi_min(H), abs=1e-12)


def test_regime_constants() -> None:
    rc = regime_constants()
    assert rc.cheeger_regime == pytest.approx(0.110318, abs=1e-6)
    assert rc.spectral_gap == pytest.approx(
        0.25 * (math.log(2) / (math.log(2) + 2 * math.pi)) ** 2, rel=1e-12
    )
    assert rc.spectral_gap == pytest.approx(0.0024680, abs=1e-7)
    assert rc.poisson_regime == pytest.approx(
        math.log(2) / math.sqrt(4 * math.pi * (math.log(2) + math.pi)), rel=1e-12
    )
    assert rc.eps_threshold(0.0) == pytest.approx(
        math.log(2) / (2 * math.pi + math.log(2)), rel=1e-12
    )
    assert len(rc.cheeger_regime_str.replace(".", "").lstrip("0")) >= 28
    assert float(rc.poisson_regime_str) == pytest.approx(rc.poisson_regime, rel=1e-12)


def test_sphere_h_upper() -> None:
    assert sphere_h_upper(4) == pytest.approx(30 * math.sqrt(4 * math.pi) / (2 * math.pi), rel=1e-12)
    assert sphere_h_upper(6) == pytest.approx(15 * math.sqrt(2 * math.pi) / math.pi, rel=1e-12)
    for n in (100, 200, 400, 1000):
        ratio = sphere_h_upper(4 * n) / sphere_h_upper(n)
        assert abs(ratio - 0.5) < 0.02
    with pytest.raises(ValueError):
        sphere_h_upper(3)


def test_rayq_bounds() -> None:
    assert rayq_bounds(0.0) == (0.0, 0.0)
    assert rayq_bounds(1.0) == (0.25, 1.0)
    lower, mult = rayq_bounds(0.2)
    assert lower == pytest.approx(0.01)
    assert mult == pytest.approx(0.2)
