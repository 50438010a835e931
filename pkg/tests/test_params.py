import numpy as np
import pytest
from hypothesis import given, strategies as st

from collapsesim.params import (HBAR, K_B, M0, CollapseParams, InvalidScaleError, ParticleSpec, UnitScale,
                                canonical_points, from_dimensionless, to_dimensionless)

positive = st.floats(min_value=1e-30, max_value=1e30, allow_nan=False, allow_infinity=False)


@pytest.mark.parametrize("lam, r_c", [(0.0, 1e-7), (-1.0, 1e-7), (1e-16, 0.0), (1e-16, -1e-7)])
def test_params_reject_non_positive(lam, r_c):
    with pytest.raises(ValueError):
        CollapseParams(lam, r_c)


def test_particle_spec_rejects_non_positive():
    with pytest.raises(ValueError):
        ParticleSpec(0.0)
    with pytest.raises(ValueError):
        ParticleSpec(1.0, m0=-1.0)
    assert ParticleSpec(2 * M0).mass_ratio == pytest.approx(2.0)


def test_constants_codata():
    assert HBAR == pytest.approx(1.054571817e-34, rel=1e-12)
    assert K_B == pytest.approx(1.380649e-23, rel=1e-12)
    assert M0 == pytest.approx(1.66053906660e-27, rel=1e-10)


def test_scale_with_length_unit_rc_gives_unit_rc():
    p = CollapseParams(1e-16, 1e-7)
    assert to_dimensionless(p, UnitScale(length_unit=1e-7)).r_c == pytest.approx(1.0, rel=1e-15)


def test_grw_point_unchanged_by_si_scale():
    grw = canonical_points().grw
    assert to_dimensionless(grw, UnitScale()) == CollapseParams(1e-16, 1e-7)
    assert from_dimensionless(grw, UnitScale()) == grw


def test_doubling_length_unit_halves_rc():
    p = CollapseParams(1.0, 3e-7)
    a = to_dimensionless(p, UnitScale(length_unit=1e-7)).r_c
    b = to_dimensionless(p, UnitScale(length_unit=2e-7)).r_c
    assert b == pytest.approx(a / 2, rel=1e-15)


@given(positive, positive, positive, positive, positive)
def test_round_trip_identity(lam, r_c, length, time, mass):
    p = CollapseParams(lam, r_c)
    s = UnitScale(length, time, mass)
    back = from_dimensionless(to_dimensionless(p, s), s)
    assert back.lam == pytest.approx(lam, rel=1e-12)
    assert back.r_c == pytest.approx(r_c, rel=1e-12)


@pytest.mark.parametrize("bad", [0.0, -1.0])
def test_invalid_scale(bad):
    with pytest.raises(InvalidScaleError):
        UnitScale(length_unit=bad)
    with pytest.raises(InvalidScaleError):
        UnitScale(time_unit=bad)


def test_natural_scale_has_unit_hbar():
    s = UnitScale.natural(1e-7, M0)
    assert s.hbar == pytest.approx(1.0, rel=1e-14)
    assert s.action_unit == pytest.approx(HBAR, rel=1e-14)


def test_canonical_points():
    pts = canonical_points()
    assert (pts.grw.lam, pts.grw.r_c) == (1e-16, 1e-7)
    assert (pts.adler_7.lam, pts.adler_7.r_c) == (1e-8, 1e-7)
    assert (pts.adler_6.lam, pts.adler_6.r_c) == (1e-6, 1e-6)
    assert canonical_points() is pts
    with pytest.raises(Exception):
        pts.grw.lam = 1.0
