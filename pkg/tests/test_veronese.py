"""Veronese maps, orbit identification, dimension scan, fact suite."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from normholo.errors import InvalidInput
from normholo.veronese import (congruence_residual, equivariance_residual,
                               immersion_scaling_residuals,
                               minimal_dimension_scan,
                               parallel_alpha_residual, rho_tilde,
                               verify_veronese_facts, veronese_map,
                               veronese_orbit, veronese_type_point)


@settings(max_examples=20)
@given(st.integers(0, 2 ** 31 - 1))
def test_map_is_rank_one_projector(seed):
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(4)
    v /= np.linalg.norm(v)
    q = veronese_map(v)
    assert abs(np.trace(q) - 1.0) < 1e-12
    assert np.allclose(q @ q, q, atol=1e-12)
    assert np.allclose(q @ v, v, atol=1e-12)


def test_map_validation():
    with pytest.raises(InvalidInput):
        veronese_map(np.array([1.0, 1.0]))
    with pytest.raises(InvalidInput):
        veronese_map(np.eye(3))


def test_centering_is_traceless():
    v = np.zeros(5)
    v[2] = 1.0
    z = rho_tilde(v)
    assert abs(np.trace(z)) < 1e-14
    assert np.allclose(z, veronese_map(v) - np.eye(5) / 5.0)


def test_type_point_validation():
    with pytest.raises(InvalidInput):
        veronese_type_point(2)
    with pytest.raises(InvalidInput):
        veronese_type_point(4, scale=0.0)
    s = veronese_type_point(4, scale=-2.0, normalize=True)
    assert abs(np.linalg.norm(s) - 1.0) < 1e-12
    assert np.linalg.eigvalsh(s)[0] < 0  # negative scale flips the split


def test_orbit_construction():
    with pytest.raises(InvalidInput):
        veronese_orbit(1)
    vo = veronese_orbit(3)
    assert vo.r == 4
    assert vo.orbit.dim == 3
    assert np.allclose(vo.base_point, veronese_type_point(4))
    # base point of the orbit is the normalized image of e1
    e1 = np.zeros(4)
    e1[0] = 1.0
    z = rho_tilde(e1)
    assert np.allclose(vo.orbit.point, z / np.linalg.norm(z), atol=1e-12)


@pytest.mark.parametrize("r", [3, 4, 5, 6, 7])
def test_dimension_scan(r):
    scan = minimal_dimension_scan(r)
    assert scan.agrees()
    assert scan.formula_dims == tuple(k * (r - k) for k in range(1, r))
    assert scan.minimum == r - 1
    assert scan.argmin_splits == (1, r - 1)


def test_dimension_scan_validation():
    with pytest.raises(InvalidInput):
        minimal_dimension_scan(2)


def test_equivariance():
    assert equivariance_residual(3) <= 1e-10


def test_immersion_scaling():
    iso, hom = immersion_scaling_residuals(3)
    assert iso <= 1e-10
    assert hom <= 1e-10


def test_congruence():
    assert congruence_residual(3) <= 1e-7


def test_alpha_parallel_on_veronese(v3):
    assert parallel_alpha_residual(v3) <= 1e-4


def test_alpha_not_parallel_on_regular_orbit(a2_orbit):
    assert parallel_alpha_residual(a2_orbit) > 0.1


@pytest.mark.parametrize("n", [2, 3, 4])
def test_fact_suite_passes(n):
    rep = verify_veronese_facts(n)
    assert rep.all_pass(), rep.failures()
    assert rep.transitive == (n == 2)
    assert rep.dim == n
    assert rep.codim == n * (n + 1) // 2
    assert abs(rep.beta - rep.beta_expected) < 1e-10


def test_fact_suite_range():
    with pytest.raises(InvalidInput):
        verify_veronese_facts(7)
    with pytest.raises(InvalidInput):
        verify_veronese_facts(1)
