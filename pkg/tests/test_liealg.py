"""Represented-algebra machinery: closure, splitting, transitivity."""

import numpy as np
import pytest

from normholo.errors import DimensionCapExceeded, InvalidInput
from normholo.liealg import (bracket_closure, invariant_decomposition,
                             is_transitive_on_sphere, skew_span)


def _so3_generators():
    gx = np.array([[0.0, 0, 0], [0, 0, -1.0], [0, 1.0, 0]])
    gy = np.array([[0.0, 0, 1.0], [0, 0, 0], [-1.0, 0, 0]])
    gz = np.array([[0.0, -1.0, 0], [1.0, 0, 0], [0, 0, 0]])
    return gx, gy, gz


def test_skew_span_dedup_and_validation():
    gx, gy, gz = _so3_generators()
    span = skew_span([gx, gy, gz, gx + gy])
    assert span.dim == 3
    with pytest.raises(InvalidInput):
        skew_span([np.eye(3)])
    empty = skew_span([], acting_dim=4)
    assert empty.dim == 0 and empty.matrices().shape == (0, 4, 4)
    with pytest.raises(InvalidInput):
        skew_span([])


def test_bracket_closure_completes_so3():
    gx, gy, _ = _so3_generators()
    closed = bracket_closure([gx, gy])
    assert closed.dim == 3
    assert closed.closed
    with pytest.raises(DimensionCapExceeded):
        bracket_closure([gx, gy], cap=2)


def test_bracket_closure_already_closed():
    span = skew_span(list(_so3_generators()))
    assert bracket_closure(span).dim == 3


def test_decomposition_so2_in_r3():
    _, _, gz = _so3_generators()
    dec = invariant_decomposition(skew_span([gz]))
    assert dec.rank == 1                      # the z axis is fixed
    assert dec.factor_dims == (2,)
    assert dec.irreducible_by_probe == (True,)


def test_decomposition_full_so3():
    dec = invariant_decomposition(skew_span(list(_so3_generators())))
    assert dec.rank == 0
    assert dec.factor_dims == (3,)


def test_decomposition_two_blocks():
    g = np.zeros((2, 4, 4))
    g[0, 0, 1], g[0, 1, 0] = -1.0, 1.0
    g[1, 2, 3], g[1, 3, 2] = -1.0, 1.0
    dec = invariant_decomposition(skew_span(list(g)))
    assert dec.rank == 0
    assert dec.factor_dims == (2, 2)


def test_decomposition_trivial_algebra():
    dec = invariant_decomposition(skew_span([], acting_dim=3))
    assert dec.rank == 3
    assert dec.factor_dims == ()


def test_decomposition_frame_invariant():
    # factor structure must not depend on the coordinate frame
    gx, gy, gz = _so3_generators()
    base = [np.zeros((5, 5)) for _ in range(3)]
    for b, g in zip(base, (gx, gy, gz)):
        b[:3, :3] = g
    rng = np.random.default_rng(3)
    q, _ = np.linalg.qr(rng.standard_normal((5, 5)))
    rotated = [q @ b @ q.T for b in base]
    d0 = invariant_decomposition(skew_span(base))
    d1 = invariant_decomposition(skew_span(rotated))
    assert d0.factor_dims == d1.factor_dims == (3,)
    assert d0.rank == d1.rank == 2


def test_transitivity_probe():
    full = skew_span(list(_so3_generators()))
    res = is_transitive_on_sphere(full)
    assert res.transitive
    assert res.sphere_dim == 2
    assert all(d == 2 for d in res.probe_orbit_dims)

    _, _, gz = _so3_generators()
    circle = is_transitive_on_sphere(skew_span([gz]))
    assert not circle.transitive


def test_restrict_compresses_action():
    _, _, gz = _so3_generators()
    span = skew_span([gz])
    dec = invariant_decomposition(span)
    restricted = span.restrict(dec.factors[0])
    assert restricted.acting_dim == 2
    assert restricted.dim == 1
