import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from coniclap.cones import (Cone, ConeKind, ConeProduct, conic_norm, default_interior_point,
                            dual_membership, eta_bar, in_cone, irreducible_pieces, is_interior,
                            min_step, project, rsoc_to_soc, separating_dual, soc_to_rsoc, tau_bar)
from coniclap.model import split_disjunction

floats = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def L(n):
    return ConeProduct.of(("Q", n))


@pytest.mark.parametrize("kind,dim", [("Q", 1), ("QR", 2), ("F", 0), ("L+", 0)])
def test_cone_min_dims(kind, dim):
    with pytest.raises(ValueError):
        Cone(ConeKind(kind), dim)


def test_product_offsets_partition():
    K = ConeProduct.of(("F", 2), ("Q", 3), ("L+", 1), ("QR", 3))
    assert K.total_dim == 9
    covered = np.concatenate([np.arange(sl.start, sl.stop) for _, sl in K.slices()])
    assert np.array_equal(covered, np.arange(9))


@pytest.mark.parametrize("K,u,expected", [
    (L(3), (1, 0.5, 0.5), True),
    (L(3), (1, 1, 1), False),
    (ConeProduct.of(("L+", 1), ("Q", 3)), (0, 1, 0, 0), True),
])
def test_dual_membership_examples(K, u, expected):
    assert dual_membership(K, np.array(u, float), 1e-9) is expected


def test_dual_membership_free_block_needs_zero():
    K = ConeProduct.of(("F", 2))
    assert dual_membership(K, np.zeros(2))
    assert not dual_membership(K, np.array([0.0, 1.0]), 1e-9)
    assert in_cone(K, np.array([5.0, -3.0]))


def test_dimension_mismatch_raises():
    with pytest.raises(ValueError):
        dual_membership(L(3), np.ones(2), 0.0)
    with pytest.raises(ValueError):
        conic_norm(np.ones(3), np.ones(2))


@pytest.mark.parametrize("rho,u,expected", [
    ((1, 0, 0), (2, 1, 1), 2.0),
    ((1,), (0,), 0.0),
    ((1, 0, 0, 1), (1, 0, 0, 3), 4.0),
])
def test_conic_norm_examples(rho, u, expected):
    assert conic_norm(np.array(rho, float), np.array(u, float)) == expected


@pytest.mark.parametrize("K,x,expected", [
    (L(3), (0, 1, 0), 1.0),
    (ConeProduct.of(("L+", 2)), (-2, 3), 2.0),
])
def test_eta_bar_examples(K, x, expected):
    assert eta_bar(K, np.array(x, float)) == pytest.approx(expected, abs=1e-12)


def test_eta_bar_point_on_disk_boundary():
    x = np.array([1.1, 1.1 / math.sqrt(2), 1.1 / math.sqrt(2)])
    assert eta_bar(L(3), x) <= 1e-12
    # the rounded point sits just outside: |(0.778, 0.778)| = 1.10026
    x2 = np.array([1.1, 0.778, 0.778])
    assert eta_bar(L(3), x2) == pytest.approx(math.hypot(0.778, 0.778) - 1.1, abs=1e-14)


def test_tau_bar_split_terms():
    D = split_disjunction(np.array([1.0, 0.0]), 0.0)
    x = np.array([0.5, 7.0])
    t1, t2 = D.terms
    assert tau_bar(t1.D, t1.d, t1.Q, t1.sigma, x) == pytest.approx(0.5)
    assert tau_bar(t2.D, t2.d, t2.Q, t2.sigma, x) == pytest.approx(0.5)
    assert tau_bar(t1.D, t1.d, t1.Q, t1.sigma, np.array([-3.0, 0.0])) == 0.0


def test_default_interior_point_examples():
    K = ConeProduct.of(("L+", 1), ("Q", 3), ("L-", 1), ("F", 1), ("Q", 5))
    rho = default_interior_point(K)
    assert rho.tolist() == [1, 1, 0, 0, -1, 0, 1, 0, 0, 0, 0]
    Kr = ConeProduct.of(("QR", 3))
    assert is_interior(Kr, default_interior_point(Kr))
    assert is_interior(K, rho)
    assert not is_interior(ConeProduct.of(("L+", 1), ("Q", 3)), np.array([1.0, 1.0, 1.0, 0.0]))


@given(arrays(float, 5, elements=floats))
def test_rsoc_roundtrip(x):
    assert np.allclose(soc_to_rsoc(rsoc_to_soc(x)), x, atol=1e-12, rtol=0)


@given(arrays(float, 4, elements=floats))
def test_rsoc_membership_matches_definition(x):
    K = ConeProduct.of(("QR", 4))
    y = project(K, x)
    assert in_cone(K, y, 1e-12)
    assert y[0] >= -1e-12 and y[1] >= -1e-12
    assert 2 * y[0] * y[1] >= float(y[2:] @ y[2:]) - 1e-9 * (1 + float(y @ y))


@given(arrays(float, 7, elements=floats))
def test_projected_points_are_dual_members(u):
    K = ConeProduct.of(("L+", 2), ("Q", 3), ("L-", 1), ("F", 1))
    p = project(K, u, dual=True)
    assert dual_membership(K, p, 0.0)


@given(arrays(float, 6, elements=floats))
def test_eta_bar_matches_bisection(x):
    K = ConeProduct.of(("Q", 4), ("L+", 2))
    rho = default_interior_point(K)
    eta = eta_bar(K, x, rho)
    assert in_cone(K, x + eta * rho, 1e-9)
    if eta > 1e-6:
        assert not in_cone(K, x + (eta - 1e-6) * rho, 0.0)
    lo, hi = 0.0, 100.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if in_cone(K, x + mid * rho, 0.0):
            hi = mid
        else:
            lo = mid
    assert eta == pytest.approx(hi, abs=1e-7)


@given(arrays(float, 4, elements=floats), arrays(float, 4, elements=st.floats(0, 5)), st.floats(0.01, 50))
def test_conic_norm_homogeneous_additive(u, v, s):
    rho = default_interior_point(ConeProduct.of(("Q", 3), ("L+", 1)))
    assert conic_norm(rho, s * u) == pytest.approx(s * conic_norm(rho, u), rel=1e-12, abs=1e-12)
    assert conic_norm(rho, u + v) == pytest.approx(conic_norm(rho, u) + conic_norm(rho, v), abs=1e-12)


def test_min_step_general_direction():
    K = L(3)
    x = np.array([0.0, 3.0, 4.0])
    r = np.array([2.0, 1.0, 0.0])
    t = min_step(K, x, r)
    y = x + t * r
    assert y[0] == pytest.approx(np.linalg.norm(y[1:]), abs=1e-12)


def test_separating_dual_cuts_off_point():
    cone = Cone(ConeKind.SOC, 3)
    x = np.array([0.0, 1.0, 0.0])
    lam = separating_dual(cone, x)
    assert dual_membership(L(3), lam, 1e-12)
    assert lam @ x < 0
    assert np.allclose(lam, [1, -1, 0])
    assert separating_dual(cone, np.array([2.0, 1.0, 0.0])) is None
    assert separating_dual(Cone(ConeKind.NONNEG, 2), np.array([1.0, -1.0])).tolist() == [0, 1]


def test_irreducible_pieces_split_orthants():
    K = ConeProduct.of(("L+", 2), ("Q", 3))
    pieces = irreducible_pieces(K)
    assert [p[1].tolist() for p in pieces] == [[0], [1], [2, 3, 4]]
