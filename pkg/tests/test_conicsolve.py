import importlib.util
import warnings

import numpy as np
import pytest
import scipy.sparse as sp

from coniclap.cones import ConeProduct, dual_membership, in_cone
from coniclap.conicsolve import (AnalyticCenterError, ConicProgram, FarkasCertificate, SolveOptions,
                                 SolveStatus, SolverBackendError, UnboundedRay, WeaklyFeasibleWarning,
                                 analytic_center, cone_rows_program, primal_residual, resolve_backend,
                                 solve, solve_lp, verify_farkas, verify_ray)
from coniclap.fixtures import example1, example4
from coniclap.instance_io import StandardProblem

HAS_SCS = importlib.util.find_spec("scs") is not None


def _socp():
    # min -x1 - x2 with x0 = 1, (x0, x1, x2) in L3  ->  -sqrt(2)
    return cone_rows_program([0, -1, -1], [[1, 0, 0]], [1], ConeProduct.of(("Q", 3)))


def test_program_shape_validation():
    with pytest.raises(ValueError):
        ConicProgram(np.zeros(3), sp.csr_matrix((1, 2)), np.zeros(1), ConeProduct.of(("Q", 3)))
    with pytest.raises(ValueError):
        ConicProgram(np.zeros(3), sp.csr_matrix((0, 3)), np.zeros(0), ConeProduct.of(("QR", 3)))
    with pytest.raises(ValueError):
        ConicProgram(np.zeros(2), sp.csr_matrix((0, 2)), np.zeros(0), ConeProduct.of(("Q", 3)))


def test_socp_optimal_with_duals():
    prog = _socp()
    res = solve(prog)
    assert res.status is SolveStatus.OPTIMAL
    assert res.obj == pytest.approx(-np.sqrt(2), abs=1e-7)
    assert primal_residual(prog, res.x) <= 1e-7
    # weak duality and dual feasibility of s = c - A'y
    assert res.obj >= res.dual_obj - 1e-6
    assert dual_membership(prog.cones, res.s, 1e-6)


def test_unbounded_returns_verified_ray():
    prog = cone_rows_program([-1], np.zeros((0, 1)), [], ConeProduct.of(("L+", 1)))
    res = solve(prog)
    assert res.status is SolveStatus.DUAL_INFEASIBLE
    assert isinstance(res.certificate, UnboundedRay)
    assert verify_ray(prog, res.certificate)
    assert res.certificate.r[0] == pytest.approx(1.0)


def test_infeasible_returns_verified_farkas():
    prog = cone_rows_program([0], [[1], [1]], [1, 2], ConeProduct.of(("F", 1)))
    res = solve(prog)
    assert res.status is SolveStatus.PRIMAL_INFEASIBLE
    cert = res.certificate
    assert isinstance(cert, FarkasCertificate)
    assert verify_farkas(prog, cert)
    assert np.max(np.abs(prog.A.T @ cert.y)) <= 1e-7 * np.linalg.norm(cert.y)
    assert prog.b @ cert.y >= 1e-9


def test_conic_infeasibility():
    # x0 = 1 and x1 = 2 cannot sit in L2
    prog = cone_rows_program([0, 0], [[1, 0], [0, 1]], [1, 2], ConeProduct.of(("Q", 2)))
    res = solve(prog)
    assert res.status is SolveStatus.PRIMAL_INFEASIBLE
    assert verify_farkas(prog, res.certificate)


def test_bogus_certificates_rejected():
    prog = cone_rows_program([0], [[1]], [1], ConeProduct.of(("L+", 1)))
    assert not verify_farkas(prog, FarkasCertificate(np.zeros(1), np.zeros(0), np.zeros(1)))
    assert not verify_ray(prog, UnboundedRay(np.array([1.0])))


def test_inequality_rows_and_lp_path():
    # min x0 + x1, x >= 0, x0 + x1 >= 1 as -x0 - x1 <= -1
    prog = cone_rows_program([1, 1], np.zeros((0, 2)), [], ConeProduct.of(("L+", 2)),
                             G=[[-1, -1]], h=[-1])
    for res in (solve(prog), solve_lp(prog)):
        assert res.status is SolveStatus.OPTIMAL
        assert res.obj == pytest.approx(1.0, abs=1e-7)
        assert res.w[0] == pytest.approx(1.0, abs=1e-6)


def test_highs_backend_falls_back_for_certificates():
    prog = cone_rows_program([0], [[1], [1]], [1, 2], ConeProduct.of(("F", 1)))
    res = solve(prog, SolveOptions(backend="highs"))
    assert res.status is SolveStatus.PRIMAL_INFEASIBLE
    assert verify_farkas(prog, res.certificate)
    # non-polyhedral programs are routed to the conic backend
    assert solve(_socp(), SolveOptions(backend="highs")).status is SolveStatus.OPTIMAL


@pytest.mark.skipif(not HAS_SCS, reason="scs not installed")
def test_scs_backend_agrees():
    res = solve(_socp(), SolveOptions(backend="scs"))
    assert res.status in (SolveStatus.OPTIMAL, SolveStatus.STALLED)
    assert res.obj == pytest.approx(-np.sqrt(2), abs=1e-4)


def test_backend_env_selection(monkeypatch):
    monkeypatch.setenv("CONICLAP_BACKEND", "highs")
    assert resolve_backend(None) == "highs"
    monkeypatch.setenv("CONICLAP_BACKEND", "nope")
    with pytest.raises(SolverBackendError):
        resolve_backend(None)


def test_iteration_limit_status():
    res = solve(_socp(), SolveOptions(max_iter=1))
    assert res.status in (SolveStatus.ITER_LIMIT, SolveStatus.STALLED)


def test_example1_is_reported_without_false_optimum():
    # ill-posed program: the outcome depends on the backend; never a wrong optimum
    prog = example1()
    res = solve(prog)
    assert isinstance(res.status, SolveStatus)
    if res.status is SolveStatus.OPTIMAL:
        assert res.obj == pytest.approx(0.0, abs=1e-5)


def test_analytic_center_example4():
    P = example4(1.1)
    x = analytic_center(P)
    assert x[0] == pytest.approx(1.1, abs=1e-7)
    assert np.linalg.norm(x[1:]) < 1.1 - 1e-7


def test_analytic_center_fixed_scalar():
    P = StandardProblem(np.zeros(1), sp.csr_matrix([[1.0]]), np.array([5.0]), ConeProduct.of(("L+", 1)),
                        None, None)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", WeaklyFeasibleWarning)
        x = analytic_center(P)
    assert x[0] == pytest.approx(5.0, abs=1e-7)


def test_analytic_center_boundary_orthant_warns():
    P = StandardProblem(np.zeros(2), sp.csr_matrix([[1.0, 0.0]]), np.array([0.0]), ConeProduct.of(("L+", 2)),
                        None, None)
    with pytest.warns(WeaklyFeasibleWarning):
        analytic_center(P)


def test_analytic_center_errors():
    empty = StandardProblem(np.zeros(1), sp.csr_matrix([[1.0]]), np.array([-1.0]), ConeProduct.of(("L+", 1)),
                            None, None)
    with pytest.raises(AnalyticCenterError):
        analytic_center(empty)
    weak = StandardProblem(np.zeros(2), sp.csr_matrix([[1.0, 0.0], [0.0, 1.0]]), np.array([1.0, 1.0]),
                           ConeProduct.of(("Q", 2)), None, None)
    with pytest.raises(AnalyticCenterError):
        analytic_center(weak)


def test_primal_residual_reports_cone_gap():
    prog = _socp()
    assert primal_residual(prog, np.array([1.0, 1.0, 1.0])) == pytest.approx(np.sqrt(2) - 1)
    assert in_cone(prog.cones, np.array([1.0, 0.0, 0.0]))
