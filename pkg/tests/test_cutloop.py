import numpy as np
import pytest

from coniclap.cones import ConeProduct, eta_bar
from coniclap.cutloop import (LoopConfig, LoopState, RelaxationMode, _solve_relaxation, fractional_order,
                              gap_closed, initial_linearization, refine, run)
from coniclap.fixtures import example4, random_misocp
from coniclap.model import CutCandidate
from coniclap.oracle import enumerate_optimum

Z_MICP = {"a": -1.0, "b": -1.0, "c": 0.0}


@pytest.mark.parametrize("z_cp,z_micp,z_star,expected", [
    (-2.0, -1.0, -1.5, 50.0),
    (-2.0, -1.0, -2.0, 0.0),
    (-2.0, -1.0, -0.5, 100.0),
    (-2.0, -2.0, -2.0, None),
    (-2.0, None, -1.0, None),
])
def test_gap_closed_examples(z_cp, z_micp, z_star, expected):
    assert gap_closed(z_cp, z_micp, z_star) == expected


def test_config_validation():
    with pytest.raises(ValueError):
        LoopConfig(normalization="nope")
    with pytest.raises(ValueError):
        LoopConfig(eps_K=1e-9)
    with pytest.raises(ValueError):
        LoopConfig(max_rounds=-1)
    assert LoopConfig(relaxation_mode="Conic").relaxation_mode is RelaxationMode.CONIC


def test_initial_linearization_rows():
    cuts = initial_linearization(ConeProduct.of(("L+", 1), ("Q", 3)))
    assert len(cuts) == 4
    assert cuts[0].alpha.tolist() == [0, 1, 1, 0]


def test_dedupe_scales_to_unit_max_norm():
    state = LoopState(example4(1.1))
    a = CutCandidate(np.array([1.0, -1.0, 0.0]), 0.5, [], [], [])
    b = CutCandidate(np.array([2.0, -2.0, 0.0]), 1.0, [], [], [])
    c = CutCandidate(np.array([2.0, -2.0, 0.0]), 1.1, [], [], [])
    assert state.add(a) and not state.add(b) and state.add(c)
    assert not state.add(CutCandidate(np.zeros(3), 0.0, [], [], []))


def test_fractional_order():
    P = example4(1.1)
    assert fractional_order(P, np.array([1.1, 0.3, 0.5])) == [2, 1]
    assert fractional_order(P, np.array([1.1, 0.5, 0.5])) == [1, 2]
    assert fractional_order(P, np.array([1.1, 1.0, -2.0])) == []


def test_refine_reduces_eta():
    P = example4(1.1)
    cfg = LoopConfig()
    state = LoopState(P)
    for c in initial_linearization(P.K):
        state.add(c)
    x0 = _solve_relaxation(state, cfg, [], 0).x
    assert eta_bar(P.K, x0) > cfg.eps_K
    x, added, iters, capped, value = refine(state, x0, cfg, [])
    assert added > 0 and not capped
    assert eta_bar(P.K, x) <= cfg.eps_K
    assert value >= float(P.c @ x0) - 1e-9


def test_example4a_first_round():
    rep = run(example4("a"), LoopConfig(max_rounds=1, z_micp=-1.0))
    assert rep.rounds[1].landp >= 1
    assert rep.rounds[1].gap_pct > 0
    assert rep.z_star >= rep.z_cp


def test_zero_rounds_and_time_limit():
    rep = run(example4("a"), LoopConfig(max_rounds=0))
    assert rep.status == "MaxRounds" and len(rep.rounds) == 1
    rep = run(example4("a"), LoopConfig(max_rounds=5, time_limit=0.0))
    assert rep.status == "TimeLimit" and len(rep.rounds) == 1


def test_loop_is_deterministic():
    cfg = dict(max_rounds=4, z_micp=-1.0, normalization="uniform")
    r1 = run(example4("a"), LoopConfig(**cfg))
    r2 = run(example4("a"), LoopConfig(**cfg))
    assert r1.to_csv() == r2.to_csv()
    assert [c.to_json() for c in r1.cuts] == [c.to_json() for c in r2.cuts]


@pytest.mark.parametrize("mode", ["OuterApprox", "Conic"])
@pytest.mark.parametrize("norm", ["standard", "uniform", "alpha", "polar", "trivial"])
@pytest.mark.parametrize("case", "abc")
def test_example4_loop_safety(case, norm, mode):
    P = example4(case)
    rep = run(P, LoopConfig(normalization=norm, max_rounds=6, z_micp=Z_MICP[case], relaxation_mode=mode))
    bounds = [r.bound for r in rep.rounds]
    assert all(b2 >= b1 - 1e-7 for b1, b2 in zip(bounds, bounds[1:]))
    assert rep.z_star <= Z_MICP[case] + 1e-6
    _, xs = enumerate_optimum(P, {1: (-1, 1), 2: (-1, 1)})
    assert all(c.evaluate(xs) >= -1e-6 for c in rep.cuts)


def test_random_instances_never_cut_optimum():
    rng = np.random.default_rng(11)
    for _ in range(4):
        inst = random_misocp(rng)
        z, xs = enumerate_optimum(inst.problem, inst.box)
        rep = run(inst.problem, LoopConfig(max_rounds=4, z_micp=z))
        assert all(c.evaluate(xs) >= -1e-6 for c in rep.cuts)
        assert rep.z_star <= z + 1e-6
