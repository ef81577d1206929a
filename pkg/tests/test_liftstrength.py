import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from coniclap.cones import ConeKind
from coniclap.conicsolve import ConicProgram, solve
from coniclap.fixtures import example4, example4_xbar, random_misocp
from coniclap.model import Classification, certificate_check, clean, elementary_split
from coniclap.liftstrength import (reduce_problem, separate_lifted, strengthen, strengthen_coefficient,
                                   strengthened_disjunction, support_split)
from coniclap.oracle import Verdict, validate_cut
from coniclap.separation import Normalization, separate

coef = st.floats(-5, 5, allow_nan=False)
mult = st.floats(0.1, 5, allow_nan=False)  # keeps the optimal shift inside the grid


@pytest.mark.parametrize("a1,a2,v1,v2,expected,d", [
    (0.7, 0.2, 0.5, 0.5, 0.7, 0),
    (2.0, 0.0, 1.0, 1.0, 1.0, 1),
    (0.0, 3.0, 1.0, 2.0, 1.0, -1),
])
def test_strengthen_coefficient_examples(a1, a2, v1, v2, expected, d):
    val, dd = strengthen_coefficient(a1, a2, v1, v2)
    assert val == pytest.approx(expected) and dd == d


@given(coef, coef, mult, mult)
def test_strengthen_coefficient_is_integer_minmax(a1, a2, v1, v2):
    val, d = strengthen_coefficient(a1, a2, v1, v2)
    grid = min(max(a1 - v1 * t, a2 + v2 * t) for t in range(-60, 61))
    assert val == pytest.approx(grid, abs=1e-12)
    # never worse than the unshifted coefficient
    assert val <= max(a1, a2) + 1e-12
    assert val == pytest.approx(max(a1 - v1 * d, a2 + v2 * d))


@given(coef, coef, mult, mult)
def test_strengthen_coefficient_nonpositive_mirror(a1, a2, v1, v2):
    val, d = strengthen_coefficient(a1, a2, v1, v2, ConeKind.NONPOS)
    grid = max(min(a1 - v1 * t, a2 + v2 * t) for t in range(-60, 61))
    assert val == pytest.approx(grid, abs=1e-12)


def test_support_split_drops_zero_blocks():
    P = random_misocp(np.random.default_rng(1)).problem
    x = np.zeros(P.n)
    x[0] = 1.0
    split = support_split(P, x, protect=[1])
    assert 0 in split.kept and 1 in split.kept
    assert not np.any(x[split.dropped])
    assert sorted(np.concatenate([split.kept, split.dropped]).tolist()) == list(range(P.n))


def _lifting_cases(seed, count):
    rng = np.random.default_rng(seed)
    found = 0
    while found < count:
        inst = random_misocp(rng)
        P = inst.problem
        res = solve(ConicProgram(P.c, P.A, P.b, P.K))
        x = clean(res.x, 1e-7)
        frac = [j for j in np.flatnonzero(P.integral_mask) if abs(x[j] - round(x[j])) > 1e-6]
        if not frac:
            continue
        D = elementary_split(P, frac[0], x[frac[0]])
        split = support_split(P, x, [frac[0]])
        if split.dropped.size == 0:
            continue
        found += 1
        yield inst, D, x, split


def test_lifting_preserves_violation_and_certificate():
    for inst, D, x, split in _lifting_cases(5, 8):
        P = inst.problem
        N = Normalization.standard()
        out, _ = separate_lifted(P, D, x, N)
        P1, D1 = reduce_problem(P, D, split)
        red = separate(P1, D1, x[split.kept], N)
        assert (out.cut is None) == (red.cut is None)
        if out.cut is None:
            continue
        assert abs(out.cut.violation - red.cut.violation) <= 1e-12
        if out.cut.meta.get("lifted"):
            assert certificate_check(P, D, out.cut)
        assert validate_cut(P, out.cut, inst.box).verdict is Verdict.VALID


@pytest.mark.parametrize("norm", ["alpha", "standard", "uniform", "polar"])
@pytest.mark.parametrize("case", "ab")
def test_strengthened_example4_cuts_valid(case, norm):
    P = example4(case)
    x = example4_xbar(case)
    D = elementary_split(P, 1, x[1])
    c = separate(P, D, x, Normalization.parse(norm)).cut
    assert c.classification is Classification.LIFT_AND_PROJECT
    s, pt = strengthen(c, D, P.integral_mask, P, xbar=x)
    assert s.meta["strengthened"]
    assert certificate_check(P, strengthened_disjunction(D, pt), s)
    assert s.evaluate(x) <= c.evaluate(x) + 1e-9
    box = {1: (-2, 2), 2: (-2, 2)}
    assert validate_cut(P, s, box).verdict is Verdict.VALID


def test_strengthen_skips_kstar_cuts():
    P = example4(1.1)
    x = np.array([1.1, 1.5, 0.5])
    D = elementary_split(P, 1, 1.5)
    c = separate(P, D, x, Normalization.trivial()).cut
    if c is None:
        pytest.skip("no cut")
    s, pt = strengthen(c, D, P.integral_mask, P, xbar=x)
    assert np.array_equal(s.alpha, c.alpha)
