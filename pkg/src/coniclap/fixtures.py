"""Small worked instances and a random instance generator used by tests and the CLI."""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .cones import ConeProduct
from .conicsolve import ConicProgram
from .instance_io import StandardProblem, parse_cbf, to_standard_form
from .model import Disjunction, DisjunctionTerm

EXAMPLE4_RADIUS = {"a": 1.1, "b": 1.0, "c": 0.9}


def example4_cbf(R: float) -> str:
    return f"""VER
3

OBJSENSE
MIN

VAR
3 1
Q 3

INT
2
1
2

CON
1 1
L= 1

OBJACOORD
2
1 -1.0
2 -1.0

ACOORD
1
0 0 1.0

BCOORD
1
0 {-R!r}
"""


def example4(R: float | str = 1.1) -> StandardProblem:
    """``min -x1 - x2`` over ``x0 = R``, ``x in L3``, ``x1, x2`` integer."""
    if isinstance(R, str):
        R = EXAMPLE4_RADIUS[R]
    return to_standard_form(parse_cbf(example4_cbf(float(R))))


def example4_xbar(R: float | str = 1.1) -> np.ndarray:
    if isinstance(R, str):
        R = EXAMPLE4_RADIUS[R]
    return np.array([R, R / math.sqrt(2.0), R / math.sqrt(2.0)])


def example4_file(case: str) -> str:
    return resources.files("coniclap").joinpath(f"data/ex4{case}.cbf").read_text()


def example5() -> tuple[StandardProblem, Disjunction, np.ndarray]:
    """Nonnegative pair summing to one with the disjunction x1 = 0 or x1 = 1."""
    K = ConeProduct.of(("L+", 2))
    prob = StandardProblem(np.zeros(2), sp.csr_matrix([[1.0, 1.0]]), np.array([1.0]), K,
                           np.zeros(2, bool), None, ("x0", "x1"))
    D = sp.csr_matrix([[1.0, 0.0], [-1.0, 0.0]])
    Q = ConeProduct.of(("L+", 2))
    t1 = DisjunctionTerm(D, np.array([0.0, 0.0]), Q, np.ones(2))
    t2 = DisjunctionTerm(D, np.array([1.0, -1.0]), Q, np.ones(2))
    return prob, Disjunction((t1, t2)), np.array([-1.0, 2.0])


def example1() -> ConicProgram:
    """``min x3`` with ``x2 >= x1``, ``x3 >= -1``, ``x in L3`` (head x1), via two slacks."""
    K = ConeProduct.of(("Q", 3), ("L+", 2))
    A = sp.csr_matrix([[-1.0, 1.0, 0.0, -1.0, 0.0], [0.0, 0.0, 1.0, 0.0, -1.0]])
    return ConicProgram(np.array([0.0, 0.0, 1.0, 0.0, 0.0]), A, np.array([0.0, -1.0]), K)


@dataclass
class RandomInstance:
    problem: StandardProblem
    box: dict[int, tuple[int, int]]
    radius: float


def random_misocp(rng: np.random.Generator, max_n: int = 12) -> RandomInstance:
    """Bounded MISOCP with one second-order block and 2-4 integer variables.

    The cone head is fixed to ``R``; linear inequalities with integral data
    on the cone tail get nonnegative slacks.  The origin of the tail is
    always integer feasible.
    """
    d = int(rng.integers(3, 7))
    p = int(rng.integers(1, 4))
    p = min(p, max_n - d)
    R = float(rng.uniform(1.05, 1.9))
    n = d + p
    tail = list(range(1, d))
    n_int = int(rng.integers(2, 5))
    ints = list(rng.choice(tail, size=min(n_int, len(tail)), replace=False))
    rows, rhs = [], []
    row = np.zeros(n)
    row[0] = 1.0
    rows.append(row)
    rhs.append(R)
    g_rows = []
    for i in range(p):
        g = rng.integers(-1, 2, size=d - 1).astype(float)
        if not g.any():
            g[rng.integers(0, d - 1)] = 1.0
        h = float(rng.integers(1, 3))
        row = np.zeros(n)
        row[1:d] = g
        row[d + i] = 1.0
        rows.append(row)
        rhs.append(h)
        g_rows.append((g, h))
    while len(ints) < n_int and len(ints) < d - 1 + p:
        ints.append(d + len(ints) - (d - 1))
    c = np.zeros(n)
    c[1:d] = rng.normal(size=d - 1)
    c[d:] = rng.normal(scale=0.3, size=p)
    K = ConeProduct.of(("Q", d), ("L+", p))
    imask = np.zeros(n, bool)
    imask[ints] = True
    prob = StandardProblem(c, sp.csr_matrix(np.array(rows)), np.array(rhs), K, imask, None)
    from .instance_io import detect_implied_integers

    prob = prob.with_masks(implied_integer_mask=detect_implied_integers(prob))
    r = int(math.floor(R))
    box = {}
    for j in np.flatnonzero(imask):
        if j < d:
            box[int(j)] = (-r, r)
        else:
            g, h = g_rows[j - d]
            box[int(j)] = (0, int(math.floor(h + np.abs(g).sum() * R)))
    return RandomInstance(prob, box, R)


def affine_point(problem: StandardProblem, rng: np.random.Generator, spread: float = 1.0) -> np.ndarray:
    """Random exact solution of ``A x = b`` (not necessarily in the cone)."""
    A = problem.A.toarray()
    x0, *_ = np.linalg.lstsq(A, problem.b, rcond=None)
    N = scipy.linalg.null_space(A)
    x = x0 + N @ rng.normal(scale=spread, size=N.shape[1])
    return project_affine(problem, x)


def project_affine(problem: StandardProblem, x: np.ndarray) -> np.ndarray:
    """Least-squares correction so that ``A x = b`` holds to rounding."""
    A = problem.A.toarray()
    if A.shape[0] == 0:
        return np.asarray(x, float)
    r = A @ x - problem.b
    dx, *_ = np.linalg.lstsq(A, r, rcond=None)
    return x - dx
