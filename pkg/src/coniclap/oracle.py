"""Ground truth for cut validity by enumeration, and the planar split hull of a disk."""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .cones import default_interior_point, in_cone
from .conicsolve import ConicProgram, SolveOptions, SolveStatus, solve
from .instance_io import StandardProblem
from .model import CERT_TOL, CutCandidate

MAX_BOX_VOLUME = 10**6
RELAX_EPS = 1e-7


class Verdict(str, enum.Enum):
    VALID = "Valid"
    VIOLATED = "Violated"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class ValidationResult:
    verdict: Verdict
    witness: np.ndarray | None = None
    assignment: dict[int, int] | None = None
    worst_slack: float = float("inf")
    solves: int = 0

    def __bool__(self) -> bool:
        return self.verdict is Verdict.VALID


class BoxTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class EnumBox:
    bounds: dict[int, tuple[int, int]]

    def __post_init__(self) -> None:
        for j, (lo, hi) in self.bounds.items():
            if lo > hi:
                raise ValueError(f"empty range for variable {j}: [{lo}, {hi}]")

    @property
    def volume(self) -> int:
        return math.prod(hi - lo + 1 for lo, hi in self.bounds.values())

    def assignments(self):
        keys = sorted(self.bounds)
        ranges = [range(self.bounds[j][0], self.bounds[j][1] + 1) for j in keys]
        for combo in itertools.product(*ranges):
            yield dict(zip(keys, combo))


def derive_box(problem: StandardProblem, options: SolveOptions | None = None) -> EnumBox:
    """Integer bounds implied by the continuous relaxation (two solves per variable)."""
    bounds = {}
    n = problem.n
    for j in np.flatnonzero(problem.integer_mask):
        ends = []
        for sign in (1.0, -1.0):
            c = np.zeros(n)
            c[j] = sign
            res = solve(ConicProgram(c, problem.A, problem.b, problem.K), options)
            if res.status is SolveStatus.PRIMAL_INFEASIBLE:
                raise ValueError("continuous relaxation is infeasible")
            if res.status not in (SolveStatus.OPTIMAL, SolveStatus.STALLED):
                raise BoxTooLarge(f"variable {j} is not bounded by the relaxation ({res.status.value})")
            ends.append(sign * res.obj)
        lo, hi = ends
        bounds[int(j)] = (int(math.ceil(lo - 1e-6)), int(math.floor(hi + 1e-6)))
    return EnumBox(bounds)


def _fixing_program(problem: StandardProblem, keys: list[int]) -> sp.csr_matrix:
    """Rows ``A x = b`` stacked over the fixings ``x_j = h_j``."""
    n = problem.n
    F = sp.csr_matrix((np.ones(len(keys)), (np.arange(len(keys)), keys)), shape=(len(keys), n))
    A = sp.vstack([problem.A, F], format="csr")
    return A


def validate_cut(problem: StandardProblem, cut: CutCandidate, box: EnumBox | dict,
                 options: SolveOptions | None = None, tol: float = CERT_TOL) -> ValidationResult:
    """Check ``alpha'x >= beta`` on every integer assignment of the box."""
    if isinstance(box, dict):
        box = EnumBox(box)
    ints = set(np.flatnonzero(problem.integer_mask).tolist())
    if set(box.bounds) != ints:
        raise ValueError("box must bound exactly the integer variables")
    if box.volume > MAX_BOX_VOLUME:
        raise BoxTooLarge(f"box has {box.volume} assignments (limit {MAX_BOX_VOLUME})")
    alpha = np.asarray(cut.alpha, float)
    slack_tol = tol * (1.0 + float(np.max(np.abs(alpha), initial=0.0)))
    keys = sorted(box.bounds)
    A = _fixing_program(problem, keys)
    Ad = A.toarray()
    null_dim = Ad.shape[1] - np.linalg.matrix_rank(Ad)
    rho = default_interior_point(problem.K)
    out = ValidationResult(Verdict.VALID)
    inconclusive = False
    for assign in box.assignments():
        h = np.array([assign[j] for j in keys], dtype=float)
        b = np.concatenate([problem.b, h])
        pre = _presolve(Ad, b, problem, null_dim)
        if pre is False:
            continue
        if pre is not None:
            slack = float(alpha @ pre) - cut.beta
            if slack < -slack_tol:
                return ValidationResult(Verdict.VIOLATED, pre, assign, slack, out.solves)
            out.worst_slack = min(out.worst_slack, slack)
            continue
        res = solve(ConicProgram(alpha, A, b, problem.K), options)
        out.solves += 1
        if res.status is SolveStatus.PRIMAL_INFEASIBLE:
            continue
        if res.status is SolveStatus.DUAL_INFEASIBLE:
            return ValidationResult(Verdict.VIOLATED, res.x, assign, float("-inf"), out.solves)
        if res.status is SolveStatus.OPTIMAL:
            slack = res.obj - cut.beta
            if slack < -slack_tol:
                return ValidationResult(Verdict.VIOLATED, res.x, assign, slack, out.solves)
            out.worst_slack = min(out.worst_slack, slack)
            continue
        # weakly feasible subproblem: bound it from below through a relaxed cone
        lower = _relaxed_lower_bound(problem, alpha, A, b, rho, options)
        out.solves += 1
        if lower is None:
            inconclusive = True
        elif lower == float("inf"):
            continue
        elif lower - cut.beta < -slack_tol:
            if res.status is SolveStatus.STALLED and alpha @ res.x - cut.beta < -slack_tol:
                return ValidationResult(Verdict.VIOLATED, res.x, assign, float(alpha @ res.x - cut.beta),
                                        out.solves)
            inconclusive = True
        else:
            out.worst_slack = min(out.worst_slack, lower - cut.beta)
    if inconclusive:
        out.verdict = Verdict.INCONCLUSIVE
    return out


def _presolve(Ad: np.ndarray, b: np.ndarray, problem: StandardProblem, null_dim: int):
    """``False`` if the fixed linear system is inconsistent or its unique solution
    leaves the cone; the solution itself when it is unique and conic; else ``None``.
    """
    x, *_ = np.linalg.lstsq(Ad, b, rcond=None)
    scale = 1.0 + float(np.max(np.abs(b), initial=0.0))
    if np.max(np.abs(Ad @ x - b), initial=0.0) > 1e-9 * scale:
        return False
    if null_dim > 0:
        return None
    return x if in_cone(problem.K, x, 1e-9) else False


def _relaxed_lower_bound(problem, alpha, A, b, rho, options):
    """Minimum of ``alpha'x`` over ``{A x = b, x + eps*rho in K}``, a superset of the subproblem."""
    eps = RELAX_EPS * (1.0 + float(np.max(np.abs(b), initial=0.0)))
    shift = eps * rho
    res = solve(ConicProgram(alpha, A, b + A @ shift, problem.K), options)
    if res.status is SolveStatus.PRIMAL_INFEASIBLE:
        return float("inf")
    if res.status is SolveStatus.OPTIMAL:
        # the dual objective is a certified lower bound of the relaxed problem
        return min(res.obj, res.dual_obj) - float(alpha @ shift)
    return None


# -- planar split hull ----------------------------------------------------------

def _proj_segment(p, a, b):
    d = b - a
    L = float(d @ d)
    t = 0.0 if L == 0 else float(np.clip((p - a) @ d / L, 0.0, 1.0))
    return a + t * d, t


def split_hull_contains(R: float, p: np.ndarray, tol: float = 1e-12) -> bool:
    p = np.asarray(p, float)
    inside_disk = np.linalg.norm(p) <= R + tol
    if inside_disk and (p[0] <= tol or (p[0] >= 1 - tol and R >= 1)):
        return True
    if R < 1 or not (0 <= p[0] <= 1):
        return False
    top = R + (math.sqrt(R * R - 1) - R) * p[0]
    return -top - tol <= p[1] <= top + tol


def split_hull_support_2d(R: float, xbar_2d) -> tuple[float, float, float] | None:
    """Deepest valid line ``a1 x1 + a2 x2 >= beta`` (unit normal) for the hull of
    ``{|x| <= R, x1 <= 0}`` and ``{|x| <= R, x1 >= 1}``; ``None`` if the point is inside.
    """
    p = np.asarray(xbar_2d, dtype=float)
    if R <= 0:
        raise ValueError("radius must be positive")
    if split_hull_contains(R, p):
        return None
    cands = []
    norm_p = float(np.linalg.norm(p))
    if R < 1:
        q, _ = _proj_segment(p, np.array([0.0, -R]), np.array([0.0, R]))
        cands.append(q)
        if p[0] <= 0 and norm_p > 0:
            cands.append(R * p / norm_p)
    else:
        s = math.sqrt(R * R - 1)
        for sign in (1.0, -1.0):
            q, _ = _proj_segment(p, np.array([0.0, sign * R]), np.array([1.0, sign * s]))
            cands.append(q)
        if norm_p > 0:
            radial = R * p / norm_p
            if radial[0] <= 0 or radial[0] >= 1:
                cands.append(radial)
    proj = min(cands, key=lambda q: float(np.linalg.norm(q - p)))
    normal = proj - p
    normal /= np.linalg.norm(normal)
    return float(normal[0]), float(normal[1]), float(normal @ proj)


def split_hull_support_value(R: float, a: np.ndarray) -> float:
    """``min a'x`` over the split hull of the disk (its support function)."""
    a = np.asarray(a, float)
    vals = []
    # left half disk: interior minimizer -R a/|a| when it has x1 <= 0, else the chord ends
    na = float(np.linalg.norm(a))
    cand = -R * a / na
    if cand[0] <= 0:
        vals.append(float(a @ cand))
    vals += [a[1] * R, -a[1] * R]
    if R >= 1:
        s = math.sqrt(R * R - 1)
        if cand[0] >= 1:
            vals.append(float(a @ cand))
        vals += [a[0] + a[1] * s, a[0] - a[1] * s]
    return min(vals)


def enumerate_optimum(problem: StandardProblem, box: EnumBox | dict,
                      options: SolveOptions | None = None) -> tuple[float, np.ndarray | None]:
    """Mixed-integer optimum of ``min c'x`` by solving one program per integer assignment."""
    if isinstance(box, dict):
        box = EnumBox(box)
    if box.volume > MAX_BOX_VOLUME:
        raise BoxTooLarge(f"box has {box.volume} assignments (limit {MAX_BOX_VOLUME})")
    keys = sorted(box.bounds)
    A = _fixing_program(problem, keys)
    Ad = A.toarray()
    null_dim = Ad.shape[1] - np.linalg.matrix_rank(Ad)
    best, arg = float("inf"), None
    for assign in box.assignments():
        b = np.concatenate([problem.b, [assign[j] for j in keys]])
        pre = _presolve(Ad, b, problem, null_dim)
        if pre is False:
            continue
        if pre is not None:
            val, x = float(problem.c @ pre), pre
        else:
            res = solve(ConicProgram(problem.c, A, b, problem.K), options)
            if res.status is SolveStatus.DUAL_INFEASIBLE:
                return float("-inf"), None
            if res.status is not SolveStatus.OPTIMAL:
                continue
            val, x = res.obj, res.x
        if val < best:
            best, arg = val, x
    return best, arg
