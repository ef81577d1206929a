"""Disjunctions, cut candidates and their Farkas certificates."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Any, Sequence

import numpy as np
import scipy.sparse as sp

from .cones import ConeProduct, default_interior_point, dual_membership

CERT_TOL = 1e-6
MEMBERSHIP_TOL = 1e-7
INTEGRALITY_TOL = 1e-6


class Classification(str, enum.Enum):
    LIFT_AND_PROJECT = "LiftAndProject"
    KSTAR = "KStar"
    NONE = "None"


class NoViolatedDisjunction(ValueError):
    """The requested split is satisfied by the point (coordinate is integral)."""


@dataclass(frozen=True)
class DisjunctionTerm:
    """``D x - d in Q`` together with an interior point ``sigma`` of ``Q``."""

    D: sp.csr_matrix
    d: np.ndarray
    Q: ConeProduct
    sigma: np.ndarray

    def __post_init__(self) -> None:
        D = sp.csr_matrix(self.D, dtype=float)
        d = np.asarray(self.d, dtype=float).ravel()
        if D.shape[0] != d.shape[0] or self.Q.total_dim != d.shape[0]:
            raise ValueError("term data has inconsistent row counts")
        object.__setattr__(self, "D", D)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "sigma", np.asarray(self.sigma, dtype=float).ravel())


@dataclass(frozen=True)
class Disjunction:
    terms: tuple[DisjunctionTerm, ...]
    split: tuple[int, int] | None = None  # (j, pi0) for elementary splits
    pi: np.ndarray | None = None
    pi0: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", tuple(self.terms))
        if not self.terms:
            raise ValueError("a disjunction needs at least one term")
        ncols = {t.D.shape[1] for t in self.terms}
        if len(ncols) != 1:
            raise ValueError("all terms must have the same number of columns")

    @property
    def H(self) -> int:
        return len(self.terms)

    @property
    def n(self) -> int:
        return self.terms[0].D.shape[1]

    @property
    def is_split(self) -> bool:
        return self.pi is not None


def split_disjunction(pi: np.ndarray, pi0: float, tag: tuple[int, int] | None = None) -> Disjunction:
    """``(pi'x <= pi0) or (pi'x >= pi0 + 1)`` written as two one-row terms."""
    pi = np.asarray(pi, dtype=float).ravel()
    row = sp.csr_matrix(pi.reshape(1, -1))
    R1 = ConeProduct.of(("L+", 1))
    t1 = DisjunctionTerm(-row, np.array([-pi0]), R1, np.ones(1))
    t2 = DisjunctionTerm(row, np.array([pi0 + 1.0]), R1, np.ones(1))
    return Disjunction((t1, t2), tag, pi, float(pi0))


def elementary_split(problem, j: int, xbar_j: float, tol: float = INTEGRALITY_TOL) -> Disjunction:
    if not problem.integral_mask[j]:
        raise ValueError(f"variable {j} is neither integer nor implied integer")
    if abs(xbar_j - round(xbar_j)) <= tol:
        raise NoViolatedDisjunction(f"x[{j}] = {xbar_j} is integral within {tol}")
    pi0 = int(math.floor(xbar_j))
    pi = np.zeros(problem.n)
    pi[j] = 1.0
    return split_disjunction(pi, pi0, (int(j), pi0))


@dataclass
class CutCandidate:
    """Inequality ``alpha'x >= beta`` with per-term multipliers.

    ``u``, ``lam`` and ``v`` hold one entry per disjunction term.  A cut with
    a single set of multipliers and empty ``v`` is a relaxation cut (Farkas
    form) and is valid for every term.
    """

    alpha: np.ndarray
    beta: float
    u: list[np.ndarray]
    lam: list[np.ndarray]
    v: list[np.ndarray]
    violation: float = float("nan")
    classification: Classification = Classification.NONE
    normalization: str = ""
    meta: dict[str, Any] = field(default_factory=dict)

    @property
    def nnz(self) -> int:
        return int(np.count_nonzero(self.alpha))

    def evaluate(self, x: np.ndarray) -> float:
        """``alpha'x - beta``; negative means ``x`` is cut off."""
        return float(self.alpha @ x - self.beta)

    def to_json(self) -> dict:
        nz = np.flatnonzero(self.alpha)
        out = {
            "alpha": [[int(j), float(self.alpha[j])] for j in nz],
            "n": int(self.alpha.shape[0]),
            "beta": float(self.beta),
            "classification": self.classification.value,
            "violation": float(self.violation),
            "normalization": self.normalization,
        }
        for key in ("split", "source", "round", "strengthened", "lifted"):
            if key in self.meta:
                out[key] = self.meta[key]
        if "pi_tilde" in self.meta:
            pt = np.asarray(self.meta["pi_tilde"])
            out["pi_tilde"] = [[int(j), float(pt[j])] for j in np.flatnonzero(pt)]
        return out

    @classmethod
    def from_json(cls, data: dict, n: int | None = None) -> "CutCandidate":
        size = int(data.get("n", n or 0))
        if n is not None and size != n:
            raise ValueError(f"cut has {size} coefficients, problem has {n} variables")
        alpha = np.zeros(size)
        for j, val in data["alpha"]:
            if not 0 <= int(j) < size:
                raise ValueError(f"cut coefficient index {j} out of range")
            alpha[int(j)] = float(val)
        cls_name = data.get("classification", "None")
        return cls(alpha, float(data["beta"]), [], [], [], float(data.get("violation", float("nan"))),
                   Classification(cls_name), data.get("normalization", ""))


def farkas_aggregate(problem, u: np.ndarray, lam: np.ndarray, tol: float = 1e-9) -> tuple[np.ndarray, float]:
    lam = np.asarray(lam, dtype=float)
    u = np.asarray(u, dtype=float)
    if not dual_membership(problem.K, lam, tol):
        raise ValueError("lambda is not in the dual cone")
    alpha = np.asarray(problem.A.T @ u).ravel() + lam
    return alpha, float(problem.b @ u)


def relaxation_cut(problem, u: np.ndarray, lam: np.ndarray, **kw) -> CutCandidate:
    alpha, beta = farkas_aggregate(problem, u, lam)
    return CutCandidate(alpha, beta, [np.asarray(u, float)], [np.asarray(lam, float)], [], **kw)


def _term_multipliers(cut: CutCandidate, H: int, m: int):
    if not cut.v and len(cut.lam) == 1:
        u = cut.u[0] if cut.u else np.zeros(m)
        return [(u, cut.lam[0], None)] * H
    if len(cut.lam) != H or len(cut.u) != H or len(cut.v) != H:
        raise ValueError("multiplier lists do not match the number of terms")
    return list(zip(cut.u, cut.lam, cut.v))


def certificate_residual(problem, disjunction: Disjunction | None, cut: CutCandidate) -> dict[str, float]:
    """Worst residuals of the certificate, one entry per kind of condition."""
    H = disjunction.H if disjunction is not None else 1
    worst = {"alpha": 0.0, "beta": 0.0, "lam": 0.0, "v": 0.0}
    scale = 1.0 + float(np.max(np.abs(cut.alpha), initial=0.0))
    for h, (u, lam, v) in enumerate(_term_multipliers(cut, H, problem.m)):
        recon = np.asarray(problem.A.T @ u).ravel() + lam
        rhs = float(problem.b @ u)
        if v is not None and disjunction is not None:
            term = disjunction.terms[h]
            recon = recon + np.asarray(term.D.T @ v).ravel()
            rhs += float(term.d @ v)
            if not dual_membership(term.Q, v, MEMBERSHIP_TOL):
                worst["v"] = max(worst["v"], 1.0)
        worst["alpha"] = max(worst["alpha"], float(np.max(np.abs(cut.alpha - recon), initial=0.0)) / scale)
        worst["beta"] = max(worst["beta"], cut.beta - rhs)
        if not dual_membership(problem.K, lam, MEMBERSHIP_TOL):
            worst["lam"] = max(worst["lam"], 1.0)
    return worst


def certificate_check(problem, disjunction: Disjunction | None, cut: CutCandidate,
                      tol: float = CERT_TOL) -> bool:
    r = certificate_residual(problem, disjunction, cut)
    return r["alpha"] <= tol and r["beta"] <= tol and r["lam"] == 0.0 and r["v"] == 0.0


def shift_equivalent(problem, cut: CutCandidate, u0: np.ndarray) -> CutCandidate:
    u0 = np.asarray(u0, dtype=float)
    alpha = cut.alpha - np.asarray(problem.A.T @ u0).ravel()
    beta = cut.beta - float(problem.b @ u0)
    return replace(cut, alpha=alpha, beta=beta, u=[u - u0 for u in cut.u],
                   lam=list(cut.lam), v=list(cut.v), meta=dict(cut.meta))


def term_sigmas(disjunction: Disjunction, sigma: Sequence[np.ndarray] | None = None) -> list[np.ndarray]:
    if sigma is not None:
        return [np.asarray(s, dtype=float) for s in sigma]
    return [t.sigma if t.sigma.size else default_interior_point(t.Q) for t in disjunction.terms]


def clean(vec: np.ndarray | float, threshold: float):
    """Zero entries whose magnitude is at most ``threshold``."""
    if np.isscalar(vec):
        return 0.0 if abs(vec) <= threshold else float(vec)
    out = np.array(vec, dtype=float, copy=True)
    out[np.abs(out) <= threshold] = 0.0
    return out
