"""Lifting cuts from the support of a point, and monoidal strengthening of split cuts.

Both operations solve, per irreducible block of the modified part of the
space, the small program ``min rho'a  s.t.  a - g_h in K*`` for every term
``h``.  Orthant blocks have closed forms; second-order blocks go through the
solver adapter.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp

from .cones import Cone, ConeKind, ConeProduct, default_interior_point, irreducible_pieces
from .conicsolve import ConicProgram, SolveOptions, SolveStatus, solve
from .instance_io import StandardProblem
from .model import CutCandidate, Disjunction, DisjunctionTerm, split_disjunction

STRENGTHEN_GUARD = 1e-4
DELTA_RANGE = 3
MAX_GRID_COORDS = 2


@dataclass
class SupportSplit:
    kept: np.ndarray
    dropped: np.ndarray
    kept_pieces: list[tuple[Cone, np.ndarray]] = field(default_factory=list)
    dropped_pieces: list[tuple[Cone, np.ndarray]] = field(default_factory=list)


def support_split(problem: StandardProblem, xbar: np.ndarray, protect: np.ndarray | None = None) -> SupportSplit:
    """Drop every non-free irreducible block on which ``xbar`` is exactly zero.

    ``protect`` lists coordinates that must stay (e.g. the split variable).
    """
    keep_pieces, drop_pieces = [], []
    protect_set = set(() if protect is None else np.asarray(protect).tolist())
    for cone, idx in irreducible_pieces(problem.K):
        if cone.kind is not ConeKind.FREE and not np.any(xbar[idx]) and not protect_set.intersection(idx.tolist()):
            drop_pieces.append((cone, idx))
        else:
            keep_pieces.append((cone, idx))
    kept = np.concatenate([i for _, i in keep_pieces]) if keep_pieces else np.zeros(0, int)
    dropped = np.concatenate([i for _, i in drop_pieces]) if drop_pieces else np.zeros(0, int)
    return SupportSplit(kept, dropped, keep_pieces, drop_pieces)


def reduce_problem(problem: StandardProblem, disjunction: Disjunction, split: SupportSplit):
    """Restrict problem and disjunction data to the kept coordinates."""
    kept = split.kept
    K1 = ConeProduct(c for c, _ in split.kept_pieces)
    P1 = StandardProblem(problem.c[kept], problem.A[:, kept], problem.b, K1,
                         problem.integer_mask[kept], problem.implied_integer_mask[kept])
    terms = [DisjunctionTerm(t.D[:, kept], t.d, t.Q, t.sigma) for t in disjunction.terms]
    tag = None
    if disjunction.split is not None:
        j, pi0 = disjunction.split
        tag = (int(np.flatnonzero(kept == j)[0]), pi0)
    pi = None if disjunction.pi is None else disjunction.pi[kept]
    return P1, Disjunction(tuple(terms), tag, pi, disjunction.pi0)


def _block_targets_min(cone: Cone, targets: list[np.ndarray], rho: np.ndarray,
                       options: SolveOptions | None = None,
                       upper: np.ndarray | None = None) -> tuple[np.ndarray | None, bool]:
    """Minimal ``a`` with ``a - g in K*`` for every target ``g``; flag marks a fallback.

    With ``upper`` the second-order case also requires ``upper - a in K*`` and
    returns ``None`` when that is impossible.
    """
    G = np.array(targets)
    if cone.kind is ConeKind.NONNEG:
        return G.max(axis=0), False
    if cone.kind is ConeKind.NONPOS:
        return G.min(axis=0), False
    if cone.kind is ConeKind.FREE:
        if np.ptp(G, axis=0).max(initial=0.0) > 1e-9:
            raise ValueError("free coordinates cannot absorb different targets")
        return G[0], False
    d = cone.dim
    H = len(targets)
    if upper is None and np.ptp(G, axis=0).max(initial=0.0) == 0.0:
        return G[0].copy(), False
    # variables: a (free, d) then one SOC slack per target (and one for the upper bound)
    S = H + (upper is not None)
    cones = [Cone(ConeKind.FREE, d)] + [Cone(ConeKind.SOC, d)] * S
    rows = []
    for h in range(S):
        blk = [sp.csr_matrix((d, d))] * (S + 1)
        blk[0] = -sp.eye(d) if h < H else sp.eye(d)
        blk[h + 1] = sp.eye(d)
        rows.append(sp.hstack(blk))
    A = sp.vstack(rows).tocsr()
    b = -np.concatenate(targets)
    if upper is not None:
        b = np.concatenate([b, upper])
    c = np.concatenate([rho, np.zeros(S * d)])
    res = solve(ConicProgram(c, A, b, ConeProduct(cones)), options)
    if res.status in (SolveStatus.OPTIMAL, SolveStatus.STALLED):
        a = res.x[:d].copy()
        a[0] += max(0.0, max(_soc_gap(a - g) for g in targets))
        if upper is not None and _soc_gap(upper - a) > 1e-7 * (1.0 + np.abs(upper).max()):
            return None, False
        return a, False
    if upper is not None:
        return None, False
    center = G[:, 1:].mean(axis=0)
    head = max(g[0] + np.linalg.norm(g[1:] - center) for g in targets)
    return np.concatenate([[head], center]), True


def _soc_gap(x: np.ndarray) -> float:
    return float(np.linalg.norm(x[1:]) - x[0])


def _term_targets(problem: StandardProblem, disjunction: Disjunction, cut: CutCandidate) -> list[np.ndarray]:
    """``A'u_h + D_h'v_h`` for every term, over all coordinates."""
    out = []
    for h, term in enumerate(disjunction.terms):
        g = np.asarray(problem.A.T @ cut.u[h]).ravel() + np.asarray(term.D.T @ cut.v[h]).ravel()
        out.append(g)
    return out


def lift(reduced_cut: CutCandidate, split: SupportSplit, problem: StandardProblem,
         disjunction: Disjunction, rho2: np.ndarray | None = None,
         options: SolveOptions | None = None) -> CutCandidate:
    """Extend a cut separated on the kept coordinates to the full space."""
    n = problem.n
    rho = default_interior_point(problem.K) if rho2 is None else np.asarray(rho2, float)
    alpha = np.zeros(n)
    alpha[split.kept] = reduced_cut.alpha
    lams = []
    for lam in reduced_cut.lam:
        full = np.zeros(n)
        full[split.kept] = lam
        lams.append(full)
    cut = CutCandidate(alpha, reduced_cut.beta, [u.copy() for u in reduced_cut.u], lams,
                       [v.copy() for v in reduced_cut.v], reduced_cut.violation,
                       reduced_cut.classification, reduced_cut.normalization, dict(reduced_cut.meta))
    targets = _term_targets(problem, disjunction, cut)
    fallback = False
    for cone, idx in split.dropped_pieces:
        a2, flag = _block_targets_min(cone, [g[idx] for g in targets], rho[idx], options)
        fallback |= flag
        cut.alpha[idx] = a2
        for h, g in enumerate(targets):
            cut.lam[h][idx] = a2 - g[idx]
    cut.meta["lifted"] = True
    if fallback:
        cut.meta["lift_fallback"] = True
    return cut


def separate_lifted(problem: StandardProblem, disjunction: Disjunction, xbar: np.ndarray,
                    normalization, config=None):
    """Separate on the support of ``xbar`` and lift the result."""
    from .separation import separate

    j = disjunction.split[0] if disjunction.split is not None else None
    split = support_split(problem, xbar, None if j is None else [j])
    if split.dropped.size == 0:
        return separate(problem, disjunction, xbar, normalization, config), split
    P1, D1 = reduce_problem(problem, disjunction, split)
    out = separate(P1, D1, xbar[split.kept], normalization, config)
    if out.cut is not None:
        rc = out.cut
        if len(rc.lam) == disjunction.H and len(rc.v) == disjunction.H:
            out.cut = lift(rc, split, problem, disjunction, options=config.solve_options if config else None)
            out.cut.violation = out.cut.evaluate(xbar)
        else:
            out.cut = _embed(rc, split, problem.n)
        out.disaggregated_kstar = [_embed(c, split, problem.n) for c in out.disaggregated_kstar]
    return out, split


def _embed(cut: CutCandidate, split: SupportSplit, n: int) -> CutCandidate:
    alpha = np.zeros(n)
    alpha[split.kept] = cut.alpha
    lam = []
    for l in cut.lam:
        full = np.zeros(n)
        full[split.kept] = l
        lam.append(full)
    return replace(cut, alpha=alpha, lam=lam, meta=dict(cut.meta))


# -- strengthening ------------------------------------------------------------

def strengthen_coefficient(a1: float, a2: float, v1: float, v2: float, kind: ConeKind = ConeKind.NONNEG) -> tuple[float, int]:
    """Best coefficient of one orthant coordinate and the integer shift achieving it.

    Nonnegative coordinates need ``a >= a1 - v1 d`` and ``a >= a2 + v2 d``, so the
    coefficient is ``min_d max(...)``; nonpositive ones flip both inequalities.
    """
    dc = (a1 - a2) / (v1 + v2)
    best = None
    for d in sorted({int(np.floor(dc)), int(np.ceil(dc))}, key=lambda t: (abs(t), t)):
        if kind is ConeKind.NONPOS:
            val = min(a1 - v1 * d, a2 + v2 * d)
            better = best is None or val > best[0]
        else:
            val = max(a1 - v1 * d, a2 + v2 * d)
            better = best is None or val < best[0]
        if better:
            best = (val, d)
    return best


def strengthen(cut: CutCandidate, disjunction: Disjunction, strengthen_mask: np.ndarray,
               problem: StandardProblem, rho2: np.ndarray | None = None,
               options: SolveOptions | None = None,
               xbar: np.ndarray | None = None) -> tuple[CutCandidate, np.ndarray]:
    """Monoidal strengthening of a split cut; returns the cut and the shifted split direction.

    Second-order blocks only accept a shift whose coefficients are dominated by
    the current ones in the dual cone (so the new cut implies the old one on
    ``K``) and, when ``xbar`` is given, do not raise the block's value at ``xbar``.
    """
    pi = np.asarray(disjunction.pi, dtype=float)
    if len(cut.v) != 2 or disjunction.H != 2 or disjunction.pi is None:
        out = replace(cut, meta={**cut.meta, "strengthened": False})
        return out, pi
    v1, v2 = float(cut.v[0][0]), float(cut.v[1][0])
    if abs(v1) + abs(v2) < STRENGTHEN_GUARD:
        return replace(cut, meta={**cut.meta, "strengthened": False}), pi
    mask = np.asarray(strengthen_mask, dtype=bool).copy()
    if disjunction.split is not None:
        mask[disjunction.split[0]] = False
    rho = default_interior_point(problem.K) if rho2 is None else np.asarray(rho2, float)
    Au = [np.asarray(problem.A.T @ u).ravel() for u in cut.u]
    a1_all = Au[0] - v1 * pi
    a2_all = Au[1] + v2 * pi
    alpha = cut.alpha.copy()
    lam = [l.copy() for l in cut.lam]
    delta = np.zeros_like(pi)
    skipped = 0
    for cone, idx in irreducible_pieces(problem.K):
        sel = idx[mask[idx]]
        if sel.size == 0 or cone.kind is ConeKind.FREE:
            continue
        if cone.is_linear:
            k = int(idx[0])
            val, d = strengthen_coefficient(a1_all[k], a2_all[k], v1, v2, cone.kind)
            alpha[k] = val
            delta[k] = d
            lam[0][k] = val - (a1_all[k] - v1 * d)
            lam[1][k] = val - (a2_all[k] + v2 * d)
            continue
        if sel.size > MAX_GRID_COORDS:
            skipped += 1
            continue
        pos = np.searchsorted(idx, sel)
        cur = alpha[idx].copy()
        best = (rho[idx] @ cur, None, cur)
        at_x = None if xbar is None else float(cur @ xbar[idx])
        grid = sorted(itertools.product(range(-DELTA_RANGE, DELTA_RANGE + 1), repeat=sel.size),
                      key=lambda t: (sum(map(abs, t)), t))
        for combo in grid:
            dvec = np.zeros(idx.size)
            dvec[pos] = combo
            g1 = a1_all[idx] - v1 * dvec
            g2 = a2_all[idx] + v2 * dvec
            a, _ = _block_targets_min(cone, [g1, g2], rho[idx], options, upper=cur)
            if a is None:
                continue
            if at_x is not None and float(a @ xbar[idx]) > at_x + 1e-12:
                continue
            val = float(rho[idx] @ a)
            if val < best[0] - 1e-12:
                best = (val, dvec, a)
        if best[1] is not None:
            a, dvec = best[2], best[1]
            alpha[idx] = a
            delta[idx] = dvec
            lam[0][idx] = a - (a1_all[idx] - v1 * dvec)
            lam[1][idx] = a - (a2_all[idx] + v2 * dvec)
    pi_tilde = pi + delta
    meta = {**cut.meta, "strengthened": True, "pi_tilde": pi_tilde}
    if skipped:
        meta["strengthen_skipped_blocks"] = skipped
    out = replace(cut, alpha=alpha, lam=lam, u=list(cut.u), v=list(cut.v), meta=meta)
    return out, pi_tilde


def strengthened_disjunction(disjunction: Disjunction, pi_tilde: np.ndarray) -> Disjunction:
    """Split on the shifted direction, used to check a strengthened cut's certificate."""
    return split_disjunction(pi_tilde, disjunction.pi0, None)
