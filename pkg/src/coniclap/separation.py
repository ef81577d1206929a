"""Cut-generating and membership conic programs under five normalizations.

For an elementary split the cut-generating program is built in compact form:
the first term's equality multipliers are fixed to zero and ``alpha``,
``beta`` are eliminated, leaving the variables ``u2, lam1, lam2, v1, v2, t1,
t2``.  Any other disjunction goes through the general builder that keeps
``alpha`` and ``beta`` explicit.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
import scipy.sparse as sp

from .conicsolve import (
    AnalyticCenterError,
    ConicProgram,
    SolveOptions,
    SolveResult,
    SolveStatus,
    analytic_center,
    solve,
)
from .cones import (
    Cone,
    ConeKind,
    ConeProduct,
    default_interior_point,
    eta_bar,
    irreducible_pieces,
    min_step,
    project,
    rsoc_to_soc,
    soc_to_rsoc,
    tau_bar,
)
from .model import (
    Classification,
    CutCandidate,
    Disjunction,
    certificate_check,
    term_sigmas,
)

VIOLATION_THRESHOLD = 1e-4
KSTAR_TOL = 1e-7


class NormKind(str, enum.Enum):
    ALPHA = "alpha"
    POLAR = "polar"
    STANDARD = "standard"
    TRIVIAL = "trivial"
    UNIFORM = "uniform"


@dataclass(frozen=True)
class Normalization:
    kind: NormKind
    gamma: np.ndarray | None = None
    rho: np.ndarray | None = None
    sigma: tuple[np.ndarray, ...] | None = None

    @classmethod
    def parse(cls, name: str) -> "Normalization":
        try:
            return cls(NormKind(name.lower()))
        except ValueError:
            raise ValueError(f"unknown normalization {name!r}; choose from "
                             f"{', '.join(k.value for k in NormKind)}") from None

    @classmethod
    def alpha(cls) -> "Normalization":
        return cls(NormKind.ALPHA)

    @classmethod
    def polar(cls, gamma: np.ndarray | None = None) -> "Normalization":
        return cls(NormKind.POLAR, gamma=None if gamma is None else np.asarray(gamma, float))

    @classmethod
    def standard(cls, rho=None, sigma=None) -> "Normalization":
        return cls(NormKind.STANDARD, rho=rho, sigma=sigma)

    @classmethod
    def trivial(cls, sigma=None) -> "Normalization":
        return cls(NormKind.TRIVIAL, sigma=sigma)

    @classmethod
    def uniform(cls, rho=None) -> "Normalization":
        return cls(NormKind.UNIFORM, rho=rho)

    @property
    def name(self) -> str:
        return self.kind.value

    def rho_for(self, K: ConeProduct) -> np.ndarray:
        return default_interior_point(K) if self.rho is None else np.asarray(self.rho, float)

    def resolve_gamma(self, problem, xbar: np.ndarray, center: np.ndarray | None = None) -> np.ndarray:
        if self.gamma is not None:
            return np.asarray(self.gamma, float)
        if center is None:
            center = analytic_center(problem)
        return center - xbar


class PolarUnavailable(RuntimeError):
    """No interior point is available to define the polar normalization."""


# -- program assembly helper ---------------------------------------------------

class _Builder:
    """Accumulates variable blocks (with cones) and sparse constraint rows."""

    def __init__(self) -> None:
        self.cones: list[Cone] = []
        self.n = 0
        self.groups: dict[str, np.ndarray] = {}
        self.eq: list[tuple[list, list, list, list]] = []
        self.eq_count = 0
        self.eq_rows: list[tuple[np.ndarray, np.ndarray, np.ndarray]] = []
        self.le_rows: list[tuple[np.ndarray, np.ndarray, np.ndarray]] = []
        self.eq_rhs: list[np.ndarray] = []
        self.le_rhs: list[np.ndarray] = []
        self.neq = 0
        self.nle = 0
        self.c: dict[int, float] = {}

    def add(self, name: str, cones: Sequence[Cone]) -> np.ndarray:
        start = self.n
        for cn in cones:
            self.cones.append(cn)
            self.n += cn.dim
        idx = np.arange(start, self.n)
        self.groups[name] = idx
        return idx

    def _rows(self, nrows: int, terms: Sequence[tuple[np.ndarray, Any]]):
        rr, cc, vv = [], [], []
        for cols, mat in terms:
            M = sp.coo_matrix(sp.csr_matrix(mat).reshape(nrows, len(cols)) if sp.issparse(mat)
                              else np.asarray(mat, dtype=float).reshape(nrows, len(cols)))
            rr.append(M.row)
            cc.append(np.asarray(cols)[M.col])
            vv.append(M.data)
        if not rr:
            return np.zeros(0, int), np.zeros(0, int), np.zeros(0)
        return np.concatenate(rr), np.concatenate(cc), np.concatenate(vv)

    def add_eq(self, nrows: int, terms, rhs) -> None:
        if nrows == 0:
            return
        r, c, v = self._rows(nrows, terms)
        self.eq_rows.append((r + self.neq, c, v))
        self.eq_rhs.append(np.broadcast_to(np.asarray(rhs, float), (nrows,)).copy())
        self.neq += nrows

    def add_le(self, nrows: int, terms, rhs) -> None:
        r, c, v = self._rows(nrows, terms)
        self.le_rows.append((r + self.nle, c, v))
        self.le_rhs.append(np.broadcast_to(np.asarray(rhs, float), (nrows,)).copy())
        self.nle += nrows

    def objective(self, cols: np.ndarray, coefs) -> None:
        for j, v in zip(np.asarray(cols), np.broadcast_to(np.asarray(coefs, float), (len(cols),))):
            self.c[int(j)] = self.c.get(int(j), 0.0) + float(v)

    def _matrix(self, rows, count):
        if not rows:
            return sp.csr_matrix((count, self.n))
        r = np.concatenate([x[0] for x in rows])
        c = np.concatenate([x[1] for x in rows])
        v = np.concatenate([x[2] for x in rows])
        return sp.csr_matrix((v, (r, c)), shape=(count, self.n))

    def build(self) -> ConicProgram:
        c = np.zeros(self.n)
        for j, v in self.c.items():
            c[j] = v
        A = self._matrix(self.eq_rows, self.neq)
        b = np.concatenate(self.eq_rhs) if self.eq_rhs else np.zeros(0)
        G = self._matrix(self.le_rows, self.nle) if self.nle else None
        h = np.concatenate(self.le_rhs) if self.nle else None
        return ConicProgram(c, A, b, ConeProduct(self.cones), G, h)


def _dual_blocks(K: ConeProduct) -> tuple[list[Cone], np.ndarray]:
    """Non-free blocks of ``K`` (all self-dual) and their coordinates."""
    cones, idx = [], []
    for cone, sl in K.slices():
        if cone.kind is ConeKind.FREE:
            continue
        if cone.kind is ConeKind.RSOC:
            raise ValueError("rotated cones must be rewritten before building programs")
        cones.append(cone)
        idx.extend(range(sl.start, sl.stop))
    return cones, np.asarray(idx, dtype=int)


@dataclass
class CgcpLayout:
    """Where each multiplier lives inside the assembled program."""

    program: ConicProgram
    compact: bool
    n: int
    m: int
    lam_idx: np.ndarray  # coordinates of K carrying lambda
    groups: dict[str, np.ndarray]
    v_idx: list[np.ndarray] = field(default_factory=list)  # per term, rows of Q_h carrying v
    normalization: str = ""


# -- cut-generating program ---------------------------------------------------

def _norm_row_sigma(norm: Normalization, disjunction: Disjunction) -> list[np.ndarray]:
    return term_sigmas(disjunction, norm.sigma)


def build_cgcp(problem, disjunction: Disjunction, xbar: np.ndarray, normalization: Normalization,
               gamma: np.ndarray | None = None) -> CgcpLayout:
    xbar = np.asarray(xbar, dtype=float)
    if disjunction.is_split and disjunction.H == 2:
        return _build_compact(problem, disjunction, xbar, normalization, gamma)
    return _build_general(problem, disjunction, xbar, normalization, gamma)


def _build_compact(problem, disj: Disjunction, xbar, norm: Normalization, gamma) -> CgcpLayout:
    n, m = problem.n, problem.m
    pi, pi0 = disj.pi, disj.pi0
    At = problem.A.T.tocsr()
    kcones, kidx = _dual_blocks(problem.K)
    E = sp.csr_matrix((np.ones(kidx.size), (kidx, np.arange(kidx.size))), shape=(n, kidx.size))
    bld = _Builder()
    u2 = bld.add("u2", [Cone(ConeKind.FREE, m)]) if m else np.zeros(0, int)
    lam1 = bld.add("lam1", kcones)
    lam2 = bld.add("lam2", kcones)
    mult = bld.add("v_t", [Cone(ConeKind.NONNEG, 4)])
    v1, v2, t1, t2 = (mult[k:k + 1] for k in range(4))

    # A'u2 + lam2 - lam1 + (v1 + v2) pi = 0
    pic = pi.reshape(n, 1)
    terms = [(lam2, E), (lam1, -E), (v1, pic), (v2, pic)]
    if m:
        terms.insert(0, (u2, At))
    bld.add_eq(n, terms, 0.0)
    # b'u2 + t1 - t2 + (v1 + v2) pi0 + v2 = 0
    terms = [(t1, [[1.0]]), (t2, [[-1.0]]), (v1, [[pi0]]), (v2, [[pi0 + 1.0]])]
    if m:
        terms.insert(0, (u2, problem.b.reshape(1, m)))
    bld.add_eq(1, terms, 0.0)

    bld.objective(lam1, xbar[kidx])
    bld.objective(v1, -(pi @ xbar - pi0))
    bld.objective(t1, 1.0)

    sig = _norm_row_sigma(norm, disj)
    s1, s2 = float(sig[0][0]), float(sig[1][0])
    kind = norm.kind
    if kind is NormKind.ALPHA:
        w = bld.add("w", [Cone(ConeKind.SOC, n + 1)])
        bld.add_eq(1, [(w[:1], [[1.0]])], 1.0)
        bld.add_eq(n, [(w[1:], sp.eye(n)), (lam1, -E), (v1, pic)], 0.0)
    elif kind is NormKind.POLAR:
        if gamma is None:
            raise PolarUnavailable("polar normalization needs gamma")
        bld.add_le(1, [(lam1, gamma[kidx].reshape(1, -1)), (v1, [[-(gamma @ pi)]])], 1.0)
    else:
        rho = norm.rho_for(problem.K)[kidx].reshape(1, -1)
        terms = []
        if kind in (NormKind.STANDARD, NormKind.UNIFORM):
            terms += [(lam1, rho), (lam2, rho)]
        if kind in (NormKind.STANDARD, NormKind.TRIVIAL):
            terms += [(v1, [[s1]]), (v2, [[s2]])]
        bld.add_le(1, terms, 1.0)
    prog = bld.build()
    return CgcpLayout(prog, True, n, m, kidx, bld.groups, normalization=norm.name)


def _build_general(problem, disj: Disjunction, xbar, norm: Normalization, gamma) -> CgcpLayout:
    n, m = problem.n, problem.m
    At = problem.A.T.tocsr()
    kcones, kidx = _dual_blocks(problem.K)
    E = sp.csr_matrix((np.ones(kidx.size), (kidx, np.arange(kidx.size))), shape=(n, kidx.size))
    bld = _Builder()
    alpha = bld.add("alpha", [Cone(ConeKind.FREE, n)])
    beta = bld.add("beta", [Cone(ConeKind.FREE, 1)])
    sig = _norm_row_sigma(norm, disj)
    rho = norm.rho_for(problem.K)
    norm_terms: list = []
    v_idx = []
    for h, term in enumerate(disj.terms):
        qcones, qidx = _dual_blocks(term.Q)
        v_idx.append(qidx)
        Eq = sp.csr_matrix((np.ones(qidx.size), (qidx, np.arange(qidx.size))), shape=(term.Q.total_dim, qidx.size))
        u = bld.add(f"u{h + 1}", [Cone(ConeKind.FREE, m)]) if (m and h > 0) else np.zeros(0, int)
        lam = bld.add(f"lam{h + 1}", kcones)
        v = bld.add(f"v{h + 1}", qcones) if qcones else np.zeros(0, int)
        t = bld.add(f"t{h + 1}", [Cone(ConeKind.NONNEG, 1)])
        DtE = (term.D.T @ Eq).tocsr()
        terms = [(alpha, sp.eye(n)), (lam, -E)]
        if u.size:
            terms.append((u, -At))
        if v.size:
            terms.append((v, -DtE))
        bld.add_eq(n, terms, 0.0)
        terms = [(beta, [[1.0]]), (t, [[1.0]])]
        if u.size:
            terms.append((u, -problem.b.reshape(1, m)))
        if v.size:
            terms.append((v, -(term.d @ Eq).reshape(1, -1)))
        bld.add_eq(1, terms, 0.0)
        if norm.kind in (NormKind.STANDARD, NormKind.UNIFORM):
            norm_terms.append((lam, rho[kidx].reshape(1, -1)))
        if norm.kind in (NormKind.STANDARD, NormKind.TRIVIAL) and v.size:
            norm_terms.append((v, sig[h][qidx].reshape(1, -1)))
    bld.objective(alpha, xbar)
    bld.objective(beta, -1.0)
    if norm.kind is NormKind.ALPHA:
        w = bld.add("w", [Cone(ConeKind.SOC, n + 1)])
        bld.add_eq(1, [(w[:1], [[1.0]])], 1.0)
        bld.add_eq(n, [(w[1:], sp.eye(n)), (alpha, -sp.eye(n))], 0.0)
    elif norm.kind is NormKind.POLAR:
        if gamma is None:
            raise PolarUnavailable("polar normalization needs gamma")
        bld.add_le(1, [(alpha, gamma.reshape(1, -1))], 1.0)
    else:
        bld.add_le(1, norm_terms, 1.0)
    return CgcpLayout(bld.build(), False, n, m, kidx, bld.groups, v_idx, norm.name)


def reconstruct(layout: CgcpLayout, problem, disj: Disjunction, z: np.ndarray) -> CutCandidate:
    """Recover ``(alpha, beta, u, lam, v)`` from a CGCP point or ray."""
    g = layout.groups
    n, m = layout.n, layout.m

    def lam_full(name):
        out = np.zeros(n)
        out[layout.lam_idx] = z[g[name]]
        return out

    if layout.compact:
        pi, pi0 = disj.pi, disj.pi0
        v1, v2, t1, _ = z[g["v_t"]]
        lam1, lam2 = lam_full("lam1"), lam_full("lam2")
        u2 = z[g["u2"]] if m else np.zeros(0)
        alpha = lam1 - v1 * pi
        beta = -pi0 * v1 - t1
        return CutCandidate(alpha, float(beta), [np.zeros(m), u2], [lam1, lam2],
                            [np.array([v1]), np.array([v2])])
    alpha = z[g["alpha"]].copy()
    beta = float(z[g["beta"]][0])
    us, lams, vs = [], [], []
    for h, term in enumerate(disj.terms):
        key = f"u{h + 1}"
        us.append(z[g[key]] if key in g else np.zeros(m))
        lams.append(lam_full(f"lam{h + 1}"))
        v = np.zeros(term.Q.total_dim)
        if f"v{h + 1}" in g:
            v[layout.v_idx[h]] = z[g[f"v{h + 1}"]]
        vs.append(v)
    return CutCandidate(alpha, beta, us, lams, vs)


# -- membership program -------------------------------------------------------

@dataclass
class McpLayout:
    program: ConicProgram
    groups: dict[str, np.ndarray]


def build_mcp(problem, disjunction: Disjunction, xbar: np.ndarray, normalization: Normalization,
              gamma: np.ndarray | None = None) -> McpLayout:
    """Membership program whose optimum is minus the normalized CGCP optimum."""
    n, m = problem.n, problem.m
    xbar = np.asarray(xbar, dtype=float)
    norm = normalization
    kind = norm.kind
    rho = norm.rho_for(problem.K)
    sig = term_sigmas(disjunction, norm.sigma)
    A = problem.A
    bld = _Builder()
    rho_slack = kind in (NormKind.STANDARD, NormKind.UNIFORM)
    sig_slack = kind in (NormKind.STANDARD, NormKind.TRIVIAL)

    if kind is NormKind.ALPHA:
        r = bld.add("r", [Cone(ConeKind.SOC, n + 1)])  # (dist, xbar - x)
        bld.objective(r[:1], 1.0)
        eta = None
    else:
        eta = bld.add("eta", [Cone(ConeKind.NONNEG, 1)])
        bld.objective(eta, 1.0)

    ys = []
    for h, term in enumerate(disjunction.terms):
        if rho_slack:
            y = bld.add(f"y{h + 1}", [Cone(ConeKind.FREE, n)])
            wk = bld.add(f"w{h + 1}", problem.K.blocks)
            # w = y + eta * rho
            bld.add_eq(n, [(wk, sp.eye(n)), (y, -sp.eye(n)), (eta, -rho.reshape(n, 1))], 0.0)
        else:
            y = bld.add(f"y{h + 1}", problem.K.blocks)
        z = bld.add(f"z{h + 1}", [Cone(ConeKind.NONNEG, 1)])
        k = term.Q.total_dim
        q = bld.add(f"q{h + 1}", term.Q.blocks)
        # q = D y + eta * sigma - z d
        terms = [(q, sp.eye(k)), (y, -term.D), (z, term.d.reshape(k, 1))]
        if sig_slack:
            terms.append((eta, -sig[h].reshape(k, 1)))
        bld.add_eq(k, terms, 0.0)
        if m:
            bld.add_eq(m, [(y, A), (z, -problem.b.reshape(m, 1))], 0.0)
        ys.append((y, z))

    sum_terms = [(y, sp.eye(n)) for y, _ in ys]
    if kind is NormKind.ALPHA:
        # sum y = xbar - (xbar - x) is expressed through the tail of r
        sum_terms.append((r[1:], sp.eye(n)))
    elif kind is NormKind.POLAR:
        if gamma is None:
            raise PolarUnavailable("polar normalization needs gamma")
        sum_terms.append((eta, -np.asarray(gamma, float).reshape(n, 1)))
    bld.add_eq(n, sum_terms, xbar)
    bld.add_eq(1, [(z, [[1.0]]) for _, z in ys], 1.0)
    return McpLayout(bld.build(), bld.groups)


# -- K* cuts ------------------------------------------------------------------

def disaggregate_kstar(lam: np.ndarray, K: ConeProduct, tol: float = 0.0, normalization: str = "",
                       xbar: np.ndarray | None = None) -> list[CutCandidate]:
    """One ``lam_i' x_i >= 0`` per irreducible block where ``lam_i`` is nonzero."""
    lam = project(K, np.asarray(lam, dtype=float), dual=True)
    out = []
    for cone, idx in irreducible_pieces(K):
        piece = lam[idx]
        if np.max(np.abs(piece), initial=0.0) <= tol:
            continue
        alpha = np.zeros_like(lam)
        alpha[idx] = piece
        viol = float(alpha @ xbar) if xbar is not None else float("nan")
        out.append(CutCandidate(alpha, 0.0, [], [alpha.copy()], [], viol, Classification.KSTAR,
                                normalization, {"source": "kstar"}))
    return out


def _support_dual(cone: Cone, xi: np.ndarray, rho: np.ndarray, scale: float) -> np.ndarray:
    """Dual-cone vector orthogonal to a boundary point ``xi``, with ``rho'lam = scale``."""
    if cone.kind is ConeKind.RSOC:
        lam = _support_dual(Cone(ConeKind.SOC, cone.dim), rsoc_to_soc(xi), rsoc_to_soc(rho), scale)
        return soc_to_rsoc(lam)
    if cone.kind in (ConeKind.NONNEG, ConeKind.NONPOS):
        return np.array([scale / rho[0]])
    lam = np.empty_like(xi)
    lam[0], lam[1:] = xi[0], -xi[1:]
    if np.linalg.norm(lam) <= 1e-14 * (1.0 + np.linalg.norm(rho)):
        lam = np.zeros_like(xi)
        lam[0] = 1.0
    return lam * (scale / float(rho @ lam))


def kstar_shortcut(problem, disjunction: Disjunction, xbar: np.ndarray, rho: np.ndarray | None = None,
                   sigma: Sequence[np.ndarray] | None = None) -> CutCandidate | None:
    """Closed-form optimum of the standard-normalized program when it is a K* cut."""
    xbar = np.asarray(xbar, dtype=float)
    K = problem.K
    rho = default_interior_point(K) if rho is None else np.asarray(rho, float)
    sig = term_sigmas(disjunction, sigma)
    H = disjunction.H
    eta = eta_bar(K, xbar, rho)
    if eta <= 0.0:
        return None
    # the averaged point x/H with slack eta/H is MCP-feasible only when eta covers every tau
    for term, s in zip(disjunction.terms, sig):
        if eta < tau_bar(term.D, term.d, term.Q, s, xbar):
            return None
    # the block attaining eta defines lam
    best, best_piece = -1.0, None
    for cone, idx in irreducible_pieces(K):
        if cone.kind is ConeKind.FREE:
            continue
        step = min_step(ConeProduct([cone]), xbar[idx], rho[idx])
        if step > best:
            best, best_piece = step, (cone, idx)
    cone, idx = best_piece
    xi = xbar[idx] + eta * rho[idx]
    lam = np.zeros_like(xbar)
    lam[idx] = _support_dual(cone, xi, rho[idx], 1.0 / H)
    m = problem.m
    cut = CutCandidate(lam.copy(), 0.0, [np.zeros(m)] * H, [lam.copy()] * H,
                       [np.zeros(t.Q.total_dim) for t in disjunction.terms],
                       float(lam @ xbar), Classification.KSTAR, NormKind.STANDARD.value,
                       {"source": "shortcut", "eta_bar": eta})
    return cut


# -- separation driver --------------------------------------------------------

@dataclass
class SeparationConfig:
    violation_threshold: float = VIOLATION_THRESHOLD
    kstar_tol: float = KSTAR_TOL
    use_shortcut: bool = False
    solve_options: SolveOptions = field(default_factory=SolveOptions)
    center: np.ndarray | None = None  # analytic center for the polar normalization


@dataclass
class SeparationOutcome:
    cut: CutCandidate | None
    cgcp_obj: float
    status: str
    disaggregated_kstar: list[CutCandidate] = field(default_factory=list)
    shortcut_used: bool = False
    solve: SolveResult | None = None
    layout: CgcpLayout | None = None

    @property
    def classification(self) -> Classification:
        return self.cut.classification if self.cut is not None else Classification.NONE


def _max_v(cut: CutCandidate) -> float:
    return max((float(np.max(np.abs(v), initial=0.0)) for v in cut.v), default=0.0)


def separate(problem, disjunction: Disjunction, xbar: np.ndarray, normalization: Normalization,
             config: SeparationConfig | None = None) -> SeparationOutcome:
    cfg = config or SeparationConfig()
    xbar = np.asarray(xbar, dtype=float)
    if cfg.use_shortcut and normalization.kind is NormKind.STANDARD:
        sc = kstar_shortcut(problem, disjunction, xbar, normalization.rho, normalization.sigma)
        if sc is not None and sc.violation <= -cfg.violation_threshold:
            dis = disaggregate_kstar(sc.alpha, problem.K, normalization=normalization.name, xbar=xbar)
            return SeparationOutcome(sc, sc.violation, "Shortcut", dis, True)

    gamma = None
    if normalization.kind is NormKind.POLAR:
        try:
            gamma = normalization.resolve_gamma(problem, xbar, cfg.center)
        except AnalyticCenterError:
            return SeparationOutcome(None, float("nan"), "PolarUnavailable")
    layout = build_cgcp(problem, disjunction, xbar, normalization, gamma)
    res = solve(layout.program, cfg.solve_options)
    out = SeparationOutcome(None, float("nan"), res.status.value, solve=res, layout=layout)

    if res.status is SolveStatus.OPTIMAL:
        cut = reconstruct(layout, problem, disjunction, res.x)
        out.cgcp_obj = res.obj
    elif res.status is SolveStatus.DUAL_INFEASIBLE:
        cut = reconstruct(layout, problem, disjunction, res.x)
        size = float(np.linalg.norm(cut.alpha))
        if size <= 0.0:
            return out
        _scale_cut(cut, 1.0 / size)
        cut.meta["ray"] = True
        out.cgcp_obj = cut.evaluate(xbar)
    elif res.status in (SolveStatus.STALLED, SolveStatus.ITER_LIMIT):
        cut = reconstruct(layout, problem, disjunction, res.x)
        out.cgcp_obj = cut.evaluate(xbar)
        if not certificate_check(problem, disjunction, cut):
            return out
        cut.meta["harvested"] = True
    else:
        return out

    cut.violation = cut.evaluate(xbar)
    cut.normalization = normalization.name
    if disjunction.split is not None:
        cut.meta["split"] = list(disjunction.split)
    if cut.violation > -cfg.violation_threshold:
        return out
    if _max_v(cut) <= cfg.kstar_tol:
        cut.classification = Classification.KSTAR
        out.disaggregated_kstar = disaggregate_kstar(cut.lam[0], problem.K, normalization=normalization.name,
                                                     xbar=xbar)
    else:
        cut.classification = Classification.LIFT_AND_PROJECT
    out.cut = cut
    return out


def _scale_cut(cut: CutCandidate, s: float) -> None:
    cut.alpha = cut.alpha * s
    cut.beta = cut.beta * s
    cut.u = [u * s for u in cut.u]
    cut.lam = [l * s for l in cut.lam]
    cut.v = [v * s for v in cut.v]


def solve_mcp(problem, disjunction, xbar, normalization, gamma=None, options=None) -> SolveResult:
    layout = build_mcp(problem, disjunction, xbar, normalization, gamma)
    return solve(layout.program, options)


def solve_cgcp(problem, disjunction, xbar, normalization, gamma=None, options=None) -> tuple[SolveResult, CgcpLayout]:
    layout = build_cgcp(problem, disjunction, xbar, normalization, gamma)
    return solve(layout.program, options), layout
