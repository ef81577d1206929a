"""Solver adapter for continuous conic programs.

This is the only module that talks to an external optimizer.  Programs are
stated as::

    min  c'x   s.t.  A x = b,  G x <= h,  x in K

with ``K`` a product of free, orthant and second-order cones.  The dual used
throughout is::

    max  b'y - h'w   s.t.  c - A'y + G'w = s,  s in K*,  w >= 0

Backends: ``clarabel`` (default), ``scs`` (optional) and ``highs`` (through
scipy, polyhedral programs only).  The ``CONICLAP_BACKEND`` environment
variable overrides the default.
"""

from __future__ import annotations

import enum
import os
import warnings
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import scipy.sparse as sp

from .cones import Cone, ConeKind, ConeProduct, dual_membership, in_cone

BACKEND_ENV = "CONICLAP_BACKEND"


class SolveStatus(str, enum.Enum):
    OPTIMAL = "Optimal"
    PRIMAL_INFEASIBLE = "PrimalInfeasible"
    DUAL_INFEASIBLE = "DualInfeasible"
    STALLED = "Stalled"
    ITER_LIMIT = "IterLimit"
    FAILED = "Failed"


class SolverBackendError(RuntimeError):
    """The requested backend is missing or crashed."""


class AnalyticCenterError(RuntimeError):
    pass


class WeaklyFeasibleWarning(UserWarning):
    pass


@dataclass(frozen=True)
class ConicProgram:
    c: np.ndarray
    A: sp.csr_matrix
    b: np.ndarray
    cones: ConeProduct
    G: sp.csr_matrix | None = None
    h: np.ndarray | None = None
    warm_start: np.ndarray | None = None

    def __post_init__(self) -> None:
        c = np.asarray(self.c, dtype=float).ravel()
        n = c.shape[0]
        A = sp.csr_matrix(self.A, dtype=float)
        if A.shape[0] == 0:
            A = sp.csr_matrix((0, n))
        b = np.asarray(self.b, dtype=float).ravel()
        if A.shape != (b.shape[0], n):
            raise ValueError(f"A has shape {A.shape}, expected ({b.shape[0]}, {n})")
        if self.cones.total_dim != n:
            raise ValueError(f"cones cover {self.cones.total_dim} variables, program has {n}")
        if any(cn.kind is ConeKind.RSOC for cn in self.cones.blocks):
            raise ValueError("rotated cones must be rewritten before solving")
        G, h = self.G, self.h
        if G is None:
            G, h = sp.csr_matrix((0, n)), np.zeros(0)
        else:
            G = sp.csr_matrix(G, dtype=float)
            h = np.asarray(h, dtype=float).ravel()
            if G.shape != (h.shape[0], n):
                raise ValueError(f"G has shape {G.shape}, expected ({h.shape[0]}, {n})")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "h", h)

    @property
    def n(self) -> int:
        return self.c.shape[0]

    @property
    def m(self) -> int:
        return self.b.shape[0]

    @property
    def p(self) -> int:
        return self.h.shape[0]

    @property
    def polyhedral(self) -> bool:
        return all(cn.is_polyhedral for cn in self.cones.blocks)


@dataclass(frozen=True)
class FarkasCertificate:
    """``s = G'w - A'y`` in ``K*``, ``w >= 0`` and ``b'y - h'w = 1``."""

    y: np.ndarray
    w: np.ndarray
    s: np.ndarray


@dataclass(frozen=True)
class UnboundedRay:
    """``A r = 0``, ``G r <= 0``, ``r`` in ``K`` and ``c'r = -1``."""

    r: np.ndarray


@dataclass
class SolveOptions:
    max_iter: int = 200
    tol_feas: float = 1e-8
    tol_gap: float = 1e-8
    time_limit: float | None = None
    backend: str | None = None
    verbose: bool = False


@dataclass
class SolveResult:
    status: SolveStatus
    x: np.ndarray
    y: np.ndarray
    w: np.ndarray
    s: np.ndarray
    obj: float
    dual_obj: float
    iterations: int
    certificate: FarkasCertificate | UnboundedRay | None = None
    backend: str = ""
    raw_status: str = ""
    info: dict[str, Any] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status is SolveStatus.OPTIMAL


# -- residual checks ----------------------------------------------------------

def primal_residual(prog: ConicProgram, x: np.ndarray) -> float:
    """Largest violation of the equality, inequality and cone constraints."""
    r = 0.0
    if prog.m:
        r = float(np.max(np.abs(prog.A @ x - prog.b)))
    if prog.p:
        r = max(r, float(np.max(prog.G @ x - prog.h, initial=0.0)))
    proj_gap = 0.0
    for cone, sl in prog.cones.slices():
        xb = x[sl]
        k = cone.kind
        if k is ConeKind.NONNEG:
            proj_gap = max(proj_gap, -float(np.min(xb)))
        elif k is ConeKind.NONPOS:
            proj_gap = max(proj_gap, float(np.max(xb)))
        elif k is ConeKind.SOC:
            proj_gap = max(proj_gap, float(np.linalg.norm(xb[1:]) - xb[0]))
    return max(r, proj_gap)


def _scale(prog: ConicProgram) -> float:
    nb = float(np.max(np.abs(prog.b), initial=0.0))
    nh = float(np.max(np.abs(prog.h), initial=0.0))
    return 1.0 + max(nb, nh)


def verify_farkas(prog: ConicProgram, cert: FarkasCertificate, tol: float = 1e-7) -> bool:
    y, w = cert.y, cert.w
    size = float(np.linalg.norm(np.concatenate([y, w]))) if (y.size + w.size) else 0.0
    if size == 0.0:
        return False
    s = prog.G.T @ w - prog.A.T @ y
    if w.size and float(np.min(w)) < -tol * size:
        return False
    if float(prog.b @ y - prog.h @ w) < 1e-9:
        return False
    return dual_membership(prog.cones, np.asarray(s).ravel(), tol * size)


def verify_ray(prog: ConicProgram, ray: UnboundedRay, tol: float = 1e-7) -> bool:
    r = ray.r
    size = float(np.linalg.norm(r))
    if size == 0.0 or float(prog.c @ r) >= 0.0:
        return False
    if prog.m and float(np.max(np.abs(prog.A @ r))) > tol * size:
        return False
    if prog.p and float(np.max(prog.G @ r, initial=0.0)) > tol * size:
        return False
    return in_cone(prog.cones, r, tol)


# -- assembly shared by the conic backends ------------------------------------

@dataclass
class _Assembled:
    Ac: sp.csc_matrix
    bc: np.ndarray
    sign: np.ndarray  # per cone-row sign on the selected variable
    cone_rows: np.ndarray  # variable index of every cone row
    zero: int
    nonneg: int
    socs: list[int]


def _assemble(prog: ConicProgram) -> _Assembled:
    """Stack ``[A; G; S] x + s = [b; h; 0]`` with ``s`` in Zero x R+ x R+ x SOC..."""
    lin_idx, lin_sign, soc_blocks = [], [], []
    for cone, sl in prog.cones.slices():
        if cone.kind is ConeKind.NONNEG:
            lin_idx.extend(range(sl.start, sl.stop))
            lin_sign.extend([-1.0] * cone.dim)
        elif cone.kind is ConeKind.NONPOS:
            lin_idx.extend(range(sl.start, sl.stop))
            lin_sign.extend([1.0] * cone.dim)
        elif cone.kind is ConeKind.SOC:
            soc_blocks.append(sl)
    soc_idx = [i for sl in soc_blocks for i in range(sl.start, sl.stop)]
    rows = np.array(lin_idx + soc_idx, dtype=int)
    sign = np.array(lin_sign + [-1.0] * len(soc_idx))
    S = sp.csr_matrix((sign, (np.arange(rows.size), rows)), shape=(rows.size, prog.n))
    Ac = sp.vstack([prog.A, prog.G, S], format="csc")
    bc = np.concatenate([prog.b, prog.h, np.zeros(rows.size)])
    return _Assembled(Ac, bc, sign, rows, prog.m, prog.p + len(lin_idx),
                      [sl.stop - sl.start for sl in soc_blocks])


def _split_dual(prog: ConicProgram, asm: _Assembled, z: np.ndarray):
    m, p = prog.m, prog.p
    y = -z[:m]
    w = z[m:m + p].copy()
    s = np.zeros(prog.n)
    np.add.at(s, asm.cone_rows, -asm.sign * z[m + p:])
    return y, w, s


def _classify(prog: ConicProgram, x, y, w, s, raw: str, iters: int, backend: str,
              opts: SolveOptions, kind: str) -> SolveResult:
    """Turn backend output into a SolveResult with verified status."""
    nan = float("nan")
    obj = float(prog.c @ x) if x is not None else nan
    dual = float(prog.b @ y - prog.h @ w) if y is not None else nan
    x = np.zeros(prog.n) if x is None else np.asarray(x, dtype=float)
    y = np.zeros(prog.m) if y is None else y
    w = np.zeros(prog.p) if w is None else w
    s = np.zeros(prog.n) if s is None else s
    res = SolveResult(SolveStatus.FAILED, x, y, w, s, obj, dual, iters, backend=backend, raw_status=raw)
    if kind == "infeasible":
        t = float(prog.b @ y - prog.h @ w)
        if t > 0:
            cert = FarkasCertificate(y / t, w / t, (prog.G.T @ w - prog.A.T @ y) / t)
            if verify_farkas(prog, cert):
                res.status = SolveStatus.PRIMAL_INFEASIBLE
                res.certificate = cert
                res.obj = float("inf")
        return res
    if kind == "unbounded":
        t = -float(prog.c @ x)
        if t > 0:
            ray = UnboundedRay(x / t)
            if verify_ray(prog, ray):
                res.status = SolveStatus.DUAL_INFEASIBLE
                res.certificate = ray
                res.x = ray.r
                res.obj = float("-inf")
        return res
    pres = primal_residual(prog, x)
    if kind == "solved":
        gap = abs(obj - dual)
        if pres <= 1e-7 * _scale(prog) and gap <= 1e-7 * (1.0 + abs(obj) + abs(dual)):
            res.status = SolveStatus.OPTIMAL
            return res
    if kind == "iterlimit":
        res.status = SolveStatus.ITER_LIMIT
    elif pres <= 1e-6 * (_scale(prog) + float(np.max(np.abs(x), initial=0.0))):
        res.status = SolveStatus.STALLED
    res.info["primal_residual"] = pres
    return res


# settings tried in turn while the solver reports insufficient progress
CLARABEL_RETRIES = ({}, {"static_regularization_constant": 1e-7}, {"equilibrate_enable": False})


def _solve_clarabel(prog: ConicProgram, opts: SolveOptions) -> SolveResult:
    try:
        import clarabel
    except ImportError as exc:  # pragma: no cover - dependency is declared
        raise SolverBackendError("clarabel is not installed") from exc
    asm = _assemble(prog)
    cones = []
    if asm.zero:
        cones.append(clarabel.ZeroConeT(asm.zero))
    if asm.nonneg:
        cones.append(clarabel.NonnegativeConeT(asm.nonneg))
    cones.extend(clarabel.SecondOrderConeT(d) for d in asm.socs)
    P = sp.csc_matrix((prog.n, prog.n))
    retries = 0
    for extra in CLARABEL_RETRIES:
        st = clarabel.DefaultSettings()
        st.verbose = opts.verbose
        st.max_iter = opts.max_iter
        st.tol_feas = opts.tol_feas
        st.tol_gap_abs = opts.tol_gap
        st.tol_gap_rel = opts.tol_gap
        if opts.time_limit is not None:
            st.time_limit = float(opts.time_limit)
        for key, val in extra.items():
            setattr(st, key, val)
        try:
            sol = clarabel.DefaultSolver(P, prog.c, asm.Ac, asm.bc, cones, st).solve()
        except Exception as exc:  # noqa: BLE001 - backend errors are opaque
            raise SolverBackendError(f"clarabel failed: {exc}") from exc
        raw = str(sol.status)
        if raw != "InsufficientProgress":
            break
        retries += 1
    x = np.asarray(sol.x, dtype=float)
    z = np.asarray(sol.z, dtype=float)
    y, w, s = _split_dual(prog, asm, z)
    kind = {
        "Solved": "solved", "AlmostSolved": "solved",
        "PrimalInfeasible": "infeasible", "AlmostPrimalInfeasible": "infeasible",
        "DualInfeasible": "unbounded", "AlmostDualInfeasible": "unbounded",
        "MaxIterations": "iterlimit", "MaxTime": "iterlimit",
    }.get(raw, "other")
    res = _classify(prog, x, y, w, s, raw, int(sol.iterations), "clarabel", opts, kind)
    res.info["retries"] = retries
    return res


def _solve_scs(prog: ConicProgram, opts: SolveOptions) -> SolveResult:
    try:
        import scs
    except ImportError as exc:
        raise SolverBackendError("scs backend requested but scs is not installed") from exc
    asm = _assemble(prog)
    data = {"A": asm.Ac, "b": asm.bc, "c": prog.c}
    cone = {"z": asm.zero, "l": asm.nonneg, "q": asm.socs}
    kw = dict(verbose=opts.verbose, max_iters=max(opts.max_iter, 20000),
              eps_abs=opts.tol_feas, eps_rel=opts.tol_gap)
    try:
        sol = scs.SCS(data, cone, **kw).solve()
    except Exception as exc:  # noqa: BLE001
        raise SolverBackendError(f"scs failed: {exc}") from exc
    raw = sol["info"]["status"]
    x = np.asarray(sol["x"], dtype=float)
    y, w, s = _split_dual(prog, asm, np.asarray(sol["y"], dtype=float))
    kind = {
        "solved": "solved", "solved_inaccurate": "solved",
        "infeasible": "infeasible", "infeasible_inaccurate": "infeasible",
        "unbounded": "unbounded", "unbounded_inaccurate": "unbounded",
    }.get(raw, "other")
    return _classify(prog, x, y, w, s, raw, int(sol["info"]["iter"]), "scs", opts, kind)


def _solve_highs(prog: ConicProgram, opts: SolveOptions) -> SolveResult:
    from scipy.optimize import linprog

    if not prog.polyhedral:
        raise ValueError("the highs backend only handles polyhedral programs")
    bounds = []
    for kind in prog.cones.kind_of():
        bounds.append({ConeKind.FREE: (None, None), ConeKind.NONNEG: (0, None),
                       ConeKind.NONPOS: (None, 0)}[kind])
    lp_opts: dict[str, Any] = {"presolve": True}
    if opts.time_limit is not None:
        lp_opts["time_limit"] = float(opts.time_limit)
    res = linprog(prog.c,
                  A_ub=prog.G if prog.p else None, b_ub=prog.h if prog.p else None,
                  A_eq=prog.A if prog.m else None, b_eq=prog.b if prog.m else None,
                  bounds=bounds, method="highs", options=lp_opts)
    if res.status in (2, 3):
        # certificates come from the conic backend
        out = _solve_clarabel(prog, opts)
        out.info["lp_status"] = res.status
        return out
    if res.status != 0:
        kind = "iterlimit" if res.status == 1 else "other"
        x = res.x if res.x is not None else None
        return _classify(prog, x, None, None, None, res.message, int(res.nit), "highs", opts, kind)
    x = np.asarray(res.x, dtype=float)
    y = np.asarray(res.eqlin.marginals, dtype=float) if prog.m else np.zeros(0)
    w = -np.asarray(res.ineqlin.marginals, dtype=float) if prog.p else np.zeros(0)
    s = prog.c - prog.A.T @ y + prog.G.T @ w
    return _classify(prog, x, y, w, np.asarray(s).ravel(), res.message, int(res.nit),
                     "highs", opts, "solved")


_BACKENDS = {"clarabel": _solve_clarabel, "scs": _solve_scs, "highs": _solve_highs}


def resolve_backend(name: str | None) -> str:
    name = (name or os.environ.get(BACKEND_ENV) or "clarabel").lower()
    if name not in _BACKENDS:
        raise SolverBackendError(f"unknown backend {name!r}; choose from {sorted(_BACKENDS)}")
    return name


def solve(prog: ConicProgram, options: SolveOptions | None = None) -> SolveResult:
    opts = options or SolveOptions()
    backend = resolve_backend(opts.backend)
    if backend == "highs" and not prog.polyhedral:
        backend = "clarabel"
    return _BACKENDS[backend](prog, opts)


def solve_lp(prog: ConicProgram, options: SolveOptions | None = None) -> SolveResult:
    """Polyhedral programs go to HiGHS, which returns vertex solutions."""
    opts = options or SolveOptions()
    if prog.polyhedral:
        return _solve_highs(prog, opts)
    return solve(prog, opts)


def analytic_center(problem, options: SolveOptions | None = None, margin: float = 1e-7) -> np.ndarray:
    """Interior point of ``{Ax = b, x in K}`` found with a zero objective.

    Second-order blocks must be strictly interior; orthant coordinates on the
    boundary only raise a :class:`WeaklyFeasibleWarning`.
    """
    prog = ConicProgram(np.zeros(problem.K.total_dim), problem.A, problem.b, problem.K)
    opts = options or SolveOptions()
    if resolve_backend(opts.backend) == "highs":
        opts = SolveOptions(**{**opts.__dict__, "backend": "clarabel"})
    res = solve(prog, opts)
    if res.status not in (SolveStatus.OPTIMAL, SolveStatus.STALLED):
        raise AnalyticCenterError(f"relaxation has no interior point ({res.status.value})")
    x = res.x
    weak = False
    for cone, sl in problem.K.slices():
        xb = x[sl]
        if cone.kind is ConeKind.SOC:
            if xb[0] - np.linalg.norm(xb[1:]) <= margin:
                raise AnalyticCenterError("relaxation is only weakly feasible")
        elif cone.kind is ConeKind.NONNEG and np.min(xb) <= margin:
            weak = True
        elif cone.kind is ConeKind.NONPOS and np.max(xb) >= -margin:
            weak = True
    if weak:
        warnings.warn("center lies on the boundary of an orthant block", WeaklyFeasibleWarning,
                      stacklevel=2)
    return x


def cone_rows_program(c, A, b, cones: list[Cone] | ConeProduct, G=None, h=None) -> ConicProgram:
    """Small convenience constructor used by tests and builders."""
    K = cones if isinstance(cones, ConeProduct) else ConeProduct(cones)
    return ConicProgram(np.asarray(c, dtype=float), sp.csr_matrix(A), np.asarray(b, dtype=float), K,
                        None if G is None else sp.csr_matrix(G),
                        None if h is None else np.asarray(h, dtype=float))
