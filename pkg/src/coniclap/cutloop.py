"""Root-node cutting-plane loop: relaxation, outer-approximation refinement, separation rounds."""

from __future__ import annotations

import csv
import enum
import io
import time
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .cones import Cone, ConeKind, ConeProduct, dual_membership, eta_bar, separating_dual
from .conicsolve import (AnalyticCenterError, ConicProgram, SolveOptions, SolveResult, SolveStatus,
                         analytic_center, solve, solve_lp)
from .instance_io import StandardProblem
from .liftstrength import separate_lifted, strengthen, strengthened_disjunction
from .model import (Classification, CutCandidate, INTEGRALITY_TOL, certificate_check, clean,
                    elementary_split)
from .separation import NormKind, Normalization, SeparationConfig, VIOLATION_THRESHOLD, separate

DEDUP_TOL = 1e-9


class RelaxationMode(str, enum.Enum):
    OUTER_APPROX = "OuterApprox"
    CONIC = "Conic"


class LoopError(RuntimeError):
    """Instance-level failure inside the loop, tagged with the round it happened in."""

    def __init__(self, message: str, round_index: int) -> None:
        super().__init__(f"round {round_index}: {message}")
        self.round_index = round_index


@dataclass
class LoopConfig:
    normalization: str = "standard"
    max_rounds: int = 200
    eps_K: float = 0.05
    refine_cap: int = 50
    violation_threshold: float = VIOLATION_THRESHOLD
    clean_x: float = 1e-7
    clean_alpha: float = 1e-7
    clean_beta: float = 1e-8
    relaxation_mode: RelaxationMode = RelaxationMode.OUTER_APPROX
    z_micp: float | None = None
    time_limit: float | None = None
    strengthen: bool = True
    lifting: bool = False
    solve_options: SolveOptions = field(default_factory=SolveOptions)

    def __post_init__(self) -> None:
        self.relaxation_mode = RelaxationMode(self.relaxation_mode)
        Normalization.parse(self.normalization)
        for name in ("eps_K", "violation_threshold", "clean_x", "clean_alpha", "clean_beta"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.eps_K <= self.clean_x:
            raise ValueError("eps_K must exceed clean_x")
        if self.max_rounds < 0 or self.refine_cap < 0:
            raise ValueError("max_rounds and refine_cap must be nonnegative")
        if self.time_limit is not None and self.time_limit < 0:
            raise ValueError("time_limit must be nonnegative")


@dataclass
class RoundStats:
    round: int
    kstar: int
    landp: int
    density_pct: float
    gap_pct: float | None
    bound: float
    seconds: float
    refine_iterations: int = 0
    refine_capped: bool = False

    def to_json(self) -> dict:
        return {"round": self.round, "kstar": self.kstar, "landp": self.landp,
                "density_pct": self.density_pct, "gap_pct": self.gap_pct, "bound": self.bound,
                "seconds": self.seconds, "refine_iterations": self.refine_iterations,
                "refine_capped": self.refine_capped}


@dataclass
class LoopState:
    problem: StandardProblem
    cuts: list[CutCandidate] = field(default_factory=list)
    xbar: np.ndarray | None = None
    z_cp: float = float("nan")
    z_star: float = float("nan")
    rounds: list[RoundStats] = field(default_factory=list)
    center: np.ndarray | None = None
    _keys: list[np.ndarray] = field(default_factory=list)

    def add(self, cut: CutCandidate) -> bool:
        """Append unless a stored cut matches after scaling to unit max-norm."""
        scale = float(np.max(np.abs(cut.alpha), initial=0.0))
        if scale == 0.0:
            return False
        key = np.concatenate([cut.alpha, [cut.beta]]) / scale
        for other in self._keys:
            if np.max(np.abs(other - key)) <= DEDUP_TOL:
                return False
        self._keys.append(key)
        self.cuts.append(cut)
        return True

    def rows(self) -> tuple[sp.csr_matrix, np.ndarray]:
        """Stored cuts as ``G x <= h`` (that is ``-alpha'x <= -beta``)."""
        n = self.problem.n
        if not self.cuts:
            return sp.csr_matrix((0, n)), np.zeros(0)
        G = sp.csr_matrix(np.array([-c.alpha for c in self.cuts]))
        h = np.array([-c.beta for c in self.cuts])
        return G, h


@dataclass
class Report:
    instance: str
    normalization: str
    mode: str
    status: str
    z_cp: float
    z_star: float
    z_micp: float | None
    rounds: list[RoundStats]
    cuts: list[CutCandidate]

    def to_json(self) -> dict:
        return {
            "instance": self.instance,
            "normalization": self.normalization,
            "mode": self.mode,
            "status": self.status,
            "z_cp": self.z_cp,
            "z_star": self.z_star,
            "z_micp": self.z_micp,
            "rounds": [r.to_json() for r in self.rounds],
            "cuts": [c.to_json() for c in self.cuts],
        }

    def to_csv(self, with_time: bool = False) -> str:
        """One row per round; wall time is left out unless asked so reruns compare equal."""
        buf = io.StringIO()
        cols = ["round", "kstar", "landp", "density_pct", "gap_pct", "bound"]
        if with_time:
            cols.append("seconds")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in self.rounds:
            row = [r.round, r.kstar, r.landp, f"{r.density_pct:.4f}",
                   "" if r.gap_pct is None else f"{r.gap_pct:.4f}", f"{r.bound:.10g}"]
            if with_time:
                row.append(f"{r.seconds:.4f}")
            w.writerow(row)
        return buf.getvalue()


def gap_closed(z_cp: float, z_micp: float | None, z_star: float) -> float | None:
    """Percent of the root gap closed, clamped to [0, 100]; ``None`` when undefined."""
    if z_micp is None or not z_micp > z_cp:
        return None
    g = 100.0 * (z_star - z_cp) / (z_micp - z_cp)
    return float(min(100.0, max(0.0, g)))


# -- relaxation ---------------------------------------------------------------

def _oa_cones(K: ConeProduct) -> ConeProduct:
    return ConeProduct(Cone(ConeKind.FREE, c.dim) if not c.is_polyhedral else c for c in K.blocks)


def initial_linearization(K: ConeProduct) -> list[CutCandidate]:
    """``x_0 >= |x_i|`` for every tail coordinate of every second-order block."""
    n = K.total_dim
    out = []
    for cone, sl in K.slices():
        if cone.kind is not ConeKind.SOC:
            continue
        for i in range(sl.start + 1, sl.stop):
            for s in (1.0, -1.0):
                a = np.zeros(n)
                a[sl.start], a[i] = 1.0, s
                out.append(CutCandidate(a, 0.0, [], [a.copy()], [], classification=Classification.KSTAR,
                                        meta={"source": "init"}))
    return out


def _relaxation(state: LoopState, config: LoopConfig, extra: list[CutCandidate]) -> ConicProgram:
    P = state.problem
    G, h = state.rows()
    if extra:
        G = sp.vstack([G, sp.csr_matrix(np.array([-c.alpha for c in extra]))], format="csr")
        h = np.concatenate([h, [-c.beta for c in extra]])
    if config.relaxation_mode is RelaxationMode.OUTER_APPROX:
        return ConicProgram(P.c, P.A, P.b, _oa_cones(P.K), G, h)
    return ConicProgram(P.c, P.A, P.b, P.K, G, h)


def _solve_relaxation(state: LoopState, config: LoopConfig, extra, round_index: int) -> SolveResult:
    prog = _relaxation(state, config, extra)
    if config.relaxation_mode is RelaxationMode.OUTER_APPROX:
        res = solve_lp(prog, config.solve_options)
    else:
        res = solve(prog, config.solve_options)
    if res.status is SolveStatus.PRIMAL_INFEASIBLE:
        raise LoopError("relaxation became infeasible", round_index)
    if res.status in (SolveStatus.FAILED,):
        raise LoopError(f"relaxation solve failed ({res.raw_status})", round_index)
    return res


def refine(state: LoopState, xbar: np.ndarray, config: LoopConfig, extra: list[CutCandidate],
           round_index: int = 0) -> tuple[np.ndarray, int, int, bool, float]:
    """Add separating K* cuts until the point is within ``eps_K`` of the cone.

    Returns the new point, the number of cuts and iterations, the cap flag, and
    the relaxation value.
    """
    K = state.problem.K
    added = iters = 0
    res = None
    x = xbar
    while iters < config.refine_cap:
        if eta_bar(K, x) <= config.eps_K:
            break
        new = 0
        for cone, sl in K.slices():
            lam = separating_dual(cone, x[sl])
            if lam is None:
                continue
            a = np.zeros(K.total_dim)
            a[sl] = lam
            if a @ x >= -1e-12:
                continue
            cut = CutCandidate(a, 0.0, [], [a.copy()], [], float(a @ x), Classification.KSTAR,
                               config.normalization, {"source": "refine", "round": round_index})
            if state.add(cut):
                new += 1
        iters += 1
        added += new
        if new == 0:
            break
        res = _solve_relaxation(state, config, extra, round_index)
        x = _point(res, config)
    capped = iters >= config.refine_cap and eta_bar(K, x) > config.eps_K
    value = float(state.problem.c @ x)
    return x, added, iters, capped, value


def _point(res: SolveResult, config: LoopConfig) -> np.ndarray:
    return clean(res.x, config.clean_x)


def _bound(state: LoopState, config: LoopConfig, extra, round_index: int):
    """Solve the relaxation (refining in OA mode); returns point, bound and refine info."""
    res = _solve_relaxation(state, config, extra, round_index)
    it = 0
    while res.status is SolveStatus.DUAL_INFEASIBLE and it < config.refine_cap:
        # cut the recession direction off the outer approximation
        r = res.certificate.r if res.certificate is not None else res.x
        if not _cut_ray(state, r, config, round_index):
            raise LoopError("relaxation is unbounded", round_index)
        res = _solve_relaxation(state, config, extra, round_index)
        it += 1
    if res.status is SolveStatus.DUAL_INFEASIBLE:
        raise LoopError("relaxation is unbounded", round_index)
    x = _point(res, config)
    kstar, iters, capped = 0, 0, False
    if config.relaxation_mode is RelaxationMode.OUTER_APPROX:
        x, kstar, iters, capped, _ = refine(state, x, config, extra, round_index)
    return x, float(state.problem.c @ x), kstar, iters + it, capped


def _cut_ray(state: LoopState, r: np.ndarray, config: LoopConfig, round_index: int) -> bool:
    K = state.problem.K
    added = False
    for cone, sl in K.slices():
        lam = separating_dual(cone, r[sl])
        if lam is None:
            continue
        a = np.zeros(K.total_dim)
        a[sl] = lam
        cut = CutCandidate(a, 0.0, [], [a.copy()], [], float("nan"), Classification.KSTAR,
                           config.normalization, {"source": "refine", "round": round_index})
        added |= state.add(cut)
    return added


# -- rounds -------------------------------------------------------------------

def fractional_order(problem: StandardProblem, xbar: np.ndarray, tol: float = INTEGRALITY_TOL) -> list[int]:
    """Integral coordinates with fractional value, most fractional first, ties by index."""
    idx = np.flatnonzero(problem.integral_mask)
    frac = np.abs(xbar[idx] - np.round(xbar[idx]))
    keep = frac > tol
    pairs = sorted(zip(-frac[keep], idx[keep].tolist()))
    return [j for _, j in pairs]


def _clean_cut(cut: CutCandidate, config: LoopConfig) -> CutCandidate:
    cut.alpha = clean(cut.alpha, config.clean_alpha)
    cut.beta = float(clean(cut.beta, config.clean_beta))
    return cut


def _separation_config(state: LoopState, config: LoopConfig) -> SeparationConfig:
    return SeparationConfig(violation_threshold=config.violation_threshold,
                            use_shortcut=Normalization.parse(config.normalization).kind is NormKind.STANDARD,
                            solve_options=config.solve_options, center=state.center)


def run_round(state: LoopState, config: LoopConfig, round_index: int) -> RoundStats | None:
    """Separate at the current point and re-solve; ``None`` when no violated cut exists."""
    t0 = time.perf_counter()
    P = state.problem
    xbar = state.xbar
    norm = Normalization.parse(config.normalization)
    scfg = _separation_config(state, config)
    new: list[CutCandidate] = []
    for j in fractional_order(P, xbar):
        D = elementary_split(P, j, xbar[j])
        if config.lifting:
            out, _ = separate_lifted(P, D, xbar, norm, scfg)
        else:
            out = separate(P, D, xbar, norm, scfg)
        cut = out.cut
        if cut is None:
            continue
        if cut.classification is Classification.KSTAR:
            for piece in out.disaggregated_kstar:
                if piece.evaluate(xbar) < 0 and dual_membership(P.K, piece.alpha, 1e-9):
                    piece.meta.update(source="separation", split=[int(j), D.split[1]])
                    new.append(piece)
            continue
        check_D = D
        if config.strengthen:
            cut, pi_t = strengthen(cut, D, P.integral_mask, P, options=config.solve_options, xbar=xbar)
            if cut.meta.get("strengthened"):
                check_D = strengthened_disjunction(D, pi_t)
        if not certificate_check(P, check_D, cut):
            continue
        cut.violation = cut.evaluate(xbar)
        cut.meta["source"] = "landp"
        new.append(cut)
    kstar = landp = 0
    dens = []
    for cut in new:
        cut = _clean_cut(cut, config)
        cut.meta["round"] = round_index
        if state.add(cut):
            dens.append(100.0 * cut.nnz / P.n)
            if cut.classification is Classification.KSTAR:
                kstar += 1
            else:
                landp += 1
    if kstar + landp == 0:
        return None
    x, z, k_ref, iters, capped = _bound(state, config, [], round_index)
    state.xbar = x
    state.z_star = max(state.z_star, z)
    return RoundStats(round_index, kstar + k_ref, landp, float(np.mean(dens)),
                      gap_closed(state.z_cp, config.z_micp, state.z_star), state.z_star,
                      time.perf_counter() - t0, iters, capped)


def run(problem: StandardProblem, config: LoopConfig | None = None, instance: str = "") -> Report:
    cfg = config or LoopConfig()
    start = time.perf_counter()
    state = LoopState(problem)
    if cfg.relaxation_mode is RelaxationMode.OUTER_APPROX:
        for cut in initial_linearization(problem.K):
            state.add(cut)
    if Normalization.parse(cfg.normalization).kind is NormKind.POLAR:
        try:
            state.center = analytic_center(problem, cfg.solve_options)
        except AnalyticCenterError:
            state.center = None
    x, z, k_ref, iters, capped = _bound(state, cfg, [], 0)
    state.xbar, state.z_cp, state.z_star = x, z, z
    state.rounds.append(RoundStats(0, k_ref, 0, 0.0, gap_closed(z, cfg.z_micp, z), z,
                                   time.perf_counter() - start, iters, capped))
    status = "MaxRounds"
    for r in range(1, cfg.max_rounds + 1):
        if cfg.time_limit is not None and time.perf_counter() - start >= cfg.time_limit:
            status = "TimeLimit"
            break
        stats = run_round(state, cfg, r)
        if stats is None:
            status = "NoViolatedCuts"
            break
        state.rounds.append(stats)
    else:
        if cfg.max_rounds == 0 and cfg.time_limit is not None and cfg.time_limit <= 0:
            status = "TimeLimit"
    # the user-facing cut ledger leaves out the initial linearization rows
    ledger = [c for c in state.cuts if c.meta.get("source") != "init"]
    return Report(instance, cfg.normalization, cfg.relaxation_mode.value, status, state.z_cp,
                  state.z_star, cfg.z_micp, state.rounds, ledger)
