"""Irreducible cones, products of cones, dual membership and minimal steps.

All cones handled here are self-dual except ``Free`` whose dual is ``{0}``.
Rotated second-order cones are mapped to the ordinary second-order cone by
the orthogonal, symmetric involution ``T`` (see :func:`rsoc_to_soc`).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

_SQRT1_2 = math.sqrt(0.5)


class ConeKind(str, enum.Enum):
    FREE = "F"
    NONNEG = "L+"
    NONPOS = "L-"
    SOC = "Q"
    RSOC = "QR"


_MIN_DIM = {
    ConeKind.FREE: 1,
    ConeKind.NONNEG: 1,
    ConeKind.NONPOS: 1,
    ConeKind.SOC: 2,
    ConeKind.RSOC: 3,
}


@dataclass(frozen=True)
class Cone:
    kind: ConeKind
    dim: int

    def __post_init__(self) -> None:
        kind = ConeKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if int(self.dim) != self.dim or self.dim < _MIN_DIM[kind]:
            raise ValueError(f"cone {kind.value} needs dim >= {_MIN_DIM[kind]}, got {self.dim}")
        object.__setattr__(self, "dim", int(self.dim))

    @property
    def is_polyhedral(self) -> bool:
        return self.kind in (ConeKind.FREE, ConeKind.NONNEG, ConeKind.NONPOS)

    @property
    def is_linear(self) -> bool:
        """Orthant-like blocks that split into one-dimensional irreducible cones."""
        return self.kind in (ConeKind.NONNEG, ConeKind.NONPOS)


@dataclass(frozen=True)
class ConeProduct:
    """Ordered cartesian product of cones covering indices ``0..total_dim``."""

    blocks: tuple[Cone, ...]

    def __init__(self, blocks: Iterable[Cone]) -> None:
        object.__setattr__(self, "blocks", tuple(blocks))

    @property
    def total_dim(self) -> int:
        return sum(c.dim for c in self.blocks)

    @property
    def offsets(self) -> list[int]:
        out = [0]
        for c in self.blocks:
            out.append(out[-1] + c.dim)
        return out

    def slices(self) -> Iterator[tuple[Cone, slice]]:
        start = 0
        for c in self.blocks:
            yield c, slice(start, start + c.dim)
            start += c.dim

    def block_of(self) -> np.ndarray:
        """Block index of every coordinate."""
        return np.repeat(np.arange(len(self.blocks)), [c.dim for c in self.blocks])

    def kind_of(self) -> list[ConeKind]:
        return [c.kind for c in self.blocks for _ in range(c.dim)]

    def free_mask(self) -> np.ndarray:
        return np.array([k is ConeKind.FREE for k in self.kind_of()], dtype=bool)

    def subset(self, block_ids: Sequence[int]) -> "ConeProduct":
        return ConeProduct(self.blocks[i] for i in block_ids)

    def __len__(self) -> int:
        return len(self.blocks)

    @classmethod
    def of(cls, *spec: tuple[str | ConeKind, int]) -> "ConeProduct":
        return cls(Cone(ConeKind(k), d) for k, d in spec)


def _check_len(K: ConeProduct, v: np.ndarray, what: str = "vector") -> np.ndarray:
    v = np.asarray(v, dtype=float).ravel()
    if v.shape[0] != K.total_dim:
        raise ValueError(f"{what} has length {v.shape[0]}, cone product has dimension {K.total_dim}")
    return v


# -- rotated cone bijection ---------------------------------------------------

def rsoc_to_soc(x: np.ndarray) -> np.ndarray:
    """Map ``2 x1 x2 >= |x3:|^2, x1,x2 >= 0`` onto ``u1 >= |u2:|``."""
    x = np.asarray(x, dtype=float)
    u = x.copy()
    u[0] = (x[0] + x[1]) * _SQRT1_2
    u[1] = (x[0] - x[1]) * _SQRT1_2
    return u


soc_to_rsoc = rsoc_to_soc  # the map is its own inverse


# -- membership ---------------------------------------------------------------

def _soc_gap(x: np.ndarray) -> float:
    return float(np.linalg.norm(x[1:]) - x[0])


def _block_violation(cone: Cone, x: np.ndarray, dual: bool) -> float:
    k = cone.kind
    if k is ConeKind.FREE:
        return float(np.max(np.abs(x))) if dual else 0.0
    if k is ConeKind.NONNEG:
        return float(max(0.0, -np.min(x)))
    if k is ConeKind.NONPOS:
        return float(max(0.0, np.max(x)))
    if k is ConeKind.RSOC:
        x = rsoc_to_soc(x)
    return max(0.0, _soc_gap(x))


def _membership(K: ConeProduct, x: np.ndarray, tol: float, dual: bool) -> bool:
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    x = _check_len(K, x)
    for cone, sl in K.slices():
        xb = x[sl]
        if _block_violation(cone, xb, dual) > tol * (1.0 + float(np.linalg.norm(xb))):
            return False
    return True


def in_cone(K: ConeProduct, x: np.ndarray, tol: float = 0.0) -> bool:
    return _membership(K, x, tol, dual=False)


def dual_membership(K: ConeProduct, u: np.ndarray, tol: float = 0.0) -> bool:
    """True iff ``u`` lies in ``K*`` block-wise within relative tolerance."""
    return _membership(K, u, tol, dual=True)


def _project_soc(x: np.ndarray) -> np.ndarray:
    t, tail = x[0], x[1:]
    nt = float(np.linalg.norm(tail))
    if nt <= t:
        return x.copy()
    if nt <= -t:
        return np.zeros_like(x)
    scale = (t + nt) / (2.0 * nt)
    out = np.empty_like(x)
    out[1:] = tail * scale
    out[0] = np.linalg.norm(out[1:])
    return out


def project(K: ConeProduct, x: np.ndarray, dual: bool = False) -> np.ndarray:
    """Euclidean projection onto ``K`` (or ``K*`` when ``dual``)."""
    x = _check_len(K, x)
    out = np.empty_like(x)
    for cone, sl in K.slices():
        xb = x[sl]
        k = cone.kind
        if k is ConeKind.FREE:
            out[sl] = 0.0 if dual else xb
        elif k is ConeKind.NONNEG:
            out[sl] = np.maximum(xb, 0.0)
        elif k is ConeKind.NONPOS:
            out[sl] = np.minimum(xb, 0.0)
        elif k is ConeKind.SOC:
            out[sl] = _project_soc(xb)
        else:
            w = _project_soc(rsoc_to_soc(xb))
            # keep a few ulps of slack so the round trip stays inside the cone
            w[1:] *= 1.0 - 8 * np.finfo(float).eps
            out[sl] = soc_to_rsoc(w)
    return out


# -- norms and interior points ------------------------------------------------

def default_interior_point(K: ConeProduct) -> np.ndarray:
    rho = np.zeros(K.total_dim)
    for cone, sl in K.slices():
        k = cone.kind
        if k is ConeKind.NONNEG:
            rho[sl] = 1.0
        elif k is ConeKind.NONPOS:
            rho[sl] = -1.0
        elif k is ConeKind.SOC:
            rho[sl.start] = 1.0
        elif k is ConeKind.RSOC:
            e1 = np.zeros(cone.dim)
            e1[0] = 1.0
            rho[sl] = soc_to_rsoc(e1)
    return rho


def is_interior(K: ConeProduct, rho: np.ndarray, margin: float = 0.0) -> bool:
    """Strict interiority of every non-free block (free blocks must be zero)."""
    rho = _check_len(K, rho, "rho")
    for cone, sl in K.slices():
        r = rho[sl]
        k = cone.kind
        if k is ConeKind.FREE:
            if np.any(r != 0.0):
                return False
        elif k is ConeKind.NONNEG:
            if np.min(r) <= margin:
                return False
        elif k is ConeKind.NONPOS:
            if np.max(r) >= -margin:
                return False
        else:
            if k is ConeKind.RSOC:
                r = rsoc_to_soc(r)
            if r[0] - np.linalg.norm(r[1:]) <= margin:
                return False
    return True


def conic_norm(rho: np.ndarray, u: np.ndarray) -> float:
    rho = np.asarray(rho, dtype=float).ravel()
    u = np.asarray(u, dtype=float).ravel()
    if rho.shape != u.shape:
        raise ValueError(f"rho has length {rho.shape[0]}, u has length {u.shape[0]}")
    return float(rho @ u)


# -- minimal steps ------------------------------------------------------------

def _soc_step(x: np.ndarray, r: np.ndarray) -> float:
    x0, xt = x[0], x[1:]
    if x0 >= np.linalg.norm(xt):
        return 0.0
    r0, rt = r[0], r[1:]
    a = r0 * r0 - float(rt @ rt)
    b = x0 * r0 - float(xt @ rt)
    c = x0 * x0 - float(xt @ xt)
    disc = max(b * b - a * c, 0.0)
    sq = math.sqrt(disc)
    if b <= 0:
        eta = (-b + sq) / a
    else:
        eta = -c / (b + sq)
    return max(0.0, eta)


def min_step(K: ConeProduct, x: np.ndarray, direction: np.ndarray) -> float:
    """Smallest ``t >= 0`` with ``x + t*direction`` in ``K``.

    ``direction`` must be interior on every non-free block.
    """
    x = _check_len(K, x)
    direction = _check_len(K, direction, "direction")
    best = 0.0
    for cone, sl in K.slices():
        xb, rb = x[sl], direction[sl]
        k = cone.kind
        if k is ConeKind.FREE:
            continue
        if k in (ConeKind.NONNEG, ConeKind.NONPOS):
            # same formula for both orthants since rho flips sign with the cone
            step = float(np.max(-xb / rb))
        elif k is ConeKind.SOC:
            step = _soc_step(xb, rb)
        else:
            step = _soc_step(rsoc_to_soc(xb), rsoc_to_soc(rb))
        best = max(best, step)
    return best


def eta_bar(K: ConeProduct, x: np.ndarray, rho: np.ndarray | None = None) -> float:
    if rho is None:
        rho = default_interior_point(K)
    return min_step(K, x, rho)


def tau_bar(D, d: np.ndarray, Q: ConeProduct, sigma: np.ndarray, x: np.ndarray) -> float:
    s = np.asarray(D @ np.asarray(x, dtype=float)).ravel() - np.asarray(d, dtype=float).ravel()
    return min_step(Q, s, sigma)


# -- separating dual vectors --------------------------------------------------

def separating_dual(cone: Cone, x: np.ndarray) -> np.ndarray | None:
    """A vector of the dual cone with negative inner product against ``x``.

    For second-order blocks this is the normal of the supporting hyperplane
    at the projection of ``x``.  Returns ``None`` when ``x`` is in the cone.
    """
    x = np.asarray(x, dtype=float)
    k = cone.kind
    if k is ConeKind.FREE:
        return None
    if k is ConeKind.NONNEG:
        if np.min(x) >= 0:
            return None
        lam = np.zeros_like(x)
        lam[int(np.argmin(x))] = 1.0
        return lam
    if k is ConeKind.NONPOS:
        if np.max(x) <= 0:
            return None
        lam = np.zeros_like(x)
        lam[int(np.argmax(x))] = -1.0
        return lam
    w = rsoc_to_soc(x) if k is ConeKind.RSOC else x
    nt = float(np.linalg.norm(w[1:]))
    if w[0] >= nt:
        return None
    lam = np.zeros_like(w)
    lam[0] = 1.0
    if nt > 0:
        lam[1:] = -w[1:] / nt
    return soc_to_rsoc(lam) if k is ConeKind.RSOC else lam


def irreducible_pieces(K: ConeProduct) -> list[tuple[Cone, np.ndarray]]:
    """Index sets of irreducible cones; orthant blocks split per coordinate."""
    out: list[tuple[Cone, np.ndarray]] = []
    for cone, sl in K.slices():
        if cone.is_linear or cone.kind is ConeKind.FREE:
            for i in range(sl.start, sl.stop):
                out.append((Cone(cone.kind, 1), np.array([i])))
        else:
            out.append((cone, np.arange(sl.start, sl.stop)))
    return out
