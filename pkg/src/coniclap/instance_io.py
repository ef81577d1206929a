"""CBF reader, conversion to ``min c'x, Ax = b, x in K`` and implied integers.

Only the second-order subset of the Conic Benchmark Format is accepted:
keywords ``VER OBJSENSE VAR INT CON OBJACOORD OBJBCOORD ACOORD BCOORD`` and
cone tags ``F L+ L- L= Q QR``.  Constraint blocks read ``A x + b in K``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, TextIO

import numpy as np
import scipy.linalg
import scipy.sparse.linalg
import scipy.sparse as sp

from .cones import Cone, ConeKind, ConeProduct, rsoc_to_soc

SUPPORTED_VERSIONS = (1, 2, 3)
KEYWORDS = ("VER", "OBJSENSE", "VAR", "INT", "CON", "OBJACOORD", "OBJBCOORD", "ACOORD", "BCOORD")
# known but out of scope; rejected with a cone error rather than "unknown keyword"
_UNSUPPORTED_KEYWORDS = ("PSDVAR", "PSDCON", "HCOORD", "DCOORD", "FCOORD", "OBJFCOORD",
                         "POWCONES", "POW*CONES", "CHANGE")
_CONE_TAGS = {"F": ConeKind.FREE, "L+": ConeKind.NONNEG, "L-": ConeKind.NONPOS,
              "Q": ConeKind.SOC, "QR": ConeKind.RSOC}
ZERO_TAG = "L="
SLACK_ORDERING = "original variables first, then constraint slacks in row order, then rotated-cone link slacks"


class CbfError(ValueError):
    code = "syntax"

    def __init__(self, message: str, line: int | None = None) -> None:
        self.message = message
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class CbfHeaderError(CbfError):
    code = "header"


class CbfKeywordError(CbfError):
    code = "keyword"


class CbfConeError(CbfError):
    code = "cone"


class CbfIndexError(CbfError):
    code = "index"


class CbfDuplicateError(CbfError):
    code = "duplicate"


@dataclass
class RawInstance:
    version: int
    sense: str = "MIN"
    var_blocks: list[tuple[str, int]] = field(default_factory=list)
    int_indices: list[int] = field(default_factory=list)
    obj_coords: dict[int, float] = field(default_factory=dict)
    obj_const: float = 0.0
    con_blocks: list[tuple[str, int]] = field(default_factory=list)
    a_coords: dict[tuple[int, int], float] = field(default_factory=dict)
    b_coords: dict[int, float] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return sum(d for _, d in self.var_blocks)

    @property
    def m(self) -> int:
        return sum(d for _, d in self.con_blocks)

    def a_matrix(self) -> sp.csr_matrix:
        if not self.a_coords:
            return sp.csr_matrix((self.m, self.n))
        (ii, jj), vv = zip(*self.a_coords.keys()), list(self.a_coords.values())
        return sp.csr_matrix((vv, (ii, jj)), shape=(self.m, self.n))

    def b_vector(self) -> np.ndarray:
        b = np.zeros(self.m)
        for i, v in self.b_coords.items():
            b[i] = v
        return b

    def c_vector(self) -> np.ndarray:
        c = np.zeros(self.n)
        for j, v in self.obj_coords.items():
            c[j] = v
        return c

    def to_json(self) -> dict:
        return {
            "version": self.version,
            "sense": self.sense,
            "var_blocks": [[k, d] for k, d in self.var_blocks],
            "int": sorted(self.int_indices),
            "objacoord": [[j, v] for j, v in sorted(self.obj_coords.items())],
            "objbcoord": self.obj_const,
            "con_blocks": [[k, d] for k, d in self.con_blocks],
            "acoord": [[i, j, v] for (i, j), v in sorted(self.a_coords.items())],
            "bcoord": [[i, v] for i, v in sorted(self.b_coords.items())],
        }


# -- parser -------------------------------------------------------------------

class _Lines:
    def __init__(self, text: str) -> None:
        self.items: list[tuple[int, str]] = []
        for no, line in enumerate(text.splitlines(), start=1):
            body = line.split("#", 1)[0].strip()
            if body:
                self.items.append((no, body))
        self.pos = 0

    def done(self) -> bool:
        return self.pos >= len(self.items)

    def next(self, what: str, after: int) -> tuple[int, list[str]]:
        if self.done():
            raise CbfError(f"unexpected end of file while reading {what}", after)
        no, body = self.items[self.pos]
        self.pos += 1
        return no, body.split()


def _int(tok: str, line: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise CbfError(f"expected integer {what}, got {tok!r}", line) from None


def _float(tok: str, line: int) -> float:
    try:
        v = float(tok)
    except ValueError:
        raise CbfError(f"expected a number, got {tok!r}", line) from None
    if not math.isfinite(v):
        raise CbfError(f"non-finite coefficient {tok!r}", line)
    return v


def _arity(toks: list[str], k: int, line: int, what: str) -> None:
    if len(toks) != k:
        raise CbfError(f"{what} needs {k} field(s), got {len(toks)}", line)


def _read_count(lines: _Lines, kw_line: int, what: str) -> tuple[int, int]:
    no, toks = lines.next(f"{what} count", kw_line)
    _arity(toks, 1, no, f"{what} count")
    count = _int(toks[0], no, f"{what} count")
    if count < 0:
        raise CbfError(f"negative {what} count", no)
    return no, count


def _read_cone_blocks(lines: _Lines, kw: str, kw_line: int) -> tuple[int, list[tuple[str, int]]]:
    no, toks = lines.next(f"{kw} header", kw_line)
    if len(toks) != 2:
        raise CbfHeaderError(f"{kw} header must be 'total blocks'", no)
    total, nblocks = (_int(t, no, f"{kw} header") for t in toks)
    if total < 0 or nblocks < 0:
        raise CbfHeaderError(f"{kw} header has negative entries", no)
    blocks: list[tuple[str, int]] = []
    for _ in range(nblocks):
        bno, btoks = lines.next(f"{kw} cone", no)
        _arity(btoks, 2, bno, f"{kw} cone")
        tag = btoks[0]
        dim = _int(btoks[1], bno, "cone dimension")
        allowed = set(_CONE_TAGS) | {ZERO_TAG}
        if tag not in allowed:
            raise CbfConeError(f"unsupported cone {tag!r}", bno)
        if dim < 1:
            raise CbfHeaderError(f"cone dimension must be positive, got {dim}", bno)
        if tag in _CONE_TAGS:
            kind = _CONE_TAGS[tag]
            try:
                Cone(kind, dim)
            except ValueError as exc:
                raise CbfHeaderError(str(exc), bno) from None
        blocks.append((tag, dim))
    if sum(d for _, d in blocks) != total:
        raise CbfHeaderError(f"{kw} declares {total} entries but cones sum to {sum(d for _, d in blocks)}", no)
    return no, blocks


def _check_index(idx: int, bound: int, line: int, what: str) -> None:
    if not 0 <= idx < bound:
        raise CbfIndexError(f"{what} index {idx} outside [0, {bound})", line)


def parse_cbf(source: str | TextIO) -> RawInstance:
    text = source if isinstance(source, str) else source.read()
    lines = _Lines(text)
    if lines.done():
        raise CbfHeaderError("empty document", 1)
    no, toks = lines.next("VER", 1)
    if toks != ["VER"]:
        raise CbfHeaderError("document must start with VER", no)
    vno, vt = lines.next("version", no)
    _arity(vt, 1, vno, "VER")
    version = _int(vt[0], vno, "version")
    if version not in SUPPORTED_VERSIONS:
        raise CbfHeaderError(f"unsupported CBF version {version}", vno)
    inst = RawInstance(version=version)
    seen: set[str] = {"VER"}
    while not lines.done():
        no, toks = lines.next("keyword", no)
        kw = toks[0]
        if len(toks) != 1 or kw not in KEYWORDS:
            if kw in _UNSUPPORTED_KEYWORDS or kw.startswith("PSD") or kw.startswith("EXP"):
                raise CbfConeError(f"section {kw} is not supported (second-order cones only)", no)
            raise CbfKeywordError(f"unknown keyword {' '.join(toks)!r}", no)
        if kw in seen:
            raise CbfKeywordError(f"section {kw} appears twice", no)
        seen.add(kw)
        if kw == "OBJSENSE":
            sno, st = lines.next("objective sense", no)
            _arity(st, 1, sno, "OBJSENSE")
            if st[0] not in ("MIN", "MAX"):
                raise CbfError(f"objective sense must be MIN or MAX, got {st[0]!r}", sno)
            inst.sense = st[0]
        elif kw == "VAR":
            _, inst.var_blocks = _read_cone_blocks(lines, "VAR", no)
        elif kw == "CON":
            _, inst.con_blocks = _read_cone_blocks(lines, "CON", no)
        elif kw == "INT":
            _need(seen, "VAR", kw, no)
            cno, count = _read_count(lines, no, "INT")
            taken: set[int] = set()
            for _ in range(count):
                eno, et = lines.next("INT entry", cno)
                _arity(et, 1, eno, "INT entry")
                j = _int(et[0], eno, "variable")
                _check_index(j, inst.n, eno, "variable")
                if j in taken:
                    raise CbfDuplicateError(f"variable {j} listed twice in INT", eno)
                taken.add(j)
            inst.int_indices = sorted(taken)
        elif kw == "OBJACOORD":
            _need(seen, "VAR", kw, no)
            cno, count = _read_count(lines, no, kw)
            for _ in range(count):
                eno, et = lines.next("OBJACOORD entry", cno)
                _arity(et, 2, eno, "OBJACOORD entry")
                j = _int(et[0], eno, "variable")
                _check_index(j, inst.n, eno, "variable")
                if j in inst.obj_coords:
                    raise CbfDuplicateError(f"objective coefficient {j} given twice", eno)
                inst.obj_coords[j] = _float(et[1], eno)
        elif kw == "OBJBCOORD":
            eno, et = lines.next("OBJBCOORD value", no)
            _arity(et, 1, eno, "OBJBCOORD")
            inst.obj_const = _float(et[0], eno)
        elif kw == "ACOORD":
            _need(seen, "VAR", kw, no)
            _need(seen, "CON", kw, no)
            cno, count = _read_count(lines, no, kw)
            for _ in range(count):
                eno, et = lines.next("ACOORD entry", cno)
                _arity(et, 3, eno, "ACOORD entry")
                i = _int(et[0], eno, "row")
                j = _int(et[1], eno, "variable")
                _check_index(i, inst.m, eno, "row")
                _check_index(j, inst.n, eno, "variable")
                if (i, j) in inst.a_coords:
                    raise CbfDuplicateError(f"coefficient ({i}, {j}) given twice", eno)
                inst.a_coords[(i, j)] = _float(et[2], eno)
        elif kw == "BCOORD":
            _need(seen, "CON", kw, no)
            cno, count = _read_count(lines, no, kw)
            for _ in range(count):
                eno, et = lines.next("BCOORD entry", cno)
                _arity(et, 2, eno, "BCOORD entry")
                i = _int(et[0], eno, "row")
                _check_index(i, inst.m, eno, "row")
                if i in inst.b_coords:
                    raise CbfDuplicateError(f"constant {i} given twice", eno)
                inst.b_coords[i] = _float(et[1], eno)
    if "VAR" not in seen:
        raise CbfHeaderError("document has no VAR section", no)
    return inst


def _need(seen: set[str], section: str, kw: str, line: int) -> None:
    if section not in seen:
        raise CbfHeaderError(f"{kw} must come after {section}", line)


def read_cbf(path: str | Path) -> RawInstance:
    with open(path, encoding="ascii", errors="strict") as fh:
        return parse_cbf(fh)


# -- standard form ------------------------------------------------------------

@dataclass(frozen=True)
class StandardProblem:
    c: np.ndarray
    A: sp.csr_matrix
    b: np.ndarray
    K: ConeProduct
    integer_mask: np.ndarray
    implied_integer_mask: np.ndarray
    names: tuple[str, ...] = ()
    obj_sign: float = 1.0
    obj_offset: float = 0.0
    raw_map: sp.csr_matrix | None = None  # x_raw = raw_map @ x

    def __post_init__(self) -> None:
        n = self.K.total_dim
        A = sp.csr_matrix(self.A, dtype=float)
        if A.shape[0] == 0:
            A = sp.csr_matrix((0, n))
        object.__setattr__(self, "c", np.asarray(self.c, dtype=float).ravel())
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", np.asarray(self.b, dtype=float).ravel())
        im = np.zeros(n, bool) if self.integer_mask is None else np.asarray(self.integer_mask, bool)
        jm = np.zeros(n, bool) if self.implied_integer_mask is None else np.asarray(self.implied_integer_mask, bool)
        object.__setattr__(self, "integer_mask", im)
        object.__setattr__(self, "implied_integer_mask", jm & ~im)
        if self.c.shape[0] != n or A.shape != (self.b.shape[0], n) or im.shape[0] != n:
            raise ValueError("inconsistent problem dimensions")

    @property
    def n(self) -> int:
        return self.K.total_dim

    @property
    def m(self) -> int:
        return self.b.shape[0]

    @property
    def integral_mask(self) -> np.ndarray:
        """Integer or implied-integer coordinates."""
        return self.integer_mask | self.implied_integer_mask

    def original_objective(self, x: np.ndarray) -> float:
        return float(self.obj_sign * (self.c @ x) + self.obj_offset)

    def with_masks(self, integer_mask=None, implied_integer_mask=None) -> "StandardProblem":
        return StandardProblem(self.c, self.A, self.b, self.K,
                               self.integer_mask if integer_mask is None else integer_mask,
                               self.implied_integer_mask if implied_integer_mask is None else implied_integer_mask,
                               self.names, self.obj_sign, self.obj_offset, self.raw_map)

    def to_json(self) -> dict:
        A = self.A.tocoo()
        order = np.lexsort((A.col, A.row))
        return {
            "n": self.n,
            "m": self.m,
            "ordering": SLACK_ORDERING,
            "obj_sign": self.obj_sign,
            "obj_offset": self.obj_offset,
            "c": [float(v) for v in self.c],
            "A": [[int(A.row[k]), int(A.col[k]), float(A.data[k])] for k in order],
            "b": [float(v) for v in self.b],
            "cones": [{"kind": cn.kind.value, "dim": cn.dim} for cn in self.K.blocks],
            "integer": [int(j) for j in np.flatnonzero(self.integer_mask)],
            "implied_integer": [int(j) for j in np.flatnonzero(self.implied_integer_mask)],
            "names": list(self.names),
        }


def _rsoc_matrix(dim: int) -> np.ndarray:
    T = np.eye(dim)
    s = math.sqrt(0.5)
    T[:2, :2] = [[s, s], [s, -s]]
    return T


def to_standard_form(raw: RawInstance, implied: bool = True) -> StandardProblem:
    n_raw = raw.n
    int_set = set(raw.int_indices)
    # column map for the original variables: x_raw = P @ x_var
    P = sp.lil_matrix((n_raw, n_raw))
    var_cones: list[Cone] = []
    names: list[str] = []
    extra_rows: list[tuple[dict[int, float], float]] = []
    links: list[tuple[int, int]] = []  # (start, dim) of rotated blocks kept with link slacks
    start = 0
    for tag, dim in raw.var_blocks:
        idx = range(start, start + dim)
        if tag == "QR" and not int_set.intersection(idx):
            P[start:start + dim, start:start + dim] = _rsoc_matrix(dim)
            var_cones.append(Cone(ConeKind.SOC, dim))
            names.extend(f"u{j}" for j in idx)
        else:
            for j in idx:
                P[j, j] = 1.0
            names.extend(f"x{j}" for j in idx)
            if tag == ZERO_TAG:
                var_cones.append(Cone(ConeKind.FREE, dim))
                extra_rows.extend(({j: 1.0}, 0.0) for j in idx)
            elif tag == "QR":
                var_cones.append(Cone(ConeKind.FREE, dim))
                links.append((start, dim))
            else:
                var_cones.append(Cone(_CONE_TAGS[tag], dim))
        start += dim
    P = P.tocsr()
    Araw = raw.a_matrix() @ P
    braw = raw.b_vector()

    rows: list[sp.csr_matrix] = []
    rhs: list[np.ndarray] = []
    slack_cols: list[tuple[int, np.ndarray]] = []  # (row offset in stacked A, coefficient block)
    slack_cones: list[Cone] = []
    n_slack = 0
    r0 = 0
    row_count = 0
    for tag, dim in raw.con_blocks:
        Ai = Araw[r0:r0 + dim]
        bi = braw[r0:r0 + dim]
        if tag == "F":
            r0 += dim
            continue
        rows.append(Ai)
        rhs.append(-bi)
        if tag != ZERO_TAG:
            block = -_rsoc_matrix(dim) if tag == "QR" else -np.eye(dim)
            slack_cols.append((row_count, block))
            kind = ConeKind.SOC if tag == "QR" else _CONE_TAGS[tag]
            slack_cones.append(Cone(kind, dim))
            names.extend(f"s{r0 + k}" for k in range(dim))
            n_slack += dim
        row_count += dim
        r0 += dim
    for coefs, val in extra_rows:
        row = sp.csr_matrix((list(coefs.values()), ([0] * len(coefs), list(coefs.keys()))), shape=(1, n_raw))
        rows.append(row)
        rhs.append(np.array([val]))
        row_count += 1
    for lstart, dim in links:
        block = sp.lil_matrix((dim, n_raw))
        block[:, lstart:lstart + dim] = _rsoc_matrix(dim)
        rows.append(block.tocsr())
        rhs.append(np.zeros(dim))
        slack_cols.append((row_count, -np.eye(dim)))
        slack_cones.append(Cone(ConeKind.SOC, dim))
        names.extend(f"r{lstart + k}" for k in range(dim))
        n_slack += dim
        row_count += dim

    A_var = sp.vstack(rows, format="csr") if rows else sp.csr_matrix((0, n_raw))
    S = sp.lil_matrix((row_count, n_slack))
    col = 0
    for roff, block in slack_cols:
        d = block.shape[0]
        S[roff:roff + d, col:col + d] = block
        col += d
    A = sp.hstack([A_var, S.tocsr()], format="csr")
    A.eliminate_zeros()
    b = np.concatenate(rhs) if rhs else np.zeros(0)

    sign = -1.0 if raw.sense == "MAX" else 1.0
    c = np.concatenate([sign * (P.T @ raw.c_vector()), np.zeros(n_slack)])
    imask = np.zeros(n_raw + n_slack, dtype=bool)
    imask[list(int_set)] = True
    raw_map = sp.hstack([P, sp.csr_matrix((n_raw, n_slack))], format="csr")
    prob = StandardProblem(c, A, b, ConeProduct(var_cones + slack_cones), imask, None,
                           tuple(names), sign, raw.obj_const, raw_map)
    if implied:
        prob = prob.with_masks(implied_integer_mask=detect_implied_integers(prob))
    return prob


def raw_point_to_standard(raw: RawInstance, problem: StandardProblem, x_raw: np.ndarray) -> np.ndarray:
    """Complete a raw point with the substituted and slack coordinates."""
    x_raw = np.asarray(x_raw, dtype=float)
    P = problem.raw_map[:, :raw.n]
    x_var = scipy.sparse.linalg.spsolve(P.tocsc(), x_raw) if raw.n else np.zeros(0)
    x_var = np.atleast_1d(x_var)
    n_slack = problem.n - raw.n
    if n_slack == 0:
        return x_var
    # slacks solve S s = b - A_var x_var, S being block diagonal and invertible
    A = problem.A
    A_var, S = A[:, :raw.n], A[:, raw.n:]
    resid = problem.b - A_var @ x_var
    s, *_ = np.linalg.lstsq(S.toarray(), resid, rcond=None)
    return np.concatenate([x_var, s])


def detect_implied_integers(problem: StandardProblem, tol: float = 1e-9) -> np.ndarray:
    """Fixed point of the rule ``a'x +- y = b`` with integral data and integer ``x``."""
    A = problem.A.tocsr()
    integral = problem.integer_mask.copy()
    implied = np.zeros(problem.n, dtype=bool)

    def is_int(v: float) -> bool:
        return abs(v - round(v)) <= tol

    rows = []
    for i in range(A.shape[0]):
        lo, hi = A.indptr[i], A.indptr[i + 1]
        cols, vals = A.indices[lo:hi], A.data[lo:hi]
        keep = vals != 0
        cols, vals = cols[keep], vals[keep]
        if is_int(problem.b[i]) and all(is_int(v) for v in vals):
            rows.append((cols, vals))
    changed = True
    while changed:
        changed = False
        for cols, vals in rows:
            unknown = [k for k, j in enumerate(cols) if not integral[j]]
            if len(unknown) != 1:
                continue
            k = unknown[0]
            if abs(abs(vals[k]) - 1.0) <= tol:
                integral[cols[k]] = True
                implied[cols[k]] = True
                changed = True
    return implied


def flag_redundant_rows(A: sp.spmatrix, tol: float = 1e-10) -> list[int]:
    """Rows that are linear combinations of earlier ones (pivoted QR on A')."""
    dense = sp.csr_matrix(A).toarray()
    if dense.shape[0] == 0:
        return []
    _, R, piv = scipy.linalg.qr(dense.T, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    scale = diag[0] if diag.size and diag[0] > 0 else 1.0
    rank = int(np.sum(diag > tol * scale))
    return sorted(int(p) for p in piv[rank:])


def load_problem(path: str | Path) -> StandardProblem:
    return to_standard_form(read_cbf(path))


def dumps(obj: dict) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def write_cbf(raw: RawInstance) -> str:
    """Serialize back to CBF text (used for fixtures and fuzzing)."""
    out = ["VER", str(raw.version), "", "OBJSENSE", raw.sense, ""]
    out += ["VAR", f"{raw.n} {len(raw.var_blocks)}"] + [f"{k} {d}" for k, d in raw.var_blocks] + [""]
    if raw.int_indices:
        out += ["INT", str(len(raw.int_indices))] + [str(j) for j in raw.int_indices] + [""]
    if raw.con_blocks:
        out += ["CON", f"{raw.m} {len(raw.con_blocks)}"] + [f"{k} {d}" for k, d in raw.con_blocks] + [""]
    if raw.obj_coords:
        out += ["OBJACOORD", str(len(raw.obj_coords))]
        out += [f"{j} {v!r}" for j, v in sorted(raw.obj_coords.items())] + [""]
    if raw.obj_const:
        out += ["OBJBCOORD", repr(raw.obj_const), ""]
    if raw.a_coords:
        out += ["ACOORD", str(len(raw.a_coords))]
        out += [f"{i} {j} {v!r}" for (i, j), v in sorted(raw.a_coords.items())] + [""]
    if raw.b_coords:
        out += ["BCOORD", str(len(raw.b_coords))]
        out += [f"{i} {v!r}" for i, v in sorted(raw.b_coords.items())] + [""]
    return "\n".join(out)


def iter_index_mutations(text: str) -> Iterable[tuple[str, str]]:
    """Corrupt every index field of a valid document to an out-of-range value.

    Yields ``(label, mutated_text)`` pairs.  Each mutation touches exactly one
    token of an INT, OBJACOORD, ACOORD or BCOORD entry, or one count line.
    """
    raw = parse_cbf(text)
    n, m = raw.n, raw.m
    lines = text.splitlines()
    section = None
    remaining = 0
    for k, line in enumerate(lines):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        toks = body.split()
        if remaining == 0 and len(toks) == 1 and toks[0] in KEYWORDS:
            section = toks[0]
            remaining = -1 if section in ("INT", "OBJACOORD", "ACOORD", "BCOORD") else 0
            continue
        if remaining == -1:
            count = int(toks[0])
            remaining = count
            for delta in (1, -1):
                if count + delta >= 0 and not (delta == -1 and count == 0):
                    yield (f"{section}-count{delta:+d}@{k + 1}",
                           _replace_line(lines, k, str(count + delta)))
            continue
        if remaining > 0:
            remaining -= 1
            bounds = {"INT": [n], "OBJACOORD": [n], "ACOORD": [m, n], "BCOORD": [m]}[section]
            for pos, bound in enumerate(bounds):
                for bad in (bound, bound + 7, -1):
                    new = list(toks)
                    new[pos] = str(bad)
                    yield (f"{section}-idx{pos}={bad}@{k + 1}", _replace_line(lines, k, " ".join(new)))


def _replace_line(lines: list[str], k: int, new: str) -> str:
    out = list(lines)
    out[k] = new
    return "\n".join(out) + "\n"


__all__ = [
    "CbfError", "CbfHeaderError", "CbfKeywordError", "CbfConeError", "CbfIndexError",
    "CbfDuplicateError", "RawInstance", "StandardProblem", "parse_cbf", "read_cbf",
    "to_standard_form", "detect_implied_integers", "flag_redundant_rows", "load_problem",
    "write_cbf", "iter_index_mutations", "raw_point_to_standard", "rsoc_to_soc",
]
