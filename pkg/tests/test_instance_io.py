import math

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given
from hypothesis import strategies as st

from coniclap.cones import ConeKind, ConeProduct, in_cone
from coniclap.fixtures import example4_cbf, example4_file
from coniclap.instance_io import (CbfConeError, CbfDuplicateError, CbfError, CbfHeaderError,
                                  CbfIndexError, CbfKeywordError, StandardProblem,
                                  detect_implied_integers, flag_redundant_rows, iter_index_mutations,
                                  parse_cbf, raw_point_to_standard, read_cbf, to_standard_form, write_cbf)

VALID = ["minimal", "free", "nonneg", "nonpos", "zero", "soc", "rsoc"]
MALFORMED = {
    "bad_header": CbfHeaderError,
    "bad_keyword": CbfKeywordError,
    "bad_cone": CbfConeError,
    "bad_index": CbfIndexError,
    "bad_duplicate": CbfDuplicateError,
    "bad_syntax": CbfError,
}


def test_minimal_document():
    raw = parse_cbf("VER\n3\nOBJSENSE\nMIN\nVAR\n1 1\nF 1\n")
    assert raw.var_blocks == [("F", 1)]
    assert raw.obj_coords == {} and raw.n == 1
    P = to_standard_form(raw)
    assert P.n == 1 and P.m == 0 and P.K.blocks[0].kind is ConeKind.FREE


def test_example4_encoding():
    raw = parse_cbf(example4_cbf(1.1))
    assert raw.var_blocks == [("Q", 3)]
    assert raw.int_indices == [1, 2]
    assert raw.con_blocks == [("L=", 1)]
    P = to_standard_form(raw)
    assert P.n == 3 and P.m == 1
    assert P.b.tolist() == [1.1]
    assert P.integer_mask.tolist() == [False, True, True]


@pytest.mark.parametrize("case", "abc")
def test_bundled_example4_files_parse(case):
    raw = parse_cbf(example4_file(case))
    assert raw.var_blocks == [("Q", 3)]


@pytest.mark.parametrize("name", VALID)
def test_valid_fixture_roundtrip(cbf_dir, name):
    raw = read_cbf(cbf_dir / f"{name}.cbf")
    again = parse_cbf(write_cbf(raw))
    assert again.to_json() == raw.to_json()
    P = to_standard_form(raw)
    assert P.K.total_dim == P.n
    assert P.A.shape == (P.m, P.n)


@pytest.mark.parametrize("name,err", sorted(MALFORMED.items()))
def test_malformed_fixture_fails_with_declared_error(cbf_dir, name, err):
    with pytest.raises(err) as info:
        read_cbf(cbf_dir / f"{name}.cbf")
    assert type(info.value) is err
    assert info.value.line is not None
    assert f"line {info.value.line}" in str(info.value)


def test_unknown_keyword_names_line():
    with pytest.raises(CbfKeywordError) as info:
        parse_cbf("VER\n3\nVAR\n1 1\nF 1\n\nWHAT\n")
    assert info.value.line == 7


@pytest.mark.parametrize("text", [
    "VER\n3\nVAR\n3 1\nEXP 3\n",
    "VER\n3\nVAR\n1 1\nF 1\nPSDCON\n1\n2\n",
])
def test_unsupported_cones(text):
    with pytest.raises(CbfConeError):
        parse_cbf(text)


@pytest.mark.parametrize("text", [
    "",
    "VAR\n1 1\nF 1\n",
    "VER\n9\nVAR\n1 1\nF 1\n",
    "VER\n3\nOBJSENSE\nMIN\n",
])
def test_header_errors(text):
    with pytest.raises(CbfHeaderError):
        parse_cbf(text)


def test_duplicate_int_and_section():
    with pytest.raises(CbfDuplicateError):
        parse_cbf("VER\n3\nVAR\n2 1\nF 2\nINT\n2\n0\n0\n")
    with pytest.raises(CbfKeywordError):
        parse_cbf("VER\n3\nVAR\n1 1\nF 1\nVAR\n1 1\nF 1\n")


def test_nonneg_slack_row():
    P = to_standard_form(read_cbf_text("nonneg"))
    # a'x - s = -b with s in R+
    assert P.K.blocks[-1] == ConeProduct.of(("L+", 1)).blocks[0]
    assert P.A.toarray().tolist() == [[1.0, 1.0, -1.0]]
    assert P.b.tolist() == [2.0]


def read_cbf_text(name):
    from pathlib import Path
    return parse_cbf((Path(__file__).parent / "fixtures" / "cbf" / f"{name}.cbf").read_text())


def test_maximization_sign_and_offset():
    raw = read_cbf_text("nonpos")
    P = to_standard_form(raw)
    assert P.obj_sign == -1.0 and P.obj_offset == 2.5
    assert P.c[:2].tolist() == [-1.0, -1.0]
    x = np.array([-1.0, -2.0, -2.0])
    assert P.original_objective(x) == pytest.approx(-3.0 + 2.5)


def test_zero_variable_block_is_fixed():
    P = to_standard_form(read_cbf_text("zero"))
    A = P.A.toarray()
    assert any(row.tolist() == [0, 0, 1] for row in A)


def test_rsoc_block_bijection():
    raw = read_cbf_text("rsoc")
    P = to_standard_form(raw)
    assert all(b.kind is not ConeKind.RSOC for b in P.K.blocks)
    # (1, 1, 1) satisfies 2*1*1 >= 1, so it maps into the SOC block
    u = P.raw_map[:3, :3].toarray() @ np.array([1.0, 1.0, 1.0])
    assert u[0] >= np.linalg.norm(u[1:]) - 1e-12


@given(st.floats(-3, 3), st.floats(0.1, 3), st.floats(0, 2), st.floats(0, 2))
def test_standard_form_preserves_feasible_points(x2, x0, extra1, extra3):
    raw = read_cbf_text("rsoc")
    P = to_standard_form(raw)
    x1 = x2 * x2 / (2 * x0) + extra1
    # constraint block (x3 + 1, x3, x2) in QR needs 2 (x3 + 1) x3 >= x2^2
    x3 = math.sqrt(x2 * x2 / 2) + extra3
    x_raw = np.array([x0, x1, x2, x3])
    x = raw_point_to_standard(raw, P, x_raw)
    scale = 1 + np.abs(x).max()
    assert np.abs(P.A @ x - P.b).max() <= 1e-8 * scale
    assert in_cone(P.K, x, 1e-8)
    assert np.allclose(P.raw_map @ x, x_raw, atol=1e-8)


def test_soc_constraint_roundtrip():
    raw = read_cbf_text("soc")
    P = to_standard_form(raw)
    x_raw = np.array([2.0, 0.3, 0.5])
    x = raw_point_to_standard(raw, P, x_raw)
    assert np.abs(P.A @ x - P.b).max() <= 1e-10
    assert in_cone(P.K, x, 1e-9)


def _implied_problem(rows, b, ints, n):
    K = ConeProduct.of(("F", n))
    imask = np.zeros(n, bool)
    imask[ints] = True
    return StandardProblem(np.zeros(n), sp.csr_matrix(np.array(rows, float)), np.array(b, float), K, imask, None)


def test_implied_integer_single_pass():
    # x1 + x2 - y = 0
    P = _implied_problem([[1, 1, -1]], [0], [0, 1], 3)
    assert detect_implied_integers(P).tolist() == [False, False, True]


def test_implied_integer_chain():
    # x1 + x2 - y = 0, y + x3 - w = 0
    P = _implied_problem([[1, 1, -1, 0, 0], [0, 0, 1, 1, -1]], [0, 0], [0, 1, 3], 5)
    assert detect_implied_integers(P).tolist() == [False, False, True, False, True]


def test_implied_integer_blocked_by_fraction():
    P = _implied_problem([[0.5, -1]], [0], [0], 2)
    assert not detect_implied_integers(P).any()


@given(st.lists(st.booleans(), min_size=5, max_size=5), st.lists(st.booleans(), min_size=5, max_size=5))
def test_implied_integers_monotone(a, extra):
    rows = [[1, 1, -1, 0, 0], [0, 0, 1, 1, -1], [2, 0, 0, -1, 0]]
    base = np.array(a)
    more = base | np.array(extra)
    P1 = _implied_problem(rows, [0, 1, 0], np.flatnonzero(base), 5)
    P2 = _implied_problem(rows, [0, 1, 0], np.flatnonzero(more), 5)
    i1 = detect_implied_integers(P1) | base
    i2 = detect_implied_integers(P2) | more
    assert np.all(i2[i1])


def test_masks_are_disjoint():
    P = to_standard_form(parse_cbf(example4_cbf(1.0)))
    assert not np.any(P.integer_mask & P.implied_integer_mask)
    assert P.implied_integer_mask[0]  # x0 = 1 is integral


def test_redundant_rows_flagged():
    A = sp.csr_matrix([[1.0, 1.0], [2.0, 2.0], [0.0, 1.0]])
    flagged = flag_redundant_rows(A)
    assert len(flagged) == 1 and flagged[0] in (0, 1)


def test_json_dump_is_canonical():
    P = to_standard_form(read_cbf_text("soc"))
    d = P.to_json()
    assert d["ordering"].startswith("original variables first")
    assert d["n"] == P.n


@pytest.mark.parametrize("name", [v for v in VALID if v != "minimal"])
def test_fuzz_corpus_rejected(cbf_dir, name):
    text = (cbf_dir / f"{name}.cbf").read_text()
    muts = list(iter_index_mutations(text))
    assert muts
    for label, bad in muts:
        with pytest.raises(CbfError):
            parse_cbf(bad)
