import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from stagemark.errors import ParameterError
from stagemark.imageio import BinaryImage, RasterImage
from stagemark.metrics import (
    EvaluationReport, ber, nc, psnr, reports_from_json, reports_to_json, reports_to_tsv,
)


def gray(values):
    return RasterImage(np.asarray(values, np.uint8))


def test_psnr_identical_is_inf():
    a = gray(np.full((4, 4), 9))
    assert psnr(a, a) == math.inf


def test_psnr_single_sample():
    a = np.zeros((10, 10), np.uint8)
    b = a.copy()
    b[3, 4] = 1
    assert psnr(gray(a), gray(b)) == pytest.approx(68.1308036086791, abs=1e-9)


def test_psnr_extremes_and_symmetry():
    a, b = gray(np.zeros((3, 3))), gray(np.full((3, 3), 255))
    assert psnr(a, b) == 0.0
    c = gray(np.random.default_rng(0).integers(0, 256, (8, 8)))
    z = gray(np.zeros((8, 8)))
    assert psnr(z, c) == psnr(c, z)


def test_psnr_mismatch():
    with pytest.raises(ParameterError):
        psnr(gray(np.zeros((2, 2))), gray(np.zeros((2, 3))))


def bits(v):
    return BinaryImage(np.asarray(v, np.uint8).reshape(1, -1))


def test_ber():
    a = bits([1, 0, 1, 1])
    assert ber(a, a) == 0
    assert ber(a, bits([0, 1, 0, 0])) == 1
    x = np.zeros(64, np.uint8)
    y = x.copy()
    y[10] = 1
    assert ber(bits(x), bits(y)) == 0.015625


@given(st.lists(st.tuples(st.booleans(), st.booleans(), st.booleans()), min_size=1, max_size=64))
def test_ber_is_metric(rows):
    a, b, c = (bits([r[i] for r in rows]) for i in range(3))
    assert ber(a, b) == ber(b, a)
    assert ber(a, c) <= ber(a, b) + ber(b, c) + 1e-12


def test_nc():
    a = bits([1, 0, 1, 1, 0])
    assert nc(a, a) == 1.0
    assert nc(a, bits([0, 1, 0, 0, 1])) == 0.0
    assert nc(a, bits([1, 1, 1, 1, 1])) == 1.0  # asymmetry: all-ones matches everything
    with pytest.raises(ParameterError):
        nc(bits([0, 0]), bits([1, 1]))


def test_report_serialization():
    rows = [
        EvaluationReport("none", 60.5, math.inf, 0.0, 1.0, True, 0.75),
        EvaluationReport("mean:3", 60.5, 40.25, 0.43, 0.57, False, 0.75),
    ]
    tsv = reports_to_tsv(rows).splitlines()
    assert tsv[0].split("\t") == [
        "attack", "psnr_host_vs_marked", "psnr_marked_vs_attacked", "ber", "nc", "present", "tau",
    ]
    assert tsv[1].split("\t")[2] == "inf"
    assert tsv[2].split("\t")[5] == "false"
    assert reports_from_json(reports_to_json(rows, host="h")) == rows
