"""Acceptance gate: one test per exit criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v``; the summary lines are
repeated in the "acceptance criteria" section at the end of the run.
"""
import math
import time

import numpy as np
import pytest

from stagemark import corpus, imageio
from stagemark.attacks import AttackSpec, apply_attack
from stagemark.chaos import CatMapParams, cat_map_apply_many, cat_map_period, cat_map_periods, generate_key
from stagemark.cli import main as cli_main
from stagemark.metrics import ber, nc, psnr
from stagemark.signal import WatermarkBits, decrypt, encrypt
from stagemark.staging import detect, embed, extract
from stagemark.wavelet import decompose, reconstruct

TAU = 0.75
N_ROBUST = 20
PSNR_FLOOR = 48.1


def standard_case(i):
    """Seeded (host, watermark, key) from the natural-image corpus."""
    return corpus.natural_host(1000 + i), corpus.random_watermark(2000 + i), generate_key(3000 + i, 32)


def robustness(cases):
    """NC after each filtering attack for every (host, wm, key) case."""
    windows = {"mean_filter": (3, 9), "median_filter": (3, 9), "highpass_filter": (3,)}
    scores = {(k, w): [] for k, ws in windows.items() for w in ws}
    for host, wm, key in cases:
        marked = embed(host, wm, key).image
        for kind, ws in windows.items():
            for w in ws:
                attacked = apply_attack(marked, AttackSpec(kind, window=w))
                scores[kind, w].append(detect(attacked, wm, key, TAU)[1])
    return {k: np.array(v) for k, v in scores.items()}


def crop_failures(cases, offsets):
    """Number of (case, 64x64 region) pairs whose extraction is not exact."""
    bad = 0
    for host, wm, key in cases:
        marked = embed(host, wm, key).image
        for x, y in offsets:
            cropped = apply_attack(marked, AttackSpec("crop", region=(x, y, 64, 64)))
            bad += ber(wm, extract(cropped, key)) != 0
    return bad


ALIGNED = [(x, y) for y in range(0, 512, 64) for x in range(0, 512, 64)]
UNALIGNED = [tuple(int(v) for v in p) for p in np.random.default_rng(77).integers(0, 449, (16, 2))]


@pytest.fixture(scope="module")
def standard_cases():
    return [standard_case(i) for i in range(N_ROBUST)]


@pytest.fixture(scope="module")
def standard_scores(standard_cases):
    return robustness(standard_cases)


def test_c01_roundtrip(record_criterion):
    start = time.perf_counter()
    errors = []
    for i in range(50):
        host = corpus.noise_host(i)
        wm = corpus.random_watermark(500 + i)
        key = generate_key(900 + i, 32)
        errors.append(ber(wm, extract(embed(host, wm, key).image, key)))
    elapsed = time.perf_counter() - start
    ok = max(errors) == 0 and elapsed < 30
    record_criterion(1, "round-trip BER = 0 on 50 random triples, < 30 s", ok,
                     f"max BER {max(errors)}, {elapsed:.1f} s")
    assert ok


def test_c02_imperceptibility(record_criterion, standard_cases):
    values = []
    for i in range(50):
        host, wm, key = corpus.noise_host(i), corpus.random_watermark(500 + i), generate_key(900 + i, 32)
        values.append(psnr(host, embed(host, wm, key).image))
    for host, wm, key in standard_cases:
        values.append(psnr(host, embed(host, wm, key).image))
    ok = min(values) >= PSNR_FLOOR
    record_criterion(2, f"PSNR(host, marked) >= {PSNR_FLOOR} dB on every RGB case", ok,
                     f"min {min(values):.2f} dB over {len(values)} cases")
    assert ok


def _rate(scores):
    return float(np.mean(scores >= TAU))


def test_c03_lpf_mpf(record_criterion, standard_scores):
    s = standard_scores
    mean3, med3 = _rate(s["mean_filter", 3]), _rate(s["median_filter", 3])
    mean_drop = float(np.mean(s["mean_filter", 9] < s["mean_filter", 3]))
    med_drop = float(np.mean(s["median_filter", 9] < s["median_filter", 3]))
    ok = min(mean3, med3) >= 0.9 and min(mean_drop, med_drop) >= 0.9
    record_criterion(
        3, "mean/median window 3 present >= 90%; NC(9) < NC(3) in >= 90%", ok,
        f"present mean3 {mean3:.0%} (median NC {np.median(s['mean_filter', 3]):.3f}), "
        f"median3 {med3:.0%}; drop mean {mean_drop:.0%}, median {med_drop:.0%}",
    )
    assert ok


def test_c04_hpf(record_criterion, standard_scores):
    rate = _rate(standard_scores["highpass_filter", 3])
    ok = rate >= 0.9
    record_criterion(4, "unsharp highpass window 3 present >= 90%", ok,
                     f"present {rate:.0%}, median NC {np.median(standard_scores['highpass_filter', 3]):.3f}")
    assert ok


def test_c05_cropping(record_criterion, standard_cases):
    cases = standard_cases[:5]
    bad = crop_failures(cases, ALIGNED + UNALIGNED)
    total = len(cases) * (len(ALIGNED) + len(UNALIGNED))
    ok = bad == 0
    record_criterion(5, "any single 64x64 region cropped to mid-gray -> BER = 0", ok,
                     f"{total - bad}/{total} exact")
    assert ok


def test_c06_cat_map(record_criterion):
    rng = np.random.default_rng(6)
    mismatches = 0
    checked = 0
    for n in range(2, 17):
        for _ in range(20):
            b, c = (int(v) for v in rng.integers(1, 12, 2))
            a, d = 1, 1 + b * c
            if rng.random() < 0.5:  # also cover a > 1: [[1+bc, b], [c, 1]]
                a, d = d, a
            n_iter = int(rng.integers(1, 40))
            p = CatMapParams(a, b, c, d, n_iter, n)
            ys, xs = np.divmod(np.arange(n * n), n)
            x, y = cat_map_apply_many(p, xs, ys)
            mismatches += len(set(zip(x.tolist(), y.tolist()))) != n * n
            periods = cat_map_periods(p)
            for py in range(n):
                for px in range(n):
                    cx, cy, k = px, py, 0
                    while True:
                        cx, cy = (a * cx + b * cy) % n, (c * cx + d * cy) % n
                        k += 1
                        if (cx, cy) == (px, py):
                            break
                    mismatches += cat_map_period(p, px, py) != k
                    mismatches += periods[py, px] != k
                    checked += 1
    ok = mismatches == 0
    record_criterion(6, "cat map bijective and periods match brute force, N = 2..16", ok,
                     f"{checked} points, {mismatches} mismatches")
    assert ok


def test_c07_cipher_involution(record_criterion):
    rng = np.random.default_rng(7)
    failures = 0
    for i in range(1000):
        side = int(rng.integers(1, 33))
        key = generate_key(int(rng.integers(1 << 40)), side)
        w = WatermarkBits(side, side, rng.integers(0, 2, side * side))
        failures += decrypt(encrypt(w, key), key) != w
    ok = failures == 0
    record_criterion(7, "decrypt(encrypt(w)) = w on 1000 random pairs", ok, f"{failures} failures")
    assert ok


def test_c08_dwt(record_criterion):
    rng = np.random.default_rng(8)
    worst_err, worst_rel = 0.0, 0.0
    for _ in range(20):
        x = rng.uniform(0, 255, (512, 512))
        pyr = decompose(x, 4)
        worst_err = max(worst_err, float(np.abs(reconstruct(pyr) - x).max()))
        energy = sum(float(np.sum(c * c)) for c in pyr.coefficients())
        ref = float(np.sum(x * x))
        worst_rel = max(worst_rel, abs(energy - ref) / ref)
    ok = worst_err <= 1e-6 and worst_rel <= 1e-6
    record_criterion(8, "4-level Haar reconstruction <= 1e-6, energy within 1e-6 rel", ok,
                     f"max err {worst_err:.2e}, max rel energy {worst_rel:.2e}")
    assert ok


def test_c09_key_sensitivity(record_criterion, standard_cases):
    from dataclasses import replace

    values = []
    for host, wm, key in standard_cases:
        marked = embed(host, wm, key).image
        nudged = replace(key, cipher=replace(key.cipher, z0=key.cipher.z0 + 1e-8))
        values.append(ber(wm, extract(marked, nudged)))
    ok = min(values) >= 0.3
    record_criterion(9, "z0 + 1e-8 -> extraction BER >= 0.3 on 20 cases", ok,
                     f"min BER {min(values):.3f}")
    assert ok


def test_c10_self_watermark(record_criterion, tmp_path):
    cases = []
    for i in range(N_ROBUST):
        host = corpus.natural_host(4000 + i)
        hpath, wpath = tmp_path / f"h{i}.ppm", tmp_path / f"w{i}.pgm"
        imageio.save(hpath, host)
        assert cli_main(["selfmark", str(hpath), "--levels", "4", "-o", str(wpath)]) == 0
        wm = imageio.to_binary(imageio.load(wpath), 128)
        assert (wm.width, wm.height) == (32, 32)
        cases.append((host, wm, generate_key(5000 + i, 32)))

    marked = [embed(h, w, k).image for h, w, k in cases]
    roundtrip = all(ber(w, extract(m, k)) == 0 for (h, w, k), m in zip(cases, marked))
    min_psnr = min(psnr(h, m) for (h, _, _), m in zip(cases, marked))
    s = robustness(cases)
    lpf = min(_rate(s["mean_filter", 3]), _rate(s["median_filter", 3])) >= 0.9
    drop = all(np.mean(s[k, 9] < s[k, 3]) >= 0.9 for k in ("mean_filter", "median_filter"))
    hpf = _rate(s["highpass_filter", 3]) >= 0.9
    crop_ok = crop_failures(cases[:3], ALIGNED) == 0
    parts = {
        "c1": roundtrip, "c2": min_psnr >= PSNR_FLOOR, "c3": lpf and drop,
        "c4": hpf, "c5": crop_ok,
    }
    ok = all(parts.values())
    record_criterion(10, "self-derived 32x32 watermark passes criteria 1-5", ok,
                     " ".join(f"{k}={'ok' if v else 'FAIL'}" for k, v in parts.items()))
    assert ok
