"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the summary lines.
"""

import json
import time
from contextlib import contextmanager

import numpy as np

from kmask import io
from kmask.alias_sim import clamp_reconstruct, masked_image, predicted_alias_image
from kmask.cli import main
from kmask.dft_core import fftshift
from kmask.mask_gen import (
    custom_mask,
    default_negative_offset,
    equispaced_mask,
    offset_mask_irregular,
    shift_mask,
)
from kmask.symmetry import measurement_matrix, numeric_rank, redundancy_report, retained_frequencies
from kmask.verify import clamp_phantoms


@contextmanager
def criterion(number, title, time_limit=None):
    start = time.perf_counter()
    status = "FAIL"
    try:
        yield
        elapsed = time.perf_counter() - start
        if time_limit is not None:
            assert elapsed < time_limit, f"took {elapsed:.1f} s, limit {time_limit} s"
        status = "PASS"
    finally:
        elapsed = time.perf_counter() - start
        print(f"\n[{status}] criterion {number}: {title} ({elapsed:.2f} s)")


def test_criterion_1_alias_identity():
    with criterion(1, "alias identity over the (N, R, offset) grid", time_limit=10):
        rng = np.random.default_rng(1)
        worst = 0.0
        for r in (2, 3, 4, 5, 8):
            for n in (8, 12, 16, 24, 60, 64):
                if n % r:
                    continue
                for offset in range(r):
                    mask = equispaced_mask(n, r, offset)
                    for _ in range(20):
                        x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
                        err = np.max(np.abs(masked_image(x, mask) - predicted_alias_image(x, r, offset).predicted))
                        worst = max(worst, err / np.max(np.abs(x)))
        assert worst < 1e-10, worst


def test_criterion_2_worked_example():
    with criterion(2, "retained frequencies for N=12, R=4"):
        assert retained_frequencies(equispaced_mask(12, 4, 0)) == [0, 4, -4]
        assert retained_frequencies(equispaced_mask(12, 4, 1)) == [1, 5, -3]


def test_criterion_3_rank_equals_dof():
    with criterion(3, "unique classes, real dof and operator rank", time_limit=30):
        rep0 = redundancy_report(equispaced_mask(12, 4, 0))
        rep1 = redundancy_report(equispaced_mask(12, 4, 1))
        assert (rep0.unique_classes, rep1.unique_classes) == (2, 3)
        assert (rep0.real_dof, rep1.real_dof) == (3, 6)
        masks = [
            equispaced_mask(n, r, o)
            for n in range(2, 17)
            for r in range(2, n + 1)
            for o in range(r)
        ]
        rng = np.random.default_rng(3)
        random_masks = []
        while len(random_masks) < 500:
            bits = rng.random(64) < rng.uniform(0.05, 0.6)
            if bits.any():
                random_masks.append(custom_mask(bits))
        masks.extend(random_masks)
        for mask in masks:
            rank = numeric_rank(measurement_matrix(mask), 1e-9)
            assert rank == redundancy_report(mask).real_dof, (mask.n, mask.indices.tolist())


def test_criterion_4_clamp_reconstruction():
    with criterion(4, "clamp reconstruction of half-support phantoms"):
        for n in (8, 64, 320):
            mask1 = equispaced_mask(n, 4, 1)
            mask0 = equispaced_mask(n, 4, 0)
            count = 0
            for _, x in clamp_phantoms(n, 50, seed=100 + n):
                count += 1
                assert np.all(x >= 0)
                err = np.max(np.abs(clamp_reconstruct(masked_image(x, mask1), 4) - x))
                assert err < 1e-9, (n, err)
                mse0 = np.mean((clamp_reconstruct(masked_image(x, mask0), 4) - x) ** 2)
                assert mse0 > 0
            assert count == 50


def test_criterion_5_algorithm1():
    with criterion(5, "irregular-width construction matches the equispaced mask"):
        for r in (2, 3, 4, 8):
            for n in range(r, 129, r):
                got = offset_mask_irregular(n, r, 1, default_negative_offset(r))
                assert np.array_equal(got.bits, equispaced_mask(n, r, 1).bits), (n, r)
        odd = offset_mask_irregular(13, 4, 1, default_negative_offset(4))
        assert odd.indices.tolist() == [1, 5, 10]
        assert retained_frequencies(odd) == [1, 5, -3]


def test_criterion_6_recon_surrogate(tmp_path):
    with criterion(6, "least-squares surrogate: offset 1 beats offset 0", time_limit=60):
        out = tmp_path / "recon.json"
        rc = main(["recon", "--n", "64", "--accel", "4", "--center", "0", "--trials", "200",
                   "--phantom", "random_smooth", "--seed", "0", "--out", str(out)])
        assert rc == 0
        report = json.loads(out.read_text())
        io.validate(report, "recon_report")
        arms = {a["arm"]: a for a in report["arms"]}
        for name, arm in arms.items():
            print(f"  {name:>8}: mean_mse={arm['mean_mse']:.6g} std={arm['std_mse']:.3g}")
        assert arms["offset1"]["mean_mse"] < arms["offset0"]["mean_mse"]
        assert "random" in arms and np.isfinite(arms["random"]["mean_mse"])
        assert all(a["trials"] == 200 for a in arms.values())


def test_criterion_7_shift_commutes():
    with criterion(7, "masking commutes with fftshift"):
        rng = np.random.default_rng(7)
        for n in (12, 13):
            for r in (2, 3, 4):
                for offset in range(r):
                    mask = equispaced_mask(n, r, offset)
                    X = rng.standard_normal(n) + 1j * rng.standard_normal(n)
                    lhs = fftshift(X) * shift_mask(mask).bits
                    rhs = fftshift(X * mask.bits)
                    assert np.array_equal(lhs, rhs), (n, r, offset)


def test_criterion_8_verify_suite(tmp_path):
    with criterion(8, "kmask verify passes end to end", time_limit=120):
        out = tmp_path / "verify.json"
        assert main(["verify", "--out", str(out)]) == 0
        assert json.loads(out.read_text())["passed"] is True
