"""Battery of end-to-end invariant checks behind ``kmask verify``."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

import numpy as np

from kmask.alias_sim import clamp_reconstruct, masked_image, predicted_alias_image
from kmask.dft_core import dft_forward, dft_inverse, dft_reference, fftshift, ifftshift
from kmask.mask_gen import (
    custom_mask,
    default_negative_offset,
    equispaced_mask,
    offset_mask_irregular,
    shift_mask,
)
from kmask.phantom import PhantomSpec, make_phantom
from kmask.symmetry import (
    DEFAULT_RCOND,
    measurement_matrix,
    numeric_rank,
    redundancy_report,
    retained_frequencies,
)

__all__ = ["CheckResult", "ALIAS_GRID_N", "ALIAS_GRID_R", "run_verify"]

ALIAS_GRID_N = (8, 12, 16, 24, 60, 64)
ALIAS_GRID_R = (2, 3, 4, 5, 8)
ALGO1_R = (2, 3, 4, 8)
CLAMP_N = (8, 64, 320)


@dataclass
class CheckResult:
    name: str
    passed: bool
    cases: int
    worst: Optional[float] = None
    tolerance: Optional[float] = None
    detail: str = ""
    failures: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "cases": self.cases,
            "worst": self.worst,
            "tolerance": self.tolerance,
            "detail": self.detail,
        }


def _complex_normal(rng, n):
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def check_dft_reference(rng, signals: int = 200, max_n: int = 64, tol: float = 1e-11) -> CheckResult:
    worst = 0.0
    for _ in range(signals):
        n = int(rng.integers(1, max_n + 1))
        x = _complex_normal(rng, n)
        for fast, inverse in ((dft_forward, False), (dft_inverse, True)):
            ref = dft_reference(x, inverse=inverse)
            err = np.max(np.abs(fast(x) - ref)) / np.max(np.abs(ref))
            worst = max(worst, float(err))
    return CheckResult(
        "dft_fast_matches_reference", worst < tol, 2 * signals, worst, tol,
        f"{signals} random signals, N in [1, {max_n}], both directions",
    )


def check_alias_identity(rng, tol: float = 1e-10, signals: int = 20) -> CheckResult:
    """Masked image equals the phase-weighted sum of shifted copies."""
    worst = 0.0
    cases = 0
    failures = []
    for n in ALIAS_GRID_N:
        for r in ALIAS_GRID_R:
            if n % r:
                continue
            for offset in range(r):
                mask = equispaced_mask(n, r, offset)
                for _ in range(signals):
                    x = _complex_normal(rng, n)
                    err = np.max(np.abs(masked_image(x, mask) - predicted_alias_image(x, r, offset).predicted))
                    rel = float(err / np.max(np.abs(x)))
                    worst = max(worst, rel)
                    cases += 1
                    if not rel < tol:
                        failures.append((n, r, offset))
    return CheckResult(
        "alias_identity", not failures, cases, worst, tol,
        f"N in {ALIAS_GRID_N}, R in {ALIAS_GRID_R} with R | N, all offsets, {signals} signals each; "
        f"{len(set(failures))} failing (N, R, offset) cells",
        sorted(set(failures)),
    )


def check_algorithm1(neg_offsets: Mapping[int, int], max_n: int = 128) -> CheckResult:
    failures = []
    cases = 0
    for r in ALGO1_R:
        neg = neg_offsets.get(r, default_negative_offset(r))
        for n in range(r, max_n + 1, r):
            cases += 1
            irregular = offset_mask_irregular(n, r, 1, neg)
            if not np.array_equal(irregular.bits, equispaced_mask(n, r, 1).bits):
                failures.append((n, r))
    neg4 = neg_offsets.get(4, default_negative_offset(4))
    odd = offset_mask_irregular(13, 4, 1, neg4)
    cases += 1
    odd_ok = odd.indices.tolist() == [1, 5, 10] and retained_frequencies(odd) == [1, 5, -3]
    if not odd_ok:
        failures.append((13, 4))
    return CheckResult(
        "algorithm1_matches_naive", not failures, cases, None, None,
        f"R in {ALGO1_R}, N multiples of R up to {max_n}, plus N=13 R=4 -> {{1,5,10}}; "
        f"{len(failures)} mismatches",
        failures,
    )


def check_worked_example() -> CheckResult:
    got0 = retained_frequencies(equispaced_mask(12, 4, 0))
    got1 = retained_frequencies(equispaced_mask(12, 4, 1))
    rep0 = redundancy_report(equispaced_mask(12, 4, 0))
    rep1 = redundancy_report(equispaced_mask(12, 4, 1))
    ok = (
        got0 == [0, 4, -4]
        and got1 == [1, 5, -3]
        and (rep0.unique_classes, rep0.real_dof) == (2, 3)
        and (rep1.unique_classes, rep1.real_dof) == (3, 6)
    )
    return CheckResult(
        "worked_example_n12", ok, 2, None, None,
        f"offset 0 keeps {got0} (dof {rep0.real_dof}), offset 1 keeps {got1} (dof {rep1.real_dof})",
    )


def check_rank_dof(rng, tol: float = DEFAULT_RCOND, max_n: int = 16, random_masks: int = 500,
                   random_n: int = 64) -> CheckResult:
    failures = []
    cases = 0
    masks = []
    for n in range(2, max_n + 1):
        for r in range(2, n + 1):
            for offset in range(r):
                if offset < n:
                    masks.append(equispaced_mask(n, r, offset))
    added = 0
    while added < random_masks:
        bits = rng.random(random_n) < rng.uniform(0.05, 0.6)
        if bits.any():
            masks.append(custom_mask(bits))
            added += 1
    for mask in masks:
        cases += 1
        rank = numeric_rank(measurement_matrix(mask), tol)
        dof = redundancy_report(mask).real_dof
        if rank != dof:
            failures.append((mask.n, mask.indices.tolist(), rank, dof))
    return CheckResult(
        "rank_equals_real_dof", not failures, cases, None, tol,
        f"every equispaced mask with N <= {max_n} and random masks at N = {random_n}; "
        f"{len(failures)} mismatches",
        failures,
    )


def check_shift(rng, max_n: int = 33) -> CheckResult:
    failures = []
    cases = 0
    for n in range(1, max_n + 1):
        cases += 1
        x = _complex_normal(rng, n)
        if not np.array_equal(ifftshift(fftshift(x)), x):
            failures.append(("fftshift_roundtrip", n))
        if n >= 2:
            mask = offset_mask_irregular(n, 2, 1, 0)
            if shift_mask(shift_mask(mask)) != mask:
                failures.append(("mask_roundtrip", n))
    for n in (12, 13):
        for r, offset in ((4, 0), (4, 1), (3, 2)):
            cases += 1
            mask = equispaced_mask(n, r, offset)
            X = _complex_normal(rng, n)
            lhs = np.where(shift_mask(mask).bits, fftshift(X), 0)
            rhs = fftshift(np.where(mask.bits, X, 0))
            if not np.array_equal(lhs, rhs):
                failures.append(("commute", n, r, offset))
    return CheckResult(
        "shift_handling", not failures, cases, None, None,
        f"fftshift/shift_mask round trips for N <= {max_n}; masking commutes with shifting for N in (12, 13)",
        failures,
    )


def clamp_phantoms(n: int, count: int, seed: int):
    """Seeded real non-negative phantoms with support inside one half-width window."""
    rng = np.random.default_rng(seed)
    kinds = ("box", "smooth_bumps", "random_smooth")
    for i in range(count):
        length = int(rng.integers(1, n // 2 + 1))
        spec = PhantomSpec(
            n=n,
            kind=kinds[i % len(kinds)],
            support_fraction=length / n,
            start=int(rng.integers(n)),
            seed=int(rng.integers(2**31)),
        )
        yield spec, make_phantom(spec).real


def check_clamp(tol: float = 1e-9, count: int = 50, seed: int = 0) -> CheckResult:
    worst = 0.0
    failures = []
    cases = 0
    for n in CLAMP_N:
        mask1 = equispaced_mask(n, 4, 1)
        mask0 = equispaced_mask(n, 4, 0)
        for spec, x in clamp_phantoms(n, count, seed + n):
            cases += 1
            err = float(np.max(np.abs(clamp_reconstruct(masked_image(x, mask1), 4) - x)))
            worst = max(worst, err)
            mse0 = float(np.mean((clamp_reconstruct(masked_image(x, mask0), 4) - x) ** 2))
            if not err < tol or not mse0 > 0:
                failures.append((n, spec.seed, err, mse0))
    return CheckResult(
        "clamp_recovery", not failures, cases, worst, tol,
        f"{count} half-support phantoms for each N in {CLAMP_N}; offset 1 exact, offset 0 MSE > 0",
        failures,
    )


def run_verify(
    alias_tol: float = 1e-10,
    rank_tol: float = DEFAULT_RCOND,
    clamp_tol: float = 1e-9,
    neg_offsets: Optional[Mapping[int, int]] = None,
    seed: int = 0,
    progress: Optional[Callable[[CheckResult], None]] = None,
) -> tuple[list[CheckResult], float]:
    """Run every check; returns the results and the elapsed wall time in seconds.

    ``neg_offsets`` overrides the negative-half offset per acceleration, for
    fault-injection runs.
    """
    rng = np.random.default_rng(seed)
    start = time.perf_counter()
    steps = [
        lambda: check_dft_reference(rng),
        lambda: check_alias_identity(rng, alias_tol),
        lambda: check_algorithm1(neg_offsets or {}),
        check_worked_example,
        lambda: check_rank_dof(rng, rank_tol),
        lambda: check_shift(rng),
        lambda: check_clamp(clamp_tol, seed=seed),
    ]
    results = []
    for step in steps:
        result = step()
        results.append(result)
        if progress is not None:
            progress(result)
    return results, time.perf_counter() - start
