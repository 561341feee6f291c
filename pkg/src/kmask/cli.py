"""Command-line entry point: ``kmask {mask,simulate,analyze,recon,verify}``.

Exit codes: 0 success, 1 I/O failure, 2 usage error, 3 verification failure.
The default seed comes from the ``KMASK_SEED`` environment variable (0 if unset).
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from pathlib import Path

import jsonschema
import numpy as np

from kmask import io
from kmask.alias_sim import clamp_reconstruct, predicted_alias_image
from kmask.estimators import build_mask
from kmask.mask_gen import SamplingMask, custom_mask, full_mask, shift_mask
from kmask.phantom import PHANTOM_KINDS, PHASE_MODELS, PhantomSpec, make_phantom
from kmask.recon import run_recon
from kmask.symmetry import DEFAULT_RCOND, measurement_matrix, numeric_rank, redundancy_report
from kmask.verify import run_verify

logger = logging.getLogger("kmask")

EXIT_OK = 0
EXIT_IO = 1
EXIT_USAGE = 2
EXIT_VERIFY = 3


class UsageError(Exception):
    pass


def default_seed() -> int:
    value = os.environ.get("KMASK_SEED", "0")
    try:
        return int(value)
    except ValueError:
        raise UsageError(f"KMASK_SEED must be an integer, got {value!r}") from None


# --------------------------------------------------------------------------- args


def _add_mask_args(p: argparse.ArgumentParser, kind_flag: str = "--kind"):
    p.add_argument("--n", type=int, default=64, help="k-space width (default: 64)")
    p.add_argument("--accel", type=int, default=4, help="acceleration factor R (default: 4)")
    p.add_argument(
        kind_flag,
        dest="mask_kind",
        choices=("equispaced", "irregular", "random", "full"),
        default="equispaced",
        help="mask construction (default: equispaced)",
    )
    p.add_argument("--offset", type=int, default=1,
                   help="kept residue mod R; positive-half offset for irregular masks (default: 1)")
    p.add_argument("--offset-neg", type=int, default=None,
                   help="negative-half offset for irregular masks (default: (R-2) mod R)")
    p.add_argument("--center", type=int, default=0, help="lowest-frequency lines to add (default: 0)")
    p.add_argument("--seed", type=int, default=None, help="random seed (default: $KMASK_SEED or 0)")
    p.add_argument("--mask-file", type=Path, default=None, help="read the mask from JSON or CSV instead")


def _add_phantom_args(p: argparse.ArgumentParser):
    p.add_argument("--phantom", choices=PHANTOM_KINDS, default="box", help="phantom kind (default: box)")
    p.add_argument("--support", type=float, default=0.4,
                   help="fraction of the width with signal (default: 0.4)")
    p.add_argument("--start", type=int, default=0, help="first index of the support window (default: 0)")
    p.add_argument("--phase", choices=PHASE_MODELS, default="none", help="phase model (default: none)")
    p.add_argument("--phase-param", type=float, default=0.0,
                   help="angle, ramp slope or random amplitude for the phase model (default: 0)")
    p.add_argument("--noise", type=float, default=0.0, help="complex noise std per component (default: 0)")
    p.add_argument("--height", type=int, default=None, help="rows for a 2D phantom (default: 1D)")
    p.add_argument("--input", type=Path, default=None,
                   help="raw complex signal file (with .json sidecar) instead of a phantom")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kmask",
        description="Equispaced k-space masks, aliasing simulation and conjugate-symmetry analysis.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mask", help="generate a sampling mask")
    _add_mask_args(p)
    p.add_argument("--layout", choices=("unshifted", "shifted"), default="unshifted",
                   help="store the mask for fftshifted data (default: unshifted)")
    p.add_argument("--out", type=Path, default=Path("mask.json"), help="mask JSON path (default: mask.json)")
    p.add_argument("--csv", type=Path, default=None, help="also write the bits as CSV")
    p.add_argument("--pgm", type=Path, default=None, help="also write a PGM strip rendering")

    p = sub.add_parser("simulate", help="mask a phantom's spectrum and compare with the alias prediction")
    _add_mask_args(p, kind_flag="--mask-kind")
    _add_phantom_args(p)
    p.add_argument("--out-dir", type=Path, default=Path("simulate_out"),
                   help="output directory (default: simulate_out)")
    p.add_argument("--verify", action="store_true",
                   help="fail with exit 3 unless max_alias_error < tol * max|x|")
    p.add_argument("--clamp", action="store_true", help="also run the clamp reconstruction")
    p.add_argument("--tol", type=float, default=1e-10, help="relative alias tolerance (default: 1e-10)")
    p.add_argument("--strip-height", type=int, default=16, help="rows used to draw 1D signals (default: 16)")

    p = sub.add_parser("analyze", help="conjugate-symmetry accounting and operator rank")
    _add_mask_args(p)
    p.add_argument("--rank-tol", type=float, default=DEFAULT_RCOND,
                   help=f"relative SVD cutoff (default: {DEFAULT_RCOND:g})")
    p.add_argument("--out", type=Path, default=None, help="report JSON path (default: stdout table only)")
    p.add_argument("--table", type=Path, default=None, help="write the text table here instead of stdout")

    p = sub.add_parser("recon", help="Monte-Carlo least-squares reconstruction comparison")
    p.add_argument("--n", type=int, default=64, help="signal width (default: 64)")
    p.add_argument("--accel", type=int, default=4, help="acceleration factor (default: 4)")
    p.add_argument("--trials", type=int, default=100, help="phantoms per arm (default: 100)")
    p.add_argument("--seed", type=int, default=None, help="master seed (default: $KMASK_SEED or 0)")
    p.add_argument("--center", type=int, default=0, help="lowest-frequency lines added to every mask")
    p.add_argument("--arms", nargs="+", default=["offset0", "offset1", "random"],
                   help="masks to compare: offsetK, irregular, random (default: offset0 offset1 random)")
    p.add_argument("--phantom", choices=PHANTOM_KINDS, default="random_smooth",
                   help="phantom kind (default: random_smooth)")
    p.add_argument("--support", type=float, default=0.5, help="phantom support fraction (default: 0.5)")
    p.add_argument("--phase-eps", type=float, nargs="+", default=[0.0],
                   help="random-phase amplitudes to sweep, radians (default: 0)")
    p.add_argument("--noise", type=float, default=0.0, help="acquisition noise std (default: 0)")
    p.add_argument("--rcond", type=float, default=DEFAULT_RCOND,
                   help=f"relative SVD cutoff (default: {DEFAULT_RCOND:g})")
    p.add_argument("--out", type=Path, default=Path("recon.json"), help="JSON report (default: recon.json)")
    p.add_argument("--csv", type=Path, default=None, help="CSV report (default: next to --out)")

    p = sub.add_parser("verify", help="run the invariant battery")
    p.add_argument("--tol", type=float, default=1e-10, help="relative alias-identity tolerance (default: 1e-10)")
    p.add_argument("--rank-tol", type=float, default=DEFAULT_RCOND,
                   help=f"relative SVD cutoff for rank checks (default: {DEFAULT_RCOND:g})")
    p.add_argument("--clamp-tol", type=float, default=1e-9, help="clamp recovery tolerance (default: 1e-9)")
    p.add_argument("--seed", type=int, default=None, help="seed (default: $KMASK_SEED or 0)")
    p.add_argument("--inject-neg-offset", action="append", default=[], metavar="R:OFFSET",
                   help="fault injection: force the negative-half offset used for acceleration R")
    p.add_argument("--out", type=Path, default=None, help="JSON summary path")
    return parser


# ------------------------------------------------------------------------ helpers


def _check_output(path: Path | None):
    if path is None:
        return
    parent = path.parent if str(path.parent) else Path(".")
    if not parent.is_dir():
        raise OSError(f"output directory {parent} does not exist")


def _check_input(path: Path | None):
    if path is not None and not path.is_file():
        raise OSError(f"input file {path} does not exist")


def _load_mask_file(path: Path) -> SamplingMask:
    if path.suffix.lower() == ".csv":
        return custom_mask(io.read_mask_csv(path))
    return io.read_mask_json(path)


def _mask_from_args(args, n: int | None = None) -> SamplingMask:
    if args.mask_file is not None:
        return _load_mask_file(args.mask_file)
    n = args.n if n is None else n
    if args.mask_kind == "full":
        return full_mask(n)
    seed = args.seed if args.seed is not None else default_seed()
    return build_mask(
        n,
        kind=args.mask_kind,
        acceleration=args.accel,
        offset=args.offset,
        offset_neg=args.offset_neg,
        center_lines=args.center,
        seed=seed,
    )


def _mask_desc(mask: SamplingMask) -> dict:
    d = io.mask_to_dict(mask)
    d.pop("bits")
    d["indices"] = mask.indices.tolist()
    return d


# ------------------------------------------------------------------- subcommands


def cmd_mask(args) -> int:
    for path in (args.out, args.csv, args.pgm):
        _check_output(path)
    _check_input(args.mask_file)
    mask = _mask_from_args(args)
    if args.layout != mask.layout:
        mask = shift_mask(mask)
    io.write_mask_json(args.out, mask)
    if args.csv is not None:
        io.write_mask_csv(args.csv, mask)
    if args.pgm is not None:
        io.write_pgm(args.pgm, mask.bits.astype(float), strip_height=16)
    print(f"{args.out}: {int(mask.bits.sum())}/{mask.n} lines kept at {mask.indices.tolist()}")
    return EXIT_OK


def _alias_prediction(x: np.ndarray, mask: SamplingMask):
    """Closed-form prediction when the mask is a plain equispaced one, else None."""
    spec = mask.spec
    if spec.kind != "equispaced" or mask.misaligned or spec.center_lines:
        return None
    rows = np.atleast_2d(x)
    pred = np.vstack([predicted_alias_image(row, spec.acceleration, spec.offset_pos).predicted for row in rows])
    return pred if x.ndim == 2 else pred[0]


def cmd_simulate(args) -> int:
    _check_input(args.input)
    _check_input(args.mask_file)
    out = args.out_dir
    if out.exists() and not out.is_dir():
        raise OSError(f"{out} exists and is not a directory")

    phantom_spec = None
    if args.input is not None:
        x = io.read_complex(args.input)
    else:
        phantom_spec = PhantomSpec(
            n=args.n,
            kind=args.phantom,
            support_fraction=args.support,
            start=args.start,
            phase=args.phase,
            phase_param=args.phase_param,
            noise_sigma=args.noise,
            seed=args.seed if args.seed is not None else default_seed(),
            height=args.height,
        )
        x = make_phantom(phantom_spec)
    width = x.shape[-1]
    mask = _mask_from_args(args, n=width)
    if mask.n != width:
        raise UsageError(f"mask width {mask.n} does not match signal width {width}")
    if mask.layout != "unshifted":
        mask = shift_mask(mask)

    y = np.fft.ifft(np.fft.fft(x, axis=-1) * mask.bits, axis=-1)
    pred = _alias_prediction(x, mask)
    if args.verify and pred is None:
        raise UsageError("--verify needs an equispaced mask without center lines and with R | N")
    max_abs = float(np.max(np.abs(x)))
    alias_err = None if pred is None else float(np.max(np.abs(y - pred)))

    out.mkdir(parents=True, exist_ok=True)
    io.write_complex(out / "input.bin", x)
    io.write_complex(out / "masked.bin", y)
    io.write_mask_json(out / "mask.json", mask)
    h = args.strip_height
    io.write_pgm(out / "input_real.pgm", x.real, h)
    io.write_pgm(out / "input_imag.pgm", x.imag, h)
    io.write_pgm(out / "masked_real.pgm", y.real, h)
    io.write_pgm(out / "masked_imag.pgm", y.imag, h)
    if pred is not None:
        io.write_complex(out / "predicted.bin", pred)
        io.write_pgm(out / "predicted_real.pgm", pred.real, h)
        io.write_pgm(out / "predicted_imag.pgm", pred.imag, h)

    clamp_mse = None
    if args.clamp:
        rows = np.atleast_2d(y)
        recon = np.vstack([clamp_reconstruct(row, mask.spec.acceleration) for row in rows])
        recon = recon if y.ndim == 2 else recon[0]
        clamp_mse = float(np.mean((recon - x.real) ** 2))
        io.write_complex(out / "clamp.bin", recon)
        io.write_pgm(out / "clamp.pgm", recon, h)

    ok = None if alias_err is None else alias_err < args.tol * max_abs
    metrics = {
        "max_alias_error": alias_err,
        "clamp_mse": clamp_mse,
        "alias_tolerance": args.tol,
        "alias_identity_ok": ok,
        "max_abs_signal": max_abs,
        "mask": _mask_desc(mask),
        "phantom": None if phantom_spec is None else phantom_spec.to_dict(),
    }
    io.write_json(out / "metrics.json", metrics, schema="simulate_metrics")
    print(f"max_alias_error={alias_err} clamp_mse={clamp_mse} -> {out}")
    if args.verify and not ok:
        print(f"alias identity failed: {alias_err} >= {args.tol} * {max_abs}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def format_report_table(report, rank: int) -> str:
    """Aligned text table: one row per kept line, then the class summary."""
    lines = [f"{'index':>5}  {'frequency':>9}  {'conjugate':>9}"]
    retained = set(report.retained)
    for f in report.retained:
        idx = f % report.n
        paired = "yes" if f != 0 and -f in retained and -f != f else "no"
        lines.append(f"{idx:>5}  {f:>9}  {paired:>9}")
    lines.append("")
    classes = ", ".join("{" + ", ".join(str(f) for f in c) + "}" for c in report.classes)
    rows = [
        ("classes", classes),
        ("unique_classes", report.unique_classes),
        ("redundant_pairs", report.redundant_pairs),
        ("real_dof", report.real_dof),
        ("rank", rank),
    ]
    width = max(len(k) for k, _ in rows)
    lines.extend(f"{k:<{width}}  {v}" for k, v in rows)
    return "\n".join(lines) + "\n"


def cmd_analyze(args) -> int:
    _check_output(args.out)
    _check_output(args.table)
    _check_input(args.mask_file)
    if not 0 < args.rank_tol < 1:
        raise UsageError("--rank-tol must lie in (0, 1)")
    mask = _mask_from_args(args)
    if mask.layout != "unshifted":
        mask = shift_mask(mask)
    report = redundancy_report(mask)
    rank = numeric_rank(measurement_matrix(mask), args.rank_tol)
    table = format_report_table(report, rank)
    if args.table is not None:
        args.table.write_text(table)
    else:
        sys.stdout.write(table)
    if args.out is not None:
        data = report.to_dict()
        data.update({"rank": rank, "rank_tol": args.rank_tol, "mask": _mask_desc(mask)})
        io.write_json(args.out, data, schema="redundancy_report")
    return EXIT_OK


def cmd_recon(args) -> int:
    csv_path = args.csv if args.csv is not None else args.out.with_suffix(".csv")
    _check_output(args.out)
    _check_output(csv_path)
    seed = args.seed if args.seed is not None else default_seed()
    results = run_recon(
        n=args.n,
        acceleration=args.accel,
        trials=args.trials,
        seed=seed,
        arms=args.arms,
        center_lines=args.center,
        kind=args.phantom,
        support_fraction=args.support,
        phase_eps=args.phase_eps,
        noise_sigma=args.noise,
        rcond=args.rcond,
    )
    report = {
        "n": args.n,
        "acceleration": args.accel,
        "trials": args.trials,
        "seed": seed,
        "center_lines": args.center,
        "phantom_kind": args.phantom,
        "support_fraction": args.support,
        "noise_sigma": args.noise,
        "rcond": args.rcond,
        "arms": [r.to_dict() for r in results],
    }
    io.write_json(args.out, report, schema="recon_report")
    fields = ["arm", "phase_eps", "mean_mse", "std_mse", "trials", "real_dof"]
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(fields)
        for r in results:
            row = r.to_dict()
            writer.writerow(
                [format(v, ".17g") if isinstance(v, float) else ("" if v is None else v)
                 for v in (row[f] for f in fields)]
            )
    for r in results:
        print(f"{r.arm:>10}  eps={r.phase_eps:<6g} mean_mse={r.mean_mse:.6e}  std={r.std_mse:.3e}")
    return EXIT_OK


def _parse_injections(items) -> dict:
    out = {}
    for item in items:
        try:
            r, value = (int(v) for v in item.split(":"))
        except ValueError:
            raise UsageError(f"--inject-neg-offset expects R:OFFSET, got {item!r}") from None
        if r < 2 or not 0 <= value < r:
            raise UsageError(f"--inject-neg-offset {item!r}: need R >= 2 and 0 <= OFFSET < R")
        out[r] = value
    return out


def cmd_verify(args) -> int:
    _check_output(args.out)
    injections = _parse_injections(args.inject_neg_offset)
    seed = args.seed if args.seed is not None else default_seed()

    def show(result):
        status = "PASS" if result.passed else "FAIL"
        worst = "" if result.worst is None else f" worst={result.worst:.3e}"
        print(f"[{status}] {result.name} ({result.cases} cases){worst}: {result.detail}")

    results, elapsed = run_verify(
        alias_tol=args.tol,
        rank_tol=args.rank_tol,
        clamp_tol=args.clamp_tol,
        neg_offsets=injections,
        seed=seed,
        progress=show,
    )
    failed = [r.name for r in results if not r.passed]
    summary = {
        "passed": not failed,
        "elapsed_s": elapsed,
        "failed": failed,
        "checks": [r.to_dict() for r in results],
    }
    if args.out is not None:
        io.write_json(args.out, summary, schema="verify_summary")
    print(f"{len(results) - len(failed)}/{len(results)} checks passed in {elapsed:.1f} s")
    if failed:
        print("failed checks: " + ", ".join(failed), file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


COMMANDS = {
    "mask": cmd_mask,
    "simulate": cmd_simulate,
    "analyze": cmd_analyze,
    "recon": cmd_recon,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ValueError, jsonschema.ValidationError) as exc:
        print(f"kmask {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"kmask {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
