"""Command-line front end.

    deblur simulate    --input true.pgm --out run/
    deblur deblur      --input true.pgm --out run/ tikhonov --select discrepancy
    deblur sweep-mu    --input true.pgm --out run/
    deblur sweep-iters --input true.pgm --out run/ --k-max 200
    deblur compare     --input true.pgm --out run/

Every command other than ``simulate`` rebuilds the degraded observation in
memory from (input, radius, snr, seed), which reproduces exactly what
``simulate`` wrote but without 8-bit quantization.  To work on an external
observation instead, pass ``--observed`` and ``--psf`` (and optionally
``--noise`` for the E / epsilon bounds).
"""
import argparse
import csv
import json
import logging
import math
import os
import sys
import time
from dataclasses import dataclass

import numpy as np

from .cg import DEFAULT_ITERS, DEFAULT_K_CAP, cg_deblur
from .core import DeblurError, frobenius_norm, load_image, save_image, write_pgm, write_raw
from .direct import (
    TikhonovProblem,
    pseudo_inverse_deblur,
    select_mu_discrepancy,
    select_mu_energy,
    select_mu_gcv,
    select_mu_miller,
)
from .metrics import DeblurReport, relative_error
from .simulate import add_gaussian_noise, blur, disk_psf

log = logging.getLogger("deblur")

SELECTORS = ("energy", "discrepancy", "miller", "gcv")


@dataclass
class Scenario:
    g: np.ndarray
    psf: np.ndarray
    truth: np.ndarray | None
    energy: float | None
    epsilon: float | None


# I/O helpers -----------------------------------------------------------------

def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


def write_json(path, obj):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(_jsonable(obj), indent=2) + "\n")


def write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([v if isinstance(v, str) else _fmt(v) for v in row])


def _write_bytes(path, payload):
    with open(path, "wb") as fh:
        fh.write(payload)


def _read_noise_json(path):
    with open(path, encoding="utf-8") as fh:
        meta = json.load(fh)
    out = {}
    for key, dest in (("energy", "energy"), ("realized_norm", "epsilon")):
        if meta.get(key) is not None:
            out[dest] = float(meta[key])
    return out


def _ensure_out(args):
    os.makedirs(args.out, exist_ok=True)
    return args.out


def load_scenario(args):
    """Resolve the observation, PSF, ground truth and E / epsilon bounds."""
    truth = load_image(args.input) if args.input else None
    if args.observed:
        if not args.psf:
            raise DeblurError("--observed requires --psf")
        g = load_image(args.observed)
        psf = load_image(args.psf)
        if not args.psf.lower().endswith(".raw"):
            psf = psf / psf.sum()
        bounds = _read_noise_json(args.noise) if args.noise else {}
        energy = bounds.get("energy")
        epsilon = bounds.get("epsilon")
        if energy is None and truth is not None:
            energy = frobenius_norm(truth)
    else:
        if truth is None:
            raise DeblurError("--input is required unless --observed/--psf are given")
        rows, cols = truth.shape
        psf = disk_psf(rows, cols, args.radius).image
        g, noise = add_gaussian_noise(blur(truth, psf), args.snr, args.seed)
        energy = frobenius_norm(truth)
        epsilon = noise.realized_norm
    if args.energy is not None:
        energy = args.energy
    if args.epsilon is not None:
        epsilon = args.epsilon
    return Scenario(g=g, psf=psf, truth=truth, energy=energy, epsilon=epsilon)


def _need_truth(sc, what):
    if sc.truth is None:
        raise DeblurError(f"{what} needs the true image (--input)")


def _error(sc, img):
    return None if sc.truth is None else relative_error(img, sc.truth)


def _select(prob, sc, criterion):
    if criterion in ("energy", "miller") and sc.energy is None:
        raise DeblurError(f"--select {criterion} needs the prescribed energy E (--energy or --noise)")
    if criterion in ("discrepancy", "miller") and sc.epsilon is None:
        raise DeblurError(f"--select {criterion} needs the noise norm (--epsilon or --noise)")
    if criterion == "energy":
        return select_mu_energy(prob, None, sc.energy)
    if criterion == "discrepancy":
        return select_mu_discrepancy(prob, None, sc.epsilon)
    if criterion == "miller":
        return select_mu_miller(sc.energy, sc.epsilon)
    return select_mu_gcv(prob)


# commands --------------------------------------------------------------------

def cmd_simulate(args):
    out = _ensure_out(args)
    truth = load_image(args.input)
    rows, cols = truth.shape
    psf = disk_psf(rows, cols, args.radius)
    blurred = blur(truth, psf)
    noisy, noise = add_gaussian_noise(blurred, args.snr, args.seed)
    _write_bytes(os.path.join(out, "blurred.pgm"), write_pgm(blurred))
    _write_bytes(os.path.join(out, "blurred_noisy.pgm"), write_pgm(noisy))
    _write_bytes(os.path.join(out, "psf.raw"), write_raw(psf.image))
    write_json(os.path.join(out, "noise.json"), {
        "rows": rows,
        "cols": cols,
        "radius": psf.radius,
        "snr_db": noise.snr_db,
        "seed": noise.seed,
        "sigma": noise.sigma,
        "realized_norm": noise.realized_norm,
        "energy": frobenius_norm(truth),
    })
    log.info("simulated %dx%d, radius %g, sigma %.4g", rows, cols, psf.radius, noise.sigma)


def cmd_deblur(args):
    out = _ensure_out(args)
    sc = load_scenario(args)
    t0 = time.perf_counter()
    selection = None
    trace = None
    if args.method == "inverse":
        restored = pseudo_inverse_deblur(sc.g, sc.psf, args.tol)
        parameter, criterion = args.tol, "tol"
        residual = frobenius_norm(blur(restored, sc.psf) - sc.g)
        method = "pseudo-inverse"
    elif args.method == "tikhonov":
        prob = TikhonovProblem(sc.g, sc.psf)
        if args.mu is not None:
            if args.mu < 0:
                raise DeblurError(f"--mu must be nonnegative, got {args.mu}")
            parameter, criterion = args.mu, "fixed"
        else:
            selection = _select(prob, sc, args.select)
            parameter, criterion = selection.mu, args.select
        restored = prob.restore(parameter)
        residual = frobenius_norm(blur(restored, sc.psf) - sc.g)
        method = "tikhonov"
    else:
        if args.discrepancy:
            if sc.epsilon is None:
                raise DeblurError("cg --discrepancy needs the noise norm (--epsilon or --noise)")
            restored, trace = cg_deblur(sc.g, sc.psf, epsilon=sc.epsilon, k_cap=args.k_cap,
                                        truth=sc.truth)
            criterion = "discrepancy"
        else:
            restored, trace = cg_deblur(sc.g, sc.psf, args.iters, truth=sc.truth)
            criterion = "fixed"
        parameter = trace.iterations
        residual = trace.records[-1].residual_norm
        method = "cg"
    wall = time.perf_counter() - t0

    report = DeblurReport(method, parameter, criterion, _error(sc, restored), residual, wall,
                          selection=selection, trace=trace)
    save_image(os.path.join(out, "restored.pgm"), restored)
    write_json(os.path.join(out, "report.json"), report.to_dict())
    if trace is not None:
        write_csv(os.path.join(out, "trace.csv"),
                  ["k", "residual_norm", "normal_residual_norm", "solution_norm",
                   "relative_error", "alpha", "beta"],
                  [(r.k, r.residual_norm, r.normal_residual_norm, r.solution_norm,
                    r.relative_error, r.alpha, r.beta) for r in trace.records])
    if report.relative_error is not None:
        print(f"{method} ({criterion}, parameter {parameter:.4g}): "
              f"relative error {100 * report.relative_error:.2f}%")
    return report


def cmd_sweep_mu(args):
    out = _ensure_out(args)
    sc = load_scenario(args)
    _need_truth(sc, "sweep-mu")
    if args.mu_count < 1:
        raise DeblurError("--mu-count must be at least 1")
    grid = np.logspace(math.log10(args.mu_min), math.log10(args.mu_max), args.mu_count)
    prob = TikhonovProblem(sc.g, sc.psf)
    rows = []
    for i, mu in enumerate(grid):
        restored = prob.restore(mu)
        rows.append((mu, relative_error(restored, sc.truth),
                     prob.residual_norm(mu), prob.solution_norm(mu)))
        if args.save_images:
            save_image(os.path.join(out, f"restored_mu_{i:03d}.pgm"), restored)
    write_csv(os.path.join(out, "sweep_mu.csv"),
              ["mu", "relative_error", "residual_norm", "solution_norm"], rows)
    best = min(rows, key=lambda r: r[1])
    print(f"best mu {best[0]:.3e}: relative error {100 * best[1]:.2f}%")
    return rows


def cmd_sweep_iters(args):
    out = _ensure_out(args)
    sc = load_scenario(args)
    _need_truth(sc, "sweep-iters")
    _, trace = cg_deblur(sc.g, sc.psf, args.k_max, truth=sc.truth)
    rows = [(r.k, r.relative_error, r.residual_norm) for r in trace.records]
    write_csv(os.path.join(out, "sweep_k.csv"), ["k", "relative_error", "residual_norm"], rows)
    best = min(rows, key=lambda r: r[1])
    print(f"best k {best[0]}: relative error {100 * best[1]:.2f}%")
    return rows


def cmd_compare(args):
    out = _ensure_out(args)
    sc = load_scenario(args)
    _need_truth(sc, "compare")
    prob = TikhonovProblem(sc.g, sc.psf)
    table = []
    details = {}
    for criterion in SELECTORS:
        sel = _select(prob, sc, criterion)
        err = relative_error(prob.restore(sel.mu), sc.truth)
        table.append((criterion, sel.mu, err))
        details[criterion] = {"mu": sel.mu, "relative_error": err, "evaluations": sel.evaluations,
                              "converged": sel.converged,
                              "bracket": None if sel.bracket is None else list(sel.bracket)}
    if sc.epsilon is None:
        raise DeblurError("compare needs the noise norm for CG discrepancy stopping")
    restored, trace = cg_deblur(sc.g, sc.psf, epsilon=sc.epsilon, k_cap=args.k_cap, truth=sc.truth)
    err = relative_error(restored, sc.truth)
    table.append(("cg-discrepancy", trace.iterations, err))
    details["cg-discrepancy"] = {"iterations": trace.iterations, "relative_error": err,
                                 "stop_reason": trace.stop_reason}
    write_csv(os.path.join(out, "table.csv"), ["method", "parameter", "relative_error"], table)
    write_json(os.path.join(out, "compare.json"), details)
    for method, parameter, err in table:
        print(f"{method:>15}  {parameter:>10.3e}  {100 * err:6.2f}%")
    return table


COMMANDS = {
    "simulate": cmd_simulate,
    "deblur": cmd_deblur,
    "sweep-mu": cmd_sweep_mu,
    "sweep-iters": cmd_sweep_iters,
    "compare": cmd_compare,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="true image (PGM, or RAWF64 with .raw extension)")
    common.add_argument("--out", required=True, help="output directory")
    common.add_argument("--radius", type=float, default=15.0, help="blur radius in pixels (default 15)")
    common.add_argument("--snr", type=float, default=40.0,
                        help="signal-to-noise ratio in dB, or 'inf' for no noise (default 40)")
    common.add_argument("--seed", type=int, default=0, help="noise seed (default 0)")
    common.add_argument("-v", "--verbose", action="store_true")

    external = argparse.ArgumentParser(add_help=False)
    external.add_argument("--observed", help="use this observation instead of simulating one")
    external.add_argument("--psf", help="PSF file for --observed (RAWF64 in wraparound layout)")
    external.add_argument("--noise", help="noise.json supplying energy and realized_norm")
    external.add_argument("--energy", type=float, help="override the prescribed energy E")
    external.add_argument("--epsilon", type=float, help="override the noise norm epsilon")

    parser = argparse.ArgumentParser(prog="deblur", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("simulate", parents=[common], help="blur and add noise to an image")

    p = sub.add_parser("deblur", parents=[common, external], help="restore with one method")
    methods = p.add_subparsers(dest="method", required=True)
    m = methods.add_parser("inverse", help="pseudo-inverse filter")
    m.add_argument("--tol", type=float, default=0.0, help="zero frequencies with |K^| <= tol")
    m = methods.add_parser("tikhonov", help="Tikhonov filter")
    g = m.add_mutually_exclusive_group(required=True)
    g.add_argument("--mu", type=float)
    g.add_argument("--select", choices=SELECTORS)
    m = methods.add_parser("cg", help="conjugate gradient")
    g = m.add_mutually_exclusive_group()
    g.add_argument("--iters", type=int, default=DEFAULT_ITERS)
    g.add_argument("--discrepancy", action="store_true")
    m.add_argument("--k-cap", type=int, default=DEFAULT_K_CAP)

    p = sub.add_parser("sweep-mu", parents=[common, external], help="error versus mu")
    p.add_argument("--mu-min", type=float, default=1e-7)
    p.add_argument("--mu-max", type=float, default=10.0)
    p.add_argument("--mu-count", type=int, default=30)
    p.add_argument("--save-images", action="store_true", help="write one PGM per grid point")

    p = sub.add_parser("sweep-iters", parents=[common, external], help="error versus CG iteration")
    p.add_argument("--k-max", type=int, default=200)

    p = sub.add_parser("compare", parents=[common, external], help="all selectors plus CG")
    p.add_argument("--k-cap", type=int, default=DEFAULT_K_CAP)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    if args.command == "simulate" and not args.input:
        print("deblur: error: simulate requires --input", file=sys.stderr)
        return 2
    try:
        COMMANDS[args.command](args)
    except (DeblurError, OSError) as exc:
        print(f"deblur: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
