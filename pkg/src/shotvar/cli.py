"""Command-line interface.

    shotvar simulate   --kind coin|spam|t1|t2|vqe ...  -> outcome series CSV
    shotvar analyze    SERIES                          -> RSD curve, c fit, SVG
    shotvar predict    --model coin|spam|t1|t2|observable
    shotvar shots      --mean M --c C (--sigma S | --shots N)
    shotvar compare    PRED [REAL]                     -> report CSV, grid SVG
    shotvar calibration FILE                           -> validated, dt units
    shotvar workflow                                   -> estimate-then-correct

Every command that writes files also writes a JSON manifest (command, argv,
seed, input hashes, version, timestamp) and each output names it.
Exit codes: 0 ok, 2 bad input, 3 capacity, 4 degenerate statistics.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__, cltstats, files, observable, predict, sim, svg, workflow
from .errors import CapacityError, DegenerateError, DomainError, ParseError, ShotvarError
from .model import CircuitSpec, WaitKind, parse_wait
from .noisevar import Aggregate
from .rng import SEED_ENV, default_seed

log = logging.getLogger("shotvar")

COIN_KINDS = ("coin", "spam", "t1", "t2", "vqe")
MODELS = ("coin", "spam", "t1", "t2", "observable")


# -- argument helpers --------------------------------------------------------


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _wait(args) -> tuple[int, WaitKind] | None:
    """``--wait 100x`` or ``--wait 100 --wait-kind x``."""
    if args.wait is None:
        return None
    text = str(args.wait)
    if text.isdigit():
        return int(text), WaitKind(args.wait_kind or "id")
    reps, kind = parse_wait(text)
    if args.wait_kind and WaitKind(args.wait_kind) != kind:
        raise ParseError(f"--wait {text} conflicts with --wait-kind {args.wait_kind}")
    return reps, kind


def _calibration(args):
    if getattr(args, "calibration", None):
        return files.load_calibration(args.calibration)
    log.info("no --calibration given; using the bundled synthetic calibration")
    return files.synthetic_calibration()


def _hamiltonian(spec: str | None):
    if spec is None or spec == "h2":
        return observable.load_h2_fixture()
    path = Path(spec)
    if not path.is_file():
        raise ParseError("no such Hamiltonian file (or use 'h2')", where=spec)
    return observable.parse_pauli(path.read_text())


def _manifest_path(args, primary: str | None) -> str | None:
    if getattr(args, "manifest", None):
        return args.manifest
    if primary and primary != "-":
        return primary + ".manifest.json"
    return None


def _finish(args, command: str, inputs, outputs, manifest: str | None):
    if manifest:
        files.write_manifest(manifest, command, args.argv, getattr(args, "seed", None), inputs, outputs)


def _tag(text: str, manifest: str | None) -> str:
    """Prefix CSV text with a manifest comment line."""
    return (f"# manifest={Path(manifest).name}\n" if manifest else "") + text


def _emit(text: str, path: str | None):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _append_row(path: str, column: str, row_id: str, value: float):
    p = Path(path)
    new = not p.exists() or p.stat().st_size == 0
    with p.open("a") as fh:
        if new:
            fh.write(f"id,{column}\n")
        fh.write(f"{row_id},{value!r}\n")


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=str) + "\n"


# -- commands ----------------------------------------------------------------


def cmd_simulate(args) -> int:
    seed = args.seed
    kind = args.kind
    w = _wait(args)
    if kind == "coin":
        series = sim.sample_coin(args.p1, args.shots, seed)
    elif kind == "spam":
        p01, p10 = _readout(args)
        series = sim.sample_spam_coin(args.p1, p01, p10, args.shots, seed)
    elif kind in ("t1", "t2"):
        cal = _calibration(args)
        reps, wk = w if w else (0, WaitKind.ID)
        depth = args.depth if args.depth is not None else (args.t if args.t is not None else float(reps))
        spec = CircuitSpec(1, wk, reps, depth, args.pre_measure, "z" if kind == "t1" else "x")
        series = sim.run_experiment(spec, cal, shots=args.shots, seed=seed, qubit=args.qubit,
                                    stretch=args.stretch)
    else:
        cal = _calibration(args)
        H = _hamiltonian(args.hamiltonian)
        spec = CircuitSpec(H.n_qubits, depth=args.depth if args.depth is not None else 20.0,
                           basis="pauli", ansatz_reps=args.reps, angles=args.angles or ())
        series = sim.run_experiment(spec, cal, H, shots=args.shots, seed=seed, stretch=args.stretch)
    manifest = _manifest_path(args, args.out)
    _emit(files.series_text(series, Path(manifest).name if manifest else None), args.out)
    inputs = [getattr(args, "calibration", None)]
    if kind == "vqe" and args.hamiltonian not in (None, "h2"):
        inputs.append(args.hamiltonian)
    _finish(args, "simulate", inputs, [args.out] if args.out not in (None, "-") else [], manifest)
    log.info("mean outcome %.6g over %d shots", series.mean(), len(series))
    return 0


def _readout(args) -> tuple[float, float]:
    if args.p01 is not None and args.p10 is not None:
        return args.p01, args.p10
    if args.p01 is not None or args.p10 is not None:
        raise DomainError("give both --p01 and --p10, or neither (to read them from the calibration)")
    q = _qubit(args)
    return q.p01, q.p10


def _qubit(args):
    cal = _calibration(args)
    return cal.qubit(args.qubit) if args.qubit is not None else cal.qubits[0]


def cmd_analyze(args) -> int:
    series = files.read_series(args.series)
    need = cltstats.required_shots(args.windows, args.n_windows)
    if len(series) < need:
        raise CapacityError(
            f"{args.series} has {len(series)} shots; windows up to {max(args.windows)} "
            f"x {args.n_windows} need at least {need}"
        )
    try:
        curve = cltstats.rsd_curve(series, args.windows, args.n_windows)
    except ValueError as exc:
        raise DomainError(str(exc)) from None
    if curve.degenerate:
        raise DegenerateError("; ".join(curve.diagnostics) or "no valid RSD points")
    fit = cltstats.fit_c(curve, fix_slope=not args.free_slope)
    report = {
        "series": str(args.series),
        "shots": len(series),
        "mean": series.mean(),
        "seed": series.seed,
        "spec": series.spec_hash,
        "window_sizes": list(curve.window_sizes),
        "n_windows": curve.n_windows,
        "c": fit.c,
        "slope": fit.slope,
        "fixed_slope": fit.fixed_slope,
        "residual_rms": fit.residual_rms,
        "n_points": fit.n_points,
        "diagnostics": curve.diagnostics,
    }
    outputs = [p for p in (args.curve, args.svg, args.report) if p and p != "-"]
    manifest = _manifest_path(args, outputs[0] if outputs else None)
    if args.curve:
        Path(args.curve).write_text(_tag(curve.to_csv(), manifest))
    if args.svg:
        Path(args.svg).write_text(svg.rsd_plot(curve, fit, title=Path(args.series).name,
                                               manifest=Path(manifest).name if manifest else None))
    if manifest:
        report["manifest"] = Path(manifest).name
    _emit(_json(report), args.report)
    if args.table:
        _append_row(args.table, "c_real", args.id or Path(args.series).stem, fit.c)
    _finish(args, "analyze", [args.series], outputs, manifest)
    return 0


def cmd_predict(args) -> int:
    m = args.model
    if m == "coin":
        if args.p1 is None:
            raise DomainError("--model coin needs --p1")
        pred = predict.predict("coin", p1=args.p1)
    elif m == "spam":
        p01, p10 = _readout(args)
        pred = predict.predict("spam", p01=p01, p10=p10)
    elif m in ("t1", "t2"):
        p01, p10 = _readout(args)
        T = getattr(args, m)
        if T is None:
            T = getattr(_qubit(args), m)
        w = _wait(args)
        t = args.t if args.t is not None else (args.depth if args.depth is not None else (w[0] if w else None))
        if t is None:
            raise DomainError(f"--model {m} needs a time: --t, --depth or --wait")
        pred = predict.predict(m, p01=p01, p10=p10, t=t, **{m: T})
    else:
        H = _hamiltonian(args.hamiltonian) if (args.hamiltonian or args.mean is None) else None
        mean_h = args.mean if args.mean is not None else abs(observable.spectrum_bounds(H).lambda_min)
        if args.var_h is not None:
            var_h = args.var_h
        else:
            if H is None:
                H = _hamiltonian(args.hamiltonian)
            var_h = workflow.guess_var_h(H, args.var_method, mean_h)
        n = args.n_qubits or (H.n_qubits if H is not None else 1)
        if args.no_noise:
            budget = predict.VarianceBudget(mean_h, var_h)
        else:
            cal = _calibration(args)
            budget = workflow.noise_budget(cal, n, args.depth if args.depth is not None else 0.0,
                                           mean_h, var_h, Aggregate(args.policy),
                                           gate=not args.no_gate, readout=not args.no_readout)
        pred = predict.predict("observable", budget=budget)
    report = {"model": pred.model, "c": pred.c, "inputs_hash": pred.inputs_hash,
              "details": pred.details}
    manifest = _manifest_path(args, args.report)
    _emit(_json(report), args.report)
    if args.table:
        _append_row(args.table, "c_pred", args.id or m, pred.c)
    _finish(args, "predict", [getattr(args, "calibration", None)],
            [p for p in (args.report, args.table) if p and p != "-"], manifest)
    return 0


def cmd_shots(args) -> int:
    if (args.sigma is None) == (args.shots is None):
        raise DomainError("give exactly one of --sigma and --shots")
    if args.shots is not None:
        s = predict.sigma_at_shots(args.mean, args.c, args.shots)
        print(f"shots={args.shots} sigma={s:.6g}")
        return 0
    plan = predict.shots_for_sigma(args.mean, args.c, args.sigma)
    print(f"exact={plan.exact} sigma={plan.sigma_exact:.6g}")
    print(f"nearest_pow2={plan.nearest_pow2} "
          f"sigma={predict.sigma_at_shots(args.mean, args.c, plan.nearest_pow2):.6g}")
    print(f"conservative={plan.conservative} sigma={plan.sigma_conservative:.6g}")
    return 0


def cmd_compare(args) -> int:
    pred = files.read_c_table(args.predictions, "c_pred")
    real = files.read_c_table(args.measured or args.predictions, "c_real")
    rows, unmatched = files.compare_tables(pred, real)
    if not rows:
        raise DomainError("no ids in common between predictions and measurements")
    if unmatched:
        msg = "unmatched ids: " + ", ".join(unmatched)
        if args.strict:
            raise DomainError(msg)
        log.warning(msg)
    manifest = _manifest_path(args, args.out if args.out not in (None, "-") else args.svg)
    _emit(_tag(files.report_csv(rows), manifest), args.out)
    if args.svg:
        Path(args.svg).write_text(svg.qubit_grid([(r.id, r.color) for r in rows], args.columns,
                                                 title=args.title or "",
                                                 manifest=Path(manifest).name if manifest else None))
    _finish(args, "compare", [args.predictions, args.measured],
            [p for p in (args.out, args.svg) if p and p != "-"], manifest)
    return 0


def cmd_calibration(args) -> int:
    cal = files.load_calibration(args.file)
    data = files.calibration_to_dict(cal, args.unit)
    manifest = _manifest_path(args, args.out)
    _emit(_json(data), args.out)
    log.info("%d qubits, dt=%g s, eplg=%g", cal.n_qubits, cal.dt_seconds, cal.eplg)
    _finish(args, "calibration", [args.file], [args.out] if args.out not in (None, "-") else [],
            manifest)
    return 0


def cmd_workflow(args) -> int:
    H = _hamiltonian(args.hamiltonian)
    cal = _calibration(args)
    spec = CircuitSpec(H.n_qubits, depth=args.depth, basis="pauli", ansatz_reps=args.reps,
                       angles=args.angles or ())
    est = workflow.estimate_then_correct(H, cal, spec, args.pilot_shots, args.seed, args.mean,
                                         args.var_method, Aggregate(args.policy))
    out = {
        "mean_h": est.mean_h,
        "var_guess": est.var_guess,
        "c_guess": est.c_guess,
        "c_real": est.c_real,
        "var_corrected": est.var_corrected,
        "c_corrected": est.c_corrected,
        "budget": dict(est.budget.rows()),
        "sigma": {str(n): {"guess": est.sigma_guess_at(n), "corrected": est.sigma_at(n)}
                  for n in args.shots},
    }
    if args.replays:
        out["sigma_replay"] = {str(n): workflow.replay_sigma(H, cal, spec, n, args.replays, args.seed)
                               for n in args.shots}
    manifest = _manifest_path(args, args.report)
    _emit(_json(out), args.report)
    _finish(args, "workflow", [getattr(args, "calibration", None)],
            [args.report] if args.report not in (None, "-") else [], manifest)
    return 0


# -- parser ------------------------------------------------------------------


def _add_common(p, seed=True):
    if seed:
        p.add_argument("--seed", type=int, default=None,
                       help=f"RNG seed (default: ${SEED_ENV} or built-in)")
    p.add_argument("--manifest", help="manifest path (default: <first output>.manifest.json)")


def _add_wait(p):
    p.add_argument("--wait", help="wait gates, e.g. 100x, 10h, 1000id, or a count with --wait-kind")
    p.add_argument("--wait-kind", choices=[k.value for k in WaitKind])
    p.add_argument("--t", type=float, help="wait time in dt (identity waits)")
    p.add_argument("--depth", type=float, help="total circuit duration in dt")


def _add_readout(p):
    p.add_argument("--calibration", help="calibration JSON (default: bundled synthetic device)")
    p.add_argument("--qubit", type=int, help="qubit id in the calibration")
    p.add_argument("--p01", type=float, help="P(read 1 | 0)")
    p.add_argument("--p10", type=float, help="P(read 0 | 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shotvar", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="sample an outcome series")
    p.add_argument("--kind", choices=COIN_KINDS, required=True)
    p.add_argument("--p1", type=float, default=0.5)
    p.add_argument("--shots", type=int, default=2**15)
    p.add_argument("--pre-measure", action="store_true")
    p.add_argument("--stretch", type=float, default=1.0, help="stretched-exponential exponent")
    p.add_argument("--hamiltonian", help="'h2' or a Pauli text file")
    p.add_argument("--reps", type=int, default=1, help="ansatz repetitions")
    p.add_argument("--angles", type=_float_list, help="ansatz angles (one value broadcasts)")
    p.add_argument("-o", "--out", default="-")
    _add_readout(p)
    _add_wait(p)
    _add_common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="windowed RSD curve and c fit")
    p.add_argument("series")
    p.add_argument("--windows", type=_int_list, default=cltstats.DEFAULT_WINDOWS)
    p.add_argument("--n-windows", type=int, default=cltstats.DEFAULT_N_WINDOWS)
    p.add_argument("--free-slope", action="store_true", help="fit the slope instead of fixing -1/2")
    p.add_argument("--curve", help="write the RSD curve CSV here")
    p.add_argument("--svg", help="write the RSD plot here")
    p.add_argument("--report", default="-", help="JSON report path (default stdout)")
    p.add_argument("--table", help="append 'id,c_real' to this CSV")
    p.add_argument("--id", help="row id for --table (default: series file stem)")
    _add_common(p, seed=False)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("predict", help="closed-form c prediction")
    p.add_argument("--model", choices=MODELS, required=True)
    p.add_argument("--p1", type=float)
    p.add_argument("--t1", type=float, help="T1 in dt (overrides calibration)")
    p.add_argument("--t2", type=float, help="T2 in dt (overrides calibration)")
    p.add_argument("--mean", type=float, help="<H> (observable model)")
    p.add_argument("--var-h", type=float, help="Var(H) (observable model)")
    p.add_argument("--var-method", choices=workflow.VAR_METHODS, default="popoviciu")
    p.add_argument("--hamiltonian", help="'h2' or a Pauli text file")
    p.add_argument("--n-qubits", type=int)
    p.add_argument("--policy", choices=[a.value for a in Aggregate], default="median")
    p.add_argument("--no-gate", action="store_true")
    p.add_argument("--no-readout", action="store_true")
    p.add_argument("--no-noise", action="store_true", help="observable model without noise terms")
    p.add_argument("--report", default="-")
    p.add_argument("--table", help="append 'id,c_pred' to this CSV")
    p.add_argument("--id")
    _add_readout(p)
    _add_wait(p)
    _add_common(p, seed=False)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("shots", help="shot budget from c")
    p.add_argument("--mean", type=float, required=True)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--sigma", type=float)
    p.add_argument("--shots", type=int)
    p.set_defaults(func=cmd_shots)

    p = sub.add_parser("compare", help="c_pred vs c_real report")
    p.add_argument("predictions", help="CSV with id and c_pred (or c)")
    p.add_argument("measured", nargs="?", help="CSV with id and c_real (or c); default: same file")
    p.add_argument("--strict", action="store_true", help="fail on unmatched ids")
    p.add_argument("-o", "--out", default="-")
    p.add_argument("--svg", help="write a coloured grid here")
    p.add_argument("--columns", type=int, default=8)
    p.add_argument("--title")
    _add_common(p, seed=False)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("calibration", help="validate and normalise a calibration file")
    p.add_argument("file")
    p.add_argument("--unit", choices=("dt", "us"), default="dt")
    p.add_argument("-o", "--out", default="-")
    _add_common(p, seed=False)
    p.set_defaults(func=cmd_calibration)

    p = sub.add_parser("workflow", help="estimate-then-correct variance on the simulator")
    p.add_argument("--hamiltonian", default="h2")
    p.add_argument("--calibration")
    p.add_argument("--depth", type=float, default=20.0)
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--angles", type=_float_list)
    p.add_argument("--pilot-shots", type=int, default=2**15)
    p.add_argument("--shots", type=_int_list, default=(256, 512))
    p.add_argument("--mean", type=float)
    p.add_argument("--var-method", choices=workflow.VAR_METHODS, default="popoviciu")
    p.add_argument("--policy", choices=[a.value for a in Aggregate], default="median")
    p.add_argument("--replays", type=int, default=0, help="also measure sigma over N replays")
    p.add_argument("--report", default="-")
    _add_common(p)
    p.set_defaults(func=cmd_workflow)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args.argv = argv
    if getattr(args, "seed", 0) is None:
        args.seed = default_seed()
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except ShotvarError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (FileNotFoundError, IsADirectoryError) as exc:
        print(f"error: {exc.strerror}: {exc.filename}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
