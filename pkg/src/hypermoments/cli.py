"""Command line front end: ``hypermoments {moments,oracle,simulate,correlators,compare}``.

Exit codes: 0 success, 2 configuration error, 3 enumeration cap exceeded,
4 comparison failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction
from typing import Sequence

from . import serialize as ser
from .params import ModelParams, ParameterError, WeightMomentSeq
from .recurrence import carleman_diagnostic, limiting_moments
from .simulation import SimConfig, SimulationError, bin_eigenvalues, correlator_decay_study, run_trials, write_histogram
from .walks import DEFAULT_ENUMERATION_CAP, dump_classes, enumerate_classes, exact_finite_moment, oracle_moment
from .weights import parse_distribution

EXIT_OK, EXIT_CONFIG, EXIT_CAP, EXIT_MISMATCH = 0, 2, 3, 4
SEED_ENV = "HYPERMOMENTS_SEED"
Z_LIMIT = 3.0


class ConfigError(Exception):
    pass


class CapExceeded(Exception):
    pass


def _add_model(ap: argparse.ArgumentParser) -> None:
    ap.add_argument("--q", type=int, default=3, help="hyperedge size (default 3)")
    ap.add_argument("--p", default="1", help="sparsity, rational (default 1)")
    ap.add_argument("--dist", default="sign",
                    help="weight law: const:c | sign | twopoint:a,b,pi | gauss:sigma (default sign)")
    ap.add_argument("--x", default=None,
                    help="explicit weight moments X_1,X_2,... (rationals); overrides --dist for exact paths")
    ap.add_argument("--kmax", type=int, default=4, help="largest moment order (default 4)")


def _add_output(ap: argparse.ArgumentParser, csv_ok: bool = True) -> None:
    ap.add_argument("--format", choices=["json", "csv"] if csv_ok else ["json"], default="json")
    ap.add_argument("--output", "-o", default="-", help="output path, '-' for stdout (default)")


def _add_cap(ap: argparse.ArgumentParser) -> None:
    ap.add_argument("--cap", type=int, default=DEFAULT_ENUMERATION_CAP,
                    help=f"walk-enumeration cap on k (default {DEFAULT_ENUMERATION_CAP})")
    ap.add_argument("--unsafe-cap", action="store_true", help="acknowledge a cap above the default")


def _add_sim(ap: argparse.ArgumentParser, grid: bool = False) -> None:
    if grid:
        ap.add_argument("--N-grid", dest="N_grid", default="50,100,200,400", help="comma-separated N values")
    else:
        ap.add_argument("--N", type=int, default=200, help="matrix size (default 200)")
    ap.add_argument("--trials", type=int, default=200, help="number of samples (default 200)")
    ap.add_argument("--seed", type=int, default=None, help=f"master seed (default ${SEED_ENV} or 0)")
    ap.add_argument("--workers", type=int, default=1, help="threads for independent trials (default 1)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hypermoments", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("moments", help="limiting moments from the recurrence")
    _add_model(sp)
    _add_output(sp)
    sp.add_argument("--carleman", action="store_true", help="also report (m_2k)^(1/2k)")

    sp = sub.add_parser("oracle", help="walk-enumeration moments and mismatch listing")
    _add_model(sp)
    _add_output(sp)
    _add_cap(sp)
    sp.add_argument("--dump-classes", default=None, metavar="PATH",
                    help="write essential classes of every length <= kmax as JSON lines")

    sp = sub.add_parser("simulate", help="Monte Carlo moments and correlators")
    _add_model(sp)
    _add_sim(sp)
    _add_output(sp, csv_ok=False)
    sp.add_argument("--histogram", default=None, metavar="PATH", help="pooled eigenvalue histogram file")
    sp.add_argument("--bins", type=int, default=100)
    sp.add_argument("--no-trials", action="store_true", help="omit per-trial rows from the output")

    sp = sub.add_parser("correlators", help="decay of C_{k,m} with N")
    _add_model(sp)
    _add_sim(sp, grid=True)
    _add_output(sp, csv_ok=False)
    sp.add_argument("--k", type=int, default=2)
    sp.add_argument("--m", type=int, default=2)
    sp.add_argument("--boot", type=int, default=1000, help="bootstrap resamples (default 1000)")

    sp = sub.add_parser("compare", help="recurrence vs oracle vs Monte Carlo")
    _add_model(sp)
    _add_sim(sp)
    _add_output(sp)
    _add_cap(sp)
    sp.add_argument("--gate", choices=["limit", "finite"], default="limit",
                    help="z-scores gate against the limiting moment (default) or the exact finite-N moment")
    return ap


# ---------------------------------------------------------------------------


def _model(args) -> tuple[ModelParams, WeightMomentSeq, object]:
    if args.kmax < 0:
        raise ConfigError("--kmax must be >= 0")
    try:
        params = ModelParams(Fraction(args.p), args.q)
        dist = parse_distribution(args.dist)
        if args.x is not None:
            X = WeightMomentSeq(Fraction(t) for t in args.x.split(","))
            X.require(args.kmax)
            X = WeightMomentSeq(X.moments[: max(args.kmax, 1)])
        else:
            X = dist.moments(max(args.kmax, 1))
    except (ParameterError, ValueError, ZeroDivisionError) as exc:
        raise ConfigError(str(exc)) from None
    return params, X, dist


def _check_cap(args) -> None:
    if args.cap > DEFAULT_ENUMERATION_CAP and not args.unsafe_cap:
        raise ConfigError(f"--cap above {DEFAULT_ENUMERATION_CAP} needs --unsafe-cap")
    if args.kmax > args.cap:
        raise CapExceeded(f"--kmax {args.kmax} exceeds the enumeration cap {args.cap}")


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    try:
        return int(os.environ.get(SEED_ENV, "0"))
    except ValueError:
        raise ConfigError(f"${SEED_ENV} is not an integer") from None


def _sim_config(args, params, dist, N: int) -> SimConfig:
    if args.trials < 1:
        raise ConfigError("--trials must be >= 1")
    try:
        return SimConfig(N=N, q=params.q, p=params.p, dist=dist, trials=args.trials,
                         k_max=max(args.kmax, 1), seed=_seed(args), workers=max(args.workers, 1),
                         eigen=bool(getattr(args, "histogram", None)))
    except ParameterError as exc:
        raise ConfigError(str(exc)) from None


def _emit(args, text: str) -> None:
    if args.output == "-":
        sys.stdout.write(text)
    else:
        with open(args.output, "w") as fh:
            fh.write(text)


def _meta(params: ModelParams, X: WeightMomentSeq, args) -> dict:
    return {"q": params.q, "p": ser.frac_str(params.p), "dist": args.dist if args.x is None else None,
            "X": [ser.frac_str(x) for x in X.moments]}


def cmd_moments(args) -> int:
    params, X, _ = _model(args)
    m = limiting_moments(args.kmax, params, X)
    if args.format == "csv":
        _emit(args, ser.rows_to_csv(ser.moment_rows(m), ["k", "exact", "decimal"]))
        return EXIT_OK
    doc = ser.moments_document(m, _meta(params, X, args))
    if args.carleman:
        doc["carleman"] = [{"k": k, "root": r} for k, r in carleman_diagnostic(m)]
    _emit(args, ser.dumps(doc))
    return EXIT_OK


def cmd_oracle(args) -> int:
    params, X, _ = _model(args)
    _check_cap(args)
    rec = limiting_moments(args.kmax, params, X)
    rows = []
    for k in range(args.kmax + 1):
        orc = oracle_moment(k, params, X)
        rows.append({"k": k, "oracle": ser.frac_str(orc), "recurrence": ser.frac_str(rec[k]),
                     "decimal": float(orc), "match": orc == rec[k]})
    if args.dump_classes:
        with open(args.dump_classes, "w") as fh:
            for k in range(args.kmax + 1):
                dump_classes(enumerate_classes(k, params.q), fh, params, X)
    mismatches = [r["k"] for r in rows if not r["match"]]
    if args.format == "csv":
        _emit(args, ser.rows_to_csv(rows, ["k", "oracle", "recurrence", "decimal", "match"]))
    else:
        _emit(args, ser.dumps({"schema": ser.SCHEMA_VERSION, "kind": "oracle", **_meta(params, X, args),
                               "rows": rows, "mismatches": mismatches}))
    if mismatches:
        print(f"mismatch at k = {mismatches}", file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


def cmd_simulate(args) -> int:
    params, X, dist = _model(args)
    cfg = _sim_config(args, params, dist, args.N)
    run = run_trials(cfg)
    ref = limiting_moments(cfg.k_max, params, dist.moments(cfg.k_max))
    doc = ser.simrun_document(run, ref, include_trials=not args.no_trials)
    if args.histogram:
        centers, mass = bin_eigenvalues(run.eigenvalues, bins=args.bins)
        write_histogram(args.histogram, centers, mass)
    _emit(args, ser.dumps(doc))
    return EXIT_OK


def cmd_correlators(args) -> int:
    params, X, dist = _model(args)
    try:
        grid = [int(t) for t in args.N_grid.split(",")]
    except ValueError:
        raise ConfigError(f"bad --N-grid {args.N_grid!r}") from None
    if len(grid) < 4:
        raise ConfigError("--N-grid needs at least four values")
    if args.trials < 2:
        raise ConfigError("correlators need --trials >= 2")
    args.kmax = max(args.kmax, args.k, args.m)
    cfgs = [_sim_config(args, params, dist, N) for N in grid]
    study = correlator_decay_study(cfgs[0], grid, args.k, args.m, n_boot=args.boot)
    doc = {
        "schema": ser.SCHEMA_VERSION, "kind": "correlators", "q": params.q, "p": ser.frac_str(params.p),
        "dist": dist.spec, "trials": args.trials, "seed": cfgs[0].seed, "k": args.k, "m": args.m,
        "N": grid, "C": study.correlators, "C_se": study.correlator_se,
        "slope": study.slope, "slope_ci": None if study.slope_ci is None else list(study.slope_ci),
        "degenerate": study.degenerate,
    }
    if study.degenerate:
        print("warning: some correlator estimates are not distinguishable from zero; no slope fitted",
              file=sys.stderr)
    _emit(args, ser.dumps(doc))
    return EXIT_OK


def cmd_compare(args) -> int:
    params, X, dist = _model(args)
    if args.x is not None and X.moments != dist.moments(X.k_max).moments:
        raise ConfigError("--x does not match the moments of --dist, which drives the simulation")
    _check_cap(args)
    cfg = _sim_config(args, params, dist, args.N)
    rec = limiting_moments(args.kmax, params, X)
    run = run_trials(cfg)
    rows = []
    ok = True
    for k in range(args.kmax + 1):
        orc = oracle_moment(k, params, X)
        fin = exact_finite_moment(args.N, k, params, X, cap=args.cap) if k <= args.cap else None
        mean = float(run.mean[k]) if k <= cfg.k_max else None
        se = float(run.stderr[k]) if k <= cfg.k_max else None
        z = ser.z_score(mean, se, rec[k]) if mean is not None else None
        z_fin = ser.z_score(mean, se, fin) if mean is not None and fin is not None else None
        gate_z = z if args.gate == "limit" else z_fin
        row_ok = orc == rec[k] and (gate_z is None or abs(gate_z) <= Z_LIMIT)
        ok &= row_ok
        rows.append({
            "k": k, "recurrence": ser.frac_str(rec[k]), "recurrence_decimal": float(rec[k]),
            "oracle": ser.frac_str(orc), "exact_match": orc == rec[k],
            "finite_N": None if fin is None else ser.frac_str(fin),
            "mc_mean": ser.json_float(mean) if mean is not None else None,
            "mc_se": ser.json_float(se) if se is not None else None,
            "z": ser.json_float(z) if z is not None else None,
            "z_finite": ser.json_float(z_fin) if z_fin is not None else None,
            "pass": row_ok,
        })
    if args.format == "csv":
        cols = ["k", "recurrence", "recurrence_decimal", "oracle", "exact_match", "finite_N",
                "mc_mean", "mc_se", "z", "z_finite", "pass"]
        _emit(args, ser.rows_to_csv(rows, cols))
    else:
        _emit(args, ser.dumps({"schema": ser.SCHEMA_VERSION, "kind": "compare", **_meta(params, X, args),
                               "N": args.N, "trials": args.trials, "seed": cfg.seed, "gate": args.gate,
                               "rows": rows, "pass": ok}))
    print("PASS" if ok else "FAIL", file=sys.stderr)
    return EXIT_OK if ok else EXIT_MISMATCH


COMMANDS = {
    "moments": cmd_moments,
    "oracle": cmd_oracle,
    "simulate": cmd_simulate,
    "correlators": cmd_correlators,
    "compare": cmd_compare,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except SimulationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
