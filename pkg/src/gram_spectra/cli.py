"""Batch command-line front end.

Every subcommand resolves an :class:`ExperimentConfig` (CLI flags override
config-file values, which override the ``GRAM_SPECTRA_SEED`` environment
variable and built-in defaults), runs the mapped library operation, and
writes CSV or JSON atomically (temp file + rename).  Outputs carry a header
comment with the tool version, a hash of the scientific config and the seed,
and are byte-identical for identical configs at any worker count.

Exit codes: 0 success; 1 validation error; 2 numerical failure (estimate
overflow above 1%, or censored solver runs without --allow-censored).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass

from . import __version__, bounds, covest, ensembles, gramsolve, mc, ridge, rng

SCHEMA_VERSION = 1
ENV_SEED = "GRAM_SPECTRA_SEED"

SWEEP_FIELDS = [
    "n", "p", "gamma", "statistic", "r", "trials",
    "mean", "stderr", "max_sample", "overflow_count",
]
RIDGE_FIELDS = [
    "n", "p", "q", "lambda", "lambda_tilde",
    "bias", "variance", "total", "bias_upper", "variance_upper",
]
COVEST_FIELDS = [
    "n", "p", "r", "trials", "forward_norm_moment", "forward_ratio",
    "inverse_norm_moment", "inverse_ratio", "overflow_count",
]
GD_FIELDS = [
    "n", "p", "gamma", "solver", "init", "epsilon", "trials",
    "mean_T", "stderr_T", "mean_upper_bound", "mean_lower_bound",
    "censored_fraction",
]
INVCHISQ_FIELDS = ["n", "p", "df", "trials", "ks_statistic", "critical_value_1pct", "passed"]

BOUND_EVALS = (
    "min-sv-moment",
    "min-sv-normalized",
    "max-sv-moment",
    "dongarra-tail",
    "expected-log-kappa",
    "gd-upper",
    "gd-worstcase-lower",
    "smallball",
    "ridge-risk-upper",
)


class CliError(ValueError):
    """Configuration or validation problem (exit code 1)."""


@dataclass
class ExperimentConfig:
    subcommand: str
    parameters: dict
    seed: int
    output_path: str | None
    fmt: str
    workers: int
    allow_censored: bool

    def scientific_hash(self) -> str:
        # Excludes workers/output/format: they must not affect results.
        blob = json.dumps(
            {
                "schema_version": SCHEMA_VERSION,
                "subcommand": self.subcommand,
                "seed": self.seed,
                "parameters": self.parameters,
            },
            sort_keys=True,
        )
        return hashlib.sha256(blob.encode()).hexdigest()[:12]


# ---------------------------------------------------------------------------
# parameter schemas and value parsing

@dataclass(frozen=True)
class Param:
    type: str  # int | float | str | floats | grid
    required: bool = False
    default: object = None
    choices: tuple | None = None


SCHEMAS: dict[str, dict[str, Param]] = {
    "moments": {
        "n": Param("int", required=True),
        "p": Param("int", required=True),
        "statistic": Param("str", required=True, choices=mc.STATISTICS),
        "r": Param("float", default=1.0),
        "trials": Param("int", required=True),
        "law": Param("str", default="gaussian", choices=ensembles.ENTRY_LAWS),
        "cov": Param("str", default="identity"),
    },
    "sweep": {
        "n": Param("int", required=True),
        "gamma_grid": Param("floats", required=True),
        "statistic": Param("str", required=True, choices=mc.STATISTICS),
        "r": Param("float", default=1.0),
        "trials": Param("int", required=True),
        "law": Param("str", default="gaussian", choices=ensembles.ENTRY_LAWS),
    },
    "bounds": {
        "eval": Param("str", required=True, choices=BOUND_EVALS),
        "n": Param("int"),
        "p": Param("int"),
        "r": Param("float"),
        "K": Param("float"),
        "t": Param("float"),
        "C": Param("float"),
        "c": Param("float"),
        "kappa": Param("float"),
        "epsilon": Param("float"),
        "L": Param("float"),
        "mu": Param("float"),
        "lambda_tilde": Param("float"),
        "b_frob_sq": Param("float"),
        "trace_sigma_eps": Param("float"),
        "lambda_max": Param("float"),
        "lambda_min": Param("float"),
    },
    "ridge": {
        "n": Param("int", required=True),
        "p": Param("int", required=True),
        "q": Param("int", required=True),
        "lambda": Param("float", required=True),
        "cov": Param("str", default="identity"),
        "b_spec": Param("str", default="gaussian:1.0"),
        "design_trials": Param("int", required=True),
    },
    "covest": {
        "grid": Param("grid", required=True),
        "r": Param("float", required=True),
        "trials": Param("int", required=True),
        "law": Param("str", default="gaussian", choices=ensembles.ENTRY_LAWS),
    },
    "gd": {
        "n": Param("int", required=True),
        "gamma_grid": Param("floats", required=True),
        "epsilon": Param("float", required=True),
        "trials": Param("int", required=True),
        "solver": Param("str", default="gd", choices=("gd", "cg")),
        "init": Param("str", default="both", choices=gramsolve.INITS),
        "max_iter": Param("int", default=gramsolve.DEFAULT_MAX_ITER),
    },
    "counterexample": {
        "n": Param("int", required=True),
        "p": Param("int", required=True),
        "statistic": Param(
            "str",
            default="sqrt_n_over_smin",
            choices=("sqrt_n_over_smin", "kappa", "inv_cov_error"),
        ),
        "trials": Param("int", required=True),
    },
    "inv-chisq": {
        "n": Param("int", required=True),
        "p": Param("int", required=True),
        "trials": Param("int", required=True),
    },
}


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(tok) for tok in str(text).split(",") if tok.strip()]
    except ValueError as exc:
        raise CliError(f"cannot parse float list {text!r}") from exc


def _parse_grid(text: str) -> list[list[int]]:
    if isinstance(text, list):  # already structured (config file)
        return [[int(n), int(p)] for n, p in text]
    out = []
    for tok in str(text).split(","):
        tok = tok.strip()
        if not tok:
            continue
        try:
            n, p = tok.split("x")
            out.append([int(n), int(p)])
        except ValueError as exc:
            raise CliError(f"grid entries look like 400x40, got {tok!r}") from exc
    if not out:
        raise CliError("grid must not be empty")
    return out


def _coerce(name: str, spec: Param, value):
    try:
        if spec.type == "int":
            coerced = int(value)
        elif spec.type == "float":
            coerced = float(value)
        elif spec.type == "str":
            coerced = str(value)
        elif spec.type == "floats":
            coerced = _parse_floats(value) if not isinstance(value, list) else [float(v) for v in value]
        elif spec.type == "grid":
            coerced = _parse_grid(value)
        else:  # pragma: no cover
            raise CliError(f"unknown parameter type {spec.type}")
    except (TypeError, ValueError) as exc:
        raise CliError(f"parameter {name!r}: cannot interpret {value!r} as {spec.type}") from exc
    if spec.choices is not None and coerced not in spec.choices:
        raise CliError(f"parameter {name!r} must be one of {spec.choices}, got {coerced!r}")
    return coerced


def parse_covariance(text: str, p: int) -> ensembles.CovarianceModel:
    kind, _, arg = str(text).partition(":")
    if kind == "identity":
        return ensembles.identity(p)
    if kind == "scaled_identity":
        return ensembles.scaled_identity(p, float(arg))
    if kind == "ar1":
        return ensembles.ar1(p, float(arg))
    if kind == "diagonal":
        return ensembles.diagonal(_parse_floats(arg))
    raise CliError(f"unknown covariance {text!r} (identity|scaled_identity:c|ar1:rho|diagonal:v1,v2,...)")


def parse_coefficient_spec(text: str) -> ridge.CoefficientSpec:
    kind, _, arg = str(text).partition(":")
    try:
        return ridge.CoefficientSpec(kind=kind, value=float(arg) if arg else 1.0)
    except ValueError as exc:
        raise CliError(f"bad coefficient spec {text!r} (fixed:b0 or gaussian:alpha)") from exc


# ---------------------------------------------------------------------------
# config assembly

def load_config_file(path: str) -> dict:
    """Parse and structurally validate a JSON config file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except FileNotFoundError as exc:
        raise CliError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise CliError(f"malformed JSON in {path}: line {exc.lineno}, column {exc.colno}") from exc
    if not isinstance(raw, dict):
        raise CliError("config file must hold a JSON object")
    allowed = {"schema_version", "subcommand", "seed", "output", "format", "parameters"}
    unknown = set(raw) - allowed
    if unknown:
        raise CliError(f"unknown config keys: {sorted(unknown)}")
    version = raw.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise CliError(f"unsupported schema_version {version} (expected {SCHEMA_VERSION})")
    if not isinstance(raw.get("parameters", {}), dict):
        raise CliError("config 'parameters' must be an object")
    return raw


def build_config(subcommand: str, cli_params: dict, *, config_path=None,
                 seed=None, out=None, fmt=None, workers=None,
                 allow_censored=False) -> ExperimentConfig:
    """Merge defaults, config file and CLI flags (flags win)."""
    schema = SCHEMAS[subcommand]
    file_cfg = load_config_file(config_path) if config_path else {}
    if file_cfg.get("subcommand") not in (None, subcommand):
        raise CliError(
            f"config file is for subcommand {file_cfg['subcommand']!r}, not {subcommand!r}"
        )
    params: dict = {}
    file_params = file_cfg.get("parameters", {})
    unknown = set(file_params) - set(schema)
    if unknown:
        raise CliError(f"unknown parameters for {subcommand}: {sorted(unknown)}")
    for name, spec in schema.items():
        value = cli_params.get(name)
        if value is None:
            value = file_params.get(name)
        if value is None:
            value = spec.default
        if value is None:
            if spec.required:
                raise CliError(f"missing required parameter {name!r} for {subcommand}")
            continue
        params[name] = _coerce(name, spec, value)
    if seed is None:
        seed = file_cfg.get("seed")
    if seed is None and os.environ.get(ENV_SEED):
        try:
            seed = int(os.environ[ENV_SEED])
        except ValueError as exc:
            raise CliError(f"{ENV_SEED} must be an integer") from exc
    effective_seed = rng.resolve_master_seed(None if seed is None else int(seed))
    return ExperimentConfig(
        subcommand=subcommand,
        parameters=params,
        seed=effective_seed,
        output_path=out if out is not None else file_cfg.get("output"),
        fmt=(fmt or file_cfg.get("format") or "csv"),
        workers=max(1, int(workers or 1)),
        allow_censored=bool(allow_censored),
    )


# ---------------------------------------------------------------------------
# output helpers

def _fmt_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_csv(cfg: ExperimentConfig, fields: list[str], rows: list[dict]) -> str:
    buf = io.StringIO()
    buf.write(
        f"# gram-spectra {__version__} subcommand={cfg.subcommand} "
        f"seed={cfg.seed} config_sha256={cfg.scientific_hash()}\n"
    )
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fields)
    for row in rows:
        writer.writerow([_fmt_cell(row[f]) for f in fields])
    return buf.getvalue()


def render_json(cfg: ExperimentConfig, payload) -> str:
    doc = {
        "tool": "gram-spectra",
        "version": __version__,
        "schema_version": SCHEMA_VERSION,
        "subcommand": cfg.subcommand,
        "seed": cfg.seed,
        "config_sha256": cfg.scientific_hash(),
        "parameters": cfg.parameters,
        "results": payload,
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".gram-spectra-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(cfg: ExperimentConfig, fields: list[str], rows: list[dict], payload) -> None:
    text = render_csv(cfg, fields, rows) if cfg.fmt == "csv" else render_json(cfg, payload)
    if cfg.output_path:
        atomic_write(cfg.output_path, text)
        print(
            f"wrote {len(rows)} row(s) to {cfg.output_path} "
            f"(subcommand={cfg.subcommand}, seed={cfg.seed}, config={cfg.scientific_hash()})"
        )
    else:
        sys.stdout.write(text)


def _estimate_row(n: int, p: int, est: mc.MomentEstimate) -> dict:
    return {
        "n": n,
        "p": p,
        "gamma": p / n,
        "statistic": est.statistic_name,
        "r": est.r,
        "trials": est.trials,
        "mean": est.mean,
        "stderr": est.stderr,
        "max_sample": est.max_sample,
        "overflow_count": est.overflow_count,
    }


def _estimate_payload(n: int, p: int, est: mc.MomentEstimate) -> dict:
    row = _estimate_row(n, p, est)
    row["running_means"] = [[c, m] for c, m in est.running_means]
    row["unreliable"] = est.unreliable
    return row


# ---------------------------------------------------------------------------
# subcommand runners (return an exit code)

def _run_moments(cfg: ExperimentConfig) -> int:
    prm = cfg.parameters
    n, p = prm["n"], prm["p"]
    if prm["law"] == "counterexample":
        if prm["cov"] not in ("identity",):
            raise CliError("the counterexample law requires --cov identity")
        spec = ensembles.counterexample_spec(n, p)
    else:
        spec = ensembles.DesignSpec(n=n, p=p, covariance=parse_covariance(prm["cov"], p))
    est = mc.estimate_moment(
        spec, prm["statistic"], prm["r"], prm["trials"], cfg.seed, workers=cfg.workers
    )
    _emit(cfg, SWEEP_FIELDS, [_estimate_row(n, p, est)], [_estimate_payload(n, p, est)])
    if est.unreliable and not cfg.allow_censored:
        print(
            f"numerical failure: overflow fraction {est.overflow_count / est.trials:.3f} "
            "exceeds 1% (pass --allow-censored to accept)",
            file=sys.stderr,
        )
        return 2
    return 0


def _run_sweep(cfg: ExperimentConfig) -> int:
    prm = cfg.parameters
    rows = mc.sweep_gamma(
        prm["n"], prm["gamma_grid"], prm["statistic"], prm["r"], prm["trials"],
        cfg.seed, workers=cfg.workers, entry_law=prm["law"],
    )
    csv_rows = [_estimate_row(r.n, r.p, r.estimate) for r in rows]
    payload = [_estimate_payload(r.n, r.p, r.estimate) for r in rows]
    _emit(cfg, SWEEP_FIELDS, csv_rows, payload)
    bad = [r for r in rows if r.estimate.unreliable]
    if bad and not cfg.allow_censored:
        print(
            f"numerical failure: {len(bad)} grid point(s) exceeded the 1% overflow limit",
            file=sys.stderr,
        )
        return 2
    return 0


def _need(prm: dict, *names):
    missing = [x for x in names if x not in prm]
    if missing:
        raise CliError(f"bounds eval {prm['eval']!r} needs parameters {missing}")
    return [prm[x] for x in names]


def _run_bounds(cfg: ExperimentConfig) -> int:
    prm = cfg.parameters
    which = prm["eval"]
    if which == "min-sv-moment":
        n, p, r = _need(prm, "n", "p", "r")
        rep = bounds.min_sv_negative_moment_bound(n, p, r, prm.get("K", bounds.DEFAULT_K))
    elif which == "min-sv-normalized":
        n, p, r = _need(prm, "n", "p", "r")
        rep = bounds.min_sv_normalized_moment_bound(n, p, r, prm.get("K", bounds.DEFAULT_K))
    elif which == "max-sv-moment":
        n, p, r = _need(prm, "n", "p", "r")
        rep = bounds.max_sv_moment_bound(n, p, r)
    elif which == "dongarra-tail":
        n, p, t = _need(prm, "n", "p", "t")
        rep = bounds.dongarra_kappa_tail(n, p, t, prm.get("C", bounds.DEFAULT_DONGARRA_C))
    elif which == "expected-log-kappa":
        n, p = _need(prm, "n", "p")
        rep = bounds.BoundReport(value=bounds.expected_log_kappa_bound(n, p))
    elif which == "gd-upper":
        kappa, epsilon = _need(prm, "kappa", "epsilon")
        rep = bounds.BoundReport(value=bounds.gd_iteration_upper(kappa, epsilon))
    elif which == "gd-worstcase-lower":
        L, mu, epsilon = _need(prm, "L", "mu", "epsilon")
        rep = bounds.BoundReport(value=float(bounds.gd_worstcase_lower(L, mu, epsilon)))
    elif which == "smallball":
        n, p, epsilon, C, c = _need(prm, "n", "p", "epsilon", "C", "c")
        rep = bounds.BoundReport(value=bounds.rv_smallball_bound(n, p, epsilon, C, c))
    else:  # ridge-risk-upper
        args = _need(
            prm, "lambda_tilde", "b_frob_sq", "p", "trace_sigma_eps", "n",
            "lambda_max", "lambda_min",
        )
        bias_up, var_up = bounds.ridge_risk_upper(*args)
        rep = bounds.BoundReport(
            value=bias_up + var_up,
            constants={"bias_bound": bias_up, "variance_bound": var_up},
        )
    doc = {"value": rep.value, "constants": rep.constants, "valid": rep.valid}
    if rep.reason:
        doc["reason"] = rep.reason
    text = json.dumps(doc, sort_keys=True) + "\n"
    if cfg.output_path:
        atomic_write(cfg.output_path, text)
        print(f"wrote bound report to {cfg.output_path}")
    else:
        sys.stdout.write(text)
    return 0


def _run_ridge(cfg: ExperimentConfig) -> int:
    prm = cfg.parameters
    n, p, q = prm["n"], prm["p"], prm["q"]
    res = ridge.mean_risk_experiment(
        n, p, q, prm["lambda"],
        parse_covariance(prm["cov"], p),
        parse_coefficient_spec(prm["b_spec"]),
        prm["design_trials"],
        error_trials=0,
        master_seed=cfg.seed,
        workers=cfg.workers,
    )
    row = {
        "n": n, "p": p, "q": q,
        "lambda": prm["lambda"],
        "lambda_tilde": res.lambda_tilde,
        "bias": res.mean_bias,
        "variance": res.mean_variance,
        "total": res.mean_risk,
        "bias_upper": res.mean_bias_upper,
        "variance_upper": res.mean_variance_upper,
    }
    payload = dict(row)
    payload["stderr"] = res.stderr
    payload["design_trials"] = res.design_trials
    _emit(cfg, RIDGE_FIELDS, [row], [payload])
    return 0


def _run_covest(cfg: ExperimentConfig) -> int:
    prm = cfg.parameters
    rows = covest.rate_experiment(
        [tuple(g) for g in prm["grid"]], prm["r"], prm["trials"], cfg.seed,
        workers=cfg.workers, entry_law=prm["law"],
    )
    csv_rows = [
        {
            "n": r.n, "p": r.p, "r": r.r, "trials": r.trials,
            "forward_norm_moment": r.forward_norm_moment,
            "forward_ratio": r.forward_ratio,
            "inverse_norm_moment": r.inverse_norm_moment,
            "inverse_ratio": r.inverse_ratio,
            "overflow_count": r.overflow_count,
        }
        for r in rows
    ]
    payload = []
    for r, base in zip(rows, csv_rows):
        doc = dict(base)
        doc["forward_stderr"] = r.forward_stderr
        doc["inverse_stderr"] = r.inverse_stderr
        doc["valid"] = r.valid
        payload.append(doc)
    _emit(cfg, COVEST_FIELDS, csv_rows, payload)
    overflowed = [r for r in rows if r.overflow_count > 0.01 * r.trials]
    if overflowed and prm["law"] == "gaussian" and not cfg.allow_censored:
        print(
            f"numerical failure: {len(overflowed)} grid point(s) exceeded the 1% "
            "overflow limit",
            file=sys.stderr,
        )
        return 2
    return 0


def _run_gd(cfg: ExperimentConfig) -> int:
    prm = cfg.parameters
    rows = gramsolve.complexity_experiment(
        prm["n"], prm["gamma_grid"], prm["epsilon"], prm["trials"], cfg.seed,
        solver=prm["solver"], init=prm["init"], max_iter=prm["max_iter"],
        workers=cfg.workers,
    )
    csv_rows = [
        {
            "n": r.n, "p": r.p, "gamma": float(r.gamma),
            "solver": r.solver, "init": r.init, "epsilon": r.epsilon,
            "trials": r.trials, "mean_T": r.mean_T, "stderr_T": r.stderr_T,
            "mean_upper_bound": r.mean_upper_bound,
            "mean_lower_bound": r.mean_lower_bound,
            "censored_fraction": r.censored_fraction,
        }
        for r in rows
    ]
    _emit(cfg, GD_FIELDS, csv_rows, csv_rows)
    censored = [r for r in rows if r.censored_fraction > 0.0]
    if censored and not cfg.allow_censored:
        print(
            f"numerical failure: {len(censored)} row(s) hit the max_iter cap "
            "(means are lower bounds; pass --allow-censored to accept)",
            file=sys.stderr,
        )
        return 2
    return 0


def _run_counterexample(cfg: ExperimentConfig) -> int:
    prm = cfg.parameters
    n, p = prm["n"], prm["p"]
    statistic = prm["statistic"]
    if statistic == "inv_cov_error":
        est = covest.counterexample_inverse_divergence(n, p, prm["trials"], cfg.seed, cfg.workers)
    else:
        spec = ensembles.counterexample_spec(n, p)
        est = mc.divergence_diagnostic(spec, statistic, prm["trials"], cfg.seed, cfg.workers)
    payload = _estimate_payload(n, p, est)
    payload["note"] = (
        "running means growing across checkpoints indicate an infinite mean; "
        "the final value is not a convergent estimate"
    )
    _emit(cfg, SWEEP_FIELDS, [_estimate_row(n, p, est)], [payload])
    return 0


def _run_invchisq(cfg: ExperimentConfig) -> int:
    prm = cfg.parameters
    res = mc.inv_chisq_check(prm["n"], prm["p"], prm["trials"], cfg.seed, cfg.workers)
    row = {
        "n": prm["n"], "p": prm["p"], "df": res.df, "trials": res.trials,
        "ks_statistic": res.ks_statistic,
        "critical_value_1pct": res.critical_value_1pct,
        "passed": res.passed,
    }
    _emit(cfg, INVCHISQ_FIELDS, [row], [row])
    return 0


_RUNNERS = {
    "moments": _run_moments,
    "sweep": _run_sweep,
    "bounds": _run_bounds,
    "ridge": _run_ridge,
    "covest": _run_covest,
    "gd": _run_gd,
    "counterexample": _run_counterexample,
    "inv-chisq": _run_invchisq,
}


def run(cfg: ExperimentConfig) -> int:
    """Execute a validated config; returns the process exit code."""
    try:
        return _RUNNERS[cfg.subcommand](cfg)
    except (CliError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


# ---------------------------------------------------------------------------
# argument parsing

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gram-spectra",
        description="Monte Carlo experiments on singular values, condition "
        "numbers and Gram linear systems",
    )
    parser.add_argument("--version", action="version", version=f"gram-spectra {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    flag_help = {
        "gamma_grid": "comma-separated aspect ratios, e.g. 0.5,1.0,2.0",
        "grid": "comma-separated shapes, e.g. 100x10,400x40",
        "cov": "identity | scaled_identity:c | ar1:rho | diagonal:v1,v2,...",
        "b_spec": "fixed:b0 | gaussian:alpha",
    }
    for name, schema in SCHEMAS.items():
        sp = sub.add_parser(name)
        for pname in schema:
            sp.add_argument(
                f"--{pname.replace('_', '-')}", dest=f"param_{pname}",
                default=None, help=flag_help.get(pname),
            )
        sp.add_argument("--config", default=None, help="JSON config file (flags override it)")
        sp.add_argument("--seed", default=None, help="master seed (default 20240601)")
        sp.add_argument("--workers", default=None, help="worker processes (does not affect results)")
        sp.add_argument("--out", default=None, help="output file (atomic write); stdout if omitted")
        sp.add_argument("--format", dest="fmt", default=None, choices=("csv", "json"))
        sp.add_argument("--allow-censored", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cli_params = {
        name[len("param_"):]: value
        for name, value in vars(args).items()
        if name.startswith("param_") and value is not None
    }
    try:
        cfg = build_config(
            args.subcommand,
            cli_params,
            config_path=args.config,
            seed=args.seed,
            out=args.out,
            fmt=args.fmt,
            workers=args.workers,
            allow_censored=args.allow_censored,
        )
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
