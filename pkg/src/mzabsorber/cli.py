"""Command-line entry point.

Subcommands: ``analytic``, ``simulate``, ``sweep``, ``discriminate``,
``models``.  A ``--config`` file holds ``key = value`` lines; flags given on
the command line override it.

Exit codes: 0 success, 2 configuration error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from dataclasses import dataclass
from typing import Optional

from mzabsorber import __version__
from mzabsorber.analysis import (
    CONFOUND_CAVEAT,
    discriminate,
    sweep_theta,
)
from mzabsorber.errors import ConfigError
from mzabsorber.models import (
    CONFOUND_THETA,
    Model,
    ScenarioConfig,
    analytic,
    pb_coherent_fixed,
    reference_probability,
)
from mzabsorber.montecarlo import RNG_NAME, run_trials

EXIT_CONFIG = 2
EXIT_IO = 3

# key -> parser for config-file values
CONFIG_KEYS = {
    "model": str,
    "weightA2": float,
    "weightB2": float,
    "fixedTheta": float,
    "theta": float,
    "nTrials": int,
    "seed": int,
    "outputFormat": str,
    "outputPath": str,
    "points": int,
    "confidence": float,
    "clicks": int,
    "workers": int,
}


class IOFailure(Exception):
    pass


@dataclass(frozen=True)
class ExperimentSpec:
    scenario: ScenarioConfig
    n_trials: int = 1_000_000
    seed: int = 42
    output_format: str = "csv"
    output_path: Optional[str] = None


def read_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise IOFailure(f"cannot read config {path}: {exc}") from exc
    values = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = (part.strip() for part in line.partition("="))
        if not sep or not key:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{key}: unknown configuration key ({path}:{lineno})")
        try:
            values[key] = CONFIG_KEYS[key](value)
        except ValueError:
            raise ConfigError(f"{key}: cannot parse {value!r}") from None
    return values


_FLAG_TO_KEY = {
    "model": "model",
    "theta": "theta",
    "weight_a2": "weightA2",
    "trials": "nTrials",
    "seed": "seed",
    "points": "points",
    "confidence": "confidence",
    "clicks": "clicks",
    "format": "outputFormat",
    "out": "outputPath",
    "workers": "workers",
}


def _settings(args: argparse.Namespace) -> dict:
    values = read_config(args.config) if args.config else {}
    for flag, key in _FLAG_TO_KEY.items():
        v = getattr(args, flag, None)
        if v is not None:
            values[key] = v
    if "weightA2" in values and "weightB2" not in values:
        values["weightB2"] = 1.0 - values["weightA2"]
    if "weightB2" in values and "weightA2" not in values:
        values["weightA2"] = 1.0 - values["weightB2"]
    fmt = values.setdefault("outputFormat", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"outputFormat: must be csv or json, got {fmt!r}")
    return values


def _scenario(values: dict) -> ScenarioConfig:
    if "model" not in values:
        raise ConfigError("model: required")
    try:
        model = Model(values["model"])
    except ValueError:
        names = ", ".join(m.value for m in Model)
        raise ConfigError(f"model: unknown {values['model']!r} (choose from {names})") from None
    fixed = values.get("fixedTheta")
    if model is Model.COHERENT_FIXED_PHASE and fixed is None:
        fixed = values.get("theta")
    return ScenarioConfig(
        model,
        values.get("weightA2", 0.5),
        values.get("weightB2", 0.5),
        fixed if model is Model.COHERENT_FIXED_PHASE else None,
    )


def experiment_spec(values: dict) -> ExperimentSpec:
    n = values.get("nTrials", 1_000_000)
    if n < 1:
        raise ConfigError(f"nTrials: must be >= 1, got {n}")
    return ExperimentSpec(
        _scenario(values),
        n,
        values.get("seed", 42),
        values["outputFormat"],
        values.get("outputPath"),
    )


def _num(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _csv(header: list[str], rows: list[list]) -> str:
    out = io.StringIO()
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(_num(x) for x in row) + "\n")
    return out.getvalue()


def _provenance(model: Optional[str], seed: Optional[int] = None) -> dict:
    return {"rng": RNG_NAME, "seed": seed, "version": __version__, "model": model}


def _json(payload: dict) -> str:
    return json.dumps(payload, indent=2) + "\n"


def cmd_analytic(values: dict) -> str:
    spec = experiment_spec(values)
    theta = values.get("theta")
    result = analytic(spec.scenario, theta)
    if spec.output_format == "json":
        return _json(
            {"result": result.to_dict(), "provenance": _provenance(spec.scenario.model.value)}
        )
    return _csv(
        ["model", "method", "probability"],
        [[spec.scenario.model.value, result.method.value, result.probability]],
    )


def cmd_simulate(values: dict) -> str:
    spec = experiment_spec(values)
    summary = run_trials(spec.scenario, spec.n_trials, spec.seed, values.get("workers", 1))
    reference = reference_probability(spec.scenario)
    if spec.output_format == "json":
        return _json(
            {
                "result": summary.to_dict(),
                "analyticReference": reference,
                "provenance": _provenance(spec.scenario.model.value, spec.seed),
            }
        )
    return _csv(
        ["nTrials", "clicksD", "clicksC", "absorbed", "estimateD", "stdErrD", "seed", "analytic"],
        [
            [
                summary.n_trials,
                summary.clicks_d,
                summary.clicks_c,
                summary.absorbed,
                summary.estimate_d,
                summary.std_err_d,
                summary.seed,
                reference,
            ]
        ],
    )


def cmd_sweep(values: dict) -> str:
    values = dict(values)
    # the sweep spans the whole fixed-phase family
    values.setdefault("fixedTheta", 0.0)
    spec = experiment_spec(values)
    rows = sweep_theta(spec.scenario, values.get("points", 360))
    if spec.output_format == "json":
        return _json(
            {
                "rows": [{"theta": t, "probability": p} for t, p in rows],
                "provenance": _provenance(spec.scenario.model.value),
            }
        )
    return _csv(["theta", "probability"], [list(r) for r in rows])


def cmd_discriminate(values: dict) -> str:
    for key in ("clicks", "nTrials"):
        if key not in values:
            raise ConfigError(f"{key}: required for discriminate")
    report = discriminate(values["clicks"], values["nTrials"], values.get("confidence", 0.95))
    if values["outputFormat"] == "json":
        return _json({"result": report.to_dict(), "provenance": _provenance(None)})
    lo, hi = report.wilson_interval
    sys.stderr.write(f"caveat: {CONFOUND_CAVEAT}\n")
    return _csv(
        [
            "clicks",
            "nTrials",
            "confidence",
            "logLikelihoodRatio",
            "wilsonLo",
            "wilsonHi",
            "verdict",
            "confoundTheta",
            "confoundProbability",
        ],
        [
            [
                report.clicks,
                report.n_trials,
                report.confidence,
                report.log_likelihood_ratio,
                lo,
                hi,
                report.verdict.value,
                CONFOUND_THETA,
                pb_coherent_fixed(CONFOUND_THETA).probability,
            ]
        ],
    )


def cmd_models(values: dict) -> str:
    if values["outputFormat"] == "json":
        return _json(
            {
                "models": [
                    {"model": m.value, "randomPhases": m.random_phases, "description": m.description}
                    for m in Model
                ]
            }
        )
    width = max(len(m.value) for m in Model)
    return "".join(f"{m.value:<{width}}  {m.description}\n" for m in Model)


COMMANDS = {
    "analytic": cmd_analytic,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "discriminate": cmd_discriminate,
    "models": cmd_models,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="key = value configuration file")
    common.add_argument("--format", choices=("csv", "json"), help="output format (default csv)")
    common.add_argument("--out", metavar="PATH", help="write output here instead of stdout")

    scenario = argparse.ArgumentParser(add_help=False)
    scenario.add_argument("--model", help="scenario id, see `models`")
    scenario.add_argument("--theta", type=float, help="phase in radians")
    scenario.add_argument("--weight-a2", type=float, help="|lambda_A|^2 (default 0.5)")

    parser = argparse.ArgumentParser(
        prog="mzabsorber", description="Mach-Zehnder device with a superposed absorber."
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("analytic", parents=[common, scenario], help="closed-form / engine value")

    p = sub.add_parser("simulate", parents=[common, scenario], help="seeded Monte Carlo run")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int, help="worker threads (counts do not depend on it)")

    p = sub.add_parser("sweep", parents=[common, scenario], help="P(D) over a phase grid")
    p.add_argument("--points", type=int)

    p = sub.add_parser("discriminate", parents=[common], help="collapse vs persistence verdict")
    p.add_argument("--clicks", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--confidence", type=float)

    sub.add_parser("models", parents=[common], help="list the scenarios")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        values = _settings(args)
        text = COMMANDS[args.command](values)
        path = values.get("outputPath")
        if path:
            try:
                with open(path, "w", encoding="utf-8", newline="\n") as fh:
                    fh.write(text)
            except OSError as exc:
                raise IOFailure(f"cannot write {path}: {exc}") from exc
        else:
            sys.stdout.write(text)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IOFailure as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return 0


if __name__ == "__main__":
    sys.exit(main())
