"""Command-line front end.

Subcommands: ``hpd``, ``region2d``, ``coverage``, ``klrisk`` and ``density``.
Exit status is 0 on success, 2 on invalid input and 3 on numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import re
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import regions, verify
from .exceptions import DomainError, NumericalError
from .model import CensoredSample, NextNTarget, PairTarget, murthy_path, sufficient_statistic
from .predictive import GammaPrior, predictive_next_n, predictive_pair
from .svg import band_svg, halfspace_svg

log = logging.getLogger("censpred")

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3


@dataclass
class AnalysisConfig:
    n: int | None = None
    m: int | None = None
    r: int | None = None
    s: int | None = None
    next: int | None = None
    alpha: float = 0.0
    beta: float = 0.0
    lam: float = 0.05
    grid: int = regions.DEFAULT_GRID
    seed: int = 0
    data: str | None = None
    out: str | None = None
    svg: str | None = None
    theta: list[float] = field(default_factory=list)
    trials: int | None = None
    inner: int = 1000
    at: list[float] = field(default_factory=list)
    json: bool = False

    @property
    def prior(self) -> GammaPrior:
        return GammaPrior(self.alpha, self.beta)


class ParseError(DomainError):
    pass


def ingest(path, m: int, n: int | None = None) -> CensoredSample:
    """Read lifetimes (one per line or comma separated) into a censored sample.

    Values are sorted ascending and the first ``m`` kept; ``n`` defaults to
    the number of values in the file.
    """
    text = murthy_path().read_text() if str(path) == "murthy" else Path(path).read_text()
    values = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0]
        for token in re.split(r"[,\s;]+", line.strip()):
            if not token:
                continue
            try:
                v = float(token)
            except ValueError:
                raise ParseError(f"{path}:{lineno}: non-numeric token {token!r}") from None
            if not (math.isfinite(v) and v > 0):
                raise ParseError(f"{path}:{lineno}: value {token!r} is not a positive number")
            values.append(v)
    if not values:
        raise ParseError(f"{path}: no values found")
    if m > len(values):
        raise ParseError(f"{path}: m={m} exceeds the {len(values)} values in the file")
    ordered = sorted(values)
    if ordered != values:
        log.warning("%s: input was not sorted; sorted ascending before use", path)
    n = len(values) if n is None else n
    return CensoredSample(n, m, tuple(ordered[:m]))


# ---------------------------------------------------------------------------
# helpers


def _require(cfg: AnalysisConfig, *names: str) -> None:
    missing = [k for k in names if getattr(cfg, k) is None]
    if missing:
        raise DomainError("missing required option(s): " + ", ".join("--" + k for k in missing))


def _sample(cfg: AnalysisConfig) -> CensoredSample:
    _require(cfg, "data", "m")
    return ingest(cfg.data, cfg.m, cfg.n)


def _target(cfg: AnalysisConfig, n: int, m: int):
    if cfg.next is not None:
        if cfg.r is not None or cfg.s is not None:
            raise DomainError("give either --next or --r/--s, not both")
        t = NextNTarget(cfg.next)
    else:
        t = PairTarget(cfg.r if cfg.r is not None else m + 1, cfg.s if cfg.s is not None else n)
    t.validate(n, m)
    return t


def _f4(v) -> str:
    return f"{v:.4f}"


def _write(path: str | None, text: str) -> None:
    if path is None:
        return
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(text)


def _emit(cfg: AnalysisConfig, payload: dict, table: list[str]) -> None:
    text = json.dumps(payload, indent=2) + "\n"
    _write(cfg.out, text)
    if cfg.json:
        sys.stdout.write(text)
    else:
        sys.stdout.write("\n".join(table) + "\n")


def _nice_step(width: float) -> float:
    raw = width / 8
    if raw <= 0:
        return 1.0
    mag = 10 ** math.floor(math.log10(raw))
    for k in (1, 2, 5, 10):
        if k * mag >= raw:
            return k * mag
    return 10 * mag


# ---------------------------------------------------------------------------
# commands


def cmd_hpd(cfg: AnalysisConfig) -> dict:
    sample = _sample(cfg)
    x = sufficient_statistic(sample)
    N = cfg.next if cfg.next is not None else 2
    region = regions.hpd_region(cfg.prior, x, sample.n, sample.m, N, cfg.lam)
    mapped = regions.to_order_statistics(region, sample)
    inequality = " + ".join(f"{_f4(c)} z{i + 1}" for i, c in enumerate(region.coefficients))
    inequality += f" <= {_f4(region.bound)}"
    payload = {
        "n": sample.n, "m": sample.m, "N": N, "x": x, "x_m": sample.last,
        "prior": asdict(cfg.prior), "lambda": cfg.lam,
        "inequality": inequality,
        "region": regions.region_to_dict(region),
        "region_order_statistics": regions.region_to_dict(mapped),
    }
    table = [
        f"n={sample.n} m={sample.m} N={N} x={_f4(x)} x_m={_f4(sample.last)} credibility={_f4(1 - cfg.lam)}",
        f"HPD region: {inequality}",
    ]
    if cfg.svg:
        if N == 2:
            _write(cfg.svg, halfspace_svg(region, f"HPD region, credibility {1 - cfg.lam:.4g}"))
        else:
            log.warning("SVG output is two-dimensional only; N=%d region written as JSON only", N)
            payload["svg"] = "skipped: SVG is 2D-only"
    _emit(cfg, payload, table)
    return payload


def _svg_paths(base: str) -> tuple[str, str]:
    p = Path(base)
    stem = p.with_suffix("") if p.suffix == ".svg" else p
    return f"{stem}-spacings.svg", f"{stem}-order.svg"


def cmd_region2d(cfg: AnalysisConfig) -> dict:
    sample = _sample(cfg)
    x = sufficient_statistic(sample)
    target = _target(cfg, sample.n, sample.m)
    if not isinstance(target, PairTarget):
        raise DomainError("region2d predicts a pair; use --r/--s")
    n, m, r, s = sample.n, sample.m, target.r, target.s
    region = regions.build_band_region(cfg.prior, x, n, m, r, s, cfg.lam, cfg.grid)
    mapped = regions.to_order_statistics(region, sample)
    mix = predictive_pair(cfg.prior, x, n, m, r, s)

    step = _nice_step(region.a_hi - region.a_lo)
    marks = np.arange(math.ceil(region.a_lo / step), math.floor(region.a_hi / step) + 1) * step
    marks = np.round(marks, 12)
    rows = []
    for y1 in marks:
        B = regions.step2_interval(cfg.prior, x, n, m, r, s, cfg.lam, float(y1))
        rows.append({"y1": float(y1), "B": [B.lo, B.hi], "mean": B.center})
    payload = {
        "n": n, "m": m, "r": r, "s": s, "x": x, "x_m": sample.last,
        "prior": asdict(cfg.prior), "lambda": cfg.lam,
        "weight_condition": mix.condition,
        "A": [region.a_lo, region.a_hi],
        "slices": rows,
        "region": regions.region_to_dict(region),
        "region_order_statistics": regions.region_to_dict(mapped),
    }
    table = [
        f"n={n} m={m} r={r} s={s} x={_f4(x)} x_m={_f4(sample.last)} credibility={_f4(1 - cfg.lam)}",
        f"A = [{_f4(region.a_lo)}, {_f4(region.a_hi)}]",
        f"{'y1':>8} {'B_lo':>10} {'B_hi':>10} {'E(Y2|y1)':>10}",
    ]
    for row in rows:
        table.append(f"{_f4(row['y1']):>8} {_f4(row['B'][0]):>10} {_f4(row['B'][1]):>10} {_f4(row['mean']):>10}")
    if cfg.svg:
        sp, os_ = _svg_paths(cfg.svg)
        _write(sp, band_svg(region, f"Prediction region for (Y1, Y2), credibility {1 - cfg.lam:.4g}"))
        _write(os_, band_svg(mapped, f"Prediction region for (X{r}, X{s}), credibility {1 - cfg.lam:.4g}"))
    _emit(cfg, payload, table)
    return payload


def _csv_path(out: str | None) -> str | None:
    if out is None:
        return None
    return str(Path(out).with_suffix(".csv"))


def cmd_coverage(cfg: AnalysisConfig) -> verify.CoverageReport:
    _require(cfg, "n", "m")
    target = _target(cfg, cfg.n, cfg.m)
    thetas = cfg.theta or [0.5, 1.0, 2.0]
    trials = cfg.trials or 10_000
    report = verify.coverage_simulation(cfg.n, cfg.m, target, cfg.lam, thetas, trials,
                                        seed=cfg.seed, prior=cfg.prior, grid_size=cfg.grid)
    _write(cfg.out, report.to_json())
    _write(_csv_path(cfg.out), report.to_csv())
    if cfg.json:
        sys.stdout.write(report.to_json() + "\n")
    else:
        lines = [f"coverage of {target} regions, target {_f4(report.target)}, {trials} trials",
                 f"{'theta':>8} {'coverage':>10} {'stderr':>10} {'z':>8}"]
        for t, c, se, z in zip(report.thetas, report.coverage, report.stderr, report.deviations()):
            lines.append(f"{_f4(t):>8} {_f4(c):>10} {_f4(se):>10} {z:>8.2f}")
        sys.stdout.write("\n".join(lines) + "\n")
    return report


def cmd_klrisk(cfg: AnalysisConfig) -> dict:
    _require(cfg, "n", "m")
    N = cfg.next if cfg.next is not None else 2
    NextNTarget(N).validate(cfg.n, cfg.m)
    thetas = cfg.theta or [0.5, 1.0, 2.0, 4.0]
    trials = cfg.trials or 2000
    bayes = verify.kl_risk_profile(cfg.n, cfg.m, N, thetas,
                                   verify.bayes_density(cfg.prior, cfg.n, cfg.m, N),
                                   trials, cfg.seed, cfg.inner, label="bayes")
    plugin = verify.kl_risk_profile(cfg.n, cfg.m, N, thetas, verify.plugin_density(cfg.n, cfg.m, N),
                                    trials, cfg.seed, cfg.inner, label="plugin")
    payload = {"bayes": json.loads(bayes.to_json()), "plugin": json.loads(plugin.to_json())}
    _write(cfg.out, json.dumps(payload, indent=2) + "\n")
    if cfg.out:
        header, *rows_b = bayes.to_csv().splitlines()
        rows_p = plugin.to_csv().splitlines()[1:]
        lines = ["density," + header] + ["bayes," + ln for ln in rows_b] + ["plugin," + ln for ln in rows_p]
        _write(_csv_path(cfg.out), "\n".join(lines) + "\n")
    lines = [f"KL risk, n={cfg.n} m={cfg.m} N={N}, {trials} outer x {cfg.inner} inner draws",
             f"{'theta':>8} {'bayes':>10} {'stderr':>10} {'plug-in':>10} {'stderr':>10}"]
    for k, t in enumerate(thetas):
        lines.append(f"{_f4(t):>8} {_f4(bayes.risk[k]):>10} {_f4(bayes.stderr[k]):>10} "
                     f"{_f4(plugin.risk[k]):>10} {_f4(plugin.stderr[k]):>10}")
    sys.stdout.write((json.dumps(payload, indent=2) if cfg.json else "\n".join(lines)) + "\n")
    return payload


def cmd_density(cfg: AnalysisConfig) -> dict:
    sample = _sample(cfg)
    x = sufficient_statistic(sample)
    target = _target(cfg, sample.n, sample.m)
    point = np.asarray(cfg.at, dtype=float)
    if point.shape != (target.dim,):
        raise DomainError(f"--at needs {target.dim} comma-separated values")
    if isinstance(target, NextNTarget):
        value = float(predictive_next_n(cfg.prior, x, sample.n, sample.m, target.N).pdf(point))
    else:
        mix = predictive_pair(cfg.prior, x, sample.n, sample.m, target.r, target.s)
        value = float(mix.pdf(point))
    payload = {"target": repr(target), "x": x, "at": point.tolist(), "density": value}
    _emit(cfg, payload, [f"predictive density at {point.tolist()}: {value:.6g}"])
    return payload


COMMANDS = {
    "hpd": cmd_hpd,
    "region2d": cmd_region2d,
    "coverage": cmd_coverage,
    "klrisk": cmd_klrisk,
    "density": cmd_density,
}


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="censpred", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    # defaults are SUPPRESSed so that --config values are only overridden by explicit flags
    S = argparse.SUPPRESS
    common.add_argument("--config", default=None, help="JSON file with option values")
    common.add_argument("--data", default=S, help="lifetimes file (one per line or comma separated), or 'murthy' for the bundled data")
    common.add_argument("--n", type=int, default=S)
    common.add_argument("--m", type=int, default=S)
    common.add_argument("--r", type=int, default=S)
    common.add_argument("--s", type=int, default=S)
    common.add_argument("--next", type=int, default=S, help="predict the next N spacings")
    common.add_argument("--alpha", type=float, default=S)
    common.add_argument("--beta", type=float, default=S)
    common.add_argument("--lambda", dest="lam", type=float, default=S, help="1 - credibility")
    common.add_argument("--grid", type=int, default=S)
    common.add_argument("--seed", type=int, default=S)
    common.add_argument("--out", default=S, help="JSON output path (CSV alongside for reports)")
    common.add_argument("--svg", default=S, help="SVG output path")
    common.add_argument("--theta", type=_floats, default=S, help="comma-separated theta grid")
    common.add_argument("--trials", type=int, default=S)
    common.add_argument("--inner", type=int, default=S)
    common.add_argument("--at", type=_floats, default=S, help="evaluation point, comma separated")
    common.add_argument("--json", action="store_true", default=S, help="print JSON instead of a table")
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def load_config(args: argparse.Namespace) -> AnalysisConfig:
    values = {}
    if args.config:
        values.update(json.loads(Path(args.config).read_text()))
        if "lambda" in values:
            values["lam"] = values.pop("lambda")
    values.update({k: v for k, v in vars(args).items() if k not in ("config", "command")})
    known = {f.name for f in fields(AnalysisConfig)}
    unknown = set(values) - known
    if unknown:
        raise DomainError("unknown configuration keys: " + ", ".join(sorted(unknown)))
    return AnalysisConfig(**values)


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="censpred: %(message)s", stream=sys.stderr)
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        COMMANDS[args.command](cfg)
    except (DomainError, ValueError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_INVALID
    except (NumericalError, ArithmeticError) as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
