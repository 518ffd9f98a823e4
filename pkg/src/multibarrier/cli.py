"""Command-line front end.

    multibarrier spectrum --barriers 6 --ratio 15
    multibarrier curve --barriers inf --ratio 200 --temps 0.1:100:600:log --out run/
    multibarrier sweep --barriers 6 --ratio 2:1:39 --temps 0.1:35:400:log --plot --out fig1/
    multibarrier analyze run/curve_N6_c15.csv
    multibarrier reproduce-figure 3 --out fig3/

Exit codes: 0 success, 1 invalid input, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import analysis
from .geometry import INFINITE, GeometryError, SpectrumConfig, make_geometry, parse_barrier_count
from .spectrum import atomic_write_text, cached_find_levels, spectrum_to_dict
from .thermo import ThermoCurve, build_curve, temperature_grid

log = logging.getLogger("multibarrier")

CACHE_ENV = "MULTIBARRIER_CACHE_DIR"
EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 1, 2

_DEFAULTS = dict(L=20.0, v=60.0, N="6", temps="0.1:100:600:log")
_CONFIG_KEYS = set(SpectrumConfig().to_dict())


class UsageError(ValueError):
    pass


def _steps(start: float, step: float, end: float) -> list[float]:
    if step <= 0 or end < start:
        raise UsageError(f"bad range {start}:{step}:{end}")
    n = int(round((end - start) / step))
    return [round(start + i * step, 10) for i in range(n + 1)]


def parse_ratios(text: str) -> list[float]:
    """'15', '2,3,4' or 'start:step:end' (inclusive)."""
    text = str(text).strip()
    try:
        if ":" in text:
            parts = [float(p) for p in text.split(":")]
            if len(parts) != 3:
                raise UsageError(f"ratio range needs start:step:end, got {text!r}")
            return _steps(*parts)
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise UsageError(f"cannot parse ratio {text!r}: {exc}") from None


def parse_temps(text: str) -> np.ndarray:
    parts = str(text).split(":")
    if len(parts) != 4:
        raise UsageError(f"--temps needs min:max:count:{{lin|log}}, got {text!r}")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"cannot parse --temps {text!r}") from None
    try:
        return temperature_grid(lo, hi, count, parts[3])
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _barrier_tag(N) -> str:
    return "inf" if N is INFINITE else str(N)


def curve_stem(N, c: float) -> str:
    return f"curve_N{_barrier_tag(N)}_c{c:g}"


_STEM_RE = re.compile(r"curve_N(?P<N>inf|\d+)_c(?P<c>[0-9.eE+-]+)$")


def parse_stem(path) -> tuple[object, float]:
    m = _STEM_RE.search(Path(path).stem)
    if not m:
        return None, float("nan")
    return parse_barrier_count(m.group("N")), float(m.group("c"))


@dataclass
class SweepPlan:
    pairs: list[tuple[object, float]]
    T: np.ndarray
    config: SpectrumConfig
    L: float = 20.0
    v: float = 60.0
    out: Path = Path(".")
    jobs: int = 1
    fmt: str = "csv"
    plot: bool = False
    log_T: bool = True
    title: str = ""
    cache_dir: Path | None = None
    critical_fit: bool = True
    extra: dict = field(default_factory=dict)

    def validate(self) -> None:
        if not self.pairs:
            raise UsageError("sweep plan is empty")
        if len(self.T) == 0:
            raise UsageError("temperature grid is empty")
        for N, c in self.pairs:
            make_geometry(self.L, N, c, self.v)


def _write_curve(curve: ThermoCurve, path: Path, fmt: str) -> Path:
    if fmt == "csv":
        path = path.with_suffix(".csv")
        curve.to_csv(path)
    else:
        path = path.with_suffix(".json")
        doc = {
            "N": _barrier_tag(curve.N), "c": curve.c,
            "T": curve.T.tolist(), "avg_energy": curve.avg_energy.tolist(),
            "specific_heat": curve.specific_heat.tolist(), "entropy": curve.entropy.tolist(),
            "free_energy": curve.free_energy.tolist(),
        }
        atomic_write_text(path, json.dumps(doc, indent=1) + "\n")
    return path


def _analyze_curve(curve: ThermoCurve, spec=None) -> dict:
    out = {"N": _barrier_tag(curve.N), "c": curve.c}
    rep = analysis.detect_peaks(curve)
    out.update(rep.to_dict())
    if spec is not None and rep.peaks:
        T_c = analysis.peak_temperature(curve, max(rep.peaks, key=lambda p: p.C_h))
        local = build_curve(spec, analysis.critical_window_grid(T_c))
        try:
            out["critical_fit"] = analysis.fit_critical_exponent(local, T_c).to_dict()
        except analysis.AnalysisError as exc:
            out["critical_fit"] = {"error": str(exc)}
    return out


def _run_pair(N, c, plan: SweepPlan) -> tuple[ThermoCurve, dict]:
    geom = make_geometry(plan.L, N, c, plan.v)
    spec = cached_find_levels(geom, plan.config, plan.cache_dir)
    curve = build_curve(spec, plan.T)
    path = _write_curve(curve, plan.out / curve_stem(N, c), plan.fmt)
    info = _analyze_curve(curve, spec if plan.critical_fit else None)
    info["file"] = path.name
    info["levels"] = len(spec)
    info["levels_below_v"] = spec.count_below(plan.v)
    return curve, info


def _pair_job(args):
    N, c, plan = args
    return _run_pair(N, c, plan)


def run_sweep(plan: SweepPlan) -> list[Path]:
    """Compute every (N, c) pair of the plan and write curves, analysis and plot."""
    plan.validate()
    plan.out.mkdir(parents=True, exist_ok=True)
    if not os.access(plan.out, os.W_OK):
        raise UsageError(f"output directory {plan.out} is not writable")
    tasks = [(N, c, plan) for N, c in plan.pairs]
    if plan.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=plan.jobs) as pool:
            results = list(pool.map(_pair_job, tasks))
    else:
        results = [_pair_job(t) for t in tasks]

    curves = [r[0] for r in results]
    infos = [r[1] for r in results]
    outputs = [plan.out / info["file"] for info in infos]
    doc = {
        "geometry": {"L": plan.L, "v": plan.v},
        "config": plan.config.to_dict(),
        "temperatures": {"min": float(plan.T[0]), "max": float(plan.T[-1]), "count": int(len(plan.T))},
        "curves": infos,
    }
    doc.update(plan.extra)
    by_n: dict[str, list[ThermoCurve]] = {}
    for cv in curves:
        by_n.setdefault(_barrier_tag(cv.N), []).append(cv)
    doc["families"] = {
        n: analysis.classify_family(cvs).to_dict() for n, cvs in sorted(by_n.items()) if len(cvs) >= 2
    }
    report = plan.out / "analysis.json"
    atomic_write_text(report, json.dumps(doc, indent=1, sort_keys=True) + "\n")
    outputs.append(report)
    if plan.plot:
        from .plotting import overlay_svg

        outputs.append(overlay_svg(curves, plan.out / "specific_heat.svg", plan.title, plan.log_T))
    return outputs


FIGURES = {
    1: dict(N=6, ratios=_steps(2, 1, 39), T=(0.1, 35.0)),
    2: dict(N=6, ratios=_steps(0.3, 0.1, 1.7), T=(0.1, 35.0)),
    3: dict(N=15, ratios=_steps(2, 1, 40), T=(0.1, 35.0)),
    4: dict(N=35, ratios=_steps(2, 1, 40), T=(0.1, 100.0)),
    5: dict(N=INFINITE, ratios=[200.0], T=(0.1, 100.0)),
    6: dict(N=INFINITE, ratios=_steps(0.3, 0.1, 3.2), T=(0.1, 100.0)),
    7: dict(N=INFINITE, ratios=_steps(2, 1, 41), T=(0.1, 100.0)),
}


def figure_plan(figure_id: int, out: Path, config: SpectrumConfig, jobs: int = 1,
                count: int = 400, cache_dir=None) -> SweepPlan:
    if figure_id not in FIGURES:
        raise UsageError(f"unknown figure {figure_id}; choose one of {sorted(FIGURES)}")
    fig = FIGURES[figure_id]
    T = temperature_grid(fig["T"][0], fig["T"][1], count, "log")
    return SweepPlan(
        pairs=[(fig["N"], c) for c in fig["ratios"]], T=T, config=config, out=out, jobs=jobs,
        plot=True, title=f"N={_barrier_tag(fig['N'])}", cache_dir=cache_dir,
        extra={"figure": figure_id},
    )


# --- argument handling ------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser, geometry: bool = True) -> None:
    if geometry:
        p.add_argument("--length", type=float, help="total array length L (default 20)")
        p.add_argument("--barriers", help="barrier count: integer >= 2, 'inf', or a comma list")
        p.add_argument("--ratio", help="gap/barrier ratio c: value, list a,b,c or start:step:end")
        p.add_argument("--height", type=float, help="barrier height v (default 60)")
    p.add_argument("--boundary", type=float, help="half-width C of the periodic box (default 90)")
    p.add_argument("--e-split", type=float, help="numeric/analytic split energy (default 1080)")
    p.add_argument("--e-min", type=float, help="lowest energy searched (default 0.1)")
    p.add_argument("--temps", help="min:max:count:{lin|log} (default 0.1:100:600:log)")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1, help="parallel (N, c) jobs")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--plot", action="store_true", help="also write an SVG overlay")
    p.add_argument("--config", help="JSON file with defaults (L, v, N, ratio, temps and solver fields)")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="multibarrier", description="Spectra and thermodynamics of 1D barrier arrays")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, text in (
        ("spectrum", "find the energy levels"),
        ("curve", "thermodynamic curves for each ratio"),
        ("sweep", "curves, family analysis and optional plot for a set of (N, c)"),
    ):
        _common(sub.add_parser(name, help=text))
    p = sub.add_parser("analyze", help="peak and family analysis of existing curve files")
    p.add_argument("files", nargs="+")
    p.add_argument("--out", default=None, help="write the JSON report here instead of stdout")
    p.add_argument("--prominence", type=float, default=analysis.PROMINENCE_MIN)
    p.add_argument("-v", "--verbose", action="store_true")
    p = sub.add_parser("reproduce-figure", help="run the sweep behind one of the figures 1-7")
    p.add_argument("figure", type=int)
    p.add_argument("--points", type=int, default=400, help="temperatures per curve")
    _common(p, geometry=False)
    return parser


def _load_config_file(path) -> dict:
    if not path:
        return {}
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    if not isinstance(doc, dict):
        raise UsageError("config file must hold a JSON object")
    allowed = _CONFIG_KEYS | {"L", "v", "N", "ratio", "temps"}
    unknown = set(doc) - allowed
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    return doc


def _settings(args) -> dict:
    cfg = {**_DEFAULTS, **_load_config_file(args.config)}
    for key, attr in (("L", "length"), ("v", "height"), ("N", "barriers"), ("ratio", "ratio"),
                      ("temps", "temps"), ("C", "boundary"), ("e_split", "e_split"), ("e_min", "e_min")):
        val = getattr(args, attr, None)
        if val is not None:
            cfg[key] = val
    return cfg


def _spectrum_config(cfg: dict) -> SpectrumConfig:
    return SpectrumConfig(**{k: cfg[k] for k in _CONFIG_KEYS if k in cfg})


def _cache_dir(out: Path) -> Path:
    env = os.environ.get(CACHE_ENV)
    return Path(env) if env else out / "cache"


def _plan_from_args(args) -> SweepPlan:
    cfg = _settings(args)
    if "ratio" not in cfg:
        raise UsageError("--ratio is required")
    counts = [parse_barrier_count(n) for n in str(cfg["N"]).split(",")]
    ratios = parse_ratios(cfg["ratio"])
    T = parse_temps(cfg["temps"])
    out = Path(args.out)
    return SweepPlan(
        pairs=[(n, c) for n in counts for c in ratios], T=T, config=_spectrum_config(cfg),
        L=float(cfg["L"]), v=float(cfg["v"]), out=out, jobs=max(1, args.jobs), fmt=args.format,
        plot=args.plot, cache_dir=_cache_dir(out),
    )


def _cmd_spectrum(args) -> int:
    plan = _plan_from_args(args)
    plan.validate()
    plan.out.mkdir(parents=True, exist_ok=True)
    for N, c in plan.pairs:
        geom = make_geometry(plan.L, N, c, plan.v)
        spec = cached_find_levels(geom, plan.config, plan.cache_dir)
        stem = plan.out / f"spectrum_N{_barrier_tag(N)}_c{c:g}"
        if plan.fmt == "json":
            atomic_write_text(stem.with_suffix(".json"), json.dumps(spectrum_to_dict(spec), indent=1) + "\n")
        else:
            atomic_write_text(stem.with_suffix(".csv"), "e\n" + "".join(f"{e:.17g}\n" for e in spec.levels))
        print(f"{geom.label()}: {len(spec)} levels in [{plan.config.e_min:g}, {plan.config.e_split:g}], "
              f"{spec.count_below(plan.v)} below v, tail from n0={spec.tail.n0}")
    return EXIT_OK


def _cmd_curve(args) -> int:
    plan = _plan_from_args(args)
    plan.validate()
    plan.out.mkdir(parents=True, exist_ok=True)
    curves = []
    for N, c in plan.pairs:
        geom = make_geometry(plan.L, N, c, plan.v)
        spec = cached_find_levels(geom, plan.config, plan.cache_dir)
        curve = build_curve(spec, plan.T)
        print(_write_curve(curve, plan.out / curve_stem(N, c), plan.fmt))
        curves.append(curve)
    if plan.plot:
        from .plotting import overlay_svg

        print(overlay_svg(curves, plan.out / "specific_heat.svg"))
    return EXIT_OK


def _cmd_sweep(args) -> int:
    for path in run_sweep(_plan_from_args(args)):
        print(path)
    return EXIT_OK


def _cmd_analyze(args) -> int:
    curves, infos = [], []
    for f in args.files:
        N, c = parse_stem(f)
        try:
            curve = ThermoCurve.from_csv(f, N, c)
        except (OSError, ValueError) as exc:
            raise UsageError(str(exc)) from None
        curves.append(curve)
        info = {"file": str(f), "N": _barrier_tag(N) if N is not None else None, "c": c}
        rep = analysis.detect_peaks(curve, args.prominence)
        info.update(rep.to_dict())
        if rep.peaks:
            T_c = analysis.peak_temperature(curve, max(rep.peaks, key=lambda p: p.C_h))
            try:
                info["critical_fit"] = analysis.fit_critical_exponent(curve, T_c).to_dict()
            except analysis.AnalysisError as exc:
                info["critical_fit"] = {"error": str(exc)}
        infos.append(info)
    doc = {"curves": infos}
    groups: dict[str, list[ThermoCurve]] = {}
    for cv in curves:
        if cv.N is not None:
            groups.setdefault(_barrier_tag(cv.N), []).append(cv)
    doc["families"] = {n: analysis.classify_family(g).to_dict() for n, g in sorted(groups.items()) if len(g) >= 2}
    text = json.dumps(doc, indent=1, sort_keys=True) + "\n"
    if args.out:
        atomic_write_text(Path(args.out), text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_figure(args) -> int:
    cfg = _settings(args)
    out = Path(args.out)
    plan = figure_plan(args.figure, out, _spectrum_config(cfg), max(1, args.jobs), args.points, _cache_dir(out))
    plan = replace(plan, fmt=args.format, L=float(cfg["L"]), v=float(cfg["v"]))
    for path in run_sweep(plan):
        print(path)
    return EXIT_OK


_COMMANDS = {
    "spectrum": _cmd_spectrum,
    "curve": _cmd_curve,
    "sweep": _cmd_sweep,
    "analyze": _cmd_analyze,
    "reproduce-figure": _cmd_figure,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _COMMANDS[args.command](args)
    except (UsageError, GeometryError, analysis.AnalysisError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ArithmeticError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
