"""Command-line front end: ``kicqb <command> ...``.

Exit codes: 0 success, 1 runtime failure, 2 invalid input (bad flags,
malformed JSON, invalid configuration).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import warnings
from dataclasses import replace
from typing import Sequence

import numpy as np

from . import analysis, circuit, cqca, momentum, oracle, spectrum
from .model import (
    Axis,
    BatterySpec,
    Boundary,
    ChargerSpec,
    ConfigError,
    KickSchedule,
    RunConfig,
    Variant,
    config_from_dict,
    is_self_dual,
    load_config,
)

ENGINES = ("auto", "cqca", "momentum", "oracle")
THREADS_ENV = "KICQB_THREADS"


class UsageError(Exception):
    """Invalid user input; reported with exit code 2."""


# ---------------------------------------------------------------------------
# engines


def _uniform_step(schedule: KickSchedule) -> float | None:
    """Common kick spacing of a uniform schedule, else ``None``."""
    if schedule.kind != "uniform" or not schedule.times:
        return None
    return schedule.times[0]


def _scaled(spec: ChargerSpec, dt: float) -> ChargerSpec:
    """Spec whose unit-time Floquet step equals one interval of length ``dt``."""
    if dt == 1.0:
        return spec
    return replace(
        spec,
        couplings=tuple(c * dt for c in spec.couplings),
        fields=tuple(f * dt for f in spec.fields),
    )


def applicable_engines(spec: ChargerSpec, schedule: KickSchedule) -> list[str]:
    """Engines able to run ``(spec, schedule)``, cheapest first."""
    out = []
    dt = _uniform_step(schedule)
    if dt is not None:
        eff = _scaled(spec, dt)
        if is_self_dual(eff):
            out.append("cqca")
        if (
            spec.variant is Variant.XX
            and spec.boundary is Boundary.PBC
            and spec.long_range_alpha is None
            and len(set(spec.couplings)) == 1
            and len(set(spec.fields)) == 1
        ):
            out.append("momentum")
    if spec.n_sites <= oracle.MAX_SITES:
        out.append("oracle")
    return out


def run_engine(spec: ChargerSpec, schedule: KickSchedule, engine: str = "auto") -> oracle.ChargingTrace:
    """Shifted-normalized energy after every kick of ``schedule``."""
    valid = applicable_engines(spec, schedule)
    if engine == "auto":
        if not valid:
            raise ConfigError("no engine handles this configuration (N too large for the oracle)")
        engine = valid[0]
    elif engine not in valid:
        raise ConfigError(f"engine {engine!r} cannot run this configuration; applicable: {', '.join(valid) or 'none'}")
    if engine == "oracle":
        return oracle.evolve(spec, BatterySpec.for_charger(spec), schedule)
    eff = _scaled(spec, _uniform_step(schedule))
    if engine == "cqca":
        trace = cqca.energy_trace_cqca(eff, schedule.m)
    else:
        trace = momentum.energy_trace_momentum(eff, schedule.m)
    trace.times = [0.0, *schedule.times]
    trace.final_energy = trace.energy[-1]
    return trace


def _workers(args) -> int:
    if getattr(args, "workers", None):
        return int(args.workers)
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
    return 1


# ---------------------------------------------------------------------------
# I/O helpers


def _fmt(x: float) -> str:
    return repr(float(x))


def trace_rows(trace: oracle.ChargingTrace, param: str | None = None) -> list[dict[str, str]]:
    rows = []
    for i, (k, e) in enumerate(zip(trace.kicks, trace.energy)):
        row = {"kick": str(k), "time": _fmt(trace.times[i]), "energy_normalized": _fmt(e)}
        if trace.energy_std is not None:
            row["energy_std"] = _fmt(trace.energy_std[i])
        row["engine"] = trace.engine
        if param is not None:
            row = {"param": param, **row}
        rows.append(row)
    return rows


def _write_csv(rows: list[dict[str, str]], out: str | None) -> None:
    if not rows:
        raise UsageError("nothing to write")
    fields: list[str] = []
    for row in rows:
        for key in row:
            if key not in fields:
                fields.append(key)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n", restval="")
    writer.writeheader()
    writer.writerows(rows)
    _emit(buf.getvalue(), out)


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(data, out: str | None) -> None:
    _emit(json.dumps(data, indent=2, sort_keys=True) + "\n", out)


def _config(args) -> RunConfig:
    """Configuration from ``--config`` or from the inline flags."""
    if getattr(args, "config", None):
        cfg = load_config(args.config)
    else:
        if args.n is None:
            raise UsageError("give --config FILE or at least --n")
        data = {"variant": args.variant, "n": args.n, "boundary": args.boundary}
        if args.J is not None:
            data["J"] = args.J
        if args.b is not None:
            data["b"] = args.b
        if getattr(args, "alpha", None) is not None:
            data["alpha"] = args.alpha
        data["schedule"] = {"kind": "uniform", "m": args.m if args.m is not None else args.n}
        cfg = config_from_dict(data)
    if getattr(args, "m", None) is not None and getattr(args, "config", None):
        if cfg.schedule.kind != "uniform":
            raise UsageError("--m overrides only uniform schedules")
        cfg.schedule = KickSchedule.uniform(args.m)
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    return cfg


def _add_spec_flags(p: argparse.ArgumentParser, m: bool = True) -> None:
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--variant", default="XX", type=str.upper, choices=["XX", "ZZ"])
    p.add_argument("--n", type=int, help="number of cells")
    p.add_argument("--boundary", default="PBC", type=str.upper, choices=["PBC", "OBC"])
    p.add_argument("--J", type=float, help="Ising coupling (default pi/4)")
    p.add_argument("--b", type=float, help="kick field (default -pi/4)")
    if m:
        p.add_argument("--m", type=int, help="number of uniform unit-spaced kicks")


# ---------------------------------------------------------------------------
# commands


def cmd_charge(args) -> int:
    cfg = _config(args)
    spec, schedule = cfg.spec, cfg.schedule
    if args.compare:
        engines = applicable_engines(spec, schedule)
        traces = [run_engine(spec, schedule, e) for e in engines]
        rows = [r for t in traces for r in trace_rows(t)]
        report = {
            "engines": engines,
            "max_abs_diff": max(
                (a.max_deviation(b) for i, a in enumerate(traces) for b in traces[i + 1:]), default=0.0
            ),
        }
        sys.stderr.write(json.dumps(report, sort_keys=True) + "\n")
    else:
        trace = run_engine(spec, schedule, args.engine)
        rows = trace_rows(trace)
        traces = [trace]
    if args.format == "json":
        _emit_json(
            [
                {"engine": t.engine, "kicks": t.kicks, "energy": t.energy, "final_energy": t.final_energy}
                for t in traces
            ],
            args.out,
        )
    else:
        _write_csv(rows, args.out)
    return 0


def _parse_values(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"--values expects comma-separated numbers, got {text!r}") from None


def cmd_sweep(args) -> int:
    cfg = _config(args)
    spec, schedule = cfg.spec, cfg.schedule
    if spec.n_sites > oracle.MAX_SITES:
        raise UsageError(f"sweeps run on the statevector oracle (N <= {oracle.MAX_SITES})")
    battery = BatterySpec.for_charger(spec)
    workers = _workers(args)
    values = _parse_values(args.values)
    rows: list[dict[str, str]] = []
    for v in values:
        label = _fmt(v)
        if args.axis == "disorder":
            trace = oracle.disorder_run(spec, battery, schedule, v, args.realizations, cfg.seed, workers)
        elif args.axis == "alpha":
            trace = oracle.long_range_run(v, spec, battery, schedule)
        elif args.axis == "quasikick":
            trace = oracle.quasikick_run(v, spec, battery, schedule.m)
        elif args.axis == "quench":
            trace = oracle.slow_quench_run(v, spec, battery, schedule.m)
        else:
            m = int(v)
            if m != v or m < 0:
                raise UsageError("schedule sweep values are kick counts")
            mean, std = oracle.random_schedule_run(spec, m, args.realizations, args.window, cfg.seed, workers)
            rows.append({"param": str(m), "kick": str(m), "time": _fmt(args.window),
                         "energy_normalized": _fmt(mean), "energy_std": _fmt(std), "engine": "oracle-schedule"})
            continue
        rows += trace_rows(trace, label)
    _write_csv(rows, args.out)
    return 0


_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf")


def _read_traces(path: str) -> list[tuple[str, list[float], list[float]]]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"kick", "energy_normalized"} <= set(reader.fieldnames):
            raise UsageError(f"{path}: expected columns 'kick' and 'energy_normalized'")
        groups: dict[str, tuple[list[float], list[float]]] = {}
        for row in reader:
            key = row.get("param") or row.get("engine") or os.path.basename(path)
            xs, ys = groups.setdefault(key, ([], []))
            try:
                xs.append(float(row["kick"]))
                ys.append(float(row["energy_normalized"]))
            except (TypeError, ValueError):
                raise UsageError(f"{path}: non-numeric entry in row {row}") from None
    if not groups:
        raise UsageError(f"{path}: empty trace")
    return [(k, xs, ys) for k, (xs, ys) in groups.items()]


def render_svg(series: Sequence[tuple[str, list[float], list[float]]], title: str = "") -> str:
    """Line plot of ``(label, x, y)`` series on a fixed 640x400 canvas."""
    if not series:
        raise UsageError("no series to plot")
    width, height, left, right, top, bottom = 640, 400, 60, 150, 30, 50
    xs = [x for _, sx, _ in series for x in sx]
    x0, x1 = min(xs), max(xs)
    if x1 == x0:
        x1 = x0 + 1
    y0, y1 = 0.0, max(1.0, max(y for _, _, sy in series for y in sy))

    def px(x):
        return left + (x - x0) / (x1 - x0) * (width - left - right)

    def py(y):
        return height - bottom - (y - y0) / (y1 - y0) * (height - top - bottom)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{left}" y1="{py(y0):.2f}" x2="{width - right}" y2="{py(y0):.2f}" stroke="black"/>',
        f'<line x1="{left}" y1="{py(y0):.2f}" x2="{left}" y2="{py(y1):.2f}" stroke="black"/>',
    ]
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        y = y0 + frac * (y1 - y0)
        out.append(f'<text x="{left - 8}" y="{py(y) + 4:.2f}" font-size="11" text-anchor="end">{y:.2f}</text>')
    for frac in (0.0, 0.5, 1.0):
        x = x0 + frac * (x1 - x0)
        out.append(f'<text x="{px(x):.2f}" y="{height - bottom + 18}" font-size="11" text-anchor="middle">{x:g}</text>')
    out.append(f'<text x="{(left + width - right) / 2:.2f}" y="{height - 10}" font-size="12" text-anchor="middle">kick</text>')
    out.append(f'<text x="14" y="{(top + height - bottom) / 2:.2f}" font-size="12" text-anchor="middle" '
               f'transform="rotate(-90 14 {(top + height - bottom) / 2:.2f})">E/(N omega0)</text>')
    if title:
        out.append(f'<text x="{width / 2:.2f}" y="18" font-size="13" text-anchor="middle">{_xml(title)}</text>')
    for idx, (label, sx, sy) in enumerate(series):
        color = _PALETTE[idx % len(_PALETTE)]
        pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(sx, sy))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        ly = top + 16 * idx + 8
        out.append(f'<line x1="{width - right + 10}" y1="{ly}" x2="{width - right + 30}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{width - right + 35}" y="{ly + 4}" font-size="11">{_xml(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _xml(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def cmd_plot(args) -> int:
    series = []
    for path in args.traces:
        series += _read_traces(path)
    _emit(render_svg(series, args.title or ""), args.out)
    return 0


def cmd_spectrum(args) -> int:
    cat = spectrum.eigenphases(args.n, args.boundary)
    data = cat.to_json()
    data["verified"] = None
    if args.verify:
        if args.n > spectrum.MAX_BRUTE_FORCE_SITES:
            raise UsageError(f"--verify needs N <= {spectrum.MAX_BRUTE_FORCE_SITES}")
        data["verified"] = spectrum.verify_catalog(args.n, args.boundary, args.variant)
    _emit_json(data, args.out)
    return 0 if data["verified"] in (None, True) else 1


def cmd_tfim(args) -> int:
    J = math.pi / 4 if args.J is None else args.J
    b = -math.pi / 4 if args.b is None else args.b
    if args.steps < 1 or args.t_max < 0:
        raise UsageError("need --steps >= 1 and --t-max >= 0")
    rows = []
    for t in np.linspace(0.0, args.t_max, args.steps + 1):
        row = {"t": _fmt(t), "energy_normalized": _fmt(momentum.tfim_energy(args.n, J, b, float(t)) / args.n)}
        if args.limit:
            row["limit"] = _fmt(momentum.thermodynamic_limit_energy(float(t), shifted=True))
        rows.append(row)
    _write_csv(rows, args.out)
    return 0


def cmd_entropy(args) -> int:
    n, bc = args.n, args.boundary
    if n % 2:
        raise UsageError("entropy profiles are defined for even N")
    cycle = analysis.entropy_cycle(n, bc)
    states = None
    if args.oracle:
        spec = ChargerSpec.uniform(Variant.ZZ, n, bc)
        states = oracle.evolve_states(spec, cycle)
    rows = []
    for t in range(cycle + 1):
        ents = oracle.bond_entropies(states[t], n) if states is not None else None
        for i in range(1, n):
            row = {"t": str(t), "bond": str(i), "entropy": _fmt(analysis.entropy_profile(n, bc, i, t))}
            if ents is not None:
                row["oracle"] = _fmt(ents[i - 1])
            rows.append(row)
    _write_csv(rows, args.out)
    return 0


def cmd_correlators(args) -> int:
    cfg = _config(args)
    spec = cfg.spec
    m_max = cfg.schedule.m
    if not 1 <= args.site <= spec.n_sites:
        raise UsageError(f"--site must lie in 1..{spec.n_sites}")
    if is_self_dual(spec):
        grid = cqca.lightcone_map(spec, args.site, m_max)
        engine = "cqca"
    else:
        if spec.n_sites > 10:
            raise UsageError("non-self-dual correlators use dense matrices (N <= 10)")
        grid = np.array([
            [oracle.correlator_norm_dense(spec, args.site, j, m) for j in range(1, spec.n_sites + 1)]
            for m in range(m_max + 1)
        ])
        engine = "oracle"
    rows = [
        {"kick": str(m), "site": str(j + 1), "norm": _fmt(grid[m, j]), "engine": engine}
        for m in range(m_max + 1)
        for j in range(spec.n_sites)
    ]
    _write_csv(rows, args.out)
    return 0


def cmd_circuit(args) -> int:
    cfg = load_config(args.spec)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", circuit.CircuitAngleWarning)
        gates = circuit.emit_circuit(cfg.spec, cfg.schedule, measure=args.measure)
    for w in caught:
        sys.stderr.write(f"warning: {w.message}\n")
    _emit(gates.dumps(), args.out)
    report = {"resources": gates.resources(), "closed_form": circuit.resource_count(cfg.spec, cfg.schedule)}
    status = 0
    if args.verify:
        if cfg.spec.n_sites > oracle.MAX_SITES:
            raise UsageError(f"--verify needs N <= {oracle.MAX_SITES}")
        f = oracle.fidelity(circuit.replay(gates), oracle.final_state(cfg.spec, cfg.schedule))
        report["fidelity"] = f
        report["verified"] = f > 1 - 1e-10
        status = 0 if report["verified"] else 1
    sys.stderr.write(json.dumps(report, sort_keys=True) + "\n")
    return status


def cmd_sample(args) -> int:
    cfg = _config(args)
    spec = cfg.spec
    state = oracle.final_state(spec, cfg.schedule)
    basis = args.basis or spec.battery_axis.value
    samples = oracle.sample(state, basis, args.shots, cfg.seed)
    if args.out:
        samples.dump(args.out)
    else:
        sys.stdout.write(f"# basis={samples.basis} shots={samples.shots} seed={samples.seed}\n")
        sys.stdout.write("\n".join(samples.bitstrings()) + "\n")
    return 0


def cmd_analyze(args) -> int:
    samples = oracle.SampleSet.load(args.samples)
    report: dict = {"shots": samples.shots, "n": samples.n, "basis": samples.basis}
    report["p0"] = analysis.p0_statistics(samples)
    if samples.shots >= 2:
        report["covariance"] = analysis.covariance_matrix(samples).to_json()
    battery = BatterySpec(Axis(samples.basis) if samples.basis in ("Z", "Y") else Axis.Z, args.omega0)
    report["energy"] = analysis.energy_with_variance(samples, battery)
    if samples.n % 2 == 0:
        emp = analysis.distribution(samples)
        report["half_cycle"] = [
            {"bitstring": s, "ideal": p, "observed": emp.get(s, 0.0)}
            for s, p in analysis.ideal_half_cycle_distribution(samples.n)
        ]
    _emit_json(report, args.out)
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kicqb", description="Kicked-Ising quantum battery toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("charge", help="energy trace of one charging run")
    _add_spec_flags(p)
    p.add_argument("--alpha", type=float, help="long-range exponent")
    p.add_argument("--engine", default="auto", choices=ENGINES)
    p.add_argument("--compare", action="store_true", help="run every applicable engine")
    p.add_argument("--format", default="csv", choices=["csv", "json"])
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_charge)

    p = sub.add_parser("sweep", help="bundle of traces over a perturbation parameter")
    _add_spec_flags(p)
    p.add_argument("--axis", required=True, choices=["disorder", "alpha", "quasikick", "quench", "schedule"])
    p.add_argument("--values", required=True, help="comma-separated parameter values")
    p.add_argument("--realizations", type=int, default=10)
    p.add_argument("--window", type=float, default=1.0, help="window for random schedules")
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int, help=f"threads (default ${THREADS_ENV} or 1)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("plot", help="SVG line plot of trace CSV files")
    p.add_argument("traces", nargs="+")
    p.add_argument("--title")
    p.add_argument("--out")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("spectrum", help="catalogued Floquet eigenphases")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--boundary", default="PBC", type=str.upper, choices=["PBC", "OBC"])
    p.add_argument("--variant", default="XX", type=str.upper, choices=["XX", "ZZ"])
    p.add_argument("--verify", action="store_true", help="compare with dense diagonalization")
    p.add_argument("--out")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("tfim", help="continuous transverse-field Ising charging curve")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--J", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--t-max", type=float, default=2.0)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--limit", action="store_true", help="add the infinite-chain column")
    p.add_argument("--out")
    p.set_defaults(func=cmd_tfim)

    p = sub.add_parser("entropy", help="bond entropies over one cycle (ZZ charger)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--boundary", default="OBC", type=str.upper, choices=["PBC", "OBC"])
    p.add_argument("--oracle", action="store_true", help="add statevector Schmidt entropies")
    p.add_argument("--out")
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("correlators", help="light cone of the Z-Z commutator norm")
    _add_spec_flags(p)
    p.add_argument("--site", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_correlators)

    p = sub.add_parser("circuit", help="emit the gate sequence of a ZZ-charger run")
    p.add_argument("--spec", required=True, help="JSON run configuration")
    p.add_argument("--measure", choices=["Z", "Y"])
    p.add_argument("--verify", action="store_true", help="replay against the statevector oracle")
    p.add_argument("--out")
    p.set_defaults(func=cmd_circuit)

    p = sub.add_parser("sample", help="Born-rule samples of the final state")
    _add_spec_flags(p)
    p.add_argument("--shots", type=int, default=1000)
    p.add_argument("--basis", type=str.upper, choices=["Z", "Y"])
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("analyze-samples", help="P0, covariance and energy of a sample file")
    p.add_argument("samples")
    p.add_argument("--omega0", type=float, default=1.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_analyze)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except json.JSONDecodeError as exc:
        sys.stderr.write(f"error: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}\n")
        return 2
    except (UsageError, ConfigError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except FileNotFoundError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except (ValueError, RuntimeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
