"""Command-line front end.

Configuration is TOML (the one human-editable format used here); every
quantity crosses the boundary in linear MHz, microseconds, or tesla, with
the unit named in the key, and is converted to angular units exactly once
at parse time. Subcommands write CSV (comma, ".", LF, header row plus a
unit row, preceded by a "#" metadata block) or JSON for the sync-point
tables. Output bytes depend only on the config and seed, never on the
worker count.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import __version__
from .gates import PulseSchedule, avg_gate_fidelity, compose_gate, conditional_x_target, rotation_phases, waiting_time
from .labframe import compare_with_rwa
from .noise import NoiseSpec, noise_averaged_fidelity
from .sync import analytic_sync_points, find_sync_numeric, optimized_schedule, scan_b1_tw, sweep_b1
from .systems import (
    DEFAULT_TRANSITIONS,
    PhysicalConstants,
    REGISTERS,
    SystemSpec,
    TWO_PI,
    build_rwa_model,
    detuning_margin,
    drive_frequency,
    gslac_resonance,
)

__all__ = ["RunConfig", "parse_config", "main"]


class ConfigError(Exception):
    pass


_CONSTANT_KEYS = tuple(f.name for f in dataclasses.fields(PhysicalConstants)) + ("A_zz_13C",)

# Allowed keys per config table; anything else is rejected by name.
_SCHEMA = {
    "": ("register", "Bz_T", "seed", "workers", "output", "transition", "constants_MHz", "sweep", "grid", "search", "noise"),
    "transition": None,  # validated against the register's species
    "constants_MHz": _CONSTANT_KEYS,
    "sweep": ("b1_start_MHz", "b1_stop_MHz", "count", "policy"),
    "grid": ("b1_start_MHz", "b1_stop_MHz", "count", "tw_start_us", "tw_stop_us", "tw_count", "threshold", "phase_policy"),
    "search": ("b1_start_MHz", "b1_stop_MHz", "count", "threshold", "max_m", "numeric"),
    "noise": ("t2_star_us", "quadrature_order", "method"),
}


@dataclass
class RunConfig:
    """Fully resolved run parameters, angular-unit conversion still pending.

    Frequencies stay in linear MHz here (the external convention); the
    conversion to rad/us happens in ``system_spec``/``b1_axis`` so it
    occurs exactly once per quantity.
    """

    register: str = "N15"
    bz_t: float = 0.5
    transition: dict[str, float] | None = None
    constants_mhz: dict[str, float] = field(default_factory=dict)
    seed: int = 0
    workers: int | None = None
    output: str | None = None
    # sweep / grid axes (linear MHz, us)
    b1_start_mhz: float | None = None
    b1_stop_mhz: float | None = None
    b1_count: int = 600
    policy: str = "corrected"
    tw_start_us: float = 0.0
    tw_stop_us: float | None = None
    tw_count: int = 400
    threshold: float = 0.99
    phase_policy: str = "phase_optimized"
    # sync-point search
    search_start_mhz: float | None = None
    search_stop_mhz: float | None = None
    search_count: int = 600
    search_threshold: float = 0.99
    max_m: int = 3
    numeric: bool = False
    # noise
    t2_star_us: tuple[float, ...] = (2.0, 7.0, 90.0)
    quadrature_order: int = 41
    noise_method: str = "quadrature"

    def system_spec(self) -> SystemSpec:
        overrides = {k: v for k, v in self.constants_mhz.items() if k != "A_zz_13C"}
        a_zz = self.constants_mhz.get("A_zz_13C")
        try:
            return SystemSpec(
                register=self.register,
                Bz=self.bz_t,
                A_zz_13C=None if a_zz is None else TWO_PI * a_zz,
                constants=PhysicalConstants.from_linear_mhz(overrides),
            )
        except (ValueError, KeyError) as exc:
            raise ConfigError(str(exc)) from None

    def transition_map(self) -> dict[str, float]:
        if self.transition is not None:
            return dict(self.transition)
        return dict(DEFAULT_TRANSITIONS[self.register])

    def resolved(self) -> dict:
        """Canonical dict of everything that affects numeric output."""
        d = dataclasses.asdict(self)
        d.pop("workers")
        d.pop("output")
        d["transition"] = self.transition_map()
        d["t2_star_us"] = list(self.t2_star_us)
        d["version"] = __version__
        return d

    def config_hash(self) -> str:
        blob = json.dumps(self.resolved(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:12]


def _expect(table: dict, context: str) -> None:
    allowed = _SCHEMA[context]
    if allowed is None:
        return
    for key in table:
        if key not in allowed:
            where = f" in [{context}]" if context else ""
            raise ConfigError(f"unknown key {key!r}{where}")


def _number(table: dict, key: str, default, context: str, positive=False):
    if key not in table:
        return default
    v = table[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{_path(context, key)} must be a number")
    if positive and v <= 0:
        raise ConfigError(f"{_path(context, key)} must be positive")
    return float(v)


def _count(table: dict, key: str, default, context: str):
    if key not in table:
        return default
    v = table[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{_path(context, key)} must be an integer")
    if v < 2:
        raise ConfigError(f"{_path(context, key)} must be at least 2")
    return v


def _path(context: str, key: str) -> str:
    return f"[{context}] {key}" if context else key


def parse_config(text: str) -> RunConfig:
    """Parse and validate a TOML config into a RunConfig.

    Syntax errors surface with the parser's line/column message; semantic
    errors name the offending key.
    """
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config parse error: {exc}") from None

    _expect(data, "")
    cfg = RunConfig()

    register = data.get("register", cfg.register)
    if register not in REGISTERS:
        raise ConfigError(f"unknown register: {register!r} (choose from {REGISTERS})")
    cfg.register = register
    cfg.bz_t = _number(data, "Bz_T", cfg.bz_t, "", positive=True)
    if "seed" in data:
        if isinstance(data["seed"], bool) or not isinstance(data["seed"], int):
            raise ConfigError("seed must be an integer")
        cfg.seed = data["seed"]
    if "workers" in data:
        if not isinstance(data["workers"], int) or data["workers"] < 1:
            raise ConfigError("workers must be a positive integer")
        cfg.workers = data["workers"]
    if "output" in data:
        if not isinstance(data["output"], str):
            raise ConfigError("output must be a string path")
        cfg.output = data["output"]

    if "transition" in data:
        tr = data["transition"]
        if not isinstance(tr, dict) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in tr.values()
        ):
            raise ConfigError("[transition] must map species labels to quantum numbers")
        cfg.transition = {k: float(v) for k, v in tr.items()}

    if "constants_MHz" in data:
        table = data["constants_MHz"]
        _expect(table, "constants_MHz")
        for key, v in table.items():
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ConfigError(f"[constants_MHz] {key} must be a number (linear MHz)")
        cfg.constants_mhz = {k: float(v) for k, v in table.items()}

    if "sweep" in data:
        t = data["sweep"]
        _expect(t, "sweep")
        cfg.b1_start_mhz = _number(t, "b1_start_MHz", cfg.b1_start_mhz, "sweep", positive=True)
        cfg.b1_stop_mhz = _number(t, "b1_stop_MHz", cfg.b1_stop_mhz, "sweep", positive=True)
        cfg.b1_count = _count(t, "count", cfg.b1_count, "sweep")
        cfg.policy = t.get("policy", cfg.policy)

    if "grid" in data:
        t = data["grid"]
        _expect(t, "grid")
        cfg.b1_start_mhz = _number(t, "b1_start_MHz", cfg.b1_start_mhz, "grid", positive=True)
        cfg.b1_stop_mhz = _number(t, "b1_stop_MHz", cfg.b1_stop_mhz, "grid", positive=True)
        cfg.b1_count = _count(t, "count", cfg.b1_count, "grid")
        cfg.tw_start_us = _number(t, "tw_start_us", cfg.tw_start_us, "grid")
        cfg.tw_stop_us = _number(t, "tw_stop_us", cfg.tw_stop_us, "grid", positive=True)
        cfg.tw_count = _count(t, "tw_count", cfg.tw_count, "grid")
        cfg.threshold = _number(t, "threshold", cfg.threshold, "grid", positive=True)
        cfg.phase_policy = t.get("phase_policy", cfg.phase_policy)

    if "search" in data:
        t = data["search"]
        _expect(t, "search")
        cfg.search_start_mhz = _number(t, "b1_start_MHz", cfg.search_start_mhz, "search", positive=True)
        cfg.search_stop_mhz = _number(t, "b1_stop_MHz", cfg.search_stop_mhz, "search", positive=True)
        cfg.search_count = _count(t, "count", cfg.search_count, "search")
        cfg.search_threshold = _number(t, "threshold", cfg.search_threshold, "search", positive=True)
        if "max_m" in t:
            if not isinstance(t["max_m"], int) or t["max_m"] < 1:
                raise ConfigError("[search] max_m must be a positive integer")
            cfg.max_m = t["max_m"]
        if "numeric" in t:
            if not isinstance(t["numeric"], bool):
                raise ConfigError("[search] numeric must be a boolean")
            cfg.numeric = t["numeric"]

    if "noise" in data:
        t = data["noise"]
        _expect(t, "noise")
        if "t2_star_us" in t:
            vals = t["t2_star_us"]
            if not isinstance(vals, list) or not vals or not all(
                isinstance(v, (int, float)) and not isinstance(v, bool) and v > 0 for v in vals
            ):
                raise ConfigError("[noise] t2_star_us must be a nonempty list of positive numbers")
            cfg.t2_star_us = tuple(float(v) for v in vals)
        if "quadrature_order" in t:
            if not isinstance(t["quadrature_order"], int) or t["quadrature_order"] < 3:
                raise ConfigError("[noise] quadrature_order must be an integer >= 3")
            cfg.quadrature_order = t["quadrature_order"]
        if "method" in t:
            if t["method"] not in ("quadrature", "montecarlo"):
                raise ConfigError("[noise] method must be quadrature or montecarlo")
            cfg.noise_method = t["method"]

    return cfg


# -- output ------------------------------------------------------------------


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _metadata_lines(cfg: RunConfig, spec: SystemSpec, choice: dict[str, float], extra: dict) -> list[str]:
    lines = [
        f"# nvsync {__version__}",
        f"# config_hash: {cfg.config_hash()}",
        f"# register: {spec.register}",
        "# transition: " + ",".join(f"{k}={_fmt(v)}" for k, v in sorted(choice.items())),
        f"# Bz_T: {_fmt(spec.Bz)}",
    ]
    for name, mhz in spec.constants.as_linear_mhz().items():
        unit = "MHz_per_T" if name.startswith("gamma") else "MHz"
        lines.append(f"# {name}_{unit}: {_fmt(mhz)}")
    if spec.A_zz_13C is not None:
        lines.append(f"# A_zz_13C_MHz: {_fmt(spec.A_zz_13C / TWO_PI)}")
    for k, v in extra.items():
        lines.append(f"# {k}: {_fmt(v) if isinstance(v, (int, float, bool, type(None))) else v}")
    return lines


def _write_csv(path: str, meta: list[str], columns: list[str], units: list[str], rows) -> None:
    with open(path, "w", newline="\n") as fh:
        for line in meta:
            fh.write(line + "\n")
        fh.write(",".join(columns) + "\n")
        fh.write(",".join(units) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w", newline="\n") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


# -- subcommands ---------------------------------------------------------------


def _b1_axis_rad(cfg: RunConfig, model_a_eff: float, start_attr="b1_start_mhz", stop_attr="b1_stop_mhz", count_attr="b1_count"):
    """Sweep axis in rad/us; defaults span [0.05, 3] * a_eff."""
    start = getattr(cfg, start_attr)
    stop = getattr(cfg, stop_attr)
    start = TWO_PI * start if start is not None else 0.05 * model_a_eff
    stop = TWO_PI * stop if stop is not None else 3.0 * model_a_eff
    if stop <= start:
        raise ConfigError("b1 axis is empty (stop must exceed start)")
    return np.linspace(start, stop, getattr(cfg, count_attr))


def _cmd_sweep(cfg: RunConfig) -> int:
    spec = cfg.system_spec()
    choice = cfg.transition_map()
    model = build_rwa_model(spec, choice)
    b1 = _b1_axis_rad(cfg, model.a_eff)
    result = sweep_b1(spec, choice, b1, schedule_policy=cfg.policy)
    out = cfg.output or "sweep.csv"
    meta = _metadata_lines(cfg, spec, choice, {"policy": cfg.policy, "tg_rule": "pi_over_b1"})
    rows = zip(b1 / TWO_PI, result.fidelity)
    _write_csv(out, meta, ["b1_MHz", "F_avg"], ["MHz", "1"], rows)
    print(f"wrote {out} ({len(b1)} rows)")
    return 0


def _cmd_grid(cfg: RunConfig) -> int:
    spec = cfg.system_spec()
    choice = cfg.transition_map()
    model = build_rwa_model(spec, choice)
    b1 = _b1_axis_rad(cfg, model.a_eff)
    tw_stop = cfg.tw_stop_us if cfg.tw_stop_us is not None else TWO_PI / abs(model.a_eff)
    if tw_stop <= cfg.tw_start_us:
        raise ConfigError("t_w axis is empty (stop must exceed start)")
    tw = np.linspace(cfg.tw_start_us, tw_stop, cfg.tw_count)
    result = scan_b1_tw(spec, choice, b1, tw, phase_policy=cfg.phase_policy, workers=cfg.workers)
    mask = result.fidelity > cfg.threshold
    out = cfg.output or "grid.csv"
    meta = _metadata_lines(
        cfg, spec, choice,
        {"phase_policy": cfg.phase_policy, "threshold": cfg.threshold, "tg_rule": "pi_over_b1"},
    )
    rows = (
        (b1[i] / TWO_PI, tw[j], result.fidelity[i, j], bool(mask[i, j]))
        for i in range(len(b1))
        for j in range(len(tw))
    )
    _write_csv(out, meta, ["b1_MHz", "tw_us", "F_avg", "above_threshold"], ["MHz", "us", "1", "1"], rows)
    print(f"wrote {out} ({len(b1)}x{len(tw)} cells)")
    return 0


def _evaluated_exact_points(spec, choice, model, max_m):
    """Analytic points with the fidelity their phase-corrected gate achieves.

    Corrections are the closed-form aligned phases, which reduce to the
    synchronization formula on the 15N register and generalize it to the
    registers with several off-resonant blocks.
    """
    target = conditional_x_target(model)
    points = []
    for pt in analytic_sync_points(model.a_eff, max_m):
        schedule = optimized_schedule(model, pt.b1, t_g=pt.t_g)
        f = avg_gate_fidelity(compose_gate(model, schedule), target)
        points.append(dataclasses.replace(pt, fidelity=f))
    return points


def _cmd_sync_points(cfg: RunConfig) -> int:
    spec = cfg.system_spec()
    choice = cfg.transition_map()
    model = build_rwa_model(spec, choice)
    points = _evaluated_exact_points(spec, choice, model, cfg.max_m)
    if cfg.numeric:
        lo = TWO_PI * cfg.search_start_mhz if cfg.search_start_mhz is not None else 0.05 * model.a_eff
        hi = TWO_PI * cfg.search_stop_mhz if cfg.search_stop_mhz is not None else 3.0 * model.a_eff
        points += find_sync_numeric(
            spec, choice, (lo, hi),
            threshold=cfg.search_threshold, n_points=cfg.search_count,
        )
    points.sort(key=lambda p: p.t_g)

    header = f"{'n':>4} {'m':>4} {'B1_MHz':>12} {'tg_us':>12} {'tw_us':>12} {'F_avg':>12} {'exact':>6}"
    print(header)
    for p in points:
        print(
            f"{p.n if p.n is not None else '-':>4} {p.m if p.m is not None else '-':>4} "
            f"{p.b1 / TWO_PI:>12.4f} {p.t_g:>12.4f} {p.t_w:>12.4f} {p.fidelity:>12.6f} "
            f"{'yes' if p.exact else 'no':>6}"
        )

    if cfg.output:
        payload = {
            "version": __version__,
            "config_hash": cfg.config_hash(),
            "register": spec.register,
            "transition": {k: choice[k] for k in sorted(choice)},
            "points": [
                {
                    "n": p.n,
                    "m": p.m,
                    "b1_MHz": p.b1 / TWO_PI,
                    "tg_us": p.t_g,
                    "tw_us": p.t_w,
                    "F_avg": p.fidelity,
                    "F_tw_opt": p.fidelity_tw_opt,
                    "exact": p.exact,
                }
                for p in points
            ],
        }
        stem = cfg.output
        if stem.endswith(".json"):
            _write_json(stem, payload)
            csv_path = stem[: -len(".json")] + ".csv"
        else:
            csv_path = stem
        meta = _metadata_lines(cfg, spec, choice, {"max_m": cfg.max_m, "numeric": cfg.numeric})
        rows = (
            (p.n, p.m, p.b1 / TWO_PI, p.t_g, p.t_w, p.fidelity, p.exact)
            for p in points
        )
        _write_csv(
            csv_path, meta,
            ["n", "m", "b1_MHz", "tg_us", "tw_us", "F_avg", "exact"],
            ["1", "1", "MHz", "us", "us", "1", "1"],
            rows,
        )
        print(f"wrote {cfg.output}" + (f" and {csv_path}" if stem.endswith(".json") else ""))
    return 0


def _cmd_noise_scan(cfg: RunConfig) -> int:
    spec = cfg.system_spec()
    choice = cfg.transition_map()
    model = build_rwa_model(spec, choice)
    target = conditional_x_target(model)
    b1_axis = _b1_axis_rad(cfg, model.a_eff)
    out = cfg.output or "noise.csv"

    rows = []
    for t2 in cfg.t2_star_us:
        noise = NoiseSpec(t2_star=t2, quadrature_order=cfg.quadrature_order)
        for b1 in b1_axis:
            t_g = math.pi / b1
            schedule = PulseSchedule(
                b1=b1,
                t_g=t_g,
                t_w=waiting_time(model.a_eff, t_g),
                virtual_phases=rotation_phases(model, math.pi / 2),
            )
            f = noise_averaged_fidelity(
                spec, choice, schedule, target, noise,
                method=cfg.noise_method, seed=cfg.seed,
            )
            rows.append((b1 / TWO_PI, t2, f))
    meta = _metadata_lines(
        cfg, spec, choice,
        {
            "policy": "corrected",
            "quadrature_order": cfg.quadrature_order,
            "method": cfg.noise_method,
            "sigma_rule": "sqrt2_over_t2star",
        },
    )
    _write_csv(out, meta, ["b1_MHz", "t2star_us", "F_avg"], ["MHz", "us", "1"], rows)
    print(f"wrote {out} ({len(rows)} rows)")
    return 0


def _cmd_validate(cfg: RunConfig, b1_frac: float, duration: float | None, tol: float) -> int:
    spec = cfg.system_spec()
    choice = cfg.transition_map()
    model = build_rwa_model(spec, choice)
    b1 = b1_frac * model.a_eff
    t = duration if duration is not None else min(math.pi / b1, 0.5)
    report = compare_with_rwa(spec, choice, b1, t=t)
    print(f"register:        {spec.register}  transition: {choice}")
    print(f"b1:              {b1 / TWO_PI:.6f} MHz ({b1_frac} * a_eff)")
    print(f"duration:        {report.t:.6f} us  (dt = {report.dt:.3e} us)")
    print(f"comparison F:    {report.fidelity:.9f}")
    print(f"max entry diff:  {report.max_entry_diff:.3e}")
    print(f"m_s=+1 leakage:  {report.leakage_plus_one:.3e}")
    if report.fidelity < 1 - tol:
        print(f"FAIL: comparison fidelity below 1 - {tol}", file=sys.stderr)
        return 3
    print("OK")
    return 0


def _cmd_constants(cfg: RunConfig) -> int:
    spec = cfg.system_spec()
    choice = cfg.transition_map()
    model = build_rwa_model(spec, choice)
    print(f"register: {spec.register}")
    print(f"Bz_T: {_fmt(spec.Bz)}")
    print("transition: " + ",".join(f"{k}={_fmt(v)}" for k, v in sorted(choice.items())))
    for name, mhz in spec.constants.as_linear_mhz().items():
        unit = "MHz_per_T" if name.startswith("gamma") else "MHz"
        print(f"{name}_{unit}: {_fmt(mhz)}")
    if spec.A_zz_13C is not None:
        print(f"A_zz_13C_MHz: {_fmt(spec.A_zz_13C / TWO_PI)}")
    print(f"omega0_MHz: {_fmt(drive_frequency(spec, choice) / TWO_PI)}")
    print(f"a_eff_MHz: {_fmt(model.a_eff / TWO_PI)}")
    print(f"detuning_margin_MHz: {_fmt(detuning_margin(spec) / TWO_PI)}")
    if spec.register == "N15":
        hi, lo = gslac_resonance(spec)
        print(f"gslac_mT: {_fmt(hi * 1e3)},{_fmt(lo * 1e3)}")
    return 0


# -- argument plumbing ---------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="TOML config file")
    p.add_argument("--register", choices=REGISTERS)
    p.add_argument("--bz", type=float, help="static field in T")
    p.add_argument("--transition", help='nuclear condition, e.g. "N=-0.5" or "N=1,C=0.5"')
    p.add_argument("-o", "--output", help="output file path")
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)


def _parse_transition(text: str) -> dict[str, float]:
    out = {}
    for part in text.split(","):
        if "=" not in part:
            raise ConfigError(f'bad transition component {part!r}; expected "label=m"')
        label, _, value = part.partition("=")
        try:
            out[label.strip()] = float(value)
        except ValueError:
            raise ConfigError(f"bad quantum number in transition: {value!r}") from None
    return out


def _load_config(args) -> RunConfig:
    if args.config:
        try:
            with open(args.config, "rb") as fh:
                text = fh.read().decode()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        cfg = parse_config(text)
    else:
        cfg = RunConfig()
    if args.register:
        cfg.register = args.register
    if args.bz is not None:
        if args.bz <= 0:
            raise ConfigError("Bz must be positive")
        cfg.bz_t = args.bz
    if args.transition:
        cfg.transition = _parse_transition(args.transition)
    if args.output:
        cfg.output = args.output
    if args.seed is not None:
        cfg.seed = args.seed
    if args.workers is not None:
        if args.workers < 1:
            raise ConfigError("workers must be a positive integer")
        cfg.workers = args.workers
    return cfg


def _apply_axis_flags(cfg: RunConfig, args) -> None:
    if getattr(args, "b1_start", None) is not None:
        cfg.b1_start_mhz = args.b1_start
    if getattr(args, "b1_stop", None) is not None:
        cfg.b1_stop_mhz = args.b1_stop
    if getattr(args, "count", None) is not None:
        if args.count < 2:
            raise ConfigError("count must be at least 2")
        cfg.b1_count = args.count


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="nvsync",
        description="Conditional-gate simulator for hyperfine-coupled NV registers",
    )
    parser.add_argument("--version", action="version", version=f"nvsync {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser("sweep", help="fidelity vs drive amplitude")
    _add_common(p_sweep)
    p_sweep.add_argument("--policy", choices=("corrected", "uncorrected", "phase_optimized"))
    p_sweep.add_argument("--b1-start", type=float, help="axis start, linear MHz")
    p_sweep.add_argument("--b1-stop", type=float, help="axis stop, linear MHz")
    p_sweep.add_argument("--count", type=int)

    p_grid = sub.add_parser("grid", help="fidelity over the (b1, t_w) plane")
    _add_common(p_grid)
    p_grid.add_argument("--phase-policy", choices=("phase_optimized", "pi_half", "none"))
    p_grid.add_argument("--b1-start", type=float)
    p_grid.add_argument("--b1-stop", type=float)
    p_grid.add_argument("--count", type=int)
    p_grid.add_argument("--tw-start", type=float, help="us")
    p_grid.add_argument("--tw-stop", type=float, help="us")
    p_grid.add_argument("--tw-count", type=int)
    p_grid.add_argument("--threshold", type=float)

    p_sync = sub.add_parser("sync-points", help="exact and searched operating points")
    _add_common(p_sync)
    p_sync.add_argument("--max-m", type=int)
    p_sync.add_argument("--numeric", action="store_true")
    p_sync.add_argument("--b1-start", type=float, help="search window start, linear MHz")
    p_sync.add_argument("--b1-stop", type=float, help="search window stop, linear MHz")
    p_sync.add_argument("--count", type=int, help="search grid size")
    p_sync.add_argument("--threshold", type=float)

    p_noise = sub.add_parser("noise-scan", help="noise-averaged fidelity curves")
    _add_common(p_noise)
    p_noise.add_argument("--t2star", help="comma-separated T2* list, us")
    p_noise.add_argument("--order", type=int, help="quadrature order")
    p_noise.add_argument("--method", choices=("quadrature", "montecarlo"))
    p_noise.add_argument("--b1-start", type=float)
    p_noise.add_argument("--b1-stop", type=float)
    p_noise.add_argument("--count", type=int)

    p_val = sub.add_parser("validate", help="lab-frame vs rotating-frame agreement")
    _add_common(p_val)
    p_val.add_argument("--b1-frac", type=float, default=0.1, help="b1 as a fraction of a_eff")
    p_val.add_argument("--duration", type=float, help="propagation time, us (default: min(pi/b1, 0.5))")
    p_val.add_argument("--tol", type=float, default=1e-3)

    p_const = sub.add_parser("constants", help="echo resolved constants and derived scales")
    _add_common(p_const)

    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args)
        if args.command == "sweep":
            _apply_axis_flags(cfg, args)
            if args.policy:
                cfg.policy = args.policy
            return _cmd_sweep(cfg)
        if args.command == "grid":
            _apply_axis_flags(cfg, args)
            if args.phase_policy:
                cfg.phase_policy = args.phase_policy
            if args.tw_start is not None:
                cfg.tw_start_us = args.tw_start
            if args.tw_stop is not None:
                cfg.tw_stop_us = args.tw_stop
            if args.tw_count is not None:
                if args.tw_count < 2:
                    raise ConfigError("tw-count must be at least 2")
                cfg.tw_count = args.tw_count
            if args.threshold is not None:
                cfg.threshold = args.threshold
            return _cmd_grid(cfg)
        if args.command == "sync-points":
            if args.max_m is not None:
                if args.max_m < 1:
                    raise ConfigError("max-m must be at least 1")
                cfg.max_m = args.max_m
            if args.numeric:
                cfg.numeric = True
            if args.b1_start is not None:
                cfg.search_start_mhz = args.b1_start
            if args.b1_stop is not None:
                cfg.search_stop_mhz = args.b1_stop
            if args.count is not None:
                cfg.search_count = args.count
            if args.threshold is not None:
                cfg.search_threshold = args.threshold
            return _cmd_sync_points(cfg)
        if args.command == "noise-scan":
            _apply_axis_flags(cfg, args)
            if args.t2star:
                try:
                    cfg.t2_star_us = tuple(float(v) for v in args.t2star.split(","))
                except ValueError:
                    raise ConfigError(f"bad t2star list: {args.t2star!r}") from None
                if not cfg.t2_star_us or any(v <= 0 for v in cfg.t2_star_us):
                    raise ConfigError("t2star values must be positive")
            if args.order is not None:
                if args.order < 3:
                    raise ConfigError("order must be at least 3")
                cfg.quadrature_order = args.order
            if args.method:
                cfg.noise_method = args.method
            # the noise scan is dense; 200 points resolve the curves
            if args.count is None and args.config is None:
                cfg.b1_count = 200
            return _cmd_noise_scan(cfg)
        if args.command == "validate":
            return _cmd_validate(cfg, args.b1_frac, args.duration, args.tol)
        if args.command == "constants":
            return _cmd_constants(cfg)
        raise AssertionError(f"unhandled command {args.command}")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
