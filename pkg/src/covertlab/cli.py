"""Command-line surface: rate sweeps as CSV, plan assembly, verification runner.

Every run is byte-deterministic given its flags and seed: the resolved
configuration is echoed as ``# key=value`` comment lines ahead of the CSV
header, floats are written with shortest round-trip precision, and empty
cells mark boundary or non-covert-regime signals.

Option precedence: explicit flags > config file (``key=value`` lines,
UTF-8, ``#`` comments) > preset > built-in default.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from importlib import resources

import numpy as np

from .channels import ChannelParams
from .formulas import (
    BoundaryError,
    CovertBudget,
    NonCovertRegime,
    capacity_asymptote,
    dual_rail_rate,
    q_max,
    rate_constants,
    single_rail_rate,
    total_ebits_dual_rail,
    total_ebits_optimal,
    total_ebits_single_rail,
)
from .oracles import render_reports, run_suite
from .sparse import SparseConfig, covert_ebit_plan, q_from_budget, sample_secret

CSV_HEADER = "abscissa,optimal_ebits,single_rail_ebits,dual_rail_ebits,c_cov,c_rel,r_sr,r_dr,q_max"
LINK_TABLE_HEADER = ["wavelength_nm", "eta", "nbar_b"]

PRESETS = {
    "fig4a": {"command": "sweep-nbar", "eta": 0.95, "n": 1e8, "delta": 0.05},
    "fig4b": {"command": "sweep-nbar", "eta": 0.8, "n": 1e8, "delta": 0.05},
    "fig4c": {"command": "sweep-nbar", "eta": 0.65, "n": 1e8, "delta": 0.05},
    "fig5a": {"command": "sweep-eta", "nbar_b": 1e-6, "n": 60e9, "delta": 0.05},
    "fig5b": {"command": "sweep-eta", "nbar_b": 1e-3, "n": 60e9, "delta": 0.05},
    "fig5c": {"command": "sweep-eta", "nbar_b": 1e-1, "n": 60e9, "delta": 0.05},
    "fig6": {"command": "sweep-fso", "t_seconds": 60.0, "w_hz": 1e9, "delta": 0.05},
    "fig6w10": {"command": "sweep-fso", "t_seconds": 60.0, "w_hz": 1e10, "delta": 0.05},
}

_SCHEMAS = {
    "sweep-nbar": {
        "eta": float,
        "n": float,
        "delta": float,
        "vartheta": float,
        "grid": str,
        "seed": int,
    },
    "sweep-eta": {
        "nbar_b": float,
        "n": float,
        "delta": float,
        "vartheta": float,
        "grid": str,
        "seed": int,
    },
    "sweep-fso": {
        "link_table": str,
        "t_seconds": float,
        "w_hz": float,
        "delta": float,
        "vartheta": float,
        "seed": int,
    },
    "plan": {"eta": float, "nbar_b": float, "n": float, "delta": float, "vartheta": float},
    "verify": {"suite": str, "seed": int},
    "sample-secret": {
        "n": float,
        "q": float,
        "eta": float,
        "nbar_b": float,
        "delta": float,
        "vartheta": float,
        "seed": int,
    },
}

_DEFAULTS = {
    "sweep-nbar": {"delta": 0.05, "vartheta": 0.01, "grid": "1e-4:1e2:161:log", "seed": 0},
    "sweep-eta": {"delta": 0.05, "vartheta": 0.01, "grid": "0.01:0.99:99:lin", "seed": 0},
    "sweep-fso": {"t_seconds": 60.0, "w_hz": 1e9, "delta": 0.05, "vartheta": 0.01, "seed": 0},
    "plan": {"vartheta": 0.01},
    "verify": {"suite": "all", "seed": 0},
    "sample-secret": {"vartheta": 0.01, "seed": 0},
}


class CliError(ValueError):
    pass


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_grid(spec: str) -> np.ndarray:
    parts = spec.split(":")
    if len(parts) not in (3, 4):
        raise CliError(f"grid {spec!r} must be start:stop:count[:lin|log]")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise CliError(f"grid {spec!r}: {exc}") from None
    scale = parts[3] if len(parts) == 4 else "log"
    if count < 1:
        raise CliError(f"grid {spec!r}: count must be >= 1")
    if scale == "log":
        if start <= 0 or stop <= 0:
            raise CliError(f"grid {spec!r}: log scale needs positive endpoints")
        return np.logspace(math.log10(start), math.log10(stop), count)
    if scale == "lin":
        return np.linspace(start, stop, count)
    raise CliError(f"grid {spec!r}: scale must be lin or log")


def _read_config_file(path: str) -> dict[str, str]:
    values = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise CliError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            values[key.strip().replace("-", "_")] = value.strip()
    return values


def _resolve(command: str, args: argparse.Namespace) -> dict:
    schema = _SCHEMAS[command]
    resolved = dict(_DEFAULTS[command])
    preset_name = getattr(args, "preset", None)
    if preset_name:
        if preset_name not in PRESETS:
            raise CliError(f"unknown preset {preset_name!r}")
        preset = dict(PRESETS[preset_name])
        if preset.pop("command") != command:
            raise CliError(f"preset {preset_name!r} belongs to a different subcommand")
        resolved.update(preset)
        resolved["preset"] = preset_name
    config_path = getattr(args, "config", None)
    if config_path:
        for key, raw in _read_config_file(config_path).items():
            if key not in schema:
                raise CliError(f"config key {key!r} is not valid for {command}")
            resolved[key] = schema[key](raw)
    for key, conv in schema.items():
        value = getattr(args, key, None)
        if value is not None:
            resolved[key] = conv(value)
    return resolved


def _require(resolved: dict, command: str, *keys: str) -> None:
    missing = [k for k in keys if k not in resolved]
    if missing:
        raise CliError(
            f"{command} needs {', '.join('--' + k.replace('_', '-') for k in missing)} "
            "(directly, via --config, or via --preset)"
        )


def _config_comments(command: str, resolved: dict) -> list[str]:
    lines = [f"# command={command}"]
    for key in sorted(resolved):
        lines.append(f"# {key}={_fmt(resolved[key])}")
    return lines


def _sweep_cells(params: ChannelParams, budget: CovertBudget, vartheta: float) -> list[str]:
    """The eight derived columns for one grid point; empty cell = signal."""
    r_sr = single_rail_rate(params)
    r_dr = dual_rail_rate(params)
    try:
        consts = rate_constants(params)
        c_cov, c_rel = _fmt(consts.c_cov), _fmt(consts.c_rel)
        optimal = _fmt(total_ebits_optimal(params, budget))
    except BoundaryError:
        c_cov = c_rel = optimal = ""
    try:
        q_cell = _fmt(q_max(params, budget))
        single = _fmt(total_ebits_single_rail(params, budget, vartheta))
        dual = _fmt(total_ebits_dual_rail(params, budget, vartheta))
    except NonCovertRegime:
        q_cell = single = dual = ""
    except BoundaryError:
        q_cell = single = dual = ""
    return [optimal, single, dual, c_cov, c_rel, _fmt(r_sr), _fmt(r_dr), q_cell]


def _emit(lines: list[str], out_path: str | None) -> None:
    text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _cmd_sweep_nbar(args: argparse.Namespace) -> int:
    resolved = _resolve("sweep-nbar", args)
    _require(resolved, "sweep-nbar", "eta", "n")
    eta, n = resolved["eta"], resolved["n"]
    budget = CovertBudget(delta_c=resolved["delta"], n=n)
    asymptote_total = math.sqrt(n * resolved["delta"]) * capacity_asymptote(eta)
    lines = _config_comments("sweep-nbar", resolved)
    lines.append(CSV_HEADER + ",asymptote_ebits")
    for nbar in _parse_grid(resolved["grid"]):
        params = ChannelParams(eta, float(nbar))
        cells = _sweep_cells(params, budget, resolved["vartheta"])
        lines.append(",".join([_fmt(float(nbar))] + cells + [_fmt(asymptote_total)]))
    _emit(lines, args.out)
    return 0


def _cmd_sweep_eta(args: argparse.Namespace) -> int:
    resolved = _resolve("sweep-eta", args)
    _require(resolved, "sweep-eta", "nbar_b", "n")
    nbar_b, n = resolved["nbar_b"], resolved["n"]
    budget = CovertBudget(delta_c=resolved["delta"], n=n)
    lines = _config_comments("sweep-eta", resolved)
    lines.append(CSV_HEADER)
    for eta in _parse_grid(resolved["grid"]):
        if not 0.0 <= eta < 1.0:
            raise CliError(f"eta grid point {eta!r} outside [0, 1) (eta = 1 diverges)")
        params = ChannelParams(float(eta), nbar_b)
        cells = _sweep_cells(params, budget, resolved["vartheta"])
        lines.append(",".join([_fmt(float(eta))] + cells))
    _emit(lines, args.out)
    return 0


def bundled_link_table() -> str:
    """Path of the sample wavelength -> (eta, nbar_b) table shipped with the package."""
    return str(resources.files("covertlab").joinpath("data/mls_sample.csv"))


def read_link_table(path: str) -> list[tuple[float, float, float]]:
    """Parse and validate a link table CSV with header wavelength_nm,eta,nbar_b."""
    rows = []
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise CliError(f"{path}: empty link table") from None
        if [h.strip() for h in header] != LINK_TABLE_HEADER:
            raise CliError(f"{path}:1: header must be {','.join(LINK_TABLE_HEADER)}")
        last_wl = None
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 3:
                raise CliError(f"{path}:{lineno}: expected 3 columns, got {len(row)}")
            try:
                wl, eta, nbar = (float(cell) for cell in row)
            except ValueError:
                raise CliError(f"{path}:{lineno}: non-numeric cell in {row!r}") from None
            if not 0.0 <= eta <= 1.0:
                raise CliError(f"{path}:{lineno}: eta {eta!r} outside [0, 1]")
            if nbar < 0.0:
                raise CliError(f"{path}:{lineno}: nbar_b {nbar!r} is negative")
            if last_wl is not None and wl <= last_wl:
                raise CliError(f"{path}:{lineno}: wavelengths must be strictly increasing")
            last_wl = wl
            rows.append((wl, eta, nbar))
    if not rows:
        raise CliError(f"{path}: link table has no data rows")
    return rows


def _cmd_sweep_fso(args: argparse.Namespace) -> int:
    resolved = _resolve("sweep-fso", args)
    table_path = resolved.get("link_table") or bundled_link_table()
    resolved["link_table"] = table_path
    rows = read_link_table(table_path)
    n = resolved["t_seconds"] * resolved["w_hz"]
    resolved["n_modes"] = n
    budget = CovertBudget(delta_c=resolved["delta"], n=n)
    lines = _config_comments("sweep-fso", resolved)
    lines.append(CSV_HEADER)
    for wl, eta, nbar in rows:
        params = ChannelParams(eta, nbar)
        cells = _sweep_cells(params, budget, resolved["vartheta"])
        lines.append(",".join([_fmt(wl)] + cells))
    _emit(lines, args.out)
    return 0


def _cmd_plan(args: argparse.Namespace) -> int:
    resolved = _resolve("plan", args)
    _require(resolved, "plan", "eta", "nbar_b", "n", "delta")
    params = ChannelParams(resolved["eta"], resolved["nbar_b"])
    budget = CovertBudget(delta_c=resolved["delta"], n=resolved["n"])
    plan = covert_ebit_plan(params, budget, resolved["vartheta"])
    lines = _config_comments("plan", resolved)
    for key in (
        "q",
        "expected_nonzero_uses",
        "r_sr",
        "r_dr",
        "total_optimal",
        "total_single_rail",
        "total_dual_rail",
    ):
        lines.append(f"{key}={_fmt(getattr(plan, key))}")
    for reason in plan.reasons:
        lines.append(f"reason={reason}")
    _emit(lines, args.out)
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    resolved = _resolve("verify", args)
    reports = run_suite(resolved["suite"], resolved["seed"])
    text = "".join(line + "\n" for line in _config_comments("verify", resolved))
    text += render_reports(reports)
    failed = sum(not r.passed for r in reports)
    text += f"# {len(reports) - failed}/{len(reports)} reports passed\n"
    sys.stdout.write(text)
    return 0 if failed == 0 else 1


def _cmd_sample_secret(args: argparse.Namespace) -> int:
    resolved = _resolve("sample-secret", args)
    _require(resolved, "sample-secret", "n")
    if "q" not in resolved:
        _require(resolved, "sample-secret", "eta", "nbar_b", "delta")
        params = ChannelParams(resolved["eta"], resolved["nbar_b"])
        budget = CovertBudget(delta_c=resolved["delta"], n=resolved["n"])
        resolved["q"] = q_from_budget(params, budget)
    config = SparseConfig(n=int(resolved["n"]), q=resolved["q"], vartheta=resolved["vartheta"])
    pair = sample_secret(config, resolved["seed"])
    lines = _config_comments("sample-secret", resolved)
    lines.append(pair.to_text().rstrip("\n"))
    _emit(lines, args.out)
    return 0


def _add_common(sub: argparse.ArgumentParser, *, seeded: bool = True) -> None:
    sub.add_argument("--config", help="optional key=value config file (flags take precedence)")
    sub.add_argument("--out", help="output path (default: standard output)")
    if seeded:
        sub.add_argument("--seed", type=int, help="seed for the counter-based generator")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="covertlab",
        description="Covert entanglement-generation rate laboratory for lossy "
        "thermal-noise bosonic channels.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep-nbar", help="rate totals vs thermal photon number (CSV)")
    p.add_argument("--eta", type=float)
    p.add_argument("--n", type=float, help="number of channel uses")
    p.add_argument("--delta", type=float, help="covertness budget delta_c (nats)")
    p.add_argument("--vartheta", type=float)
    p.add_argument("--grid", help="start:stop:count[:lin|log]")
    p.add_argument("--preset", help="|".join(k for k in PRESETS if k.startswith("fig4")))
    _add_common(p)
    p.set_defaults(func=_cmd_sweep_nbar)

    p = sub.add_parser("sweep-eta", help="rate totals vs transmittance (CSV)")
    p.add_argument("--nbar-b", dest="nbar_b", type=float)
    p.add_argument("--n", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--vartheta", type=float)
    p.add_argument("--grid", help="start:stop:count[:lin|log]")
    p.add_argument("--preset", help="|".join(k for k in PRESETS if k.startswith("fig5")))
    _add_common(p)
    p.set_defaults(func=_cmd_sweep_eta)

    p = sub.add_parser("sweep-fso", help="rate totals per wavelength from a link table (CSV)")
    p.add_argument("--link-table", dest="link_table", help="CSV wavelength_nm,eta,nbar_b")
    p.add_argument("--t-seconds", dest="t_seconds", type=float)
    p.add_argument("--w-hz", dest="w_hz", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--vartheta", type=float)
    p.add_argument("--preset", help="fig6|fig6w10")
    _add_common(p)
    p.set_defaults(func=_cmd_sweep_fso)

    p = sub.add_parser("plan", help="one covert ebit operating point as key=value lines")
    p.add_argument("--eta", type=float)
    p.add_argument("--nbar-b", dest="nbar_b", type=float)
    p.add_argument("--n", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--vartheta", type=float)
    _add_common(p, seeded=False)
    p.set_defaults(func=_cmd_plan)

    p = sub.add_parser("verify", help="run the oracle suites; nonzero exit on failure")
    p.add_argument("--suite", choices=["all", "fock", "twirl", "willie", "chi2", "combined", "sparse"])
    p.add_argument("--config", help="optional key=value config file (flags take precedence)")
    p.add_argument("--seed", type=int, help="seed for the counter-based generator")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("sample-secret", help="draw a windowed transmission secret")
    p.add_argument("--n", type=float, help="blocklength")
    p.add_argument("--q", type=float, help="transmit probability (or derive via --eta/--nbar-b/--delta)")
    p.add_argument("--eta", type=float)
    p.add_argument("--nbar-b", dest="nbar_b", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--vartheta", type=float)
    _add_common(p)
    p.set_defaults(func=_cmd_sample_secret)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliError, BoundaryError, ValueError, OSError) as exc:
        sys.stderr.write(f"covertlab: error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
