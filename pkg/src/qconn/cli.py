"""``qconn`` command line: run a verification and write a JSON or CSV report.

Reports have the frozen top-level layout::

    {"schema_version": 1, "subcommand": ..., "inputs": {...}, "results": [...], "pass": bool}

Each entry of ``results`` is a flat record; CSV output is that table.  Keys are
sorted and non-finite floats are written as the strings ``"nan"``, ``"inf"`` and
``"-inf"`` so that identical inputs give byte-identical JSON.

Exit status: 0 when every check passes, 2 for usage errors, 3 for numeric
failures (a check outside tolerance, or a solver breakdown).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from . import frames
from .errors import DomainError, QconnError
from .grid import GridSpec, gaussian_packet, max_abs
from .suites import POTENTIALS, curvature_suite
from .symbolic import identities as ids

SCHEMA_VERSION = 1
EXIT_PASS, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3


class UsageError(Exception):
    pass


# -- configuration -----------------------------------------------------------


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(",") if v.strip())


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.split(",") if v.strip())


def _words(text: str) -> tuple[str, ...]:
    return tuple(v.strip() for v in text.split(",") if v.strip())


def _flag(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


CURVATURE_KEYS = {
    "potential": (str, "linear"), "m": (float, 1.0), "g": (float, 2.0), "k": (float, 1.0),
    "lam": (float, 0.1), "length": (float, 20.0), "ns": (_ints, (64, 128, 256)),
    "center": (float, 1.0), "width": (float, 1.0), "holonomy_n": (int, 128),
    "deltas": (_floats, (0.1, 0.05, 0.025)), "spatial_order_min": (float, 1.8),
    "defect_order_min": (float, 2.5), "phase_rtol": (float, 0.05),
    "phase_delta": (float, 0.05), "zero_tol": (float, 1e-10),
}

FRAME_KEYS = {
    "frame": (str, "boost"), "m": (float, 1.0), "v": (float, 1.0), "g": (float, 1.0),
    "w": (float, 0.1), "n": (int, None), "length": (float, None), "width": (float, 1.0),
    "x0": (float, None), "y0": (float, 0.0), "p0": (float, 0.0), "dt": (float, 1e-3),
    "T": (float, 1.0), "form": (str, None), "refine": (_words, None), "tol": (float, None),
    "order_min": (float, 1.8), "order_target": (float, 2.0), "order_band": (float, 0.3),
}

FRAME_DEFAULTS = {
    "boost": {"n": 512, "length": 40.0, "x0": 0.0, "tol": 1e-3, "refine": ("dt", "richardson", "h")},
    "accel": {"n": 512, "length": 40.0, "x0": 0.0, "tol": 5e-3, "refine": ("dt", "richardson", "h")},
    "rotate": {"n": 64, "length": 16.0, "x0": 2.0, "tol": 1e-2, "refine": ()},
}

PROVE_KEYS = {"identity": (str, "boost"), "order": (int, 0), "exact_energy": (_flag, False)}

RINDLER_KEYS = {
    "m": (float, 1.0), "g": (float, 1.0), "t": (float, 0.1), "x": (float, 0.2), "p": (float, 0.3),
    "cs": (_floats, (1e2, 1e3, 1e4)), "dps": (int, 50), "slope_max": (float, -1.0),
}

KEYS = {
    "curvature": CURVATURE_KEYS,
    "frame-check": FRAME_KEYS,
    "prove": PROVE_KEYS,
    "rindler-scaling": RINDLER_KEYS,
}


def read_config_file(path: str) -> dict[str, str]:
    """Flat ``key = value`` lines; blank lines and ``#`` comments are ignored."""
    out: dict[str, str] = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from exc
    for num, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{num}: expected key=value, got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key] = value
    return out


def parse_overrides(items: list[str]) -> dict[str, str]:
    out = {}
    for item in items:
        if "=" not in item:
            raise UsageError(f"expected key=value, got {item!r}")
        key, value = item.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def resolve(subcommand: str, raw: dict[str, str]) -> dict[str, Any]:
    spec = KEYS[subcommand]
    unknown = sorted(set(raw) - set(spec))
    if unknown:
        raise UsageError(f"unknown key(s) for {subcommand}: {', '.join(unknown)}; "
                         f"known: {', '.join(sorted(spec))}")
    values = {}
    for key, (conv, default) in spec.items():
        if key in raw:
            try:
                values[key] = conv(raw[key])
            except ValueError as exc:
                raise UsageError(f"bad value for {key}: {raw[key]!r} ({exc})") from exc
        else:
            values[key] = default
    for key, val in values.items():
        if isinstance(val, float) and not math.isfinite(val):
            raise UsageError(f"{key} must be finite")
    return values


@dataclass(frozen=True)
class Report:
    subcommand: str
    inputs: dict
    results: list
    passed: bool
    duration: float = 0.0

    def as_dict(self) -> dict:
        return {"schema_version": SCHEMA_VERSION, "subcommand": self.subcommand,
                "inputs": _clean(self.inputs), "results": _clean(self.results), "pass": self.passed}


def _clean(value):
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, (np.floating, float)):
        v = float(value)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def render_json(report: Report) -> str:
    return json.dumps(report.as_dict(), sort_keys=True, indent=2) + "\n"


def render_csv(report: Report) -> str:
    rows = _clean(report.results)
    columns = sorted({k for row in rows for k in row})
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: row.get(k, "") for k in columns})
    return buf.getvalue()


# -- subcommands -------------------------------------------------------------


def cmd_curvature(cfg: dict) -> Report:
    if cfg["potential"] not in POTENTIALS:
        raise UsageError(f"unknown potential {cfg['potential']!r}; choose one of {', '.join(POTENTIALS)}")
    suite = curvature_suite(cfg["potential"], cfg["m"], cfg["g"], cfg["k"], cfg["lam"], cfg["length"],
                            cfg["ns"], cfg["center"], cfg["width"], cfg["holonomy_n"], cfg["deltas"])
    results = []
    for r in suite.curvature:
        results.append({"kind": "curvature", "n": r.n, "h": r.h, "error": r.error, "order": r.order,
                        "F_tx_mean": r.mean_field_strength, "F_tx_expected": r.expected_field_strength})
    for r in suite.holonomy:
        rel = abs(r.phase - r.predicted_phase) / abs(r.predicted_phase) if r.predicted_phase else 0.0
        results.append({"kind": "holonomy", "delta": r.delta, "defect": r.defect, "order": r.order,
                        "phase": r.phase, "predicted_phase": r.predicted_phase, "phase_rel_error": rel})
    if cfg["potential"] == "free":
        ok = all(r.error < cfg["zero_tol"] for r in suite.curvature) and \
            all(r.defect < cfg["zero_tol"] and abs(r.phase) < cfg["zero_tol"] for r in suite.holonomy)
    else:
        orders = [r.order for r in suite.curvature[1:]]
        defect_orders = [r.order for r in suite.holonomy[1:]]
        # the phase error is first order in the loop size, so it is judged at one size
        loops = [row for row in results if row["kind"] == "holonomy"]
        probe = min(loops, key=lambda row: abs(row["delta"] - cfg["phase_delta"]))
        ok = bool(orders) and min(orders) >= cfg["spatial_order_min"] and \
            bool(defect_orders) and min(defect_orders) >= cfg["defect_order_min"] and \
            probe["phase_rel_error"] <= cfg["phase_rtol"]
    return Report("curvature", cfg, results, bool(ok))


def _transform(cfg: dict) -> frames.FrameTransform:
    kind = cfg["frame"]
    if kind == "boost":
        return frames.galilean_boost(cfg["m"], cfg["v"])
    if kind == "accel":
        return frames.uniform_acceleration(cfg["m"], cfg["g"])
    if kind == "rotate":
        return frames.uniform_rotation(cfg["m"], cfg["w"])
    raise UsageError(f"unknown frame {kind!r}; choose boost, accel or rotate")


def cmd_frame_check(cfg: dict, workers: int | None = None) -> Report:
    transform = _transform(cfg)
    cfg = dict(cfg)
    for key, val in FRAME_DEFAULTS[cfg["frame"]].items():
        if cfg[key] is None:
            cfg[key] = val
    if not cfg["dt"] > 0:
        raise UsageError("dt must be positive")
    bad = set(cfg["refine"]) - {"dt", "h", "richardson"}
    if bad:
        raise UsageError(f"unknown refinement(s): {', '.join(sorted(bad))}")
    dim = transform.dimension
    grid = GridSpec(cfg["length"], cfg["n"], dimension=dim)
    center = (cfg["x0"],) if dim == 1 else (cfg["x0"], cfg["y0"])
    psi = gaussian_packet(grid, center if dim > 1 else center[0], cfg["p0"], cfg["width"])
    rep = frames.verify_covariance(transform, psi, cfg["T"], cfg["dt"], cfg["form"],
                                   refine=cfg["refine"], workers=workers)
    results = [{"kind": "discrepancy", "value": rep.dt, "discrepancy": rep.discrepancy,
                "tolerance": cfg["tol"], "boundary_weight": rep.boundary_weight}]
    ok = rep.discrepancy <= cfg["tol"]
    for row in rep.table:
        results.append({"kind": f"refine_{row.kind}", "value": row.value, "discrepancy": row.discrepancy,
                        "reduction": row.reduction, "order": row.order})
        if row.kind == "h" and not math.isnan(row.order):
            ok = ok and row.order >= cfg["order_min"]
    if rep.temporal_order is not None:
        results.append({"kind": "richardson_dt", "order": rep.temporal_order})
        ok = ok and abs(rep.temporal_order - cfg["order_target"]) <= cfg["order_band"]
    if cfg["frame"] == "rotate":
        hams = frames.rotation_hamiltonians(grid, cfg["m"], cfg["w"])
        gap = max_abs((hams["angular"] - hams["coriolis"]).matrix)
        results.append({"kind": "hamiltonian_forms", "difference": gap, "tolerance": 1e-10})
        ok = ok and gap <= 1e-10
    inputs = dict(cfg, refine=list(cfg["refine"]))
    return Report("frame-check", inputs, results, bool(ok))


PROOFS: dict[str, Callable[[dict], list[dict]]] = {}


def _proof(name):
    def register(fn):
        PROOFS[name] = fn
        return fn
    return register


@_proof("boost")
def _prove_boost(cfg):
    return [{"identity": "boost", "residual": str(ids.verify_boost_identity(1))}]


@_proof("boost-3d")
def _prove_boost3(cfg):
    return [{"identity": "boost-3d", "residual": str(ids.verify_boost_identity(3))}]


@_proof("accel")
def _prove_accel(cfg):
    return [{"identity": "accel", "residual": str(ids.verify_acceleration_identity())}]


@_proof("accel-compose")
def _prove_compose(cfg):
    return [
        {"identity": "accel-compose", "residual": str(ids.verify_acceleration_composition())},
        {"identity": "accel-compose-potential", "residual": str(ids.verify_composition_potential())},
    ]


@_proof("rotation")
def _prove_rotation(cfg):
    return [{"identity": "rotation", "residual": str(ids.verify_rotation_identity())}]


@_proof("rindler")
def _prove_rindler(cfg):
    exp = ids.rindler_expand(cfg["order"], exact_energy=cfg["exact_energy"])
    return [{"identity": "rindler", "order": cfg["order"], "computed": str(exp.computed),
             "target": str(exp.target), "residual": str(exp.residual)}]


def cmd_prove(cfg: dict) -> Report:
    name = cfg["identity"]
    names = sorted(PROOFS) if name == "all" else [name]
    if any(n not in PROOFS for n in names):
        raise UsageError(f"unknown identity {name!r}; choose one of all, {', '.join(sorted(PROOFS))}")
    results = [row for n in names for row in PROOFS[n](cfg)]
    return Report("prove", cfg, results, all(r["residual"] == "0" for r in results))


def cmd_rindler_scaling(cfg: dict) -> Report:
    try:
        rep = frames.rindler_limit_scaling(cfg["m"], cfg["g"], cfg["t"], cfg["x"], cfg["p"],
                                           cfg["cs"], cfg["dps"])
    except DomainError as exc:
        raise UsageError(str(exc)) from exc
    results = [{"c": c, "residual": r} for c, r in zip(rep.cs, rep.residuals)]
    results.append({"slope": rep.slope, "monotone": rep.monotone, "slope_max": cfg["slope_max"]})
    zero = all(r == 0 for r in rep.residuals)
    ok = rep.monotone and (zero or rep.slope <= cfg["slope_max"])
    return Report("rindler-scaling", dict(cfg, cs=list(cfg["cs"])), results, bool(ok))


# -- entry point ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qconn", description="Verify quantum-connection identities and covariance.")
    parser.add_argument("subcommand", choices=sorted(KEYS))
    parser.add_argument("--config", metavar="FILE", help="flat key=value file; command-line pairs win")
    parser.add_argument("--out", metavar="FILE", help="write the report here instead of stdout")
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument("--seed", type=int, default=0, help="recorded in the report inputs")
    parser.add_argument("pairs", nargs="*", metavar="key=value")
    return parser


def _threads() -> int | None:
    env = os.environ.get("QCONN_THREADS")
    if env is None:
        return None
    try:
        n = int(env)
    except ValueError as exc:
        raise UsageError(f"QCONN_THREADS must be an integer, got {env!r}") from exc
    if n < 1:
        raise UsageError("QCONN_THREADS must be at least 1")
    return n


def run(argv: list[str] | None = None) -> tuple[int, Report | None]:
    parser = build_parser()
    try:
        args = parser.parse_intermixed_args(argv)
    except SystemExit as exc:
        return (EXIT_PASS if exc.code == 0 else EXIT_USAGE), None
    start = time.perf_counter()
    try:
        raw = read_config_file(args.config) if args.config else {}
        raw.update(parse_overrides(args.pairs))
        cfg = resolve(args.subcommand, raw)
        workers = _threads()
        if args.subcommand == "curvature":
            report = cmd_curvature(cfg)
        elif args.subcommand == "frame-check":
            report = cmd_frame_check(cfg, workers)
        elif args.subcommand == "prove":
            report = cmd_prove(cfg)
        else:
            report = cmd_rindler_scaling(cfg)
    except UsageError as exc:
        print(f"qconn: error: {exc}", file=sys.stderr)
        return EXIT_USAGE, None
    except (DomainError, ValueError) as exc:
        print(f"qconn: error: {exc}", file=sys.stderr)
        return EXIT_USAGE, None
    except QconnError as exc:
        print(f"qconn: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC, None

    report = Report(report.subcommand, dict(report.inputs, seed=args.seed), report.results,
                    report.passed, time.perf_counter() - start)
    text = render_json(report) if args.format == "json" else render_csv(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(f"qconn {report.subcommand}: {'pass' if report.passed else 'FAIL'} "
          f"({report.duration:.2f} s)", file=sys.stderr)
    return (EXIT_PASS if report.passed else EXIT_NUMERIC), report


def main(argv: list[str] | None = None) -> int:
    return run(argv)[0]


if __name__ == "__main__":
    sys.exit(main())
