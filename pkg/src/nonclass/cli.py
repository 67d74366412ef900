"""Command-line front end.

Subcommands ``depth``, ``distance``, ``rfunc``, ``diag`` and ``sweep``.  State
files use the JSON schema of :func:`nonclass.states.state_from_dict`.  Reports
go to stdout as canonical JSON (sorted keys, 17 significant digits, non-finite
numbers as ``null``).

Exit codes: 0 success, 2 input or domain error, 3 numeric or resource failure.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import json
import math
import multiprocessing
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .depth import SearchBox, default_box, nonclassical_depth
from .diagnostics import diagnostics
from .distance import nonclassicality_distance
from .errors import DomainError, NonclassError, UnsupportedStateError
from .phase_space import GridSpec, REvaluator, r_grid, write_grid_csv
from .states import (
    coherent,
    even_cat,
    make_vac_fock_mixture,
    make_vac_fock_superposition,
    odd_cat,
    squeezed,
    state_from_dict,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3
SWEEP_FAIL_FRACTION = 0.10

# family -> (parameter names, number of required leading parameters, defaults of the rest)
FAMILIES = {
    "vac_fock_mixture": (("n", "xi"), 2, ()),
    "vac_fock_superposition": (("n", "xi", "phi"), 2, (0.0,)),
    "cat_even": (("alpha",), 1, ()),
    "cat_odd": (("alpha",), 1, ()),
    "squeezed": (("r", "theta"), 1, (0.0,)),
}
MIXED_FAMILIES = {"vac_fock_mixture"}
MEASURES = ("depth", "distance", "both")


# --------------------------------------------------------------------------
# canonical JSON
# --------------------------------------------------------------------------


def _encode(obj, indent: int, level: int) -> str:
    pad = "\n" + " " * (indent * (level + 1))
    end = "\n" + " " * (indent * level)
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return "null" if obj is None else ("true" if obj else "false")
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj) + 0.0  # folds -0.0 into 0.0, which reads back as the integer 0
        return format(x, ".17g") if math.isfinite(x) else "null"
    if isinstance(obj, complex):
        return _encode([obj.real, obj.imag], indent, level)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [json.dumps(str(k), ensure_ascii=False) + ": " + _encode(obj[k], indent, level + 1)
                 for k in sorted(obj, key=str)]
        return "{" + pad + ("," + pad).join(items) + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        items = [_encode(v, indent, level + 1) for v in obj]
        return "[" + pad + ("," + pad).join(items) + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def canonical_json(obj, indent: int = 2) -> str:
    """Deterministic JSON text; parsing and re-encoding it gives the same bytes."""
    return _encode(obj, indent, 0)


def _emit(obj) -> None:
    sys.stdout.write(canonical_json(obj) + "\n")


# --------------------------------------------------------------------------
# input helpers
# --------------------------------------------------------------------------


def _read_json(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DomainError(f"{path}: cannot read file ({exc.strerror})") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DomainError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def load_state(path):
    data = _read_json(path)
    # accept either a bare state object or {"state": {...}}
    if isinstance(data, dict) and "type" not in data and "state" in data:
        return state_from_dict(data["state"], "state")
    return state_from_dict(data, "state")


def _window(text: str) -> tuple[float, float, float, float]:
    try:
        parts = [float(p) for p in text.split(":")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"window must be x0:x1:y0:y1, got {text!r}") from None
    if len(parts) != 4:
        raise argparse.ArgumentTypeError(f"window must be x0:x1:y0:y1, got {text!r}")
    return tuple(parts)


def _complex_arg(text: str) -> complex:
    try:
        re_, im = (float(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected re,im, got {text!r}") from None
    return complex(re_, im)


def _box(spec, args) -> SearchBox | None:
    if args.radius is None and args.grid_resolution is None:
        return None
    base = default_box(spec)
    return SearchBox(args.radius if args.radius is not None else base.radius,
                     args.grid_resolution if args.grid_resolution is not None else base.coarse_resolution,
                     base.refine_tolerance, base.seeds)


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------


def cmd_depth(args) -> int:
    spec = load_state(args.state)
    report = nonclassical_depth(spec, tol_tau=args.tol_tau, tol_R=args.tol_R,
                                box=_box(spec, args), use_rules=not args.no_rules)
    if args.trace_csv:
        report.write_trace_csv(args.trace_csv)
    _emit(report.to_dict())
    return EXIT_OK


def cmd_distance(args) -> int:
    spec = load_state(args.state)
    report = nonclassicality_distance(spec, method=args.method, seeds=args.seed or ())
    if args.trace_csv:
        report.write_trace_csv(args.trace_csv)
    _emit(report.to_dict())
    return EXIT_OK


def cmd_rfunc(args) -> int:
    spec = load_state(args.state)
    if not 0.0 < args.tau <= 1.0:
        raise DomainError(f"--tau: must lie in (0, 1], got {args.tau}")
    if args.window is None:
        grid = GridSpec.square(default_box(spec, args.tau).radius, args.res)
    else:
        grid = GridSpec(*args.window, args.res)
    values = r_grid(spec, args.tau, grid, REvaluator(spec))
    write_grid_csv(args.out, grid, values)
    i_min = np.unravel_index(np.argmin(values), values.shape)
    i_max = np.unravel_index(np.argmax(values), values.shape)
    xs, ys = grid.xs, grid.ys
    _emit({
        "tau": args.tau,
        "out": str(args.out),
        "min": values[i_min],
        "argmin": [xs[i_min[1]], ys[i_min[0]]],
        "max": values[i_max],
        "argmax": [xs[i_max[1]], ys[i_max[0]]],
    })
    return EXIT_OK


def cmd_diag(args) -> int:
    _emit(diagnostics(load_state(args.state)).to_dict())
    return EXIT_OK


# --------------------------------------------------------------------------
# sweeps
# --------------------------------------------------------------------------


def family_state(family: str, params: tuple):
    """Build the state of one sweep row; raises DomainError outside the family domain."""
    if family == "vac_fock_mixture":
        n, xi = params
        return make_vac_fock_mixture(xi, n)
    if family == "vac_fock_superposition":
        n, xi, phi = params
        return make_vac_fock_superposition(xi, phi, n)
    if family == "cat_even":
        (alpha,) = params
        return coherent(0.0) if alpha == 0 else even_cat(alpha)
    if family == "cat_odd":
        (alpha,) = params
        return odd_cat(alpha)
    r, theta = params
    return squeezed(0.0, r, theta)


def parse_sweep(data) -> dict:
    """Validate a sweep description and expand it into rows of full parameter tuples."""
    if not isinstance(data, dict):
        raise DomainError("sweep: expected a JSON object")
    family = data.get("family")
    if family not in FAMILIES:
        raise DomainError(f"sweep.family: must be one of {sorted(FAMILIES)}, got {family!r}")
    names, n_req, defaults = FAMILIES[family]
    measure = data.get("measure", "depth")
    if measure not in MEASURES:
        raise DomainError(f"sweep.measure: must be one of {list(MEASURES)}, got {measure!r}")
    if measure != "depth" and family in MIXED_FAMILIES:
        raise UnsupportedStateError(
            f"sweep.measure: the distance degree is defined for pure states only; "
            f"family {family!r} is mixed")

    if "axes" in data:
        axes = data["axes"]
        if not isinstance(axes, dict) or not set(axes) <= set(names) or not set(names[:n_req]) <= set(axes):
            raise DomainError(f"sweep.axes: expected lists for {list(names[:n_req])} "
                              f"(optional {list(names[n_req:])})")
        cols = [axes.get(k, [defaults[i - n_req]] if i >= n_req else None) for i, k in enumerate(names)]
        raw = list(itertools.product(*cols))
    elif "param_grid" in data:
        raw = data["param_grid"]
        if not isinstance(raw, list):
            raise DomainError("sweep.param_grid: expected a list of parameter tuples")
    else:
        raise DomainError("sweep: needs 'param_grid' or 'axes'")
    if not raw:
        raise DomainError("sweep.param_grid: grid is empty")

    rows = []
    for i, row in enumerate(raw):
        where = f"sweep.param_grid[{i}]"
        if isinstance(row, (int, float)):
            row = [row]
        if not isinstance(row, (list, tuple)) or not n_req <= len(row) <= len(names):
            raise DomainError(f"{where}: expected {n_req} to {len(names)} values {list(names)}")
        try:
            full = tuple(float(v) for v in row) + tuple(defaults[len(row) - n_req:])
        except (TypeError, ValueError):
            raise DomainError(f"{where}: values must be numbers") from None
        if "n" in names:
            k = names.index("n")
            if full[k] != int(full[k]):
                raise DomainError(f"{where}.n: must be an integer")
            full = full[:k] + (int(full[k]),) + full[k + 1:]
        try:
            family_state(family, full)
        except DomainError as exc:
            raise DomainError(f"{where}: {exc}") from exc
        rows.append(full)

    return {
        "family": family,
        "names": names,
        "rows": rows,
        "measure": measure,
        "output_path": data.get("output_path"),
        "tol_tau": float(data.get("tol_tau", 1e-3)),
        "tol_R": float(data.get("tol_R", 1e-9)),
    }


def sweep_row(family: str, params: tuple, measure: str, tol_tau: float, tol_R: float):
    """(tau_m, d_m, error) for one row; unrequested measures are None."""
    tau_m = d_m = None
    try:
        spec = family_state(family, params)
        if measure in ("depth", "both"):
            tau_m = nonclassical_depth(spec, tol_tau=tol_tau, tol_R=tol_R).tau_m
        if measure in ("distance", "both"):
            d_m = nonclassicality_distance(spec).d_m
    except (NonclassError, ArithmeticError) as exc:
        return (math.nan if measure != "distance" else None,
                math.nan if measure != "depth" else None, f"{type(exc).__name__}: {exc}")
    return tau_m, d_m, None


def _jobs(requested: int) -> int:
    env = os.environ.get("NONCLASS_JOBS")
    if env:
        try:
            requested = int(env)
        except ValueError:
            raise DomainError(f"NONCLASS_JOBS: expected an integer, got {env!r}") from None
    if requested < 1:
        raise DomainError(f"jobs: must be >= 1, got {requested}")
    return requested


def run_sweep(sweep: dict, jobs: int = 1) -> list:
    """Evaluate every row; results keep grid order whatever the completion order."""
    tasks = [(sweep["family"], p, sweep["measure"], sweep["tol_tau"], sweep["tol_R"])
             for p in sweep["rows"]]
    if jobs == 1 or len(tasks) == 1:
        return [sweep_row(*t) for t in tasks]
    # spawn, not fork: forking a parent that already runs BLAS or JIT threads can kill workers
    with ProcessPoolExecutor(max_workers=jobs, mp_context=multiprocessing.get_context("spawn")) as pool:
        return list(pool.map(sweep_row, *zip(*tasks)))


def _cell(v) -> str:
    if v is None:
        return ""
    return "NaN" if math.isnan(v) else format(v, ".17g")


def write_sweep_csv(path, sweep: dict, results: list) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(sweep["names"]) + ["tau_m", "d_m"])
        for params, (tau_m, d_m, _) in zip(sweep["rows"], results):
            w.writerow([_cell(float(p)) if not isinstance(p, int) else str(p) for p in params]
                       + [_cell(tau_m), _cell(d_m)])


def cmd_sweep(args) -> int:
    sweep = parse_sweep(_read_json(args.spec))
    out = args.out or sweep["output_path"]
    if not out:
        raise DomainError("sweep.output_path: missing (or pass --out)")
    results = run_sweep(sweep, _jobs(args.jobs))
    failed = 0
    for params, (_, _, err) in zip(sweep["rows"], results):
        if err is not None:
            failed += 1
            print(f"warning: row {params} failed: {err}", file=sys.stderr)
    write_sweep_csv(out, sweep, results)
    _emit({"output_path": str(out), "rows": len(results), "failed": failed})
    return EXIT_NUMERIC if failed > SWEEP_FAIL_FRACTION * len(results) else EXIT_OK


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nonclass",
                                 description="Nonclassical depth and distance of single-mode states.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("depth", help="nonclassical depth tau_m")
    p.add_argument("state", help="state JSON file")
    p.add_argument("--tol-tau", dest="tol_tau", type=float, default=1e-3)
    p.add_argument("--tol-R", dest="tol_R", type=float, default=1e-9)
    p.add_argument("--radius", type=float, default=None, help="search box half-width (default: auto)")
    p.add_argument("--grid-resolution", dest="grid_resolution", type=int, default=None,
                   help="coarse grid points per axis (default 161)")
    p.add_argument("--no-rules", action="store_true", help="skip the exact shortcut rules")
    p.add_argument("--trace-csv", dest="trace_csv", default=None)
    p.set_defaults(func=cmd_depth)

    p = sub.add_parser("distance", help="distance-type degree d_m (pure states)")
    p.add_argument("state")
    p.add_argument("--method", choices=("auto", "numeric"), default="auto")
    p.add_argument("--seed", type=_complex_arg, action="append", help="extra ascent seed re,im")
    p.add_argument("--trace-csv", dest="trace_csv", default=None)
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("rfunc", help="R-function on a grid, written as CSV")
    p.add_argument("state")
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--window", type=_window, default=None, help="x0:x1:y0:y1 (default: auto square)")
    p.add_argument("--res", type=int, default=101)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_rfunc)

    p = sub.add_parser("diag", help="Mandel q, impurity and quadrature variances")
    p.add_argument("state")
    p.set_defaults(func=cmd_diag)

    p = sub.add_parser("sweep", help="parameter sweep over a state family, written as CSV")
    p.add_argument("spec", help="sweep JSON file")
    p.add_argument("--jobs", type=int, default=1, help="worker processes (NONCLASS_JOBS overrides)")
    p.add_argument("--out", default=None, help="override output_path")
    p.set_defaults(func=cmd_sweep)
    return ap


def _join_window(argv):
    # "--window -3:3:-3:3" would otherwise be read as an unknown option
    out = []
    it = iter(argv)
    for tok in it:
        if tok == "--window":
            nxt = next(it, None)
            out.append(tok if nxt is None else f"--window={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_join_window(argv))
    try:
        return args.func(args)
    except (DomainError, argparse.ArgumentTypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NonclassError, ArithmeticError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
