"""Command-line scenario runner.

Usage::

    aahbath run scenario.cfg [--override key=value ...]

A scenario file is flat ``key=value`` text; ``#`` starts a comment. Each
run writes a ``manifest`` (every parameter plus ``meta.*`` bookkeeping), a
task-specific CSV and ``summary.txt`` into ``out_dir``. Re-running from a
manifest reproduces the run, since ``meta.*`` keys are ignored on input.

Exit codes: 0 success, 2 invalid configuration, 3 numerical failure.
"""
import argparse
import csv
import io
import math
import os
import re
import shutil
import sys
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from . import __version__, _accel
from .bath import BathSpec, memory_kernel, self_energy
from .dynamics import TimeGrid, estimate_period, evolve, fidelity_series, single_site_state, \
    survival_probability, trajectory_ipr
from .errors import AahBathError, DomainError, NumericalError
from .lattice import GOLDEN, Boundary, LatticeSpec, build_lattice, classify_edge_modes, eigensystem, \
    find_gaps, inverse_participation_ratio
from .oracle import commensurate_levels_q3, discretize_bath, exact_cross_check, kernel_by_quadrature, \
    periodic_q3_roots
from .spectral import Kind, SearchOptions, bound_state_weight, find_bound_states, weight_estimators

SCHEMA_VERSION = "1"
EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3
TASKS = ("spectrum", "bound", "bic", "evolve", "sweep", "oracle", "kernelcheck")

DEFAULTS = {
    "n_sites": "99", "delta": "2", "beta": "1/3", "phi": "0", "boundary": "open",
    "eta": "0.1", "s": "1", "omega_c": "10",
    "task": "bound", "out_dir": "out",
    "n0": "", "mode_index": "", "sites": "",
    "t_max": "200", "dt": "0.005", "stride": "10", "order": "4",
    "period_from": "50", "period_to": "", "period_smooth": "2",
    "axis": "phi", "from": "-pi", "to": "pi", "points": "51",
    "include_positive": "false", "min_gap_width": "0.05", "grid_points": "2000",
    "ipr_threshold": "0.1", "edge_window": "10",
    "M": "2000", "omega_max": "", "L": "",
    "kernel_points": "21",
}


class ConfigError(AahBathError, ValueError):
    pass


# --------------------------------------------------------------------------
# parsing

_PI_TERM = re.compile(r"^([+-]?)(\d*\.?\d*(?:[eE][+-]?\d+)?)\s*\*?\s*pi(?:\s*/\s*(\d+(?:\.\d*)?))?$")


def parse_real(text: str, key: str = "value") -> float:
    """Float, a fraction ``p/q``, or a multiple of pi (``-pi``, ``0.66pi``, ``pi/2``)."""
    t = text.strip().lower()
    if key == "beta" and t == "golden":
        return GOLDEN
    m = _PI_TERM.match(t.replace(" ", ""))
    if m:
        sign, coef, den = m.groups()
        c = float(coef) if coef not in ("", ".") else 1.0
        v = c * math.pi / (float(den) if den else 1.0)
        return -v if sign == "-" else v
    if "/" in t:
        num, _, den = t.partition("/")
        try:
            return float(num) / float(den)
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"{key}: cannot parse {text!r}") from exc
    try:
        v = float(t)
    except ValueError as exc:
        raise ConfigError(f"{key}: cannot parse {text!r}") from exc
    if not math.isfinite(v):
        raise ConfigError(f"{key}: must be finite")
    return v


def parse_int(text: str, key: str) -> int:
    try:
        v = float(text)
    except ValueError as exc:
        raise ConfigError(f"{key}: expected an integer, got {text!r}") from exc
    if v != int(v):
        raise ConfigError(f"{key}: expected an integer, got {text!r}")
    return int(v)


def parse_bool(text: str, key: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {text!r}")


def read_config_text(text: str) -> Dict[str, str]:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value")
        k, v = (s.strip() for s in line.split("=", 1))
        if k.startswith("meta."):
            continue
        out[k] = v
    return out


def apply_overrides(raw: Dict[str, str], overrides) -> Dict[str, str]:
    raw = dict(raw)
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError(f"override {item!r}: expected key=value")
        k, v = (s.strip() for s in item.split("=", 1))
        raw[k] = v
    return raw


@dataclass
class Scenario:
    lattice: LatticeSpec
    bath: BathSpec
    task: str
    raw: Dict[str, str]
    out_dir: str
    params: Dict[str, object] = field(default_factory=dict)


def build_scenario(raw: Dict[str, str]) -> Scenario:
    unknown = sorted(set(raw) - set(DEFAULTS))
    if unknown:
        raise ConfigError(f"unknown keys: {', '.join(unknown)}")
    cfg = {**DEFAULTS, **raw}
    task = cfg["task"].strip()
    if task not in TASKS:
        raise ConfigError(f"task must be one of {', '.join(TASKS)}")
    try:
        lat = LatticeSpec(parse_int(cfg["n_sites"], "n_sites"), parse_real(cfg["delta"], "delta"),
                          parse_real(cfg["beta"], "beta"), parse_real(cfg["phi"], "phi"),
                          Boundary(cfg["boundary"].strip()))
        bath = BathSpec(parse_real(cfg["eta"], "eta"), parse_real(cfg["s"], "s"),
                        parse_real(cfg["omega_c"], "omega_c"))
    except ValueError as exc:  # DomainError and enum failures
        raise ConfigError(str(exc)) from exc

    p = {}
    p["n0"] = parse_int(cfg["n0"], "n0") if cfg["n0"] else None
    p["mode_index"] = parse_int(cfg["mode_index"], "mode_index") if cfg["mode_index"] else None
    if p["n0"] is not None and p["mode_index"] is not None:
        raise ConfigError("give either n0 or mode_index, not both")
    if p["n0"] is not None and not 1 <= p["n0"] <= lat.n_sites:
        raise ConfigError("n0 outside 1..n_sites")
    if p["mode_index"] is not None and not 1 <= p["mode_index"] <= lat.n_sites:
        raise ConfigError("mode_index outside 1..n_sites")
    p["sites"] = [parse_int(x, "sites") for x in cfg["sites"].split(",") if x.strip()]
    if any(not 1 <= x <= lat.n_sites for x in p["sites"]):
        raise ConfigError("sites outside 1..n_sites")
    for k in ("t_max", "dt", "period_from", "period_smooth", "from", "to", "min_gap_width",
              "ipr_threshold"):
        p[k] = parse_real(cfg[k], k)
    p["period_to"] = parse_real(cfg["period_to"], "period_to") if cfg["period_to"] else p["t_max"]
    p["omega_max"] = parse_real(cfg["omega_max"], "omega_max") if cfg["omega_max"] else None
    for k in ("stride", "points", "grid_points", "edge_window", "M", "kernel_points", "order"):
        p[k] = parse_int(cfg[k], k)
    p["L"] = parse_int(cfg["L"], "L") if cfg["L"] else None
    p["include_positive"] = parse_bool(cfg["include_positive"], "include_positive") or task == "bic"
    p["axis"] = cfg["axis"].strip()

    if p["dt"] <= 0 or p["t_max"] <= 0:
        raise ConfigError("dt and t_max must be positive")
    if p["stride"] < 1 or p["min_gap_width"] <= 0 or p["grid_points"] < 2:
        raise ConfigError("stride >= 1, min_gap_width > 0 and grid_points >= 2 required")
    if p["order"] not in (3, 4):
        raise ConfigError("order must be 3 or 4")
    if task == "sweep":
        if p["axis"] not in ("phi", "delta"):
            raise ConfigError("axis must be phi or delta")
        if p["points"] < 2:
            raise ConfigError("points must be >= 2")
    if task == "evolve" and p["n0"] is None and p["mode_index"] is None:
        raise ConfigError("evolve needs n0 or mode_index")
    if task == "evolve" and bath.eta > 0 and p["dt"] * bath.omega_c > 0.2:
        raise ConfigError("dt * omega_c must be <= 0.2")
    if task == "oracle" and (p["M"] < 10 or lat.n_sites + p["M"] > 5000):
        raise ConfigError("oracle needs M >= 10 and n_sites + M <= 5000")
    if task == "kernelcheck" and p["kernel_points"] < 1:
        raise ConfigError("kernel_points must be >= 1")
    return Scenario(lat, bath, task, {**DEFAULTS, **raw}, cfg["out_dir"], p)


# --------------------------------------------------------------------------
# output helpers

def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return "%.17g" % v
    return str(v)


def write_csv(path: str, header: List[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(x) for x in r])


def _search(sc: Scenario) -> SearchOptions:
    return SearchOptions(min_gap_width=sc.params["min_gap_width"], grid_points=sc.params["grid_points"],
                         include_positive=sc.params["include_positive"])


def _initial_state(sc: Scenario, es):
    p = sc.params
    if p["n0"] is not None:
        return single_site_state(sc.lattice.n_sites, p["n0"]), f"site {p['n0']}"
    if p["mode_index"] is not None:
        return np.array(es.modes[p["mode_index"] - 1], dtype=complex), f"eigenmode {p['mode_index']}"
    return None, ""


# --------------------------------------------------------------------------
# tasks: each returns summary lines and writes CSVs into ``out``

def task_spectrum(sc: Scenario, out: str) -> List[str]:
    es = eigensystem(build_lattice(sc.lattice))
    tags = {m.index: m.end for m in classify_edge_modes(
        es, find_gaps(es, sc.params["min_gap_width"]), sc.params["ipr_threshold"], sc.params["edge_window"])}
    rows = [(i + 1, es.energies[i], inverse_participation_ratio(es.modes[i]), es.weights[i], tags.get(i, ""))
            for i in range(es.n_sites)]
    write_csv(os.path.join(out, "spectrum.csv"), ["index", "energy", "ipr", "w", "edge_tag"], rows)
    gaps = [g for g in find_gaps(es, sc.params["min_gap_width"]) if np.isfinite(g[0]) and np.isfinite(g[1])]
    return [f"levels: {es.n_sites}", f"interior gaps (width >= {sc.params['min_gap_width']}): {len(gaps)}",
            f"edge modes: {len(tags)}"]


BOUND_HEADER = ["kind", "energy", "ipr", "d", "sum_alpha", "loc_site", "gap_lo", "gap_hi", "d_fraction"]


def _bound_rows(states):
    return [(b.kind.value, b.energy, b.ipr, b.emission, b.sum_alpha, b.loc_site, b.gap[0], b.gap[1],
             b.emission_fraction) for b in states]


def task_bound(sc: Scenario, out: str) -> List[str]:
    es = eigensystem(build_lattice(sc.lattice))
    states = find_bound_states(es, sc.bath, _search(sc))
    write_csv(os.path.join(out, "bound_states.csv"), BOUND_HEADER, _bound_rows(states))
    lines = [f"bound states: {len(states)}"]
    lines += [f"  {b.kind.value:10s} E={b.energy:.10g} ipr={b.ipr:.4g} d={b.emission:.4g} "
              f"loc_site={b.loc_site}" for b in states]
    lines += [f"warning: root in ({a:.8g}, {c:.8g}): {msg}" for a, c, msg in states.warnings]

    init, label = _initial_state(sc, es)
    if sc.task == "bic" and init is not None:
        rows = []
        for b in states:
            if b.kind is Kind.BIC:
                res, proj = weight_estimators(b, init, es, sc.bath)
                rows.append((b.energy, res, proj, abs(res - proj)))
        write_csv(os.path.join(out, "bic_weights.csv"),
                  ["energy", "weight_residue", "weight_projection", "abs_diff"], rows)
        if rows:
            best = max(rows, key=lambda r: abs(r[1]))
            lines.append(f"dominant bic weight for {label}: E={best[0]:.10g} weight={best[1]:.6g}")
    return lines


def task_evolve(sc: Scenario, out: str) -> List[str]:
    p = sc.params
    es = eigensystem(build_lattice(sc.lattice))
    init, label = _initial_state(sc, es)
    grid = TimeGrid(p["t_max"], p["dt"])
    tr = evolve(init, sc.lattice, sc.bath, grid, stride=p["stride"], es=es, order=p["order"])
    sites = p["sites"] or sorted({p["n0"] or 1, 1, sc.lattice.n_sites})
    surv_site = p["n0"] if p["n0"] is not None else sites[0]
    cols = [survival_probability(tr, s) for s in sites]
    surv = survival_probability(tr, surv_site)
    ipr = trajectory_ipr(tr)
    fid = fidelity_series(tr, init / np.linalg.norm(init))
    header = ["t"] + [f"p{s}" for s in sites] + ["survival", "ipr", "norm", "fidelity"]
    rows = zip(tr.times, *cols, surv, ipr, tr.norms, fid)
    write_csv(os.path.join(out, "trajectory.csv"), header, rows)

    lines = [f"initial: {label}", f"steps: {grid.n_steps} dt={grid.dt:g} stored every {p['stride']}",
             f"final norm: {tr.norms[-1]:.10g}"]
    m = (tr.times >= p["period_from"]) & (tr.times <= p["period_to"])
    if m.any():
        lines.append(f"mean survival on [{p['period_from']:g}, {p['period_to']:g}]: {surv[m].mean():.6g}")
        lines.append(f"mean fidelity on [{p['period_from']:g}, {p['period_to']:g}]: {fid[m].mean():.6g}")
    try:
        T = estimate_period(surv, tr.times, (p["period_from"], p["period_to"]), smooth=p["period_smooth"])
        lines.append(f"survival period: {T:.6g} (frequency {2 * np.pi / T:.6g})")
    except (NumericalError, DomainError) as exc:
        lines.append(f"survival period: n/a ({exc})")
    return lines


def _sweep_point(args):
    """Rows for one sweep point; failures become a status row."""
    raw, axis, value = args
    raw = {**raw, axis: repr(float(value)), "task": "bound"}
    try:
        sc = build_scenario(raw)
        es = eigensystem(build_lattice(sc.lattice))
        tags = {m.index: m for m in classify_edge_modes(
            es, find_gaps(es, sc.params["min_gap_width"]), sc.params["ipr_threshold"], sc.params["edge_window"])}
        rows = []
        for i in range(es.n_sites):
            tag = tags.get(i)
            rows.append((value, "lattice", es.energies[i], inverse_participation_ratio(es.modes[i]),
                         float("nan"), tag.site(es.n_sites) if tag else 0, tag.end if tag else "", "ok"))
        states = find_bound_states(es, sc.bath, _search(sc))
        for b in states:
            rows.append((value, b.kind.value, b.energy, b.ipr, b.emission, b.loc_site, "", "ok"))
        status = "ok" if not states.warnings else f"warnings={len(states.warnings)}"
        if status != "ok":
            rows.append((value, "status", float("nan"), float("nan"), float("nan"), 0, "", status))
        return rows
    except (AahBathError, ValueError, ArithmeticError) as exc:
        msg = f"error: {type(exc).__name__}: {exc}".replace(",", ";").replace("\n", " ")
        return [(value, "status", float("nan"), float("nan"), float("nan"), 0, "", msg)]


_SOURCE_ORDER = {"lattice": 0, "dbs_ground": 1, "dbs_gap": 2, "bic": 3, "dark": 4, "status": 5}


def sweep_values(sc: Scenario) -> np.ndarray:
    p = sc.params
    lo, hi, P = p["from"], p["to"], p["points"]
    # a full phase period has coinciding ends; sample it half-open
    periodic = p["axis"] == "phi" and np.isclose(abs(hi - lo), 2 * np.pi, rtol=0, atol=1e-12)
    return np.linspace(lo, hi, P, endpoint=not periodic)


def worker_count() -> int:
    env = os.environ.get("AAHBATH_THREADS", "").strip()
    if env:
        try:
            n = int(env)
        except ValueError as exc:
            raise ConfigError("AAHBATH_THREADS must be a positive integer") from exc
        if n < 1:
            raise ConfigError("AAHBATH_THREADS must be a positive integer")
        return n
    return os.cpu_count() or 1


def task_sweep(sc: Scenario, out: str) -> List[str]:
    axis = sc.params["axis"]
    values = sweep_values(sc)
    raw = {k: v for k, v in sc.raw.items() if k in DEFAULTS}
    jobs = [(raw, axis, v) for v in values]
    n = min(worker_count(), len(jobs))
    if n > 1:
        with ProcessPoolExecutor(max_workers=n) as ex:
            results = list(ex.map(_sweep_point, jobs))
    else:
        results = [_sweep_point(j) for j in jobs]
    rows = [r for chunk in results for r in chunk]
    rows.sort(key=lambda r: (r[0], _SOURCE_ORDER.get(r[1], 9), r[2] if not math.isnan(r[2]) else math.inf))
    write_csv(os.path.join(out, "sweep_levels.csv"),
              [axis, "source", "energy", "ipr", "d", "loc_site", "edge_tag", "status"], rows)
    failed = sum(1 for r in rows if r[1] == "status")
    return [f"sweep over {axis}: {len(values)} points, workers={n}", f"rows: {len(rows)}",
            f"points with problems: {failed}"]


def task_oracle(sc: Scenario, out: str) -> List[str]:
    p = sc.params
    db = discretize_bath(sc.bath, p["M"], p["omega_max"])
    es = eigensystem(build_lattice(sc.lattice))
    init, label = _initial_state(sc, es)
    grid = TimeGrid(p["t_max"], p["dt"]) if init is not None else None
    rep = exact_cross_check(sc.lattice, db, sc.bath, initial=init, grid=grid, stride=p["stride"],
                            search=_search(sc))
    write_csv(os.path.join(out, "oracle_levels.csv"), ["secular_energy", "exact_energy", "abs_diff"],
              rep.matches)
    lines = [f"discretized bath: M={db.size} omega_max={db.frequencies[-1] + 0.5 * (db.frequencies[1] - db.frequencies[0]):g}",
             f"isolated exact levels: {len(rep.isolated)}", f"max level deviation: {rep.max_level_error:.3g}"]
    if rep.dark_shifts:
        lines.append(f"max dark-level shift: {max(s for _, s in rep.dark_shifts):.3g}")
    if rep.max_deviation is not None:
        dev = np.max(np.abs(rep.exact_amps - rep.trajectory.amps), axis=1)
        write_csv(os.path.join(out, "oracle_trajectory.csv"), ["t", "max_abs_dev"], zip(rep.times, dev))
        lines.append(f"trajectory ({label}) max deviation: {rep.max_deviation:.3g}")
    if p["L"] is not None:
        lv = commensurate_levels_q3(p["L"], sc.lattice.delta, sc.lattice.phi, sc.bath)
        gen = periodic_q3_roots(p["L"], sc.lattice.delta, sc.lattice.phi, sc.bath)
        rows = []
        for name in ("E0", "E1", "E2"):
            v = getattr(lv, name)
            near = gen[np.argmin(np.abs(gen - v))] if len(gen) and np.isfinite(v) else float("nan")
            rows.append((name, v, near, abs(v - near)))
        write_csv(os.path.join(out, "q3_levels.csv"), ["branch", "closed_form", "general_solver", "abs_diff"], rows)
        lines.append("q3 levels: " + ", ".join(f"{r[0]}={r[1]:.10g}" for r in rows))
    return lines


def task_kernelcheck(sc: Scenario, out: str) -> List[str]:
    p = sc.params
    ts = np.linspace(0.0, p["t_max"], p["kernel_points"])
    rows = []
    for t in ts:
        a = memory_kernel(t, sc.bath)
        b = kernel_by_quadrature(t, sc.bath)
        rows.append((t, a.real, a.imag, b.real, b.imag, abs(a - b)))
    write_csv(os.path.join(out, "kernel_check.csv"),
              ["t", "closed_re", "closed_im", "quad_re", "quad_im", "abs_diff"], rows)
    es_rows = []
    for E in (-50.0, -10.0, -5.0, -1.0, -0.1, 0.1, 1.0, 2.5, 5.0, 20.0):
        q = self_energy(E, sc.bath, "quad")
        auto = self_energy(E, sc.bath)
        es_rows.append((E, auto, q, abs(auto - q)))
    write_csv(os.path.join(out, "selfenergy_check.csv"), ["E", "auto", "quad", "abs_diff"], es_rows)
    return [f"max kernel deviation: {max(r[-1] for r in rows):.3g}",
            f"max self-energy deviation: {max(r[-1] for r in es_rows):.3g}"]


TASK_FUNCS = {"spectrum": task_spectrum, "bound": task_bound, "bic": task_bound, "evolve": task_evolve,
              "sweep": task_sweep, "oracle": task_oracle, "kernelcheck": task_kernelcheck}


def manifest_text(sc: Scenario, timings: Dict[str, float], files: List[str]) -> str:
    buf = io.StringIO()
    for k in sorted(DEFAULTS):
        buf.write(f"{k}={sc.raw.get(k, DEFAULTS[k])}\n")
    meta = {
        "meta.version": __version__, "meta.schema": SCHEMA_VERSION, "meta.backend": _accel.backend_name(),
        "meta.resolved.beta": fmt(sc.lattice.beta), "meta.resolved.phi": fmt(sc.lattice.phi),
        "meta.files": ",".join(files),
    }
    meta.update({f"meta.time.{k}": f"{v:.3f}" for k, v in timings.items()})
    for k in sorted(meta):
        buf.write(f"{k}={meta[k]}\n")
    return buf.getvalue()


def run_scenario(path: str, overrides=None, stream=None) -> int:
    """Run the scenario in ``path``; returns the process exit code."""
    stream = stream or sys.stderr
    try:
        with open(path, encoding="utf-8") as fh:
            raw = read_config_text(fh.read())
        sc = build_scenario(apply_overrides(raw, overrides))
    except (OSError, ConfigError, UnicodeDecodeError) as exc:
        print(f"config error: {exc}", file=stream)
        return EXIT_CONFIG

    out_dir = os.path.abspath(sc.out_dir)
    parent = os.path.dirname(out_dir)
    os.makedirs(parent, exist_ok=True)
    staging = tempfile.mkdtemp(prefix=".aahbath-", dir=parent)
    try:
        t0 = time.perf_counter()
        lines = TASK_FUNCS[sc.task](sc, staging)
        timings = {sc.task: time.perf_counter() - t0}
        files = sorted(os.listdir(staging))
        with open(os.path.join(staging, "summary.txt"), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"task: {sc.task}\n" + "".join(l + "\n" for l in lines))
        files = sorted(files + ["summary.txt", "manifest"])
        with open(os.path.join(staging, "manifest"), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(manifest_text(sc, timings, files))
    except (ConfigError, DomainError) as exc:
        shutil.rmtree(staging, ignore_errors=True)
        print(f"config error: {exc}", file=stream)
        return EXIT_CONFIG
    except (NumericalError, FloatingPointError, np.linalg.LinAlgError) as exc:
        shutil.rmtree(staging, ignore_errors=True)
        print(f"numerical failure: {exc}", file=stream)
        return EXIT_NUMERICAL
    except BaseException:
        shutil.rmtree(staging, ignore_errors=True)
        raise

    os.makedirs(out_dir, exist_ok=True)
    for name in files:
        os.replace(os.path.join(staging, name), os.path.join(out_dir, name))
    shutil.rmtree(staging, ignore_errors=True)
    for line in lines:
        print(line, file=stream)
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="aahbath", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a scenario file")
    run.add_argument("config")
    run.add_argument("--override", action="append", default=[], metavar="KEY=VALUE",
                     help="replace a config value (repeatable)")
    args = parser.parse_args(argv)
    return run_scenario(args.config, args.override)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
