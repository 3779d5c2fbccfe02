"""Experiment configuration, spectrum caching, bound-suite execution, and
report generation.

A run is driven by a single JSON config holding a list of experiments; each
experiment names a spectrum source (finite-difference solve or closed-form
oracle), geometric constants, and a suite of bound evaluators.  Reports are
deterministic for a fixed config and seed: timings are kept in memory only.
"""

from __future__ import annotations

import concurrent.futures
import hashlib
import json
import os
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import bounds, oracles
from .bounds import BoundCheck, ConstantsBundle
from .discretize import Grid
from .eigensolve import SolverConfig, Spectrum, refine_and_extrapolate
from .errors import ConvergenceError, DriftLabError
from .model_space import Domain, GeometrySpec, WeightFunction, weighted_mean_of_f

__all__ = [
    "ExperimentConfig",
    "RunReport",
    "cache_key",
    "run_experiment",
    "emit_reports",
    "verify",
    "load_config",
    "EVALUATORS",
]

CACHE_FORMAT = "driftlab-cache-v1"
REPORT_FORMAT = "driftlab-report-v1"

EXIT_OK = 0
EXIT_VIOLATION = 2
EXIT_SOLVER_FAILURE = 3


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def cache_key(domain_spec, weight_spec, grid_spec, solver_spec, route="schrodinger") -> str:
    """Stable content hash over the canonicalized problem spec."""
    payload = {"format": CACHE_FORMAT, "domain": domain_spec, "weight": weight_spec,
               "grid": grid_spec, "solver": solver_spec, "route": route}
    return hashlib.sha256(canonical_json(payload).encode()).hexdigest()


# ---------------------------------------------------------------------------
# Config parsing


def _parse_domain(spec: dict) -> Domain:
    shape = spec["shape"]
    if shape == "interval":
        return Domain.interval(spec["lo"][0], spec["hi"][0])
    if shape == "box":
        return Domain.box(spec["lo"], spec["hi"])
    if shape == "flat_torus":
        return Domain.flat_torus(spec["periods"])
    if shape == "product_with_sphere":
        return Domain.product_with_sphere(_parse_domain(spec["euclidean_part"]),
                                          spec["sphere_dim"], spec["sphere_radius"])
    raise ValueError(f"unknown domain shape {shape!r}")


def _parse_weight(spec: dict, dimension: int) -> WeightFunction:
    kind = spec.get("kind", "constant")
    if kind == "constant":
        return WeightFunction.constant(spec.get("value", 0.0), dimension)
    if kind == "quadratic":
        return WeightFunction.quadratic(spec["coeff"], dimension)
    if kind == "affine_quadratic":
        return WeightFunction.affine_quadratic(spec["coeff"], spec["linear"],
                                               spec.get("offset", 0.0))
    raise ValueError(f"unknown weight kind {kind!r} in config")


def _parse_geometry(spec: Optional[dict], fallback_n: int) -> GeometrySpec:
    spec = spec or {}
    return GeometrySpec(
        n=int(spec.get("n", fallback_n)),
        p=int(spec.get("p", 0)),
        mean_curv_sq_max=float(spec.get("mean_curv_sq_max", 0.0)),
        pos_vec_sq_range=tuple(spec.get("pos_vec_sq_range", (0.0, 0.0))),
        scalar_curv_min=float(spec.get("scalar_curv_min", 0.0)),
        soliton_rho=float(spec.get("soliton_rho", 0.0)),
    )


@dataclass(frozen=True)
class ExperimentConfig:
    id: str
    spectrum_spec: dict
    geometry: GeometrySpec
    suite: Tuple[dict, ...]
    k_max: int

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        k_max = int(raw.get("k_max", 1))
        if k_max < 1:
            raise ValueError(f"experiment {raw.get('id')!r}: k_max must be >= 1")
        suite = []
        for item in raw.get("suite", []):
            item = {"name": item} if isinstance(item, str) else dict(item)
            if item["name"] not in EVALUATORS:
                raise ValueError(f"unknown evaluator {item['name']!r}")
            suite.append(item)
        spec = dict(raw["spectrum"])
        fallback_n = _spectrum_dimension(spec)
        geometry = _parse_geometry(raw.get("geometry"), fallback_n)
        return cls(id=str(raw["id"]), spectrum_spec=spec, geometry=geometry,
                   suite=tuple(suite), k_max=k_max)


def _spectrum_dimension(spec: dict) -> int:
    if spec.get("kind") == "oracle":
        params = spec.get("params", {})
        name = spec["name"]
        if name == "interval":
            return 1
        if name == "box":
            return len(params["lengths"])
        if name == "torus":
            return len(params["periods"])
        if name in ("sphere", "ou"):
            return int(params["dim"])
        return 1
    return len(_parse_domain(spec["domain"]).lo)


def load_config(path) -> List[ExperimentConfig]:
    raw = json.loads(Path(path).read_text())
    experiments = [ExperimentConfig.from_dict(e) for e in raw["experiments"]]
    ids = [e.id for e in experiments]
    if len(set(ids)) != len(ids):
        raise ValueError("experiment ids must be unique within a run")
    return experiments


# ---------------------------------------------------------------------------
# Spectrum construction with caching

_ORACLES: Dict[str, Callable] = {
    "interval": lambda p: oracles.interval_spectrum(p["length"], p["k"]),
    "box": lambda p: oracles.box_spectrum(p["lengths"], p["k"]),
    "torus": lambda p: oracles.torus_spectrum(p["periods"], p["k"]),
    "sphere": lambda p: oracles.sphere_spectrum(p["dim"], p["radius"], p["k"]),
    "ou": lambda p: oracles.ou_spectrum(p["dim"], p["coeff"], p["k"]),
}


def _oracle_spectrum(spec: dict) -> Spectrum:
    name = spec["name"]
    if name == "product":
        left = _oracle_spectrum(spec["left"])
        right = _oracle_spectrum(spec["right"])
        return oracles.product_spectrum(left, right, spec["params"]["k"])
    if name not in _ORACLES:
        raise ValueError(f"unknown oracle {name!r}")
    return _ORACLES[name](spec.get("params", {}))


def _spectrum_to_payload(s: Spectrum) -> dict:
    return {"eigenvalues": list(s.eigenvalues),
            "residual_norms": list(s.residual_norms),
            "index_base": s.index_base,
            "uncertainties": list(s.uncertainties),
            "raw_levels": [list(row) for row in s.raw_levels],
            "warnings": list(s.warnings),
            "complete": s.complete,
            "problem": s.problem}


def _spectrum_from_payload(d: dict) -> Spectrum:
    return Spectrum(eigenvalues=tuple(d["eigenvalues"]),
                    residual_norms=tuple(d["residual_norms"]),
                    index_base=int(d["index_base"]),
                    problem=d.get("problem", {}),
                    uncertainties=tuple(d["uncertainties"]),
                    raw_levels=tuple(tuple(r) for r in d.get("raw_levels", [])),
                    warnings=tuple(d.get("warnings", [])),
                    complete=bool(d.get("complete", False)))


def build_spectrum(spec: dict, k_needed: int, seed: Optional[int] = None,
                   cache_dir: Optional[str] = None) -> Spectrum:
    """Compute (or load from cache) the spectrum described by a config block."""
    if spec.get("kind") == "oracle":
        return _oracle_spectrum(spec)

    domain = _parse_domain(spec["domain"])
    weight = _parse_weight(spec.get("weight", {}), len(domain.lo))
    grid_spec = dict(spec.get("grid", {}))
    levels = int(grid_spec.get("levels", 2))
    solver_spec = dict(spec.get("solver", {}))
    if seed is not None:
        solver_spec["rng_seed"] = int(seed)
    solver_spec.setdefault("rng_seed", 0)
    solver_spec.setdefault("k", k_needed)
    route = spec.get("route", "schrodinger")

    key = cache_key(domain.spec(), weight.spec(),
                    {"points_per_axis": grid_spec["points_per_axis"], "levels": levels},
                    solver_spec, route)
    cache_path = None
    if cache_dir:
        cache_path = Path(cache_dir) / f"{key}.json"
        if cache_path.exists():
            payload = json.loads(cache_path.read_text())
            if payload.get("format") == CACHE_FORMAT:
                return _spectrum_from_payload(payload["spectrum"])
            # Version mismatch: refuse to load, recompute and overwrite.

    base = Grid.for_domain(domain, grid_spec["points_per_axis"])
    cfg = SolverConfig(k=int(solver_spec["k"]),
                       tol=float(solver_spec.get("tol", 1e-8)),
                       max_iterations=solver_spec.get("max_iterations"),
                       rng_seed=int(solver_spec["rng_seed"]),
                       method=solver_spec.get("method", "auto"))
    spectrum = refine_and_extrapolate(domain, weight, base, levels, cfg, route=route)

    if cache_path is not None:
        cache_path.parent.mkdir(parents=True, exist_ok=True)
        _atomic_write(cache_path, canonical_json(
            {"format": CACHE_FORMAT, "key": key,
             "spectrum": _spectrum_to_payload(spectrum)}))
    return spectrum


# ---------------------------------------------------------------------------
# Suite evaluation


@dataclass
class SuiteContext:
    n: int
    geometry: GeometrySpec
    k_max: int
    domain: Optional[Domain] = None
    weight: Optional[WeightFunction] = None
    _c_auto: Optional[float] = None

    def resolve_c(self, params: dict) -> float:
        c = params.get("c", "auto")
        if c != "auto":
            return float(c)
        if self._c_auto is None:
            self._c_auto = self._compute_c()
        return self._c_auto

    def _compute_c(self) -> float:
        if self.domain is not None and self.weight is not None \
                and self.domain.shape in ("interval", "box", "flat_torus"):
            grid = Grid.for_domain(self.domain, 65)
            return bounds.constant_c_general(self.domain, self.weight,
                                             self.geometry, grid)
        # Constant weight on an abstract immersed space: only curvature is left.
        return self.geometry.mean_curv_sq_max / 4.0

    def bundle(self, params: dict, c: Optional[float] = None) -> ConstantsBundle:
        if c is None:
            c = self.resolve_c(params)
        p = int(params.get("p", self.geometry.p))
        return ConstantsBundle(
            n=self.n, p=p, c=c,
            C0=params.get("C0"),
            alpha_min=float(params.get("alpha", 1.0)),
            alpha_max=float(params.get("alpha_bar", params.get("alpha", 1.0))),
            beta=float(params.get("beta", 1.0)),
            b_list=tuple(params.get("b_list", [1.0] * (self.n + p))))

    def weight_extrema(self) -> Tuple[float, float, float, float]:
        """(f_min, f_max, max |grad f|, max |grad f|^2) over a sampling grid."""
        if self.domain is None or self.weight is None:
            return 0.0, 0.0, 0.0, 0.0
        grid = Grid.for_domain(self.domain, 65)
        pts = grid.points()
        fv = self.weight.potential_at(pts)
        grad = self.weight.gradient_at(pts)
        gsq = np.sum(grad * grad, axis=1)
        return float(np.min(fv)), float(np.max(fv)), float(np.sqrt(np.max(gsq))), float(np.max(gsq))


def _ks(s: Spectrum, k_max: int) -> range:
    return range(1, min(k_max, len(s) - 1) + 1)


def _gap_rows(name: str, s: Spectrum, k_max: int, rhs_fn) -> List[BoundCheck]:
    lam, u = s.values(), s.bands()
    rows = []
    for k in _ks(s, k_max):
        lhs = lam[k] - lam[k - 1]
        rhs, rhs_band = rhs_fn(k)
        rows.append(bounds._check(name, k, lhs, rhs, u[k] + u[k - 1] + rhs_band))
    return rows


def _suite_ppw(s, ctx, params):
    c = ctx.resolve_c(params)
    return [bounds.ppw_check(s, ctx.n, k, c) for k in _ks(s, ctx.k_max)]


def _suite_hp(s, ctx, params):
    c = ctx.resolve_c(params)
    return [bounds.hile_protter_check(s, ctx.n, k, c) for k in _ks(s, ctx.k_max)]


def _suite_yang1(s, ctx, params):
    c = ctx.resolve_c(params)
    return [bounds.yang_first_check(s, ctx.n, k, c) for k in _ks(s, ctx.k_max)]


def _suite_yang2(s, ctx, params):
    c = ctx.resolve_c(params)
    return [bounds.yang_second_check(s, ctx.n, k, c) for k in _ks(s, ctx.k_max)]


def _suite_cy_upper(s, ctx, params):
    c = ctx.resolve_c(params)
    C0 = params.get("C0") or bounds.default_C0(ctx.n)
    lam, u = s.values(), s.bands()
    rows = []
    for k in _ks(s, ctx.k_max):
        rhs = bounds.cheng_yang_upper(lam[0], ctx.n, k, c, C0)
        band = u[k] + C0 * k ** (2.0 / ctx.n) * u[0]
        rows.append(bounds._check("cy_upper", k, lam[k], rhs, band))
    return rows


def _suite_recursion(s, ctx, params):
    c = ctx.resolve_c(params)
    rows = []
    for rec in bounds.recursion_audit(s, ctx.n, c, k_max=min(ctx.k_max, len(s) - 1)):
        rows.append(rec.nonneg)
        if rec.step is not None:
            rows.append(rec.step)
    return rows


def _shift_for(s: Spectrum, params: dict) -> int:
    # Check k compares eigenvalues at list positions k-1 and k; in those
    # terms both the Dirichlet and the closed gap theorems bound the gap by
    # (constant) * k^{1/n}.  The shifted exponent stays available because
    # the closed statements are ambiguous by one index.
    if "index_shift" in params:
        return int(params["index_shift"])
    return 0


def _suite_immersion_gap(s, ctx, params):
    bundle = ctx.bundle(params)
    shift = _shift_for(s, params)
    lam, u = s.values(), s.bands()
    scale = bounds.immersed_gap_bound(1.0, bundle, 1, 0) / (1.0 + bundle.c)

    def rhs_fn(k):
        rhs = bounds.immersed_gap_bound(lam[0], bundle, k, shift)
        return rhs, scale * (k + shift) ** (1.0 / ctx.n) * u[0]

    return _gap_rows("immersion_gap", s, ctx.k_max, rhs_fn)


def _suite_gaussian_gap(s, ctx, params):
    min_xsq = params.get("min_Xsq", "auto")
    if min_xsq == "auto":
        min_xsq = ctx.domain.min_position_sq() if ctx.domain is not None else 0.0
    shift = _shift_for(s, params)
    lam, u = s.values(), s.bands()

    def rhs_fn(k):
        rhs = bounds.gaussian_soliton_gap(lam[0], ctx.n, k, min_xsq, shift)
        deriv = 4.0 * np.sqrt(bounds.default_C0(ctx.n) / ctx.n) * (k + shift) ** (1.0 / ctx.n)
        return rhs, deriv * u[0]

    return _gap_rows("gaussian_gap", s, ctx.k_max, rhs_fn)


def _suite_self_shrinker_gap(s, ctx, params):
    c = params.get("c", "auto")
    if c == "auto":
        c = bounds.self_shrinker_c(ctx.geometry, ctx.n)
    bundle = ctx.bundle(params, c=float(c))
    shift = _shift_for(s, params)
    lam, u = s.values(), s.bands()
    unit = bounds.immersed_gap_bound(1.0, bundle, 1, 0) / (1.0 + bundle.c)

    def rhs_fn(k):
        rhs = bounds.immersed_gap_bound(lam[0], bundle, k, shift)
        return rhs, unit * (k + shift) ** (1.0 / ctx.n) * u[0]

    return _gap_rows("self_shrinker_gap", s, ctx.k_max, rhs_fn)


def _suite_ricci_gap(s, ctx, params):
    c = params.get("c", "auto")
    if c == "auto":
        f_min, f_max, _, _ = ctx.weight_extrema()
        if ctx.domain is not None and ctx.weight is not None:
            c_bar = weighted_mean_of_f(ctx.domain, ctx.weight, 256)
        else:
            c_bar = 0.0
        c = bounds.ricci_soliton_c(ctx.geometry.soliton_rho, (f_min, f_max), c_bar,
                                   ctx.geometry.scalar_curv_min,
                                   ctx.geometry.mean_curv_sq_max, ctx.n)
    # The formula can dip below zero for strongly positive scalar curvature;
    # every bound is nondecreasing in c, so clamping stays valid.
    bundle = ctx.bundle(params, c=max(float(c), 0.0))
    shift = _shift_for(s, params)
    lam, u = s.values(), s.bands()
    unit = bounds.immersed_gap_bound(1.0, bundle, 1, 0) / (1.0 + bundle.c)

    def rhs_fn(k):
        rhs = bounds.immersed_gap_bound(lam[0], bundle, k, shift)
        return rhs, unit * (k + shift) ** (1.0 / ctx.n) * u[0]

    return _gap_rows("ricci_gap", s, ctx.k_max, rhs_fn)


def _suite_product_gap(s, ctx, params):
    m = int(params["m"])
    gmax = params.get("grad_f_max", "auto")
    gsq = params.get("grad_f_sq_max", "auto")
    if gmax == "auto" or gsq == "auto":
        _, _, auto_gmax, auto_gsq = ctx.weight_extrema()
        gmax = auto_gmax if gmax == "auto" else float(gmax)
        gsq = auto_gsq if gsq == "auto" else float(gsq)
    shift = _shift_for(s, params)
    lam, u = s.values(), s.bands()

    def rhs_fn(k):
        rhs = bounds.product_manifold_gap(lam[0], m, k, gmax, gsq,
                                          params.get("C0m"), shift)
        return rhs, 4.0 * np.sqrt(bounds.default_C0(m)) * u[0]

    return _gap_rows("product_gap", s, ctx.k_max, rhs_fn)


def _suite_conjecture(s, ctx, params):
    return bounds.conjecture_check(s, ctx.n, min(ctx.k_max, len(s) - 1))


EVALUATORS: Dict[str, Callable] = {
    "ppw": _suite_ppw,
    "hp": _suite_hp,
    "yang1": _suite_yang1,
    "yang2": _suite_yang2,
    "cy_upper": _suite_cy_upper,
    "recursion": _suite_recursion,
    "immersion_gap": _suite_immersion_gap,
    "gaussian_gap": _suite_gaussian_gap,
    "self_shrinker_gap": _suite_self_shrinker_gap,
    "ricci_gap": _suite_ricci_gap,
    "product_gap": _suite_product_gap,
    "conjecture": _suite_conjecture,
}

# Conjecture verdicts are reported, never asserted: the inequality is open.
UNASSERTED = {"conjecture"}


# ---------------------------------------------------------------------------
# Experiment execution and reports


@dataclass
class RunReport:
    experiments: List[dict] = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    timings: Dict[str, float] = field(default_factory=dict)  # not serialized

    def to_payload(self) -> dict:
        return {"format": REPORT_FORMAT, "experiments": self.experiments,
                "summary": self.summary}


def _convergence_audit(s: Spectrum) -> dict:
    if not s.raw_levels or len(s.raw_levels) < 2:
        return {}
    first = [row[0] for row in s.raw_levels]
    limit = s.eigenvalues[0]
    errs = [abs(v - limit) for v in first]
    orders = [float(np.log2(errs[i] / errs[i + 1]))
              for i in range(len(errs) - 1) if errs[i + 1] > 0]
    return {"lambda1_per_level": first, "observed_orders": orders}


def run_experiment(cfg: ExperimentConfig, seed: Optional[int] = None,
                   cache_dir: Optional[str] = None) -> dict:
    """Run one experiment: build the spectrum, evaluate the selected suite.

    Solver failures mark the experiment failed and the run continues.
    """
    t0 = time.perf_counter()
    entry = {"id": cfg.id, "status": "ok", "checks": []}
    try:
        spectrum = build_spectrum(cfg.spectrum_spec, cfg.k_max + 1, seed, cache_dir)
    except (ConvergenceError, DriftLabError) as exc:
        entry["status"] = "failed"
        entry["error"] = str(exc)
        return entry
    ctx = SuiteContext(n=cfg.geometry.n, geometry=cfg.geometry, k_max=cfg.k_max)
    if cfg.spectrum_spec.get("kind") != "oracle":
        ctx.domain = _parse_domain(cfg.spectrum_spec["domain"])
        ctx.weight = _parse_weight(cfg.spectrum_spec.get("weight", {}), len(ctx.domain.lo))
    rows = []
    for item in cfg.suite:
        params = {k: v for k, v in item.items() if k != "name"}
        for check in EVALUATORS[item["name"]](spectrum, ctx, params):
            rows.append(dict(check.row(), asserted=item["name"] not in UNASSERTED))
    entry["checks"] = rows
    suite_names = {item["name"] for item in cfg.suite}
    constants = {"offset_c": ctx.resolve_c({}),
                 "offset_c_label": "reference-embedding value"}
    if "recursion" in suite_names:
        constants["recursion_prefix_factor"] = bounds.recursion_prefix_factor(
            ctx.n, cfg.k_max)
    if "product_gap" in suite_names:
        constants["product_gap_note"] = (
            "offset c2 substitutes the explicit upper bound for lambda_{k+1}")
    entry["constants"] = constants
    entry["spectrum"] = {
        "eigenvalues": list(spectrum.eigenvalues[:cfg.k_max + 1]),
        "uncertainties": list(spectrum.uncertainties[:cfg.k_max + 1]),
        "index_base": spectrum.index_base,
        "warnings": list(spectrum.warnings),
    }
    entry["convergence"] = _convergence_audit(spectrum)
    entry["elapsed"] = time.perf_counter() - t0  # stripped before serialization
    return entry


def _summarize(entries: List[dict]) -> dict:
    counts = {"holds": 0, "holds_strictly": 0, "violated": 0, "inconclusive": 0}
    min_slack: Dict[str, float] = {}
    asserted_violations = 0
    for e in entries:
        for row in e.get("checks", []):
            counts[row["verdict"]] += 1
            name = row["check_name"]
            if not np.isinf(row["slack"]):
                min_slack[name] = min(min_slack.get(name, np.inf), row["slack"])
            if row["asserted"] and row["verdict"] == "violated":
                asserted_violations += 1
    failed = sum(1 for e in entries if e["status"] == "failed")
    if failed:
        exit_code = EXIT_SOLVER_FAILURE
    elif asserted_violations:
        exit_code = EXIT_VIOLATION
    else:
        exit_code = EXIT_OK
    return {"verdict_counts": counts,
            "min_slack_per_family": {k: v for k, v in sorted(min_slack.items())},
            "asserted_violations": asserted_violations,
            "failed_experiments": failed,
            "exit_code": exit_code}


def run_suite(experiments: Sequence[ExperimentConfig], seed: Optional[int] = None,
              cache_dir: Optional[str] = None, jobs: int = 1) -> RunReport:
    report = RunReport()
    if jobs > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=jobs) as pool:
            entries = list(pool.map(
                lambda c: run_experiment(c, seed, cache_dir), experiments))
    else:
        entries = [run_experiment(c, seed, cache_dir) for c in experiments]
    # Merge deterministically by experiment id, never by completion order.
    for e in sorted(entries, key=lambda e: e["id"]):
        report.timings[e["id"]] = e.pop("elapsed", 0.0)
        report.experiments.append(e)
    report.summary = _summarize(report.experiments)
    return report


def _atomic_write(path: Path, text: str):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=str(path.parent), prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


CSV_COLUMNS = ("experiment_id", "check_name", "k", "lhs", "rhs", "slack",
               "uncertainty", "verdict")

_GAP_FAMILIES = ("immersion_gap", "gaussian_gap", "self_shrinker_gap", "ricci_gap",
                 "product_gap", "conjecture")


def emit_reports(report: RunReport, out_dir, formats=("csv", "json")) -> List[Path]:
    """Write report.csv / report.json plus the plot-data CSV, atomically."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    if "csv" in formats:
        lines = [",".join(CSV_COLUMNS)]
        for e in report.experiments:
            for row in e.get("checks", []):
                lines.append(",".join([
                    e["id"], row["check_name"], str(row["k"]), repr(row["lhs"]),
                    repr(row["rhs"]), repr(row["slack"]), repr(row["uncertainty"]),
                    row["verdict"]]))
        path = out_dir / "report.csv"
        _atomic_write(path, "\n".join(lines) + "\n")
        written.append(path)

        plot_lines = ["experiment_id,series,k,value"]
        for e in report.experiments:
            spectrum = e.get("spectrum")
            if spectrum:
                lam = spectrum["eigenvalues"]
                for k in range(1, len(lam)):
                    plot_lines.append(f"{e['id']},gap,{k},{lam[k] - lam[k - 1]!r}")
            for row in e.get("checks", []):
                if row["check_name"] in _GAP_FAMILIES:
                    plot_lines.append(
                        f"{e['id']},{row['check_name']}_bound,{row['k']},{row['rhs']!r}")
        path = out_dir / "plotdata.csv"
        _atomic_write(path, "\n".join(plot_lines) + "\n")
        written.append(path)
    if "json" in formats:
        path = out_dir / "report.json"
        _atomic_write(path, json.dumps(report.to_payload(), indent=1, sort_keys=True))
        written.append(path)
    return written


def verify(config_path, out_dir, seed: Optional[int] = None,
           cache_dir: Optional[str] = None, jobs: int = 1) -> int:
    """Full run: every experiment, every selected bound; returns the exit code."""
    if cache_dir is None:
        cache_dir = os.environ.get("DRIFTLAB_CACHE_DIR")
    experiments = load_config(config_path)
    report = run_suite(experiments, seed=seed, cache_dir=cache_dir, jobs=jobs)
    emit_reports(report, out_dir)
    return report.summary["exit_code"]
