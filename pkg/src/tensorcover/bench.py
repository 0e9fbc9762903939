"""Test tensors with known norms and the experiment runners built on them."""

import csv
import math
import os
import time
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .covering.constructions import from_spec
from .exceptions import ParameterError
from .nuclear import CONSTRAINT_BUDGET, approx_nuclear_norm
from .spectral import als_refine, approx_spectral_norm, mode_order

OPTIMAL_RTOL = 1e-6
NUCLEAR_OPTIMAL_TOL = 1e-4


@dataclass(frozen=True)
class OdecoInstance:
    """``T = sum_i w_i x_i ⊗ y_i ⊗ z_i`` with orthonormal ``y_i`` and ``z_i``.

    Factor matrices hold the unit vectors as columns. The spectral norm is
    ``max w_i`` and the nuclear norm ``sum w_i``.
    """

    tensor: np.ndarray
    weights: np.ndarray
    X: np.ndarray
    Y: np.ndarray
    Z: np.ndarray
    seed: int

    @property
    def true_spectral(self):
        return float(np.max(self.weights))

    @property
    def true_nuclear(self):
        return float(np.sum(self.weights))


def _orthonormal_columns(rng, n, r):
    Q, R = np.linalg.qr(rng.standard_normal((n, r)))
    return Q * np.sign(np.diag(R))


def gen_odeco(dims, r=None, seed=0, weights=None):
    """Random orthogonally decomposable order-3 tensor.

    Weights are absolute standard normals (or ``weights`` if given), ``x_i``
    are normalized Gaussians and ``y_i``, ``z_i`` are orthonormalized by QR,
    so ``(x_i.x_j)(y_i.y_j) = z_i.z_j = 0`` for ``i != j``.

    Parameters
    ----------
    dims : tuple of 3 ints
    r : int, optional
        Number of terms, default ``min(dims)``; at most ``min(n2, n3)``.
    seed : int
    weights : array_like, optional
        Positive weights overriding the random draw (length ``r``).
    """
    dims = tuple(int(n) for n in dims)
    if len(dims) != 3 or min(dims) < 1:
        raise ParameterError(f"dims must be three positive integers, got {dims}")
    if weights is not None:
        weights = np.asarray(weights, dtype=np.float64)
        if r is None:
            r = weights.shape[0]
    r = min(dims) if r is None else int(r)
    if r < 1 or r > min(dims[1], dims[2]):
        raise ParameterError(
            f"r = {r} terms cannot be orthogonal in modes of size {dims[1:]}")
    rng = np.random.default_rng(seed)
    lam = np.abs(rng.standard_normal(r))
    if weights is not None:
        if weights.shape != (r,) or np.any(weights <= 0):
            raise ParameterError("weights must be r positive values")
        lam = weights.copy()
    X = rng.standard_normal((dims[0], r))
    X /= np.linalg.norm(X, axis=0)
    Y = _orthonormal_columns(rng, dims[1], r)
    Z = _orthonormal_columns(rng, dims[2], r)
    T = np.einsum("r,ir,jr,kr->ijk", lam, X, Y, Z)
    return OdecoInstance(T, lam, X, Y, Z, int(seed))


# -- configuration ----------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentConfig:
    """Settings of one experiment; see :func:`parse_config` for the file form."""

    name: str = "experiment"
    kind: str = "spectral"
    dims: tuple = ((5, 10, 10),)
    r: int = 0
    instances: int = 20
    seed: int = 0
    hits: str = "h5"
    tol: float = 1e-6
    max_iter: int = 5000
    als_tol: float = 1e-10
    als_max_iter: int = 500
    budget: int = CONSTRAINT_BUDGET
    out_dir: str = ""


def _parse_dims(text):
    cells = []
    for cell in text.replace(";", ",").split(","):
        cell = cell.strip()
        if cell:
            cells.append(tuple(int(t) for t in cell.lower().split("x")))
    return tuple(cells)


def parse_config(text, **overrides):
    """Read ``key = value`` lines (``#`` comments allowed).

    Keys are the :class:`ExperimentConfig` fields; ``dims`` is a comma
    separated list such as ``5x10x10, 10x10x10``.
    """
    types = {f.name: f.type for f in fields(ExperimentConfig)}
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterError(f"config line {lineno}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in types:
            raise ParameterError(f"config line {lineno}: unknown key {key!r}")
        try:
            if key == "dims":
                values[key] = _parse_dims(val)
            elif types[key] in (int, "int"):
                values[key] = int(val)
            elif types[key] in (float, "float"):
                values[key] = float(val)
            else:
                values[key] = val
        except ValueError:
            raise ParameterError(f"config line {lineno}: bad value {val!r}") from None
    values.update({k: v for k, v in overrides.items() if v is not None})
    cfg = ExperimentConfig(**values)
    if cfg.kind not in ("spectral", "nuclear"):
        raise ParameterError(f"kind must be spectral or nuclear, got {cfg.kind!r}")
    return cfg


def load_config(path, **overrides):
    with open(path) as fh:
        return parse_config(fh.read(), **overrides)


# -- summaries --------------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentSummary:
    """Aggregates over instance rows.

    ``cells`` maps a dims label such as ``"5x10x10"`` to the summary of that
    cell when the rows span several shapes.
    """

    rows: list
    min_bound: float
    max_bound: float
    mean_bound: float
    pct_optimal: float
    mean_time: float
    cells: dict = field(default_factory=dict)


def summarize(rows):
    """Min, max and mean of ``bound``, percent of rows flagged ``optimal`` and
    mean of ``time``."""
    rows = list(rows)
    if not rows:
        raise ParameterError("no rows to summarize")
    b = np.array([row["bound"] for row in rows], dtype=np.float64)
    opt = np.array([bool(row.get("optimal", False)) for row in rows])
    t = np.array([row.get("time", 0.0) for row in rows], dtype=np.float64)
    return ExperimentSummary(rows, float(b.min()), float(b.max()),
                             float(np.mean(b)), 100.0 * float(np.mean(opt)),
                             float(np.mean(t)))


def _dims_label(dims):
    return "x".join(str(n) for n in dims)


def _with_cells(rows):
    top = summarize(rows)
    cells = {}
    for row in rows:
        cells.setdefault(row["dims"], []).append(row)
    return replace(top, cells={k: summarize(v) for k, v in cells.items()})


def _hitting_sets(cfg, dims, cache):
    # one set per enumerated mode, shared across the instances of a cell
    enum = [dims[p] for p in mode_order(dims)[:len(dims) - 2]]
    out = []
    for n in enum:
        if n not in cache:
            cache[n] = from_spec(cfg.hits, n, seed=cfg.seed)
        out.append(cache[n])
    return out


# -- runners ----------------------------------------------------------------------

def run_spectral_experiment(cfg):
    """Enumeration then ALS on odeco instances.

    Instance ``i`` of every cell uses seed ``cfg.seed + i``. Each row records
    the enumerated value, ``bound = value / ||T||_sigma``, the refined value,
    ``bound_plus`` and whether the refinement reached the spectral norm to
    relative ``1e-6``.
    """
    rows = []
    for dims in cfg.dims:
        cache = {}
        Hs = _hitting_sets(cfg, dims, cache)
        for i in range(cfg.instances):
            seed = cfg.seed + i
            inst = gen_odeco(dims, cfg.r or None, seed)
            t0 = time.perf_counter()
            res = approx_spectral_norm(inst.tensor, Hs)
            t1 = time.perf_counter()
            ref = als_refine(inst.tensor, res, cfg.als_max_iter, cfg.als_tol)
            t2 = time.perf_counter()
            sn = inst.true_spectral
            rows.append({
                "dims": _dims_label(dims), "instance": i, "seed": seed,
                "true": sn, "value": res.value, "bound": res.value / sn,
                "refined": ref.value, "bound_plus": ref.value / sn,
                "optimal": ref.value >= sn * (1.0 - OPTIMAL_RTOL),
                "bound_factor": res.bound_factor,
                "time": t1 - t0, "time_refine": t2 - t1,
            })
    summary = _with_cells(rows)
    if cfg.out_dir:
        write_csv(cfg, summary)
    return summary


def run_nuclear_experiment(cfg):
    """Relaxation on odeco instances; ``bound = u / ||T||_*``.

    Rows record convergence and the largest constraint violation; no
    covering-level factor is applied to ``u``.
    """
    rows = []
    for dims in cfg.dims:
        cache = {}
        Hs = _hitting_sets(cfg, dims, cache)
        for i in range(cfg.instances):
            seed = cfg.seed + i
            inst = gen_odeco(dims, cfg.r or None, seed)
            t0 = time.perf_counter()
            res = approx_nuclear_norm(inst.tensor, Hs, cfg.tol, cfg.max_iter, cfg.budget)
            t1 = time.perf_counter()
            nn = inst.true_nuclear
            rows.append({
                "dims": _dims_label(dims), "instance": i, "seed": seed,
                "true": nn, "value": res.u, "bound": res.u / nn,
                "lower": res.lower, "max_violation": res.max_violation,
                "iterations": res.iterations, "converged": res.converged,
                "optimal": abs(res.u / nn - 1.0) <= NUCLEAR_OPTIMAL_TOL,
                "time": t1 - t0,
            })
    summary = _with_cells(rows)
    if cfg.out_dir:
        write_csv(cfg, summary)
    return summary


def run_experiment(cfg):
    if cfg.kind == "spectral":
        return run_spectral_experiment(cfg)
    return run_nuclear_experiment(cfg)


# -- CSV --------------------------------------------------------------------------

SUMMARY_FIELDS = ("dims", "instances", "min_bound", "max_bound", "mean_bound",
                  "pct_optimal")


def _fmt(v):
    if isinstance(v, bool):
        return int(v)
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else str(v)
    return v


def write_csv(cfg, summary):
    """Write ``<name>_rows.csv`` and ``<name>_summary.csv`` (deterministic for
    a given configuration) plus ``<name>_timing.csv`` with wall times.

    Returns the three paths.
    """
    os.makedirs(cfg.out_dir, exist_ok=True)
    base = os.path.join(cfg.out_dir, cfg.name)
    timing_keys = [k for k in summary.rows[0] if k.startswith("time")]
    row_keys = [k for k in summary.rows[0] if k not in timing_keys]
    paths = (base + "_rows.csv", base + "_summary.csv", base + "_timing.csv")
    with open(paths[0], "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(row_keys)
        for row in summary.rows:
            w.writerow([_fmt(row[k]) for k in row_keys])
    with open(paths[1], "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_FIELDS)
        for label, s in list(summary.cells.items()) + [("all", summary)]:
            w.writerow([label, len(s.rows), _fmt(s.min_bound), _fmt(s.max_bound),
                        _fmt(s.mean_bound), _fmt(s.pct_optimal)])
    with open(paths[2], "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["dims", "instance"] + timing_keys)
        for row in summary.rows:
            w.writerow([row["dims"], row["instance"]] + [_fmt(row[k]) for k in timing_keys])
    return paths
