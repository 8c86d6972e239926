"""Output-SINR metrics and the Monte-Carlo harness for SINR curves."""

import hashlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Sequence

import numpy as np

from .array_model import DB_FLOOR, power_db
from .beamform import MethodSettings, build_weights
from .errors import (BoundaryFeasibleError, DomainError, ExtractionError, InconsistencyError,
                     InfeasibleError, SingularCovarianceError)
from .sector import DEFAULT_NUM_BASIS, DEFAULT_STEP, Feasibility, SectorModel
from .sim import (STREAM_MISMATCH, STREAM_SNAPSHOTS, draw_actual_steering, generate_snapshots,
                  make_rng, sample_covariance, true_interference_plus_noise_covariance)

SWEEP_VARIABLES = ("snapshots", "snr_db")
MAX_FAILURE_FRACTION = 0.05

# per-run solver failures: recorded, excluded from the mean
SOLVER_FAILURES = (ExtractionError, InconsistencyError, SingularCovarianceError, np.linalg.LinAlgError)


def output_sinr(w, actual_steering, sigma_s2, r_in):
    """sigma_s^2 |w^H a|^2 / (w^H R_{i+n} w), in dB (floored)."""
    w = np.asarray(w, dtype=complex)
    if not np.any(w):
        raise DomainError("weight vector is zero")
    num = sigma_s2 * abs(np.vdot(w, actual_steering)) ** 2
    den = np.vdot(w, r_in @ w).real
    return float(power_db(num / den))


def optimal_sinr(actual_steering, sigma_s2, r_in):
    """sigma_s^2 a^H R_{i+n}^{-1} a in dB: the ceiling for any weight vector."""
    a = np.asarray(actual_steering, dtype=complex)
    return float(power_db(sigma_s2 * np.vdot(a, np.linalg.solve(r_in, a)).real))


@dataclass(frozen=True)
class Sweep:
    """A base scenario and the values taken by one swept parameter."""

    base: object
    variable: str
    values: Sequence[float]

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise DomainError(f"sweep variable must be one of {SWEEP_VARIABLES}")
        vals = [float(v) for v in self.values]
        if not vals:
            raise DomainError("sweep has no points")
        if self.variable == "snapshots":
            vals = [int(v) for v in vals]
        object.__setattr__(self, "values", tuple(sorted(vals)))

    def scenario_at(self, x):
        if self.variable == "snapshots":
            return self.base.with_(num_snapshots=int(x))
        return self.base.with_(snr_db=float(x))


@dataclass
class CurvePoint:
    x: float
    mean_sinr_db: Dict[str, float]
    stderr_db: Dict[str, float]
    failures: Dict[str, int]
    samples: Dict[str, np.ndarray] = field(default_factory=dict, repr=False)


@dataclass
class SinrCurve:
    sweep_variable: str
    points: List[CurvePoint]
    runs: int
    digest: str
    methods: Sequence[str] = ()
    averaging: str = "db"

    def valid(self, method):
        """False if any sweep point lost more than 5% of its runs for `method`."""
        return all(p.failures.get(method, 0) <= MAX_FAILURE_FRACTION * self.runs for p in self.points)

    @property
    def invalid_methods(self):
        return [m for m in self.methods if not self.valid(m)]

    def series(self, method):
        return np.array([p.mean_sinr_db[method] for p in self.points])

    @property
    def x(self):
        return np.array([p.x for p in self.points])


def _digest(sweep, methods, settings, num_basis, quad_step, runs, run_offset, averaging, extra=()):
    text = repr((sweep, tuple(methods), settings, num_basis, quad_step, runs, run_offset, averaging, extra))
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def _simulate_run(job):
    """All sweep points of one run. Returns {x: {method: sinr_db or None}}."""
    sweep, methods, settings, sector_model, run, loading = job
    base = sweep.base
    a = draw_actual_steering(base, make_rng(base.seed, run, STREAM_MISMATCH))
    r_in = true_interference_plus_noise_covariance(base)
    p = base.presumed_steering
    out = {}
    for x in sweep.values:
        sc = sweep.scenario_at(x)
        X = generate_snapshots(sc, a, make_rng(base.seed, run, STREAM_SNAPSHOTS))
        r_hat = sample_covariance(X, loading)
        sigma2 = sc.signal_power
        opt = optimal_sinr(a, sigma2, r_in)
        rec = {"optimal": opt}
        for m in methods:
            try:
                bw = build_weights(m, r_hat, p, sector_model, settings, len(sc.interferers))
            except SOLVER_FAILURES:
                rec[m] = None
                continue
            s = output_sinr(bw.w, a, sigma2, r_in)
            if s > opt + 1e-6:
                raise AssertionError(f"{m} SINR {s:.6f} dB exceeds the optimum {opt:.6f} dB (run {run}, x={x})")
            rec[m] = s
        out[x] = rec
    return out


def _aggregate(values, averaging):
    v = np.asarray(values, dtype=float)
    n = v.size
    if n == 0:
        return float("nan"), float("nan")
    if averaging == "db":
        se = float(np.std(v, ddof=1) / np.sqrt(n)) if n > 1 else 0.0
        return float(np.mean(v)), se
    lin = 10.0 ** (v / 10.0)
    mean = float(np.mean(lin))
    se_lin = float(np.std(lin, ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return float(power_db(mean)), 10.0 / np.log(10.0) * se_lin / mean


def run_monte_carlo(sweep, methods, runs, settings=MethodSettings(), num_basis=DEFAULT_NUM_BASIS,
                    quad_step=DEFAULT_STEP, averaging="db", workers=1, run_offset=0,
                    loading=0.0, delta0=None):
    """Mean output SINR of each method along a sweep.

    Every run draws one actual steering vector (fixed across the sweep and
    the snapshots of the run) and, per sweep point, a fresh training set
    that contains the desired signal. Seeds come from (scenario seed, run
    index, stream), so results do not depend on `workers`.

    Parameters
    ----------
    sweep : Sweep
    methods : list of str
        Names accepted by :func:`sdrbeam.beamform.build_weights`.
    runs : int
    settings : MethodSettings
    num_basis : int
        Number of dominant eigenvectors of C used by the subspace baseline.
    quad_step : float
        Sector quadrature step in degrees.
    averaging : {"db", "linear"}
        Domain in which SINR values are averaged.
    workers : int
        Worker processes; 1 runs inline.
    run_offset : int
        First run index (use disjoint offsets for independent replicates).
    loading : float
        Diagonal loading added to every sample covariance (0 disables it).
    delta0 : float, optional
        Override for the sector threshold.

    Returns
    -------
    SinrCurve
        Includes a pseudo-method "optimal" holding the mean optimal SINR.
    """
    if runs < 1:
        raise DomainError("runs must be >= 1")
    if averaging not in ("db", "linear"):
        raise DomainError("averaging must be 'db' or 'linear'")
    methods = list(methods)
    base = sweep.base
    sector_model = SectorModel.build(base.geometry, base.sector, num_basis, quad_step, delta0)
    if "proposed" in methods:
        status = sector_model.feasibility()
        if status is Feasibility.BOUNDARY:
            raise BoundaryFeasibleError("sector model is boundary feasible; the dual search does not apply")
        if status is Feasibility.INFEASIBLE:
            raise InfeasibleError("sector model is infeasible: Delta0/M is below lambda_min(C~)")

    jobs = [(sweep, methods, settings, sector_model, run_offset + r, loading) for r in range(runs)]
    if workers > 1 and runs > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_simulate_run, jobs, chunksize=max(1, runs // (4 * workers))))
    else:
        results = [_simulate_run(j) for j in jobs]

    names = ["optimal"] + methods
    points = []
    for x in sweep.values:
        mean, se, fails, samples = {}, {}, {}, {}
        for m in names:
            vals = [res[x][m] for res in results]
            ok = np.array([v for v in vals if v is not None], dtype=float)
            fails[m] = len(vals) - ok.size
            mean[m], se[m] = _aggregate(ok, averaging)
            samples[m] = ok
        points.append(CurvePoint(x, mean, se, fails, samples))
    digest = _digest(sweep, methods, settings, num_basis, quad_step, runs, run_offset, averaging,
                     (loading, delta0))
    return SinrCurve(sweep.variable, points, runs, digest, tuple(methods), averaging)


__all__ = ["DB_FLOOR", "output_sinr", "optimal_sinr", "Sweep", "CurvePoint", "SinrCurve",
           "run_monte_carlo"]
