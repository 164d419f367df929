"""Incoherence measurement, recovery metrics and the phase-transition sweep."""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from .errors import ArgumentError, CTVError, DomainError, ShapeError
from .rng import mix_seeds
from .solvers import SOLVERS, SolverConfig
from .synth import SyntheticInstance, SyntheticSpec, generate
from .tensor import UnfoldedMatrix, diff_array, numerical_rank

log = logging.getLogger(__name__)

PSNR_CAP = 99.0


# -- incoherence ---------------------------------------------------------------


class Incoherence(NamedTuple):
    mu_U: float
    mu_V: float
    mu_UV: float

    @property
    def max(self):
        return max(self)


def incoherence_mu(x, r):
    """Smallest constants for which the three incoherence bounds hold at rank ``r``.

    With ``U, V`` the top-``r`` singular vectors of ``x`` (``n1 x n2``)::

        mu_U  = n1 / r * max_k ||U^T e_k||^2
        mu_V  = n2 / r * max_k ||V^T e_k||^2
        mu_UV = n1 n2 / r * max_ij (U V^T)_ij^2
    """
    a = np.asarray(x.data if isinstance(x, UnfoldedMatrix) else x, dtype=np.float64)
    if a.ndim != 2:
        raise ShapeError("incoherence is defined for matrices")
    n1, n2 = a.shape
    r = int(r)
    if not 1 <= r <= min(n1, n2):
        raise ArgumentError(f"rank r={r} outside [1, {min(n1, n2)}]")
    u, _, vt = np.linalg.svd(a, full_matrices=False)
    u = u[:, :r]
    v = vt[:r].T
    mu_u = n1 / r * float(np.max(np.sum(u**2, axis=1)))
    mu_v = n2 / r * float(np.max(np.sum(v**2, axis=1)))
    mu_uv = n1 * n2 / r * float(np.max(np.abs(u @ v.T))) ** 2
    return Incoherence(mu_u, mu_v, mu_uv)


@dataclass(frozen=True)
class IncoherenceReport:
    rank: int
    original: Incoherence
    gradients: tuple  # one Incoherence per mode

    @property
    def mu_pcp(self):
        return self.original.max

    @property
    def mu_3dctv(self):
        return max(g.max for g in self.gradients)

    def to_dict(self):
        return {
            "rank": self.rank,
            "original": self.original._asdict(),
            "gradients": [g._asdict() for g in self.gradients],
            "mu_pcp": self.mu_pcp,
            "mu_3dctv": self.mu_3dctv,
        }


def report_mu(instance, r=None):
    """Incoherence of ``X0`` and of its three gradient maps.

    ``instance`` is a :class:`SyntheticInstance` (its ``X0`` is used and ``r``
    defaults to the generating rank) or an :class:`UnfoldedMatrix`, for which
    ``r`` defaults to the numerical rank.
    """
    if isinstance(instance, SyntheticInstance):
        x = instance.X0
        r = instance.spec.r if r is None else r
    elif isinstance(instance, UnfoldedMatrix):
        x = instance
        r = numerical_rank(x.data) if r is None else r
    else:
        raise ArgumentError("report_mu needs a SyntheticInstance or UnfoldedMatrix")
    grads = tuple(incoherence_mu(diff_array(x.data, x.dims, mode), r) for mode in (1, 2, 3))
    return IncoherenceReport(int(r), incoherence_mu(x.data, r), grads)


# -- metrics -------------------------------------------------------------------


def _pair(a, b):
    a = np.asarray(a.data if isinstance(a, UnfoldedMatrix) else a, dtype=np.float64)
    b = np.asarray(b.data if isinstance(b, UnfoldedMatrix) else b, dtype=np.float64)
    if a.shape != b.shape:
        raise ShapeError(f"shape mismatch {a.shape} vs {b.shape}")
    if a.ndim == 3:
        a = a.reshape((-1, a.shape[2]), order="F")
        b = b.reshape((-1, b.shape[2]), order="F")
    elif a.ndim == 1:
        a, b = a[:, None], b[:, None]
    return a, b


def metric_rel_err(a, b):
    """``||a - b||_F / ||b||_F`` (b is the reference)."""
    a, b = _pair(a, b)
    den = np.linalg.norm(b)
    num = np.linalg.norm(a - b)
    if den == 0:
        return 0.0 if num == 0 else math.inf
    return float(num / den)


def metric_psnr(x_hat, x0, peak=1.0):
    """Band-averaged PSNR in dB; an exact band counts as ``PSNR_CAP``."""
    a, b = _pair(x_hat, x0)
    mse = np.mean((a - b) ** 2, axis=0)
    vals = np.full(mse.shape, PSNR_CAP)
    nz = mse > 0
    vals[nz] = np.minimum(10.0 * np.log10(peak**2 / mse[nz]), PSNR_CAP)
    return float(np.mean(vals))


def metric_ergas(x_hat, x0, ratio=1.0):
    a, b = _pair(x_hat, x0)
    means = np.mean(b, axis=0)
    if np.any(means == 0):
        raise DomainError("ERGAS is undefined when a reference band has zero mean")
    rmse = np.sqrt(np.mean((a - b) ** 2, axis=0))
    return float(100.0 * ratio * np.sqrt(np.mean((rmse / means) ** 2)))


# -- phase transition ----------------------------------------------------------


@dataclass(frozen=True)
class TrialRecord:
    cell_i: int
    cell_j: int
    rho_s: float
    rank_ratio: float
    rank: int
    solver: str
    trial: int
    seed: int
    rel_err: float
    success: bool
    iters: int
    converged: bool
    error: str = ""


@dataclass
class PhaseGrid:
    rho_s_axis: list
    rank_axis: list
    trials: int
    threshold: float
    solvers: list
    seed: int
    records: list = field(default_factory=list)

    def success_fraction(self, solver, threshold=None):
        """``len(rho_s_axis) x len(rank_axis)`` array of success fractions."""
        theta = self.threshold if threshold is None else threshold
        frac = np.zeros((len(self.rho_s_axis), len(self.rank_axis)))
        for rec in self.records:
            if rec.solver == solver and rec.rel_err <= theta:
                frac[rec.cell_i, rec.cell_j] += 1.0
        return frac / self.trials

    def success_area(self, solver, threshold=None):
        return float(np.mean(self.success_fraction(solver, threshold)))

    def summary(self):
        return {
            "rho_s_axis": list(self.rho_s_axis),
            "rank_axis": list(self.rank_axis),
            "trials": self.trials,
            "threshold": self.threshold,
            "seed": self.seed,
            "solvers": list(self.solvers),
            "success_area": {s: self.success_area(s) for s in self.solvers},
            "success_fraction": {s: self.success_fraction(s).tolist() for s in self.solvers},
        }


def trial_seed(base_seed, cell_i, cell_j, trial):
    return mix_seeds(base_seed, cell_i, cell_j, trial)


def _run_cell_trial(task):
    i, j, rho_s, ratio, trial, seed, base_spec, cfg, solvers, threshold = task
    rank = max(1, int(round(ratio * base_spec.s)))
    spec = replace(base_spec, r=rank, rho_s=rho_s, seed=seed)
    inst = generate(spec)
    out = []
    for name in solvers:
        try:
            res = SOLVERS[name](inst.M, replace(cfg, seed=seed))
            err = metric_rel_err(res.X, inst.X0)
            iters, conv, msg = res.iters_used, res.converged, ""
        except (CTVError, np.linalg.LinAlgError, FloatingPointError) as exc:
            # a failed solve is a failed recovery, not a failed sweep
            err, iters, conv, msg = math.inf, 0, False, f"{type(exc).__name__}: {exc}"
        out.append(TrialRecord(i, j, rho_s, ratio, rank, name, trial, seed, err, err <= threshold, iters, conv, msg))
    return out


def run_phase_transition(
    rho_s_axis,
    rank_axis,
    trials=5,
    solvers=("3dctv", "pcp"),
    cfg=None,
    seed=0,
    threshold=0.05,
    base_spec=None,
    threads=1,
    progress=None,
):
    """Success-fraction map over (sparsity, rank ratio) cells.

    Each trial draws a fresh instance with seed ``trial_seed(seed, i, j, t)`` and
    runs every solver on it; success means relative error of X at most
    ``threshold``.  Results do not depend on ``threads``.
    """
    rho_s_axis = [float(v) for v in rho_s_axis]
    rank_axis = [float(v) for v in rank_axis]
    if not rho_s_axis or not rank_axis:
        raise ArgumentError("phase grid axes must be non-empty")
    if int(trials) < 1:
        raise ArgumentError("need at least one trial per cell")
    unknown = [s for s in solvers if s not in SOLVERS]
    if unknown:
        raise ArgumentError(f"unknown solver(s): {unknown}")
    cfg = (cfg or SolverConfig()).validate()
    base_spec = base_spec or SyntheticSpec()

    tasks = [
        (i, j, rs, ratio, t, trial_seed(seed, i, j, t), base_spec, cfg, tuple(solvers), threshold)
        for i, rs in enumerate(rho_s_axis)
        for j, ratio in enumerate(rank_axis)
        for t in range(int(trials))
    ]
    grid = PhaseGrid(rho_s_axis, rank_axis, int(trials), float(threshold), list(solvers), int(seed))
    if threads and threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = pool.map(_run_cell_trial, tasks)
            for n, recs in enumerate(results, 1):
                grid.records.extend(recs)
                if progress:
                    progress(n, len(tasks))
    else:
        for n, task in enumerate(tasks, 1):
            grid.records.extend(_run_cell_trial(task))
            if progress:
                progress(n, len(tasks))
    return grid
