"""ADMM solvers: correlated-TV robust PCA and the PCP baseline.

The 3DCTV program is

    min  sum_i ||G_i||_* + 3 lam ||S||_1   s.t.  M = X + S,  G_i = D_i X,

split into five blocks (G_1..G_3, S, X) with multipliers Gamma_1..Gamma_4 and a
geometrically increasing penalty ``mu``.  One sweep updates G (three SVTs), S
(soft-thresholding), X (one FFT solve), then the multipliers.
"""

import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import ArgumentError, ConfigError, NumericalError
from .fftsolve import build_spectra, solve_x_array
from .prox import soft_threshold_array, svt_array
from .rng import PRNGStream
from .tensor import UnfoldedMatrix, diff_array, l1_norm, nuclear_norm, unfold

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverConfig:
    lam: float = None  # None -> 1 / sqrt(max(n1, n2))
    mu0: float = 1e-2
    rho: float = 1.1
    eps1: float = 1e-6
    eps2: float = 1e-6
    max_iters: int = 500
    mu_cap: float = 1e10
    seed: int = 0

    def validate(self):
        if self.lam is not None and not self.lam > 0:
            raise ConfigError(f"lambda must be positive, got {self.lam}")
        if not self.mu0 > 0:
            raise ConfigError(f"mu0 must be positive, got {self.mu0}")
        if not self.rho > 1:
            raise ConfigError(f"rho must exceed 1, got {self.rho}")
        if not (self.eps1 > 0 and self.eps2 > 0):
            raise ConfigError("eps1 and eps2 must be positive")
        if int(self.max_iters) < 1:
            raise ConfigError("max_iters must be a positive integer")
        if not self.mu0 <= self.mu_cap:
            raise ConfigError("mu0 must not exceed mu_cap")
        return self

    def lambda_for(self, n1, n2):
        if self.lam is not None:
            return float(self.lam)
        return 1.0 / math.sqrt(max(n1, n2))

    def to_dict(self):
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        return d


@dataclass(frozen=True)
class IterationDiagnostics:
    iter: int
    chg_m: float
    chg_x: float
    chg_s: float
    chg: float
    rel_err_m: float
    rel_err_x: float
    rel_err_s: float
    objective: float
    feas_g1: float
    feas_g2: float
    feas_g3: float
    mu: float


DIAGNOSTIC_FIELDS = tuple(IterationDiagnostics.__dataclass_fields__)


@dataclass(eq=False)
class DecompositionResult:
    X: UnfoldedMatrix
    S: UnfoldedMatrix
    G: list
    diagnostics: list = field(default_factory=list)
    converged: bool = False
    iters_used: int = 0
    lam: float = 0.0
    solver: str = ""

    @property
    def objective(self):
        return self.diagnostics[-1].objective if self.diagnostics else 0.0


def _as_input(m):
    if isinstance(m, UnfoldedMatrix):
        mat = m
    else:
        arr = np.asarray(m, dtype=np.float64)
        if arr.ndim != 3:
            raise ArgumentError("input must be an UnfoldedMatrix or an h x w x s array")
        mat = unfold(arr)
    if not np.all(np.isfinite(mat.data)):
        raise ArgumentError("input contains NaN or Inf entries")
    return mat


def _rel(num, den):
    # guarded denominator: an all-zero previous iterate would otherwise divide by 0
    return num / max(den, 1.0)


def objective_3dctv(x, s, lam):
    """``sum_i ||D_i X||_* + 3 lam ||S||_1``."""
    data = x.data
    total = sum(nuclear_norm(diff_array(data, x.dims, mode)) for mode in (1, 2, 3))
    return total + 3.0 * float(lam) * l1_norm(s)


def solve_3dctv_rpca(m, cfg=None, callback=None):
    """Decompose ``m`` into a low-rank, locally smooth X plus a sparse S.

    ``m`` is an :class:`UnfoldedMatrix` (or an ``h x w x s`` array).  Iterates
    until both feasibility ratios fall below ``eps1`` / ``eps2`` or
    ``cfg.max_iters`` sweeps have run.  ``callback(diag)`` is called after each
    sweep if given.
    """
    cfg = (cfg or SolverConfig()).validate()
    m = _as_input(m)
    dims = m.dims
    M = m.data
    n1, n2 = M.shape
    lam = cfg.lambda_for(n1, n2)
    spectra = build_spectra(*dims)

    m_norm = float(np.linalg.norm(M))
    m_norm2 = m_norm**2 if m_norm > 0 else 1.0

    X = PRNGStream(cfg.seed).normal(n1 * n2).reshape((n1, n2), order="F")
    S = np.zeros_like(M)
    G = [np.zeros_like(M) for _ in range(3)]
    gam = [np.zeros_like(M) for _ in range(4)]
    mu = float(cfg.mu0)

    dX = [diff_array(X, dims, mode) for mode in (1, 2, 3)]
    diags = []
    converged = False
    k = 0
    for k in range(1, int(cfg.max_iters) + 1):
        X_prev, S_prev = X, S
        try:
            nuc = 0.0
            for i in range(3):
                G[i], _, sv = svt_array(dX[i] + gam[i] / mu, 1.0 / mu)
                nuc += float(np.sum(sv))
        except NumericalError as exc:
            raise NumericalError(f"iteration {k}: {exc}", iteration=k) from exc

        S = soft_threshold_array(M - X + gam[3] / mu, 3.0 * lam / mu)
        X = solve_x_array(spectra, M - S, G, gam, mu)

        resid = M - X - S
        dX = [diff_array(X, dims, mode) for mode in (1, 2, 3)]
        for i in range(3):
            gam[i] = gam[i] + mu * (dX[i] - G[i])
        gam[3] = gam[3] + mu * resid

        feas_m = float(np.sum(resid**2)) / m_norm2
        feas_g = [float(np.sum((dX[i] - G[i]) ** 2)) / m_norm2 for i in range(3)]
        diag = _diagnostics(k, M, X, S, X_prev, S_prev, resid, m_norm, nuc + 3.0 * lam * l1_norm(S), feas_g, mu)
        diags.append(diag)
        if callback is not None:
            callback(diag)

        mu = min(mu * cfg.rho, cfg.mu_cap)
        if feas_m <= cfg.eps1 and all(f <= cfg.eps2 for f in feas_g):
            converged = True
            break

    log.debug("3dctv: %d iterations, converged=%s", k, converged)
    return DecompositionResult(
        X=UnfoldedMatrix(X, dims),
        S=UnfoldedMatrix(S, dims),
        G=[UnfoldedMatrix(g, dims) for g in G],
        diagnostics=diags,
        converged=converged,
        iters_used=k,
        lam=lam,
        solver="3dctv",
    )


def solve_pcp(m, cfg=None, callback=None):
    """Principal Component Pursuit ``min ||X||_* + lam ||S||_1 s.t. M = X + S``.

    Two-block inexact ALM with the same penalty schedule and stopping rule as
    :func:`solve_3dctv_rpca` (the gradient feasibility check does not apply).
    """
    cfg = (cfg or SolverConfig()).validate()
    m = _as_input(m)
    dims = m.dims
    M = m.data
    n1, n2 = M.shape
    lam = cfg.lambda_for(n1, n2)
    m_norm = float(np.linalg.norm(M))
    m_norm2 = m_norm**2 if m_norm > 0 else 1.0

    X = np.zeros_like(M)
    S = np.zeros_like(M)
    gam = np.zeros_like(M)
    mu = float(cfg.mu0)
    diags = []
    converged = False
    k = 0
    for k in range(1, int(cfg.max_iters) + 1):
        X_prev, S_prev = X, S
        try:
            X, _, sv = svt_array(M - S + gam / mu, 1.0 / mu)
        except NumericalError as exc:
            raise NumericalError(f"iteration {k}: {exc}", iteration=k) from exc
        S = soft_threshold_array(M - X + gam / mu, lam / mu)
        resid = M - X - S
        gam = gam + mu * resid

        feas_m = float(np.sum(resid**2)) / m_norm2
        obj = float(np.sum(sv)) + lam * l1_norm(S)
        diag = _diagnostics(k, M, X, S, X_prev, S_prev, resid, m_norm, obj, [0.0, 0.0, 0.0], mu)
        diags.append(diag)
        if callback is not None:
            callback(diag)

        mu = min(mu * cfg.rho, cfg.mu_cap)
        if feas_m <= cfg.eps1:
            converged = True
            break

    return DecompositionResult(
        X=UnfoldedMatrix(X, dims),
        S=UnfoldedMatrix(S, dims),
        G=[],
        diagnostics=diags,
        converged=converged,
        iters_used=k,
        lam=lam,
        solver="pcp",
    )


def _diagnostics(k, M, X, S, X_prev, S_prev, resid, m_norm, objective, feas_g, mu):
    chg_m = float(np.max(np.abs(resid)))
    chg_x = float(np.max(np.abs(X - X_prev)))
    chg_s = float(np.max(np.abs(S - S_prev)))
    return IterationDiagnostics(
        iter=k,
        chg_m=chg_m,
        chg_x=chg_x,
        chg_s=chg_s,
        chg=max(chg_m, chg_x, chg_s),
        rel_err_m=_rel(float(np.linalg.norm(resid)), m_norm),
        rel_err_x=_rel(float(np.linalg.norm(X - X_prev)), float(np.linalg.norm(X_prev))),
        rel_err_s=_rel(float(np.linalg.norm(S - S_prev)), float(np.linalg.norm(S_prev))),
        objective=float(objective),
        feas_g1=feas_g[0],
        feas_g2=feas_g[1],
        feas_g3=feas_g[2],
        mu=mu,
    )


SOLVERS = {"3dctv": solve_3dctv_rpca, "pcp": solve_pcp}
