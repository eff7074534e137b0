"""Monte Carlo measurement of strong convergence against a fine reference.

The reference solution is the same discretization run at the reference
resolution (N_ref = M_ref); every coarser path is driven by the identical
underlying noise, truncated in modes and aggregated in time, so the sample
distance || Y_coarse - Y_ref || measures the strong error pathwise.  Errors
are root-mean-square over samples in the L2 norm, computed in coefficient
space after zero-padding (Parseval makes this the function-space norm).
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import BlowupError
from .model import ModelParams
from .noise import NoiseGrid, NoiseRealization
from .spectral import SpectralField, l2_norm, sup_norm_estimate
from .stepper import simulate_path

MODES = ("joint", "spatial", "temporal")


@dataclass(frozen=True)
class RunConfig:
    """Parameters of one convergence study."""

    mode: str
    resolutions: tuple[int, ...]
    ref_resolution: int
    samples: int
    master_seed: int
    horizon_T: float
    params: ModelParams

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        res = tuple(int(r) for r in self.resolutions)
        object.__setattr__(self, "resolutions", res)
        if not res:
            raise ValueError("resolutions must be non-empty")
        if any(r < 1 for r in res):
            raise ValueError("resolutions must be positive")
        if list(res) != sorted(set(res)):
            raise ValueError("resolutions must be strictly ascending")
        for r in res:
            if self.ref_resolution % r != 0:
                raise ValueError(
                    f"resolution {r} does not divide ref_resolution {self.ref_resolution}"
                )
        if self.ref_resolution <= res[-1]:
            raise ValueError("ref_resolution must exceed every study resolution")
        if self.samples < 1:
            raise ValueError("samples must be positive")
        if not 0 <= self.master_seed < 2 ** 64:
            raise ValueError("master_seed must fit in an unsigned 64-bit integer")
        if abs(self.horizon_T - self.params.horizon_T) > 1e-12 * self.horizon_T:
            raise ValueError("horizon_T must match params.horizon_T")


@dataclass(frozen=True)
class ErrorPoint:
    resolution: int
    rms_error: float
    mc_std_error: float


@dataclass(frozen=True)
class ErrorReport:
    """Per-resolution strong errors with the fitted convergence slope."""

    mode: str
    samples: int
    ref_resolution: int
    points: tuple[ErrorPoint, ...]
    fitted_slope: float
    fit_residual: float


def resolution_pair(mode: str, resolution: int, ref_resolution: int) -> tuple[int, int]:
    """(n_modes, n_steps) of the coarse path for one study resolution."""
    if mode == "joint":
        return resolution, resolution
    if mode == "spatial":
        return resolution, ref_resolution
    if mode == "temporal":
        return ref_resolution, resolution
    raise ValueError(f"unknown mode {mode!r}")


def coupled_terminal(params: ModelParams, realization: NoiseRealization,
                     n_modes: int, n_steps: int) -> np.ndarray:
    """Terminal coefficients of a path driven by the shared noise realization."""
    inc = realization.increments(n_modes, n_steps)
    return simulate_path(params, n_modes, n_steps, inc,
                         sample_index=realization.sample_index).terminal.coeffs


def sample_squared_errors(config: RunConfig, sample_index: int) -> np.ndarray:
    """Squared coupled errors of one sample, one entry per study resolution."""
    ref = config.ref_resolution
    grid = NoiseGrid.for_horizon(config.horizon_T, m_fine=ref, n_modes=ref)
    realization = NoiseRealization(grid, config.master_seed, sample_index)
    reference = coupled_terminal(config.params, realization, ref, ref)
    out = np.empty(len(config.resolutions))
    for j, r in enumerate(config.resolutions):
        n_modes, n_steps = resolution_pair(config.mode, r, ref)
        coarse = coupled_terminal(config.params, realization, n_modes, n_steps)
        diff = reference.copy()
        diff[:n_modes] -= coarse
        out[j] = float(diff @ diff)
    return out


def _study_worker(config: RunConfig, sample_index: int) -> np.ndarray:
    try:
        return sample_squared_errors(config, sample_index)
    except BlowupError as exc:
        raise BlowupError(
            f"sample {sample_index} blew up: {exc}",
            step_index=exc.step_index, sample_index=sample_index,
        ) from exc


def strong_error_study(config: RunConfig, threads: int = 1) -> ErrorReport:
    """Estimate strong errors across the resolution ladder.

    Samples are independent work units; with threads > 1 they are simulated
    in worker processes, but partial sums are always reduced in ascending
    sample order, so the report does not depend on the degree of
    parallelism.
    """
    squared = np.empty((config.samples, len(config.resolutions)))
    if threads <= 1:
        for s in range(config.samples):
            squared[s] = _study_worker(config, s)
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            chunk = max(1, config.samples // (threads * 8))
            results = pool.map(_study_worker, [config] * config.samples,
                               range(config.samples), chunksize=chunk)
            for s, row in enumerate(results):
                squared[s] = row

    mean_sq = squared.mean(axis=0)
    rms = np.sqrt(mean_sq)
    if config.samples > 1:
        se_mean = squared.std(axis=0, ddof=1) / np.sqrt(config.samples)
    else:
        se_mean = np.zeros_like(mean_sq)
    # Delta method: d sqrt(m) / d m = 1 / (2 sqrt(m)).
    se_rms = np.divide(se_mean, 2.0 * rms, out=np.zeros_like(rms), where=rms > 0)

    points = tuple(
        ErrorPoint(resolution=r, rms_error=float(rms[j]), mc_std_error=float(se_rms[j]))
        for j, r in enumerate(config.resolutions)
    )
    slope, residual = fit_slope([(p.resolution, p.rms_error) for p in points])
    return ErrorReport(mode=config.mode, samples=config.samples,
                       ref_resolution=config.ref_resolution, points=points,
                       fitted_slope=slope, fit_residual=residual)


def fit_slope(points: Sequence[tuple[float, float]]) -> tuple[float, float]:
    """Least-squares slope of log2(error) against log2(1 / resolution).

    Returns (slope, rms_residual); a positive slope means the error decays
    with the resolution.
    """
    if len(points) < 2:
        raise ValueError("slope fit needs at least two points")
    res = np.array([p[0] for p in points], dtype=np.float64)
    err = np.array([p[1] for p in points], dtype=np.float64)
    if np.any(res <= 0) or np.any(err <= 0):
        raise ValueError("resolutions and errors must be positive")
    x = -np.log2(res)
    y = np.log2(err)
    dx = x - x.mean()
    dy = y - y.mean()
    slope = float(dx @ dy / (dx @ dx))
    residual = float(np.sqrt(np.mean((dy - slope * dx) ** 2)))
    return slope, residual


@dataclass(frozen=True)
class MomentDiagnostics:
    """Path-norm statistics of one (n_modes, n_steps) configuration."""

    resolution: int
    n_steps: int
    tau: float
    samples: int
    sup_max: float
    sup_mean: float
    sup_p99: float
    l2_max: float
    l2_mean: float
    l2_p99: float
    max_drift_norm: float
    blowups: int
    all_finite: bool


def moment_diagnostics(config: RunConfig, n_steps: int | None = None, *,
                       tamed: bool = True, with_noise: bool = True,
                       ) -> tuple[MomentDiagnostics, ...]:
    """Record sup-norm and L2 statistics over samples and steps.

    Runs one joint-style path per sample at every study resolution
    (n_steps overrides the step count, e.g. to probe large step sizes).
    Blown-up paths are counted rather than propagated, so an untamed run
    reports how many samples diverged.
    """
    reports = []
    for r in config.resolutions:
        steps = n_steps if n_steps is not None else r
        tau = config.horizon_T / steps
        sup_vals: list[float] = []
        l2_vals: list[float] = []
        max_drift = 0.0
        blowups = 0

        def watch(step_index: int, coeffs: np.ndarray, drift: np.ndarray):
            nonlocal max_drift
            fld = SpectralField(coeffs)
            sup_vals.append(sup_norm_estimate(fld))
            l2_vals.append(l2_norm(fld))
            max_drift = max(max_drift, float(np.linalg.norm(drift)))

        for s in range(config.samples):
            if with_noise:
                grid = NoiseGrid.for_horizon(config.horizon_T, steps, r)
                inc = NoiseRealization(grid, config.master_seed, s).increments(r, steps)
            else:
                inc = None
            try:
                simulate_path(config.params, r, steps, inc, tamed=tamed,
                              sample_index=s, observer=watch)
            except BlowupError:
                blowups += 1
        sup = np.array(sup_vals) if sup_vals else np.zeros(1)
        l2 = np.array(l2_vals) if l2_vals else np.zeros(1)
        reports.append(MomentDiagnostics(
            resolution=r, n_steps=steps, tau=tau, samples=config.samples,
            sup_max=float(sup.max()), sup_mean=float(sup.mean()),
            sup_p99=float(np.percentile(sup, 99)),
            l2_max=float(l2.max()), l2_mean=float(l2.mean()),
            l2_p99=float(np.percentile(l2, 99)),
            max_drift_norm=max_drift, blowups=blowups,
            all_finite=bool(np.all(np.isfinite(sup)) and np.all(np.isfinite(l2))),
        ))
    return tuple(reports)
