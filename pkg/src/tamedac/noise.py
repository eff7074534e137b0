"""Exact sampling of mode-wise stochastic convolution increments.

Each eigenmode of the cylindrical Wiener process contributes an independent
Gaussian increment over a step [t, t + tau] with variance
(1 - exp(-2 lambda_i tau)) / (2 lambda_i).  Variates come from
counter-keyed Philox streams, so a value is a pure function of
(master_seed, sample_index, fine_step_index, mode_index): no state is
shared, any draw can be reproduced in isolation, and coarse and fine
resolutions can consume the same underlying randomness without storing it.

Coarse increments are derived from fine ones exactly: splitting
[t_a, t_b] into fine substeps,

    conv[t_a, t_b] = sum_k exp(-lambda (t_b - t_{k+1})) * conv[t_k, t_{k+1}],

an identity of the integral, not an approximation.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.random import Generator, Philox

from .errors import AlignmentError, ResolutionError
from .spectral import eigenvalue, eigenvalues

_U64_MAX = 2 ** 64 - 1
_ALIGN_RTOL = 1e-9


@dataclass(frozen=True)
class NoiseKey:
    """Address of one standard normal variate in the keyed noise space."""

    master_seed: int
    sample_index: int
    mode_index: int
    fine_step_index: int

    def __post_init__(self):
        if not 0 <= self.master_seed <= _U64_MAX:
            raise ValueError("master_seed must fit in an unsigned 64-bit integer")
        if not 0 <= self.sample_index <= _U64_MAX:
            raise ValueError("sample_index must be a nonnegative 64-bit integer")
        if self.mode_index < 1:
            raise ValueError(f"mode_index must be >= 1, got {self.mode_index}")
        if self.fine_step_index < 0:
            raise ValueError("fine_step_index must be nonnegative")


@dataclass(frozen=True)
class NoiseGrid:
    """Finest resolution at which increments are sampled."""

    n_modes: int
    m_fine: int
    tau_fine: float

    def __post_init__(self):
        if self.n_modes < 1 or self.m_fine < 1:
            raise ValueError("n_modes and m_fine must be positive")
        if not (self.tau_fine > 0 and np.isfinite(self.tau_fine)):
            raise ValueError(f"tau_fine must be positive and finite, got {self.tau_fine}")

    @property
    def horizon(self) -> float:
        return self.tau_fine * self.m_fine

    @classmethod
    def for_horizon(cls, horizon: float, m_fine: int, n_modes: int) -> "NoiseGrid":
        if horizon <= 0:
            raise ValueError(f"horizon must be positive, got {horizon}")
        return cls(n_modes=n_modes, m_fine=m_fine, tau_fine=horizon / m_fine)


def increment_variance(mode_index: int, tau: float) -> float:
    """Variance (1 - exp(-2 lambda_i tau)) / (2 lambda_i) of one increment.

    Written as tau * (1 - e^{-x}) / x with x = 2 lambda_i tau, which is
    stable for x -> 0 and bounded by min(tau, 1 / (2 lambda_i)).
    """
    if tau <= 0:
        raise ValueError(f"tau must be positive, got {tau}")
    x = 2.0 * eigenvalue(mode_index) * tau
    return float(tau * (-np.expm1(-x) / x))


def increment_variances(n_modes: int, tau: float) -> np.ndarray:
    if tau <= 0:
        raise ValueError(f"tau must be positive, got {tau}")
    x = 2.0 * eigenvalues(n_modes) * tau
    return tau * (-np.expm1(-x) / x)


def step_normals(master_seed: int, sample_index: int, fine_step_index: int,
                 count: int) -> np.ndarray:
    """First `count` standard normals of the stream keyed by (seed, sample, step).

    Streams for different steps live in disjoint counter blocks, and the
    first k values of a stream do not depend on how many are requested, so
    mode i always maps to entry i - 1 regardless of the resolution in use.
    """
    bg = Philox(key=[master_seed, sample_index],
                counter=int(fine_step_index) << 64)
    return Generator(bg).standard_normal(count)


def sample_fine_increment(key: NoiseKey, grid: NoiseGrid) -> float:
    """One stochastic convolution increment over a fine step; bit repeatable."""
    if key.mode_index > grid.n_modes:
        raise ValueError(
            f"mode {key.mode_index} outside grid with {grid.n_modes} modes"
        )
    if key.fine_step_index >= grid.m_fine:
        raise ValueError(
            f"step {key.fine_step_index} outside grid with {grid.m_fine} steps"
        )
    z = step_normals(key.master_seed, key.sample_index, key.fine_step_index,
                     key.mode_index)[-1]
    return float(np.sqrt(increment_variance(key.mode_index, grid.tau_fine)) * z)


def convolution_weights(lam: float | np.ndarray, n_sub: int, tau_fine: float):
    """Weights exp(-lambda tau_f (R - 1 - j)) of the split-interval identity."""
    ages = np.arange(n_sub - 1, -1, -1, dtype=np.float64) * tau_fine
    return np.exp(-np.multiply.outer(ages, lam))


def aggregate_fine_increments(mode_index: int, fine_increments,
                              tau_fine: float) -> float:
    """Exact coarse increment from the fine increments covering one interval."""
    inc = np.asarray(fine_increments, dtype=np.float64)
    w = convolution_weights(eigenvalue(mode_index), inc.shape[0], tau_fine)
    return float(w @ inc)


def _fine_index(t: float, grid: NoiseGrid, what: str) -> int:
    ratio = t / grid.tau_fine
    idx = int(round(ratio))
    if abs(ratio - idx) > _ALIGN_RTOL * max(1.0, abs(ratio)):
        raise AlignmentError(f"{what}={t} is not aligned to the fine grid")
    return idx


def aggregate_to_coarse(mode_index: int, t_start: float, t_end: float,
                        grid: NoiseGrid, master_seed: int,
                        sample_index: int) -> float:
    """Sample the convolution increment over a fine-aligned coarse interval."""
    a = _fine_index(t_start, grid, "t_start")
    b = _fine_index(t_end, grid, "t_end")
    if b <= a:
        raise AlignmentError("t_end must exceed t_start by a multiple of tau_fine")
    if a < 0 or b > grid.m_fine:
        raise AlignmentError("interval extends outside the fine grid")
    fine = [
        sample_fine_increment(
            NoiseKey(master_seed, sample_index, mode_index, k), grid
        )
        for k in range(a, b)
    ]
    return aggregate_fine_increments(mode_index, fine, grid.tau_fine)


class NoiseRealization:
    """All fine increments of one Monte Carlo sample, plus exact coarsening.

    The full (m_fine, n_modes) increment matrix is materialized lazily and
    reused by every resolution that shares the sample, which is what makes
    the coupled error of a coarse path against the reference pathwise
    meaningful.
    """

    def __init__(self, grid: NoiseGrid, master_seed: int, sample_index: int):
        self.grid = grid
        self.master_seed = int(master_seed)
        self.sample_index = int(sample_index)

    @cached_property
    def fine_matrix(self) -> np.ndarray:
        """Increments at the finest resolution, shape (m_fine, n_modes)."""
        g = self.grid
        sig = np.sqrt(increment_variances(g.n_modes, g.tau_fine))
        out = np.empty((g.m_fine, g.n_modes))
        for m in range(g.m_fine):
            out[m] = step_normals(self.master_seed, self.sample_index, m, g.n_modes)
        out *= sig
        return out

    def increments(self, n_modes: int, n_steps: int) -> np.ndarray:
        """Increment matrix for a path at (n_modes, n_steps), shape (M, N)."""
        g = self.grid
        if n_modes > g.n_modes:
            raise ResolutionError(
                f"requested {n_modes} modes from a grid carrying {g.n_modes}"
            )
        if n_steps < 1 or g.m_fine % n_steps != 0:
            raise AlignmentError(
                f"step count {n_steps} does not divide the fine count {g.m_fine}"
            )
        sub_per_step = g.m_fine // n_steps
        fine = self.fine_matrix[:, :n_modes]
        if sub_per_step == 1:
            return fine.copy()
        w = convolution_weights(eigenvalues(n_modes), sub_per_step, g.tau_fine)
        blocks = fine.reshape(n_steps, sub_per_step, n_modes)
        return np.einsum("srn,rn->sn", blocks, w, optimize=True)
