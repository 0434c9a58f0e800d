"""Exact Gaussian process regression with the squared-exponential kernel.

This module is the ground truth for everything else in the package: the
kernel, its spectral density, and the dense GP posterior computed through a
symmetric positive-definite factorization. Inputs may live in any dimension
even though the bundled experiment is one-dimensional.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class KernelHyper:
    """Hyperparameters of the squared-exponential kernel plus observation noise.

    Attributes
    ----------
    signal_std : float
        Amplitude of the kernel; the prior standard deviation of the latent
        function. Must be positive.
    length_scale : float
        Length scale of the kernel. Must be positive.
    noise_std : float
        Standard deviation of the additive observation noise. Nonnegative.
    """

    signal_std: float
    length_scale: float
    noise_std: float

    def __post_init__(self):
        if not (np.isfinite(self.signal_std) and self.signal_std > 0):
            raise ValueError(f"signal_std must be positive, got {self.signal_std}")
        if not (np.isfinite(self.length_scale) and self.length_scale > 0):
            raise ValueError(f"length_scale must be positive, got {self.length_scale}")
        if not (np.isfinite(self.noise_std) and self.noise_std >= 0):
            raise ValueError(f"noise_std must be nonnegative, got {self.noise_std}")


@dataclass(frozen=True)
class Dataset:
    """Observed inputs and noisy targets.

    ``inputs`` has shape (N, d) and ``targets`` shape (N,); both must be
    finite and of matching length.
    """

    inputs: np.ndarray
    targets: np.ndarray

    def __post_init__(self):
        inputs = np.atleast_2d(np.asarray(self.inputs, dtype=float))
        targets = np.asarray(self.targets, dtype=float).ravel()
        if inputs.shape[0] != targets.shape[0]:
            raise ValueError(
                f"inputs ({inputs.shape[0]}) and targets ({targets.shape[0]}) disagree in length"
            )
        if inputs.shape[0] < 1:
            raise ValueError("dataset must contain at least one point")
        if not np.isfinite(inputs).all() or not np.isfinite(targets).all():
            raise ValueError("dataset contains non-finite values")
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "targets", targets)

    @property
    def n_points(self) -> int:
        return self.inputs.shape[0]

    @property
    def dim(self) -> int:
        return self.inputs.shape[1]


@dataclass(frozen=True)
class Posterior:
    """Predictive mean and variance at a single query point."""

    mean: float
    variance: float

    def __post_init__(self):
        if self.variance < 0:
            raise ValueError(f"negative posterior variance {self.variance}")


def _as_point(x, name: str = "x") -> np.ndarray:
    x = np.asarray(x, dtype=float).ravel()
    if not np.isfinite(x).all():
        raise ValueError(f"{name} contains non-finite values")
    return x


def rbf_kernel(xi, xj, h: KernelHyper) -> float:
    """Squared-exponential kernel value between two points.

    Returns ``signal_std**2 * exp(-||xi - xj||^2 / (2 * length_scale**2))``;
    symmetric in its arguments and bounded by ``signal_std**2``.
    """
    xi = _as_point(xi, "xi")
    xj = _as_point(xj, "xj")
    if xi.shape != xj.shape:
        raise ValueError(f"point dimensions disagree: {xi.shape} vs {xj.shape}")
    sq = float(np.sum((xi - xj) ** 2))
    return h.signal_std**2 * float(np.exp(-0.5 * sq / h.length_scale**2))


def gram_matrix(points, h: KernelHyper) -> np.ndarray:
    """Kernel matrix over a set of points, shape (N, N).

    Symmetric with ``signal_std**2`` on the diagonal; positive semi-definite
    up to numerical tolerance.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if not np.isfinite(pts).all():
        raise ValueError("points contain non-finite values")
    sq = np.sum((pts[:, None, :] - pts[None, :, :]) ** 2, axis=-1)
    K = h.signal_std**2 * np.exp(-0.5 * sq / h.length_scale**2)
    # exact symmetry regardless of floating-point summation order
    return 0.5 * (K + K.T)


def spectral_density(omega, h: KernelHyper) -> float:
    """Spectral density of the squared-exponential kernel at angular frequency ``omega``.

    Normalized so that integrating against ``(2*pi)**-d * domega`` recovers
    the kernel at lag zero, i.e. ``signal_std**2``.
    """
    w = _as_point(omega, "omega")
    d = w.size
    l2 = h.length_scale**2
    return (
        h.signal_std**2
        * float((2.0 * np.pi * l2) ** (d / 2.0))
        * float(np.exp(-0.5 * l2 * np.sum(w**2)))
    )


def _solve_spd(K: np.ndarray, h: KernelHyper, rhs: np.ndarray) -> np.ndarray:
    """Solve (K + noise) system via Cholesky, with a logged one-shot jitter retry."""
    A = K + h.noise_std**2 * np.eye(K.shape[0])
    try:
        factor = cho_factor(A, lower=True)
    except LinAlgError:
        jitter = 1e-10 * h.signal_std**2
        logger.warning(
            "Cholesky of (K + noise) failed; retrying with diagonal jitter %.3e", jitter
        )
        try:
            factor = cho_factor(A + jitter * np.eye(K.shape[0]), lower=True)
        except LinAlgError as exc:
            raise np.linalg.LinAlgError(
                "kernel system is singular even after jitter; "
                "duplicate inputs with zero noise_std?"
            ) from exc
    return cho_solve(factor, rhs)


def exact_posterior(ds: Dataset, h: KernelHyper, x_star) -> Posterior:
    """Dense GP posterior at ``x_star``.

    mean = k*^T (K + noise_std^2 I)^{-1} y
    variance = k(x*, x*) - k*^T (K + noise_std^2 I)^{-1} k*
    """
    xs = _as_point(x_star, "x_star")
    if xs.size != ds.dim:
        raise ValueError(f"query dimension {xs.size} != dataset dimension {ds.dim}")
    K = gram_matrix(ds.inputs, h)
    k_star = np.array([rbf_kernel(xs, xi, h) for xi in ds.inputs])
    rhs = np.column_stack([ds.targets, k_star])
    sol = _solve_spd(K, h, rhs)
    mean = float(k_star @ sol[:, 0])
    variance = float(rbf_kernel(xs, xs, h) - k_star @ sol[:, 1])
    # numerical round-off can leave a tiny negative residue
    return Posterior(mean=mean, variance=max(variance, 0.0))
