"""Closed-form predictions for the phase-estimation pipeline.

Everything here is derived analytically from the classical SVD of the design
matrix and the exact phase-estimation bin distribution; no statevector is
ever constructed, so these values are an independent check on the simulated
pipeline.
"""

from __future__ import annotations

import numpy as np


def qpe_bin_weights(theta: float, tau: int) -> np.ndarray:
    """Probability of each phase-register value for eigenphase ``theta``.

    Fejer-kernel form: w_b = (sin(pi T d) / (T sin(pi d)))^2 with
    d = theta - b/T and T = 2^tau; a Kronecker delta at exact bins.
    """
    T = 1 << tau
    delta = theta - np.arange(T) / T
    den = T * np.sin(np.pi * delta)
    with np.errstate(divide="ignore", invalid="ignore"):
        w = (np.sin(np.pi * T * delta) / den) ** 2
    return np.where(np.abs(np.sin(np.pi * delta)) < 1e-14, 1.0, w)


class BinnedPrediction:
    """Spectral-sum posterior and acceptance probabilities with binned eigenvalues."""

    def __init__(self, fm, noise_std: float, delta_r: float, tau: int):
        self.fm = fm
        self.tau = tau
        self.delta_r = delta_r
        fro = fm.frobenius_norm
        self.lam_t = np.asarray(fm.singular_values) / fro
        lam_t2 = self.lam_t**2
        self.sigma_t2 = noise_std**2 / fro**2
        self.noise_std = noise_std
        T = 1 << tau
        bins = np.round(lam_t2 / delta_r * T).astype(int)
        lam_hat2 = bins * delta_r / T
        self.c1 = float(np.min(lam_hat2 + self.sigma_t2))
        self.c2 = float(np.min(np.sqrt(lam_hat2 * (lam_hat2 + self.sigma_t2))))
        grid = np.arange(T) * delta_r / T
        with np.errstate(divide="ignore"):
            prof1 = np.minimum(1.0, self.c1 / (grid + self.sigma_t2))
            prof2 = np.minimum(1.0, self.c2 / np.sqrt(grid * (grid + self.sigma_t2)))
        prof1[0] = prof2[0] = 0.0
        self.weights = np.array([qpe_bin_weights(t2 / delta_r, tau) for t2 in lam_t2])
        self.mean_factor = self.weights @ prof1          # E[f1] per component
        self.mean_factor_sq = self.weights @ prof1**2    # E[f1^2]
        self.var_factor_sq = self.weights @ prof2**2     # E[f2^2]

    def p1(self) -> float:
        return float(np.sum(self.lam_t**2 * self.mean_factor_sq))

    def p2(self) -> float:
        return float(np.sum(self.lam_t**2 * self.var_factor_sq))

    def mean(self, phi_star: np.ndarray, y: np.ndarray) -> float:
        pv = self.fm.v.T @ phi_star
        uy = self.fm.u.T @ np.asarray(y, dtype=float)
        return float(
            np.sum(self.lam_t * self.mean_factor * pv * uy)
            / (self.c1 * self.fm.frobenius_norm)
        )

    def variance(self, phi_star: np.ndarray) -> float:
        pv = self.fm.v.T @ phi_star
        spectral = (
            self.noise_std**2
            / (self.c2**2 * self.fm.frobenius_norm**2)
            * np.sum(self.lam_t**2 * self.var_factor_sq * pv**2)
        )
        null_sq = max(float(phi_star @ phi_star - pv @ pv), 0.0)
        return float(spectral + null_sq)

    def modal_bins(self) -> np.ndarray:
        return np.round(self.lam_t**2 / self.delta_r * (1 << self.tau)).astype(int)
