"""Random Fourier feature approximation of the squared-exponential kernel.

Frequencies are sampled from the kernel's normalized spectrum, features are
interleaved cos/sin pairs evaluated at ``2*pi*s.x``, and the scaled design
matrix carries the ``signal_std**2 / M`` kernel prefactor so that
``X^T X`` approximates the Gram matrix directly. The reduced-rank posterior
is evaluated in SVD form and is the classical twin of the quantum pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernel import Dataset, KernelHyper, Posterior, _as_point

#: singular values below this fraction of the largest are dropped from the rank
RANK_CUTOFF = 1e-12


@dataclass(frozen=True)
class FrequencySet:
    """Spectral frequencies, shape (M, d), plus the seed that regenerates them."""

    frequencies: np.ndarray
    seed: int

    def __post_init__(self):
        freq = np.atleast_2d(np.asarray(self.frequencies, dtype=float))
        if freq.shape[0] < 1:
            raise ValueError("need at least one frequency")
        if not np.isfinite(freq).all():
            raise ValueError("frequencies contain non-finite values")
        object.__setattr__(self, "frequencies", freq)

    @property
    def n_frequencies(self) -> int:
        return self.frequencies.shape[0]

    @property
    def dim(self) -> int:
        return self.frequencies.shape[1]


@dataclass(frozen=True)
class FeatureModel:
    """Scaled design matrix (N x 2M) together with its thin SVD.

    ``design[i] = sqrt(signal_std**2 / M) * feature_map(x_i)``, columns
    alternating cos/sin per frequency. ``u, singular_values, v`` hold the
    rank-truncated SVD with ``v`` of shape (2M, R).
    """

    freq: FrequencySet
    design: np.ndarray
    frobenius_norm: float
    u: np.ndarray
    singular_values: np.ndarray
    v: np.ndarray

    @property
    def rank(self) -> int:
        return self.singular_values.size

    @property
    def normalized_singular_values(self) -> np.ndarray:
        """Singular values of design / frobenius_norm; their squares sum to <= 1."""
        return self.singular_values / self.frobenius_norm


def sample_frequencies(M: int, h: KernelHyper, d: int, seed: int) -> FrequencySet:
    """Draw M i.i.d. frequencies from the normalized kernel spectrum.

    In the ``2*pi*s.x`` feature convention each coordinate is
    Normal(0, (1 / (2*pi*length_scale))**2). Deterministic given the seed.
    """
    if M < 1:
        raise ValueError(f"M must be >= 1, got {M}")
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    rng = np.random.default_rng(seed)
    scale = 1.0 / (2.0 * np.pi * h.length_scale)
    freq = rng.normal(0.0, scale, size=(M, d))
    return FrequencySet(frequencies=freq, seed=seed)


def feature_map(x, freq: FrequencySet) -> np.ndarray:
    """Unscaled feature vector (cos, sin interleaved), length 2M, norm sqrt(M)."""
    xv = _as_point(x)
    if xv.size != freq.dim:
        raise ValueError(f"point dimension {xv.size} != frequency dimension {freq.dim}")
    phase = 2.0 * np.pi * (freq.frequencies @ xv)
    out = np.empty(2 * freq.n_frequencies)
    out[0::2] = np.cos(phase)
    out[1::2] = np.sin(phase)
    return out


def scaled_feature_vector(x, freq: FrequencySet, h: KernelHyper) -> np.ndarray:
    """Feature vector carrying the kernel prefactor: sqrt(signal_std**2 / M) * phi(x)."""
    return np.sqrt(h.signal_std**2 / freq.n_frequencies) * feature_map(x, freq)


def build_feature_model(ds: Dataset, freq: FrequencySet, h: KernelHyper) -> FeatureModel:
    """Assemble the scaled design matrix and its rank-truncated SVD."""
    if ds.dim != freq.dim:
        raise ValueError(f"dataset dimension {ds.dim} != frequency dimension {freq.dim}")
    X = np.array([scaled_feature_vector(x, freq, h) for x in ds.inputs])
    fro = float(np.linalg.norm(X))
    if fro == 0.0:
        # unreachable for cos-leading features; guards future kernels
        raise ValueError("design matrix is identically zero")
    u, s, vt = np.linalg.svd(X, full_matrices=False)
    rank = int(np.sum(s > RANK_CUTOFF * s[0]))
    return FeatureModel(
        freq=freq,
        design=X,
        frobenius_norm=fro,
        u=u[:, :rank],
        singular_values=s[:rank],
        v=vt[:rank].T,
    )


def rff_posterior(fm: FeatureModel, y, x_star, h: KernelHyper) -> Posterior:
    """Reduced-rank posterior at ``x_star`` via the spectral sum.

    mean      = sum_r lam_r / (lam_r^2 + noise^2) * (phi*^T v_r) (u_r^T y)
    variance  = noise^2 * sum_r (phi*^T v_r)^2 / (lam_r^2 + noise^2)
                + ||phi* orthogonal to span(v)||^2

    The trailing term accounts for the feature-space null space so the result
    matches the direct weight-space solve of (X^T X + noise^2 I).
    """
    y = np.asarray(y, dtype=float).ravel()
    if y.shape[0] != fm.design.shape[0]:
        raise ValueError(f"target length {y.shape[0]} != design rows {fm.design.shape[0]}")
    if h.noise_std == 0.0 and fm.rank < fm.design.shape[1]:
        raise np.linalg.LinAlgError(
            "rank-deficient design with zero noise_std: posterior is singular"
        )
    phi_star = scaled_feature_vector(x_star, fm.freq, h)
    pv = fm.v.T @ phi_star
    uy = fm.u.T @ y
    lam = fm.singular_values
    denom = lam**2 + h.noise_std**2
    mean = float(np.sum(lam / denom * pv * uy))
    null_sq = float(phi_star @ phi_star - pv @ pv)
    variance = float(h.noise_std**2 * np.sum(pv**2 / denom)) + max(null_sq, 0.0)
    return Posterior(mean=mean, variance=max(variance, 0.0))
