"""End-to-end quantum estimation of the reduced-rank GP posterior.

Stages: encode the scaled design matrix as amplitudes over (column, row)
registers, extract the squared normalized singular values by phase estimation
of exp(i * rho * t) with rho the column-register reduced density operator,
rotate a flag qubit by an eigenvalue-conditioned inversion profile,
post-select, un-compute the phase register, and read posterior quantities off
overlap circuits.

All amplitudes are normalized by the design's Frobenius norm, so classical
scale recovery multiplies estimated overlaps back by the Frobenius norm, the
target norm, the query feature norm, the flag acceptance probability, and the
inversion bound; the recovered numbers equal the classical spectral-sum
posterior evaluated with bin-discretized eigenvalues.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import qsim
from .errors import ConfigError, PostSelectionError
from .kernel import KernelHyper, _as_point
from .qsim import GateOp, Statevector
from .rff import FeatureModel, scaled_feature_vector

#: default headroom of the phase-window parameter over the top squared singular value
DELTA_R_HEADROOM = 1.05


@dataclass(frozen=True)
class PipelineConfig:
    """Settings for one quantum posterior run.

    ``shots=0`` (or mode "exact") reads exact amplitudes; in sampled mode the
    accepted-shot count is drawn binomially from the exact acceptance
    probability and the overlap tests are sampled with the accepted shots.
    """

    tau: int
    shots: int = 0
    mode: str = "exact"
    delta_r: float | None = None
    seed: int | None = None

    def __post_init__(self):
        if self.mode not in ("exact", "sampled"):
            raise ConfigError(f"mode must be 'exact' or 'sampled', got {self.mode!r}")
        if self.tau < 1:
            raise ConfigError(f"tau must be >= 1, got {self.tau}")
        if self.mode == "sampled" and self.shots < 1:
            raise ConfigError("sampled mode requires shots >= 1")
        if self.delta_r is not None and self.delta_r <= 0:
            raise ConfigError(f"delta_r must be positive, got {self.delta_r}")

    @property
    def effective_shots(self) -> int:
        return 0 if self.mode == "exact" else self.shots


@dataclass(frozen=True)
class EncodingPlan:
    """Angle schedule turning a design matrix into register amplitudes.

    One rotation per (row, frequency) pair; the pattern runs over the row
    qubits then the frequency-pair qubits, and the rotation targets the
    cos/sin qubit (lowest column bit).
    """

    n_row_qubits: int
    n_col_qubits: int
    padded_rows: int
    padded_cols: int
    row_count: int
    freq_count: int
    angle_schedule: tuple[tuple[tuple[int, ...], float], ...]
    frobenius_norm: float


@dataclass(frozen=True)
class SpectralRegisters:
    """Statevector after phase estimation, plus the parameters that shaped it."""

    sv: Statevector
    unitary: np.ndarray = field(repr=False)
    tau: int
    delta_r: float
    t: float


@dataclass(frozen=True)
class InversionConstants:
    """Bounds and scale factors for the eigenvalue-conditioned rotations.

    ``c1 / (lam^2 + sigma^2)`` and ``c2 / (lam * sqrt(lam^2 + sigma^2))`` stay
    within [0, 1] for every retained bin-decoded eigenvalue; both constants
    cancel out of the recovered posterior, so only boundedness matters.
    """

    c1: float
    c2: float
    sigma_tilde_sq: float
    delta_r: float
    tau: int
    bins: tuple[int, ...]

    @classmethod
    def from_feature_model(
        cls, fm: FeatureModel, noise_std: float, delta_r: float, tau: int
    ) -> InversionConstants:
        lam_t2 = fm.normalized_singular_values**2
        if delta_r <= lam_t2[0]:
            raise ConfigError(
                f"delta_r={delta_r:.6g} must exceed the top squared normalized "
                f"singular value {lam_t2[0]:.6g} (phase wraparound)"
            )
        st2 = noise_std**2 / fm.frobenius_norm**2
        bins = np.round(lam_t2 / delta_r * (1 << tau)).astype(int)
        if (bins == 0).any():
            raise ConfigError(
                "a retained singular value decodes to eigenvalue bin 0; "
                "increase tau or decrease delta_r"
            )
        lam_hat2 = bins * delta_r / (1 << tau)
        c1 = float(np.min(lam_hat2 + st2))
        c2 = float(np.min(np.sqrt(lam_hat2) * np.sqrt(lam_hat2 + st2)))
        return cls(
            c1=c1,
            c2=c2,
            sigma_tilde_sq=st2,
            delta_r=delta_r,
            tau=tau,
            bins=tuple(int(b) for b in bins),
        )

    def decoded_eigenvalue_sq(self, bin_value: int) -> float:
        return bin_value * self.delta_r / (1 << self.tau)

    def mean_rotation_profile(self) -> np.ndarray:
        """Flag-qubit |1> amplitude per phase-register value (mean branch)."""
        lam_hat2 = np.arange(1 << self.tau) * self.delta_r / (1 << self.tau)
        with np.errstate(divide="ignore"):
            prof = np.minimum(1.0, self.c1 / (lam_hat2 + self.sigma_tilde_sq))
        prof[0] = 0.0  # below-resolution bins are excluded from the inversion
        return prof

    def variance_rotation_profile(self) -> np.ndarray:
        """Flag-qubit |1> amplitude per phase-register value (variance branch)."""
        lam_hat2 = np.arange(1 << self.tau) * self.delta_r / (1 << self.tau)
        with np.errstate(divide="ignore"):
            prof = np.minimum(
                1.0, self.c2 / np.sqrt(lam_hat2 * (lam_hat2 + self.sigma_tilde_sq))
            )
        prof[0] = 0.0
        return prof


@dataclass(frozen=True)
class PosteriorEstimate:
    """One branch of the quantum posterior with estimator bookkeeping."""

    mean: float | None
    variance: float | None
    p1: float | None
    p2: float | None
    shots_used: int
    mode: str
    diagnostics: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# encoding
# ---------------------------------------------------------------------------


def plan_encoding(fm: FeatureModel) -> EncodingPlan:
    """Derive the rotation schedule from the design matrix.

    Angles are read back from each (cos, sin) pair, which reproduces the
    original feature phases modulo 2*pi and keeps the plan self-contained.
    """
    n_rows, n_cols = fm.design.shape
    m_freq = fm.freq.n_frequencies
    n_row_qubits = max(int(np.ceil(np.log2(n_rows))), 0)
    n_col_qubits = int(np.ceil(np.log2(n_cols)))
    pair_qubits = n_col_qubits - 1
    schedule = []
    for j in range(n_rows):
        for r in range(m_freq):
            theta = float(np.arctan2(fm.design[j, 2 * r + 1], fm.design[j, 2 * r]))
            pattern = [(j >> b) & 1 for b in range(n_row_qubits)]
            pattern += [(r >> b) & 1 for b in range(pair_qubits)]
            schedule.append((tuple(pattern), theta))
    return EncodingPlan(
        n_row_qubits=n_row_qubits,
        n_col_qubits=n_col_qubits,
        padded_rows=1 << n_row_qubits,
        padded_cols=1 << n_col_qubits,
        row_count=n_rows,
        freq_count=m_freq,
        angle_schedule=tuple(schedule),
        frobenius_norm=fm.frobenius_norm,
    )


def prepare_data_state(plan: EncodingPlan) -> Statevector:
    """Deterministically prepare the normalized design matrix as amplitudes.

    Registers: ``row`` (low bits) and ``col``; the amplitude at column m,
    row j equals ``design[j, m] / frobenius_norm``, zero on padding.
    """
    if plan.row_count * plan.freq_count == 0:
        raise ValueError("empty encoding plan")
    sv = Statevector.zero([("row", plan.n_row_qubits), ("col", plan.n_col_qubits)])
    row_qubits = sv.register("row").qubits()
    col = sv.register("col")
    trig_qubit = col.offset
    pair_qubits = col.qubits()[1:]
    ops = qsim.uniform_prep_ops(plan.row_count, row_qubits)
    ops += qsim.uniform_prep_ops(plan.freq_count, pair_qubits)
    controls = row_qubits + pair_qubits
    for pattern, theta in plan.angle_schedule:
        if theta == 0.0:
            continue
        ops.append(GateOp.multi_controlled_ry(theta, trig_qubit, controls, pattern))
    return qsim.apply_circuit(sv, ops)


# ---------------------------------------------------------------------------
# spectral extraction and inversion
# ---------------------------------------------------------------------------


def default_delta_r(fm: FeatureModel) -> float:
    return DELTA_R_HEADROOM * float(fm.normalized_singular_values[0] ** 2)


def spectral_extraction(
    sv: Statevector, fm: FeatureModel, tau: int, delta_r: float
) -> SpectralRegisters:
    """Phase-estimate the column-register density operator.

    Appends the ``phase`` register; eigenvalue mass concentrates on bins near
    ``round(lam_tilde^2 * 2^tau / delta_r)``.
    """
    lam_max2 = float(fm.normalized_singular_values[0] ** 2)
    if delta_r <= lam_max2:
        raise ConfigError(
            f"delta_r={delta_r:.6g} must exceed the top squared normalized "
            f"singular value {lam_max2:.6g} (phase wraparound)"
        )
    rho = qsim.partial_trace(sv, "col")
    t = 2.0 * np.pi / delta_r
    # exp(+i*rho*t): eigenphases lam~^2/delta_r grow with the eigenvalue, so
    # the phase register decodes directly as lam_hat^2 = b * delta_r / 2^tau
    unitary = qsim.hermitian_exponential_unitary(rho, -t)
    out = qsim.qpe(sv, unitary, "col", tau, phase_register="phase")
    return SpectralRegisters(sv=out, unitary=unitary, tau=tau, delta_r=delta_r, t=t)


def _conditional_inversion(
    sr: SpectralRegisters, profile: np.ndarray
) -> tuple[Statevector, float]:
    """Rotate a flag qubit by the per-bin profile, post-select |1>, un-compute.

    Returns the renormalized state (still carrying the phase register, which
    the un-computation leaves approximately at |0>) and the exact acceptance
    probability.
    """
    sv = qsim.append_register(sr.sv, "flag", 1)
    flag = sv.register("flag").offset
    phase_qubits = sv.register("phase").qubits()
    tau = len(phase_qubits)
    ops = []
    for b in range(1 << tau):
        amp = profile[b]
        if amp == 0.0:
            continue
        pattern = [(b >> k) & 1 for k in range(tau)]
        ops.append(
            GateOp.multi_controlled_ry(float(np.arcsin(amp)), flag, phase_qubits, pattern)
        )
    sv = qsim.apply_circuit(sv, ops)
    sv, prob = qsim.postselect(sv, flag, 1)
    sv = qsim.drop_register(sv, "flag", 1)
    sv = qsim.inverse_qpe(sv, sr.unitary, "col", "phase")
    return sv, prob


def invert_for_mean(
    sr: SpectralRegisters, ic: InversionConstants
) -> tuple[Statevector, float]:
    """Apply the mean-branch inversion ``c1 / (lam_hat^2 + sigma~^2)``."""
    return _conditional_inversion(sr, ic.mean_rotation_profile())


def invert_for_variance(
    sr: SpectralRegisters, ic: InversionConstants
) -> tuple[Statevector, float]:
    """Apply the variance-branch inversion ``c2 / (lam_hat * sqrt(lam_hat^2 + sigma~^2))``."""
    return _conditional_inversion(sr, ic.variance_rotation_profile())


# ---------------------------------------------------------------------------
# posterior estimation
# ---------------------------------------------------------------------------


def _padded_unit(vec: np.ndarray, width: int) -> np.ndarray:
    out = np.zeros(1 << width, dtype=complex)
    out[: vec.size] = vec
    norm = np.linalg.norm(out)
    if norm == 0:
        raise ValueError("cannot normalize a zero vector")
    return out / norm


class PreparedPipeline:
    """Query-independent pipeline state, reusable across grid points.

    Runs encoding, phase estimation, and both inversion branches once; each
    posterior query then only pays for an overlap circuit.
    """

    def __init__(
        self,
        fm: FeatureModel,
        h: KernelHyper,
        tau: int,
        delta_r: float | None = None,
    ):
        self.fm = fm
        self.hyper = h
        self.tau = tau
        self.delta_r = default_delta_r(fm) if delta_r is None else delta_r
        self.plan = plan_encoding(fm)
        self.data_state = prepare_data_state(self.plan)
        self.spectral = spectral_extraction(self.data_state, fm, tau, self.delta_r)
        self.constants = InversionConstants.from_feature_model(
            fm, h.noise_std, self.delta_r, tau
        )
        self.mean_state, self.p1 = invert_for_mean(self.spectral, self.constants)
        self.variance_state, self.p2 = invert_for_variance(self.spectral, self.constants)

    # -- helpers -------------------------------------------------------------

    def _query_features(self, x_star) -> tuple[np.ndarray, float]:
        phi_star = scaled_feature_vector(
            _as_point(x_star, "x_star"), self.fm.freq, self.hyper
        )
        norm = float(np.linalg.norm(phi_star))
        if norm == 0:
            raise ValueError("query feature vector has zero norm")
        return phi_star, norm

    def _accepted_shots(self, prob: float, shots: int, rng) -> int:
        accepted = int(rng.binomial(shots, prob))
        if accepted == 0:
            raise PostSelectionError(
                f"no accepted shots out of {shots} at acceptance probability {prob:.3e}"
            )
        return accepted

    # -- queries --------------------------------------------------------------

    def mean_estimate(self, y, x_star, shots: int = 0, seed=None) -> PosteriorEstimate:
        y = np.asarray(y, dtype=float).ravel()
        y_norm = float(np.linalg.norm(y))
        if y_norm == 0:
            raise ValueError("targets must not be identically zero")
        phi_star, phi_norm = self._query_features(x_star)
        regs = self.mean_state.registers
        col_w = self.mean_state.register("col").width
        row_w = self.mean_state.register("row").width
        phase_dim = self.mean_state.register("phase").dim
        col_vec = _padded_unit(phi_star, col_w)
        row_vec = _padded_unit(y.astype(complex), row_w)
        phase_vec = np.zeros(phase_dim, dtype=complex)
        phase_vec[0] = 1.0
        reference = Statevector(
            amplitudes=np.kron(phase_vec, np.kron(col_vec, row_vec)), registers=regs
        )
        shots_used = 0
        if shots == 0:
            overlap = qsim.hadamard_test(self.mean_state, reference)
        else:
            rng = np.random.default_rng(seed)
            shots_used = self._accepted_shots(self.p1, shots, rng)
            overlap = qsim.hadamard_test(self.mean_state, reference, shots_used, rng)
        scale = (
            np.sqrt(self.p1)
            / self.constants.c1
            * phi_norm
            * y_norm
            / self.fm.frobenius_norm
        )
        return PosteriorEstimate(
            mean=float(scale * overlap),
            variance=None,
            p1=self.p1,
            p2=None,
            shots_used=shots_used,
            mode="exact" if shots == 0 else "sampled",
            diagnostics={"overlap": float(overlap)},
        )

    def variance_estimate(self, x_star, shots: int = 0, seed=None) -> PosteriorEstimate:
        phi_star, phi_norm = self._query_features(x_star)
        col_w = self.variance_state.register("col").width
        query_state = Statevector.from_amplitudes(
            _padded_unit(phi_star, col_w), [("query", col_w)]
        )
        shots_used = 0
        if shots == 0:
            raw = qsim.swap_test(
                self.variance_state, query_state, subsystem="col", clamp=False
            )
        else:
            rng = np.random.default_rng(seed)
            shots_used = self._accepted_shots(self.p2, shots, rng)
            raw = qsim.swap_test(
                self.variance_state,
                query_state,
                subsystem="col",
                shots=shots_used,
                seed=rng,
                clamp=False,
            )
        overlap = min(max(raw, 0.0), 1.0)
        pv = self.fm.v.T @ phi_star
        null_sq = max(float(phi_star @ phi_star - pv @ pv), 0.0)
        spectral_var = (
            self.hyper.noise_std**2
            * self.p2
            / self.constants.c2**2
            * phi_norm**2
            / self.fm.frobenius_norm**2
            * overlap
        )
        return PosteriorEstimate(
            mean=None,
            variance=max(spectral_var + null_sq, 0.0),
            p1=None,
            p2=self.p2,
            shots_used=shots_used,
            mode="exact" if shots == 0 else "sampled",
            diagnostics={"overlap_raw": float(raw), "null_space_variance": null_sq},
        )


def estimate_mean(
    fm: FeatureModel, y, x_star, h: KernelHyper, cfg: PipelineConfig
) -> PosteriorEstimate:
    """Quantum estimate of the posterior mean at one query point."""
    pipe = PreparedPipeline(fm, h, cfg.tau, cfg.delta_r)
    return pipe.mean_estimate(y, x_star, cfg.effective_shots, cfg.seed)


def estimate_variance(
    fm: FeatureModel, x_star, h: KernelHyper, cfg: PipelineConfig
) -> PosteriorEstimate:
    """Quantum estimate of the posterior variance at one query point."""
    pipe = PreparedPipeline(fm, h, cfg.tau, cfg.delta_r)
    return pipe.variance_estimate(x_star, cfg.effective_shots, cfg.seed)
