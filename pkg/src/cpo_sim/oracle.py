"""Independent numerical verification of the closed-form spectra.

Three lanes, none of which uses the closed forms being checked:

1. An Einstein-relation engine that derives Langevin diffusion coefficients
   directly from the spontaneous-emission dissipator acting on the pump-only
   steady state. The coherent-drive part of the evolution is a derivation
   (Leibniz rule) and cancels identically in the defect formula, so only the
   dissipator enters.
2. A deterministic evaluation of the solution-with-noise integrals: the
   output spectrum is the input spectrum times the accumulated eigenvalue
   gain plus an integral over noise injected at every depth, each slice
   propagated to the exit with the same eigenvalue. All integrals are
   numerical (composite Simpson for the accumulated rate, adaptive
   quadrature outside).
3. A seeded Monte Carlo integration of the linear stochastic transport
   equation, exact per-step drift, Gaussian increments per step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline

from .errors import DomainError
from .medium import MediumParams, steady_state
from .noise import InputFieldState, squeezing_spectrum_p, squeezing_spectrum_q
from .probe import DELTA_MODELS, delta_cpo, eigenvalues
from .pump import SaturationProfile, saturation_exact

DETERMINISTIC = "deterministic-integral"
MONTE_CARLO = "monte-carlo"


@dataclass(frozen=True)
class OracleConfig:
    n_trajectories: int = 100_000
    spatial_steps: int = 512
    seed: int = 0
    delta_model: str = "gamma0_s"
    mode: str = MONTE_CARLO

    def __post_init__(self):
        if self.n_trajectories < 1:
            raise DomainError(f"n_trajectories must be >= 1, got {self.n_trajectories}")
        if self.spatial_steps < 16:
            raise DomainError(f"spatial_steps must be >= 16, got {self.spatial_steps}")
        if not (0 <= int(self.seed) < 2**64):
            raise DomainError("seed must fit in 64 bits")
        if self.delta_model not in DELTA_MODELS:
            raise DomainError(f"unknown delta model {self.delta_model!r}")
        if self.mode not in (DETERMINISTIC, MONTE_CARLO):
            raise DomainError(f"unknown oracle mode {self.mode!r}")


@dataclass(frozen=True)
class OracleReport:
    mode: str
    quadrature: str
    nu: float
    closed_form: float
    oracle_value: float
    abs_error: float
    rel_error: float
    statistical_sigma: float | None
    seed: int | None
    delta_model: str

    def as_dict(self):
        return {
            "mode": self.mode,
            "quadrature": self.quadrature,
            "nu": self.nu,
            "closed_form": self.closed_form,
            "oracle": self.oracle_value,
            "abs_error": self.abs_error,
            "rel_error": self.rel_error,
            "sigma": self.statistical_sigma,
            "seed": self.seed,
            "delta_model": self.delta_model,
        }


# ---------------------------------------------------------------------------
# Einstein-relation engine


def _basis_matrix(i, j):
    m = np.zeros((3, 3), dtype=complex)
    m[i, j] = 1.0
    return m


def _jump_operators(params: MediumParams):
    # spontaneous decay e -> +1 and e -> -1, each at rate gamma0/2
    amp = math.sqrt(params.gamma0 / 2.0)
    return (amp * _basis_matrix(1, 0), amp * _basis_matrix(2, 0))


def dissipator_heisenberg(op, params: MediumParams):
    """Adjoint (Heisenberg-picture) dissipator applied to a 3x3 operator."""
    op = np.asarray(op, dtype=complex)
    out = np.zeros((3, 3), dtype=complex)
    for jump in _jump_operators(params):
        jd = jump.conj().T
        out += jd @ op @ jump - 0.5 * (jd @ jump @ op + op @ jd @ jump)
    return out


def einstein_diffusion(op_a, op_b, s, params: MediumParams) -> complex:
    """2 D_AB defect of the Leibniz rule, averaged in the steady state.

    D_AB = < R(AB) - A R(B) - R(A) B > with R the Heisenberg dissipator; this
    is the diffusion coefficient pairing the Langevin forces F_A and F_B.
    """
    rho = steady_state(s, params).entries
    op_a = np.asarray(op_a, dtype=complex)
    op_b = np.asarray(op_b, dtype=complex)
    defect = (
        dissipator_heisenberg(op_a @ op_b, params)
        - op_a @ dissipator_heisenberg(op_b, params)
        - dissipator_heisenberg(op_a, params) @ op_b
    )
    return complex(np.trace(rho @ defect))


def force_correlators(s, params: MediumParams) -> dict:
    """Self- and cross-correlators of the named force channels at saturation s.

    "population" is the excited-population force; the "absorption_combo" and
    "phase_combo" channels are the Hermitian optical-force combinations that
    drive the P and Q quadratures; the literal lowering-leg sums/differences
    are included because the tabulated coefficients are quoted per
    combination and the distinction matters.
    """
    lower_plus = _basis_matrix(0, 1)  # |e><+1|
    lower_minus = _basis_matrix(0, 2)  # |e><-1|
    raise_plus = _basis_matrix(1, 0)
    raise_minus = _basis_matrix(2, 0)
    population = _basis_matrix(0, 0)

    m_low = lower_plus - lower_minus
    m_high = raise_plus - raise_minus
    absorption = m_low + m_high
    phase = m_high - m_low
    plus_literal = lower_plus + lower_minus

    d = lambda a, b: einstein_diffusion(a, b, s, params)
    return {
        "population": d(population, population),
        "plus_literal": d(plus_literal, plus_literal),
        "minus_literal": d(m_low, m_low),
        "absorption_combo": d(absorption, absorption),
        "phase_combo": d(phase, phase),
        "lower_raising": d(m_low, m_high),
        "raising_lower": d(m_high, m_low),
        "cross_population_absorption": d(population, absorption),
        "cross_population_phase": d(population, phase),
    }


# ---------------------------------------------------------------------------
# shared pieces of the two propagation oracles


def _require_quantum(params: MediumParams):
    if not params.is_quantum_regime:
        raise DomainError("noise oracles assume gamma_t = 0 and gamma_opt = gamma0/2")


def _zeta_end(profile: SaturationProfile, z):
    if profile.depletion_rate is None:
        raise DomainError("noise oracles need a solved profile (depletion rate set)")
    if z is None:
        z = profile.length
    if not (0.0 <= z <= profile.length * (1.0 + 1e-12)):
        raise DomainError(f"z = {z!r} outside the cell [0, {profile.length}]")
    return float(profile.depletion_rate) * min(float(z), profile.length), float(z)


def _variance_rate(quadrature, s, nu, delta_model, params: MediumParams):
    """d ln Var / d zeta from the propagation eigenvalues (per unit depth)."""
    ev = eigenvalues(s, nu, delta_cpo(s, params, delta_model), params)
    lam = ev.lambda1 if quadrature == "Q" else ev.lambda2
    return 2.0 * lam.real / params.depletion_rate


def _noise_density(quadrature, s, nu, delta_model, params: MediumParams):
    """Shot-noise-normalized injection rate per unit depth, from the engine.

    The slice-to-continuum map is fixed by the vacuum anchor: a coherent
    input must stay at spectrum 1 through an empty medium. With that anchor
    the P channel injects absorption-combo/gamma0 per unit depth and the Q
    channel the alpha-weighted population and phase correlators.
    """
    corr = force_correlators(s, params)
    if quadrature == "P":
        return corr["absorption_combo"].real / params.gamma0
    delta = delta_cpo(s, params, delta_model)
    omega_d_sq = s * params.gamma_opt * params.gamma0
    numerator = (
        -nu * nu * corr["phase_combo"].real
        + 2.0 * omega_d_sq * corr["population"].real
    )
    return numerator / (params.gamma0 * delta * delta)


def deterministic_noise_integral(
    quadrature: str,
    profile: SaturationProfile,
    params: MediumParams,
    nu: float = 0.0,
    delta_model: str = "gamma0_s",
    input_state: InputFieldState | None = None,
    z=None,
    include_noise: bool = True,
) -> OracleReport:
    """Direct quadrature of the solution-with-noise integral.

    The accumulated variance rate W is tabulated once by composite Simpson on
    a fine depth grid (vectorized), then the noise integral runs through
    adaptive quadrature against that table. No closed-form spectrum enters.
    """
    if quadrature not in ("P", "Q"):
        raise DomainError(f"quadrature must be 'P' or 'Q', got {quadrature!r}")
    _require_quantum(params)
    if input_state is None:
        input_state = InputFieldState.coherent()
    zeta_end, z = _zeta_end(profile, z)
    s_in = input_state.s_p_input if quadrature == "P" else input_state.s_q_input

    if zeta_end == 0.0:
        oracle_value = float(s_in)
    else:
        n_fine = 4097
        grid = np.linspace(0.0, zeta_end, n_fine)
        s_grid = saturation_exact(profile.s0, grid)
        rates = np.array(
            [
                _variance_rate(quadrature, float(sv), nu, delta_model, params)
                for sv in s_grid
            ]
        )
        # cumulative composite Simpson on the even grid
        h = grid[1] - grid[0]
        pair_area = (h / 6.0) * (rates[:-2:2] + 4.0 * rates[1:-1:2] + rates[2::2]) * 2.0
        cumulative = np.zeros(n_fine)
        cumulative[2::2] = np.cumsum(pair_area)
        # odd nodes: half-panel Simpson using the three nearest nodes
        cumulative[1::2] = cumulative[:-1:2] + (h / 12.0) * (
            5.0 * rates[:-1:2] + 8.0 * rates[1::2] - rates[2::2]
        )
        w_table = CubicSpline(grid, cumulative)
        w_total = float(cumulative[-1])

        oracle_value = float(s_in) * math.exp(w_total)
        if include_noise:
            def injected(x):
                s_x = saturation_exact(profile.s0, x)
                v = _noise_density(quadrature, s_x, nu, delta_model, params)
                return math.exp(w_total - float(w_table(x))) * v

            noise_integral, _ = quad(
                injected, 0.0, zeta_end, epsabs=0.0, epsrel=1e-10, limit=300
            )
            oracle_value += noise_integral

    closed = (
        squeezing_spectrum_p(input_state, profile, z, nu, params)
        if quadrature == "P"
        else squeezing_spectrum_q(input_state, profile, z, nu, params)
    )
    abs_error = abs(closed - oracle_value)
    return OracleReport(
        mode=DETERMINISTIC,
        quadrature=quadrature,
        nu=float(nu),
        closed_form=float(closed),
        oracle_value=oracle_value,
        abs_error=abs_error,
        rel_error=abs_error / abs(closed),
        statistical_sigma=None,
        seed=None,
        delta_model=delta_model,
    )


def monte_carlo_fluctuations(
    quadrature: str,
    profile: SaturationProfile,
    params: MediumParams,
    config: OracleConfig | None = None,
    nu: float = 0.0,
    input_state: InputFieldState | None = None,
    z=None,
    include_noise: bool = True,
) -> OracleReport:
    """Seeded Monte Carlo of the linear transport equation with injected noise.

    Drift per step is exact (the depth integral of the decay rate telescopes
    through the pump conservation law); noise increments are Gaussian with
    the midpoint injection density, propagated over the remaining half step.
    Trajectories are vectorized in a fixed order, so a seed pins the output
    bit for bit regardless of host.
    """
    if quadrature not in ("P", "Q"):
        raise DomainError(f"quadrature must be 'P' or 'Q', got {quadrature!r}")
    _require_quantum(params)
    if config is None:
        config = OracleConfig()
    if input_state is None:
        input_state = InputFieldState.coherent()
    zeta_end, z = _zeta_end(profile, z)
    s_in = input_state.s_p_input if quadrature == "P" else input_state.s_q_input

    rng = np.random.default_rng(config.seed)
    n = int(config.n_trajectories)
    complex_path = quadrature == "Q" and nu != 0.0

    if complex_path:
        x = math.sqrt(s_in / 2.0) * (
            rng.standard_normal(n) + 1j * rng.standard_normal(n)
        )
    else:
        x = math.sqrt(s_in) * rng.standard_normal(n)

    if zeta_end > 0.0:
        edges = np.linspace(0.0, zeta_end, int(config.spatial_steps) + 1)
        s_edges = np.asarray(saturation_exact(profile.s0, edges))
        mids = 0.5 * (edges[:-1] + edges[1:])
        s_mids = np.asarray(saturation_exact(profile.s0, mids))
        h = edges[1] - edges[0]

        # exact depth integral of 1/(1+3s) across each step and half step
        log_full = np.log(s_edges[:-1] / s_edges[1:])
        log_half = np.log(s_mids / s_edges[1:])

        sign = 1.0 if quadrature == "Q" else -1.0
        if complex_path:
            ratios = np.empty(len(mids), dtype=complex)
            for i, sm in enumerate(s_mids):
                delta = delta_cpo(float(sm), params, config.delta_model)
                ratios[i] = (delta + 1j * nu) / (delta - 1j * nu)
            drift = np.exp(0.5 * log_full * ratios)
            half_gain = np.exp(log_half * ratios.real)
        else:
            drift = np.exp(sign * 0.5 * log_full)
            half_gain = np.exp(sign * log_half)

        for i in range(len(mids)):
            x = x * drift[i]
            if include_noise:
                density = _noise_density(
                    quadrature, float(s_mids[i]), nu, config.delta_model, params
                )
                std = math.sqrt(max(density, 0.0) * h * half_gain[i])
                if complex_path:
                    x = x + (std / math.sqrt(2.0)) * (
                        rng.standard_normal(n) + 1j * rng.standard_normal(n)
                    )
                else:
                    x = x + std * rng.standard_normal(n)

    power = np.abs(x) ** 2 if complex_path else x * x
    oracle_value = float(np.mean(power))
    sigma = float(np.std(power, ddof=1) / math.sqrt(n)) if n > 1 else float("inf")

    closed = (
        squeezing_spectrum_p(input_state, profile, z, nu, params)
        if quadrature == "P"
        else squeezing_spectrum_q(input_state, profile, z, nu, params)
    )
    abs_error = abs(closed - oracle_value)
    return OracleReport(
        mode=MONTE_CARLO,
        quadrature=quadrature,
        nu=float(nu),
        closed_form=float(closed),
        oracle_value=oracle_value,
        abs_error=abs_error,
        rel_error=abs_error / abs(closed),
        statistical_sigma=sigma,
        seed=int(config.seed),
        delta_model=config.delta_model,
    )


@dataclass(frozen=True)
class DeltaModelResolution:
    winner: str
    worst_case: dict  # model name -> worst relative deviation on the grid
    deviations: dict
    nu_values: tuple
    inconclusive: bool


def resolve_delta_model(
    profile: SaturationProfile,
    params: MediumParams,
    nu_values=None,
    input_state: InputFieldState | None = None,
) -> DeltaModelResolution:
    """Pick the CPO-width preset whose noise integral best matches the Q form.

    Runs the deterministic oracle for S_Q over a frequency grid under every
    preset and scores worst-case relative deviation from the closed form. If
    even the best preset deviates by more than 1e-3 somewhere on the grid the
    result is flagged inconclusive (the closed form stays the shipped ground
    truth regardless; see the package notes on its small-nu truncation).
    """
    _require_quantum(params)
    if nu_values is None:
        nu_values = params.gamma0 * np.array([0.0, 0.05, 0.1, 0.2])
    nu_values = tuple(float(v) for v in np.atleast_1d(nu_values))
    if input_state is None:
        input_state = InputFieldState.coherent()

    deviations = {}
    for model in DELTA_MODELS:
        devs = []
        for nu in nu_values:
            report = deterministic_noise_integral(
                "Q", profile, params, nu=nu, delta_model=model, input_state=input_state
            )
            devs.append(report.rel_error)
        deviations[model] = tuple(devs)

    worst = {model: max(devs) for model, devs in deviations.items()}
    winner = min(worst, key=worst.get)
    return DeltaModelResolution(
        winner=winner,
        worst_case=worst,
        deviations=deviations,
        nu_values=nu_values,
        inconclusive=worst[winner] > 1e-3,
    )
