"""Quadrature noise: diffusion coefficients and closed-form squeezing spectra.

Spectra are normalized to vacuum = 1 (standard quantum limit). With
G = s(0)/s(z) the closed forms are

    S_P(z,nu) = S_P(0,nu)/G + 1 - 1/G + 3 s(z) ln G          (nu-independent)
    S_Q(z,nu) = G S_Q(0,nu) - 1 + G
                + (nu/Gamma0)^2 (3 ln G - 1/s(0) + 1/s(z)) / s(z)

valid for analysis frequencies well inside the CPO width. These are the
package's ground truth; the oracle module re-derives them numerically from
the Langevin noise integrals.
"""

from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ValidityWarning
from .medium import MediumParams
from .probe import VALIDITY_NU_OVER_DELTA, delta_cpo
from .pump import SaturationProfile, saturation_exact

_PRESET_RE = re.compile(r"^(p|q)_squeezed_(\d+(?:\.\d+)?)$")


@dataclass(frozen=True)
class DiffusionMatrix:
    """Langevin diffusion coefficients at saturation s (rad/s).

    d_delta_delta drives the population channel, d_minus_minus the Hermitian
    absorption-channel force combination; d_plus_plus and every cross term
    vanish identically.
    """

    d_delta_delta: float
    d_plus_plus: float
    d_minus_minus: float
    cross: float
    saturation: float


@dataclass(frozen=True)
class InputFieldState:
    """Input quadrature spectra, flat in nu (vacuum = 1)."""

    s_p_input: float
    s_q_input: float
    label: str = "custom"

    def __post_init__(self):
        for name in ("s_p_input", "s_q_input"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0.0):
                raise DomainError(f"{name} must be finite and >= 0, got {v!r}")

    @classmethod
    def coherent(cls) -> "InputFieldState":
        return cls(1.0, 1.0, label="coherent")

    @classmethod
    def p_squeezed(cls, db: float) -> "InputFieldState":
        """Minimum-uncertainty state squeezed in P by the given decibels."""
        if not (math.isfinite(db) and db > 0.0):
            raise DomainError(f"squeezing dB must be > 0, got {db!r}")
        factor = 10.0 ** (-db / 10.0)
        return cls(factor, 1.0 / factor, label=f"p_squeezed_{db:g}")

    @classmethod
    def q_squeezed(cls, db: float) -> "InputFieldState":
        if not (math.isfinite(db) and db > 0.0):
            raise DomainError(f"squeezing dB must be > 0, got {db!r}")
        factor = 10.0 ** (-db / 10.0)
        return cls(1.0 / factor, factor, label=f"q_squeezed_{db:g}")

    @classmethod
    def from_preset(cls, name: str) -> "InputFieldState":
        """Parse preset names: coherent, p_squeezed_<dB>, q_squeezed_<dB>."""
        if name == "coherent":
            return cls.coherent()
        m = _PRESET_RE.match(name)
        if m is None:
            raise DomainError(f"unknown input preset {name!r}")
        db = float(m.group(2))
        return cls.p_squeezed(db) if m.group(1) == "p" else cls.q_squeezed(db)


@dataclass(frozen=True)
class QuadratureSpectrum:
    nu_grid: np.ndarray  # rad/s
    s_p: np.ndarray
    s_q: np.ndarray
    z: float  # metres


def diffusion_coefficients(s, params: MediumParams) -> DiffusionMatrix:
    """Table of Langevin diffusion coefficients at saturation s.

    Requires the noise regime (gamma_t = 0, Gamma = Gamma0/2); the entries
    assume spontaneous emission is the only decoherence source.
    """
    if not (isinstance(s, (int, float)) and math.isfinite(s) and s >= 0.0):
        raise DomainError(f"saturation must be finite and >= 0, got {s!r}")
    if not params.is_quantum_regime:
        raise DomainError(
            "diffusion coefficients assume gamma_t = 0 and gamma_opt = gamma0/2"
        )
    return DiffusionMatrix(
        d_delta_delta=params.gamma0 * s / (1.0 + 3.0 * s),
        d_plus_plus=0.0,
        d_minus_minus=params.gamma0,
        cross=0.0,
        saturation=float(s),
    )


def _resolve_point(profile: SaturationProfile, z):
    s_z = profile.saturation_at(z)
    if s_z <= 0.0:
        raise DomainError("thick-medium limit: s(z) = 0 is singular here")
    gain = profile.s0 / s_z
    return s_z, gain


def _warn_outside_window(nu, s_z, params: MediumParams):
    delta = delta_cpo(s_z, params)
    if delta > 0.0 and abs(nu) > VALIDITY_NU_OVER_DELTA * delta:
        warnings.warn(
            f"nu = {nu:.3g} rad/s is outside the CPO validity window "
            f"(0.3 Delta = {VALIDITY_NU_OVER_DELTA * delta:.3g} rad/s at this depth)",
            ValidityWarning,
            stacklevel=3,
        )


def squeezing_spectrum_p(
    input_state: InputFieldState,
    profile: SaturationProfile,
    z,
    nu,
    params: MediumParams,
) -> float:
    """Output P spectrum at depth z; the closed form carries no nu dependence."""
    s_z, gain = _resolve_point(profile, z)
    _warn_outside_window(nu, s_z, params)
    log_gain = math.log(gain)
    return input_state.s_p_input / gain + 1.0 - 1.0 / gain + 3.0 * s_z * log_gain


def squeezing_spectrum_q(
    input_state: InputFieldState,
    profile: SaturationProfile,
    z,
    nu,
    params: MediumParams,
) -> float:
    """Output Q spectrum at depth z and analysis frequency nu."""
    s_z, gain = _resolve_point(profile, z)
    _warn_outside_window(nu, s_z, params)
    log_gain = math.log(gain)
    nu_term = (nu / params.gamma0) ** 2 * (
        3.0 * log_gain - 1.0 / profile.s0 + 1.0 / s_z
    ) / s_z
    return gain * input_state.s_q_input - 1.0 + gain + nu_term


def spectrum(
    input_state: InputFieldState,
    profile: SaturationProfile,
    z,
    nu_grid,
    params: MediumParams,
) -> QuadratureSpectrum:
    nu_grid = np.atleast_1d(np.asarray(nu_grid, dtype=float))
    s_p = np.array(
        [squeezing_spectrum_p(input_state, profile, z, nu, params) for nu in nu_grid]
    )
    s_q = np.array(
        [squeezing_spectrum_q(input_state, profile, z, nu, params) for nu in nu_grid]
    )
    return QuadratureSpectrum(nu_grid=nu_grid, s_p=s_p, s_q=s_q, z=float(z))


@dataclass(frozen=True)
class VarianceEvolution:
    """Zero-frequency variance curves versus dimensionless depth."""

    zeta: np.ndarray
    s_p: np.ndarray
    s_q: np.ndarray
    input_label: str


def variance_evolution(input_state: InputFieldState, s0, depth_grid) -> VarianceEvolution:
    """S_P and S_Q at nu = 0 along a dimensionless depth grid.

    Works directly in the depth coordinate zeta, so no medium parameters are
    needed: at nu = 0 the spectra depend only on s(0) and the gain.
    """
    if not (isinstance(s0, (int, float)) and math.isfinite(s0) and s0 > 0.0):
        raise DomainError(f"s0 must be finite and > 0, got {s0!r}")
    zeta = np.atleast_1d(np.asarray(depth_grid, dtype=float))
    if np.any(zeta < 0.0) or not np.all(np.isfinite(zeta)):
        raise DomainError("depth grid values must be finite and >= 0")
    s = np.asarray(saturation_exact(float(s0), zeta))
    gain = float(s0) / s
    log_gain = np.log(gain)
    s_p = input_state.s_p_input / gain + 1.0 - 1.0 / gain + 3.0 * s * log_gain
    s_q = gain * input_state.s_q_input - 1.0 + gain
    return VarianceEvolution(zeta=zeta, s_p=s_p, s_q=s_q, input_label=input_state.label)
