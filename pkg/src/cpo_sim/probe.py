"""Classical probe propagation: phase-sensitive transmission, eigenvalues,
their small-frequency expansion, and mean quadrature transport.

The probe couples to the saturated medium through two eigenvalues per unit
length. The in-quadrature component (Q, in phase with the population beat)
sees lambda1 = k (D+i nu)/(D-i nu); the orthogonal component (P) sees
lambda2 = -k, pure absorption, with k = g^2 N / (c Gamma0 (1+3s)) and D the
narrow CPO half-width at this depth.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

from scipy.constants import c as SPEED_OF_LIGHT
from scipy.integrate import quad

from .errors import DomainError, ValidityWarning
from .medium import MediumParams
from .pump import SaturationProfile

# ratio of analysis frequency to CPO half-width above which the adiabatic
# forms stop being trustworthy
VALIDITY_NU_OVER_DELTA = 0.3

_QUAD_RTOL = 1e-9


def delta_cpo(s, params: MediumParams, model: str = "gamma0_s"):
    """CPO half-width presets; the medium never defines this scale itself.

    "gamma0_s" is the default (it is the one consistent with the quadrature
    noise closed forms, see the oracle module); "saturated" is kept as the
    alternative for the resolver to reject on data.
    """
    if model == "gamma0_s":
        return params.gamma0 * s
    if model == "saturated":
        return 2.0 * params.gamma0 * s / (1.0 + 3.0 * s)
    raise DomainError(f"unknown CPO width model {model!r}")


DELTA_MODELS = ("gamma0_s", "saturated")


@dataclass(frozen=True)
class PropagationEigenvalues:
    lambda1: complex  # 1/m, in-quadrature (gain) channel
    lambda2: complex  # 1/m, orthogonal (absorption) channel, real negative
    nu: float  # rad/s
    delta_cpo: float  # rad/s


@dataclass(frozen=True)
class TransmissionResult:
    t_parallel: float  # amplitude transmission at theta = pi/2
    t_orthogonal: float  # amplitude transmission at theta = 0
    pump_power: float | None = None


def eigenvalues(s, nu, delta, params: MediumParams) -> PropagationEigenvalues:
    """Both propagation eigenvalues at saturation s and analysis frequency nu."""
    if not (isinstance(s, (int, float)) and math.isfinite(s) and s >= 0.0):
        raise DomainError(f"saturation must be finite and >= 0, got {s!r}")
    if not (isinstance(delta, (int, float)) and math.isfinite(delta) and delta > 0.0):
        raise DomainError(f"delta_cpo must be finite and > 0, got {delta!r}")
    if not (isinstance(nu, (int, float)) and math.isfinite(nu)):
        raise DomainError(f"nu must be finite, got {nu!r}")
    k = params.coupling_density / (params.gamma0 * (1.0 + 3.0 * s))
    lam1 = k * (delta + 1j * nu) / (delta - 1j * nu)
    return PropagationEigenvalues(
        lambda1=lam1, lambda2=complex(-k), nu=float(nu), delta_cpo=float(delta)
    )


def adiabatic_expansion(s, nu, delta, params: MediumParams):
    """Terms of the small-nu/Delta expansion of lambda1 + i nu/c.

    Returns (gain_rate, group_delay_rate, curvature_rate):
    gain k, the slow-light group term (1 + g^2 N / (Omega_D^2 (1+3s)))/c in
    seconds per metre, and the bandwidth curvature -2 k nu^2/Delta^2. Their
    combination gain + i*nu*group + curvature approximates the exact
    lambda1 + i nu/c to third order in nu/Delta.
    """
    if not (isinstance(s, (int, float)) and math.isfinite(s) and s >= 0.0):
        raise DomainError(f"saturation must be finite and >= 0, got {s!r}")
    if s == 0.0:
        raise DomainError("slow-light divergence: the group term is singular at s = 0")
    if not (isinstance(delta, (int, float)) and math.isfinite(delta) and delta > 0.0):
        raise DomainError(f"delta_cpo must be finite and > 0, got {delta!r}")
    if abs(nu) > VALIDITY_NU_OVER_DELTA * delta:
        warnings.warn(
            f"nu/Delta = {abs(nu) / delta:.3g} exceeds the {VALIDITY_NU_OVER_DELTA} "
            "validity bound of the adiabatic expansion",
            ValidityWarning,
            stacklevel=2,
        )
    k = params.coupling_density / (params.gamma0 * (1.0 + 3.0 * s))
    omega_d_sq = s * params.gamma_opt * params.gamma0
    group = (1.0 + params.coupling_density * SPEED_OF_LIGHT / (omega_d_sq * (1.0 + 3.0 * s))) / SPEED_OF_LIGHT
    curvature = -2.0 * k * nu * nu / (delta * delta)
    return k, group, curvature


def _cpo_term(s, gamma_ratio):
    # 2s/(r+3s) with the 0/0 endpoint pinned to its limit value 0
    denom = gamma_ratio + 3.0 * s
    if denom == 0.0:
        return 0.0
    return 2.0 * s / denom


def transmission(profile: SaturationProfile, params: MediumParams, pump_power=None) -> TransmissionResult:
    """Amplitude transmissions of the two probe phases across the full cell.

    theta = 0 sees plain saturable absorption; theta = pi/2 additionally sees
    the narrow CPO response. Both are adaptive-quadrature integrals of the
    per-length rates over the solved pump profile. The two-tone probe is
    assumed spectrally symmetric and inside both the CPO window and the
    Zeeman-shadowed region; that assumption is not enforced numerically.
    """
    prefactor = params.coupling_density / (2.0 * params.gamma_opt)
    gamma_ratio = params.gamma_t / params.gamma0

    def integrand_orthogonal(z):
        return 1.0 / (1.0 + 3.0 * profile.saturation_at(z))

    def integrand_parallel(z):
        s = profile.saturation_at(z)
        return (_cpo_term(s, gamma_ratio) - 1.0) / (1.0 + 3.0 * s)

    i0, _ = quad(integrand_orthogonal, 0.0, profile.length, epsabs=0.0, epsrel=_QUAD_RTOL, limit=200)
    ipi2, _ = quad(integrand_parallel, 0.0, profile.length, epsabs=0.0, epsrel=_QUAD_RTOL, limit=200)
    return TransmissionResult(
        t_parallel=math.exp(prefactor * ipi2),
        t_orthogonal=math.exp(-prefactor * i0),
        pump_power=pump_power,
    )


def propagate_mean_quadratures(p_in, q_in, profile: SaturationProfile, params: MediumParams, z, nu=0.0):
    """Mean-field transport: Q grows by sqrt(G), P shrinks by 1/sqrt(G).

    Both pick up the free propagation phase e^{i nu z / c}. The product of the
    two amplitudes is conserved exactly.
    """
    s_z = profile.saturation_at(z)
    root_gain = math.sqrt(profile.s0 / s_z)
    phase = cmath.exp(1j * nu * z / SPEED_OF_LIGHT)
    return (complex(p_in) / root_gain * phase, complex(q_in) * root_gain * phase)
