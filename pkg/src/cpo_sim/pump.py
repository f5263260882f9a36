"""Pump depletion along the cell: the saturation profile s(z) and its gain factor.

The pump obeys ds/dz = -kappa * s/(1+3s) with kappa = 2 g^2 N / (c Gamma0),
which integrates to the conservation law

    ln s(z) + 3 s(z) = ln s0 + 3 s0 - zeta,   zeta = kappa * z.

Grid values are produced by bracketed root finding on that relation; off-grid
evaluation inverts it in closed form through the Wright omega function
(ln s + 3s = y is equivalent to 3s e^{3s} = 3 e^y). An adaptive ODE
integration of the original equation is provided as an independent
cross-check lane only.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq
from scipy.special import wrightomega

from .errors import DomainError
from .medium import MediumParams

_BRENTQ_RTOL = 4.0 * np.finfo(float).eps


def _conserved(s):
    return math.log(s) + 3.0 * s


def solve_saturation(s0: float, zeta: float) -> float:
    """s at depth zeta (scalar), by bracketed root finding on the conservation law."""
    if not (math.isfinite(s0) and s0 > 0.0):
        raise DomainError(f"s0 must be finite and > 0, got {s0!r}")
    if not (math.isfinite(zeta) and zeta >= 0.0):
        raise DomainError(f"zeta must be finite and >= 0, got {zeta!r}")
    if zeta == 0.0:
        return float(s0)
    target = _conserved(s0) - zeta
    if target < -690.0:
        # asymptotic branch: 3s is negligible, ln s = target (underflow-safe)
        return math.exp(target)
    # f(s) = ln s + 3s - target is strictly increasing; the Beer-Lambert value
    # s0 e^{-zeta} brackets from below, s0 from above.
    lo = s0 * math.exp(-zeta)
    if lo <= 0.0:
        lo = 5e-324
    return brentq(
        lambda s: _conserved(s) - target,
        lo,
        s0,
        rtol=_BRENTQ_RTOL,
        xtol=5e-324,
        maxiter=200,
    )


def saturation_exact(s0, zeta):
    """Vectorized closed-form inverse of the conservation law (Wright omega)."""
    zeta = np.asarray(zeta, dtype=float)
    if np.any(zeta < 0.0) or not np.all(np.isfinite(zeta)):
        raise DomainError("zeta values must be finite and >= 0")
    if not (math.isfinite(s0) and s0 > 0.0):
        raise DomainError(f"s0 must be finite and > 0, got {s0!r}")
    y = math.log(s0) + 3.0 * s0 - zeta + math.log(3.0)
    out = wrightomega(y).real / 3.0
    # keep the entry face exact: wrightomega round-trips s0 only to ~1 ulp
    out = np.where(zeta == 0.0, s0, out)
    if out.ndim == 0:
        return float(out)
    return out


def zeta_for_gain(s0: float, gain: float) -> float:
    """Depth at which the pump has dropped by the given factor: s(zeta) = s0/gain."""
    if not (math.isfinite(s0) and s0 > 0.0):
        raise DomainError(f"s0 must be finite and > 0, got {s0!r}")
    if not (math.isfinite(gain) and gain >= 1.0):
        raise DomainError(f"gain must be finite and >= 1, got {gain!r}")
    return math.log(gain) + 3.0 * s0 * (1.0 - 1.0 / gain)


@dataclass(frozen=True)
class GainFactor:
    value: float

    def __post_init__(self):
        if not (math.isfinite(self.value) and self.value >= 1.0):
            raise DomainError(f"gain factor must be >= 1, got {self.value!r}")


@dataclass(frozen=True)
class SaturationProfile:
    """s(z) on a grid over [0, L], plus the exact evaluator metadata.

    grid: positions z in metres; zeta: kappa*z; values: s at the grid nodes.
    depletion_rate (kappa, 1/m) and s0 let saturation_at evaluate the implicit
    solution exactly anywhere in [0, L]. Profiles built by hand (tests,
    synthetic media) may pass depletion_rate=None; they fall back to monotone
    cubic interpolation of the grid.
    """

    grid: np.ndarray
    zeta: np.ndarray
    values: np.ndarray
    s0: float
    length: float
    depletion_rate: float | None = None

    def __post_init__(self):
        if self.s0 <= 0.0 or not math.isfinite(self.s0):
            raise DomainError(f"s0 must be finite and > 0, got {self.s0!r}")
        if len(self.grid) < 2 or len(self.grid) != len(self.values):
            raise DomainError("profile needs matching grids of at least 2 points")
        if self.values[0] != self.s0:
            raise DomainError("profile must start at s0")
        # solved profiles are strictly decreasing; hand-built ones are free
        if self.depletion_rate is not None and not np.all(np.diff(self.values) < 0.0):
            raise DomainError("solved profile must be strictly decreasing")

    @cached_property
    def _interp(self):
        # strictly decreasing data; pchip keeps it monotone between nodes
        return PchipInterpolator(self.grid, self.values, extrapolate=False)

    def _check_z(self, z):
        if not (0.0 <= z <= self.length * (1.0 + 1e-12)):
            raise DomainError(f"z = {z!r} outside the cell [0, {self.length}]")
        return min(float(z), self.length)

    def saturation_at(self, z) -> float:
        """s(z), exact for solved profiles, interpolated for hand-built ones."""
        z = self._check_z(z)
        if self.depletion_rate is not None:
            return saturation_exact(self.s0, self.depletion_rate * z)
        return float(self._interp(z))

    def gain_value(self, z) -> float:
        return self.s0 / self.saturation_at(z)

    def to_csv(self, path):
        gains = self.s0 / self.values
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["z_m", "zeta", "s", "G"])
            for z, zeta, s, g in zip(self.grid, self.zeta, self.values, gains):
                writer.writerow([repr(float(z)), repr(float(zeta)), repr(float(s)), repr(float(g))])


def solve_profile(s0, params: MediumParams, n_points: int = 201) -> SaturationProfile:
    """Solve the pump profile on an even grid over the full cell."""
    if not (isinstance(s0, (int, float)) and math.isfinite(s0) and s0 > 0.0):
        raise DomainError(f"s0 must be finite and > 0, got {s0!r}")
    if n_points < 2:
        raise DomainError(f"n_points must be >= 2, got {n_points}")
    s0 = float(s0)
    kappa = params.depletion_rate
    grid = np.linspace(0.0, params.length, int(n_points))
    zeta = kappa * grid
    values = np.empty_like(zeta)
    values[0] = s0
    for i in range(1, len(zeta)):
        values[i] = solve_saturation(s0, float(zeta[i]))
    return SaturationProfile(
        grid=grid,
        zeta=zeta,
        values=values,
        s0=s0,
        length=params.length,
        depletion_rate=kappa,
    )


def gain_at(profile: SaturationProfile, z) -> GainFactor:
    """G(z) = s(0)/s(z) from monotone cubic interpolation of the profile grid."""
    z = profile._check_z(z)
    if z == 0.0:
        return GainFactor(1.0)
    s_z = float(profile._interp(z))
    return GainFactor(profile.s0 / s_z)


def integrate_profile_ode(s0, params: MediumParams, zeta_grid) -> np.ndarray:
    """Independent lane: adaptive integration of ds/dzeta = -s/(1+3s).

    Exists only to cross-check the root-finding solution; never the primary.
    """
    zeta_grid = np.asarray(zeta_grid, dtype=float)
    if zeta_grid[-1] == 0.0:
        return np.full_like(zeta_grid, float(s0))
    tail = solve_saturation(s0, float(zeta_grid[-1]))
    sol = solve_ivp(
        lambda _z, y: -y / (1.0 + 3.0 * y),
        (0.0, float(zeta_grid[-1])),
        [float(s0)],
        t_eval=zeta_grid,
        method="DOP853",
        rtol=1e-12,
        atol=max(1e-300, 1e-13 * tail),
    )
    if not sol.success:
        raise RuntimeError(f"ODE cross-check failed: {sol.message}")
    return sol.y[0]
