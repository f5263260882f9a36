"""Acceptance suite: one printed PASS/FAIL line per criterion.

Run with `pytest tests/test_acceptance.py -v -s` to see the lines.  Two
checks fail by design and are expected to stay red; the README explains
why they cannot pass with this model and measurement protocol:

  * 1c: the parallel-analyzer transmission of the depleted-pump model is
    strictly monotone in pump power for every parameter choice (the
    integrand magnitude decreases pointwise in s and the profile grows
    pointwise with s0), so no interior maximum exists in the 3-30 mW
    window or anywhere else.
  * 2: with 1 percent multiplicative noise and 30 points per analyzer
    setting on 0.3-100 mW, the optical depth and the residual transmission
    share an almost flat likelihood ridge (res * exp(-depth) is what the
    data pins down).  The Cramer-Rao floor on the depth is ~226 percent
    relative standard deviation, so no unbiased estimator can hit 5
    percent recovery; the fit fails honestly.
"""

import math
import time

import numpy as np
import pytest

import cpo_sim as cs
from cpo_sim.fitting import _model_both
from cpo_sim.oracle import _basis_matrix  # noqa: F401  (documented helper reuse)

C_LIGHT = 299792458.0


def _report(name, ok, detail):
    print(f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'} ({detail})")
    return ok


def _unit_medium(zeta_total):
    return cs.MediumParams(
        gamma0=1.0, gamma_opt=0.5, gamma_t=0.0,
        coupling_density=zeta_total / 2.0, length=1.0, zeeman_shift=1e6,
    )


# --- criterion 1: transmission curve shape under the fitted parameters ----

@pytest.fixture(scope="module")
def power_sweep():
    params = cs.FitParams.default()
    powers_mw = np.geomspace(0.3, 100.0, 36)
    start = time.perf_counter()
    pairs = [_model_both(params, float(p) * 1e-3) for p in powers_mw]
    elapsed = time.perf_counter() - start
    t0 = np.array([a for a, _ in pairs])
    tpi2 = np.array([b for _, b in pairs])
    return powers_mw, t0, tpi2, elapsed


def test_criterion_1a_orthogonal_transmission_monotone(power_sweep):
    powers, t0, _, elapsed = power_sweep
    ok = bool(np.all(np.diff(t0) > 0.0)) and elapsed < 5.0
    assert _report(
        "1a", ok,
        f"T(theta=0) strictly increasing over {powers[0]:.1f}-{powers[-1]:.0f} mW, "
        f"sweep took {elapsed:.2f}s (budget 5s)",
    )


def test_criterion_1b_parallel_dominates(power_sweep):
    _, t0, tpi2, _ = power_sweep
    margin = float(np.min(tpi2 - t0))
    ok = bool(np.all(tpi2 >= t0 - 1e-12))
    assert _report("1b", ok, f"T(pi/2) >= T(0) everywhere, min margin {margin:.3e}")


def test_criterion_1c_interior_maximum_in_window(power_sweep):
    powers, _, tpi2, _ = power_sweep
    interior = [
        i for i in range(1, len(tpi2) - 1)
        if tpi2[i] > tpi2[i - 1] and tpi2[i] > tpi2[i + 1]
    ]
    in_window = [i for i in interior if 3.0 <= powers[i] <= 30.0]
    ok = len(in_window) == 1
    where = (
        f"local max at {powers[in_window[0]]:.1f} mW" if in_window
        else f"no interior maximum; curve is monotone, argmax at {powers[np.argmax(tpi2)]:.0f} mW"
    )
    assert _report("1c", ok, f"single interior max of T(pi/2) in 3-30 mW: {where}")


# --- criterion 2: noisy fit round trip ------------------------------------

def test_criterion_2_fit_round_trip():
    truth = cs.FitParams.default()
    powers = np.geomspace(0.3e-3, 100e-3, 30)
    dataset = cs.synthesize_dataset(truth, powers, noise=0.01, seed=1234)
    start = time.perf_counter()
    result = cs.fit(dataset)
    elapsed = time.perf_counter() - start
    errors = np.abs(result.params.as_array() / truth.as_array() - 1.0)
    detail = ", ".join(
        f"{name} {err * 100:.1f}%" for name, err in zip(cs.PARAM_NAMES, errors)
    )
    ok = bool(np.all(errors <= 0.05)) and result.converged and elapsed < 30.0
    assert _report(
        "2", ok, f"recovery errors: {detail}; fit took {elapsed:.1f}s (budget 30s)"
    )


# --- criterion 3: depletion invariant and the independent ODE lane ---------

def test_criterion_3_depletion_invariant():
    med = cs.MediumParams.quantum_defaults()
    profile = cs.solve_profile(1.0, med, n_points=1000)
    invariant = np.log(profile.values) + 3.0 * profile.values + profile.zeta
    spread = float(np.max(np.abs(invariant - invariant[0])))
    ode = cs.integrate_profile_ode(1.0, med, profile.zeta)
    rel = float(np.max(np.abs(profile.values / ode - 1.0)))
    ok = spread <= 1e-10 and rel <= 1e-9
    assert _report(
        "3", ok,
        f"ln s + 3s + zeta spread {spread:.2e} (<= 1e-10) at 1000 points, "
        f"vs adaptive ODE max rel {rel:.2e} (<= 1e-9)",
    )


# --- criterion 4: deterministic oracle vs closed forms ---------------------

def test_criterion_4_deterministic_oracle_grid():
    depths = (0.3, 1.0, 2.0, 4.0, 8.0)
    start = time.perf_counter()
    worst = 0.0
    count = 0
    for s0 in (0.3, 1.0, 3.0):
        for zeta in depths:
            med = _unit_medium(zeta)
            profile = cs.solve_profile(s0, med, n_points=129)
            for quadrature in ("P", "Q"):
                rep = cs.deterministic_noise_integral(quadrature, profile, med, nu=0.0)
                worst = max(worst, rep.rel_error)
                count += 1
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-6 and elapsed < 10.0
    assert _report(
        "4", ok,
        f"{count} spectra (s0 in {{0.3, 1, 3}} x 5 depths x P, Q at nu = 0), "
        f"worst rel error {worst:.2e} (<= 1e-6), took {elapsed:.1f}s (budget 10s)",
    )


# --- criterion 5: Monte Carlo oracle ---------------------------------------

def test_criterion_5_monte_carlo():
    med = _unit_medium(cs.zeta_for_gain(1.0, 2.0))
    profile = cs.solve_profile(1.0, med, n_points=129)
    config = cs.OracleConfig(n_trajectories=100_000, spatial_steps=512, seed=0)
    start = time.perf_counter()
    details = []
    ok = True
    for quadrature in ("P", "Q"):
        rep = cs.monte_carlo_fluctuations(quadrature, profile, med, config=config)
        pulls = abs(rep.oracle_value - rep.closed_form) / rep.statistical_sigma
        rel_sigma = rep.statistical_sigma / rep.closed_form
        ok = ok and pulls <= 3.0 and rel_sigma <= 0.02
        details.append(
            f"S_{quadrature} pull {pulls:.2f} sigma, sigma/value {rel_sigma * 100:.2f}%"
        )
    elapsed = time.perf_counter() - start
    ok = ok and elapsed < 60.0
    assert _report(
        "5", ok,
        f"1e5 trajectories, seed 0, coherent, s0 = 1, half depletion: "
        f"{'; '.join(details)}; took {elapsed:.1f}s (budget 60s)",
    )


# --- criterion 6: variance evolution families ------------------------------

def test_criterion_6a_coherent_family():
    grid = np.linspace(0.0, 30.0, 301)
    table = cs.variance_evolution(cs.InputFieldState.coherent(), 1.0, grid)
    increasing = bool(np.all(np.diff(table.s_q) > 0.0))
    above = bool(np.all(table.s_p[1:] > 1.0))
    tail = abs(float(table.s_p[-1]) - 1.0)
    ok = increasing and above and tail < 1e-6
    assert _report(
        "6a", ok,
        f"coherent: S_Q strictly increasing, S_P > 1 for zeta > 0, "
        f"S_P(zeta = 30) - 1 = {tail:.1e} (-> 1 as the pump empties)",
    )


def test_criterion_6b_p_squeezed_family():
    grid = np.linspace(0.0, 12.0, 241)
    state = cs.InputFieldState.p_squeezed(10.0)
    table = cs.variance_evolution(state, 1.0, grid)
    floor = bool(np.all(table.s_p[1:] > state.s_p_input))
    deep_p = float(table.s_p[-1])
    deep_q = float(table.s_q[-1])
    deep = deep_p >= 1.0 and deep_q >= 1.0
    ok = floor and deep
    assert _report(
        "6b", ok,
        f"10 dB P-squeezed input: S_P > 0.1 at every depth, and deep in the "
        f"medium (zeta = 12) S_P = {deep_p:.3f}, S_Q = {deep_q:.1f}, both >= 1",
    )


def test_criterion_6c_q_squeezed_family():
    grid = np.linspace(0.0, 12.0, 241)
    state = cs.InputFieldState.q_squeezed(10.0)
    table = cs.variance_evolution(state, 1.0, grid)
    gains = np.array([1.0 / float(cs.saturation_exact(1.0, z)) for z in grid])
    expected = 1.1 * gains - 1.0
    match = bool(np.allclose(table.s_q, expected, rtol=1e-12, atol=1e-12))
    positive = bool(np.all(table.s_q[1:] > state.s_q_input))
    ok = match and positive
    assert _report(
        "6c", ok,
        f"10 dB Q-squeezed input: S_Q = 1.1 G - 1 on the whole grid "
        f"(max dev {np.max(np.abs(table.s_q - expected)):.1e}) and stays above 0.1",
    )


# --- criterion 7: fluctuation-dissipation engine vs the coefficient table --

def test_criterion_7_einstein_engine_table():
    med = _unit_medium(1.0)
    worst = 0.0
    for s in (0.0, 0.5, 1.0, 10.0):
        c = cs.force_correlators(s, med)
        expected = {
            "population": med.gamma0 * s / (1.0 + 3.0 * s),
            "raising_lower": med.gamma0,
            "absorption_combo": med.gamma0,
            "phase_combo": -med.gamma0,
            "plus_literal": 0.0,
            "minus_literal": 0.0,
            "lower_raising": 0.0,
            "cross_population_absorption": 0.0,
            "cross_population_phase": 0.0,
        }
        for key, want in expected.items():
            worst = max(worst, abs(c[key] - want))
    ok = worst <= 1e-15
    assert _report(
        "7", ok,
        f"engine vs coefficient table at s in {{0, 0.5, 1, 10}}: "
        f"worst abs deviation {worst:.1e} (machine precision)",
    )


# --- criterion 8: vacuum normalization --------------------------------------

def test_criterion_8_entry_normalization():
    med = _unit_medium(cs.zeta_for_gain(1.0, 2.0))
    profile = cs.solve_profile(1.0, med, n_points=129)
    coh = cs.InputFieldState.coherent()
    exact = (
        cs.squeezing_spectrum_p(coh, profile, 0.0, 0.0, med) == 1.0
        and cs.squeezing_spectrum_q(coh, profile, 0.0, 0.0, med) == 1.0
    )
    rep0 = cs.deterministic_noise_integral("P", profile, med, z=0.0)
    oracle_entry = rep0.oracle_value == 1.0
    # slice-to-continuum: a very thin slab reproduces 1 + (density) * dzeta
    thin_med = _unit_medium(1e-6)
    thin = cs.solve_profile(1.0, thin_med, n_points=65)
    worst = 0.0
    for quadrature in ("P", "Q"):
        rep = cs.deterministic_noise_integral(quadrature, thin, thin_med, nu=0.0)
        worst = max(worst, rep.rel_error)
    ok = exact and oracle_entry and worst <= 1e-9
    assert _report(
        "8", ok,
        f"coherent input gives S_P = S_Q = 1 exactly at z = 0; thin-slab "
        f"oracle matches the closed forms to {worst:.1e} (<= 1e-9)",
    )


# --- criterion 9: eigenvalue structure and the adiabatic expansion ----------

def test_criterion_9_eigenvalues_and_expansion():
    med = _unit_medium(2.0)
    s = 1.0
    delta = cs.delta_cpo(s, med)
    k = med.coupling_density / (med.gamma0 * 4.0)

    nu_grid = np.linspace(-2.0, 2.0, 81) * delta
    mags = np.array([abs(cs.eigenvalues(s, nu, delta, med).lambda1) for nu in nu_grid])
    flat = float(np.max(np.abs(mags / k - 1.0)))

    ev0 = cs.eigenvalues(s, 0.0, delta, med)
    opposite = ev0.lambda1 == -ev0.lambda2

    nu = 0.1 * delta
    gain, group, curvature = cs.adiabatic_expansion(s, nu, delta, med)
    approx = complex(gain + curvature, nu * (group - 1.0 / C_LIGHT))
    exact_ev = cs.eigenvalues(s, nu, delta, med).lambda1
    adiabatic_err = abs(approx - exact_ev) / abs(exact_ev)

    ok = flat <= 1e-14 and opposite and adiabatic_err <= 2e-3
    assert _report(
        "9", ok,
        f"|lambda1| flat to {flat:.1e} over nu in [-2, 2] Delta; "
        f"lambda1(0) == -lambda2 exactly; adiabatic error at nu = 0.1 Delta "
        f"is {adiabatic_err:.2e} (<= 2e-3)",
    )
