import numpy as np
import pytest

from rabi_balance import (
    AmplitudeTooLarge,
    FockRep,
    ModelParams,
    OptimizerOptions,
    OptimizerStalled,
    SqueezeTooLarge,
    TrialParams,
    balance_residuals,
    energy_closed_form,
    energy_numeric,
    minimize_energy,
    solve_rabi_ground,
    stationarity_equals_balance,
    trial_property_compliance,
    trial_state,
    wigner_origin,
)
from rabi_balance.fock import _unitary_from_generator, BOSON, QuantumState
from rabi_balance.variational import energy_gradient

from conftest import coherent_vector


def test_trial_params_box():
    with pytest.raises(AmplitudeTooLarge):
        TrialParams(beta=7.0, gamma=0.0)
    with pytest.raises(SqueezeTooLarge):
        TrialParams(beta=0.0, gamma=2.5)


def test_trial_state_trivial_cases():
    rep = FockRep(40)
    vac = trial_state(rep, TrialParams(0.0, 0.0))
    assert vac.amplitudes[0] == pytest.approx(1.0, abs=1e-14)
    coh = trial_state(rep, TrialParams(0.5, 0.0))
    np.testing.assert_allclose(coh.amplitudes.real, coherent_vector(40, 0.5), atol=1e-12)


def test_closed_form_trivial_points():
    p = ModelParams(omega=1.0, lam=0.5, omega0=1.0)
    assert energy_closed_form(TrialParams(0.0, 0.0), p) == pytest.approx(-0.5, abs=1e-15)
    # beta = -lam/omega, gamma = 0: -lam^2/omega - (omega0/2) e^{-2 lam^2/omega^2}
    want = -0.25 - 0.5 * np.exp(-0.5)
    assert energy_closed_form(TrialParams(-0.5, 0.0), p) == pytest.approx(want, abs=1e-15)


def test_squeeze_term_is_sinh_squared_not_sinh_of_square():
    # the numeric oracle separates the two candidate squeeze-energy
    # terms by ~0.025 at gamma = 0.5, far beyond its 1e-10 accuracy
    p = ModelParams(omega=1.0, lam=0.5, omega0=1.0)
    t = TrialParams(0.3, 0.5)
    numeric = energy_numeric(FockRep(80), t, p)
    closed = energy_closed_form(t, p)
    assert abs(closed - numeric) < 1e-10
    wrong = closed - np.sinh(0.5) ** 2 + np.sinh(0.25)
    assert abs(wrong - numeric) > 1e-2


def test_operator_ordering_is_squeeze_after_displacement():
    # the closed form describes S(gamma) D(beta) |0>; the reversed
    # product D(beta) S(gamma) |0> has a visibly different energy
    p = ModelParams(omega=1.0, lam=0.5, omega0=1.0)
    t = TrialParams(0.3, 0.5)
    rep = FockRep(80)
    disp = _unitary_from_generator(rep.working_dim, "displace", t.beta, 0.0)
    sq = _unitary_from_generator(rep.working_dim, "squeeze", t.gamma, 0.0)
    reversed_vec = disp @ sq[:, 0]
    from rabi_balance.model import build_reduced_hamiltonian
    from rabi_balance.fock import expectation

    wide = FockRep(rep.working_dim, working_dim=rep.working_dim)
    h = build_reduced_hamiltonian(wide, p, +1)
    e_reversed = expectation(QuantumState.from_vector(reversed_vec, BOSON), h).real
    assert abs(energy_closed_form(t, p) - e_reversed) > 1e-3
    assert energy_numeric(rep, t, p) == pytest.approx(energy_closed_form(t, p), abs=1e-10)


def test_energy_numeric_truncation_self_oracle(rng):
    # values must be N-independent once the working space swallows the
    # leakage: N = 80 and N = 140 agree to 1e-9 across the box
    p = ModelParams(omega=1.0, lam=0.6, omega0=0.8)
    r80, r140 = FockRep(80), FockRep(140)
    for _ in range(8):
        t = TrialParams(float(rng.uniform(-2, 2)), float(rng.uniform(-1, 1)))
        assert abs(energy_numeric(r80, t, p) - energy_numeric(r140, t, p)) < 1e-9


def test_closed_form_matches_numeric_on_grid():
    p = ModelParams(omega=1.0, lam=0.6, omega0=0.8)
    rep = FockRep(120)
    for beta in np.linspace(-2, 2, 5):
        for gamma in np.linspace(-1, 1, 5):
            t = TrialParams(float(beta), float(gamma))
            assert abs(energy_closed_form(t, p) - energy_numeric(rep, t, p)) < 1e-8


def test_zero_splitting_energy_pattern_under_pinned_squeeze():
    # omega0 = 0 along beta = -(lam/omega) e^{-gamma}: the closed form
    # collapses to -lam^2/omega + omega sinh^2 gamma, minimized at gamma=0
    p = ModelParams(omega=1.0, lam=0.5, omega0=0.0)
    for gamma in (0.0, 0.4, -0.3):
        t = TrialParams(-0.5 * np.exp(-gamma), gamma)
        want = -0.25 + np.sinh(gamma) ** 2
        assert energy_closed_form(t, p) == pytest.approx(want, abs=1e-14)


def test_gradient_step_insensitivity():
    p = ModelParams(omega=1.0, lam=0.7, omega0=1.1)
    t = TrialParams(-0.4, 0.1)
    g1 = energy_gradient(t, p, step=1e-5)
    g2 = energy_gradient(t, p, step=1e-6)
    assert np.linalg.norm(g1 - g2) / np.linalg.norm(g1) < 1e-4


def test_minimize_uncoupled_recovers_vacuum():
    res = minimize_energy(ModelParams(omega=1.0, lam=0.0, omega0=1.0))
    assert res.energy == pytest.approx(-0.5, abs=1e-12)
    assert abs(res.trial.beta) < 1e-6
    assert abs(res.gap) < 1e-9


def test_minimize_zero_splitting_recovers_coherent_state():
    res = minimize_energy(ModelParams(omega=1.0, lam=0.5, omega0=0.0))
    assert res.energy == pytest.approx(-0.25, abs=1e-10)
    assert res.trial.beta == pytest.approx(-0.5, abs=1e-5)
    assert abs(res.trial.gamma) < 1e-4
    assert abs(res.gap) < 1e-9


def test_gap_is_small_at_weak_coupling():
    res = minimize_energy(ModelParams(omega=1.0, lam=0.2, omega0=0.5))
    assert res.gap >= -1e-9
    assert res.gap / abs(res.exact_energy) < 1e-2


def test_stationarity_equals_balance_at_optimum():
    p = ModelParams(omega=1.0, lam=0.5, omega0=1.0)
    res = minimize_energy(p)
    assert res.grad_norm < 1e-6
    assert res.b1_residual < 1e-5
    assert res.b7_residual < 1e-5
    # moving off the optimum lights up both diagnostics
    pert = TrialParams(res.trial.beta + 0.1, res.trial.gamma)
    grad, b1, b7 = stationarity_equals_balance(p, pert)
    assert np.linalg.norm(grad) > 1e-3
    assert b1 > 1e-4 or b7 > 1e-4


def test_gradient_components_are_scaled_balance_residuals():
    # dE/dgamma = -2 R_b1 and |dE/dbeta| = e^gamma R_b7 / (m omega lam)
    # at any trial point, not only at stationarity
    p = ModelParams(omega=1.0, lam=0.5, omega0=1.0)
    t = TrialParams(-0.3, 0.2)
    grad = energy_gradient(t, p)
    b1, b7 = balance_residuals(t, p)
    assert abs(grad[1]) == pytest.approx(2.0 * b1, rel=1e-6)
    assert abs(grad[0]) == pytest.approx(np.exp(t.gamma) * b7 / p.lam, rel=1e-6)


def test_trial_parity_depends_only_on_displacement():
    rep = FockRep(120)
    target = 2.0 * np.exp(-2.0 * 0.8**2)
    for gamma in (0.0, 0.4, -0.6):
        st_t = trial_state(rep, TrialParams(0.8, gamma))
        assert wigner_origin(st_t) == pytest.approx(target, abs=1e-12)


def test_trial_compliance_at_optimum_and_off_optimum():
    p = ModelParams(omega=1.0, lam=0.5, omega0=1.0)
    res = minimize_energy(p)
    comp = trial_property_compliance(FockRep(160), res.trial, p)
    assert all(chk.satisfied for chk in comp.values())

    # far from the optimum the operator identities still hold but the
    # ground-state properties give out
    p_weak = ModelParams(omega=1.0, lam=0.1, omega0=1.0)
    comp2 = trial_property_compliance(FockRep(160), TrialParams(2.0, 0.0), p_weak)
    for name in ("p2_identity", "p4_identity", "b6_identity"):
        assert comp2[name].satisfied, name
    for name in ("p1", "p3", "b2"):
        assert not comp2[name].satisfied, name


def test_optimizer_stall_carries_best_effort():
    p = ModelParams(omega=1.0, lam=0.5, omega0=1.0)
    with pytest.raises(OptimizerStalled) as err:
        minimize_energy(p, options=OptimizerOptions(maxfev=1))
    assert err.value.result.trial is not None


def test_variational_bound_against_exact(rng):
    for _ in range(4):
        p = ModelParams(
            omega=1.0,
            lam=float(rng.uniform(0.0, 1.5)),
            omega0=float(rng.uniform(0.0, 3.0)),
        )
        res = minimize_energy(p)
        assert res.gap >= -1e-9
