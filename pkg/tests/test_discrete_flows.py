import numpy as np
import pytest

from deformcs.algebra_core import assoc_residual
from deformcs.closed_forms import SolutionFamily, eval_family
from deformcs.dda_registry import discrete_cs_residual
from deformcs.discrete_flows import (discrete_oriented_assoc_residual, init_map_state,
                                     lattice_field_from_l5_orbit, map_invariants,
                                     oriented_assoc_defect, orbit, step)
from deformcs.errors import (InvalidInputError, SingularGaugeError, SingularOrbitError)

GAUGE_CUBIC = ([1.0, 0.3], [0.0, 1.0, 0.1], [0.2, 0.0, 1.0, 0.05])


def _phi_samples(coeffs, xs):
    return np.array([np.polynomial.polynomial.polyval(xs.astype(float), np.array(c))
                     for c in coeffs])


# ---------------------------------------------------------------------------
# Hand-checked transitions.
# ---------------------------------------------------------------------------

def test_l4_hand_transitions():
    st = init_map_state("L4", dict(B=1, C=1, E=0, G=1, M=1, N=0))
    s1 = step("L4", st)
    e1 = s1.entries()
    assert (e1["E"], e1["G"], e1["M"], e1["N"]) == (1.0, 0.0, 0.0, 1.0)
    s2 = step("L4", s1)
    e2 = s2.entries()
    assert (e2["E"], e2["G"], e2["M"], e2["N"]) == (1.0, 0.0, 0.0, 1.0)  # fixed point


def test_l4_hand_invariants():
    st = init_map_state("L4", dict(B=1, C=1, E=0, G=1, M=1, N=0))
    inv = map_invariants("L4", st)
    U = st.pair.C2 @ np.linalg.inv(st.pair.C1)
    assert np.allclose(U, [[-1, 1], [1, 0]])
    assert inv["I1"] == pytest.approx(-1.0)
    assert inv["I2"] == pytest.approx(1.5)
    s1 = step("L4", st)
    U1 = s1.pair.C2 @ np.linalg.inv(s1.pair.C1)
    assert np.allclose(U1, [[0, 1], [1, -1]])
    inv1 = map_invariants("L4", s1)
    assert inv1["I1"] == pytest.approx(-1.0)
    assert inv1["I2"] == pytest.approx(1.5)


def test_l2b_hand_transition():
    st = init_map_state("L2b", dict(B=1, C=0, E=1, G=1, M=1, N=1))
    s1 = step("L2b", st)
    e1 = s1.entries()
    assert (e1["E"], e1["G"], e1["M"], e1["N"]) == (0.0, 1.0, 0.0, 2.0)
    before, after = map_invariants("L2b", st), map_invariants("L2b", s1)
    assert before["I1"] == after["I1"] == 2.0
    assert before["det_C2"] == after["det_C2"] == 0.0


# ---------------------------------------------------------------------------
# Conjugation laws and invariants.
# ---------------------------------------------------------------------------

def test_l2b_step_is_lax_conjugation():
    rng = np.random.default_rng(41)
    st = init_map_state("L2b", dict(B=1.2, C=0.3, E=0.8, G=1.5, M=0.4, N=0.9))
    for _ in range(5):
        nxt = step("L2b", st)
        want = np.linalg.inv(st.pair.C1) @ st.pair.C2 @ st.pair.C1
        assert np.max(np.abs(nxt.pair.C2 - want)) < 1e-12
        st = nxt


def test_l4_step_is_u_conjugation():
    st = init_map_state("L4", dict(B=1, C=1, E=0.4, G=1.3, M=0.8, N=-0.2))
    for _ in range(5):
        nxt = step("L4", st)
        U = st.pair.C2 @ np.linalg.inv(st.pair.C1)
        TU = nxt.pair.C2 @ np.linalg.inv(nxt.pair.C1)
        want = np.linalg.inv(st.pair.C1) @ U @ st.pair.C1
        assert np.max(np.abs(TU - want)) < 1e-12
        st = nxt


def test_l4_general_free_constants_match_matrix_form():
    # for B, C other than 1 the step solves C1 TC2 = C2 TC1 directly
    st = init_map_state("L4", dict(B=0.7, C=-0.4, E=0.4, G=1.3, M=0.8, N=-0.2))
    nxt = step("L4", st)
    lhs = st.pair.C1 @ nxt.pair.C2
    rhs = st.pair.C2 @ nxt.pair.C1
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_l5_step_satisfies_central_system_and_conjugation():
    st = init_map_state("L5", dict(B=1.0, C=0.2, E=0.7, G=1.3, M=0.5, N=1.1))
    for _ in range(6):
        nxt = step("L5", st)
        # C1 TC2 = C2 T^-1C1
        lhs = st.pair.C1 @ nxt.pair.C2
        rhs = st.pair.C2 @ st.prev_C1
        assert np.max(np.abs(lhs - rhs)) < 1e-12
        # TV = C2 V C2^-1
        want = st.pair.C2 @ st.V @ np.linalg.inv(st.pair.C2)
        assert np.max(np.abs(nxt.V - want)) < 1e-12
        st = nxt


@pytest.mark.parametrize("dda,entries", [
    ("L2b", dict(B=1.2, C=0.3, E=0.8, G=1.5, M=0.4, N=0.9)),
    ("L4", dict(B=1.0, C=1.0, E=0.4, G=1.3, M=0.8, N=-0.2)),
    ("L5", dict(B=1.0, C=0.2, E=0.7, G=1.3, M=0.5, N=1.1)),
])
def test_invariants_conserved_over_fifty_steps(dda, entries):
    run = orbit(dda, init_map_state(dda, entries), 50)
    assert run.status == "completed"
    history = [iv for iv in run.invariant_history if iv]
    assert len(history) == 51
    for name, ref in history[0].items():
        drift = max(abs(iv[name] - ref) for iv in history)
        assert drift <= 1e-10 * max(1.0, abs(ref)), (dda, name)


def test_l4_eigenvalues_of_u_are_step_invariant():
    st = init_map_state("L4", dict(B=1, C=1, E=0.4, G=1.3, M=0.8, N=-0.2))
    def eigs(s):
        U = s.pair.C2 @ np.linalg.inv(s.pair.C1)
        return np.sort_complex(np.linalg.eigvals(U))
    ref = eigs(st)
    for _ in range(10):
        st = step("L4", st)
        assert np.max(np.abs(eigs(st) - ref)) < 1e-12


# ---------------------------------------------------------------------------
# Degeneracy handling.
# ---------------------------------------------------------------------------

def test_l4_degenerate_denominator_raises():
    st = init_map_state("L4", dict(B=1, C=1, E=0.5, G=0.5, M=0.8, N=-0.2))
    with pytest.raises(SingularOrbitError) as err:
        step("L4", st)
    assert err.value.quantity == "E-G"
    assert abs(err.value.value) < 1e-12


def test_orbit_truncates_at_degeneracy_without_crashing():
    st = init_map_state("L4", dict(B=1, C=1, E=0.5, G=0.5, M=0.8, N=-0.2))
    run = orbit("L4", st, 10)
    assert run.status == "truncated"
    assert "singular" in run.diagnostic
    assert len(run.states) == 1
    assert "E_minus_G_degenerate" in run.states[0].flags


def test_l2b_degenerate_det_raises():
    st = init_map_state("L2b", dict(B=1.0, C=1.0, E=1.0, G=1.0, M=0.3, N=0.4))
    with pytest.raises(SingularOrbitError) as err:
        step("L2b", st)
    assert err.value.quantity == "BG-CE"


def test_step_rejects_unknown_or_3x3():
    with pytest.raises(InvalidInputError):
        init_map_state("L2a", dict(B=1, C=1, E=0, G=1, M=1, N=0))


# ---------------------------------------------------------------------------
# L5 orbits as discrete deformations on the 2-lattice.
# ---------------------------------------------------------------------------

def test_l5_orbit_solves_discrete_central_system_on_lattice():
    st = init_map_state("L5", dict(B=1.0, C=0.2, E=0.7, G=1.3, M=0.5, N=1.1))
    run = orbit("L5", st, 12)
    tg = lattice_field_from_l5_orbit(run, (5, 5))
    rep = discrete_cs_residual(tg)
    assert max(rep.norms) < 1e-12


def test_lattice_needs_enough_states():
    st = init_map_state("L5", dict(B=1.0, C=0.2, E=0.7, G=1.3, M=0.5, N=1.1))
    run = orbit("L5", st, 3)
    with pytest.raises(InvalidInputError):
        lattice_field_from_l5_orbit(run, (5, 5))


# ---------------------------------------------------------------------------
# Discrete oriented associativity.
# ---------------------------------------------------------------------------

def test_oriented_assoc_equals_commutator_checked_independently():
    xs = np.arange(-4, 6)
    phi = _phi_samples(GAUGE_CUBIC, xs)
    rep = discrete_oriented_assoc_residual(phi, xs)
    fam = SolutionFamily("GaugeL5", {"phi0": list(GAUGE_CUBIC[0]),
                                     "phi1": list(GAUGE_CUBIC[1]),
                                     "phi2": list(GAUGE_CUBIC[2])})
    assert len(rep.labels) > 0
    for label, norm in zip(rep.labels, rep.norms):
        x = float(label.split("=")[1])
        assert norm == pytest.approx(assoc_residual(eval_family(fam, x)), abs=1e-12)
        assert norm > 1e-3  # the cubic gauge field is genuinely non-iso-associative


def test_oriented_assoc_diagonal_slots_vanish():
    xs = np.arange(-4, 6)
    phi = _phi_samples(GAUGE_CUBIC, xs)
    R = oriented_assoc_defect(phi, xs, 0)
    for j in range(3):
        assert np.max(np.abs(R[j, j])) == 0.0
    # pairs involving the unit direction commute as well
    assert np.max(np.abs(R[0, 1])) < 1e-12
    assert np.max(np.abs(R[0, 2])) < 1e-12
    assert np.allclose(R[1, 2], -R[2, 1])


def test_oriented_assoc_singular_gauge():
    xs = np.arange(-3, 4)
    phi0 = 1.0 + xs.astype(float)
    phi = np.array([phi0, 2.0 * phi0, 3.0 * phi0])
    with pytest.raises(SingularGaugeError):
        discrete_oriented_assoc_residual(phi, xs)


def test_oriented_assoc_interval_too_short():
    xs = np.arange(0, 3)
    phi = _phi_samples(GAUGE_CUBIC, xs)
    with pytest.raises(InvalidInputError):
        discrete_oriented_assoc_residual(phi, xs)
