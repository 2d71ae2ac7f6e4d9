import csv

import numpy as np
import pytest

from dickelattice import (BoundaryCondition, DomainError, LatticeParams,
                          MeanFieldState, ShapeError, cyclic_shift, hop_matrix,
                          integrate, jacobian_packed, normal_state,
                          inverted_normal_state, perturbed_normal_state,
                          reflect, relax_to_steady, rhs, rhs_packed,
                          rhs_sup_norm, z2_flip)

PBC = BoundaryCondition.Periodic
OBC = BoundaryCondition.Open

P = LatticeParams(n_sites=3, kappa=0.4, xi=0.2, g=0.6, bc=PBC)
P_OPEN = LatticeParams(n_sites=3, kappa=0.4, xi=0.2, g=0.6, bc=OBC)


def _random_sphere_state(rng, n):
    a = 0.5 * (rng.normal(size=n) + 1j * rng.normal(size=n))
    phi = rng.uniform(0, 2 * np.pi, n)
    theta = rng.uniform(0, np.pi, n)
    s = 0.5 * np.sin(theta) * np.exp(1j * phi)
    z = 0.5 * np.cos(theta)
    return MeanFieldState(a=a, s=s, z=z)


def test_hop_matrix_corners():
    t_ring = hop_matrix(LatticeParams(n_sites=4, xi=0.3, bc=PBC))
    t_open = hop_matrix(LatticeParams(n_sites=4, xi=0.3, bc=OBC))
    assert t_ring[0, 3] == 0.3 and t_ring[3, 0] == 0.3
    assert t_open[0, 3] == 0.0 and t_open[3, 0] == 0.0
    off = np.diag(np.full(3, 0.3), 1)
    assert np.array_equal(t_open, off + off.T)
    assert np.array_equal(t_ring, t_ring.T)


def test_dark_states_are_fixed_points():
    for state in (normal_state(3), inverted_normal_state(3)):
        for params in (P, P_OPEN):
            assert rhs_sup_norm(state, params) == 0.0


def test_rhs_sign_flip_equivariance():
    rng = np.random.default_rng(4)
    state = _random_sphere_state(rng, 3)
    for params in (P, P_OPEN):
        lhs = rhs(z2_flip(state), params)
        ref = rhs(state, params)
        assert lhs.a == pytest.approx(-ref.a, abs=1e-14)
        assert lhs.s == pytest.approx(-ref.s, abs=1e-14)
        assert lhs.z == pytest.approx(ref.z, abs=1e-14)


def test_rhs_translation_equivariance_ring_only():
    rng = np.random.default_rng(5)
    state = _random_sphere_state(rng, 5)
    p = LatticeParams(n_sites=5, kappa=0.4, xi=0.3, g=0.7, bc=PBC)
    shifted = rhs(cyclic_shift(state, 2), p)
    ref = cyclic_shift(rhs(state, p), 2)
    assert shifted.pack() == pytest.approx(ref.pack(), abs=1e-14)


def test_rhs_reflection_equivariance_open_chain():
    rng = np.random.default_rng(6)
    state = _random_sphere_state(rng, 5)
    p = LatticeParams(n_sites=5, kappa=0.4, xi=0.3, g=0.7, bc=OBC)
    refl = rhs(reflect(state), p)
    ref = reflect(rhs(state, p))
    assert refl.pack() == pytest.approx(ref.pack(), abs=1e-14)


def test_rhs_shape_error():
    with pytest.raises(ShapeError):
        rhs_packed(np.zeros(14), P)
    with pytest.raises(ShapeError):
        rhs(normal_state(4), P)


@pytest.mark.parametrize("params", [P, P_OPEN,
                                    LatticeParams(n_sites=4, kappa=0.1,
                                                  xi=-0.4, g=1.1, bc=PBC)])
def test_jacobian_matches_finite_differences(params):
    rng = np.random.default_rng(7)
    n = params.n_sites
    h = 1e-6
    for _ in range(5):
        y = _random_sphere_state(rng, n).pack()
        jac = jacobian_packed(y, params)
        fd = np.empty_like(jac)
        for i in range(5 * n):
            e = np.zeros(5 * n)
            e[i] = h
            fd[:, i] = (rhs_packed(y + e, params) - rhs_packed(y - e, params)) / (2 * h)
        assert np.max(np.abs(jac - fd)) < 1e-6


def test_integrate_record_cadence_and_drift():
    s0 = perturbed_normal_state(3, rng_seed=0)
    traj = integrate(s0, P, 5.0, record_every=1.0)
    assert traj.times == pytest.approx([0, 1, 2, 3, 4, 5])
    assert len(traj.states) == 6
    assert traj.spin_drift < 1e-10  # short run, tight tolerances
    with pytest.raises(DomainError):
        integrate(s0, P, -1.0)
    with pytest.raises(DomainError):
        integrate(s0, P, 5.0, record_every=0.0)


def test_integrate_spin_projection_pins_defect():
    s0 = perturbed_normal_state(3, rng_seed=0)
    traj = integrate(s0, P, 10.0, record_every=2.0, project_spin=True)
    assert traj.spin_drift < 1e-12


def test_trajectory_csv_roundtrip(tmp_path):
    s0 = perturbed_normal_state(3, rng_seed=1)
    traj = integrate(s0, P, 3.0, record_every=1.0)
    path = tmp_path / "traj.csv"
    traj.to_csv(path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t"] + [f"{name}_{j}" for j in (1, 2, 3)
                               for name in ("re_a", "im_a", "re_s", "im_s", "z")]
    assert len(rows) == 1 + len(traj.times)
    # repr-format values reparse to the exact floats
    last = [float(x) for x in rows[-1]]
    assert last[0] == traj.times[-1]
    assert last[1] == traj.final_state.a[0].real
    assert last[5] == traj.final_state.z[0]


def test_relax_normal_state_settles_immediately():
    res = relax_to_steady(normal_state(3), P)
    assert res.settled and res.t_final == 0.0 and res.rhs_norm == 0.0


def test_relax_below_threshold_returns_to_dark_state():
    p = LatticeParams(n_sites=3, kappa=0.4, xi=0.2, g=0.3, bc=PBC)
    res = relax_to_steady(perturbed_normal_state(3, rng_seed=2), p, t_max=200.0)
    assert res.settled
    assert np.max(np.abs(res.state.a)) < 1e-8
    assert res.state.z == pytest.approx(np.full(3, -0.5), abs=1e-7)


def test_perturbed_normal_state_properties():
    s1 = perturbed_normal_state(4, rng_seed=9, scale=1e-3)
    s2 = perturbed_normal_state(4, rng_seed=9, scale=1e-3)
    assert np.array_equal(s1.pack(), s2.pack())
    assert np.abs(s1.a) == pytest.approx(np.full(4, 1e-3), rel=1e-12)
    assert np.abs(s1.s) == pytest.approx(np.full(4, 1e-3), rel=1e-12)
    assert s1.spin_defect() < 1e-15
    s3 = perturbed_normal_state(4, rng_seed=10, scale=1e-3)
    assert not np.array_equal(s1.pack(), s3.pack())
