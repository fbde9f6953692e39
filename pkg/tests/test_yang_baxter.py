import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rabi_ybi.models import ModelParams, build_dicke
from rabi_ybi.operator_space import FockSpace, SpinSpace, commutator_residual, spin_op
from rabi_ybi.yang_baxter import (
    PERMUTATION,
    AuxPolynomial,
    SpectralParams,
    charge_residuals,
    check_rtt,
    check_tau_identity,
    check_ybe,
    extract_charges,
    integrable_spectral_params,
    l_boson_polynomial,
    l_site_polynomial,
    l_spin,
    l_spin_polynomial,
    monodromy,
    monodromy_polynomial,
    r_matrix,
    transfer_matrix,
    twist_boson,
    twist_spin,
)

reals = st.floats(-2, 2, allow_nan=False)


def test_r_matrix_at_zero_is_scaled_permutation():
    p = SpectralParams(u=0.0, eta=0.7)
    np.testing.assert_allclose(r_matrix(p), 0.7 * PERMUTATION)


def test_r_matrix_eta_pattern():
    p = SpectralParams(u=1.3, eta=0.4)
    expected = np.array(
        [[1.7, 0, 0, 0], [0, 1.3, 0.4, 0], [0, 0.4, 1.3, 0], [0, 0, 0, 1.7]]
    )
    np.testing.assert_allclose(r_matrix(p), expected)


@settings(max_examples=100, deadline=None)
@given(u=reals, v=reals, eta=reals)
def test_yang_baxter_equation(u, v, eta):
    assert check_ybe(SpectralParams(u=u, v=v, eta=eta)) <= 1e-12


def test_spectral_params_dict_uses_lambda_key():
    p = SpectralParams.from_dict({"u": 0.1, "lambda": 0.5})
    assert p.lam == 0.5
    assert p.to_dict()["lambda"] == 0.5
    with pytest.raises(KeyError):
        SpectralParams.from_dict({"mu": 1.0})


def test_spin_twist_entries():
    spin = SpinSpace(2, "collective")
    W = twist_spin(spin, SpectralParams())
    C = spin_op(spin, "S_plus") + spin_op(spin, "S_minus")
    np.testing.assert_allclose(W.entry(0, 0).data, np.eye(3))
    np.testing.assert_allclose(W.entry(0, 1).data, C.data)
    np.testing.assert_allclose(W.entry(1, 1).data, -np.eye(3))


def test_spin_twist_b_extension():
    spin = SpinSpace(1, "collective")
    W = twist_spin(spin, SpectralParams(b=0.6))
    sx = spin_op(spin, "Sx").data
    np.testing.assert_allclose(W.entry(0, 1).data, 2 * sx)
    np.testing.assert_allclose(W.entry(1, 1).data, -np.eye(2) + 0.6 * sx)
    with pytest.raises(ValueError):
        twist_spin(SpinSpace(2, "collective"), SpectralParams(b=0.6))


def test_boson_twist_entries():
    fock = FockSpace(4)
    W = twist_boson(fock, SpectralParams(lam=0.3, c=0.2))
    x = np.diag(np.sqrt(np.arange(1, 5)), 1)
    x = x + x.T
    np.testing.assert_allclose(W.entry(0, 0).data, 1.3 * np.eye(5))
    np.testing.assert_allclose(W.entry(1, 1).data, 0.7 * np.eye(5))
    np.testing.assert_allclose(W.entry(1, 0).data, x + 0.2 * np.eye(5))


def test_boson_l_operator_alone_satisfies_rtt():
    fock = FockSpace(24)
    p = SpectralParams(u=0.37, v=-1.1, eta=0.8)
    L = l_boson_polynomial(fock, p)
    assert check_rtt(L, p, buffer=2) <= 1e-12
    assert check_rtt(L, p, buffer=0) > 1e-6


@pytest.mark.parametrize("n", [1, 2, 3])
def test_spin_l_operator_alone_satisfies_rtt(n):
    p = SpectralParams(u=0.6, v=1.4, eta=-0.9)
    L = l_spin_polynomial(SpinSpace(n, "collective"), p)
    assert check_rtt(L, p, buffer=0) <= 1e-12


def test_spin_quantum_determinant_is_scalar():
    u, eta = 0.83, 0.61
    spin = SpinSpace(1, "collective")
    L_u = l_spin(spin, SpectralParams(u=u, eta=eta))
    L_s = l_spin(spin, SpectralParams(u=u - eta, eta=eta))
    qdet = L_u.entry(0, 0) @ L_s.entry(1, 1) - L_u.entry(0, 1) @ L_s.entry(1, 0)
    expected = u**2 - u * eta - 0.75 * eta**2
    np.testing.assert_allclose(qdet.data, expected * np.eye(2), atol=1e-14)


def test_monodromy_polynomial_matches_direct_product():
    params = ModelParams.create(0.0, 0.8, 0.5, n_qubits=2, n_max=6)
    p = integrable_spectral_params("delta0", params, u=0.9)
    T = monodromy("delta0", "dicke", params, p)
    space = params.space
    W = twist_spin(space.spin, p).embed(space, "spin")
    L = AuxPolynomial.constant(l_boson_polynomial(space.fock, p)(p.u)).embed(space, "fock")(0.0)
    np.testing.assert_allclose(T.to_dense(), (W @ L).to_dense(), atol=1e-13)


RTT_CASES = [
    ("delta0", "rabi", dict(n_qubits=1)),
    ("omega0", "rabi", dict(n_qubits=1)),
    ("delta0", "dicke", dict(n_qubits=2, rep="full_tensor")),
    ("omega0", "dicke", dict(n_qubits=3, rep="full_tensor")),
    ("delta0", "dicke", dict(n_qubits=4)),
    ("omega0", "dicke", dict(n_qubits=4)),
    ("delta0", "generalized", dict(n_qubits=1, epsilon=0.3)),
    ("omega0", "generalized", dict(n_qubits=1, epsilon=1.0)),
]


def _point_params(point, n_max=16, **kw):
    if point == "delta0":
        return ModelParams.create(0.0, 0.9, 0.45, n_max=n_max, **kw)
    return ModelParams.create(0.7, 0.0, 0.45, n_max=n_max, **kw)


@pytest.mark.parametrize("point, model, kw", RTT_CASES)
def test_rtt_relation(point, model, kw):
    params = _point_params(point, **kw)
    factorised = point == "omega0" and kw.get("rep") == "full_tensor"
    p = integrable_spectral_params(point, params, u=0.41, v=-0.77, eta=1.3)
    if model != "generalized":
        p = dataclasses.replace(p, b=0.0, c=0.0)
    T = monodromy_polynomial(point, model, params, p, factorised)
    projected = check_rtt(T, p, buffer=2)
    assert projected <= 1e-10
    if point == "delta0":
        # the bosonic L-operator feels the Fock cutoff
        assert check_rtt(T, p, buffer=0) >= 1e3 * max(projected, 1e-16)


@pytest.mark.parametrize("point, model, kw", RTT_CASES)
def test_tau_identities(point, model, kw):
    params = _point_params(point, **kw)
    factorised = point == "omega0" and kw.get("rep") == "full_tensor"
    p = integrable_spectral_params(point, params, eta=0.85)
    if model != "generalized":
        p = dataclasses.replace(p, b=0.0, c=0.0)
    assert check_tau_identity(point, model, params, p, factorised) <= 1e-13


def test_point_guards():
    params = ModelParams.create(0.3, 1.0, 0.5, n_max=6)
    p = SpectralParams()
    with pytest.raises(ValueError):
        monodromy_polynomial("delta0", "dicke", params, p)
    with pytest.raises(ValueError):
        monodromy_polynomial("omega0", "dicke", params, p)
    d0 = params.replace(delta=0.0)
    with pytest.raises(ValueError):
        monodromy_polynomial("delta0", "dicke", d0, SpectralParams(b=0.1))
    with pytest.raises(ValueError):
        monodromy_polynomial("delta0", "rabi", d0.replace(n_qubits=2), p)
    with pytest.raises(ValueError):
        monodromy_polynomial("delta0", "dicke", d0, p, factorised=True)


def test_integrable_params():
    p = integrable_spectral_params("delta0", ModelParams.create(0.0, 0.8, 0.4, epsilon=0.2))
    assert p.eta == pytest.approx(2.0)
    assert p.b == pytest.approx(0.2 * 2.0 / 0.4)
    q = integrable_spectral_params("omega0", ModelParams.create(0.6, 0.0, 0.4, epsilon=0.2), eta=1.7)
    assert (q.eta, q.lam, q.c) == pytest.approx((1.7, 1.5, 0.25))


def _symmetric_isometry(n):
    full = SpinSpace(n, "full_tensor")
    lower = spin_op(full, "S_minus").data.real
    cols = [np.eye(2**n)[0]]
    for _ in range(n):
        v = lower @ cols[-1]
        cols.append(v / np.linalg.norm(v))
    return np.stack(cols, axis=1)


def test_factorised_hamiltonian_charge_matches_collective_on_symmetric_states():
    n, n_max = 3, 5
    full = ModelParams.create(0.6, 0.0, 0.35, n_qubits=n, rep="full_tensor", n_max=n_max)
    coll = full.replace(rep="collective")
    p = integrable_spectral_params("omega0", full, eta=0.9)
    tau_f = transfer_matrix(monodromy_polynomial("omega0", "dicke", full, p, factorised=True))
    tau_c = transfer_matrix(monodromy_polynomial("omega0", "dicke", coll, p))
    V = np.kron(_symmetric_isometry(n), np.eye(n_max + 1))
    np.testing.assert_allclose(V.conj().T @ tau_f.coefficient(n - 1).data @ V, tau_c.coefficient(0).data, atol=1e-12)


def test_reversed_site_order_gives_adjoint_transfer_matrix():
    n = 3
    params = ModelParams.create(0.6, 0.0, 0.35, n_qubits=n, rep="full_tensor", n_max=5)
    space = params.space
    p = integrable_spectral_params("omega0", params, eta=0.9)
    tau = transfer_matrix(monodromy_polynomial("omega0", "dicke", params, p, factorised=True))
    rev = AuxPolynomial.constant(twist_boson(space.fock, p).embed(space, "fock"))
    for site in range(n, 0, -1):
        rev = rev @ l_site_polynomial(space.spin, site, p).embed(space, "spin")
    tau_rev = transfer_matrix(rev)
    for k in range(n + 1):
        np.testing.assert_allclose(tau_rev.coefficient(k).data, tau.coefficient(k).dag.data, atol=1e-12)
    # the lower coefficients really are not Hermitian, so the order matters there
    assert np.abs(tau_rev.coefficient(0).data - tau.coefficient(0).data).max() > 1e-3


def test_omega0_charges():
    n = 3
    params = ModelParams.create(0.6, 0.0, 0.35, n_qubits=n, rep="full_tensor", n_max=8)
    p = integrable_spectral_params("omega0", params, eta=1.1)
    tau = transfer_matrix(monodromy_polynomial("omega0", "dicke", params, p, factorised=True))
    charges = extract_charges(tau)
    assert len(charges) == n
    assert charges.powers[charges.hamiltonian_index] == n - 1
    H = build_dicke(params)
    pairwise, with_h = charge_residuals(charges, H, buffer=1)
    assert pairwise.max() <= 1e-10
    assert with_h.max() <= 1e-10
    assert charges.hermiticity_defects[charges.hamiltonian_index] < 1e-12
    assert max(charges.hermiticity_defects) > 1e-3
    for herm, antiherm in charges.hermitian_parts():
        assert herm.is_hermitian(1e-12) and antiherm.is_hermitian(1e-12)
        assert commutator_residual(H, herm) <= 1e-10


def test_delta0_has_single_charge():
    params = ModelParams.create(0.0, 0.8, 0.4, n_qubits=2, n_max=8)
    p = integrable_spectral_params("delta0", params)
    charges = extract_charges(transfer_matrix(monodromy_polynomial("delta0", "dicke", params, p)))
    assert len(charges) == 1
    np.testing.assert_allclose(charges.hamiltonian_charge.data, (p.eta / params.g) * build_dicke(params).data)
