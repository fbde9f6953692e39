"""
Operator-valued auxiliary matrices: twists, L-operators, monodromy and transfer matrices.

Every monodromy entry is polynomial in the spectral parameter, so monodromy
matrices are held as :class:`AuxPolynomial` objects whose coefficients are
multiplied exactly; nothing is interpolated from sample points.

Auxiliary products compose quantum operators left to right in the order the
factors are written, e.g. ``(W L)_{ik} = sum_j W_{ij} L_{jk}``.
"""

from enum import Enum

import numpy as np

from ..models import build_dicke, build_generalized_rabi
from ..operator_space import (
    FockSpace,
    OperatorMatrix,
    SpinRep,
    boson_op,
    identity,
    projector_below,
    spin_op,
)
from .rmatrix import r_matrix


class Point(str, Enum):
    DELTA0 = "delta0"
    OMEGA0 = "omega0"


class AuxModel(str, Enum):
    RABI = "rabi"
    DICKE = "dicke"
    GENERALIZED = "generalized"


def _aux_product(A, B):
    # sum_j A[i, j] @ B[j, k]; explicit matmuls keep BLAS in the loop
    out = np.empty(A.shape[:2] + (A.shape[2], B.shape[3]), dtype=complex)
    for i in range(2):
        for k in range(2):
            out[i, k] = A[i, 0] @ B[0, k] + A[i, 1] @ B[1, k]
    return out


class AuxMatrix:
    """2x2 auxiliary-space matrix whose entries are operators on one quantum space."""

    def __init__(self, data, space):
        data = np.asarray(data, dtype=complex)
        if data.shape != (2, 2, space.dim, space.dim):
            raise ValueError(f"expected shape (2, 2, {space.dim}, {space.dim}), got {data.shape}")
        self.data = data
        self.space = space

    @classmethod
    def from_entries(cls, entries):
        """Build from a nested 2x2 list of :class:`OperatorMatrix`."""
        space = entries[0][0].space
        if any(e.space != space for row in entries for e in row):
            raise ValueError("all entries must share one quantum space")
        data = np.array([[e.data for e in row] for row in entries])
        return cls(data, space)

    def entry(self, i, j):
        return OperatorMatrix(self.data[i, j], self.space)

    def __matmul__(self, other):
        if other.space != self.space:
            raise ValueError("auxiliary matrices act on different quantum spaces")
        return AuxMatrix(_aux_product(self.data, other.data), self.space)

    def trace(self):
        return OperatorMatrix(self.data[0, 0] + self.data[1, 1], self.space)

    def to_dense(self):
        """Full ``2d x 2d`` matrix on ``aux (x) quantum``."""
        d = self.space.dim
        return self.data.transpose(0, 2, 1, 3).reshape(2 * d, 2 * d)

    def embed(self, into, slot):
        """Lift every entry into a product space (see :func:`operator_space.embed`)."""
        d = into.dim
        data = np.empty((2, 2, d, d), dtype=complex)
        for i in range(2):
            for j in range(2):
                if slot == "spin":
                    data[i, j] = np.kron(self.data[i, j], np.eye(into.fock.dim))
                else:
                    data[i, j] = np.kron(np.eye(into.spin.dim), self.data[i, j])
        return AuxMatrix(data, into)


class AuxPolynomial:
    """Polynomial in ``u`` with :class:`AuxMatrix` coefficients, constant term first."""

    def __init__(self, coeffs, space):
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.ndim != 5 or coeffs.shape[1:] != (2, 2, space.dim, space.dim):
            raise ValueError("coefficients must have shape (k, 2, 2, dim, dim)")
        self.coeffs = coeffs
        self.space = space

    @classmethod
    def constant(cls, aux):
        return cls(aux.data[None], aux.space)

    @classmethod
    def linear(cls, const, slope):
        return cls(np.stack([const.data, slope.data]), const.space)

    @property
    def degree(self):
        return self.coeffs.shape[0] - 1

    def __call__(self, u):
        powers = u ** np.arange(self.degree + 1)
        return AuxMatrix(np.tensordot(powers, self.coeffs, axes=1), self.space)

    def __matmul__(self, other):
        if other.space != self.space:
            raise ValueError("auxiliary polynomials act on different quantum spaces")
        out = np.zeros((self.degree + other.degree + 1,) + self.coeffs.shape[1:], dtype=complex)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += _aux_product(a, b)
        return AuxPolynomial(out, self.space)

    def embed(self, into, slot):
        coeffs = [AuxMatrix(c, self.space).embed(into, slot).data for c in self.coeffs]
        return AuxPolynomial(np.stack(coeffs), into)

    def trace(self):
        return OperatorPolynomial(self.coeffs[:, 0, 0] + self.coeffs[:, 1, 1], self.space)


class OperatorPolynomial:
    """Polynomial in ``u`` with operator coefficients, constant term first."""

    def __init__(self, coeffs, space):
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.ndim != 3 or coeffs.shape[1:] != (space.dim, space.dim):
            raise ValueError("coefficients must have shape (k, dim, dim)")
        self.coeffs = coeffs
        self.space = space

    @property
    def degree(self):
        return self.coeffs.shape[0] - 1

    def coefficient(self, k):
        return OperatorMatrix(self.coeffs[k], self.space)

    def __call__(self, u):
        powers = u ** np.arange(self.degree + 1)
        return OperatorMatrix(np.tensordot(powers, self.coeffs, axes=1), self.space)


def l_boson_polynomial(space, p):
    """``L^a(u) = [[1 + eta u + eta^2 n, eta a], [eta a^dag, 1]]`` as a polynomial in ``u``."""
    one = identity(space)
    zero = 0.0 * one
    a, ad, n = (boson_op(space, t) for t in ("a", "a_dagger", "n_hat"))
    const = AuxMatrix.from_entries([[one + p.eta**2 * n, p.eta * a], [p.eta * ad, one]])
    slope = AuxMatrix.from_entries([[p.eta * one, zero], [zero, zero]])
    return AuxPolynomial.linear(const, slope)


def l_boson(space, p):
    return l_boson_polynomial(space, p)(p.u)


def _spin_l_polynomial(sz, s_minus, s_plus, eta):
    one = identity(sz.space)
    zero = 0.0 * one
    const = AuxMatrix.from_entries([[eta * sz, eta * s_minus], [eta * s_plus, -eta * sz]])
    slope = AuxMatrix.from_entries([[one, zero], [zero, one]])
    return AuxPolynomial.linear(const, slope)


def l_spin_polynomial(space, p):
    """``L^S(u) = [[u + eta S^z, eta S^-], [eta S^+, u - eta S^z]]`` in total-spin operators."""
    ops = [spin_op(space, t) for t in ("Sz", "S_minus", "S_plus")]
    return _spin_l_polynomial(*ops, p.eta)


def l_spin(space, p):
    return l_spin_polynomial(space, p)(p.u)


def l_site_polynomial(space, site, p):
    """Single-site spin L-operator on a ``full_tensor`` space."""
    ops = [spin_op(space, t, site) for t in ("sz", "s_minus", "s_plus")]
    return _spin_l_polynomial(*ops, p.eta)


def twist_spin(space, p):
    """Spin operator-valued twist.

    ``b = 0`` gives ``[[1, S^+ + S^-], [S^+ + S^-, -1]]``; ``b != 0`` gives the
    single-qubit extension ``[[1, 2 s^x], [2 s^x, -1 + b s^x]]``.
    """
    one = identity(space)
    c_op = spin_op(space, "S_plus") + spin_op(space, "S_minus")
    if p.b == 0.0:
        return AuxMatrix.from_entries([[one, c_op], [c_op, -one]])
    if space.n_qubits != 1:
        raise ValueError("the b-extended spin twist is defined for a single qubit only")
    # c_op = 2 s^x for one qubit
    return AuxMatrix.from_entries([[one, c_op], [c_op, -one + 0.5 * p.b * c_op]])


def twist_boson(space, p):
    """``[[(1 + lam), a + a^dag + c], [a + a^dag + c, (1 - lam)]]``."""
    one = identity(space)
    x = boson_op(space, "a") + boson_op(space, "a_dagger") + p.c * one
    return AuxMatrix.from_entries([[(1.0 + p.lam) * one, x], [x, (1.0 - p.lam) * one]])


def _check_point(point, model, params, factorised):
    point, model = Point(point), AuxModel(model)
    if point is Point.DELTA0 and params.delta != 0.0:
        raise ValueError(f"point delta0 requires delta = 0, got delta = {params.delta}")
    if point is Point.OMEGA0 and params.omega != 0.0:
        raise ValueError(f"point omega0 requires omega = 0, got omega = {params.omega}")
    if model in (AuxModel.RABI, AuxModel.GENERALIZED) and params.n_qubits != 1:
        raise ValueError(f"model {model.value!r} requires n_qubits = 1")
    if factorised and params.space.spin.rep is not SpinRep.FULL_TENSOR:
        raise ValueError("the factorised monodromy requires the full_tensor representation")
    if factorised and point is not Point.OMEGA0:
        raise ValueError("the factorised monodromy is defined at the omega0 point only")
    return point, model


def monodromy_polynomial(point, model, params, p, factorised=False):
    """Monodromy matrix ``T(u)`` on ``params.space`` as a polynomial in ``u``.

    ``delta0``: ``W^S L^a(u)``.  ``omega0``: ``W^a L^S(u)``, or with
    ``factorised=True`` the site product ``W^a L_1(u) ... L_N(u)``.  For
    ``model='generalized'`` the twists take the ``b``/``c`` extensions from
    ``p``; otherwise those entries must be zero.  ``model='rabi'`` is the
    single-qubit Dicke normalisation.
    """
    point, model = _check_point(point, model, params, factorised)
    if model is not AuxModel.GENERALIZED and (p.b != 0.0 or p.c != 0.0):
        raise ValueError("twist extensions b, c apply to the generalized model only")
    space = params.space
    if point is Point.DELTA0:
        twist = twist_spin(space.spin, p).embed(space, "spin")
        lop = l_boson_polynomial(space.fock, p).embed(space, "fock")
        return AuxPolynomial.constant(twist) @ lop
    twist = AuxPolynomial.constant(twist_boson(space.fock, p).embed(space, "fock"))
    if not factorised:
        return twist @ l_spin_polynomial(space.spin, p).embed(space, "spin")
    out = twist
    for site in range(1, params.n_qubits + 1):
        out = out @ l_site_polynomial(space.spin, site, p).embed(space, "spin")
    return out


def monodromy(point, model, params, p, factorised=False):
    """Monodromy matrix evaluated at ``p.u``."""
    return monodromy_polynomial(point, model, params, p, factorised)(p.u)


def transfer_matrix(T):
    """``tau(u) = tr T(u)`` as an exact operator polynomial."""
    if not isinstance(T, AuxPolynomial):
        raise TypeError("transfer_matrix needs the monodromy as an AuxPolynomial")
    return T.trace()


def integrable_spectral_params(point, params, u=0.0, v=0.0, eta=1.0):
    """Spectral parameters that realise the Hamiltonian at an integrable point.

    At ``delta0`` this fixes ``eta = omega / g`` and ``b = epsilon eta / g``; at
    ``omega0`` it fixes ``lam = delta / g`` and ``c = epsilon / (2 g)`` and keeps
    the free ``eta``.
    """
    from .rmatrix import SpectralParams

    if params.g == 0.0:
        raise ValueError("integrable-point parameters need g != 0")
    if Point(point) is Point.DELTA0:
        eta = params.omega / params.g
        return SpectralParams(u=u, v=v, eta=eta, b=params.epsilon * eta / params.g)
    return SpectralParams(
        u=u, v=v, eta=eta, lam=params.delta / params.g, c=params.epsilon / (2.0 * params.g)
    )


def _rtt_blocks(T_u, T_v, R):
    # block ((i1 i2), (k1 k2)) of T1(u) T2(v) is T_{i1 k1}(u) T_{i2 k2}(v)
    d = T_u.space.dim
    tt = np.empty((4, 4, d, d), dtype=complex)
    tt_rev = np.empty_like(tt)
    for i1 in range(2):
        for i2 in range(2):
            for k1 in range(2):
                for k2 in range(2):
                    row, col = 2 * i1 + i2, 2 * k1 + k2
                    tt[row, col] = T_u.data[i1, k1] @ T_v.data[i2, k2]
                    tt_rev[row, col] = T_v.data[i2, k2] @ T_u.data[i1, k1]
    lhs = np.tensordot(R, tt, axes=(1, 0))
    rhs = np.tensordot(tt_rev, R, axes=(1, 0)).transpose(0, 3, 1, 2)
    return lhs, rhs


def check_rtt(T_builder, p, buffer=2):
    """Projected residual of ``R12(u-v) T1(u) T2(v) = T2(v) T1(u) R12(u-v)``.

    Each of the sixteen quantum-space blocks of both sides is compressed with
    ``projector_below(n_max - buffer)``; the result is the largest block
    residual divided by the largest block norm.  ``buffer=0`` gives the
    unprojected residual.

    ``T_builder`` is an :class:`AuxPolynomial` or a callable ``u -> AuxMatrix``.
    """
    T_u, T_v = T_builder(p.u), T_builder(p.v)
    if T_u.space != T_v.space:
        raise ValueError("T(u) and T(v) act on different spaces")
    space = T_u.space
    fock = space if isinstance(space, FockSpace) else getattr(space, "fock", None)
    if fock is None:
        if buffer != 0:
            raise ValueError("a projector buffer needs a bosonic factor")
        keep = np.arange(space.dim)
    else:
        if not 0 <= buffer <= fock.n_max:
            raise ValueError(f"buffer must lie in [0, {fock.n_max}], got {buffer}")
        # the projector is diagonal 0/1, so compressing is row/column selection
        keep = np.flatnonzero(projector_below(space, fock.n_max - buffer).data.diagonal().real)
    lhs, rhs = _rtt_blocks(T_u, T_v, r_matrix(p, p.u - p.v))
    lhs = lhs[:, :, keep][:, :, :, keep]
    rhs = rhs[:, :, keep][:, :, :, keep]
    scale = max(np.linalg.norm(lhs, axis=(2, 3)).max(), np.linalg.norm(rhs, axis=(2, 3)).max())
    if scale == 0.0:
        return 0.0
    return float(np.linalg.norm(lhs - rhs, axis=(2, 3)).max() / scale)


def _hamiltonian(model, params):
    if AuxModel(model) is AuxModel.GENERALIZED:
        return build_generalized_rabi(params)
    return build_dicke(params)


def claimed_tau(point, model, params, p, degree):
    """Coefficients the transfer matrix is claimed to carry, keyed by power of ``u``.

    ``delta0``: ``tau(u) = eta [u + H / g]``.  ``omega0``: ``tau(u) = 2 u^N + eta
    u^(N-1) H / g + ...`` where only the two leading terms are claimed.
    """
    if params.g == 0.0:
        raise ValueError("the tau identity needs g != 0")
    H = _hamiltonian(model, params)
    one = identity(params.space)
    if Point(point) is Point.DELTA0:
        return {0: (p.eta / params.g) * H, 1: p.eta * one}
    return {degree: 2.0 * one, degree - 1: (p.eta / params.g) * H}


def check_tau_identity(point, model, params, p, factorised=False):
    """Relative Frobenius distance between ``tr T(u)`` and its claimed form, coefficient-wise."""
    tau = transfer_matrix(monodromy_polynomial(point, model, params, p, factorised))
    claim = claimed_tau(point, model, params, p, tau.degree)
    num = den = 0.0
    for k in range(tau.degree + 1):
        if k in claim:
            num += np.linalg.norm(tau.coeffs[k] - claim[k].data) ** 2
            den += claim[k].norm() ** 2
    if Point(point) is Point.DELTA0 and tau.degree != 1:
        raise AssertionError("delta0 transfer matrix must be linear in u")
    return float(np.sqrt(num / den))
