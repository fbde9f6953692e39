"""Numerical search for a conserved charge between the two integrable points.

The Rabi Hamiltonian is swept along ``delta = r sin(theta)``, ``omega = r cos(theta)``.
At each angle the probe looks for the unit-norm Hermitian operator ``C`` in a
fixed ansatz span that minimises ``||[H, C]||``, after removing the trivially
conserved directions (identity, ``H``, ``H^2``, parity).
"""

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ..models import ModelParams, build_rabi, symmetry_operator
from ..operator_space import OperatorMatrix, identity, product_op

DEFAULT_ANSATZ = (
    "sx",
    "sy",
    "sz",
    "x",
    "p",
    "n_hat",
    "sx*x",
    "sy*p",
    "sz*n_hat",
)
DEFAULT_EXCLUSIONS = ("identity", "H", "H2", "parity")


def _factor(space, name):
    if name in ("sx", "sy", "sz"):
        return product_op(space, "S" + name[1:])
    if name == "x":
        return product_op(space, "a") + product_op(space, "a_dagger")
    if name == "p":
        return 1j * (product_op(space, "a") - product_op(space, "a_dagger"))
    return product_op(space, name)


def ansatz_operator(space, term):
    """Hermitised product of the ``*``-separated factors in ``term``."""
    factors = [_factor(space, name.strip()) for name in term.split("*")]
    op = factors[0]
    for f in factors[1:]:
        op = op @ f
    return 0.5 * (op + op.dag)


def _exclusion_operator(params, H, name):
    if name == "identity":
        return identity(params.space)
    if name == "H":
        return H
    if name == "H2":
        return H @ H
    if name == "parity":
        return symmetry_operator(params, "parity").matrix
    raise ValueError(f"unknown exclusion {name!r}")


def _realify(ops):
    # Hermitian operators have real Frobenius inner products, so the real
    # embedding of vec(op) preserves them.
    cols = [np.concatenate([op.data.real.ravel(), op.data.imag.ravel()]) for op in ops]
    return np.stack(cols, axis=1)


def _orthonormal_columns(mat, rtol=1e-10):
    u, s, _ = np.linalg.svd(mat, full_matrices=False)
    if s.size == 0:
        return u[:, :0]
    keep = s > rtol * s[0]
    return u[:, keep]


class ChargeSearchProbe(BaseEstimator):
    """Fit the best approximately-conserved operator in an ansatz span.

    Parameters
    ----------
    ansatz : sequence of str
        Terms such as ``"sx"`` or ``"sy*p"``; factors are ``sx, sy, sz, x, p``
        or any operator tag.
    exclusions : sequence of str
        Directions projected out before the search.

    Attributes
    ----------
    residual_ : float
        Smallest ``||[H, C]||_F / ||H||_F`` over unit-norm ``C``.
    charge_ : OperatorMatrix
        The minimiser, normalised to unit Frobenius norm.
    singular_values_ : ndarray
        All singular values of ``C -> [H, C]`` on the reduced span, ascending.
    """

    def __init__(self, ansatz=DEFAULT_ANSATZ, exclusions=DEFAULT_EXCLUSIONS):
        self.ansatz = ansatz
        self.exclusions = exclusions

    def fit(self, H, params):
        if not self.ansatz:
            raise ValueError("ansatz must not be empty")
        space = params.space
        basis = [ansatz_operator(space, t) for t in self.ansatz]
        excl = [_exclusion_operator(params, H, e) for e in self.exclusions]

        B = _realify(basis)
        if excl:
            E = _orthonormal_columns(_realify(excl))
            B = B - E @ (E.T @ B)
        Q = _orthonormal_columns(B)
        if Q.shape[1] == 0:
            raise ValueError("ansatz is empty after projecting out the exclusions")

        d = space.dim
        q_ops = [
            OperatorMatrix((q[: d * d] + 1j * q[d * d :]).reshape(d, d), space) for q in Q.T
        ]
        M = _realify([(1j * (H @ q - q @ H)) for q in q_ops])
        _, s, vt = np.linalg.svd(M, full_matrices=False)
        coeffs = vt[-1]
        charge = sum((c * q for c, q in zip(coeffs, q_ops)), 0.0 * q_ops[0])

        self.n_basis_ = Q.shape[1]
        self.singular_values_ = s[::-1] / H.norm()
        self.residual_ = float(self.singular_values_[0])
        self.charge_ = charge / charge.norm()
        return self

    def overlap(self, target):
        """``|<C, target>| / ||target||`` with the fitted unit-norm ``C``."""
        check_is_fitted(self, "charge_")
        t = target.data
        return float(abs(np.vdot(self.charge_.data, t)) / np.linalg.norm(t))


@dataclass
class ProbeConfig:
    r: float = 1.0
    g: float = 0.5
    n_max: int = 20
    theta_grid: list = field(default_factory=lambda: list(np.linspace(0.0, np.pi / 2, 33)))
    ansatz: tuple = DEFAULT_ANSATZ
    exclusions: tuple = DEFAULT_EXCLUSIONS

    def __post_init__(self):
        grid = [float(t) for t in self.theta_grid]
        if not grid or not np.isclose(grid[0], 0.0) or not np.isclose(grid[-1], np.pi / 2):
            raise ValueError("theta_grid must start at 0 and end at pi/2")
        self.theta_grid = grid
        self.ansatz = tuple(self.ansatz)
        self.exclusions = tuple(self.exclusions)


def probe_params(config, theta):
    """Rabi parameters at angle ``theta``; endpoints are set exactly to zero."""
    delta = 0.0 if theta == 0.0 else config.r * np.sin(theta)
    omega = 0.0 if np.isclose(theta, np.pi / 2) else config.r * np.cos(theta)
    return ModelParams.create(delta, omega, config.g, n_qubits=1, n_max=config.n_max)


def charge_search_probe(config):
    """Run the probe over ``config.theta_grid``.

    Returns a list of dicts with ``theta``, ``residual`` and the minimiser's
    overlaps with ``s^x`` and ``a + a^dag``.
    """
    rows = []
    for theta in config.theta_grid:
        params = probe_params(config, theta)
        H = build_rabi(params)
        probe = ChargeSearchProbe(config.ansatz, config.exclusions).fit(H, params)
        rows.append(
            {
                "theta": theta,
                "residual": probe.residual_,
                "overlap_sx": probe.overlap(ansatz_operator(params.space, "sx")),
                "overlap_x": probe.overlap(ansatz_operator(params.space, "x")),
            }
        )
    return rows
