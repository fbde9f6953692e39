"""Conserved charges read off the transfer-matrix polynomial."""

from dataclasses import dataclass, field

import numpy as np

from ..operator_space import OperatorMatrix, commutator_residual, projector_below


@dataclass
class ChargeSet:
    """Non-scalar coefficients of ``tau(u)``.

    ``powers[k]`` is the power of ``u`` that ``charges[k]`` multiplies.  The
    charges are the raw coefficients: below ``u^(N-1)`` they are generally not
    Hermitian, and only the raw coefficients form a commuting family.
    ``hermiticity_defects`` records ``||C - C^dag|| / ||C||`` for each one.
    """

    charges: list
    powers: list
    hamiltonian_index: int | None
    hermiticity_defects: list = field(default_factory=list)

    def __len__(self):
        return len(self.charges)

    @property
    def hamiltonian_charge(self):
        if self.hamiltonian_index is None:
            return None
        return self.charges[self.hamiltonian_index]

    def hermitian_parts(self):
        """``(C + C^dag) / 2`` and ``(C - C^dag) / 2i`` for every charge.

        Each part commutes with the Hamiltonian on its own, but parts taken from
        different coefficients need not commute with one another.
        """
        out = []
        for c in self.charges:
            out.append((0.5 * (c + c.dag), (-0.5j) * (c - c.dag)))
        return out


def _is_scalar(mat, tol):
    d = mat.shape[0]
    shift = np.trace(mat) / d
    scale = np.linalg.norm(mat)
    if scale == 0.0:
        return True
    return np.linalg.norm(mat - shift * np.eye(d)) <= tol * scale


def extract_charges(tau, scalar_tol=1e-12):
    """Collect the coefficients of ``tau`` that are not multiples of the identity."""
    if tau.degree < 1:
        raise ValueError("transfer matrix must have degree >= 1")
    charges, powers, defects = [], [], []
    ham = None
    for k in range(tau.degree + 1):
        coeff = tau.coeffs[k]
        if _is_scalar(coeff, scalar_tol):
            continue
        op = OperatorMatrix(coeff, tau.space)
        if k == tau.degree - 1:
            ham = len(charges)
        charges.append(op)
        powers.append(k)
        defects.append(float(np.linalg.norm(coeff - coeff.conj().T) / np.linalg.norm(coeff)))
    return ChargeSet(charges, powers, ham, defects)


def charge_residuals(charge_set, H, buffer=1):
    """Pairwise commutator residuals and ``[H, I_k]`` residuals, projected.

    Returns ``(pairwise, with_h)`` where ``pairwise`` is a symmetric array.
    """
    space = H.space
    proj = projector_below(space, space.fock.n_max - buffer) if buffer else None
    n = len(charge_set)
    pairwise = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            r = commutator_residual(charge_set.charges[i], charge_set.charges[j], proj)
            pairwise[i, j] = pairwise[j, i] = r
    with_h = np.array([commutator_residual(H, c, proj) for c in charge_set.charges])
    return pairwise, with_h
