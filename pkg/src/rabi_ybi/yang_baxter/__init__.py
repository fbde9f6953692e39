"""R-matrix, operator-valued twists, monodromy/transfer matrices and conserved charges."""

from .charges import ChargeSet, charge_residuals, extract_charges
from .monodromy import (
    AuxMatrix,
    AuxPolynomial,
    OperatorPolynomial,
    Point,
    check_rtt,
    check_tau_identity,
    claimed_tau,
    integrable_spectral_params,
    l_boson,
    l_boson_polynomial,
    l_site_polynomial,
    l_spin,
    l_spin_polynomial,
    monodromy,
    monodromy_polynomial,
    transfer_matrix,
    twist_boson,
    twist_spin,
)
from .probe import ChargeSearchProbe, ProbeConfig, ansatz_operator, charge_search_probe
from .rmatrix import PERMUTATION, SpectralParams, check_ybe, r_matrix

__all__ = [
    "AuxMatrix",
    "AuxPolynomial",
    "ChargeSearchProbe",
    "ChargeSet",
    "OperatorPolynomial",
    "PERMUTATION",
    "Point",
    "ProbeConfig",
    "SpectralParams",
    "ansatz_operator",
    "charge_residuals",
    "charge_search_probe",
    "check_rtt",
    "check_tau_identity",
    "check_ybe",
    "claimed_tau",
    "extract_charges",
    "integrable_spectral_params",
    "l_boson",
    "l_boson_polynomial",
    "l_site_polynomial",
    "l_spin",
    "l_spin_polynomial",
    "monodromy",
    "monodromy_polynomial",
    "r_matrix",
    "transfer_matrix",
    "twist_boson",
    "twist_spin",
]
