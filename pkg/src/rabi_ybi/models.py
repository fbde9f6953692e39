"""Hamiltonians of the Rabi family and their symmetry operators.

Each builder keeps the normalisation of its own model: the Rabi and
Jaynes-Cummings Hamiltonians carry ``delta * s^z`` while the Dicke and
generalised Rabi Hamiltonians carry ``2 * delta * S^z``.  At a single qubit,
``build_dicke(delta, omega, g)`` therefore equals ``build_rabi(2 * delta, omega, 2 * g)``.
"""

import dataclasses
from dataclasses import dataclass
from enum import Enum

import numpy as np

from ._validation import check_finite_scalar
from .operator_space import OperatorMatrix, ProductSpace, SpinRep, boson_op, spin_op

MODEL_NAMES = ("rabi", "jc", "dicke", "tc", "generalized")


@dataclass(frozen=True)
class ModelParams:
    """Couplings plus the truncated product space they live on."""

    delta: float
    omega: float
    g: float
    epsilon: float = 0.0
    space: ProductSpace = dataclasses.field(default_factory=lambda: ProductSpace.create())

    def __post_init__(self):
        for name in ("delta", "omega", "g", "epsilon"):
            object.__setattr__(self, name, check_finite_scalar(getattr(self, name), name))
        if not isinstance(self.space, ProductSpace):
            raise TypeError("space must be a ProductSpace")

    @classmethod
    def create(cls, delta, omega, g, epsilon=0.0, n_qubits=1, rep="collective", n_max=32):
        return cls(delta, omega, g, epsilon, ProductSpace.create(n_qubits, n_max, rep))

    @classmethod
    def from_dict(cls, d):
        allowed = {"delta", "omega", "g", "epsilon", "n_qubits", "rep", "n_max"}
        unknown = set(d) - allowed
        if unknown:
            raise KeyError(f"unknown model parameter(s): {sorted(unknown)}")
        return cls.create(**d)

    def to_dict(self):
        return {
            "delta": self.delta,
            "omega": self.omega,
            "g": self.g,
            "epsilon": self.epsilon,
            "n_qubits": self.n_qubits,
            "rep": self.space.spin.rep.value,
            "n_max": self.n_max,
        }

    @property
    def n_qubits(self):
        return self.space.spin.n_qubits

    @property
    def n_max(self):
        return self.space.fock.n_max

    def replace(self, **changes):
        space_keys = {"n_qubits", "rep", "n_max"}
        if space_keys & set(changes):
            d = self.to_dict()
            d.update(changes)
            return ModelParams.from_dict(d)
        return dataclasses.replace(self, **changes)


def _require_single_qubit(params, name):
    if params.n_qubits != 1:
        raise ValueError(f"{name} is a single-qubit model, got n_qubits={params.n_qubits}")


def _factors(space):
    spin, fock = space.spin, space.fock
    return {
        "Sz": spin_op(spin, "Sz").data,
        "Sp": spin_op(spin, "S_plus").data,
        "Sm": spin_op(spin, "S_minus").data,
        "a": boson_op(fock, "a").data,
        "ad": boson_op(fock, "a_dagger").data,
        "n": boson_op(fock, "n_hat").data,
        "Is": np.eye(spin.dim),
        "If": np.eye(fock.dim),
    }


def _assemble(space, terms):
    # sum of coefficient * (spin factor) (x) (fock factor)
    return OperatorMatrix(sum(c * np.kron(s, f) for c, s, f in terms), space)


def build_rabi(params):
    """``H = delta s^z + omega a^dag a + g s^x (a + a^dag)``."""
    _require_single_qubit(params, "build_rabi")
    o = _factors(params.space)
    sx = 0.5 * (o["Sp"] + o["Sm"])
    return _assemble(
        params.space,
        [
            (params.delta, o["Sz"], o["If"]),
            (params.omega, o["Is"], o["n"]),
            (params.g, sx, o["a"] + o["ad"]),
        ],
    )


def build_jc(params):
    """Jaynes-Cummings model, the rotating-wave form of :func:`build_rabi`."""
    _require_single_qubit(params, "build_jc")
    return build_tc(params)


def build_dicke(params):
    """``H = 2 delta S^z + omega a^dag a + g (S^+ + S^-)(a + a^dag)``."""
    o = _factors(params.space)
    return _assemble(
        params.space,
        [
            (2.0 * params.delta, o["Sz"], o["If"]),
            (params.omega, o["Is"], o["n"]),
            (params.g, o["Sp"] + o["Sm"], o["a"] + o["ad"]),
        ],
    )


def build_tc(params):
    """``H = delta S^z + omega a^dag a + g (S^+ a + S^- a^dag)``."""
    o = _factors(params.space)
    return _assemble(
        params.space,
        [
            (params.delta, o["Sz"], o["If"]),
            (params.omega, o["Is"], o["n"]),
            (params.g, o["Sp"], o["a"]),
            (params.g, o["Sm"], o["ad"]),
        ],
    )


def build_generalized_rabi(params):
    """Single-qubit Dicke Hamiltonian plus the parity-breaking ``epsilon s^x`` term."""
    _require_single_qubit(params, "build_generalized_rabi")
    o = _factors(params.space)
    sx = 0.5 * (o["Sp"] + o["Sm"])
    return build_dicke(params) + _assemble(params.space, [(params.epsilon, sx, o["If"])])


_BUILDERS = {
    "rabi": build_rabi,
    "jc": build_jc,
    "dicke": build_dicke,
    "tc": build_tc,
    "generalized": build_generalized_rabi,
}


def build_model(name, params):
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise ValueError(f"unknown model {name!r}; expected one of {MODEL_NAMES}") from None
    return builder(params)


def has_parity(name, params):
    """Whether the model commutes with the Z2 parity for these parameters."""
    return name != "generalized" or params.epsilon == 0.0


class SymmetryKind(str, Enum):
    PARITY = "parity"
    EXCITATION_M = "excitation_M"
    CASIMIR_S2 = "casimir_S2"
    CHARGE_C_DELTA0 = "charge_C_delta0"
    CHARGE_C_OMEGA0 = "charge_C_omega0"


@dataclass(frozen=True)
class SymmetryOperator:
    kind: SymmetryKind
    matrix: OperatorMatrix


def parity_diagonal(space):
    """Diagonal of ``exp(i pi (n + S^z + n_qubits/2))`` as a +-1 integer array."""
    n = np.arange(space.fock.dim)
    spin = space.spin
    if spin.rep is SpinRep.COLLECTIVE:
        # number of up spins: S^z + N/2 = N, N-1, ..., 0
        ups = spin.n_qubits - np.arange(spin.dim)
    else:
        idx = np.arange(spin.dim)
        downs = np.array([bin(i).count("1") for i in idx])
        ups = spin.n_qubits - downs
    total = ups[:, None] + n[None, :]
    return np.where(total % 2 == 0, 1, -1).ravel()


def symmetry_operator(params, kind):
    kind = SymmetryKind(kind)
    space = params.space
    if kind is SymmetryKind.PARITY:
        mat = OperatorMatrix(np.diag(parity_diagonal(space).astype(float)), space)
    else:
        o = _factors(space)
        if kind is SymmetryKind.EXCITATION_M:
            terms = [(1.0, o["Is"], o["n"]), (1.0, o["Sz"], o["If"])]
        elif kind is SymmetryKind.CASIMIR_S2:
            casimir = o["Sp"] @ o["Sm"] + o["Sz"] @ (o["Sz"] - o["Is"])
            terms = [(1.0, casimir, o["If"])]
        elif kind is SymmetryKind.CHARGE_C_DELTA0:
            terms = [(1.0, o["Sp"] + o["Sm"], o["If"])]
        else:
            terms = [(1.0, o["Is"], o["a"] + o["ad"])]
        mat = _assemble(space, terms)
    return SymmetryOperator(kind, mat)
