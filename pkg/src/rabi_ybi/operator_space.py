"""
Truncated bosonic and spin Hilbert spaces and the elementary operators on them.

Conventions
-----------
* Fock basis ``|0>, ..., |n_max>`` with hard truncation, ``a^dagger |n_max> = 0``.
* Collective spin basis ``|j, m>`` ordered ``m = j, j-1, ..., -j`` with ``j = n_qubits / 2``.
* Tensor-product spin basis ordered with site 1 as the most significant factor and
  ``|up>`` before ``|down>`` on every site.
* Product spaces are always ``spin (x) fock``.
"""

from dataclasses import dataclass
from enum import Enum
from functools import reduce

import numpy as np

from ._validation import check_int, check_square_matrix, hermiticity_defect


class SpinRep(str, Enum):
    COLLECTIVE = "collective"
    FULL_TENSOR = "full_tensor"


class OperatorTag(str, Enum):
    A = "a"
    A_DAGGER = "a_dagger"
    N_HAT = "n_hat"
    SX = "sx"
    SY = "sy"
    SZ = "sz"
    S_PLUS = "s_plus"
    S_MINUS = "s_minus"
    SX_TOTAL = "Sx"
    SY_TOTAL = "Sy"
    SZ_TOTAL = "Sz"
    S_PLUS_TOTAL = "S_plus"
    S_MINUS_TOTAL = "S_minus"
    IDENTITY = "identity"


BOSON_TAGS = frozenset({OperatorTag.A, OperatorTag.A_DAGGER, OperatorTag.N_HAT})
SITE_TAGS = frozenset(
    {OperatorTag.SX, OperatorTag.SY, OperatorTag.SZ, OperatorTag.S_PLUS, OperatorTag.S_MINUS}
)
TOTAL_SPIN_TAGS = frozenset(
    {
        OperatorTag.SX_TOTAL,
        OperatorTag.SY_TOTAL,
        OperatorTag.SZ_TOTAL,
        OperatorTag.S_PLUS_TOTAL,
        OperatorTag.S_MINUS_TOTAL,
    }
)


@dataclass(frozen=True)
class FockSpace:
    n_max: int

    def __post_init__(self):
        check_int(self.n_max, "n_max", min_value=1)

    @property
    def dim(self):
        return self.n_max + 1


@dataclass(frozen=True)
class SpinSpace:
    n_qubits: int
    rep: SpinRep = SpinRep.COLLECTIVE

    def __post_init__(self):
        check_int(self.n_qubits, "n_qubits", min_value=1)
        object.__setattr__(self, "rep", SpinRep(self.rep))

    @property
    def dim(self):
        if self.rep is SpinRep.COLLECTIVE:
            return self.n_qubits + 1
        return 2**self.n_qubits


@dataclass(frozen=True)
class ProductSpace:
    spin: SpinSpace
    fock: FockSpace

    @property
    def dim(self):
        return self.spin.dim * self.fock.dim

    @classmethod
    def create(cls, n_qubits=1, n_max=16, rep=SpinRep.COLLECTIVE):
        return cls(SpinSpace(n_qubits, rep), FockSpace(n_max))


class OperatorMatrix:
    """Dense complex operator tagged with the Hilbert space it acts on.

    Instances are read-only; arithmetic returns new objects and requires both
    operands to live on the same space.
    """

    __slots__ = ("data", "space")

    def __init__(self, data, space):
        data = np.array(data, dtype=complex)
        check_square_matrix(data, "operator")
        if data.shape[0] != space.dim:
            raise ValueError(
                f"operator of size {data.shape[0]} does not match space dimension {space.dim}"
            )
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "space", space)

    def __setattr__(self, name, value):
        raise AttributeError("OperatorMatrix is immutable")

    def __repr__(self):
        return f"OperatorMatrix(dim={self.space.dim}, space={self.space!r})"

    def _check(self, other):
        if not isinstance(other, OperatorMatrix):
            return NotImplemented
        if other.space != self.space:
            raise ValueError(f"space mismatch: {self.space!r} vs {other.space!r}")
        return other

    def __add__(self, other):
        if np.isscalar(other):
            return OperatorMatrix(self.data + other * np.eye(self.space.dim), self.space)
        if self._check(other) is NotImplemented:
            return NotImplemented
        return OperatorMatrix(self.data + other.data, self.space)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return OperatorMatrix(-self.data, self.space)

    def __mul__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        return OperatorMatrix(scalar * self.data, self.space)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1.0 / scalar)

    def __matmul__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return OperatorMatrix(self.data @ other.data, self.space)

    @property
    def dag(self):
        return OperatorMatrix(self.data.conj().T, self.space)

    @property
    def dim(self):
        return self.space.dim

    def norm(self):
        return float(np.linalg.norm(self.data))

    def hermiticity_defect(self):
        return hermiticity_defect(self.data)

    def is_hermitian(self, tol=1e-14):
        return self.hermiticity_defect() <= tol

    def allclose(self, other, atol=1e-12):
        return self.space == other.space and np.allclose(self.data, other.data, rtol=0, atol=atol)


def identity(space):
    return OperatorMatrix(np.eye(space.dim), space)


def _as_tag(tag):
    try:
        return OperatorTag(tag)
    except ValueError:
        raise ValueError(f"unknown operator tag {tag!r}") from None


def boson_op(space, tag):
    """Truncated single-mode boson operator on ``space``.

    >>> boson_op(FockSpace(2), "n_hat").data.real.diagonal()
    array([0., 1., 2.])
    """
    tag = _as_tag(tag)
    if tag is OperatorTag.IDENTITY:
        return identity(space)
    if tag not in BOSON_TAGS:
        raise ValueError(f"tag {tag.value!r} is not a bosonic operator")
    if not isinstance(space, FockSpace):
        raise TypeError("boson_op requires a FockSpace")
    lowering = np.diag(np.sqrt(np.arange(1, space.dim, dtype=float)), 1)
    if tag is OperatorTag.A:
        mat = lowering
    elif tag is OperatorTag.A_DAGGER:
        mat = lowering.T
    else:
        mat = np.diag(np.arange(space.dim, dtype=float))
    return OperatorMatrix(mat, space)


_PAULI_HALF = {
    OperatorTag.SX: np.array([[0.0, 0.5], [0.5, 0.0]]),
    OperatorTag.SY: np.array([[0.0, -0.5j], [0.5j, 0.0]]),
    OperatorTag.SZ: np.array([[0.5, 0.0], [0.0, -0.5]]),
    OperatorTag.S_PLUS: np.array([[0.0, 1.0], [0.0, 0.0]]),
    OperatorTag.S_MINUS: np.array([[0.0, 0.0], [1.0, 0.0]]),
}

_TOTAL_TO_SITE = {
    OperatorTag.SX_TOTAL: OperatorTag.SX,
    OperatorTag.SY_TOTAL: OperatorTag.SY,
    OperatorTag.SZ_TOTAL: OperatorTag.SZ,
    OperatorTag.S_PLUS_TOTAL: OperatorTag.S_PLUS,
    OperatorTag.S_MINUS_TOTAL: OperatorTag.S_MINUS,
}


def _collective_matrices(n_qubits):
    j = n_qubits / 2.0
    m = j - np.arange(n_qubits + 1)
    # <j, m+1| S+ |j, m> sits one row above the diagonal in the m = j..-j ordering
    raise_amp = np.sqrt(j * (j + 1) - m[1:] * (m[1:] + 1))
    s_plus = np.diag(raise_amp, 1)
    s_minus = s_plus.T
    return {
        OperatorTag.SZ: np.diag(m),
        OperatorTag.S_PLUS: s_plus,
        OperatorTag.S_MINUS: s_minus,
        OperatorTag.SX: 0.5 * (s_plus + s_minus),
        OperatorTag.SY: -0.5j * (s_plus - s_minus),
    }


def _site_matrix(site_op, site, n_qubits):
    factors = [np.eye(2)] * n_qubits
    factors[site - 1] = site_op
    return reduce(np.kron, factors)


def spin_op(space, tag, site=None):
    """Spin operator on ``space``.

    Collective tags (``Sx``, ``Sy``, ``Sz``, ``S_plus``, ``S_minus``) are the total
    spin operators in either representation. Single-site tags need the
    ``full_tensor`` representation and a 1-based ``site``; for a single qubit the
    site defaults to 1.
    """
    tag = _as_tag(tag)
    if not isinstance(space, SpinSpace):
        raise TypeError("spin_op requires a SpinSpace")
    if tag is OperatorTag.IDENTITY:
        return identity(space)
    n = space.n_qubits
    if tag in SITE_TAGS:
        if space.rep is not SpinRep.FULL_TENSOR:
            raise ValueError(f"single-site tag {tag.value!r} requires the full_tensor representation")
        if site is None and n == 1:
            site = 1
        if site is None:
            raise ValueError(f"single-site tag {tag.value!r} requires a site index")
        check_int(site, "site", min_value=1, max_value=n)
        return OperatorMatrix(_site_matrix(_PAULI_HALF[tag], site, n), space)
    if tag not in TOTAL_SPIN_TAGS:
        raise ValueError(f"tag {tag.value!r} is not a spin operator")
    base = _TOTAL_TO_SITE[tag]
    if space.rep is SpinRep.COLLECTIVE:
        return OperatorMatrix(_collective_matrices(n)[base], space)
    total = sum(_site_matrix(_PAULI_HALF[base], k, n) for k in range(1, n + 1))
    return OperatorMatrix(total, space)


def embed(op, into, slot):
    """Lift ``op`` into the product space as ``op (x) I`` or ``I (x) op``."""
    if slot == "spin":
        if op.space != into.spin:
            raise ValueError("operator space does not match the spin factor")
        data = np.kron(op.data, np.eye(into.fock.dim))
    elif slot == "fock":
        if op.space != into.fock:
            raise ValueError("operator space does not match the fock factor")
        data = np.kron(np.eye(into.spin.dim), op.data)
    else:
        raise ValueError(f"slot must be 'spin' or 'fock', got {slot!r}")
    return OperatorMatrix(data, into)


def product_op(space, tag, site=None):
    """Elementary operator named by ``tag`` already embedded in ``space``."""
    tag = _as_tag(tag)
    if tag is OperatorTag.IDENTITY:
        return identity(space)
    if tag in BOSON_TAGS:
        return embed(boson_op(space.fock, tag), space, "fock")
    return embed(spin_op(space.spin, tag, site), space, "spin")


def commutator(A, B):
    return A @ B - B @ A


def commutator_residual(A, B, projector=None):
    """Normalised Frobenius norm ``||P [A, B] P|| / (||A|| ||B||)``.

    Returns 0 when either operand vanishes.
    """
    if A.space != B.space:
        raise ValueError("A and B act on different spaces")
    norm_a, norm_b = A.norm(), B.norm()
    if norm_a == 0.0 or norm_b == 0.0:
        return 0.0
    comm = A.data @ B.data - B.data @ A.data
    if projector is not None:
        if projector.space != A.space:
            raise ValueError("projector acts on a different space")
        comm = projector.data @ comm @ projector.data
    return float(np.linalg.norm(comm) / (norm_a * norm_b))


def projector_below(space, k):
    """Orthogonal projector onto ``spin (x) span{|0>, ..., |k>}``.

    A bare :class:`FockSpace` is also accepted.
    """
    fock = space if isinstance(space, FockSpace) else space.fock
    check_int(k, "k", min_value=0, max_value=fock.n_max)
    diag = (np.arange(fock.dim) <= k).astype(float)
    if isinstance(space, ProductSpace):
        diag = np.tile(diag, space.spin.dim)
    return OperatorMatrix(np.diag(diag), space)
