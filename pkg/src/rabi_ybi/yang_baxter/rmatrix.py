"""The rational R-matrix and the Yang-Baxter residual."""

from dataclasses import dataclass, fields

import numpy as np

from .._validation import check_finite_scalar

PERMUTATION = np.array(
    [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ]
)


@dataclass(frozen=True)
class SpectralParams:
    """Spectral parameters ``u``, ``v`` and the twist/L-operator constants.

    ``lam`` is the omega = 0 twist parameter (``Delta / g`` at the integrable
    point), ``b`` and ``c`` the generalised-model twist entries.
    """

    u: float = 0.0
    v: float = 0.0
    eta: float = 1.0
    lam: float = 0.0
    b: float = 0.0
    c: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            object.__setattr__(self, f.name, check_finite_scalar(getattr(self, f.name), f.name))

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        if "lambda" in d:
            d["lam"] = d.pop("lambda")
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise KeyError(f"unknown spectral parameter(s): {sorted(unknown)}")
        return cls(**d)

    def to_dict(self):
        return {"u": self.u, "v": self.v, "eta": self.eta, "lambda": self.lam, "b": self.b, "c": self.c}


def r_matrix(p, u=None):
    """``R(u) = u I + eta P`` on the two-fold auxiliary space.

    ``u`` overrides ``p.u`` so the same parameters can feed ``R(u - v)``.
    """
    u = p.u if u is None else u
    return u * np.eye(4) + p.eta * PERMUTATION


def _r12(R):
    return np.kron(R, np.eye(2))


def _r23(R):
    return np.kron(np.eye(2), R)


def _r13(R):
    swap23 = _r23(PERMUTATION)
    return swap23 @ _r12(R) @ swap23


def check_ybe(p):
    """Max-norm of ``R12(u-v) R13(u) R23(v) - R23(v) R13(u) R12(u-v)``."""
    r_uv = r_matrix(p, p.u - p.v)
    r_u = r_matrix(p, p.u)
    r_v = r_matrix(p, p.v)
    lhs = _r12(r_uv) @ _r13(r_u) @ _r23(r_v)
    rhs = _r23(r_v) @ _r13(r_u) @ _r12(r_uv)
    return float(np.abs(lhs - rhs).max())
