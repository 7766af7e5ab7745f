from dataclasses import dataclass
from typing import Dict

import numpy as np


def _vec(value) -> np.ndarray:
    arr = np.asarray(value, dtype=float).reshape(3)
    return arr.copy()


@dataclass(frozen=True)
class TransformParams:
    """Exponents (n, m) selecting r = u^n q^m q from the projective family"""

    n: float = -1.0
    m: float = -1.0

    def __post_init__(self):
        if self.n == 0:
            raise ValueError("Transform exponent n must be nonzero")

    @property
    def is_default(self) -> bool:
        return self.n == -1.0 and self.m == -1.0

    def to_dict(self) -> Dict:
        return {"n": self.n, "m": self.m}


@dataclass(frozen=True, eq=False)
class CartesianState:
    r: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "r", _vec(self.r))
        object.__setattr__(self, "v", _vec(self.v))

    def to_array(self) -> np.ndarray:
        return np.concatenate([self.r, self.v])

    @classmethod
    def from_array(cls, arr) -> "CartesianState":
        arr = np.asarray(arr, dtype=float)
        return cls(arr[0:3], arr[3:6])

    def to_dict(self) -> Dict:
        return {"r": self.r.tolist(), "v": self.v.tolist()}


@dataclass(frozen=True, eq=False)
class ProjectiveState:
    """Redundant phase-space point (q, u, p, p_u), standard ordering"""

    q: np.ndarray
    u: float
    p: np.ndarray
    pu: float

    def __post_init__(self):
        object.__setattr__(self, "q", _vec(self.q))
        object.__setattr__(self, "p", _vec(self.p))
        object.__setattr__(self, "u", float(self.u))
        object.__setattr__(self, "pu", float(self.pu))

    @property
    def w(self) -> float:
        return self.u * self.u * self.pu

    def to_array(self) -> np.ndarray:
        return np.concatenate([self.q, [self.u], self.p, [self.pu]])

    @classmethod
    def from_array(cls, arr) -> "ProjectiveState":
        arr = np.asarray(arr, dtype=float)
        return cls(arr[0:3], arr[3], arr[4:7], arr[7])

    def to_quasi(self) -> "QuasiState":
        return QuasiState(self.q, self.p, self.u, self.w)

    def to_dict(self) -> Dict:
        return {
            "q": self.q.tolist(),
            "u": self.u,
            "p": self.p.tolist(),
            "pu": self.pu,
        }


@dataclass(frozen=True, eq=False)
class QuasiState:
    """Quasi-momentum variant (q, p, u, w), modified ordering"""

    q: np.ndarray
    p: np.ndarray
    u: float
    w: float

    def __post_init__(self):
        object.__setattr__(self, "q", _vec(self.q))
        object.__setattr__(self, "p", _vec(self.p))
        object.__setattr__(self, "u", float(self.u))
        object.__setattr__(self, "w", float(self.w))

    def to_array(self) -> np.ndarray:
        return np.concatenate([self.q, self.p, [self.u, self.w]])

    @classmethod
    def from_array(cls, arr) -> "QuasiState":
        arr = np.asarray(arr, dtype=float)
        return cls(arr[0:3], arr[3:6], arr[6], arr[7])

    def to_projective(self) -> ProjectiveState:
        return ProjectiveState(self.q, self.u, self.p, self.w / (self.u * self.u))

    def to_dict(self) -> Dict:
        return {
            "q": self.q.tolist(),
            "p": self.p.tolist(),
            "u": self.u,
            "w": self.w,
        }


@dataclass(frozen=True, eq=False)
class ExtendedState:
    """ProjectiveState augmented with time and its conjugate momentum"""

    base: ProjectiveState
    t: float = 0.0
    pt: float = 0.0

    def to_array(self) -> np.ndarray:
        return np.concatenate([self.base.to_array(), [self.t, self.pt]])

    @classmethod
    def from_array(cls, arr) -> "ExtendedState":
        arr = np.asarray(arr, dtype=float)
        return cls(ProjectiveState.from_array(arr[0:8]), float(arr[8]), float(arr[9]))

    def to_dict(self) -> Dict:
        return {**self.base.to_dict(), "t": self.t, "pt": self.pt}


@dataclass(frozen=True)
class ConstraintReport:
    q_norm: float
    lam: float

    def drift(self):
        return abs(self.q_norm - 1.0), abs(self.lam)

    def to_dict(self) -> Dict:
        return {"q_norm": self.q_norm, "lambda": self.lam}


@dataclass(frozen=True, eq=False)
class PerifocalFrame:
    e_vec: np.ndarray
    h_vec: np.ndarray
    l_hat: np.ndarray
    eccentricity: float
    semilatus_rectum: float

    def to_dict(self) -> Dict:
        return {
            "e_vec": self.e_vec.tolist(),
            "h_vec": self.h_vec.tolist(),
            "l_hat": self.l_hat.tolist(),
            "eccentricity": self.eccentricity,
            "semilatus_rectum": self.semilatus_rectum,
        }

