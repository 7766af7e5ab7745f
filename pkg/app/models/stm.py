from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from app.utils.errors import DimensionMismatch, OrderingMismatch

# coordinate layouts an STM may be expressed in
ORDERINGS: Dict[str, Tuple[str, ...]] = {
    "modified": ("q1", "q2", "q3", "p1", "p2", "p3", "u", "w"),
    "canonical": ("q1", "q2", "q3", "p1", "p2", "p3", "u", "pu"),
    "standard": ("q1", "q2", "q3", "u", "p1", "p2", "p3", "pu"),
    "extended6": ("q1", "q2", "q3", "p1", "p2", "p3"),
    "radial2": ("u", "w"),
    "extended10": ("q1", "q2", "q3", "u", "p1", "p2", "p3", "pu", "t", "pt"),
}
PARAMETERS = ("t", "s", "tau")


@dataclass(frozen=True, eq=False)
class Stm8:
    """Sensitivity matrix tagged with its coordinate ordering and evolution parameter"""

    entries: np.ndarray
    ordering: str = "modified"
    parameter: str = "tau"

    def __post_init__(self):
        if self.ordering not in ORDERINGS:
            raise OrderingMismatch(f"Unknown ordering {self.ordering}")
        if self.parameter not in PARAMETERS:
            raise OrderingMismatch(f"Unknown evolution parameter {self.parameter}")
        entries = np.array(self.entries, dtype=float)
        size = len(ORDERINGS[self.ordering])
        if entries.shape != (size, size):
            raise DimensionMismatch(
                f"{self.ordering} STM must be {size}x{size}, got {entries.shape}"
            )
        object.__setattr__(self, "entries", entries)

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def compose(self, earlier: "Stm8") -> "Stm8":
        """Return self . earlier, the STM over both segments"""
        if earlier.ordering != self.ordering or earlier.parameter != self.parameter:
            raise OrderingMismatch(
                f"Cannot compose {self.ordering}/{self.parameter} with "
                f"{earlier.ordering}/{earlier.parameter}"
            )
        return Stm8(self.entries @ earlier.entries, self.ordering, self.parameter)

    def block(self, rows: slice, cols: slice) -> np.ndarray:
        return self.entries[rows, cols]

    def to_dict(self) -> Dict:
        return {
            "ordering": self.ordering,
            "parameter": self.parameter,
            "labels": list(ORDERINGS[self.ordering]),
            "entries": self.entries.tolist(),
        }


@dataclass(frozen=True, eq=False)
class SymplecticForm:
    matrix: np.ndarray
    name: str

    @staticmethod
    def standard(dim: int) -> "SymplecticForm":
        """J_{2n} = [[0, I], [-I, 0]] on (Q; P)"""
        if dim % 2:
            raise DimensionMismatch("Symplectic form needs an even dimension")
        half = dim // 2
        j = np.zeros((dim, dim))
        j[:half, half:] = np.eye(half)
        j[half:, :half] = -np.eye(half)
        return SymplecticForm(j, f"J{dim}")

    @staticmethod
    def direct_sum(*forms: "SymplecticForm") -> "SymplecticForm":
        dim = sum(f.matrix.shape[0] for f in forms)
        j = np.zeros((dim, dim))
        offset = 0
        for f in forms:
            k = f.matrix.shape[0]
            j[offset : offset + k, offset : offset + k] = f.matrix
            offset += k
        return SymplecticForm(j, "+".join(f.name for f in forms))

    @staticmethod
    def for_ordering(ordering: str) -> "SymplecticForm":
        """Form under which flows in the given ordering are checked"""
        std = SymplecticForm.standard
        if ordering in ("modified", "canonical"):
            return SymplecticForm.direct_sum(std(6), std(2))
        if ordering == "standard":
            return std(8)
        if ordering == "extended6":
            return std(6)
        if ordering == "radial2":
            return std(2)
        if ordering == "extended10":
            return SymplecticForm.direct_sum(std(8), std(2))
        raise OrderingMismatch(f"Unknown ordering {ordering}")
