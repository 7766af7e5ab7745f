from dataclasses import dataclass

from app.models.state import QuasiState


@dataclass(frozen=True)
class KeplerFlowInput:
    x0: QuasiState
    k1: float = 1.0
    simplified: bool = False


@dataclass(frozen=True)
class ManevFlowInput:
    x0: QuasiState
    k1: float = 1.0
    k2: float = 0.0
