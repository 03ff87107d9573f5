"""
Forward model: depolarizing Mueller matrices synthesized from weighted Jones
ensembles, exact interferometric visibilities as convex sums of complex
overlaps, and a seeded generator of random physical Mueller matrices.

Member global phases matter for visibilities but not for the Mueller
synthesis.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from polarlab.coherency import cov_to_mueller
from polarlab.config import (
    LCG_INCREMENT,
    LCG_MODULUS,
    LCG_MULTIPLIER,
    PHASE_UNDEFINED_TOL,
    WEIGHT_SUM_TOL,
)
from polarlab.errors import InvalidEnsembleError
from polarlab.pauli_core import SIGMA, as_spinor, jones_to_mueller, retarder

logger = logging.getLogger(__name__)

PAIR_AXES = [(1.0, 0.0, 0.0), (0.0, 1.0, 0.0)]
TRIPLE_AXES = [(1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0)]


@dataclass(frozen=True)
class JonesEnsemble:
    members: List[Tuple[float, np.ndarray]]

    def __post_init__(self):
        if not self.members:
            raise InvalidEnsembleError("Ensemble has no members")
        weights = np.array([w for w, _ in self.members], dtype=float)
        if np.any(weights <= 0):
            raise InvalidEnsembleError("Ensemble weights must be positive")
        if abs(weights.sum() - 1.0) > WEIGHT_SUM_TOL:
            raise InvalidEnsembleError(f"Ensemble weights sum to {weights.sum():.15f}, expected 1")
        for _, jones in self.members:
            if np.asarray(jones).shape != (2, 2):
                raise InvalidEnsembleError(f"Jones members must be 2x2, got {np.asarray(jones).shape}")

    @classmethod
    def from_weights(cls, weights: Sequence[float], jones_list: Sequence, renormalize: bool = True) -> "JonesEnsemble":
        weights = np.asarray(weights, dtype=float)
        if np.any(weights <= 0):
            raise InvalidEnsembleError("Ensemble weights must be positive")
        total = weights.sum()
        if renormalize and abs(total - 1.0) > WEIGHT_SUM_TOL:
            logger.warning(f"Ensemble weights sum to {total:.12f}; renormalizing")
            weights = weights / total
        members = [(float(w), np.asarray(j, dtype=complex)) for w, j in zip(weights, jones_list)]
        return cls(members)

    @classmethod
    def equiprobable(cls, jones_list: Sequence) -> "JonesEnsemble":
        n = len(jones_list)
        return cls([(1.0 / n, np.asarray(j, dtype=complex)) for j in jones_list])

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for w, _ in self.members])

    @property
    def jones_list(self) -> List[np.ndarray]:
        return [j for _, j in self.members]


@dataclass(frozen=True)
class VisibilitySample:
    param: float
    visibility: complex
    arg: Optional[float]
    modulus: float


@dataclass
class VisibilityCurve:
    samples: List[VisibilitySample] = field(default_factory=list)

    def params(self) -> np.ndarray:
        return np.array([s.param for s in self.samples])

    def visibilities(self) -> np.ndarray:
        return np.array([s.visibility for s in self.samples])

    def args(self) -> np.ndarray:
        return np.array([np.nan if s.arg is None else s.arg for s in self.samples])

    def to_rows(self) -> List[Tuple[float, float, float, Optional[float], float]]:
        return [(s.param, s.visibility.real, s.visibility.imag, s.arg, s.modulus) for s in self.samples]


# ==================== SYNTHESIS ====================

def ensemble_to_mueller(ens: JonesEnsemble) -> np.ndarray:
    return sum(w * jones_to_mueller(j) for w, j in ens.members)


def ensemble_visibility(ens: JonesEnsemble, psi) -> complex:
    """sum_k p_k <psi|J_k|psi>"""
    psi = as_spinor(psi)
    return complex(sum(w * np.vdot(psi, j @ psi) for w, j in ens.members))


def visibility_sample(param: float, visibility: complex, tol: float = PHASE_UNDEFINED_TOL) -> VisibilitySample:
    modulus = float(abs(visibility))
    arg = float(np.angle(visibility)) if modulus > tol else None
    return VisibilitySample(param=float(param), visibility=complex(visibility), arg=arg, modulus=modulus)


def sweep_visibility(
    ens_builder: Callable[[float], JonesEnsemble],
    grid: Iterable[float],
    psi,
    tol: float = PHASE_UNDEFINED_TOL,
) -> VisibilityCurve:
    grid = list(grid)
    if not grid:
        raise InvalidEnsembleError("Sweep grid is empty")
    psi = as_spinor(psi)
    return VisibilityCurve([visibility_sample(x, ensemble_visibility(ens_builder(x), psi), tol) for x in grid])


def make_grid(start: float, stop: float, count: int) -> np.ndarray:
    """Inclusive grid; a single point sits at start"""
    if count < 1:
        raise InvalidEnsembleError("Grid count must be at least 1")
    return np.linspace(start, stop, count) if count > 1 else np.array([float(start)])


# ==================== PARAMETERIZED FAMILIES ====================

def retarder_family(axes: Sequence, weights: Optional[Sequence[float]] = None) -> Callable[[float], JonesEnsemble]:
    """phi -> ensemble of retarders exp(-i phi n_k.SIGMA/2)"""
    axes = [np.asarray(a, dtype=float) for a in axes]
    if weights is None:
        weights = [1.0 / len(axes)] * len(axes)

    def build(phi: float) -> JonesEnsemble:
        return JonesEnsemble.from_weights(weights, [retarder(phi, a) for a in axes])

    return build


def retarder_pair(phi: float) -> JonesEnsemble:
    return retarder_family(PAIR_AXES)(phi)


def retarder_triple(phi: float) -> JonesEnsemble:
    return retarder_family(TRIPLE_AXES)(phi)


def closed_form_pair_visibility(phi: float) -> complex:
    return complex(np.cos(phi / 2.0), -0.5 * np.sin(phi / 2.0))


def closed_form_pair_phase(phi: float) -> float:
    return float(-np.arctan(0.5 * np.tan(phi / 2.0)))


FAMILIES = {
    "retarder-pair": retarder_pair,
    "retarder-triple": retarder_triple,
}


def get_family(name: str) -> Callable[[float], JonesEnsemble]:
    try:
        return FAMILIES[name]
    except KeyError:
        raise InvalidEnsembleError(f"Unknown ensemble family '{name}'. Known: {sorted(FAMILIES)}")


def depolarizer_ensemble() -> JonesEnsemble:
    """Equiprobable Pauli operators: the ideal depolarizer diag(1, 0, 0, 0)"""
    return JonesEnsemble.equiprobable(list(SIGMA))


# ==================== SEEDED GENERATOR ====================

class Lcg64:
    """64-bit LCG; each draw advances the state and maps its high 53 bits to [0, 1)"""

    def __init__(self, seed: int):
        self.state = int(seed) % LCG_MODULUS

    def next_float(self) -> float:
        self.state = (LCG_MULTIPLIER * self.state + LCG_INCREMENT) % LCG_MODULUS
        return (self.state >> 11) * (1.0 / (1 << 53))

    def uniform(self, low: float = -1.0, high: float = 1.0) -> float:
        return low + (high - low) * self.next_float()


def random_physical_mueller(seed: int, rank: int = 4) -> np.ndarray:
    """
    Deterministic per seed: H = sum_k w_k g_k g_k^dag over `rank` pseudo-random
    complex vectors, trace-normalized, mapped back to a Mueller matrix.
    """
    if not 1 <= rank <= 4:
        raise ValueError(f"Rank must be between 1 and 4, got {rank}")
    rng = Lcg64(seed)
    h = np.zeros((4, 4), dtype=complex)
    for _ in range(rank):
        g = np.array([complex(rng.uniform(), rng.uniform()) for _ in range(4)])
        weight = 0.05 + rng.next_float()
        h += weight * np.outer(g, g.conj())
    h /= np.trace(h).real
    return cov_to_mueller(h)
