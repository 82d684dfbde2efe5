"""Closed Aubry-Andre-Harper chain: Hamiltonian, spectrum, gaps, edge modes, IPR.

Energies are in units of the nearest-neighbour hopping. Sites are numbered
1..N in every public interface (``loc_site``, edge tags); arrays are 0-based.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import List, NamedTuple, Sequence, Tuple, Union

import numpy as np

from .errors import DomainError, EigensolverError

GOLDEN = (1.0 + np.sqrt(5.0)) / 2.0


class Boundary(str, Enum):
    OPEN = "open"
    PERIODIC = "periodic"


def normalize_phase(phi: float) -> float:
    """Map ``phi`` into [-pi, pi)."""
    out = (float(phi) + np.pi) % (2.0 * np.pi) - np.pi
    # fmod rounding can land exactly on +pi
    if out >= np.pi:
        out -= 2.0 * np.pi
    return out


@dataclass(frozen=True)
class LatticeSpec:
    """Chain parameters: N sites, modulation amplitude, wavenumber and phase."""

    n_sites: int
    delta: float
    beta: float
    phi: float = 0.0
    boundary: Boundary = Boundary.OPEN

    def __post_init__(self):
        if int(self.n_sites) != self.n_sites or self.n_sites < 2:
            raise DomainError(f"n_sites must be an integer >= 2, got {self.n_sites!r}")
        if not np.isfinite(self.delta) or self.delta < 0:
            raise DomainError(f"delta must be finite and >= 0, got {self.delta!r}")
        if not np.isfinite(self.beta) or not np.isfinite(self.phi):
            raise DomainError("beta and phi must be finite")
        object.__setattr__(self, "n_sites", int(self.n_sites))
        object.__setattr__(self, "delta", float(self.delta))
        object.__setattr__(self, "beta", float(self.beta))
        object.__setattr__(self, "phi", normalize_phase(self.phi))
        object.__setattr__(self, "boundary", Boundary(self.boundary))

    def onsite(self) -> np.ndarray:
        n = np.arange(1, self.n_sites + 1)
        return self.delta * np.cos(2.0 * np.pi * self.beta * n + self.phi)


def build_lattice(spec: LatticeSpec) -> np.ndarray:
    """Dense real-symmetric single-particle Hamiltonian of the chain."""
    n = spec.n_sites
    H = np.diag(spec.onsite())
    idx = np.arange(n - 1)
    H[idx, idx + 1] = 1.0
    H[idx + 1, idx] = 1.0
    if spec.boundary is Boundary.PERIODIC:
        # for N=2 the corner coincides with the bond and is added on top of it
        H[0, n - 1] += 1.0
        H[n - 1, 0] += 1.0
    return H


@dataclass(frozen=True)
class EigenSystem:
    """Eigen-decomposition of the closed chain.

    ``modes[i]`` is the i-th eigenvector (row), ``weights[i]`` its component
    sum, i.e. the overlap with the all-ones vector the bath couples to.
    """

    energies: np.ndarray
    modes: np.ndarray
    weights: np.ndarray = field(repr=False)

    @property
    def n_sites(self) -> int:
        return self.energies.shape[0]

    def to_eigenbasis(self, amps) -> np.ndarray:
        return self.modes @ np.asarray(amps)

    def to_sites(self, coeffs) -> np.ndarray:
        return np.asarray(coeffs) @ self.modes


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


def eigensystem(H) -> EigenSystem:
    """Diagonalize a real symmetric matrix with a fixed sign/ordering convention.

    Each mode's largest-magnitude component is made positive. Exactly
    degenerate energies are ordered by the site index of that component.
    """
    H = np.asarray(H, dtype=float)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise DomainError("H must be a square matrix")
    if not np.allclose(H, H.T, rtol=0.0, atol=1e-12):
        raise DomainError("H must be symmetric")
    try:
        energies, vecs = np.linalg.eigh(H)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(f"eigensolver did not converge: {exc}") from exc

    modes = vecs.T.copy()
    peak = np.argmax(np.abs(modes), axis=1)
    signs = np.sign(modes[np.arange(len(peak)), peak])
    modes *= signs[:, None]

    order = np.lexsort((peak, energies))
    energies, modes = energies[order], modes[order]
    return EigenSystem(_freeze(energies), _freeze(modes), _freeze(modes.sum(axis=1)))


def inverse_participation_ratio(amps) -> float:
    """IPR of the re-normalized amplitudes; 1/N for uniform, 1 for one site."""
    p = np.abs(np.asarray(amps)) ** 2
    total = p.sum()
    if not total > 0:
        raise DomainError("IPR undefined for an all-zero state")
    p = p / total
    return float(np.sum(p * p))


Gap = Tuple[float, float]


def find_gaps(es: Union[EigenSystem, Sequence[float]], min_width: float) -> List[Gap]:
    """Open intervals free of eigenvalues.

    Returns the region below the spectrum, every interval between consecutive
    eigenvalues at least ``min_width`` wide, and the region above, in
    ascending order. The outer two have infinite ends.
    """
    if min_width <= 0:
        raise DomainError("min_width must be positive")
    e = np.sort(np.asarray(es.energies if isinstance(es, EigenSystem) else es, dtype=float))
    gaps = [(-np.inf, float(e[0]))]
    for lo, hi in zip(e[:-1], e[1:]):
        if hi - lo >= min_width:
            gaps.append((float(lo), float(hi)))
    gaps.append((float(e[-1]), np.inf))
    return gaps


def interior(gaps: Sequence[Gap]) -> List[Gap]:
    return [g for g in gaps if np.isfinite(g[0]) and np.isfinite(g[1])]


class EdgeMode(NamedTuple):
    index: int
    end: str  # "left" (site 1) or "right" (site N)

    def site(self, n_sites: int) -> int:
        return 1 if self.end == "left" else n_sites


def classify_edge_modes(es: EigenSystem, gaps: Sequence[Gap] = None,
                        ipr_threshold: float = 0.1, edge_window: int = 10,
                        min_width: float = 0.05) -> List[EdgeMode]:
    """Tag in-gap eigenmodes that sit at one end of an open chain.

    A mode qualifies when its energy bounds an interior gap, its IPR is at
    least ``ipr_threshold``, and at least half of its weight lies within
    ``edge_window`` sites of one end.
    """
    if ipr_threshold <= 0 or edge_window <= 0:
        raise DomainError("thresholds must be positive")
    if gaps is None:
        gaps = find_gaps(es, min_width)
    inner = interior(gaps)
    tol = 1e-12 * max(1.0, float(np.max(np.abs(es.energies))))
    out = []
    for i, (eps, mode) in enumerate(zip(es.energies, es.modes)):
        if not any(lo - tol <= eps <= hi + tol for lo, hi in inner):
            continue
        p = mode ** 2
        if np.sum(p * p) < ipr_threshold:
            continue
        left, right = p[:edge_window].sum(), p[-edge_window:].sum()
        if left >= 0.5 and left >= right:
            out.append(EdgeMode(i, "left"))
        elif right >= 0.5:
            out.append(EdgeMode(i, "right"))
    return out


def localization_site(amps) -> int:
    """1-based site carrying the largest probability."""
    return int(np.argmax(np.abs(np.asarray(amps)))) + 1
