"""Independent cross-checks of the spectral and dynamics modules.

Two references live here:

* a discretized bath, turning the continuum into M explicit modes so the
  single-excitation sector becomes an ordinary (N+M)-dimensional
  Hamiltonian that can be diagonalized and propagated exactly;
* the closed-form levels of the periodic chain with ``beta = 1/3``, where
  the uniform Fourier block is 3x3 and its bath-dressed characteristic
  polynomial is a cubic solved by the trigonometric formula.
"""
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy import integrate
from scipy.optimize import brentq

from .bath import BathSpec, self_energy, spectral_density
from .dynamics import TimeGrid, Trajectory, evolve
from .errors import DomainError, NumericalError
from .lattice import Boundary, LatticeSpec, build_lattice, eigensystem, find_gaps
from .spectral import SearchOptions, dark_levels, find_bound_states

MAX_DENSE_DIM = 5000


@dataclass(frozen=True)
class DiscreteBath:
    """Explicit bath modes with ``g_k**2 = J(omega_k) * d_omega``."""

    frequencies: np.ndarray
    couplings: np.ndarray

    @property
    def size(self) -> int:
        return len(self.frequencies)


def discretize_bath(bath: BathSpec, M: int, omega_max: Optional[float] = None) -> DiscreteBath:
    """Midpoint rule on a uniform grid over [0, omega_max].

    ``omega_max`` defaults to ``20 * omega_c``, where the exponential tail
    carries less than 1e-8 of the total weight.
    """
    if omega_max is None:
        omega_max = 20.0 * bath.omega_c
    if int(M) != M or M < 10:
        raise DomainError("M must be an integer >= 10")
    if omega_max < 10.0 * bath.omega_c:
        raise DomainError("omega_max must be at least 10 * omega_c")
    dw = omega_max / M
    om = (np.arange(int(M)) + 0.5) * dw
    g = np.sqrt(spectral_density(om, bath) * dw)
    return DiscreteBath(om, g)


def discrete_self_energy(E, db: DiscreteBath):
    """sum_k g_k^2 / (E - omega_k)."""
    E = np.asarray(E, dtype=float)
    out = (db.couplings ** 2 / (E[..., None] - db.frequencies)).sum(axis=-1)
    return float(out) if out.ndim == 0 else out


def total_hamiltonian(spec: LatticeSpec, db: DiscreteBath) -> np.ndarray:
    """Single-excitation Hamiltonian [[H_S, G], [G^T, diag(omega)]], G_nk = g_k."""
    n, m = spec.n_sites, db.size
    if n + m > MAX_DENSE_DIM:
        raise DomainError(f"N + M = {n + m} exceeds the dense limit {MAX_DENSE_DIM}")
    H = np.zeros((n + m, n + m))
    H[:n, :n] = build_lattice(spec)
    H[:n, n:] = db.couplings[None, :]
    H[n:, :n] = db.couplings[:, None]
    H[n:, n:] = np.diag(db.frequencies)
    return H


@dataclass
class CrossCheckReport:
    eigenvalues: np.ndarray = field(repr=False)
    isolated: np.ndarray
    # (secular root, nearest exact eigenvalue, |difference|)
    matches: List[Tuple[float, float, float]] = field(default_factory=list)
    # (dark level, |shift| of the nearest exact eigenvalue)
    dark_shifts: List[Tuple[float, float]] = field(default_factory=list)
    times: Optional[np.ndarray] = field(default=None, repr=False)
    exact_amps: Optional[np.ndarray] = field(default=None, repr=False)
    trajectory: Optional[Trajectory] = field(default=None, repr=False)
    max_deviation: Optional[float] = None

    @property
    def max_level_error(self) -> float:
        return max((m[2] for m in self.matches), default=0.0)


def exact_cross_check(spec: LatticeSpec, db: DiscreteBath, bath: Optional[BathSpec] = None,
                      energies: bool = True, initial=None, grid: Optional[TimeGrid] = None,
                      stride: int = 10, search: Optional[SearchOptions] = None) -> CrossCheckReport:
    """Diagonalize the discretized total Hamiltonian and compare.

    Parameters
    ----------
    bath : BathSpec, optional
        Continuum bath the discretization came from; required for the
        comparisons against ``find_bound_states`` and ``evolve``.
    energies : bool
        Compare isolated (E < 0) exact levels with the secular roots.
    initial, grid : optional
        When both are given, propagate ``initial`` exactly and compare with
        ``evolve`` on the same sample times (max over sites and times of
        the amplitude difference).
    """
    H = total_hamiltonian(spec, db)
    n = spec.n_sites
    E, V = np.linalg.eigh(H)
    report = CrossCheckReport(eigenvalues=E, isolated=E[E < 0])

    es = eigensystem(build_lattice(spec))
    for i in dark_levels(es):
        eps = float(es.energies[i])
        report.dark_shifts.append((eps, float(np.min(np.abs(E - eps)))))

    if energies and bath is not None:
        for b in find_bound_states(es, bath, search):
            if b.energy < 0:
                j = int(np.argmin(np.abs(report.isolated - b.energy)))
                exact = float(report.isolated[j])
                report.matches.append((b.energy, exact, abs(exact - b.energy)))

    if initial is not None and grid is not None:
        if bath is None:
            raise DomainError("trajectory comparison needs the continuum bath")
        psi = np.asarray(initial, dtype=complex)
        tr = evolve(psi, spec, bath, grid, stride=stride, es=es)
        coef = V[:n].T @ psi  # overlap of each exact eigenvector with the initial state
        phases = np.exp(-1j * np.outer(tr.times, E))
        exact = (phases * coef) @ V[:n].T
        report.times = tr.times
        report.exact_amps = exact
        report.trajectory = tr
        report.max_deviation = float(np.max(np.abs(exact - tr.amps)))
    return report


# --------------------------------------------------------------------------
# beta = 1/3 periodic chain

BRANCH_ANGLES = (2.0 * np.pi / 3.0, 4.0 * np.pi / 3.0, 0.0)


@dataclass(frozen=True)
class Q3Levels:
    """Bath-dressed levels of the uniform Fourier block, by branch.

    ``E0``, ``E1``, ``E2`` use the phase offsets 2pi/3, 4pi/3 and 0 in
    ``E = D + 2R cos(theta + offset)``. Entries are NaN where the branch has
    no real self-consistent solution.
    """

    E0: float
    E1: float
    E2: float

    def sorted(self) -> Tuple[float, float, float]:
        return tuple(sorted((self.E0, self.E1, self.E2)))


def q3_branch(E: float, L: int, delta: float, phi: float, bath: BathSpec, branch: int) -> float:
    """Right-hand side ``D + 2R cos(theta + offset)`` of the cubic at energy ``E``.

    With ``D = L * Sigma(E)`` the uniform block is ``M + D 11^T``; its
    characteristic polynomial, shifted by ``x = E - D``, is the depressed
    cubic ``x^3 - 3R^2 x - 2[(1+D)^3 + delta^3 cos(3 phi)/8] = 0`` with
    ``R^2 = (1+D)^2 + delta^2/4``.

    Raises
    ------
    DomainError
        When the arccos argument leaves [-1, 1] (no real solution).
    """
    D = L * self_energy(E, bath) if bath.eta else 0.0
    R = np.sqrt((1 + D) ** 2 + delta ** 2 / 4)
    if R == 0:
        return D
    arg = ((1 + D) ** 3 + delta ** 3 * np.cos(3 * phi) / 8) / R ** 3
    if abs(arg) > 1 + 1e-12:
        raise DomainError(f"arccos argument {arg:.6g} outside [-1, 1]")
    theta = np.arccos(np.clip(arg, -1.0, 1.0)) / 3.0
    return float(D + 2 * R * np.cos(theta + BRANCH_ANGLES[branch]))


def _solve_branch(L, delta, phi, bath, branch, tol=1e-10, damping=0.5, max_iter=200):
    rhs = lambda E: q3_branch(E, L, delta, phi, bath, branch)
    E = q3_branch(-1.0, L, delta, phi, BathSpec(eta=0.0, s=bath.s, omega_c=bath.omega_c), branch)
    if bath.eta == 0:
        return E
    try:
        for _ in range(max_iter):
            if abs(E) < 1e-6:
                break
            new = (1 - damping) * E + damping * rhs(E)
            if abs(new - E) <= tol:
                return new
            E = new
    except DomainError:
        pass
    return _bracketed_branch(rhs, bath)


def _bracketed_branch(rhs, bath):
    span = 20.0 * bath.omega_c * max(1.0, bath.eta * 100)
    xs = np.concatenate([np.linspace(-span, -1e-6, 20001), np.linspace(1e-6, span / 4, 5001)])
    vals = []
    for x in xs:
        try:
            vals.append(x - rhs(x))
        except DomainError:
            vals.append(np.nan)
    vals = np.array(vals)
    g = lambda x: x - rhs(x)
    for k in range(len(xs) - 1):
        a, b = vals[k], vals[k + 1]
        if np.isfinite(a) and np.isfinite(b) and np.sign(a) != np.sign(b) and xs[k] * xs[k + 1] > 0:
            return brentq(g, xs[k], xs[k + 1], xtol=1e-14)
    return float("nan")


def commensurate_levels_q3(L: int, delta: float, phi: float, bath: BathSpec) -> Q3Levels:
    """Self-consistent levels of the bath-coupled periodic chain with beta = 1/3."""
    if int(L) != L or L < 1:
        raise DomainError("L must be a positive integer")
    return Q3Levels(*(_solve_branch(int(L), float(delta), float(phi), bath, k) for k in range(3)))


def q3_block_eigenvalues(delta: float, phi: float) -> np.ndarray:
    """Eigenvalues of the bare 3x3 uniform block (ascending)."""
    n = np.arange(1, 4)
    M = np.ones((3, 3)) - np.eye(3) + np.diag(delta * np.cos(2 * np.pi * n / 3 + phi))
    return np.linalg.eigvalsh(M)


def periodic_q3_roots(L: int, delta: float, phi: float, bath: BathSpec) -> np.ndarray:
    """Secular roots of the periodic 3L-site chain from the general solver."""
    spec = LatticeSpec(3 * L, delta, 1.0 / 3.0, phi, Boundary.PERIODIC)
    es = eigensystem(build_lattice(spec))
    # the cubic's branches may also have principal-value solutions above the
    # band, so that region is scanned as well
    gaps = list(find_gaps(es, 1e-9)) + [(float(es.energies[-1]), 40.0 * bath.omega_c)]
    found = find_bound_states(es, bath, SearchOptions(min_gap_width=1e-9, include_positive=True, gaps=gaps))
    return np.array([b.energy for b in found])


def kernel_by_quadrature(t: float, bath: BathSpec) -> complex:
    """int_0^inf J(w) exp(-i w t) dw by QUADPACK's Fourier integrator."""
    if t < 0:
        raise DomainError("t must be >= 0")
    J = lambda w: spectral_density(w, bath)
    if t == 0:
        val, err = integrate.quad(J, 0, np.inf, epsabs=1e-12, limit=400)
        return complex(val)
    re, e1 = integrate.quad(J, 0, np.inf, weight="cos", wvar=t, epsabs=1e-12, limlst=200)
    im, e2 = integrate.quad(J, 0, np.inf, weight="sin", wvar=t, epsabs=1e-12, limlst=200)
    if e1 + e2 > 1e-8:
        raise NumericalError(f"Fourier quadrature error {e1 + e2:.3g} at t={t}")
    return complex(re, -im)
