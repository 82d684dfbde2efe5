"""Bound states of the chain dressed by the common bath.

The coupled problem ``(H_S + Sigma(E) 11^T) alpha = E alpha`` is a rank-one
update of the chain Hamiltonian, so its determinant vanishes exactly when
the scalar secular function

    F(E) = 1 + Sigma(E) * sum_i w_i^2 / (eps_i - E)

vanishes. Roots are bracketed on grids inside each spectral gap and refined
with Brent's method. Below the spectrum the root is the ground special
state; inside negative gaps they are discrete bound states (DBS); inside
positive gaps, with the principal-value self-energy, they are bound states
in the continuum (BIC).

Amplitudes are normalized on the chain. The bath part of the full state then
carries ``d = (sum_n alpha_n)^2 * int J/(E-w)^2``, so the full norm is
``1 + d``; ``emission_fraction = d / (1 + d)`` is the bath share of a
normalized state.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple
import warnings

import numpy as np
from scipy.optimize import brentq

from . import _kernels
from .bath import BathSpec, self_energy, self_energy_derivative
from .errors import DegenerateRootError, DomainError, NumericalError, RootRefinementWarning
from .lattice import EigenSystem, find_gaps, interior, inverse_participation_ratio, localization_site

POLE_TOL = 1e-12
ZERO_GUARD = 1e-6


class Kind(str, Enum):
    DBS_GROUND = "dbs_ground"
    DBS_GAP = "dbs_gap"
    BIC = "bic"
    DARK = "dark"


@dataclass
class BoundState:
    """A root of the secular function with its chain-normalized mode."""

    energy: float
    amplitudes: np.ndarray = field(repr=False)
    kind: Kind
    ipr: float
    emission: float
    gap: Tuple[float, float]
    secular_slope: float
    sum_alpha: float = 0.0
    residual: float = 0.0

    @property
    def emission_fraction(self) -> float:
        """Bath share ``d/(1+d)`` of the normalized full state."""
        return self.emission / (1.0 + self.emission)

    @property
    def loc_site(self) -> int:
        return localization_site(self.amplitudes)

    @property
    def physical_emission(self) -> bool:
        # for a BIC, d is built from the principal-value derivative only
        return self.kind is not Kind.BIC


class BoundStateList(list):
    """List of BoundState with the refinement warnings raised while building it."""

    def __init__(self, items=(), warnings_=()):
        super().__init__(items)
        self.warnings = list(warnings_)


@dataclass(frozen=True)
class SearchOptions:
    """Root-search controls.

    Parameters
    ----------
    min_gap_width : float
        Interior gaps narrower than this are ignored.
    grid_points : int
        Uniform sign-scan points per gap (before endpoint clustering).
    include_positive : bool
        Also scan positive gaps with the principal-value self-energy.
    gaps : sequence of (lo, hi), optional
        Explicit intervals to scan instead of ``find_gaps`` output.
    """

    min_gap_width: float = 0.05
    grid_points: int = 2000
    include_positive: bool = False
    gaps: Optional[Sequence[Tuple[float, float]]] = None
    f_tol: float = 1e-10
    x_tol: float = 1e-12

    def __post_init__(self):
        if self.min_gap_width <= 0 or self.grid_points < 2:
            raise DomainError("min_gap_width must be > 0 and grid_points >= 2")


def _w2(es):
    return np.asarray(es.weights) ** 2


def _resolvent(E, es):
    return _kernels.resolvent_sum(np.atleast_1d(E), np.asarray(es.energies), _w2(es))


def secular_value(E, es: EigenSystem, bath: BathSpec):
    """F(E) = 1 + Sigma(E) * sum_i w_i^2/(eps_i - E); vectorized over E.

    Raises
    ------
    DomainError
        If ``E`` is 0 or within 1e-12 of a chain eigenvalue.
    """
    Ea = np.atleast_1d(np.asarray(E, dtype=float))
    if np.any(Ea == 0):
        raise DomainError("F(E) is not evaluated at E = 0")
    if np.min(np.abs(Ea[:, None] - np.asarray(es.energies)[None, :])) < POLE_TOL:
        raise DomainError("E coincides with a chain eigenvalue (pole of F)")
    if bath.eta == 0:
        out = np.ones_like(Ea)
    else:
        out = 1.0 + self_energy(Ea, bath) * _resolvent(Ea, es)
    return float(out[0]) if np.ndim(E) == 0 else out.reshape(np.shape(E))


def secular_derivative(E: float, es: EigenSystem, bath: BathSpec) -> float:
    """dF/dE = Sigma' G + Sigma G' with G = sum w^2/(eps - E)."""
    eps, w2 = np.asarray(es.energies), _w2(es)
    G = np.sum(w2 / (eps - E))
    dG = np.sum(w2 / (eps - E) ** 2)
    return float(self_energy_derivative(E, bath) * G + self_energy(E, bath) * dG)


def dark_levels(es: EigenSystem, tol: float = 1e-10) -> List[int]:
    """Mode indices with ``|w_i| <= tol``; these decouple from the bath."""
    if tol <= 0:
        raise DomainError("tol must be positive")
    return [int(i) for i in np.nonzero(np.abs(es.weights) <= tol)[0]]


def _classify(E, es):
    if E < es.energies[0]:
        return Kind.DBS_GROUND
    return Kind.DBS_GAP if E < 0 else Kind.BIC


def _containing_gap(E, es):
    eps = np.asarray(es.energies)
    k = int(np.searchsorted(eps, E))
    lo = float(eps[k - 1]) if k > 0 else -np.inf
    hi = float(eps[k]) if k < len(eps) else np.inf
    return (lo, hi)


def _fix_sign(v):
    k = int(np.argmax(np.abs(v)))
    return v if v[k] >= 0 else -v


def reconstruct_mode(E: float, es: EigenSystem, bath: BathSpec, check: bool = True) -> BoundState:
    """Chain amplitudes and observables of the bound state at energy ``E``.

    ``alpha_n`` is proportional to ``sum_i w_i gamma_in / (eps_i - E)``.
    When ``E`` sits on a dark level the bare eigenvector is returned with
    ``kind = Kind.DARK``.

    Raises
    ------
    DomainError
        If ``check`` and ``|F(E)| > 1e-8``.
    """
    E = float(E)
    eps = np.asarray(es.energies)
    w = np.asarray(es.weights)
    gap = _containing_gap(E, es)

    near = np.nonzero(np.abs(eps - E) < 1e-10)[0]
    dark = [i for i in near if abs(w[i]) <= 1e-10]
    if dark:
        i = dark[0]
        amps = np.array(es.modes[i], dtype=float)
        return BoundState(E, amps, Kind.DARK, inverse_participation_ratio(amps), 0.0,
                          (float(eps[i]), float(eps[i])), float("nan"), 0.0, 0.0)

    F = secular_value(E, es, bath)
    if check and abs(F) > 1e-8:
        raise DomainError(f"E={E!r} is not a root of the secular function (F={F:.3g})")

    coeff = w / (eps - E)
    coeff /= np.linalg.norm(coeff)
    amps = _fix_sign(coeff @ es.modes)
    coeff = es.modes @ amps
    sum_alpha = float(w @ coeff)

    sig = self_energy(E, bath) if bath.eta else 0.0
    residual = float(np.linalg.norm((eps - E) * coeff + sig * w * sum_alpha))
    slope = -self_energy_derivative(E, bath) if bath.eta else 0.0
    d = sum_alpha ** 2 * slope
    return BoundState(
        energy=E, amplitudes=amps, kind=_classify(E, es),
        ipr=inverse_participation_ratio(amps), emission=float(d), gap=gap,
        secular_slope=secular_derivative(E, es, bath) if bath.eta else 0.0,
        sum_alpha=sum_alpha, residual=residual,
    )


def _scan_grid(lo, hi, n):
    t = np.concatenate([np.linspace(0.0, 1.0, n + 1)[1:-1],
                        np.geomspace(1e-13, 1e-3, 60), 1.0 - np.geomspace(1e-13, 1e-3, 60)])
    t = np.unique(t)
    return lo + (hi - lo) * t


def _refine(f, a, b, opts):
    root = brentq(f, a, b, xtol=opts.x_tol * 1e-3, rtol=4 * np.finfo(float).eps, maxiter=500)
    return root


def _roots_in(lo, hi, es, bath, opts, problems):
    """All sign changes of F on (lo, hi), refined."""
    xs = _scan_grid(lo, hi, opts.grid_points)
    eps = np.asarray(es.energies)
    keep = (np.abs(xs) > ZERO_GUARD) & (np.min(np.abs(xs[:, None] - eps[None, :]), axis=1) > 1e-11)
    xs = xs[keep]
    if len(xs) < 2:
        return []
    fs = secular_value(xs, es, bath)
    f = lambda x: secular_value(x, es, bath)
    roots = []
    for c in np.nonzero(np.sign(fs[:-1]) != np.sign(fs[1:]))[0]:
        a, b = xs[c], xs[c + 1]
        try:
            r = _refine(f, a, b, opts)
            val = f(r)
        except (ValueError, RuntimeError) as exc:
            problems.append((a, b, str(exc)))
            continue
        # Brent shrinks the bracket to ~ulp; accept on either criterion,
        # but a huge |F| means the bracket straddled a pole-like jump
        if abs(val) > max(opts.f_tol, 1e-6):
            problems.append((a, b, f"sign change does not refine: F({r!r}) = {val:.3g}"))
            continue
        roots.append(r)
    return roots


def _ground_root(es, bath, opts, problems):
    """The root below the spectrum.

    There F is monotone decreasing (both Sigma and the resolvent sum grow
    in magnitude towards the band edge), so one bracket holds at most one
    root and Brent's method is applied to it directly.
    """
    eps0 = float(es.energies[0])
    hi = min(eps0, 0.0) - ZERO_GUARD
    f = lambda x: secular_value(x, es, bath)
    if f(hi) > 0:
        # lowest level dark or bath too weak to pull a state below the band
        return []
    width = 50.0 * bath.eta * bath.omega_c * es.n_sites / max(abs(eps0), 1.0)
    lo = hi - max(width, 1.0)
    for _ in range(80):
        if f(lo) > 0:
            break
        lo = hi - 2.0 * (hi - lo)
    else:
        problems.append((lo, hi, "no sign change below the spectrum"))
        return []
    try:
        root = _refine(f, lo, hi, opts)
    except (ValueError, RuntimeError) as exc:
        problems.append((lo, hi, str(exc)))
        return []
    return [root]


def ground_state_energy(es: EigenSystem, bath: BathSpec, search: SearchOptions = None) -> Optional[float]:
    """Energy of the root below the spectrum, or None if there is none."""
    if bath.eta == 0:
        return None
    roots = _ground_root(es, bath, search or SearchOptions(), [])
    return float(roots[0]) if roots else None


def _search_intervals(es, opts):
    gaps = opts.gaps if opts.gaps is not None else find_gaps(es, opts.min_gap_width)
    out = []
    for lo, hi in interior(gaps):
        if hi <= 0:
            out.append((lo, hi))
        elif lo >= 0:
            if opts.include_positive:
                out.append((lo, hi))
        else:
            out.append((lo, 0.0))
            if opts.include_positive:
                out.append((0.0, hi))
    return out


def find_bound_states(es: EigenSystem, bath: BathSpec, search: SearchOptions = None) -> BoundStateList:
    """All bound-state roots below the spectrum and inside selected gaps.

    Returns
    -------
    BoundStateList
        Ascending in energy. ``.warnings`` lists brackets whose sign change
        did not refine; each is also emitted as ``RootRefinementWarning``.
    """
    opts = search or SearchOptions()
    if bath.eta == 0:
        return BoundStateList()
    problems = []
    energies = []
    ground = _ground_root(es, bath, opts, problems)
    if ground:
        energies.extend(ground)
    for lo, hi in _search_intervals(es, opts):
        energies.extend(_roots_in(lo, hi, es, bath, opts, problems))

    states = []
    for E in sorted(energies):
        try:
            states.append(reconstruct_mode(E, es, bath, check=False))
        except (DomainError, NumericalError) as exc:
            problems.append((E, E, str(exc)))
    for a, b, msg in problems:
        warnings.warn(f"root in ({a:.12g}, {b:.12g}): {msg}", RootRefinementWarning, stacklevel=2)
    return BoundStateList(states, problems)


def weight_estimators(b: BoundState, initial_amps, es: EigenSystem, bath: BathSpec):
    """(residue, projection) estimates of the long-time amplitude coefficient.

    residue    = Sigma(E_b) * <a|G0 w> <w G0|a> / F'(E_b)
    projection = |<alpha_b|a>|^2 / (1 + d_b)
    """
    a = es.modes @ np.asarray(initial_amps, dtype=complex)
    eps, w = np.asarray(es.energies), np.asarray(es.weights)
    E = b.energy
    dF = secular_derivative(E, es, bath)
    if abs(dF) < 1e-10:
        raise DegenerateRootError(f"|F'(E_b)| = {abs(dF):.3g} is too small for a residue")
    g = w / (E - eps)
    residue = self_energy(E, bath) * np.vdot(a, g) * np.dot(g, a) / dF
    m = es.modes @ b.amplitudes
    projection = abs(np.vdot(m, a)) ** 2 / (1.0 + b.emission)
    return float(residue.real), float(projection)


def bound_state_weight(b: BoundState, initial_amps, es: EigenSystem, bath: BathSpec,
                       agree_tol: float = 1e-3) -> float:
    """Long-time amplitude coefficient of bound state ``b`` for ``initial_amps``.

    The resolvent residue is returned; the projection estimator must agree
    with it to ``agree_tol``.
    """
    init = np.asarray(initial_amps, dtype=complex)
    if not np.isclose(np.linalg.norm(init), 1.0, atol=1e-8):
        raise DomainError("initial amplitudes must be normalized")
    if b.kind is Kind.DARK:
        return float(abs(np.vdot(b.amplitudes, init)) ** 2)
    residue, projection = weight_estimators(b, init, es, bath)
    if abs(residue - projection) > agree_tol:
        raise NumericalError(f"weight estimators disagree: residue {residue:.6g}, "
                             f"projection {projection:.6g}")
    return residue
