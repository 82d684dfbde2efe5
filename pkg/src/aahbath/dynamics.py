"""Single-excitation dynamics of the chain with the bath's memory term.

The chain amplitudes obey

    d alpha_n / dt = -i (H_S alpha)_n - int_0^t f(t - tau) S(tau) dtau,
    S(t) = sum_m alpha_m(t),

with the memory kernel ``f`` from :func:`aahbath.bath.memory_kernel`. The
memory term is the same for every site, so only the scalar history of
``S`` is stored and the cost is one scalar convolution per step.

The integrator works in the chain eigenbasis, where the local part is
propagated exactly by ``exp(-i eps dt)``. The memory convolution uses
product integration: on each panel the history is interpolated by a
polynomial through the neighbouring grid points (cubic by default,
quadratic on request, lower degrees for the first steps) and integrated
against the exact kernel (16-point Gauss-Legendre per panel, since ``f`` is
smooth on the panel scale). Interpolation happens in a frame rotating at a carrier
frequency, by default the ground-state energy, because the ground special
state makes ``S`` oscillate at ``|E_0| ~ 23`` and would otherwise dominate
the interpolation error. With interpolation of degree ``p - 1`` the scheme
is of order ``p`` in ``dt``.
"""
from dataclasses import dataclass, field
from math import ceil
from typing import Optional, Tuple

import numpy as np
from scipy.ndimage import gaussian_filter1d

from . import _kernels
from .bath import BathSpec, memory_kernel
from .errors import DomainError, InstabilityError, NonOscillatoryError
from .lattice import EigenSystem, LatticeSpec, build_lattice, eigensystem
from .spectral import ground_state_energy

MAX_DT_OMEGA_C = 0.2
NORM_GROWTH_LIMIT = 1e-4

_GX, _GW = np.polynomial.legendre.leggauss(16)
_GX = 0.5 * (_GX + 1.0)
_GW = 0.5 * _GW
SLOT = _kernels.SLOT
ORDERS = (3, 4)


def _lagrange(s):
    """Lagrange basis on the panel [0, 1] through the nodes -s..1, at the Gauss points.

    Returns a (4, n_gauss) array indexed by slot (offset + SLOT); unused
    slots are zero.
    """
    nodes = np.arange(-s, 2)
    out = np.zeros((4, len(_GX)))
    for r in nodes:
        L = np.ones_like(_GX)
        for q in nodes:
            if q != r:
                L *= (_GX - q) / (r - q)
        out[SLOT + r] = L
    return out


# first panel: quadratic through the value and slope at 0 and the value at 1
_HERMITE = np.zeros((4, len(_GX)))
_HERMITE[SLOT] = 1 - _GX ** 2
_HERMITE[SLOT + 1] = _GX ** 2
_HERMITE_SLOPE = _GX - _GX ** 2


def _schemes(order):
    # scheme s >= 1 has s + 2 nodes; the last one reaches the requested order
    return [_HERMITE] + [_lagrange(s) for s in range(1, order - 1)]


def _rotation(dt, carrier):
    r = np.arange(4) - SLOT
    return np.exp(-1j * carrier * dt * (_GX[None, :] - r[:, None]))


@dataclass(frozen=True)
class TimeGrid:
    t_max: float = 200.0
    dt: float = 0.005

    def __post_init__(self):
        if not (self.dt > 0 and np.isfinite(self.dt)):
            raise DomainError(f"dt must be positive, got {self.dt!r}")
        if not (self.t_max > 0 and np.isfinite(self.t_max)):
            raise DomainError(f"t_max must be positive, got {self.t_max!r}")

    @property
    def n_steps(self) -> int:
        # guard against 200/0.005 = 40000.000000000004
        return int(ceil(self.t_max / self.dt - 1e-9))


@dataclass
class Trajectory:
    """Sampled evolution.

    ``amps[k]`` holds the site amplitudes at ``times[k]``; samples are taken
    every ``stride`` steps. ``collective_full`` keeps ``S`` at every step.
    """

    grid: TimeGrid
    stride: int
    times: np.ndarray
    amps: np.ndarray = field(repr=False)
    collective_full: np.ndarray = field(repr=False)
    carrier: float = 0.0
    backend: str = ""

    @property
    def collective(self) -> np.ndarray:
        return self.amps.sum(axis=1)

    @property
    def norms(self) -> np.ndarray:
        return np.sum(np.abs(self.amps) ** 2, axis=1)

    @property
    def n_sites(self) -> int:
        return self.amps.shape[1]


def _memory_weights(bath, dt, n, carrier, order):
    """History coefficients (head, W, cimp, slope) for ``n`` steps.

    ``c[s, slot, p]`` integrates the kernel at lag ``p`` against the
    interpolant of scheme ``s``; the results are regrouped by sample of S.
    """
    p = np.arange(n)[:, None]
    fx = memory_kernel((p + 1 - _GX) * dt, bath) * dt * _GW
    rot = _rotation(dt, carrier)
    c = np.array([np.einsum("pg,rg->rp", fx, rot * L) for L in _schemes(order)])  # (n_schemes, 4, n)
    smax = len(c) - 1
    H = smax + 1

    head = np.zeros((n, H + 1), complex)
    for m in range(H + 1):
        for j in range(min(m + smax + 1, n)):
            sj = min(j, smax)
            r = m - j
            if -sj <= r <= 1:
                k = np.arange(max(j, m), n)
                head[k, m] += c[sj, SLOT + r, k - j]

    W = np.zeros(n, complex)
    for r in range(-smax, 2):
        # W[d] += c[smax, r, d + r] wherever 0 <= d + r < n
        d0, d1 = max(0, -r), min(n, n - r)
        W[d0:d1] += c[smax, SLOT + r, d0 + r:d1 + r]
    cimp = c[np.minimum(np.arange(n), smax), SLOT + 1, 0]
    # coefficient of dt * (rotating-frame slope of S at t = 0), by step
    slope = fx @ (rot[SLOT] * _HERMITE_SLOPE) * dt
    return head, W, cimp, slope


def _local_weights(eps, dt, carrier, order):
    """Per-mode weights q[s, slot, i] of the exponential local step, and the
    weight of ``dt`` times the initial rotating-frame slope of K."""
    ph = np.exp(-1j * eps[:, None] * dt * (1 - _GX)) * dt * _GW
    rot = _rotation(dt, carrier)
    q = np.array([(ph[None, :, :] * (rot * L)[:, None, :]).sum(axis=2) for L in _schemes(order)])
    return q, ph @ (rot[SLOT] * _HERMITE_SLOPE) * dt


def single_site_state(n_sites: int, site: int) -> np.ndarray:
    """Excitation on ``site`` (1-based)."""
    if not 1 <= site <= n_sites:
        raise DomainError(f"site {site} outside 1..{n_sites}")
    psi = np.zeros(n_sites, complex)
    psi[site - 1] = 1.0
    return psi


def evolve(initial, spec: LatticeSpec, bath: BathSpec, grid: TimeGrid, stride: int = 10,
           carrier: Optional[float] = None, es: Optional[EigenSystem] = None,
           backend: Optional[str] = None, order: int = 4) -> Trajectory:
    """Integrate the chain amplitudes from ``initial`` over ``grid``.

    Parameters
    ----------
    initial : array_like, shape (N,)
        Site amplitudes at t = 0. The evolution is linear, so any nonzero
        vector is accepted; physical runs use a normalized one.
    stride : int
        Store every ``stride``-th step.
    carrier : float, optional
        Frequency of the rotating interpolation frame. Defaults to the
        ground-state energy (0 when there is none).
    es : EigenSystem, optional
        Precomputed eigensystem of ``build_lattice(spec)``.
    backend : {"numba", "numpy"}, optional
        Kernel flavour; the default follows ``AAHBATH_DISABLE_NUMBA``.
    order : {3, 4}
        Convergence order in ``dt``: quadratic (3) or cubic (4) interpolation
        of the histories.

    Raises
    ------
    DomainError
        For ``dt * omega_c > 0.2`` or a zero/mis-sized initial state.
    InstabilityError
        If the norm grows by more than 1e-4 relative to the start.
    """
    psi = np.asarray(initial, dtype=complex)
    if psi.shape != (spec.n_sites,):
        raise DomainError(f"initial state must have shape ({spec.n_sites},)")
    norm0 = float(np.vdot(psi, psi).real)
    if not norm0 > 0:
        raise DomainError("initial state is zero")
    if order not in ORDERS:
        raise DomainError(f"order must be one of {ORDERS}")
    if int(stride) != stride or stride < 1:
        raise DomainError("stride must be a positive integer")
    if bath.eta > 0 and grid.dt * bath.omega_c > MAX_DT_OMEGA_C:
        raise DomainError(f"dt={grid.dt} does not resolve the kernel: need dt*omega_c <= {MAX_DT_OMEGA_C}")

    if es is None:
        es = eigensystem(build_lattice(spec))
    if carrier is None:
        e0 = ground_state_energy(es, bath)
        carrier = e0 if e0 is not None else 0.0

    eps = np.asarray(es.energies)
    modes = np.asarray(es.modes)
    w = np.asarray(es.weights, dtype=float)
    if bath.eta == 0:
        w = np.zeros_like(w)
    n = grid.n_steps
    dt = grid.dt

    head, W, cimp, slope_w = _memory_weights(bath, dt, n, carrier, order)
    q, qd = _local_weights(eps, dt, carrier, order)
    a0 = modes @ psi
    # initial slopes in the rotating frame: K(0) = 0, so a'(0) = -i eps a0
    # and K'(0) = f(0) S(0)
    S0 = w @ a0
    dS0 = -1j * (w * eps) @ a0 + 1j * carrier * S0
    dK0 = memory_kernel(0.0, bath) * S0
    acc0 = slope_w * dS0
    v0 = w * qd * dK0
    out, S = _kernels.march(a0, np.exp(-1j * eps * dt), q, w, head, W, cimp, acc0, v0, n, int(stride),
                            backend)

    amps = out @ modes
    norms = np.sum(np.abs(amps) ** 2, axis=1)
    if not np.all(np.isfinite(norms)) or np.max(norms) > (1 + NORM_GROWTH_LIMIT) * norm0:
        raise InstabilityError(f"norm grew to {np.nanmax(norms) / norm0:.6g} of its initial value; "
                               "reduce dt")
    times = np.arange(out.shape[0]) * dt * stride
    return Trajectory(grid, int(stride), times, amps, S, float(carrier),
                      backend or _kernels._accel.backend_name())


def survival_probability(tr: Trajectory, site: int) -> np.ndarray:
    """|alpha_site(t)|^2 for a 1-based site."""
    if not 1 <= site <= tr.n_sites:
        raise DomainError(f"site {site} outside 1..{tr.n_sites}")
    return np.abs(tr.amps[:, site - 1]) ** 2


def trajectory_ipr(tr: Trajectory, min_norm: float = 1e-12) -> np.ndarray:
    """IPR of the renormalized amplitudes; NaN where the norm is below ``min_norm``."""
    p = np.abs(tr.amps) ** 2
    norms = p.sum(axis=1)
    out = np.full(len(norms), np.nan)
    ok = norms >= min_norm
    out[ok] = np.sum(p[ok] ** 2, axis=1) / norms[ok] ** 2
    return out


def fidelity_series(tr: Trajectory, reference) -> np.ndarray:
    """|<reference|alpha(t)>|^2 without renormalizing alpha."""
    ref = np.asarray(reference, dtype=complex)
    if ref.shape != (tr.n_sites,):
        raise DomainError("reference has the wrong length")
    if not np.isclose(np.linalg.norm(ref), 1.0, atol=1e-8):
        raise DomainError("reference must be normalized")
    return np.abs(tr.amps @ ref.conj()) ** 2


def estimate_period(series, times, t_window: Tuple[float, float], smooth: float = 2.0) -> float:
    """Mean spacing of successive maxima inside ``t_window``.

    Parameters
    ----------
    series, times : array_like
        Uniformly sampled signal.
    smooth : float
        Width (in time units) of a Gaussian pre-filter; 0 disables it. The
        filter suppresses fast components (here the ground-state beat with
        period ~0.3) that would otherwise produce spurious maxima.

    Raises
    ------
    NonOscillatoryError
        With fewer than three extrema (or two maxima) in the window.
    """
    x = np.asarray(series, dtype=float)
    t = np.asarray(times, dtype=float)
    if x.shape != t.shape or x.ndim != 1 or len(x) < 3:
        raise DomainError("series and times must be equal-length 1-D arrays")
    t0, t1 = t_window
    step = t[1] - t[0]
    if t0 < t[0] - step or t1 > t[-1] + step or t1 <= t0:
        raise DomainError("t_window must lie inside the sampled range")
    if smooth > 0:
        x = gaussian_filter1d(x, smooth / step, mode="nearest")
    m = (t >= t0) & (t <= t1)
    x, t = x[m], t[m]

    inner = slice(1, len(x) - 1)
    is_max = (x[inner] > x[:-2]) & (x[inner] >= x[2:])
    is_min = (x[inner] < x[:-2]) & (x[inner] <= x[2:])
    peaks = np.nonzero(is_max)[0] + 1
    if is_max.sum() + is_min.sum() < 3 or len(peaks) < 2:
        raise NonOscillatoryError("fewer than three extrema in the window")

    y0, y1, y2 = x[peaks - 1], x[peaks], x[peaks + 1]
    den = y0 - 2 * y1 + y2
    with np.errstate(divide="ignore", invalid="ignore"):
        off = np.where(den != 0, 0.5 * (y0 - y2) / den, 0.0)
    refined = t[peaks] + off * step
    return float(np.mean(np.diff(refined)))
