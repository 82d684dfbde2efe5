"""Bosonic bath: spectral density, self-energy on both half-axes, memory kernel.

The bath enters only through ``J(w) = eta * w * (w/wc)**(s-1) * exp(-w/wc)``.
For ``E > 0`` the self-energy integral has a pole inside the continuum and
is returned as a Cauchy principal value.

Two evaluation paths exist. Adaptive quadrature (scipy QUADPACK) is the
reference. For integer ``s`` an exponential-integral closed form is used
as a fast path; it is checked against the quadrature in the test-suite.
"""
from dataclasses import dataclass
from math import factorial

import numpy as np
from scipy import integrate
from scipy.special import expi, gamma

from .errors import DomainError, QuadratureError

QUAD_TOL = 1e-9
# beyond |E| = CLOSED_FORM_RANGE * wc the closed form cancels catastrophically
# (and exp(-E/wc) overflows), so "auto" falls back to quadrature
CLOSED_FORM_RANGE = 50.0
MAX_CLOSED_FORM_S = 6


@dataclass(frozen=True)
class BathSpec:
    """Spectral-density parameters.

    Parameters
    ----------
    eta : float
        Dimensionless coupling strength; 0 decouples the chain.
    s : float
        Ohmicity exponent (``s < 1`` sub-Ohmic, ``s = 1`` Ohmic).
    omega_c : float
        Cutoff frequency in units of the hopping.
    """

    eta: float = 0.1
    s: float = 1.0
    omega_c: float = 10.0

    def __post_init__(self):
        for name in ("eta", "s", "omega_c"):
            v = getattr(self, name)
            if not np.isfinite(v):
                raise DomainError(f"{name} must be finite, got {v!r}")
            object.__setattr__(self, name, float(v))
        if self.eta < 0:
            raise DomainError(f"eta must be >= 0, got {self.eta}")
        if self.s <= 0:
            raise DomainError(f"s must be > 0, got {self.s}")
        if self.omega_c <= 0:
            raise DomainError(f"omega_c must be > 0, got {self.omega_c}")

    @property
    def integer_s(self):
        """``int(s)`` if s is a small positive integer, else None."""
        if self.s == round(self.s) and 1 <= self.s <= MAX_CLOSED_FORM_S:
            return int(self.s)
        return None

    def total_weight(self) -> float:
        """Integral of J over [0, inf): eta * wc**2 * Gamma(s+1)."""
        return self.eta * self.omega_c ** 2 * gamma(self.s + 1.0)


def spectral_density(omega, bath: BathSpec):
    """J(omega) for omega >= 0 (scalar or array)."""
    w = np.asarray(omega, dtype=float)
    if np.any(w < 0) or np.any(np.isnan(w)):
        raise DomainError("spectral density is defined for omega >= 0 only")
    wc, s = bath.omega_c, bath.s
    with np.errstate(divide="ignore", invalid="ignore"):
        x = w / wc
        out = bath.eta * wc * x ** s * np.exp(-x)
    out = np.where(w == 0, 0.0, out)
    return float(out) if out.ndim == 0 else out


def _check_energy(E):
    if not np.isfinite(E):
        raise DomainError(f"energy must be finite, got {E!r}")
    if E == 0:
        raise DomainError("self-energy is not evaluated at E = 0")


def _quad(f, a, b, **kw):
    val, err = integrate.quad(f, a, b, epsabs=1e-11, epsrel=1e-11, limit=400, **kw)
    return val, err


def _mapped(g, bath):
    """Integral of g(w) over [0, inf) through w = wc*u/(1-u)."""
    wc = bath.omega_c

    def h(u):
        if u >= 1.0:
            return 0.0
        w = wc * u / (1.0 - u)
        return g(w) * wc / (1.0 - u) ** 2

    return _quad(h, 0.0, 1.0)


def _J(bath):
    eta, wc, s = bath.eta, bath.omega_c, bath.s
    return lambda w: eta * wc * (w / wc) ** s * np.exp(-w / wc) if w > 0 else 0.0


def _raise_if_inaccurate(val, err, what):
    if not (np.isfinite(val) and err <= QUAD_TOL):
        raise QuadratureError(f"{what}: quadrature error estimate {err:.3g} exceeds {QUAD_TOL:g}",
                              estimate=val)


def _self_energy_quad(E, bath):
    J = _J(bath)
    if E < 0:
        val, err = _mapped(lambda w: J(w) / (E - w), bath)
        _raise_if_inaccurate(val, err, f"self_energy({E})")
        return val
    # principal value: QAWC on [0, b] returns PV int J/(w - E), then the tail
    b = 2.0 * E + 40.0 * bath.omega_c
    pv, err1 = _quad(J, 0.0, b, weight="cauchy", wvar=E)
    tail, err2 = _quad(lambda w: J(w) / (E - w), b, np.inf)
    val, err = -pv + tail, err1 + err2
    _raise_if_inaccurate(val, err, f"self_energy({E})")
    return val


def _self_energy_closed(E, bath):
    n = bath.integer_s
    wc = bath.omega_c
    x = E / wc
    poly = sum(factorial(k) * wc ** (k + 1) * E ** (n - 1 - k) for k in range(n))
    return bath.eta * wc ** (1 - n) * (-poly + E ** n * np.exp(-x) * expi(x))


def _self_energy_closed_derivative(E, bath):
    n = bath.integer_s
    wc = bath.omega_c
    x = E / wc
    dpoly = sum(factorial(k) * wc ** (k + 1) * (n - 1 - k) * E ** (n - 2 - k)
                for k in range(n - 1))
    tail = (n / E - 1.0 / wc) * E ** n * np.exp(-x) * expi(x) + E ** (n - 1)
    return bath.eta * wc ** (1 - n) * (-dpoly + tail)


def _use_closed(E, bath, method):
    if method == "quad":
        return False
    ok = bath.integer_s is not None and abs(E) <= CLOSED_FORM_RANGE * bath.omega_c
    if method == "closed":
        if bath.integer_s is None:
            raise DomainError("closed form requires a small positive integer s")
        return True
    if method != "auto":
        raise DomainError(f"unknown method {method!r}")
    return ok


def _vectorized(E, bath, method, closed, scalar):
    """Array evaluation: one vectorized closed-form call where allowed."""
    if method not in ("auto", "quad", "closed"):
        raise DomainError(f"unknown method {method!r}")
    E = np.asarray(E, dtype=float)
    if not np.all(np.isfinite(E)) or np.any(E == 0):
        raise DomainError("energies must be finite and nonzero")
    out = np.zeros(E.shape)
    if bath.eta == 0:
        return out
    if method == "quad" or bath.integer_s is None:
        if method == "closed":
            raise DomainError("closed form requires a small positive integer s")
        fast = np.zeros(E.shape, dtype=bool)
    elif method == "closed":
        fast = np.ones(E.shape, dtype=bool)
    else:
        fast = np.abs(E) <= CLOSED_FORM_RANGE * bath.omega_c
    if fast.any():
        out[fast] = closed(E[fast], bath)
    for idx in zip(*np.nonzero(~fast)):
        out[idx] = scalar(float(E[idx]), bath, "quad")
    return out


def self_energy(E, bath: BathSpec, method: str = "auto"):
    """Sigma(E) = int_0^inf J(w)/(E - w) dw, principal value for E > 0.

    Parameters
    ----------
    E : float or array_like
        Energy, nonzero.
    bath : BathSpec
    method : {"auto", "quad", "closed"}
        ``auto`` uses the exponential-integral form for integer ``s`` and
        moderate ``|E|``, quadrature otherwise.

    Raises
    ------
    DomainError
        For ``E == 0``.
    QuadratureError
        When QUADPACK's error estimate exceeds 1e-9.
    """
    if np.ndim(E):
        return _vectorized(E, bath, method, _self_energy_closed, self_energy)
    E = float(E)
    _check_energy(E)
    if bath.eta == 0:
        return 0.0
    if _use_closed(E, bath, method):
        return float(_self_energy_closed(E, bath))
    return _self_energy_quad(E, bath)


def self_energy_derivative(E, bath: BathSpec, method: str = "auto", h: float = None):
    """dSigma/dE.

    For ``E < 0`` this is ``-int J/(E-w)^2``. For ``E > 0`` it is the
    derivative of the principal-value function, taken from the closed
    form (integer s) or by a central difference of the quadrature.
    """
    if np.ndim(E):
        return _vectorized(E, bath, method, _self_energy_closed_derivative,
                           lambda e, b, m: self_energy_derivative(e, b, m, h))
    E = float(E)
    _check_energy(E)
    if bath.eta == 0:
        return 0.0
    if _use_closed(E, bath, method):
        return float(_self_energy_closed_derivative(E, bath))
    if E < 0:
        J = _J(bath)
        val, err = _mapped(lambda w: J(w) / (E - w) ** 2, bath)
        _raise_if_inaccurate(val, err, f"self_energy_derivative({E})")
        return -val
    # Sigma ~ E log E near 0+, so the step shrinks with E there
    step = h if h is not None else 1e-4 * min(1.0, E)
    return (_self_energy_quad(E + step, bath) - _self_energy_quad(E - step, bath)) / (2 * step)


def self_energy_slope(E, bath: BathSpec, method: str = "auto"):
    """int_0^inf J(w)/(E - w)^2 dw for E < 0, i.e. -dSigma/dE (> 0)."""
    if np.any(np.asarray(E) >= 0):
        raise DomainError("self_energy_slope requires E < 0")
    return -self_energy_derivative(E, bath, method)


def memory_kernel(t, bath: BathSpec):
    """f(t) = eta * wc**(1-s) * Gamma(s+1) / (i t + 1/wc)**(s+1).

    This is the Fourier transform int_0^inf J(w) exp(-i w t) dw. The
    complex power uses the principal branch.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("memory kernel is defined for t >= 0")
    s, wc = bath.s, bath.omega_c
    pref = bath.eta * wc ** (1.0 - s) * gamma(s + 1.0)
    out = pref * (1j * t + 1.0 / wc) ** (-(s + 1.0))
    return complex(out) if out.ndim == 0 else out
