"""Hot loops, each in a numba and a pure-numpy flavour.

The public entry points dispatch on ``_accel.USE_NUMBA``; both flavours are
importable directly so tests and the benchmark can compare them.
"""
import numpy as np

from . import _accel


# --------------------------------------------------------------------------
# collective resolvent sum_i w_i^2 / (eps_i - E) on an energy grid

def resolvent_sum_numpy(energies, eps, w2):
    E = np.asarray(energies, dtype=float)
    return (w2[None, :] / (eps[None, :] - E[:, None])).sum(axis=1)


@_accel.njit(cache=True)
def resolvent_sum_numba(energies, eps, w2):
    out = np.empty(energies.shape[0])
    for k in range(energies.shape[0]):
        acc = 0.0
        E = energies[k]
        for i in range(eps.shape[0]):
            acc += w2[i] / (eps[i] - E)
        out[k] = acc
    return out


def resolvent_sum(energies, eps, w2):
    energies = np.ascontiguousarray(energies, dtype=float)
    if _accel.USE_NUMBA:
        return resolvent_sum_numba(energies, eps, w2)
    return resolvent_sum_numpy(energies, eps, w2)


# --------------------------------------------------------------------------
# product-integration time stepper
#
# Eigenbasis state a(t); collective amplitude S = w . a; memory term
# K(t) = int_0^t f(t - tau) S(tau) dtau. Step k (t_k -> t_{k+1}) uses the
# interpolation scheme s = min(k, n_schemes - 1), whose nodes are the
# offsets -s..1 around k, stored in slots 0..3 for offsets -2..1 (the first
# panel also uses the known initial slopes, folded into acc0 and v0):
#   v       = u * a_k - w * sum_{r<1} q[s, r] K_{k+r}     (explicit local part)
#   K_{k+1} = acc_k + cimp[k] * S_{k+1}                    (memory, implicit node)
#   S_{k+1} = w . (v - w * q[s, 1] K_{k+1})                (scalar implicit solve)
# with acc_k = acc0[k] + sum_{m<=H} head[k, m] S_m + sum_{H<m<=k} W[k-m] S_m.
# dynamics.py builds the weights.

SLOT = 2  # slot of offset 0


@_accel.njit(cache=True)
def _march_numba(a0, u, q, Bs, w, head, W, cimp, acc0, v0, nsteps, stride):
    n = a0.shape[0]
    ns = q.shape[0]
    H = head.shape[1] - 1
    S = np.zeros(nsteps + 1, np.complex128)
    K = np.zeros(nsteps + 1, np.complex128)
    out = np.zeros((nsteps // stride + 1, n), np.complex128)
    a = a0.copy()
    S[0] = np.sum(w * a)
    out[0] = a
    v = np.empty(n, np.complex128)
    for k in range(nsteps):
        s = min(k, ns - 1)
        acc = acc0[k]
        for m in range(min(H, k) + 1):
            acc += head[k, m] * S[m]
        for m in range(H + 1, k + 1):
            acc += W[k - m] * S[m]
        for i in range(n):
            x = u[i] * a[i]
            for r in range(-s, 1):
                x -= w[i] * q[s, SLOT + r, i] * K[k + r]
            if k == 0:
                x -= v0[i]
            v[i] = x
        wv = 0.0j
        for i in range(n):
            wv += w[i] * v[i]
        c = cimp[k]
        s_new = (wv - Bs[s] * acc) / (1.0 + Bs[s] * c)
        k_new = acc + c * s_new
        for i in range(n):
            a[i] = v[i] - w[i] * q[s, SLOT + 1, i] * k_new
        S[k + 1] = s_new
        K[k + 1] = k_new
        if (k + 1) % stride == 0:
            out[(k + 1) // stride] = a
    return out, S


def _march_numpy(a0, u, q, Bs, w, head, W, cimp, acc0, v0, nsteps, stride):
    n = a0.shape[0]
    ns = q.shape[0]
    H = head.shape[1] - 1
    S = np.zeros(nsteps + 1, np.complex128)
    K = np.zeros(nsteps + 1, np.complex128)
    out = np.zeros((nsteps // stride + 1, n), np.complex128)
    a = a0.copy()
    S[0] = w @ a
    out[0] = a
    for k in range(nsteps):
        s = min(k, ns - 1)
        h = min(H, k) + 1
        acc = acc0[k] + head[k, :h] @ S[:h]
        if k > H:
            # sum_{m=H+1..k} W[k-m] S[m]
            acc += np.dot(W[k - H - 1::-1], S[H + 1:k + 1])
        v = u * a - w * (K[k - s:k + 1] @ q[s, SLOT - s:SLOT + 1])
        if k == 0:
            v = v - v0
        c = cimp[k]
        s_new = (w @ v - Bs[s] * acc) / (1.0 + Bs[s] * c)
        k_new = acc + c * s_new
        a = v - w * q[s, SLOT + 1] * k_new
        S[k + 1] = s_new
        K[k + 1] = k_new
        if (k + 1) % stride == 0:
            out[(k + 1) // stride] = a
    return out, S


def march(a0, u, q, w, head, W, cimp, acc0, v0, nsteps, stride, backend=None):
    """Run the stepper; returns (eigenbasis amplitudes every ``stride`` steps, S history).

    Parameters
    ----------
    q : ndarray, shape (n_schemes, 4, N)
        Per-mode local weights by scheme and node slot.
    head : ndarray, shape (nsteps, H + 1)
        Memory coefficients of the first ``H + 1`` samples of S at each step.
    W : ndarray, shape (nsteps,)
        Steady-state memory coefficients by lag.
    cimp : ndarray, shape (nsteps,)
        Memory coefficient of the implicit node.
    acc0 : ndarray, shape (nsteps,)
        Known memory contribution of the initial slope of S.
    v0 : ndarray, shape (N,)
        Known local contribution of the initial slope of K (first step only).
    """
    if backend is None:
        backend = _accel.backend_name()
    w = np.ascontiguousarray(w, np.float64)
    q = np.ascontiguousarray(q, np.complex128)
    Bs = np.array([np.sum(w * w * q[s, SLOT + 1]) for s in range(q.shape[0])])
    args = (np.ascontiguousarray(a0, np.complex128), np.ascontiguousarray(u, np.complex128), q, Bs, w,
            np.ascontiguousarray(head, np.complex128), np.ascontiguousarray(W, np.complex128),
            np.ascontiguousarray(cimp, np.complex128), np.ascontiguousarray(acc0, np.complex128),
            np.ascontiguousarray(v0, np.complex128), int(nsteps), int(stride))
    if backend == "numba":
        if not _accel.HAVE_NUMBA:
            raise RuntimeError("numba backend requested but numba is not installed")
        return _march_numba(*args)
    if backend != "numpy":
        raise ValueError(f"unknown backend {backend!r}")
    return _march_numpy(*args)
