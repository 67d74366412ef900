"""Hot inner loops: R-function and Q-function sums over phase-space points.

Every kernel exists twice: a numba-compiled scalar loop (``*_nb``) and a
vectorised numpy version (``*_np``).  The public names without suffix point
at whichever backend :mod:`nonclass._jit` selected.  Both take flat arrays of
real/imaginary parts of the evaluation points and return flat arrays.
"""

import math

import numpy as np

from ._jit import USE_NUMBA, HAVE_NUMBA, njit, prange

_LOG_BIG = 345.38776394910684  # log(1e150)


def half_log_factorials(n):
    """0.5*log(k!) for k = 0..n-1."""
    out = np.zeros(n)
    for k in range(1, n):
        out[k] = out[k - 1] + 0.5 * math.log(k)
    return out


def active_diagonals(rho, atol=0.0):
    """Mask of superdiagonals k of ``rho`` holding any nonzero entry."""
    n = rho.shape[0]
    mask = np.zeros(n, dtype=np.bool_)
    for k in range(n):
        mask[k] = np.any(np.abs(np.diagonal(rho, k)) > atol)
    return mask


# --------------------------------------------------------------------------
# R-function in the number basis
#
# R(z; tau) = exp(-|z|^2/tau)/(pi tau) * sum_{n, k} w_k Re[rho(n, n+k) e^{ik theta}]
#             (-1)^n sqrt(n!/(n+k)!) s^n (|z|/tau)^k L_n^k(y)
# with s = (1-tau)/tau, y = |z|^2/(tau(1-tau)), w_0 = 1, w_{k>0} = 2.
# Terms are accumulated as (running max log-magnitude, scaled signed sum).
# --------------------------------------------------------------------------


@njit(parallel=True)
def r_fock_nb(rho, zr, zi, tau, half_lfact, active):
    dim = rho.shape[0]
    npts = zr.shape[0]
    out = np.empty(npts)
    log_s = math.log((1.0 - tau) / tau)
    log_pre = -math.log(math.pi * tau)
    for p in prange(npts):
        u2 = zr[p] * zr[p] + zi[p] * zi[p]
        u = math.sqrt(u2)
        theta = math.atan2(zi[p], zr[p])
        y = u2 / (tau * (1.0 - tau))
        base = log_pre - u2 / tau
        acc_m = base
        acc_s = 0.0
        for k in range(dim):
            if not active[k]:
                continue
            if k > 0 and u == 0.0:
                break
            log_zk = k * math.log(u / tau) if k > 0 else 0.0
            ck = math.cos(k * theta)
            sk = math.sin(k * theta)
            weight = 1.0 if k == 0 else 2.0
            lprev = 0.0
            lcur = 1.0
            lscale = 0.0
            for n in range(dim - k):
                if n == 1:
                    lprev = lcur
                    lcur = 1.0 + k - y
                elif n > 1:
                    lnext = ((2 * n - 1 + k - y) * lcur - (n - 1 + k) * lprev) / n
                    lprev = lcur
                    lcur = lnext
                    if abs(lcur) > 1e150:
                        lcur *= 1e-150
                        lprev *= 1e-150
                        lscale += _LOG_BIG
                rv = rho[n, n + k]
                c = weight * (rv.real * ck - rv.imag * sk)
                if c == 0.0 or lcur == 0.0:
                    continue
                if n % 2 == 1:
                    c = -c
                if lcur < 0.0:
                    c = -c
                lt = (base + log_zk + n * log_s + half_lfact[n] - half_lfact[n + k]
                      + math.log(abs(lcur)) + lscale)
                if lt > acc_m:
                    acc_s = acc_s * math.exp(acc_m - lt) + c
                    acc_m = lt
                else:
                    acc_s += c * math.exp(lt - acc_m)
        out[p] = acc_s * math.exp(acc_m) if acc_s != 0.0 else 0.0
    return out


def r_fock_np(rho, zr, zi, tau, half_lfact, active):
    dim = rho.shape[0]
    zr = np.asarray(zr, dtype=float)
    zi = np.asarray(zi, dtype=float)
    u2 = zr * zr + zi * zi
    u = np.sqrt(u2)
    theta = np.arctan2(zi, zr)
    y = u2 / (tau * (1.0 - tau))
    log_s = math.log((1.0 - tau) / tau)
    base = -math.log(math.pi * tau) - u2 / tau
    acc_m = base.copy()
    acc_s = np.zeros_like(base)
    nonzero = u > 0.0
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        log_u = np.where(nonzero, np.log(np.where(nonzero, u, 1.0) / tau), -np.inf)
        for k in range(dim):
            if not active[k]:
                continue
            if k > 0 and not nonzero.any():
                break
            log_zk = k * log_u if k > 0 else 0.0
            ck = np.cos(k * theta)
            sk = np.sin(k * theta)
            weight = 1.0 if k == 0 else 2.0
            lprev = np.zeros_like(y)
            lcur = np.ones_like(y)
            lscale = np.zeros_like(y)
            for n in range(dim - k):
                if n == 1:
                    lprev = lcur
                    lcur = 1.0 + k - y
                elif n > 1:
                    lnext = ((2 * n - 1 + k - y) * lcur - (n - 1 + k) * lprev) / n
                    lprev = lcur
                    lcur = lnext
                    big = np.abs(lcur) > 1e150
                    if big.any():
                        lcur = np.where(big, lcur * 1e-150, lcur)
                        lprev = np.where(big, lprev * 1e-150, lprev)
                        lscale = lscale + np.where(big, _LOG_BIG, 0.0)
                rv = rho[n, n + k]
                if rv == 0:
                    continue
                c = weight * (rv.real * ck - rv.imag * sk) * np.sign(lcur)
                if n % 2 == 1:
                    c = -c
                lt = (base + log_zk + n * log_s + half_lfact[n] - half_lfact[n + k]
                      + np.log(np.abs(lcur)) + lscale)
                keep = (c != 0.0) & np.isfinite(lt)
                new_m = np.where(keep, np.maximum(acc_m, lt), acc_m)
                acc_s = acc_s * np.exp(acc_m - new_m) + np.where(keep, c * np.exp(lt - new_m), 0.0)
                acc_m = new_m
        out = np.where(acc_s != 0.0, acc_s * np.exp(acc_m), 0.0)
    return out


# --------------------------------------------------------------------------
# R-function of a finite coherent superposition (closed Gaussian double sum)
# --------------------------------------------------------------------------


@njit(parallel=True)
def r_coherent_nb(coeffs, alphas, zr, zi, tau):
    nterm = coeffs.shape[0]
    npts = zr.shape[0]
    out = np.empty(npts)
    resid = np.empty(npts)
    for p in prange(npts):
        z = complex(zr[p], zi[p])
        emax = -np.inf
        for i in range(nterm):
            for j in range(nterm):
                e = (-0.5 * (abs(alphas[i]) ** 2 + abs(alphas[j]) ** 2
                             - 2.0 * alphas[i] * alphas[j].conjugate())
                     - (z - alphas[i]) * (z - alphas[j]).conjugate() / tau)
                if e.real > emax:
                    emax = e.real
        sr = 0.0
        si = 0.0
        sa = 0.0
        for i in range(nterm):
            for j in range(nterm):
                e = (-0.5 * (abs(alphas[i]) ** 2 + abs(alphas[j]) ** 2
                             - 2.0 * alphas[i] * alphas[j].conjugate())
                     - (z - alphas[i]) * (z - alphas[j]).conjugate() / tau)
                t = coeffs[i] * coeffs[j].conjugate() * np.exp(e - emax)
                sr += t.real
                si += t.imag
                sa += abs(t)
        scale = math.exp(emax) / (math.pi * tau) if emax < 709.0 else np.inf
        out[p] = sr * scale if sr != 0.0 else 0.0
        resid[p] = abs(si) / sa if sa > 0.0 else 0.0
    return out, resid


def r_coherent_np(coeffs, alphas, zr, zi, tau):
    z = (np.asarray(zr, dtype=float) + 1j * np.asarray(zi, dtype=float))[:, None, None]
    ai = alphas[None, :, None]
    aj = alphas[None, None, :]
    e = (-0.5 * (np.abs(ai) ** 2 + np.abs(aj) ** 2 - 2.0 * ai * np.conj(aj))
         - (z - ai) * np.conj(z - aj) / tau)
    emax = e.real.max(axis=(1, 2))
    t = (coeffs[:, None] * np.conj(coeffs)[None, :])[None] * np.exp(e - emax[:, None, None])
    s = t.sum(axis=(1, 2))
    sa = np.abs(t).sum(axis=(1, 2))
    with np.errstate(over="ignore", invalid="ignore"):
        scale = np.exp(emax) / (math.pi * tau)
        out = np.where(s.real != 0.0, s.real * scale, 0.0)
    resid = np.where(sa > 0.0, np.abs(s.imag) / np.where(sa > 0.0, sa, 1.0), 0.0)
    return out, resid


# --------------------------------------------------------------------------
# Husimi Q-function from Fock data: <beta|m> = exp(-|b|^2/2) b^m / sqrt(m!)
# --------------------------------------------------------------------------


@njit
def _coherent_overlaps_nb(b, dim, half_lfact, out):
    # out[m] = <m|b>
    if b == 0:
        out[:] = 0.0
        out[0] = 1.0
        return
    lb = np.log(b)
    nb2 = -0.5 * abs(b) ** 2
    for m in range(dim):
        out[m] = np.exp(nb2 + m * lb - half_lfact[m])


@njit(parallel=True)
def q_density_nb(rho, br, bi, half_lfact):
    dim = rho.shape[0]
    npts = br.shape[0]
    out = np.empty(npts)
    for p in prange(npts):
        u = np.empty(dim, dtype=np.complex128)
        _coherent_overlaps_nb(complex(br[p], bi[p]), dim, half_lfact, u)
        acc = 0.0
        for n in range(dim):
            row = 0j
            for m in range(dim):
                row += rho[n, m] * u[m]
            acc += (u[n].conjugate() * row).real
        out[p] = acc / math.pi
    return out


@njit(parallel=True)
def q_pure_nb(psi, br, bi, half_lfact):
    dim = psi.shape[0]
    npts = br.shape[0]
    out = np.empty(npts)
    for p in prange(npts):
        u = np.empty(dim, dtype=np.complex128)
        _coherent_overlaps_nb(complex(br[p], bi[p]), dim, half_lfact, u)
        amp = 0j
        for m in range(dim):
            amp += u[m].conjugate() * psi[m]
        out[p] = abs(amp) ** 2 / math.pi
    return out


def _coherent_overlaps_np(br, bi, dim, half_lfact):
    b = np.asarray(br, dtype=float) + 1j * np.asarray(bi, dtype=float)
    m = np.arange(dim)
    zero = b == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        lb = np.log(np.where(zero, 1.0, b))
        u = np.exp(-0.5 * np.abs(b)[:, None] ** 2 + m[None, :] * lb[:, None] - half_lfact[None, :])
    u[zero] = 0.0
    u[zero, 0] = 1.0
    return u


def q_density_np(rho, br, bi, half_lfact):
    u = _coherent_overlaps_np(br, bi, rho.shape[0], half_lfact)
    return np.einsum("pn,nm,pm->p", np.conj(u), rho, u).real / math.pi


def q_pure_np(psi, br, bi, half_lfact):
    u = _coherent_overlaps_np(br, bi, psi.shape[0], half_lfact)
    return np.abs(np.conj(u) @ psi) ** 2 / math.pi


if USE_NUMBA:
    BACKEND = "numba"
    r_fock, r_coherent, q_density, q_pure = r_fock_nb, r_coherent_nb, q_density_nb, q_pure_nb
else:
    BACKEND = "numpy"
    r_fock, r_coherent, q_density, q_pure = r_fock_np, r_coherent_np, q_density_np, q_pure_np

__all__ = [
    "BACKEND", "HAVE_NUMBA", "half_log_factorials", "active_diagonals",
    "r_fock", "r_coherent", "q_density", "q_pure",
    "r_fock_nb", "r_fock_np", "r_coherent_nb", "r_coherent_np",
    "q_density_nb", "q_density_np", "q_pure_nb", "q_pure_np",
]
