"""Independent reference computations used by the tests.

Nothing here goes through the package's Laguerre kernels: states are built
by matrix exponentials in a large truncated space and phase-space functions
by displaced parity (Wigner) or coherent projections (Q).
"""

import math

import numpy as np
from scipy.linalg import expm
from scipy.optimize import minimize_scalar
from scipy.special import eval_laguerre, gammaln

BIG = 160


def lowering(dim):
    return np.diag(np.sqrt(np.arange(1, dim)), k=1).astype(complex)


def displacement(alpha, dim):
    a = lowering(dim)
    return expm(alpha * a.conj().T - np.conj(alpha) * a)


def squeeze(zeta, dim):
    # S(zeta) = exp(zeta a^dag^2 / 2 - zeta^* a^2 / 2)
    a = lowering(dim)
    ad = a.conj().T
    return expm(0.5 * zeta * ad @ ad - 0.5 * np.conj(zeta) * a @ a)


def coherent_ket(alpha, dim):
    n = np.arange(dim)
    if alpha == 0:
        out = np.zeros(dim, dtype=complex)
        out[0] = 1.0
        return out
    return np.exp(-0.5 * abs(alpha) ** 2 + n * np.log(complex(alpha)) - 0.5 * gammaln(n + 1))


def squeezed_ket(alpha, r, theta, dim, big=BIG):
    vac = np.zeros(big, dtype=complex)
    vac[0] = 1.0
    psi = displacement(alpha, big) @ squeeze(r * np.exp(1j * theta), big) @ vac
    return psi[:dim]


def cat_ket(coeffs, alphas, dim):
    psi = sum(c * coherent_ket(a, dim) for c, a in zip(coeffs, alphas))
    return psi / np.linalg.norm(psi)


def density(kets_weights, dim):
    rho = np.zeros((dim, dim), dtype=complex)
    for w, psi in kets_weights:
        psi = np.pad(psi, (0, dim - psi.size))[:dim]
        rho += w * np.outer(psi, psi.conj())
    return rho


def wigner(rho, z, extra=80):
    """W(z) = (2/pi) Tr[D(-z) rho D(z) Parity] in an enlarged basis."""
    dim = rho.shape[0] + extra
    big = np.zeros((dim, dim), dtype=complex)
    big[: rho.shape[0], : rho.shape[0]] = rho
    d = displacement(-z, dim)
    shifted = d @ big @ d.conj().T
    keep = rho.shape[0] + extra // 2  # discard the edge where expm truncation bites
    parity = (-1.0) ** np.arange(keep)
    return float(2.0 / math.pi * np.real(np.sum(parity * np.diag(shifted)[:keep])))


def husimi(rho, beta):
    ket = coherent_ket(beta, rho.shape[0])
    return float(np.real(np.conj(ket) @ rho @ ket)) / math.pi


def laguerre_peak(n):
    """M_n = max_{y >= 0} (-1)^{n+1} L_n(y), located by a dense scan plus refinement."""
    ys = np.linspace(0.0, 4.0 * n + 10.0, 20001)
    vals = (-1.0) ** (n + 1) * eval_laguerre(n, ys)
    i = int(np.argmax(vals))
    lo, hi = ys[max(i - 1, 0)], ys[min(i + 1, ys.size - 1)]
    res = minimize_scalar(lambda y: -(-1.0) ** (n + 1) * eval_laguerre(n, y),
                          bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    return float(max(vals[i], -res.fun))


def depth_vac_fock_mixture(xi, n):
    """Depth of xi|0><0| + (1-xi)|n><n|.

    The bracket xi + (1-xi) (-s)^n L_n(y), s = (1-tau)/tau, is nonnegative
    for all y >= 0 iff s^n M_n <= xi/(1-xi) (n odd gives the same bound
    with the sign absorbed into M_n).
    """
    if xi == 0.0:
        return 1.0
    if xi == 1.0:
        return 0.0
    ratio = xi / (1.0 - xi)
    s = (ratio / laguerre_peak(n)) ** (1.0 / n)
    return 1.0 / (1.0 + s)
