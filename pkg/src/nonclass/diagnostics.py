"""Auxiliary nonclassicality indicators: Mandel q, impurity and quadrature variances.

Quadratures are ``X1 = (a + a^dag)/2`` and ``X2 = (a - a^dag)/(2i)``, so the
vacuum has variance 1/4 in every direction and quadrature squeezing means a
variance below 1/4.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DomainError
from .states import (
    DEFAULT_TAIL,
    CoherentSuperposition,
    FockDensity,
    FockSuperposition,
    SqueezedState,
    pure_components,
    to_fock_density,
)

VACUUM_MEAN_N = 1e-14


@dataclass
class DiagnosticsReport:
    mandel_q: float  # nan for the vacuum
    impurity_D: float
    mean_n: float
    var_x1: float
    var_x2: float
    min_quadrature_var: float
    min_quadrature_var_angle: float
    tail_mass: float

    def to_dict(self) -> dict:
        return asdict(self)


def _density(spec) -> FockDensity:
    return spec if isinstance(spec, FockDensity) else to_fock_density(spec, DEFAULT_TAIL)


def _photon_moments(rho: FockDensity) -> tuple[float, float]:
    p = rho.photon_distribution()
    n = np.arange(p.size, dtype=float)
    return float(np.dot(n, p)), float(np.dot(n * n, p))


def factorial_moments(spec) -> tuple[float, float]:
    """Exact ``<a^dag a>`` and ``<a^dag^2 a^2>`` without Fock truncation.

    Squeezed parts use Wick's theorem on ``a = alpha + b`` with
    ``<b^dag b> = sinh^2 r`` and ``<b^2> = e^{i theta} sinh r cosh r``.
    """
    if isinstance(spec, FockDensity):
        m1, m2 = _photon_moments(spec)
        return m1, m2 - m1
    f1 = f2 = 0.0
    for w, s in pure_components(spec):
        if isinstance(s, FockSuperposition):
            p = np.abs(s.coeffs) ** 2
            n = np.arange(p.size, dtype=float)
            f1 += w * float(np.dot(n, p))
            f2 += w * float(np.dot(n * (n - 1.0), p))
        elif isinstance(s, CoherentSuperposition):
            g = s.gram()
            c = s.coeffs
            ac = np.conj(s.alphas)[:, None]
            a = s.alphas[None, :]
            f1 += w * float(np.real(np.conj(c) @ (g * ac * a) @ c))
            f2 += w * float(np.real(np.conj(c) @ (g * ac ** 2 * a ** 2) @ c))
        else:
            al = s.alpha
            s2 = math.sinh(s.r) ** 2
            m = cmath.exp(1j * s.theta) * math.sinh(s.r) * math.cosh(s.r)
            f1 += w * (abs(al) ** 2 + s2)
            f2 += w * (abs(al) ** 4 + 2.0 * (al.conjugate() ** 2 * m).real
                       + 4.0 * abs(al) ** 2 * s2 + abs(m) ** 2 + 2.0 * s2 * s2)
    return f1, f2


def mandel_q(spec) -> float:
    """``<n^2>/<n> - <n> - 1``, evaluated as ``(<a^dag^2 a^2> - <n>^2) / <n>``.

    Raises
    ------
    DomainError
        For the vacuum, where the ratio is undefined.
    """
    f1, f2 = factorial_moments(spec)
    if f1 <= VACUUM_MEAN_N:
        raise DomainError("Mandel q is undefined for zero mean photon number")
    return (f2 - f1 * f1) / f1


def impurity(spec) -> float:
    """``D = Tr(rho - rho^2) = 1 - Tr rho^2`` of the truncated density matrix.

    Truncation shifts the result by at most ``2 * tail_mass``.
    """
    rho = _density(spec)
    tr = float(np.real(np.trace(rho.rho)))
    return tr - rho.purity()


def _ladder_moments(rho: FockDensity) -> tuple[complex, complex, float]:
    # <a>, <a^2>, <a^dag a> from the matrix in a basis one larger than rho
    dim = rho.dim + 2
    r = rho.padded(dim)
    a = np.diag(np.sqrt(np.arange(1, dim)), k=1)
    ea = complex(np.trace(r @ a))
    ea2 = complex(np.trace(r @ a @ a))
    en = float(np.real(np.trace(r @ a.conj().T @ a)))
    return ea, ea2, en


def _exact_moments(spec) -> tuple[complex, complex, float] | None:
    # closed-form moments for squeezed and coherent-superposition pure parts
    ea = ea2 = 0j
    en = 0.0
    for w, s in pure_components(spec):
        if isinstance(s, SqueezedState):
            ea += w * s.alpha
            ea2 += w * (s.alpha ** 2 + cmath.exp(1j * s.theta) * math.sinh(s.r) * math.cosh(s.r))
            en += w * (abs(s.alpha) ** 2 + math.sinh(s.r) ** 2)
        elif isinstance(s, CoherentSuperposition):
            g = s.gram()
            al = s.alphas
            c = s.coeffs
            ea += w * complex(np.conj(c) @ (g * al[None, :]) @ c)
            ea2 += w * complex(np.conj(c) @ (g * al[None, :] ** 2) @ c)
            en += w * float(np.real(np.conj(c) @ (g * np.conj(al)[:, None] * al[None, :]) @ c))
        else:
            return None
    return ea, ea2, en


def quadrature_variances(spec) -> tuple[float, float, float, float]:
    """Variances of X1, X2 and the minimum over rotated quadratures.

    With ``N = <a^dag a> - |<a>|^2`` and ``M = <a^2> - <a>^2`` the variance of
    ``X_phi = (a e^{-i phi} + a^dag e^{i phi})/2`` is
    ``(1 + 2N + 2 Re(M e^{-2i phi}))/4``; its minimum is ``(1 + 2N - 2|M|)/4``
    at ``phi = arg(M)/2 + pi/2``.

    Returns
    -------
    var_x1, var_x2, best_angle, best_var
    """
    moments = None if isinstance(spec, FockDensity) else _exact_moments(spec)
    if moments is None:
        moments = _ladder_moments(_density(spec))
    ea, ea2, en = moments
    big_n = en - abs(ea) ** 2
    big_m = ea2 - ea * ea
    var_x1 = 0.25 * (1.0 + 2.0 * big_n + 2.0 * big_m.real)
    var_x2 = 0.25 * (1.0 + 2.0 * big_n - 2.0 * big_m.real)
    best_var = 0.25 * (1.0 + 2.0 * big_n - 2.0 * abs(big_m))
    best_angle = (0.5 * cmath.phase(big_m) + 0.5 * math.pi) % math.pi
    return var_x1, var_x2, best_angle, best_var


def diagnostics(spec) -> DiagnosticsReport:
    """All indicators for one state; ``mandel_q`` is nan for the vacuum."""
    rho = _density(spec)
    try:
        q = mandel_q(spec)
    except DomainError:
        q = math.nan
    mean_n = factorial_moments(spec)[0]
    v1, v2, ang, best = quadrature_variances(spec)
    return DiagnosticsReport(q, impurity(rho), mean_n, v1, v2, best, ang, rho.tail_mass)
