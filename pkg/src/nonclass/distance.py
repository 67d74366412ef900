"""Distance-type nonclassicality of pure states.

The degree ``d_m = 1 - pi max_beta Q(beta)`` is the minimum over coherent
states of ``1 - |<psi|beta>|^2``, so coherent states sit at ``d_m = 0``.
Closed forms for number states, squeezed states, vacuum/one-photon
superpositions and small even cats are kept separate from the numeric
maximisation; :class:`DistanceReport.method` says which one produced a value.
"""

from __future__ import annotations

import cmath
import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .errors import DomainError, UnsupportedStateError
from .phase_space import q_function
from .states import (
    CoherentSuperposition,
    FockDensity,
    FockSuperposition,
    Mixture,
    SqueezedState,
    _squeezed_amplitudes,
    fock,
    mean_photon_number,
    squeezed,
    squeezed_vacuum_amplitude,
    to_fock_density,
)

NUMERIC = "numeric"
ANALYTIC_NUMBER = "analytic_number"
ANALYTIC_SQUEEZED = "analytic_squeezed"
ANALYTIC_VAC_ONE = "analytic_vac_one"
ANALYTIC_CAT_SMALL = "analytic_cat_small"

PURITY_GATE = 1.0 - 1e-9

_MIXED_MSG = ("the distance-type degree is defined here for pure states only; "
              "mixed states need the full density-operator distances and an "
              "extended reference set, which are not implemented")


@dataclass
class DistanceReport:
    d_m: float
    beta_star: complex
    q_max: float
    seeds_tried: int
    method: str
    trace: list = field(default_factory=list)  # (seed, beta, q) per ascent

    def to_dict(self) -> dict:
        return {
            "d_m": self.d_m,
            "beta_star": [self.beta_star.real, self.beta_star.imag],
            "q_max": self.q_max,
            "seeds_tried": self.seeds_tried,
            "method": self.method,
        }

    def write_trace_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["seed_x", "seed_y", "beta_x", "beta_y", "q"])
            for seed, beta, q in self.trace:
                w.writerow([f"{v:.17g}" for v in (seed.real, seed.imag, beta.real, beta.imag, q)])


def _require_pure(spec):
    if not isinstance(spec, Mixture):
        return spec
    rho = to_fock_density(spec)
    if rho.purity() < PURITY_GATE:
        raise UnsupportedStateError(_MIXED_MSG)
    w, v = np.linalg.eigh(rho.rho)
    return fock(v[:, -1])


# --------------------------------------------------------------------------
# Q maximisation
# --------------------------------------------------------------------------


def default_seeds(spec) -> list[complex]:
    """Origin, every coherent amplitude, and 8 points on the ring |beta|^2 = <n>."""
    seeds = [0j]
    if isinstance(spec, CoherentSuperposition):
        seeds += [complex(a) for a in spec.alphas]
    elif isinstance(spec, SqueezedState):
        seeds.append(spec.alpha)
    nbar = mean_photon_number(spec)
    seeds += [math.sqrt(nbar) * cmath.exp(2j * math.pi * k / 8) for k in range(8)]
    return seeds


def max_q(spec, seeds=()) -> tuple[complex, float, list]:
    """Global maximum of the Husimi function of a pure state.

    Nelder-Mead ascents start from :func:`default_seeds` plus ``seeds``.

    Returns
    -------
    beta_star, q_max, trace
        ``trace`` lists ``(seed, local_argmax, local_max)`` per ascent.

    Raises
    ------
    UnsupportedStateError
        For mixed states.
    """
    spec = _require_pure(spec)
    starts = default_seeds(spec) + [complex(s) for s in seeds]

    def neg_q(p):
        return -float(q_function(spec, complex(p[0], p[1])))

    trace = []
    best_beta, best_q = 0j, -math.inf
    for s in starts:
        x0 = np.array([s.real, s.imag])
        simplex = np.array([x0, x0 + [0.25, 0.0], x0 + [0.0, 0.25]])
        res = minimize(neg_q, x0, method="Nelder-Mead",
                       options={"initial_simplex": simplex, "xatol": 1e-11, "fatol": 1e-17,
                                "maxiter": 20000, "maxfev": 40000})
        beta, q = complex(res.x[0], res.x[1]), -float(res.fun)
        q0 = -neg_q(x0)
        if q0 > q:  # never report less than the seed itself
            beta, q = s, q0
        trace.append((s, beta, q))
        if q > best_q:
            best_beta, best_q = beta, q
    return best_beta, best_q, trace


# --------------------------------------------------------------------------
# closed forms
# --------------------------------------------------------------------------


def d_m_number(n: int) -> float:
    """``1 - n^n e^{-n} / n!`` for the number state |n>."""
    if int(n) != n or n < 0:
        raise DomainError(f"n: must be a nonnegative integer, got {n!r}")
    if n == 0:
        return 0.0
    return -math.expm1(n * math.log(n) - n - math.lgamma(n + 1))


def d_m_squeezed(r: float) -> float:
    """``1 - sech r`` for any Stoler state."""
    if r < 0:
        raise DomainError(f"r: must be >= 0, got {r}")
    return 1.0 - 1.0 / math.cosh(r)


def _vac_one_radius(xi: float) -> float:
    # |beta*| for sqrt(xi)|0> + sqrt(1-xi)|1>, rationalised to stay finite at xi = 1
    return 2.0 * math.sqrt(1.0 - xi) / (math.sqrt(4.0 - 3.0 * xi) + math.sqrt(xi))


def d_m_vac_one(xi: float) -> float:
    """Degree of ``sqrt(xi)|0> + sqrt(1-xi) e^{i phi}|1>`` (independent of phi).

    ``1 - exp[-(2 - xi - sqrt(xi(4-3xi))) / (2(1-xi))] [1 + sqrt(xi(4-3xi))/2 - xi/2]``;
    the exponent is evaluated in the equivalent form
    ``2(1-xi) / (2 - xi + sqrt(xi(4-3xi)))`` so that xi -> 1 is regular.
    """
    if not 0.0 <= xi <= 1.0:
        raise DomainError(f"xi: must lie in [0, 1], got {xi}")
    root = math.sqrt(xi * (4.0 - 3.0 * xi))
    expo = 2.0 * (1.0 - xi) / (2.0 - xi + root)
    return 1.0 - math.exp(-expo) * (1.0 + 0.5 * root - 0.5 * xi)


def d_m_cat_small(alpha: float) -> float:
    """``1 - sech(alpha^2)`` for the even cat, valid while the Q maximum is at the origin."""
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(
            f"alpha: the even-cat form needs 0 <= alpha <= 1 (maximum at x = 0), got {alpha}")
    return 1.0 - 1.0 / math.cosh(alpha * alpha)


def d_m_cat_asymptotic(alpha: float) -> float:
    """Large-alpha even-cat degree ``(1 - exp(-2 alpha^2)) / 2``."""
    if not alpha > 1.0:
        raise DomainError(
            f"alpha: the asymptotic even-cat form applies only for alpha > 1, got {alpha}")
    return 0.5 * (1.0 - math.exp(-2.0 * alpha * alpha))


_CLOSED_FORMS = {
    "number": (d_m_number, "n"),
    "squeezed": (d_m_squeezed, "r"),
    "vac_one": (d_m_vac_one, "xi"),
    "cat_even_small": (d_m_cat_small, "alpha"),
    "cat_even_asymptotic": (d_m_cat_asymptotic, "alpha"),
}


def d_m_closed_forms(family: str, **params) -> float:
    """Dispatch to a closed form by family name (see ``_CLOSED_FORMS``)."""
    try:
        func, name = _CLOSED_FORMS[family]
    except KeyError:
        raise DomainError(f"family: unknown closed form {family!r}") from None
    if set(params) != {name}:
        raise DomainError(f"{family}: expects exactly the parameter {name!r}")
    return func(params[name])


def gaussian_bijection(tau_m: float) -> float:
    """Degree of a squeezed state from its depth: ``1 - sqrt((1-2t)/(1-t)^2)``."""
    if not 0.0 <= tau_m < 0.5:
        raise DomainError(f"tau_m: must lie in [0, 1/2), got {tau_m}")
    # rationalised form of 1 - sqrt(1-2t)/(1-t), free of cancellation at small t
    u = 1.0 - tau_m
    return tau_m * tau_m / (u * (u + math.sqrt(1.0 - 2.0 * tau_m)))


def gaussian_bijection_inverse(d_m: float) -> float:
    """Inverse of :func:`gaussian_bijection` on [0, 1)."""
    if not 0.0 <= d_m < 1.0:
        raise DomainError(f"d_m: must lie in [0, 1), got {d_m}")
    t = math.sqrt(d_m * (2.0 - d_m))
    return t / (1.0 + t)


# --------------------------------------------------------------------------
# degree of nonclassicality
# --------------------------------------------------------------------------


def _analytic(spec):
    """(d_m, beta_star, method) when spec belongs to a closed-form family."""
    if isinstance(spec, SqueezedState):
        return d_m_squeezed(spec.r), spec.alpha, ANALYTIC_SQUEEZED
    if isinstance(spec, CoherentSuperposition):
        live = np.flatnonzero(spec.coeffs)
        if live.size == 1:
            return 0.0, complex(spec.alphas[live[0]]), ANALYTIC_SQUEEZED
        if live.size == 2:
            c1, c2 = spec.coeffs[live]
            a1, a2 = spec.alphas[live]
            if (abs(a1 + a2) <= 1e-12 * max(1.0, abs(a1)) and abs(c1 - c2) <= 1e-12 * abs(c1)
                    and abs(a1) <= 1.0):
                return d_m_cat_small(abs(a1)), 0j, ANALYTIC_CAT_SMALL
        return None
    if isinstance(spec, FockSuperposition):
        live = np.flatnonzero(spec.coeffs)
        if live.size == 1:
            n = int(live[0])
            return d_m_number(n), complex(math.sqrt(n)), ANALYTIC_NUMBER
        if live.size == 2 and live[0] == 0 and live[1] == 1:
            c0, c1 = spec.coeffs[0], spec.coeffs[1]
            xi = abs(c0) ** 2
            phi = cmath.phase(c1) - cmath.phase(c0)
            return d_m_vac_one(xi), _vac_one_radius(xi) * cmath.exp(1j * phi), ANALYTIC_VAC_ONE
    return None


def nonclassicality_distance(spec, method: str = "auto", seeds=()) -> DistanceReport:
    """``d_m = 1 - pi max Q`` for a pure state.

    ``method="auto"`` uses a closed form when the state belongs to one of the
    known families; ``method="numeric"`` always maximises Q numerically.
    """
    if method not in ("auto", "numeric"):
        raise DomainError(f"method: must be 'auto' or 'numeric', got {method!r}")
    spec = _require_pure(spec)
    if method == "auto":
        hit = _analytic(spec)
        if hit is not None:
            d, beta, tag = hit
            return DistanceReport(d, beta, (1.0 - d) / math.pi, 0, tag)
    beta, q, trace = max_q(spec, seeds)
    q = min(q, 1.0 / math.pi)
    return DistanceReport(1.0 - math.pi * q, beta, q, len(trace), NUMERIC, trace)


# --------------------------------------------------------------------------
# distances between states
# --------------------------------------------------------------------------


def _coherent_fock_overlap(coh: CoherentSuperposition, psi: np.ndarray) -> complex:
    # <coh|psi> with psi a finite Fock vector
    n = np.arange(psi.size)
    lf = 0.5 * np.concatenate([[0.0], np.cumsum(np.log(np.arange(1, max(psi.size, 1))))])[: psi.size]
    total = 0j
    for c, a in zip(coh.coeffs, coh.alphas):
        if a == 0:
            amp = np.zeros(psi.size, dtype=complex)
            amp[0] = 1.0
        else:
            amp = np.exp(-0.5 * abs(a) ** 2 + n * np.log(a) - lf)
        total += np.conj(c) * np.vdot(amp, psi)
    return total


def _squeezed_coherent_overlap(beta: complex, s: SqueezedState) -> complex:
    # <beta|alpha,zeta> = exp((beta^* alpha - beta alpha^*)/2) <0|alpha-beta, zeta>
    shifted = squeezed(s.alpha - beta, s.r, s.theta)
    return cmath.exp(0.5 * (beta.conjugate() * s.alpha - beta * s.alpha.conjugate())) \
        * squeezed_vacuum_amplitude(shifted)


def overlap(a, b) -> complex:
    """``<a|b>`` for two pure specs, from exact finite sums where possible."""
    a = _require_pure(a)
    b = _require_pure(b)
    if isinstance(a, FockSuperposition) and isinstance(b, FockSuperposition):
        n = min(a.coeffs.size, b.coeffs.size)
        return complex(np.vdot(a.coeffs[:n], b.coeffs[:n]))
    if isinstance(a, CoherentSuperposition) and isinstance(b, CoherentSuperposition):
        g = np.exp(-0.5 * np.abs(a.alphas)[:, None] ** 2 - 0.5 * np.abs(b.alphas)[None, :] ** 2
                   + np.conj(a.alphas)[:, None] * b.alphas[None, :])
        return complex(np.conj(a.coeffs) @ g @ b.coeffs)
    if isinstance(a, CoherentSuperposition) and isinstance(b, FockSuperposition):
        return _coherent_fock_overlap(a, b.coeffs)
    if isinstance(a, FockSuperposition) and isinstance(b, CoherentSuperposition):
        return _coherent_fock_overlap(b, a.coeffs).conjugate()
    if isinstance(a, CoherentSuperposition) and isinstance(b, SqueezedState):
        return complex(sum(np.conj(c) * _squeezed_coherent_overlap(complex(al), b)
                           for c, al in zip(a.coeffs, a.alphas)))
    if isinstance(a, SqueezedState) and isinstance(b, CoherentSuperposition):
        return overlap(b, a).conjugate()
    if isinstance(a, FockSuperposition) and isinstance(b, SqueezedState):
        return complex(np.vdot(a.coeffs, _squeezed_amplitudes(b, a.coeffs.size)))
    if isinstance(a, SqueezedState) and isinstance(b, FockSuperposition):
        return overlap(b, a).conjugate()
    # two squeezed states: Fock vectors of a common length, so the error is the tail mass
    from .states import fock_amplitudes

    pa, _ = fock_amplitudes(a, 1e-15)
    pb, _ = fock_amplitudes(b, 1e-15)
    n = max(pa.size, pb.size)
    return complex(np.vdot(_squeezed_amplitudes(a, n), _squeezed_amplitudes(b, n)))


def hs_distance_mixed(a: FockDensity, b: FockDensity) -> float:
    """``sqrt(Tr (rho - sigma)^2)`` in the truncated basis (smaller matrix zero-padded)."""
    dim = max(a.dim, b.dim)
    diff = a.padded(dim) - b.padded(dim)
    return float(np.sqrt(max(0.0, np.real(np.vdot(diff, diff)))))


def hs_distance_pure(a, b) -> float:
    """``sqrt(2 - 2|<a|b>|^2)``; mixed inputs go through :func:`hs_distance_mixed`."""
    if isinstance(a, Mixture) or isinstance(b, Mixture):
        return hs_distance_mixed(to_fock_density(a), to_fock_density(b))
    p = abs(overlap(a, b)) ** 2
    return math.sqrt(max(0.0, 2.0 - 2.0 * min(p, 1.0)))


def bu_distance_pure(a, b) -> float:
    """``sqrt(2 - 2|<a|b>|)`` for pure states."""
    if isinstance(a, Mixture) or isinstance(b, Mixture):
        raise UnsupportedStateError("Bures-Uhlmann distance is implemented for pure states only")
    p = abs(overlap(a, b))
    return math.sqrt(max(0.0, 2.0 - 2.0 * min(p, 1.0)))
