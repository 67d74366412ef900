"""Single-mode state descriptions and their truncated Fock-basis projection.

Four kinds of state are supported: finite Fock superpositions, finite
superpositions of coherent states, displaced squeezed (Stoler) states and
convex mixtures of those pure states.  All of them are immutable and
normalised on construction.

Squeezing follows ``S(zeta) = exp(zeta a^dag^2 / 2 - zeta^* a^2 / 2)`` with
``zeta = r e^{i theta}``, so the squeezed vacuum is
``exp(e^{i theta} tanh(r) a^dag^2 / 2)|0> / sqrt(cosh r)``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import DomainError, ResourceError

DEFAULT_TAIL = 1e-12
DEFAULT_MAX_DIM = 512
RENORM_WARN = 1e-6
# cumulative-probability sums cannot resolve tails much below this
_TAIL_FLOOR = 64 * np.finfo(float).eps
_LOG_BIG = math.log(1e150)
_NORM_SLACK = 8 * np.finfo(float).eps


def _amplitude(value, name="amplitude") -> complex:
    try:
        if isinstance(value, (list, tuple)) and len(value) == 2:
            c = complex(float(value[0]), float(value[1]))
        else:
            c = complex(value)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"{name}: not a complex number: {value!r}") from exc
    if not (math.isfinite(c.real) and math.isfinite(c.imag)):
        raise DomainError(f"{name}: must be finite, got {c!r}")
    return c


def _frozen(a):
    a = np.array(a, dtype=complex)
    a.flags.writeable = False
    return a


def _unit(c, norm):
    # leave already-normalised input bit-identical so JSON round trips are stable
    return c if abs(norm - 1.0) <= _NORM_SLACK else c / norm


def coherent_overlap(a: complex, b: complex) -> complex:
    """<a|b> for coherent states."""
    return cmath.exp(-0.5 * abs(a) ** 2 - 0.5 * abs(b) ** 2 + a.conjugate() * b)


@dataclass(frozen=True, eq=False)
class FockSuperposition:
    """Pure state ``sum_n coeffs[n] |n>``."""

    coeffs: np.ndarray
    renormalized: bool = False

    kind = "fock"

    @property
    def n_max(self) -> int:
        nz = np.flatnonzero(self.coeffs)
        return int(nz[-1]) if nz.size else 0


@dataclass(frozen=True, eq=False)
class CoherentSuperposition:
    """Pure state ``sum_i coeffs[i] |alphas[i]>`` (normalised, not orthogonal)."""

    coeffs: np.ndarray
    alphas: np.ndarray
    renormalized: bool = False

    kind = "coherent_superposition"

    def gram(self) -> np.ndarray:
        a = self.alphas
        return np.exp(-0.5 * np.abs(a)[:, None] ** 2 - 0.5 * np.abs(a)[None, :] ** 2
                      + np.conj(a)[:, None] * a[None, :])


@dataclass(frozen=True)
class SqueezedState:
    """Stoler state ``D(alpha) S(r e^{i theta}) |0>``."""

    alpha: complex
    r: float
    theta: float = 0.0

    kind = "squeezed"

    @property
    def zeta(self) -> complex:
        return self.r * cmath.exp(1j * self.theta)


@dataclass(frozen=True, eq=False)
class Mixture:
    """Convex combination of pure states."""

    weights: tuple
    components: tuple

    kind = "mixture"


PureState = Union[FockSuperposition, CoherentSuperposition, SqueezedState]
StateSpec = Union[FockSuperposition, CoherentSuperposition, SqueezedState, Mixture]


@dataclass(frozen=True, eq=False)
class FockDensity:
    """Density matrix truncated to photon numbers ``0..dim-1``.

    ``tail_mass`` is the probability discarded by the truncation.
    """

    rho: np.ndarray
    tail_mass: float = 0.0
    pure: bool = field(default=False, compare=False)

    @property
    def dim(self) -> int:
        return self.rho.shape[0]

    def padded(self, dim: int) -> np.ndarray:
        if dim < self.dim:
            raise DomainError(f"cannot pad dimension {self.dim} down to {dim}")
        out = np.zeros((dim, dim), dtype=complex)
        out[: self.dim, : self.dim] = self.rho
        return out

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.rho - self.rho.conj().T))) if self.dim else 0.0

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(0.5 * (self.rho + self.rho.conj().T))[0])

    def is_psd(self, atol: float = 1e-10) -> bool:
        return self.min_eigenvalue() >= -atol

    def purity(self) -> float:
        return float(np.real(np.vdot(self.rho, self.rho)))

    def photon_distribution(self) -> np.ndarray:
        return np.real(np.diag(self.rho)).copy()


# --------------------------------------------------------------------------
# constructors
# --------------------------------------------------------------------------


def fock(coeffs: Sequence) -> FockSuperposition:
    """Fock superposition from (unnormalised) coefficients indexed by n."""
    c = np.array([_amplitude(v, f"coeffs[{i}]") for i, v in enumerate(coeffs)], dtype=complex)
    if c.size == 0 or not np.any(c):
        raise DomainError("coeffs: at least one nonzero coefficient is required")
    norm = float(np.linalg.norm(c))
    return FockSuperposition(_frozen(_unit(c, norm)), renormalized=abs(norm - 1.0) > RENORM_WARN)


def number_state(n: int) -> FockSuperposition:
    if int(n) != n or n < 0:
        raise DomainError(f"n: photon number must be a nonnegative integer, got {n!r}")
    c = np.zeros(int(n) + 1, dtype=complex)
    c[-1] = 1.0
    return FockSuperposition(_frozen(c))


def coherent_superposition(coeffs: Sequence, alphas: Sequence) -> CoherentSuperposition:
    c = np.array([_amplitude(v, f"terms[{i}].coeff") for i, v in enumerate(coeffs)], dtype=complex)
    a = np.array([_amplitude(v, f"terms[{i}].alpha") for i, v in enumerate(alphas)], dtype=complex)
    if c.size == 0 or c.size != a.size:
        raise DomainError("terms: need at least one (coeff, alpha) pair")
    if not np.any(c):
        raise DomainError("terms: at least one nonzero coefficient is required")
    tmp = CoherentSuperposition(c, a)
    norm2 = float(np.real(np.conj(c) @ tmp.gram() @ c))
    if not norm2 > 0.0:
        raise DomainError("terms: superposition has zero norm")
    norm = math.sqrt(norm2)
    return CoherentSuperposition(_frozen(_unit(c, norm)), _frozen(a),
                                 renormalized=abs(norm - 1.0) > RENORM_WARN)


def coherent(alpha) -> CoherentSuperposition:
    return CoherentSuperposition(_frozen([1.0]), _frozen([_amplitude(alpha, "alpha")]))


def squeezed(alpha=0.0, r: float = 0.0, theta: float = 0.0) -> SqueezedState:
    alpha = _amplitude(alpha, "alpha")
    r = float(r)
    theta = float(theta)
    if not (math.isfinite(r) and r >= 0.0):
        raise DomainError(f"zeta.r: squeeze magnitude must be finite and >= 0, got {r}")
    if not math.isfinite(theta):
        raise DomainError("zeta.theta: must be finite")
    return SqueezedState(alpha, r, theta % (2.0 * math.pi))


def mix(components) -> StateSpec:
    """Convex mixture from ``[(weight, pure_state), ...]``.

    A single component of weight one returns that component unchanged.
    """
    components = list(components)
    if not components:
        raise DomainError("components: empty mixture")
    weights = []
    states = []
    for i, (w, s) in enumerate(components):
        w = float(w)
        if not (w > 0.0 and w <= 1.0 + 1e-12):
            raise DomainError(f"components[{i}].weight: must lie in (0, 1], got {w}")
        if isinstance(s, Mixture):
            raise DomainError(f"components[{i}].state: nested mixtures are not supported")
        weights.append(w)
        states.append(s)
    total = math.fsum(weights)
    if abs(total - 1.0) > 1e-12:
        raise DomainError(f"components: weights sum to {total!r}, not 1")
    if len(states) == 1:
        return states[0]
    return Mixture(tuple(weights), tuple(states))


def make_vac_fock_superposition(xi: float, phi: float, n: int) -> FockSuperposition:
    """``sqrt(xi)|0> + sqrt(1-xi) e^{i phi}|n>``."""
    xi = float(xi)
    if not 0.0 <= xi <= 1.0:
        raise DomainError(f"xi: must lie in [0, 1], got {xi}")
    if int(n) != n or n < 1:
        raise DomainError(f"n: must be an integer >= 1, got {n!r}")
    n = int(n)
    if xi == 1.0:
        return number_state(0)
    if xi == 0.0:
        return number_state(n)
    c = np.zeros(n + 1, dtype=complex)
    c[0] = math.sqrt(xi)
    c[n] = math.sqrt(1.0 - xi) * cmath.exp(1j * phi)
    return FockSuperposition(_frozen(c))


def make_vac_fock_mixture(xi: float, n: int) -> StateSpec:
    """``xi |0><0| + (1-xi) |n><n|``; endpoints return the pure basis state."""
    xi = float(xi)
    if not 0.0 <= xi <= 1.0:
        raise DomainError(f"xi: must lie in [0, 1], got {xi}")
    if int(n) != n or n < 1:
        raise DomainError(f"n: must be an integer >= 1, got {n!r}")
    if xi == 1.0:
        return number_state(0)
    if xi == 0.0:
        return number_state(int(n))
    return Mixture((xi, 1.0 - xi), (number_state(0), number_state(int(n))))


def make_cat(alpha: float, xi: float, phi: float) -> CoherentSuperposition:
    """``N (sqrt(xi)|-alpha> + sqrt(1-xi) e^{i phi}|alpha>)`` for real alpha > 0.

    ``N = (1 + 2 sqrt(xi(1-xi)) cos(phi) exp(-2 alpha^2))^{-1/2}``.  At
    ``xi = 1/2`` the coefficients are ``N/sqrt(2)``, i.e. the usual even
    (``phi = 0``) and odd (``phi = pi``) coherent states.
    """
    alpha = float(alpha)
    xi = float(xi)
    if not alpha > 0.0 or not math.isfinite(alpha):
        raise DomainError(f"alpha: must be real and > 0, got {alpha}")
    if not 0.0 <= xi <= 1.0:
        raise DomainError(f"xi: must lie in [0, 1], got {xi}")
    overlap = 2.0 * math.sqrt(xi * (1.0 - xi)) * math.cos(phi) * math.exp(-2.0 * alpha * alpha)
    norm = (1.0 + overlap) ** -0.5
    c = [norm * math.sqrt(xi), norm * math.sqrt(1.0 - xi) * cmath.exp(1j * phi)]
    return CoherentSuperposition(_frozen(c), _frozen([-alpha, alpha]))


def even_cat(alpha: float) -> CoherentSuperposition:
    return make_cat(alpha, 0.5, 0.0)


def odd_cat(alpha: float) -> CoherentSuperposition:
    return make_cat(alpha, 0.5, math.pi)


# --------------------------------------------------------------------------
# queries
# --------------------------------------------------------------------------


def is_pure(spec: StateSpec) -> bool:
    return not isinstance(spec, Mixture)


def pure_components(spec: StateSpec):
    """``[(weight, pure_state), ...]`` for any spec."""
    if isinstance(spec, Mixture):
        return list(zip(spec.weights, spec.components))
    return [(1.0, spec)]


def squeezed_vacuum_amplitude(state: SqueezedState) -> complex:
    """<0|alpha, zeta>."""
    t = cmath.exp(1j * state.theta) * math.tanh(state.r)
    a = state.alpha
    return cmath.exp(-0.5 * math.log(math.cosh(state.r)) - 0.5 * abs(a) ** 2
                     + 0.5 * t * a.conjugate() ** 2)


def vacuum_probability(spec: StateSpec) -> float:
    """Exact ``<0|rho|0>``."""
    total = 0.0
    for w, s in pure_components(spec):
        if isinstance(s, FockSuperposition):
            p = abs(s.coeffs[0]) ** 2
        elif isinstance(s, CoherentSuperposition):
            p = abs(np.sum(s.coeffs * np.exp(-0.5 * np.abs(s.alphas) ** 2))) ** 2
        else:
            p = abs(squeezed_vacuum_amplitude(s)) ** 2
        total += w * p
    return float(total)


def mean_photon_number(spec: StateSpec) -> float:
    """Exact mean photon number."""
    total = 0.0
    for w, s in pure_components(spec):
        if isinstance(s, FockSuperposition):
            n = np.arange(s.coeffs.size)
            val = float(np.sum(n * np.abs(s.coeffs) ** 2))
        elif isinstance(s, CoherentSuperposition):
            a = s.alphas
            m = s.gram() * np.conj(a)[:, None] * a[None, :]
            val = float(np.real(np.conj(s.coeffs) @ m @ s.coeffs))
        else:
            val = abs(s.alpha) ** 2 + math.sinh(s.r) ** 2
        total += w * val
    return total


# --------------------------------------------------------------------------
# Fock-basis projection
# --------------------------------------------------------------------------


def _cutoff_index(probs: np.ndarray, tail_bound: float) -> int | None:
    cum = np.cumsum(probs)
    hit = np.flatnonzero(1.0 - cum <= max(tail_bound, _TAIL_FLOOR))
    return int(hit[0]) if hit.size else None


def _coherent_amplitudes(state: CoherentSuperposition, dim: int) -> np.ndarray:
    n = np.arange(dim)
    half_lfact = 0.5 * np.concatenate([[0.0], np.cumsum(np.log(np.arange(1, dim)))])
    psi = np.zeros(dim, dtype=complex)
    for c, a in zip(state.coeffs, state.alphas):
        if a == 0:
            psi[0] += c
            continue
        psi += c * np.exp(-0.5 * abs(a) ** 2 + n * np.log(a) - half_lfact)
    return psi


def _squeezed_amplitudes(state: SqueezedState, dim: int) -> np.ndarray:
    # sqrt(n+1) psi_{n+1} = (alpha - t alpha^*) psi_n + t sqrt(n) psi_{n-1},
    # run on a rescaled copy u_n with a running log scale.
    t = cmath.exp(1j * state.theta) * math.tanh(state.r)
    drive = state.alpha - t * state.alpha.conjugate()
    log_psi0 = cmath.log(squeezed_vacuum_amplitude(state))
    out = np.zeros(dim, dtype=complex)
    u_prev, u_cur, scale = 0j, 1.0 + 0j, 0.0
    for n in range(dim):
        if n > 0:
            u_next = (drive * u_cur + t * math.sqrt(n - 1) * u_prev) / math.sqrt(n)
            u_prev, u_cur = u_cur, u_next
            if abs(u_cur) > 1e150:
                u_cur *= 1e-150
                u_prev *= 1e-150
                scale += _LOG_BIG
        if u_cur != 0:
            out[n] = cmath.exp(log_psi0 + scale + cmath.log(u_cur))
    return out


def fock_amplitudes(state: PureState, tail_bound: float = DEFAULT_TAIL,
                    max_dim: int = DEFAULT_MAX_DIM, min_dim: int = 1) -> tuple[np.ndarray, float]:
    """Truncated Fock amplitudes of a pure state and the discarded probability.

    The cutoff is the smallest N whose cumulative photon-number probability
    reaches ``1 - tail_bound``, raised to ``min_dim - 1`` if that is larger.

    Raises
    ------
    ResourceError
        If that N would need more than ``max_dim`` basis states.
    """
    if isinstance(state, Mixture):
        raise DomainError("fock_amplitudes needs a pure state")
    if isinstance(state, FockSuperposition):
        psi = np.array(state.coeffs)
    else:
        if isinstance(state, CoherentSuperposition):
            amax = float(np.max(np.abs(state.alphas)))
            guess = int(amax * amax + 12.0 * amax + 40.0)
            build = _coherent_amplitudes
        else:
            guess = int(abs(state.alpha) ** 2 + 40.0 * math.exp(2.0 * state.r) + 40.0)
            build = _squeezed_amplitudes
        psi = build(state, min(max(guess, 8), max_dim))
        if _cutoff_index(np.abs(psi) ** 2, tail_bound) is None and psi.size < max_dim:
            psi = build(state, max_dim)
    probs = np.abs(psi) ** 2
    cut = _cutoff_index(probs, tail_bound)
    if cut is None:
        if isinstance(state, FockSuperposition):
            cut = psi.size - 1
        else:
            raise ResourceError(
                f"Fock cutoff for tail {tail_bound:g} exceeds the limit of {max_dim} states")
    if cut + 1 > max_dim:
        raise ResourceError(f"Fock cutoff {cut} exceeds the limit of {max_dim} states")
    keep = max(cut + 1, min_dim)
    if keep > max_dim:
        raise ResourceError(f"min_dim {min_dim} exceeds the limit of {max_dim} states")
    if keep > psi.size:
        psi = np.pad(psi, (0, keep - psi.size)) if isinstance(state, FockSuperposition) \
            else build(state, keep)
    psi = psi[:keep]
    tail = max(0.0, 1.0 - float(np.sum(np.abs(psi) ** 2)))
    return psi, tail


def to_fock_density(spec: StateSpec, tail_bound: float = DEFAULT_TAIL,
                    max_dim: int = DEFAULT_MAX_DIM, min_dim: int = 1) -> FockDensity:
    """Project any spec onto a truncated number-basis density matrix.

    Mixture components are truncated individually and padded to the largest
    cutoff; ``tail_mass`` is the weighted sum of their discarded probability.
    ``min_dim`` keeps at least that many exact amplitudes, which matters for
    R-functions below tau = 1/2 where the discarded tail is amplified.
    """
    if not (0.0 < tail_bound <= 1e-6):
        raise DomainError(f"tail_bound: must lie in (0, 1e-6], got {tail_bound}")
    parts = []
    for w, s in pure_components(spec):
        psi, tail = fock_amplitudes(s, tail_bound, max_dim, min_dim)
        parts.append((w, psi, tail))
    dim = max(p[1].size for p in parts)
    rho = np.zeros((dim, dim), dtype=complex)
    tail_mass = 0.0
    for w, psi, tail in parts:
        k = psi.size
        rho[:k, :k] += w * np.outer(psi, np.conj(psi))
        tail_mass += w * tail
    rho = 0.5 * (rho + rho.conj().T)
    rho.flags.writeable = False
    return FockDensity(rho, tail_mass, pure=is_pure(spec))


# --------------------------------------------------------------------------
# JSON schema
# --------------------------------------------------------------------------


def _pair(c: complex):
    return [float(c.real), float(c.imag)]


def state_to_dict(spec: StateSpec) -> dict:
    if isinstance(spec, FockSuperposition):
        return {"type": "fock", "coeffs": [_pair(c) for c in spec.coeffs]}
    if isinstance(spec, CoherentSuperposition):
        return {"type": "coherent_superposition",
                "terms": [{"coeff": _pair(c), "alpha": _pair(a)}
                          for c, a in zip(spec.coeffs, spec.alphas)]}
    if isinstance(spec, SqueezedState):
        return {"type": "squeezed", "alpha": _pair(spec.alpha),
                "zeta": {"r": spec.r, "theta": spec.theta}}
    return {"type": "mixture",
            "components": [{"weight": w, "state": state_to_dict(s)}
                           for w, s in zip(spec.weights, spec.components)]}


def _need(obj, key, where):
    if not isinstance(obj, dict):
        raise DomainError(f"{where}: expected an object")
    if key not in obj:
        raise DomainError(f"{where}.{key}: missing field")
    return obj[key]


def state_from_dict(data, where: str = "state") -> StateSpec:
    """Parse the JSON state schema; errors name the offending field."""
    kind = _need(data, "type", where)
    if kind == "fock":
        coeffs = _need(data, "coeffs", where)
        if not isinstance(coeffs, list):
            raise DomainError(f"{where}.coeffs: expected a list of [re, im] pairs")
        vals = [_amplitude(c, f"{where}.coeffs[{i}]") for i, c in enumerate(coeffs)]
        try:
            return fock(vals)
        except DomainError as exc:
            raise DomainError(f"{where}.{exc}") from exc
    if kind == "coherent_superposition":
        terms = _need(data, "terms", where)
        if not isinstance(terms, list) or not terms:
            raise DomainError(f"{where}.terms: expected a non-empty list")
        cs, als = [], []
        for i, t in enumerate(terms):
            cs.append(_amplitude(_need(t, "coeff", f"{where}.terms[{i}]"), f"{where}.terms[{i}].coeff"))
            als.append(_amplitude(_need(t, "alpha", f"{where}.terms[{i}]"), f"{where}.terms[{i}].alpha"))
        try:
            return coherent_superposition(cs, als)
        except DomainError as exc:
            raise DomainError(f"{where}.{exc}") from exc
    if kind == "squeezed":
        alpha = _amplitude(data.get("alpha", [0.0, 0.0]), f"{where}.alpha")
        zeta = _need(data, "zeta", where)
        r = _need(zeta, "r", f"{where}.zeta")
        theta = zeta.get("theta", 0.0) if isinstance(zeta, dict) else 0.0
        try:
            return squeezed(alpha, float(r), float(theta))
        except (TypeError, ValueError) as exc:
            raise DomainError(f"{where}.zeta: {exc}") from exc
    if kind == "mixture":
        comps = _need(data, "components", where)
        if not isinstance(comps, list):
            raise DomainError(f"{where}.components: expected a list")
        parsed = []
        for i, c in enumerate(comps):
            w = _need(c, "weight", f"{where}.components[{i}]")
            s = state_from_dict(_need(c, "state", f"{where}.components[{i}]"),
                                f"{where}.components[{i}].state")
            if not isinstance(w, (int, float)):
                raise DomainError(f"{where}.components[{i}].weight: expected a number")
            parsed.append((w, s))
        try:
            return mix(parsed)
        except DomainError as exc:
            raise DomainError(f"{where}.{exc}") from exc
    raise DomainError(f"{where}.type: unknown state type {kind!r}")
