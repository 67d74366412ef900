"""The tau-parametrised R-function family and the Husimi Q-function.

``R(z; tau)`` is the Gaussian convolution of the P-function with kernel
``exp(-|z-w|^2/tau)/(pi tau)``; tau = 1/2 gives the Wigner function and
tau = 1 the Q-function.  Three evaluators are provided:

* :func:`r_fock` - double sum over number-basis matrix elements with
  generalised Laguerre polynomials, tracked in log space;
* :func:`r_coherent` - the closed Gaussian double sum for finite
  superpositions of coherent states;
* :func:`r_squeezed` - the closed Gaussian form for Stoler states, which is
  regular only above the state's nonclassical depth.

:class:`REvaluator` picks the best evaluator per mixture component.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DomainError, NumericError, SingularRegimeError
from .states import (
    DEFAULT_TAIL,
    CoherentSuperposition,
    FockDensity,
    FockSuperposition,
    Mixture,
    SqueezedState,
    pure_components,
)

SINGULAR_MARGIN = 1e-9
REALITY_TOL = 1e-10


def squeezed_depth(r: float) -> float:
    """Nonclassical depth ``tanh r / (1 + tanh r)`` of a Stoler state."""
    t = math.tanh(r)
    return t / (1.0 + t)


def _points(z):
    z = np.asarray(z, dtype=complex)
    flat = z.ravel()
    return np.ascontiguousarray(flat.real), np.ascontiguousarray(flat.imag), z.shape


def _shape_out(values, shape):
    if shape == ():
        return float(values[0])
    return values.reshape(shape)


def _check_tau(tau, upper_open=True):
    tau = float(tau)
    ok = 0.0 < tau < 1.0 if upper_open else 0.0 < tau <= 1.0
    if not ok:
        rng = "(0, 1)" if upper_open else "(0, 1]"
        raise DomainError(f"tau: must lie in {rng}, got {tau}")
    return tau


# --------------------------------------------------------------------------
# individual evaluators
# --------------------------------------------------------------------------


def _fock_kernel_args(rho: np.ndarray):
    rho = np.ascontiguousarray(rho, dtype=complex)
    return rho, _kernels.half_log_factorials(rho.shape[0]), _kernels.active_diagonals(rho)


def r_fock(rho: FockDensity, z, tau: float):
    """R-function from number-basis matrix elements, for 0 < tau < 1.

    Accepts a scalar or an array of complex points.  Exact for states of
    finite photon-number support.  For truncated states with tau < 1/2 the
    weight of photon number n grows roughly like ((1 - tau)/tau)^n, so the
    discarded tail is amplified; build the density with a larger ``min_dim``
    (see :func:`nonclass.states.to_fock_density`) in that regime.

    Raises
    ------
    DomainError
        For tau outside (0, 1); tau = 1 is the Q-function (:func:`q_function`).
    NumericError
        If the density is not Hermitian or the log-space sum overflows.
    """
    tau = _check_tau(tau)
    scale = float(np.max(np.abs(rho.rho))) if rho.dim else 0.0
    if rho.hermiticity_error() > REALITY_TOL * max(scale, 1.0):
        raise NumericError("density matrix is not Hermitian; R would not be real")
    zr, zi, shape = _points(z)
    mat, hl, act = _fock_kernel_args(rho.rho)
    vals = _kernels.r_fock(mat, zr, zi, tau, hl, act)
    if not np.all(np.isfinite(vals)):
        bad = np.flatnonzero(~np.isfinite(vals))[0]
        raise NumericError(
            f"R-function overflow at z={complex(zr[bad], zi[bad])!r}, tau={tau}, dim={rho.dim}")
    return _shape_out(vals, shape)


def r_coherent(state: CoherentSuperposition, z, tau: float):
    """R-function of a finite coherent superposition, for 0 < tau <= 1."""
    tau = _check_tau(tau, upper_open=False)
    zr, zi, shape = _points(z)
    vals, resid = _kernels.r_coherent(np.ascontiguousarray(state.coeffs),
                                      np.ascontiguousarray(state.alphas), zr, zi, tau)
    if resid.size and float(np.max(resid)) > REALITY_TOL:
        raise NumericError(f"imaginary residue {float(np.max(resid)):.3g} exceeds {REALITY_TOL:g}")
    return _shape_out(vals, shape)


def _squeezed_q_matrix(state: SqueezedState):
    t = math.tanh(state.r)
    c, s = math.cos(state.theta), math.sin(state.theta)
    return np.array([[1.0 - t * c, -t * s], [-t * s, 1.0 + t * c]])


def r_squeezed(state: SqueezedState, z, tau: float):
    """Closed-form R-function of a Stoler state.

    The Q-function covariance is deconvolved by ``(1 - tau)/2`` per quadrature.

    Raises
    ------
    SingularRegimeError
        If tau is not above the state's depth ``tanh r/(1 + tanh r)``.
    """
    tau = _check_tau(tau, upper_open=False)
    tau_s = squeezed_depth(state.r)
    if state.r > 0.0 and tau < tau_s + SINGULAR_MARGIN:
        raise SingularRegimeError(
            f"R-function of a squeezed state (r={state.r:g}) is singular for "
            f"tau <= {tau_s:.12g}; requested tau={tau:g}", tau=tau, tau_singular=tau_s)
    cov = 0.5 * np.linalg.inv(_squeezed_q_matrix(state)) - 0.5 * (1.0 - tau) * np.eye(2)
    det = float(np.linalg.det(cov))
    prec = np.linalg.inv(cov)
    zr, zi, shape = _points(z)
    dx = zr - state.alpha.real
    dy = zi - state.alpha.imag
    quad = prec[0, 0] * dx * dx + 2.0 * prec[0, 1] * dx * dy + prec[1, 1] * dy * dy
    vals = np.exp(-0.5 * quad) / (2.0 * math.pi * math.sqrt(det))
    return _shape_out(vals, shape)


def q_squeezed(state: SqueezedState, beta):
    """Husimi function of a Stoler state in closed form."""
    t = math.tanh(state.r)
    c, s = math.cos(state.theta), math.sin(state.theta)
    zr, zi, shape = _points(beta)
    x = zr - state.alpha.real
    y = zi - state.alpha.imag
    vals = (np.exp(-(1.0 - t * c) * x * x - (1.0 + t * c) * y * y + 2.0 * t * s * x * y)
            / (math.pi * math.cosh(state.r)))
    return _shape_out(vals, shape)


def _q_coherent(state: CoherentSuperposition, zr, zi):
    b = zr + 1j * zi
    a = state.alphas
    amp = np.exp(-0.5 * np.abs(b)[:, None] ** 2 - 0.5 * np.abs(a)[None, :] ** 2
                 + np.conj(b)[:, None] * a[None, :]) @ state.coeffs
    return np.abs(amp) ** 2 / math.pi


def q_function(spec, beta):
    """``<beta|rho|beta>/pi`` using exact overlaps (closed form for squeezed states)."""
    zr, zi, shape = _points(beta)
    total = np.zeros(zr.shape)
    for w, s in pure_components(spec):
        if isinstance(s, FockSuperposition):
            psi = np.ascontiguousarray(s.coeffs)
            vals = _kernels.q_pure(psi, zr, zi, _kernels.half_log_factorials(psi.size))
        elif isinstance(s, CoherentSuperposition):
            vals = _q_coherent(s, zr, zi)
        else:
            vals = q_squeezed(s, zr + 1j * zi).reshape(zr.shape)
        total += w * vals
    return _shape_out(total, shape)


def q_from_density(rho: FockDensity, beta):
    """Q-function from a truncated density matrix."""
    zr, zi, shape = _points(beta)
    mat = np.ascontiguousarray(rho.rho, dtype=complex)
    vals = _kernels.q_density(mat, zr, zi, _kernels.half_log_factorials(mat.shape[0]))
    return _shape_out(vals, shape)


# --------------------------------------------------------------------------
# dispatcher
# --------------------------------------------------------------------------


class REvaluator:
    """R-function of an arbitrary spec, reusable across tau values.

    Fock-superposition components are merged into one exact density matrix;
    coherent superpositions and squeezed states use their closed forms.
    """

    def __init__(self, spec):
        self.spec = spec
        fock_parts, self.coherent_parts, self.squeezed_parts = [], [], []
        for w, s in pure_components(spec):
            if isinstance(s, FockSuperposition):
                fock_parts.append((w, s))
            elif isinstance(s, CoherentSuperposition):
                self.coherent_parts.append((w, s))
            else:
                self.squeezed_parts.append((w, s))
        self.density = None
        if fock_parts:
            dim = max(s.n_max for _, s in fock_parts) + 1
            rho = np.zeros((dim, dim), dtype=complex)
            for w, s in fock_parts:
                c = s.coeffs[:dim]
                rho[: c.size, : c.size] += w * np.outer(c, np.conj(c))
            self.density = FockDensity(rho, 0.0, pure=not isinstance(spec, Mixture))
            self._fock_args = _fock_kernel_args(rho)
        self.tau_singular = max((squeezed_depth(s.r) for _, s in self.squeezed_parts
                                 if s.r > 0.0), default=0.0)

    def values(self, zr, zi, tau: float) -> np.ndarray:
        """R at flat arrays of points; tau = 1 gives the Q-function.

        Results may be infinite (with the correct sign) when tau is so small
        that R exceeds the float range; NaN raises :class:`NumericError`.
        """
        tau = _check_tau(tau, upper_open=False)
        zr = np.ascontiguousarray(zr, dtype=float)
        zi = np.ascontiguousarray(zi, dtype=float)
        if tau == 1.0:
            return np.asarray(q_function(self.spec, zr + 1j * zi), dtype=float).reshape(zr.shape)
        total = np.zeros(zr.shape)
        with np.errstate(over="ignore", invalid="ignore"):
            for w, s in self.squeezed_parts:
                total = total + w * r_squeezed(s, zr + 1j * zi, tau).reshape(zr.shape)
            if self.density is not None:
                mat, hl, act = self._fock_args
                total = total + _kernels.r_fock(mat, zr, zi, tau, hl, act)
            for w, s in self.coherent_parts:
                vals, resid = _kernels.r_coherent(np.ascontiguousarray(s.coeffs),
                                                  np.ascontiguousarray(s.alphas), zr, zi, tau)
                if resid.size and float(np.max(resid)) > REALITY_TOL:
                    raise NumericError(
                        f"imaginary residue {float(np.max(resid)):.3g} exceeds {REALITY_TOL:g}")
                total = total + w * vals
        if np.any(np.isnan(total)):
            raise NumericError(f"R-function evaluation produced NaN at tau={tau}")
        return total

    def __call__(self, z, tau: float):
        zr, zi, shape = _points(z)
        return _shape_out(self.values(zr, zi, tau), shape)


def r_function(spec, z, tau: float):
    """R(z; tau) for any spec with the best available evaluator."""
    return REvaluator(spec)(z, tau)


# --------------------------------------------------------------------------
# grids
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    x_min: float
    x_max: float
    y_min: float
    y_max: float
    resolution: int

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise DomainError("grid: need x_min < x_max and y_min < y_max")
        if int(self.resolution) != self.resolution or self.resolution < 2:
            raise DomainError(f"grid.resolution: must be an integer >= 2, got {self.resolution}")

    @classmethod
    def square(cls, half_width: float, resolution: int) -> "GridSpec":
        return cls(-half_width, half_width, -half_width, half_width, resolution)

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.resolution)

    @property
    def ys(self) -> np.ndarray:
        return np.linspace(self.y_min, self.y_max, self.resolution)

    def mesh(self):
        """``(X, Y)`` with rows indexed by y and columns by x."""
        return np.meshgrid(self.xs, self.ys)


def r_grid(spec, tau: float, grid: GridSpec, evaluator: REvaluator | None = None) -> np.ndarray:
    """R sampled on ``grid``; entry ``[i, j]`` is at ``(xs[j], ys[i])``."""
    ev = evaluator if evaluator is not None else REvaluator(spec)
    X, Y = grid.mesh()
    return ev.values(X.ravel(), Y.ravel(), tau).reshape(X.shape)


def write_grid_csv(path, grid: GridSpec, values: np.ndarray) -> None:
    """Write ``x,y,value`` rows (row-major, 17 significant digits)."""
    xs, ys = grid.xs, grid.ys
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "y", "value"])
        for i, y in enumerate(ys):
            for j, x in enumerate(xs):
                w.writerow([f"{x:.17g}", f"{y:.17g}", f"{values[i, j]:.17g}"])
