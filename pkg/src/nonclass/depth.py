"""Nonclassical depth: the smallest tau for which R(z; tau) >= 0 everywhere.

The numeric path bisects over tau on the predicate ``min_z R(z; tau) >= -tol``
where the inner minimum comes from a coarse grid scan followed by
Nelder-Mead refinement.  Gaussian states and a few mixture rules have exact
answers and short-circuit the numerics.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import minimum_filter
from scipy.optimize import minimize

from .errors import DomainError, SingularRegimeError
from .phase_space import SINGULAR_MARGIN, REvaluator, squeezed_depth
from .states import (
    CoherentSuperposition,
    FockSuperposition,
    Mixture,
    SqueezedState,
    pure_components,
    squeezed,
    vacuum_probability,
)

NUMERIC = "numeric_bisection"
ANALYTIC_GAUSSIAN = "analytic_gaussian"
RULE_ZERO_VACUUM = "rule_zero_vacuum"
RULE_MIXTURE_SQUEEZED = "rule_mixture_squeezed"

DEFAULT_RESOLUTION = 161
DEFAULT_SEEDS = 5
DEFAULT_REFINE_TOL = 1e-10
AUDIT_POINTS = 5


@dataclass(frozen=True)
class SearchBox:
    """Square ``[-radius, radius]^2`` scanned on a coarse grid before refinement."""

    radius: float
    coarse_resolution: int = DEFAULT_RESOLUTION
    refine_tolerance: float = DEFAULT_REFINE_TOL
    seeds: int = DEFAULT_SEEDS

    def __post_init__(self):
        if not (self.radius > 0.0 and math.isfinite(self.radius)):
            raise DomainError(f"radius: must be positive, got {self.radius}")
        if self.coarse_resolution < 3:
            raise DomainError("coarse_resolution: must be >= 3")


@dataclass
class DepthReport:
    tau_m: float
    method: str
    min_trace: list = field(default_factory=list)  # (tau, z_argmin, R_min), sorted by tau
    iterations: int = 0
    tolerance: float = 0.0
    tol_R: float = 0.0
    boundary: bool = False
    monotone_violation: bool = False

    def to_dict(self) -> dict:
        return {
            "tau_m": self.tau_m,
            "method": self.method,
            "iterations": self.iterations,
            "tolerance": self.tolerance,
            "tol_R": self.tol_R,
            "boundary": self.boundary,
            "monotone_violation": self.monotone_violation,
            "min_trace": [{"tau": t, "x_min": z.real, "y_min": z.imag, "R_min": r}
                          for t, z, r in self.min_trace],
        }

    def write_trace_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["tau", "x_min", "y_min", "R_min"])
            for t, z, r in self.min_trace:
                w.writerow([f"{t:.17g}", f"{z.real:.17g}", f"{z.imag:.17g}", f"{r:.17g}"])


def characteristic_amplitude(spec) -> float:
    """Phase-space extent of a state, used to size the search box."""
    amp = 0.0
    for _, s in pure_components(spec):
        if isinstance(s, FockSuperposition):
            a = math.sqrt(s.n_max)
        elif isinstance(s, CoherentSuperposition):
            a = float(np.max(np.abs(s.alphas)))
        else:
            a = abs(s.alpha) + 2.0 * math.exp(s.r)
        amp = max(amp, a)
    return amp


def default_box(spec, tau_hi: float = 1.0, resolution: int = DEFAULT_RESOLUTION) -> SearchBox:
    return SearchBox(characteristic_amplitude(spec) + 4.0 * math.sqrt(tau_hi), resolution)


def _grid_seeds(values, k):
    finite = np.where(np.isfinite(values), values, np.inf)
    local = (finite == minimum_filter(finite, size=3, mode="nearest")) & np.isfinite(finite)
    idx = np.flatnonzero(local.ravel())
    idx = idx[np.argsort(finite.ravel()[idx], kind="stable")][:k]
    if idx.size < k:
        taken = set(idx.tolist())
        rest = [i for i in np.argsort(finite.ravel(), kind="stable") if i not in taken]
        idx = np.concatenate([idx, np.asarray(rest[: k - idx.size], dtype=int)])
    return idx


def zoom_windows(spec, tau: float, radius: float):
    """``(center, half_width)`` sub-windows resolving sqrt(tau)-scale structure.

    R varies on the scale sqrt(tau): around the origin for number-state parts
    (the Laguerre oscillations span ``|z|^2 <~ tau (4N + 10)``), around every
    coherent amplitude, and around every midpoint of two amplitudes where
    interference fringes sit.  Windows not much smaller than the search box
    are dropped.
    """
    out = []
    for _, s in pure_components(spec):
        if isinstance(s, FockSuperposition):
            out.append((0j, math.sqrt(tau * (4 * s.n_max + 10))))
        elif isinstance(s, CoherentSuperposition):
            a = [complex(v) for v, c in zip(s.alphas, s.coeffs) if c != 0]
            hw = 4.0 * math.sqrt(tau)
            out.extend((v, hw) for v in a)
            out.extend((0.5 * (a[i] + a[j]), hw)
                       for i in range(len(a)) for j in range(i + 1, len(a)))
        else:
            out.append((s.alpha, 4.0 * math.sqrt(tau) * math.exp(s.r)))
    uniq = []
    for c, hw in out:
        if hw < 0.5 * radius and not any(abs(c - c2) < 1e-12 and hw == hw2 for c2, hw2 in uniq):
            uniq.append((c, hw))
    return uniq


def global_min_r(spec, tau: float, box: SearchBox | None = None,
                 evaluator: REvaluator | None = None) -> tuple[complex, float]:
    """Global minimum of R(z; tau) over the phase plane.

    The search box and the sub-windows from :func:`zoom_windows` are scanned
    on coarse grids; the best ``box.seeds`` grid local minima are then
    refined with Nelder-Mead.  The returned value never exceeds the smallest
    grid sample.

    Raises
    ------
    SingularRegimeError
        If the state holds a squeezed component whose R is singular at tau.
    """
    ev = evaluator if evaluator is not None else REvaluator(spec)
    if not 0.0 < tau < 1.0:
        raise DomainError(f"tau: must lie in (0, 1), got {tau}")
    if ev.tau_singular and tau < ev.tau_singular + SINGULAR_MARGIN:
        raise SingularRegimeError(
            f"R-function is singular below tau={ev.tau_singular:.12g}",
            tau=tau, tau_singular=ev.tau_singular)
    box = box if box is not None else default_box(spec)
    res = box.coarse_resolution
    windows = [(0j, box.radius)] + zoom_windows(spec, tau, box.radius)

    best_z, best_r = 0j, math.inf
    candidates = []  # (value, x, y, grid step)
    u = np.linspace(-1.0, 1.0, res)
    U, V = np.meshgrid(u, u)
    for center, hw in windows:
        X = center.real + hw * U
        Y = center.imag + hw * V
        vals = ev.values(X.ravel(), Y.ravel(), tau).reshape(X.shape)
        flat = int(np.nanargmin(vals))
        if vals.ravel()[flat] < best_r:
            best_r = float(vals.ravel()[flat])
            best_z = complex(X.ravel()[flat], Y.ravel()[flat])
        step = 2.0 * hw / (res - 1)
        for i in _grid_seeds(vals, box.seeds):
            candidates.append((float(vals.ravel()[i]), X.ravel()[i], Y.ravel()[i], step))
    if not math.isfinite(best_r):
        return best_z, best_r

    def f(p):
        return float(ev.values(p[:1], p[1:], tau)[0])

    candidates.sort(key=lambda c: c[0])
    for f0, x, y, step in candidates[: box.seeds]:
        x0 = np.array([x, y])
        simplex = np.array([x0, x0 + [step, 0.0], x0 + [0.0, step]])
        opt = minimize(f, x0, method="Nelder-Mead",
                       options={"initial_simplex": simplex, "xatol": 1e-9 * max(1.0, step),
                                "fatol": box.refine_tolerance * max(1.0, abs(f0)),
                                "maxiter": 4000})
        if math.isfinite(opt.fun) and opt.fun < best_r:
            best_r = float(opt.fun)
            best_z = complex(opt.x[0], opt.x[1])
    return best_z, best_r


# --------------------------------------------------------------------------
# analytic paths
# --------------------------------------------------------------------------


def depth_gaussian(state: SqueezedState) -> DepthReport:
    """Exact depth ``tanh r / (1 + tanh r)`` of a Stoler state."""
    if state.r < 0.0:
        raise DomainError("r: must be >= 0")
    return DepthReport(squeezed_depth(state.r), ANALYTIC_GAUSSIAN)


def _as_gaussian(s):
    """Pure Gaussian component as a SqueezedState, else None."""
    if isinstance(s, SqueezedState):
        return s
    if isinstance(s, CoherentSuperposition) and s.coeffs.size == 1:
        return squeezed(complex(s.alphas[0]), 0.0)
    if isinstance(s, CoherentSuperposition) and np.count_nonzero(s.coeffs) == 1:
        return squeezed(complex(s.alphas[np.flatnonzero(s.coeffs)[0]]), 0.0)
    if isinstance(s, FockSuperposition) and s.n_max == 0:
        return squeezed(0.0, 0.0)
    return None


def depth_rules(spec) -> DepthReport | None:
    """Rule-based depth, or ``None`` when no rule applies.

    * ``<0|rho|0> = 0`` gives the maximal depth 1.
    * A mixture whose parts are all coherent or squeezed has the largest
      depth of its parts (the squeezed singularity cannot be compensated).
    """
    if vacuum_probability(spec) <= 1e-12:
        return DepthReport(1.0, RULE_ZERO_VACUUM)
    if isinstance(spec, Mixture):
        gauss = [_as_gaussian(s) for s in spec.components]
        if all(g is not None for g in gauss):
            return DepthReport(max(squeezed_depth(g.r) for g in gauss), RULE_MIXTURE_SQUEEZED)
    return None


# --------------------------------------------------------------------------
# numeric bisection
# --------------------------------------------------------------------------


def nonclassical_depth(spec, tol_tau: float = 1e-3, tol_R: float = 1e-9,
                       box: SearchBox | None = None, use_rules: bool = True) -> DepthReport:
    """Nonclassical depth of any spec.

    Parameters
    ----------
    tol_tau : float
        Width of the final tau bracket, in ``[1e-4, 1e-2]``.
    tol_R : float
        R is treated as nonnegative when its minimum is at least
        ``-tol_R / (pi tau)``.
    box : SearchBox, optional
        Search region; defaults to :func:`default_box`.
    use_rules : bool
        Apply the exact Gaussian and mixture rules before any numerics.

    Returns
    -------
    DepthReport
        ``boundary`` is set when R is still negative at ``1 - tol_tau`` (the
        depth is then reported as exactly 1).  ``monotone_violation`` is set
        when the audited predicate is not monotone in tau; the upper end of
        the coarsest consistent bracket is returned in that case.
    """
    if not 1e-4 <= tol_tau <= 1e-2:
        raise DomainError(f"tol_tau: must lie in [1e-4, 1e-2], got {tol_tau}")
    if use_rules:
        gauss = None if isinstance(spec, Mixture) else _as_gaussian(spec)
        if gauss is not None:
            rep = depth_gaussian(gauss)
            rep.tolerance = 0.0
            return rep
        rep = depth_rules(spec)
        if rep is not None:
            return rep

    ev = REvaluator(spec)
    box = box if box is not None else default_box(spec)
    trace = {}

    def holds(tau):
        if tau not in trace:
            z, r = global_min_r(spec, tau, box, ev)
            trace[tau] = (z, r)
        return trace[tau][1] >= -tol_R / (math.pi * tau)

    lo = tol_tau
    if ev.tau_singular:
        lo = max(lo, ev.tau_singular + 2.0 * SINGULAR_MARGIN)
    hi = 1.0 - tol_tau
    iterations = 0
    boundary = False
    if not holds(hi):
        tau_m, boundary = 1.0, True
    elif holds(lo):
        tau_m = ev.tau_singular if ev.tau_singular else 0.0
    else:
        a, b = lo, hi
        while b - a > tol_tau:
            mid = 0.5 * (a + b)
            iterations += 1
            if holds(mid):
                b = mid
            else:
                a = mid
        tau_m = 0.5 * (a + b)

    for t in np.linspace(lo, hi, AUDIT_POINTS + 2)[1:-1]:
        holds(float(t))
    taus = sorted(trace)
    flags = [holds(t) for t in taus]
    violation = any(flags[i] and not flags[j] for i in range(len(flags))
                    for j in range(i + 1, len(flags)))
    if violation:
        last_fail = max(t for t, ok in zip(taus, flags) if not ok)
        above = [t for t in taus if t > last_fail]
        tau_m = above[0] if above else 1.0
        boundary = not above

    return DepthReport(
        tau_m=float(tau_m), method=NUMERIC,
        min_trace=[(t, trace[t][0], trace[t][1]) for t in taus],
        iterations=iterations, tolerance=tol_tau, tol_R=tol_R,
        boundary=boundary, monotone_violation=violation)
