"""Berezin and heat transforms by three independent routes.

A transform value can come from a truncated matrix (kernel-coefficient
quadratic form), from the Gaussian heat integral of the symbol, or from the
Poisson average of a radial eigenvalue sequence.  The three routes
cross-validate each other; every matrix/series value carries an explicit
truncation tail bound instead of a silent best effort.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammainc, gammaln, i0e, roots_legendre

from .config import DEFAULTS
from .errors import DiagnosticError
from .fock import (FockParams, PolarGrid, gaussian_mean, grid_points,
                   kernel_coeff_vector, polar_grid, truncation_dim)
from .toeplitz import ComplexMatrix, EigenSequence, operator_norm
from . import symbols as sym

__all__ = [
    "BerezinValue",
    "berezin_from_matrix",
    "heat_transform_symbol",
    "heat_transform_measure",
    "radial_berezin_series",
    "poisson_weights",
]


@dataclass(frozen=True)
class BerezinValue:
    """Transform value with a truncation tail bound and a truncation warning."""

    value: complex
    tail_bound: float
    truncated: bool


def poisson_weights(x: float, count: int) -> np.ndarray:
    """Poisson(x) masses for m = 0 .. count-1, assembled in log space."""
    if x == 0.0:
        out = np.zeros(count)
        out[0] = 1.0
        return out
    m = np.arange(count)
    return np.exp(m * math.log(x) - x - gammaln(m + 1.0))


def berezin_from_matrix(A: ComplexMatrix, z: complex, p: FockParams | None = None,
                        op_norm: float | None = None,
                        trunc_eps: float = DEFAULTS.trunc_eps) -> BerezinValue:
    """Quadratic form <A c(z), c(z)> in normalized-kernel coefficients.

    The tail bound covers the basis modes the truncation cannot see:
    |true - truncated| <= ||A|| (2 sqrt(Q) + Q) with Q the Poisson tail mass
    of |z|^2/t beyond the matrix dimension.
    """
    t = A.t if p is None else p.t
    params = FockParams(t=t, dim=A.dim)
    c = kernel_coeff_vector(complex(z), params)
    value = complex(np.vdot(c, A.entries @ c))
    tail = float(gammainc(A.dim, abs(z) ** 2 / t))
    norm = operator_norm(A) if op_norm is None else op_norm
    bound = norm * (2.0 * math.sqrt(tail) + tail)
    truncated = truncation_dim(abs(z), t, trunc_eps) > A.dim
    return BerezinValue(value=value, tail_bound=bound, truncated=truncated)


# ---------------------------------------------------------------------------
# heat transform of a function symbol

def _legendre_panel_sum(fn, a: float, b: float, n: int, max_width: float) -> float:
    """Composite Gauss-Legendre over [a, b] in panels of bounded width."""
    if b <= a:
        return 0.0
    x0, w0 = roots_legendre(n)
    panels = max(1, int(math.ceil((b - a) / max_width)))
    edges = np.linspace(a, b, panels + 1)
    total = 0.0
    for lo, hi in zip(edges, edges[1:]):
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        total += half * float(np.sum(w0 * fn(mid + half * x0)))
    return total


def _heat_radial(profile, s: float, t: float, n_leg: int) -> float:
    """1D heat integral of a radial profile through the Bessel kernel:
    (2/t) * int f(r) e^{-(s-r)^2/t} i0e(2 s r / t) r dr, split at the
    profile's breakpoints and restricted to where the kernel has mass."""
    margin = 16.0 * math.sqrt(t)
    lo = max(0.0, s - margin)
    hi = s + margin
    cuts = sorted({lo, hi, s}
                  | {float(b) for b in sym.profile_breakpoints(profile) if lo < b < hi})

    def integrand(r):
        vals = sym.profile_value(profile, r)
        return (2.0 / t) * vals * np.exp(-((s - r) ** 2) / t) * i0e(2.0 * s * r / t) * r

    total = 0.0
    for a, b in zip(cuts, cuts[1:]):
        total += _legendre_panel_sum(integrand, a, b, n_leg, max_width=2.0 * math.sqrt(t))
    return total


def _heat_general(f, z: complex, p: FockParams, grid: PolarGrid) -> complex:
    pts = complex(z) + grid_points(grid, p)
    return complex(gaussian_mean(np.asarray(sym.evaluate(f, pts, p), dtype=complex), grid))


def heat_transform_symbol(f, z: complex, p: FockParams,
                          grid: PolarGrid | None = None,
                          refine_tol: float = DEFAULTS.refine_tol):
    """Gaussian average of the symbol around z: (1/pi t) int f(w) e^{-|z-w|^2/t} dw.

    Radial symbols reduce to an exact-breakpoint 1D Bessel-kernel integral;
    everything else is integrated on a polar grid centered at z.  Both paths
    are computed at two resolutions and must agree within refine_tol.
    """
    if isinstance(f, sym.AtomicMeasure):
        raise TypeError("use heat_transform_measure for atomic measures")
    if isinstance(f, sym.Translated):
        return heat_transform_symbol(f.base, complex(z) - f.shift, p, grid, refine_tol)
    if isinstance(f, sym.Radial):
        s = abs(complex(z))
        coarse = _heat_radial(f.profile, s, p.t, 32)
        fine = _heat_radial(f.profile, s, p.t, 64)
        if abs(coarse - fine) > refine_tol:
            raise DiagnosticError(
                f"radial heat integral moved by {abs(coarse - fine):.3e} on refinement")
        return fine
    if grid is None:
        grid = polar_grid(DEFAULTS.n_radial, 256)
    coarse = _heat_general(f, z, p, grid)
    finer_grid = polar_grid(2 * grid.radial.order, 2 * grid.n_angular)
    fine = _heat_general(f, z, p, finer_grid)
    if abs(coarse - fine) > refine_tol:
        raise DiagnosticError(
            f"heat integral moved by {abs(coarse - fine):.3e} on grid refinement")
    return fine


def heat_transform_measure(m: sym.SignedAtomicMeasure, z: complex,
                           p: FockParams) -> float:
    """Exact finite sum (1/pi t) sum_i w_i e^{-|z - p_i|^2 / t}."""
    z = complex(z)
    total = 0.0
    for pos, weight in m.atoms:
        total += weight * math.exp(-abs(z - pos) ** 2 / p.t)
    return total / (math.pi * p.t)


def radial_berezin_series(e: EigenSequence, s: float,
                          trunc_eps: float = DEFAULTS.trunc_eps) -> BerezinValue:
    """Poisson average of a radial eigenvalue sequence at radius s.

    B(s) = e^{-s^2/t} sum_m lambda_m (s^2/t)^m / m!, truncated at the stored
    dimension; the reported tail bound is sup|lambda| times the unsummed
    Poisson mass.
    """
    t = e.params.t
    x = s * s / t
    weights = poisson_weights(x, len(e.values))
    value = float(np.sum(e.values * weights))
    tail_mass = float(gammainc(len(e.values), x)) if x > 0 else 0.0
    bound = float(np.max(np.abs(e.values))) * tail_mass
    truncated = truncation_dim(s, t, trunc_eps) > len(e.values)
    return BerezinValue(value=value, tail_bound=bound, truncated=truncated)
