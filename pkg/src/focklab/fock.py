"""Core primitives of the Gaussian-weighted space of entire functions on C.

Houses the weight parameter t, the orthonormal monomial basis through its
expansion coefficients, reproducing kernels, the generalized Gauss-Laguerre
engine used for all radial integrals, and the polar grids used for planar
Gaussian integrals.

Conventions: the probability weight is dmu_t(z) = (1/(pi t)) e^{-|z|^2/t} dz,
the reproducing kernel K_z(w) = e^{w conj(z)/t}, and the normalized kernel
k_z = K_z e^{-|z|^2/(2t)}.  After the substitution u = r^2/t a planar radial
integral becomes a Laguerre-weight integral, which is why everything below
is parametrized in u.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import gammainc, gammaln

from .errors import DiagnosticError

__all__ = [
    "FockParams",
    "QuadratureRule",
    "PolarGrid",
    "gauss_laguerre",
    "laguerre_log_rule",
    "kernel",
    "normalized_kernel_coeff",
    "kernel_coeff_vector",
    "polar_grid",
    "default_grid",
    "grid_points",
    "gaussian_mean",
    "truncation_dim",
]


@dataclass(frozen=True)
class FockParams:
    """Gaussian weight parameter t > 0 and basis truncation dimension M >= 1."""

    t: float
    dim: int

    def __post_init__(self):
        if not (self.t > 0):
            raise ValueError(f"t must be positive, got {self.t}")
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Nodes/weights for the weight u^alpha e^{-u} on [0, inf).

    ``weights`` sum to Gamma(alpha+1); ``log_weights`` are always finite and
    are what large-alpha consumers should use (weights overflow once
    Gamma(alpha+1) does).
    """

    alpha: float
    nodes: np.ndarray
    weights: np.ndarray
    log_weights: np.ndarray
    order: int

    def to_json_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "nodes": [float(x) for x in self.nodes],
            "weights": [float(w) for w in self.weights],
        }

    @staticmethod
    def from_json_dict(data: dict) -> "QuadratureRule":
        nodes = np.asarray(data["nodes"], dtype=float)
        weights = np.asarray(data["weights"], dtype=float)
        return QuadratureRule(
            alpha=float(data["alpha"]),
            nodes=nodes,
            weights=weights,
            log_weights=np.log(weights),
            order=len(nodes),
        )


_rule_cache: dict[tuple[float, int], tuple[np.ndarray, np.ndarray]] = {}


def _orthonormal_recurrence(alpha: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    k = np.arange(n, dtype=float)
    diag = 2.0 * k + alpha + 1.0
    off = np.sqrt((k + 1.0) * (k + 1.0 + alpha))  # a_0 .. a_{n-1}
    return diag, off


def _laguerre_nodes_logweights(alpha: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and normalized log-weights (weights sum to 1) for u^alpha e^{-u}.

    Golub-Welsch eigenvalues seed a Newton polish on the degree-n orthonormal
    polynomial; weights come from the Christoffel function 1/sum_k p_k(x)^2,
    evaluated with running rescaling so nothing overflows for any alpha or n.
    """
    key = (float(alpha), int(n))
    cached = _rule_cache.get(key)
    if cached is not None:
        return cached

    b, a = _orthonormal_recurrence(alpha, n)
    try:
        x = eigh_tridiagonal(b, a[:-1], eigvals_only=True) if n > 1 else np.array([b[0]])
    except np.linalg.LinAlgError as exc:
        raise DiagnosticError(
            f"tridiagonal eigensolver failed for alpha={alpha}, n={n}"
        ) from exc

    # Newton polish of the eigenvalue seeds on p_n (monic-free scaled recurrence,
    # p_0 = 1), tracking both value and derivative with overflow rescaling.
    for _ in range(3):
        p_prev = np.zeros_like(x)
        p = np.ones_like(x)
        d_prev = np.zeros_like(x)
        d = np.zeros_like(x)
        for k in range(n):
            am1 = a[k - 1] if k > 0 else 0.0
            p_new = ((x - b[k]) * p - am1 * p_prev) / a[k]
            d_new = ((x - b[k]) * d + p - am1 * d_prev) / a[k]
            p_prev, p, d_prev, d = p, p_new, d, d_new
            mag = np.abs(p)
            big = mag > 1e100
            if big.any():
                scale = np.where(big, mag, 1.0)
                p_prev = p_prev / scale
                p = p / scale
                d_prev = d_prev / scale
                d = d / scale
        step = p / d
        x = x - step
        if np.max(np.abs(step) / np.maximum(x, 1e-300)) < 1e-15:
            break
    if np.any(np.diff(x) <= 0) or np.any(x <= 0):
        raise DiagnosticError(f"quadrature nodes failed to separate for alpha={alpha}, n={n}")

    p_prev = np.zeros_like(x)
    p = np.ones_like(x)
    ssum = np.ones_like(x)
    log_scale = np.zeros_like(x)
    for k in range(n - 1):
        am1 = a[k - 1] if k > 0 else 0.0
        p_new = ((x - b[k]) * p - am1 * p_prev) / a[k]
        p_prev, p = p, p_new
        mag = np.abs(p)
        big = mag > 1e100
        if big.any():
            scale = np.where(big, mag, 1.0)
            p_prev = p_prev / scale
            p = p / scale
            ssum = ssum / scale**2
            log_scale = log_scale + 2.0 * np.log(scale)
        ssum = ssum + p * p
    log_weights = -(np.log(ssum) + log_scale)

    x.setflags(write=False)
    log_weights.setflags(write=False)
    _rule_cache[key] = (x, log_weights)
    return x, log_weights


def gauss_laguerre(alpha: float, n: int) -> QuadratureRule:
    """Generalized Gauss-Laguerre rule, exact on polynomials of degree <= 2n-1."""
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    if n < 1:
        raise ValueError(f"order must be >= 1, got {n}")
    nodes, log_norm = _laguerre_nodes_logweights(alpha, n)
    log_weights = log_norm + gammaln(alpha + 1.0)
    weights = np.exp(log_weights)
    weights.setflags(write=False)
    lw = np.asarray(log_weights)
    lw.setflags(write=False)
    return QuadratureRule(alpha=float(alpha), nodes=nodes, weights=weights,
                          log_weights=lw, order=int(n))


def laguerre_log_rule(alpha: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and log-weights normalized so the weights sum to 1.

    Safe for arbitrarily large alpha; this is the per-mode rule behind radial
    operator diagonals.
    """
    return _laguerre_nodes_logweights(float(alpha), int(n))


def kernel(z: complex, w, p: FockParams):
    """Reproducing kernel K_z(w) = exp(w * conj(z) / t); w may be an array."""
    return np.exp(w * np.conj(z) / p.t)


def normalized_kernel_coeff(m: int, z: complex, p: FockParams) -> complex:
    """Coefficient <k_z, e_m> = e^{-|z|^2/(2t)} conj(z)^m / sqrt(t^m m!).

    Magnitude assembled in log space, so m up to 1e4 is safe.
    """
    if m < 0:
        raise ValueError("m must be >= 0")
    az = abs(z)
    if az == 0.0:
        return 1.0 + 0.0j if m == 0 else 0.0 + 0.0j
    log_mag = (-az * az / (2.0 * p.t)
               + m * math.log(az)
               - 0.5 * (m * math.log(p.t) + math.lgamma(m + 1)))
    phase = -m * math.atan2(z.imag, z.real)
    return math.exp(log_mag) * complex(math.cos(phase), math.sin(phase))


def kernel_coeff_vector(z: complex, p: FockParams, dim: int | None = None) -> np.ndarray:
    """Vector (c_0(z), ..., c_{M-1}(z)) of normalized-kernel coefficients."""
    M = p.dim if dim is None else dim
    z = complex(z)
    az = abs(z)
    if az == 0.0:
        out = np.zeros(M, dtype=complex)
        out[0] = 1.0
        return out
    m = np.arange(M)
    log_mag = (-az * az / (2.0 * p.t)
               + m * math.log(az)
               - 0.5 * (m * math.log(p.t) + gammaln(m + 1.0)))
    return np.exp(log_mag) * np.exp(-1j * m * np.angle(z))


@dataclass(frozen=True, eq=False)
class PolarGrid:
    """Radial Laguerre rule (in u = r^2/t) times K equispaced angles."""

    radial: QuadratureRule
    angles: np.ndarray

    def __post_init__(self):
        K = len(self.angles)
        if K < 4 or K % 2 != 0:
            raise ValueError(f"angular point count must be even and >= 4, got {K}")

    @property
    def n_angular(self) -> int:
        return len(self.angles)


def polar_grid(n_radial: int, n_angular: int) -> PolarGrid:
    if n_angular % 2:
        n_angular += 1
    angles = 2.0 * np.pi * np.arange(n_angular) / n_angular
    angles.setflags(write=False)
    return PolarGrid(radial=gauss_laguerre(0.0, n_radial), angles=angles)


def default_grid(p: FockParams, n_radial: int | None = None,
                 n_angular: int | None = None) -> PolarGrid:
    """Grid adequate for assembling a dim x dim matrix at parameters p.

    Radial order covers monomials up to degree 2(dim-1) in u; angular count
    keeps basis modes alias-free with margin.
    """
    if n_radial is None:
        n_radial = max(96, p.dim + 16)
    if n_angular is None:
        n_angular = max(128, 4 * p.dim)
    return polar_grid(n_radial, n_angular)


def composite_radial_rule(breakpoints: tuple[float, ...], n: int) -> QuadratureRule:
    """Rule for weight e^{-u} on [0, inf) that is exact across the given cuts.

    Gauss-Legendre panels (with the e^{-u} factor folded into the weights)
    cover [0, max cut]; a shifted Laguerre rule covers the tail.  Polynomial
    exactness up to degree 2n-1 survives because every panel carries n nodes.
    """
    from scipy.special import roots_legendre

    cuts = sorted({0.0} | {float(b) for b in breakpoints if b > 0})
    x0, w0 = roots_legendre(n)
    nodes: list[np.ndarray] = []
    log_weights: list[np.ndarray] = []
    for lo, hi in zip(cuts, cuts[1:]):
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        u = mid + half * x0
        nodes.append(u)
        log_weights.append(np.log(half * w0) - u)
    tail_rule = gauss_laguerre(0.0, n)
    nodes.append(cuts[-1] + tail_rule.nodes)
    log_weights.append(tail_rule.log_weights - cuts[-1])
    all_nodes = np.concatenate(nodes)
    all_logw = np.concatenate(log_weights)
    order = np.argsort(all_nodes)
    all_nodes = all_nodes[order]
    all_logw = all_logw[order]
    weights = np.exp(all_logw)
    for arr in (all_nodes, all_logw, weights):
        arr.setflags(write=False)
    return QuadratureRule(alpha=0.0, nodes=all_nodes, weights=weights,
                          log_weights=all_logw, order=int(n))


def grid_points(grid: PolarGrid, p: FockParams) -> np.ndarray:
    """Complex sample points, shape (n_radial, n_angular)."""
    r = np.sqrt(p.t * grid.radial.nodes)
    return r[:, None] * np.exp(1j * grid.angles)[None, :]


def gaussian_mean(values: np.ndarray, grid: PolarGrid):
    """Approximate integral of f against dmu_t from samples on grid_points.

    Spectrally accurate for smooth integrands: trapezoid in the angle,
    Gauss-Laguerre in u.
    """
    weights = np.exp(grid.radial.log_weights)
    return np.sum(weights * np.mean(values, axis=1))


def truncation_dim(s: float, t: float, eps: float) -> int:
    """Smallest M whose Poisson(s^2/t) tail mass beyond M is below eps.

    Controls the basis-truncation error of Berezin values at radius s.
    """
    if s < 0:
        raise ValueError("s must be >= 0")
    if not (0.0 < eps < 1.0):
        raise ValueError("eps must lie in (0, 1)")
    x = s * s / t
    if x == 0.0:
        return 1
    M = max(1, int(x))
    while gammainc(M, x) >= eps:
        M += 1
    return M
