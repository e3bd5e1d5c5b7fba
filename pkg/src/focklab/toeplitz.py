"""Truncated Toeplitz matrices A_{jm} = <T e_m, e_j> in the monomial basis.

Radial symbols diagonalize exactly; unimodular phase symbols have closed-form
entries; atomic measures give finite-rank sums; everything else goes through
polar quadrature with an angular-refinement self-check.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import gammainc, gammaincc, gammaln

from .config import DEFAULTS
from .errors import DiagnosticError
from .fock import (FockParams, PolarGrid, composite_radial_rule, default_grid,
                   grid_points, kernel_coeff_vector, laguerre_log_rule)
from . import symbols as sym

__all__ = [
    "ComplexMatrix",
    "EigenSequence",
    "complex_matrix",
    "radial_eigenvalues",
    "radial_eigenvalues_quadrature",
    "assemble_general",
    "assemble_weyl_phase",
    "assemble_measure",
    "assemble",
    "matrix_to_json_dict",
    "matrix_from_json_dict",
    "save_matrix",
    "load_matrix",
    "save_eigen_csv",
    "load_eigen_csv",
    "operator_norm",
]

HERMITIAN_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ComplexMatrix:
    """Dense truncation of an operator; hermitian flag is measured, not assumed."""

    dim: int
    t: float
    entries: np.ndarray
    hermitian: bool


@dataclass(frozen=True, eq=False)
class EigenSequence:
    """Diagonal (lambda_0, ..., lambda_{M-1}) of a radial Toeplitz operator."""

    values: np.ndarray
    params: FockParams
    profile: str


def complex_matrix(entries: np.ndarray, t: float) -> ComplexMatrix:
    entries = np.ascontiguousarray(entries, dtype=complex)
    if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {entries.shape}")
    if not np.all(np.isfinite(entries.view(float))):
        raise ValueError("matrix entries must be finite")
    herm = bool(np.max(np.abs(entries - entries.conj().T)) < HERMITIAN_TOL)
    entries.setflags(write=False)
    return ComplexMatrix(dim=entries.shape[0], t=float(t), entries=entries, hermitian=herm)


def operator_norm(A: ComplexMatrix) -> float:
    return float(np.linalg.norm(A.entries, 2))


# ---------------------------------------------------------------------------
# radial diagonal

def _gamma_mean_pieces(m: np.ndarray, pieces: list[tuple[float, float, float, float]],
                       tail_from: float, tail_value: float, t: float) -> np.ndarray:
    """Average of a piecewise-linear radial function against Gamma(m+1) in u.

    Each piece is (r_lo, r_hi, c, d) meaning f(r) = c + d*r on [r_lo, r_hi);
    the linear term integrates through the half-integer incomplete gamma.
    """
    out = np.zeros(len(m))
    half_ratio = np.exp(gammaln(m + 1.5) - gammaln(m + 1.0))
    for r_lo, r_hi, c, d in pieces:
        a, b = r_lo * r_lo / t, r_hi * r_hi / t
        if c != 0.0:
            out += c * (gammainc(m + 1.0, b) - gammainc(m + 1.0, a))
        if d != 0.0:
            out += d * math.sqrt(t) * half_ratio * (gammainc(m + 1.5, b) - gammainc(m + 1.5, a))
    if tail_value != 0.0:
        out += tail_value * gammaincc(m + 1.0, tail_from * tail_from / t)
    return out


def _profile_linear_pieces(profile) -> tuple[list[tuple[float, float, float, float]], float, float]:
    """Decompose indicator/piecewise/sampled profiles into exact linear pieces."""
    if isinstance(profile, sym.Indicator):
        return [(0.0, profile.radius, 1.0, 0.0)], profile.radius, 0.0
    if isinstance(profile, sym.PiecewiseConstant):
        pieces = [(a, b, v, 0.0) for a, b, v in
                  zip(profile.edges, profile.edges[1:], profile.values)]
        return pieces, profile.edges[-1], profile.tail
    if isinstance(profile, sym.Sampled):
        radii, values = profile.radii, profile.values
        pieces = [(0.0, radii[0], values[0], 0.0)] if radii[0] > 0 else []
        for (r0, v0), (r1, v1) in zip(zip(radii, values), zip(radii[1:], values[1:])):
            slope = (v1 - v0) / (r1 - r0)
            pieces.append((r0, r1, v0 - slope * r0, slope))
        return pieces, radii[-1], values[-1]
    raise TypeError(f"no exact piecewise form for {profile!r}")


def radial_eigenvalues_quadrature(profile, p: FockParams,
                                  n_quad: int = DEFAULTS.n_radial,
                                  tol: float = DEFAULTS.quad_disagree_tol) -> np.ndarray:
    """Diagonal via per-mode Gauss-Laguerre averages, with an N vs 2N check.

    lambda_m is the mean of f(sqrt(t u)) under the normalized Gamma(m+1)
    weight; the rule of order n is compared against 2n and doubled once more
    on disagreement.
    """

    def pass_once(n: int) -> np.ndarray:
        out = np.empty(p.dim)
        for m in range(p.dim):
            nodes, logw = laguerre_log_rule(float(m), n)
            vals = sym.profile_value(profile, np.sqrt(p.t * nodes))
            out[m] = float(np.sum(np.exp(logw) * vals))
        return out

    coarse, fine = pass_once(n_quad), pass_once(2 * n_quad)
    if np.max(np.abs(coarse - fine)) > tol:
        finer = pass_once(4 * n_quad)
        if np.max(np.abs(fine - finer)) > tol:
            raise DiagnosticError(
                f"radial quadrature did not settle below {tol} for {profile!r}")
        return finer
    return fine


def radial_eigenvalues(profile, p: FockParams,
                       n_quad: int = DEFAULTS.n_radial) -> EigenSequence:
    """Diagonal of the radial Toeplitz operator: lambda_m averages the profile
    at radius sqrt(t u) against the normalized Gamma(m+1) density in u.

    Profiles with jump or kink structure (indicator, ring, sampled) integrate
    exactly through regularized incomplete gammas; smooth profiles go through
    the per-mode quadrature.
    """
    m = np.arange(p.dim, dtype=float)
    if isinstance(profile, sym.Constant):
        values = np.full(p.dim, float(profile.value))
    elif isinstance(profile, sym.Scaled):
        values = profile.factor * radial_eigenvalues(profile.base, p, n_quad).values
    elif isinstance(profile, (sym.Indicator, sym.PiecewiseConstant, sym.Sampled)):
        pieces, tail_from, tail_value = _profile_linear_pieces(profile)
        values = _gamma_mean_pieces(m, pieces, tail_from, tail_value, p.t)
    else:
        values = radial_eigenvalues_quadrature(profile, p, n_quad)
    values = np.asarray(values, dtype=float)
    values.setflags(write=False)
    return EigenSequence(values=values, params=p,
                         profile=sym.format_symbol(sym.Radial(profile)))


# ---------------------------------------------------------------------------
# general assembly by polar quadrature

def _assemble_on_grid(f: Callable[[np.ndarray], np.ndarray], p: FockParams,
                      grid: PolarGrid) -> np.ndarray:
    u = grid.radial.nodes
    logw = grid.radial.log_weights
    vals = np.asarray(f(grid_points(grid, p)), dtype=complex)
    fhat = np.fft.ifft(vals, axis=1)  # fhat[n, d] = (1/K) sum_k vals e^{+i d theta_k}
    M = p.dim
    m = np.arange(M)
    # S[n, m] = sqrt(w_n) * u_n^{m/2} / sqrt(m!); pairs S[n,j] S[n,m] rebuild
    # the full radial weight without overflow at any node.
    S = np.exp(0.5 * (m[None, :] * np.log(u)[:, None]
                      - gammaln(m + 1.0)[None, :] + logw[:, None]))
    K = grid.n_angular
    D = (m[None, :] - m[:, None]) % K
    A = np.zeros((M, M), dtype=complex)
    for n in range(len(u)):
        A += np.outer(S[n], S[n]) * fhat[n][D]
    return A


def assemble_general(f, p: FockParams, grid: PolarGrid | None = None,
                     refine_check: bool = True,
                     refine_tol: float = DEFAULTS.refine_tol) -> ComplexMatrix:
    """Assemble <f e_m, e_j> for an evaluable symbol by polar quadrature.

    With refine_check the angular count is doubled and the two assemblies
    compared; disagreement beyond refine_tol means the grid aliased the
    symbol's angular content, which is an error rather than a warning.
    """
    if isinstance(f, sym.AtomicMeasure):
        raise TypeError("use assemble_measure for atomic measures")
    if grid is None:
        grid = default_grid(p)
        if isinstance(f, sym.Radial):
            # jumps and kinks of a radial profile sit on origin-centered
            # circles, so a composite radial rule restores exactness
            cuts = tuple(b * b / p.t for b in sym.profile_breakpoints(f.profile))
            if cuts:
                grid = PolarGrid(radial=composite_radial_rule(cuts, grid.radial.order),
                                 angles=grid.angles)
    evaluator = lambda pts: sym.evaluate(f, pts, p)

    def with_angles(count: int) -> np.ndarray:
        doubled = PolarGrid(radial=grid.radial,
                            angles=2.0 * np.pi * np.arange(count) / count)
        return _assemble_on_grid(evaluator, p, doubled)

    A = _assemble_on_grid(evaluator, p, grid)
    if refine_check:
        K = grid.n_angular
        A2 = with_angles(2 * K)
        if float(np.max(np.abs(A - A2))) > refine_tol:
            A4 = with_angles(4 * K)
            disagreement = float(np.max(np.abs(A2 - A4)))
            if disagreement > refine_tol:
                raise DiagnosticError(
                    f"angular refinement moved entries by {disagreement:.3e} "
                    f"(> {refine_tol:.1e}); increase the angular count")
            A2 = A4
        A = A2
    return complex_matrix(A, p.t)


# ---------------------------------------------------------------------------
# unimodular phase symbols: exact entries

def _weyl_scaled_table(x: float, r: float, M: int) -> np.ndarray:
    """G[m, d] = e^{-x/2} sqrt(m!/(m+d)!) r^d L_m^{(d)}(x) for 0 <= m, d < M.

    Evaluated by the degree recurrence of the associated Laguerre polynomials
    rewritten in this pre-scaled form, whose values stay O(1); this avoids the
    catastrophic cancellation of the raw binomial sum for the same entries.
    """
    d = np.arange(M, dtype=float)
    G = np.zeros((M, M))
    row_prev = np.zeros(M)
    row = np.exp(-0.5 * x + d * math.log(r) - 0.5 * gammaln(d + 1.0)) if r > 0 \
        else np.where(d == 0, math.exp(-0.5 * x), 0.0)
    G[0] = row
    for m in range(M - 1):
        fac1 = np.sqrt((m + 1.0) / (m + 1.0 + d))
        fac2 = np.sqrt((m + 1.0) * m / ((m + 1.0 + d) * np.maximum(m + d, 1.0)))
        row_next = ((2 * m + d + 1.0 - x) * row * fac1
                    - (m + d) * row_prev * fac2) / (m + 1.0)
        row_prev, row = row, row_next
        G[m + 1] = row
    return G


def assemble_weyl_phase(z: complex, p: FockParams, unitary: bool = False) -> ComplexMatrix:
    """Exact matrix of the Toeplitz operator with symbol e^{2i Im(w conj z)/t}.

    That operator is e^{-|z|^2/(2t)} times the unitary weighted shift W_z;
    ``unitary=True`` drops the damping factor and returns the W_z truncation.
    Entries are closed-form Laguerre sums; the stable scaled recurrence keeps
    them accurate through dimensions of several hundred.
    """
    M = p.dim
    t = p.t
    z = complex(z)
    rho = abs(z)
    if rho == 0.0:
        return complex_matrix(np.eye(M, dtype=complex), t)
    phi = math.atan2(z.imag, z.real)
    x = rho * rho / t
    G = _weyl_scaled_table(x, rho / math.sqrt(t), M)

    d = np.arange(M)
    lower_phase = np.exp(-1j * d * phi)                      # columns: j = m + d
    upper_phase = np.where(d % 2 == 0, 1.0, -1.0) * np.exp(1j * d * phi)
    A = np.zeros((M, M), dtype=complex)
    for m in range(M):
        span = M - m
        A[m:, m] = G[m, :span] * lower_phase[:span]
        A[m, m + 1:] = G[m, 1:span] * upper_phase[1:span]
    if not unitary:
        A *= math.exp(-0.5 * x)
    return complex_matrix(A, t)


# ---------------------------------------------------------------------------
# atomic measures: finite-rank exact assembly

def assemble_measure(m: sym.SignedAtomicMeasure, p: FockParams) -> ComplexMatrix:
    """Exact rank-<=#atoms matrix: each atom contributes a kernel projector."""
    A = np.zeros((p.dim, p.dim), dtype=complex)
    for pos, weight in m.atoms:
        c = kernel_coeff_vector(pos, p)
        A += (weight / (math.pi * p.t)) * np.outer(c, c.conj())
    return complex_matrix(A, p.t)


def assemble(s: sym.Symbol, p: FockParams, grid: PolarGrid | None = None) -> ComplexMatrix:
    """Route a symbol to its best assembler.

    Radial symbols bypass planar quadrature entirely: their truncation is the
    exact diagonal of the eigenvalue sequence.
    """
    if isinstance(s, sym.Radial):
        values = radial_eigenvalues(s.profile, p).values
        return complex_matrix(np.diag(values.astype(complex)), p.t)
    if isinstance(s, sym.WeylPhase):
        return assemble_weyl_phase(s.z, p)
    if isinstance(s, sym.AtomicMeasure):
        return assemble_measure(s.measure, p)
    return assemble_general(s, p, grid)


# ---------------------------------------------------------------------------
# wire formats

def matrix_to_json_dict(A: ComplexMatrix) -> dict:
    flat = A.entries.reshape(-1)
    return {
        "dim": A.dim,
        "t": A.t,
        "hermitian": A.hermitian,
        "entries": [[float(v.real), float(v.imag)] for v in flat],
    }


def matrix_from_json_dict(data: dict) -> ComplexMatrix:
    dim = int(data["dim"])
    flat = np.array([complex(re, im) for re, im in data["entries"]], dtype=complex)
    if len(flat) != dim * dim:
        raise ValueError(f"expected {dim * dim} entries, got {len(flat)}")
    return complex_matrix(flat.reshape(dim, dim), float(data["t"]))


def save_matrix(A: ComplexMatrix, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(matrix_to_json_dict(A), handle)
        handle.write("\n")


def load_matrix(path) -> ComplexMatrix:
    with open(path, encoding="utf-8") as handle:
        return matrix_from_json_dict(json.load(handle))


def save_eigen_csv(e: EigenSequence, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["m", "lambda"])
        for m, lam in enumerate(e.values):
            writer.writerow([m, repr(float(lam))])


def load_eigen_csv(path, params: FockParams | None = None,
                   profile: str = "") -> EigenSequence:
    values = []
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        if header[:2] != ["m", "lambda"]:
            raise ValueError(f"unexpected eigenvalue CSV header {header!r}")
        for row in reader:
            values.append(float(row[1]))
    arr = np.asarray(values, dtype=float)
    if params is None:
        params = FockParams(t=2.0, dim=len(arr))
    arr.setflags(write=False)
    return EigenSequence(values=arr, params=params, profile=profile)
