"""Central defaults for every tunable knob the package exposes.

One documented record; callers and CLI flags override fields per call.
Nothing in the package reads process environment variables.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class Defaults:
    # verdict thresholds
    tau: float = 1e-3                 # essential-positivity margin threshold
    # spectral windows
    window_frac: float = 0.5          # leading-block fraction for truncated-matrix claims
    gap_frac: float = 0.05            # cluster gap as a fraction of the window value range
    # quadrature
    n_radial: int = 96                # radial Gauss-Laguerre nodes, doubled on disagreement
    angular_factor: int = 4           # angular points per basis dimension
    refine_tol: float = 1e-7          # assembly / heat-transform refinement disagreement bound
    quad_disagree_tol: float = 1e-8   # radial-eigenvalue N vs 2N disagreement bound
    # Berezin series
    trunc_eps: float = 1e-10          # Poisson tail mass controlling truncation warnings
    series_eps: float = 1e-14         # tail mass for series summation inside the ratio objective
    scan_radii: tuple[float, ...] = (1.0, 2.0, 4.0, 8.0, 12.0, 16.0)
    # limit-operator sampling
    limitop_radii: tuple[float, ...] = (4.0, 8.0, 16.0)
    theta_count: int = 16
    # vanishing-oscillation probe
    vo_radii: tuple[float, ...] = (5.0, 10.0, 20.0, 40.0)
    vo_grid_density: int = 64
    vo_shell_angles: int = 8
    # ratio search
    search_dim: int = 256
    search_s_grid: tuple[float, ...] = (1.0, 2.0, 4.0, 8.0, 16.0)
    search_batch: int = 4             # proposals per annealing iteration (thread-count independent)
    nm_budget: int = 120              # objective evaluations per Nelder-Mead polish
    candidate_threshold: float = 0.1
    denominator_floor: float = 1e-14


DEFAULTS = Defaults()


def defaults_dict() -> dict:
    return asdict(DEFAULTS)
