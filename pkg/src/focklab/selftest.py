"""Quick invariant suite behind the ``selftest`` subcommand.

One line per check; exit 0 when everything holds, 2 otherwise.
"""

from __future__ import annotations

import math
import sys

import numpy as np

from .berezin import heat_transform_symbol, radial_berezin_series
from .fock import (FockParams, gauss_laguerre, gaussian_mean, grid_points,
                   kernel, kernel_coeff_vector, polar_grid)
from .spectra import leading_singular_values
from .toeplitz import assemble_weyl_phase, radial_eigenvalues
from . import symbols as sym


def _checks():
    p = FockParams(t=2.0, dim=40)

    def quadrature_exactness():
        rule = gauss_laguerre(3.0, 8)
        degrees = np.arange(2 * 8)
        exact = np.array([math.gamma(3.0 + d + 1) for d in degrees])
        approx = np.array([np.sum(rule.weights * rule.nodes ** d) for d in degrees])
        return np.max(np.abs(approx - exact) / exact) < 1e-9

    def reproducing_property():
        grid = polar_grid(64, 128)
        z = 0.7 + 0.4j
        pts = grid_points(grid, p)
        g = lambda w: 1.0 + 2.0 * w + 0.5 * w ** 3
        val = gaussian_mean(g(pts) * np.conj(kernel(z, pts, p)), grid)
        return abs(val - g(z)) < 1e-10

    def kernel_normalization():
        z = 1.0 + 1.5j
        c = kernel_coeff_vector(z, p)
        return abs(np.sum(np.abs(c) ** 2) - 1.0) < 1e-10

    def weyl_unitary_block():
        pw = FockParams(t=2.0, dim=40)
        U = assemble_weyl_phase(1.0 + 0.0j, pw, unitary=True)
        block = U.entries[:20, :20]
        gram_dev = np.max(np.abs(
            (U.entries.conj().T @ U.entries)[:20, :20] - np.eye(20)))
        svals = leading_singular_values(assemble_weyl_phase(1.0, pw))
        return gram_dev < 1e-6 and np.max(np.abs(svals - math.exp(-0.25))) < 1e-3

    def cross_method_berezin():
        profile = sym.Rational(5.0, 1.0)
        eigen = radial_eigenvalues(profile, FockParams(t=2.0, dim=48))
        series = radial_berezin_series(eigen, 1.0).value
        heat = heat_transform_symbol(sym.Radial(profile), 1.0, p)
        return abs(series - heat) < 1e-6

    def hahn_jordan_recombines():
        m = sym.SignedAtomicMeasure(((0j, 1.0), (1 + 0j, -2.0), (2j, 0.5)))
        pos, neg = sym.hahn_jordan(m)
        table = {a: w for a, w in pos.atoms}
        table.update({a: -w for a, w in neg.atoms})
        return all(abs(table[a] - w) == 0.0 for a, w in m.atoms)

    def parser_round_trip():
        specs = ["radial:const:0.5", "radial:rat:5.0,1.0", "weyl:1.0+0.5i",
                 "measure:[(0.0,0.0,1.0);(1.0,0.0,-2.0)]"]
        return all(sym.format_symbol(sym.parse_symbol(s)) == s for s in specs)

    return [
        ("gauss-laguerre polynomial exactness", quadrature_exactness),
        ("reproducing property on polar grid", reproducing_property),
        ("normalized kernel coefficients sum to 1", kernel_normalization),
        ("weyl truncation unitary on leading block", weyl_unitary_block),
        ("series vs heat berezin agreement", cross_method_berezin),
        ("hahn-jordan split recombines", hahn_jordan_recombines),
        ("symbol parser round trip", parser_round_trip),
    ]


def run_selftest() -> int:
    failures = 0
    for name, check in _checks():
        try:
            ok = bool(check())
        except Exception as exc:  # a crash is a failure, not an abort
            ok = False
            sys.stdout.write(f"FAIL - {name} (raised {exc!r})\n")
            failures += 1
            continue
        sys.stdout.write(("ok   - " if ok else "FAIL - ") + name + "\n")
        failures += 0 if ok else 1
    sys.stdout.write(f"{'all checks passed' if not failures else f'{failures} check(s) failed'}\n")
    return 0 if failures == 0 else 2
