import json
import math

import numpy as np
import pytest

from focklab.fock import FockParams
from focklab.spectra import (ess_positivity_limitops,
                             ess_positivity_radial, ess_positivity_symbol_liminf,
                             ess_positivity_vo, hermitian_eigs, leading_block,
                             leading_singular_values, limit_operator_sample,
                             radial_essential_spectrum, report_to_json_dict,
                             singular_values)
from focklab.toeplitz import (EigenSequence, assemble_weyl_phase, complex_matrix,
                              radial_eigenvalues)
from focklab import symbols as sym
from oracles import hermitian_3x3_eigs

P = FockParams(t=2.0, dim=48)
TAU = 1e-3


def eigen_seq(values, t=2.0):
    arr = np.asarray(values, dtype=float)
    return EigenSequence(values=arr, params=FockParams(t=t, dim=len(arr)), profile="")


class TestHermitianEigs:
    def test_diagonal(self):
        A = complex_matrix(np.diag([3.0, -1.0, 2.0]).astype(complex), 2.0)
        assert hermitian_eigs(A) == pytest.approx([-1.0, 2.0, 3.0])

    def test_pauli_x(self):
        A = complex_matrix(np.array([[0, 1], [1, 0]], dtype=complex), 2.0)
        assert hermitian_eigs(A) == pytest.approx([-1.0, 1.0])

    def test_random_3x3_matches_cubic_roots(self):
        rng = np.random.default_rng(12)
        for _ in range(10):
            B = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
            H = B + B.conj().T
            A = complex_matrix(H, 2.0)
            assert hermitian_eigs(A) == pytest.approx(hermitian_3x3_eigs(H), abs=1e-10)

    def test_rejects_unflagged(self):
        A = complex_matrix(np.array([[0, 1], [0, 0]], dtype=complex), 2.0)
        with pytest.raises(ValueError):
            hermitian_eigs(A)


class TestSingularValues:
    def test_identity(self):
        A = complex_matrix(np.eye(5, dtype=complex), 2.0)
        assert singular_values(A) == pytest.approx(np.ones(5))

    def test_zero(self):
        A = complex_matrix(np.zeros((4, 4), dtype=complex), 2.0)
        assert singular_values(A) == pytest.approx(np.zeros(4), abs=1e-12)

    def test_weyl_leading_block(self):
        p = FockParams(t=2.0, dim=80)
        A = assemble_weyl_phase(2.0, p)
        lead = leading_singular_values(A, 0.5)
        assert len(lead) == 40
        assert lead == pytest.approx(np.full(40, math.exp(-1.0)), abs=1e-4)


class TestEssentialSpectrumEstimate:
    def test_constant_sequence(self):
        est = radial_essential_spectrum(eigen_seq(np.ones(64)))
        assert est.points == pytest.approx((1.0,))
        assert est.liminf == pytest.approx(1.0)
        assert est.limsup == pytest.approx(1.0)

    def test_alternating_sequence(self):
        est = radial_essential_spectrum(eigen_seq([(-1.0) ** m for m in range(64)]))
        assert est.points == pytest.approx((-1.0, 1.0))

    def test_null_sequence(self):
        est = radial_essential_spectrum(eigen_seq([1.0 / (m + 1) for m in range(512)]))
        assert len(est.points) == 1
        assert abs(est.points[0]) < 0.01
        assert est.liminf <= 1.0 / 256

    def test_points_inside_estimated_range(self):
        rng = np.random.default_rng(3)
        est = radial_essential_spectrum(eigen_seq(rng.uniform(-1, 1, size=128)))
        gap = 0.05 * (est.limsup - est.liminf + 1e-12)
        for point in est.points:
            assert est.liminf - gap <= point <= est.limsup + gap

    def test_needs_enough_modes(self):
        with pytest.raises(ValueError):
            radial_essential_spectrum(eigen_seq(np.ones(8)))


class TestRadialVerdicts:
    def test_positive_constant(self):
        rep = ess_positivity_radial(sym.Constant(1.0), FockParams(t=2.0, dim=64), TAU)
        assert rep.verdict == "positive"
        assert rep.margin == pytest.approx(1.0)
        assert not rep.heuristic

    def test_rational_positive_despite_negative_start(self):
        p = FockParams(t=2.0, dim=128)
        eig = radial_eigenvalues(sym.Rational(5.0, 1.0), p)
        assert eig.values[0] < 0
        rep = ess_positivity_radial(sym.Rational(5.0, 1.0), p, TAU)
        assert rep.verdict == "positive"
        assert rep.margin >= TAU

    def test_negative_constant(self):
        rep = ess_positivity_radial(sym.Constant(-1.0), FockParams(t=2.0, dim=64), TAU)
        assert rep.verdict == "not_positive"
        assert rep.margin == pytest.approx(-1.0)

    def test_zero_is_inconclusive(self):
        rep = ess_positivity_radial(sym.Constant(0.0), FockParams(t=2.0, dim=64), TAU)
        assert rep.verdict == "inconclusive"


class TestVoVerdicts:
    def test_constants(self):
        p = FockParams(t=2.0, dim=48)
        for c, verdict in [(1.0, "positive"), (-1.0, "not_positive"),
                           (0.0, "inconclusive")]:
            rep = ess_positivity_vo(sym.Radial(sym.Constant(c)), p, tau=TAU)
            assert rep.verdict == verdict
            assert rep.margin == pytest.approx(c, abs=1e-9)

    def test_rational_agrees_with_radial(self):
        p = FockParams(t=2.0, dim=64)
        rep = ess_positivity_vo(sym.Radial(sym.Rational(5.0, 1.0)), p, tau=TAU)
        assert rep.verdict == "positive"

    def test_weyl_phase_guarded(self):
        rep = ess_positivity_vo(sym.WeylPhase(1.0), P, tau=TAU)
        assert rep.verdict == "inconclusive"


class TestLimitOperatorSamples:
    def test_constant_gives_scaled_identity(self):
        p = FockParams(t=2.0, dim=24)
        for theta, rho in [(0.0, 2.0), (math.pi / 3, 7.0)]:
            A = limit_operator_sample(sym.Radial(sym.Constant(0.5)), theta, rho, p)
            assert np.max(np.abs(A.entries - 0.5 * np.eye(24))) < 1e-10

    def test_radial_tail_value_recovered(self):
        # smooth profile with limit 1: far samples climb toward that value
        p = FockParams(t=2.0, dim=48)
        prof = sym.Radial(sym.Rational(5.0, 1.0))
        mins = []
        for rho in (4.0, 8.0, 16.0):
            A = limit_operator_sample(prof, 0.25, rho, p)
            mins.append(float(hermitian_eigs(leading_block(A))[0]))
        assert mins[0] < mins[1] < mins[2]
        assert mins[-1] == pytest.approx(1.0, abs=0.15)

    def test_plateau_value_recovered_exactly(self):
        # kinked profile, sampled where its plateau fills the whole window
        p = FockParams(t=2.0, dim=48)
        prof = sym.Radial(sym.Sampled((0.0, 1.0, 2.0, 4.0), (0.2, -0.3, 0.6, 0.8)))
        A = limit_operator_sample(prof, 0.25, 16.0, p)
        assert float(hermitian_eigs(leading_block(A))[0]) == pytest.approx(0.8, abs=0.05)

    def test_weyl_spectra_translation_invariant(self):
        p = FockParams(t=2.0, dim=40)
        base = singular_values(assemble_weyl_phase(0.8, p))
        for theta, rho in [(0.0, 3.0), (math.pi / 3, 6.0)]:
            sample = limit_operator_sample(sym.WeylPhase(0.8), theta, rho, p)
            assert singular_values(sample) == pytest.approx(base, abs=1e-8)


class TestLimitopsVerdicts:
    def test_constant_positive(self):
        rep = ess_positivity_limitops(sym.Radial(sym.Constant(1.0)),
                                      FockParams(t=2.0, dim=32),
                                      theta_count=4, radii=(2.0, 4.0))
        assert rep.verdict == "positive"
        assert rep.heuristic

    def test_directional_clamp_not_positive(self):
        p = FockParams(t=2.0, dim=64)
        rep = ess_positivity_limitops(sym.directional_clamp(), p,
                                      theta_count=8, radii=(4.0, 8.0, 16.0),
                                      threads=2)
        assert rep.verdict == "not_positive"
        towards_minus = [v for name, v in rep.diagnostics
                         if "theta=3.1416" in name]
        assert len(towards_minus) == 3
        assert all(v <= -0.9 for v in towards_minus)

    def test_rational_consistent_with_radial(self):
        p = FockParams(t=2.0, dim=64)
        rep = ess_positivity_limitops(sym.Radial(sym.Rational(5.0, 1.0)), p,
                                      theta_count=4, radii=(4.0, 8.0, 16.0),
                                      threads=2)
        assert rep.verdict == "positive"

    def test_nonreal_guarded(self):
        rep = ess_positivity_limitops(sym.WeylPhase(1.0), P)
        assert rep.verdict == "inconclusive"


class TestSymbolLiminf:
    def test_clamp_negative(self):
        rep = ess_positivity_symbol_liminf(sym.directional_clamp(), P)
        assert rep.verdict == "not_positive"
        assert rep.margin < -0.9

    def test_rational_positive(self):
        rep = ess_positivity_symbol_liminf(sym.Radial(sym.Rational(5.0, 1.0)), P)
        assert rep.verdict == "positive"


class TestReports:
    def test_json_schema(self):
        rep = ess_positivity_radial(sym.Constant(1.0), FockParams(t=2.0, dim=64))
        data = json.loads(json.dumps(report_to_json_dict(rep)))
        assert set(data) == {"verdict", "margin", "mode", "diagnostics", "heuristic"}
        assert data["mode"] == "radial"

    def test_trichotomy_is_mechanical(self):
        reports = [
            ess_positivity_radial(sym.Constant(c), FockParams(t=2.0, dim=64), TAU)
            for c in (1.0, -1.0, 0.0, 5e-4, -5e-4)
        ]
        for rep in reports:
            if rep.verdict == "positive":
                assert rep.margin >= TAU
            elif rep.verdict == "not_positive":
                assert rep.margin <= -TAU
            else:
                assert -TAU < rep.margin < TAU or rep.verdict == "inconclusive"
