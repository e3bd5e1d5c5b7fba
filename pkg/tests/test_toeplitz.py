import json
import math

import numpy as np
import pytest

from focklab.errors import DiagnosticError
from focklab.fock import FockParams, kernel_coeff_vector, polar_grid
from focklab.toeplitz import (assemble, assemble_general, assemble_measure,
                              assemble_weyl_phase, complex_matrix,
                              load_eigen_csv, load_matrix, matrix_from_json_dict,
                              matrix_to_json_dict, operator_norm,
                              radial_eigenvalues, radial_eigenvalues_quadrature,
                              save_eigen_csv, save_matrix)
from focklab import symbols as sym
from oracles import lower_regularized_gamma_series

P = FockParams(t=2.0, dim=48)


class TestRadialEigenvalues:
    def test_constant(self):
        for t in (1.0, 2.0):
            e = radial_eigenvalues(sym.Constant(0.75), FockParams(t=t, dim=64))
            assert e.values == pytest.approx(np.full(64, 0.75), abs=1e-14)

    def test_power_two_matches_gamma_closed_form(self):
        for t in (1.0, 2.0):
            e = radial_eigenvalues(sym.Power(2), FockParams(t=t, dim=61))
            expected = t * (np.arange(61) + 1.0)
            assert e.values == pytest.approx(expected, rel=1e-10)

    def test_indicator_matches_series_oracle(self):
        R = 1.0
        e = radial_eigenvalues(sym.Indicator(R), P)
        expected = [lower_regularized_gamma_series(m + 1, R * R / P.t)
                    for m in range(P.dim)]
        assert e.values == pytest.approx(expected, abs=1e-13)

    def test_indicator_cross_checks_against_quadrature(self):
        # independent quadrature: Legendre panels on the truncated domain,
        # where the integrand u^m e^{-u} / m! is smooth
        from scipy.special import roots_legendre
        R = 1.5
        cut = R * R / P.t
        x0, w0 = roots_legendre(80)
        u = 0.5 * cut * (x0 + 1.0)
        w = 0.5 * cut * w0
        e = radial_eigenvalues(sym.Indicator(R), P)
        for m in (0, 3, 17, 40):
            quad = float(np.sum(w * np.exp(m * np.log(u) - u - math.lgamma(m + 1))))
            assert e.values[m] == pytest.approx(quad, abs=1e-12)

    def test_jump_profile_defeats_raw_laguerre_rule(self):
        # a discontinuity cannot settle under node doubling; the rule says so
        with pytest.raises(DiagnosticError):
            radial_eigenvalues_quadrature(sym.Indicator(1.5), P)

    def test_scaled_profile(self):
        base = radial_eigenvalues(sym.Rational(5.0, 1.0), P)
        neg = radial_eigenvalues(sym.Scaled(sym.Rational(5.0, 1.0), -1.0), P)
        assert neg.values == pytest.approx(-base.values, abs=0.0)

    def test_norm_bound_invariant(self):
        for profile in (sym.Constant(-1.0), sym.Indicator(2.0),
                        sym.Rational(5.0, 1.0),
                        sym.PiecewiseConstant((0.0, 1.0), (0.5,), -1.0)):
            e = radial_eigenvalues(profile, P)
            assert np.max(np.abs(e.values)) <= sym.profile_sup_norm(profile) + 1e-12

    def test_profile_tag_round_trips(self):
        e = radial_eigenvalues(sym.Rational(5.0, 1.0), P)
        assert sym.parse_symbol(e.profile) == sym.Radial(sym.Rational(5.0, 1.0))

    def test_csv_round_trip(self, tmp_path):
        e = radial_eigenvalues(sym.Indicator(1.0), P)
        path = tmp_path / "eigs.csv"
        save_eigen_csv(e, path)
        back = load_eigen_csv(path, P, e.profile)
        assert back.values == pytest.approx(e.values, abs=0.0)


class TestAssembleGeneral:
    def test_constant_is_identity(self):
        A = assemble_general(sym.Radial(sym.Constant(1.0)), P)
        assert np.max(np.abs(A.entries - np.eye(P.dim))) < 1e-10
        assert A.hermitian

    def test_radial_is_diagonal_matching_eigenvalues(self):
        prof = sym.Rational(5.0, 1.0)
        A = assemble_general(sym.Radial(prof), FockParams(t=2.0, dim=60))
        eig = radial_eigenvalues(prof, FockParams(t=2.0, dim=60))
        off = A.entries - np.diag(np.diag(A.entries))
        assert np.max(np.abs(off)) < 1e-10
        assert np.diag(A.entries).real == pytest.approx(eig.values, abs=1e-9)

    def test_matches_exact_weyl_assembly(self):
        z = 1.0 + 0.5j  # |z|^2/t < 4
        A = assemble_general(sym.WeylPhase(z), P)
        B = assemble_weyl_phase(z, P)
        assert np.max(np.abs(A.entries - B.entries)) < 1e-8

    def test_hermitian_flags(self):
        assert assemble_general(sym.Radial(sym.Indicator(1.0)), P).hermitian
        assert not assemble_general(sym.WeylPhase(1.0), P).hermitian

    def test_norm_bounded_by_sup(self):
        for s in (sym.Radial(sym.Rational(5.0, 1.0)), sym.WeylPhase(1.5),
                  sym.directional_clamp()):
            A = assemble_general(s, P)
            assert operator_norm(A) <= sym.sup_norm(s) + 1e-8

    def test_coarse_angular_grid_is_diagnosed(self):
        shifted = sym.translate(sym.Radial(sym.Indicator(1.0)), 8.0)
        grid = polar_grid(64, 8)
        with pytest.raises(DiagnosticError):
            assemble_general(shifted, FockParams(t=2.0, dim=24), grid)

    def test_measure_input_rejected(self):
        s = sym.AtomicMeasure(sym.SignedAtomicMeasure(((0j, 1.0),)))
        with pytest.raises(TypeError):
            assemble_general(s, P)


class TestWeylAssembly:
    def test_zero_is_identity(self):
        A = assemble_weyl_phase(0.0, P)
        assert np.array_equal(A.entries, np.eye(P.dim))

    def test_first_column_is_kernel_vector(self):
        z = 1.0 - 0.8j
        A = assemble_weyl_phase(z, P)
        expected = math.exp(-abs(z) ** 2 / (2 * P.t)) * kernel_coeff_vector(z, P)
        assert A.entries[:, 0] == pytest.approx(expected, abs=1e-14)

    def test_unitary_block(self):
        p = FockParams(t=2.0, dim=100)
        # rescaling the damped operator recovers the unitary shift
        U = assemble_weyl_phase(2.0, p, unitary=True)
        gram = U.entries.conj().T @ U.entries
        assert np.max(np.abs(gram[:50, :50] - np.eye(50))) < 1e-5

    def test_composition_law(self):
        p = FockParams(t=2.0, dim=80)
        rng = np.random.default_rng(8)
        for _ in range(3):
            z, w = [complex(*rng.uniform(-1.0, 1.0, 2)) for _ in range(2)]
            Uz = assemble_weyl_phase(z, p, unitary=True).entries
            Uw = assemble_weyl_phase(w, p, unitary=True).entries
            Uzw = assemble_weyl_phase(z + w, p, unitary=True).entries
            lhs, rhs = (Uz @ Uw)[:40, :40], Uzw[:40, :40]
            anchor = np.unravel_index(np.argmax(np.abs(rhs)), rhs.shape)
            phase = lhs[anchor] / rhs[anchor]
            assert abs(abs(phase) - 1.0) < 1e-6
            assert np.max(np.abs(lhs - phase * rhs)) < 1e-6
            # the numerically observed phase carries the imaginary unit
            assert phase == pytest.approx(np.exp(-1j * np.imag(z * np.conj(w)) / p.t),
                                          abs=1e-9)

    def test_translation_covariance(self):
        # T_{f(. - z)} agrees with U_z T_f U_z^H on the leading block
        p = FockParams(t=2.0, dim=80)
        f = sym.Radial(sym.Rational(5.0, 1.0))
        A = assemble_general(f, p).entries
        for z in (0.6 + 0.0j, 0.4 - 0.6j):
            shifted = assemble_general(sym.translate(f, z), p).entries
            U = assemble_weyl_phase(z, p, unitary=True).entries
            conj = U @ A @ U.conj().T
            assert np.max(np.abs(shifted[:40, :40] - conj[:40, :40])) < 1e-5


class TestMeasureAssembly:
    def test_point_mass_at_origin(self):
        m = sym.SignedAtomicMeasure(((0j, 1.0),))
        A = assemble_measure(m, P)
        assert A.entries[0, 0].real == pytest.approx(1 / (2 * math.pi), rel=1e-12)
        rest = A.entries.copy()
        rest[0, 0] = 0.0
        assert np.max(np.abs(rest)) == 0.0
        assert A.hermitian

    def test_negation(self):
        pos = assemble_measure(sym.SignedAtomicMeasure(((0j, 1.0),)), P)
        neg = assemble_measure(sym.SignedAtomicMeasure(((0j, -1.0),)), P)
        assert np.array_equal(neg.entries, -pos.entries)

    def test_additivity_over_atoms(self):
        a1 = sym.SignedAtomicMeasure(((1 + 0j, 0.5),))
        a2 = sym.SignedAtomicMeasure(((0 + 1j, -1.5),))
        both = sym.SignedAtomicMeasure(a1.atoms + a2.atoms)
        A1, A2 = assemble_measure(a1, P), assemble_measure(a2, P)
        A = assemble_measure(both, P)
        assert A.entries == pytest.approx(A1.entries + A2.entries, abs=1e-15)


class TestDispatcher:
    def test_radial_fast_path_is_diagonal(self):
        A = assemble(sym.Radial(sym.Indicator(1.0)), P)
        assert np.max(np.abs(A.entries - np.diag(np.diag(A.entries)))) == 0.0

    def test_weyl_route(self):
        A = assemble(sym.WeylPhase(0.7), P)
        B = assemble_weyl_phase(0.7, P)
        assert np.array_equal(A.entries, B.entries)

    def test_measure_route(self):
        s = sym.AtomicMeasure(sym.SignedAtomicMeasure(((0j, 2.0),)))
        A = assemble(s, P)
        assert A.entries[0, 0].real == pytest.approx(1 / math.pi / P.t * 2.0)


class TestMatrixWireFormat:
    def test_json_round_trip(self, tmp_path):
        A = assemble_weyl_phase(1.0 + 1.0j, FockParams(t=2.0, dim=12))
        data = matrix_to_json_dict(A)
        assert set(data) == {"dim", "t", "hermitian", "entries"}
        assert len(data["entries"]) == 144
        back = matrix_from_json_dict(json.loads(json.dumps(data)))
        assert np.array_equal(back.entries, A.entries)
        assert back.hermitian == A.hermitian
        path = tmp_path / "m.json"
        save_matrix(A, path)
        assert np.array_equal(load_matrix(path).entries, A.entries)

    def test_rejects_corrupt_payload(self):
        with pytest.raises(ValueError):
            matrix_from_json_dict({"dim": 2, "t": 2.0, "hermitian": True,
                                   "entries": [[1.0, 0.0]]})

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            complex_matrix(np.array([[np.nan + 0j, 0], [0, 0]]), 2.0)
