"""Self-checks for the truncated photon-number reference implementation."""

import math

import numpy as np
import pytest

from psqkd.errors import TruncationError, ZeroProbabilityError
from psqkd.fock_oracle import (
    FockTwoModeState,
    apply_bs_and_project,
    bs_pair_unitary,
    build_tmsc_fock,
    compare_random_grid,
    fock_moment,
    oracle_covariance,
    suggested_truncation,
)
from psqkd.moments import pstmsc_covariance, subtraction_probability
from psqkd.phase_space import SqueezedSourceParams

CM_FIELDS = ("vax", "vap", "vbx", "vbp", "vcx", "vcp", "mean_x1", "mean_x2")


class TestBuildState:
    def test_vacuum(self):
        state = build_tmsc_fock(0.0, 0.0, 5)
        assert state.n_max == 5
        assert state.amps[0, 0] == pytest.approx(1.0, rel=1e-14)
        assert np.sum(np.abs(state.amps)) == pytest.approx(1.0, rel=1e-14)

    def test_two_mode_squeezing_gives_schmidt_diagonal(self):
        r = 0.5
        state = build_tmsc_fock(r, 0.0, 30)
        th = math.tanh(r)
        for n in range(6):
            assert state.amps[n, n].real == pytest.approx(
                th**n / math.cosh(r), rel=1e-10
            )
        off = state.amps - np.diag(np.diag(state.amps))
        assert np.max(np.abs(off)) < 1e-12

    def test_normalized(self):
        state = build_tmsc_fock(0.7, 1.5, suggested_truncation(0.7, 1.5))
        assert state.norm() == pytest.approx(1.0, abs=1e-12)
        assert state.leakage() < 1e-8

    def test_truncation_guard_fires_when_too_small(self):
        with pytest.raises(TruncationError):
            build_tmsc_fock(1.2, 1.0, 16)

    def test_rejects_tiny_cutoff(self):
        with pytest.raises(ValueError):
            build_tmsc_fock(0.3, 0.0, 3)


class TestBeamSplitterUnitary:
    def test_orthogonal(self):
        for tau in (0.3, 0.7):
            u = bs_pair_unitary(tau, 12)
            assert np.max(np.abs(u @ u.T - np.eye(u.shape[0]))) < 1e-10

    def test_transmits_everything_at_tau_one(self):
        u = bs_pair_unitary(1.0, 6)
        assert np.max(np.abs(np.abs(u) - np.eye(u.shape[0]))) < 1e-12


class TestProjection:
    def test_full_transmission_keeps_all_mass(self):
        state = build_tmsc_fock(0.5, 0.8, 40)
        _, prob = apply_bs_and_project(state, 1.0, 0)
        assert prob == pytest.approx(1.0, abs=1e-10)

    def test_full_transmission_never_scatters_photons(self):
        state = build_tmsc_fock(0.5, 0.0, 30)
        with pytest.raises(ZeroProbabilityError):
            apply_bs_and_project(state, 1.0, 1)

    def test_probability_matches_closed_form(self):
        for r, d, tau, k in [(0.5, 0.0, 0.8, 1), (0.4, 1.0, 0.7, 2), (0.3, 0.5, 0.9, 0)]:
            state = build_tmsc_fock(r, d, suggested_truncation(r, d))
            _, prob = apply_bs_and_project(state, tau, k)
            closed = subtraction_probability(
                SqueezedSourceParams(r=r, d=d, tau=tau, k=k)
            )
            assert prob == pytest.approx(closed, rel=1e-8)

    def test_probabilities_sum_to_one(self):
        state = build_tmsc_fock(0.4, 0.6, 40)
        total = 0.0
        for k in range(30):
            try:
                _, prob = apply_bs_and_project(state, 0.75, k)
            except ZeroProbabilityError:
                break
            total += prob
        assert total == pytest.approx(1.0, abs=1e-9)


class TestMoments:
    def test_vacuum_quadrature_variance(self):
        vac = build_tmsc_fock(0.0, 0.0, 8)
        assert fock_moment(vac, 2, 0, 0, 0) == pytest.approx(1.0, rel=1e-12)
        assert fock_moment(vac, 0, 2, 0, 0) == pytest.approx(1.0, rel=1e-12)
        assert fock_moment(vac, 1, 0, 0, 0) == pytest.approx(0.0, abs=1e-12)

    def test_tmsv_cross_correlation(self):
        r = 0.5
        state = build_tmsc_fock(r, 0.0, 40)
        assert fock_moment(state, 1, 0, 1, 0) == pytest.approx(
            math.sinh(2 * r), rel=1e-10
        )
        assert fock_moment(state, 0, 1, 0, 1) == pytest.approx(
            -math.sinh(2 * r), rel=1e-10
        )

    def test_displaced_mean_matches_closed_form(self):
        params = SqueezedSourceParams(r=0.4, d=1.0, tau=0.8, k=1)
        state = build_tmsc_fock(0.4, 1.0, 40)
        state, _ = apply_bs_and_project(state, 0.8, 1)
        cm = pstmsc_covariance(params)
        assert fock_moment(state, 1, 0, 0, 0) == pytest.approx(cm.mean_x1, abs=1e-8)
        assert fock_moment(state, 0, 0, 1, 0) == pytest.approx(cm.mean_x2, abs=1e-8)

    def test_order_cap(self):
        vac = build_tmsc_fock(0.0, 0.0, 8)
        with pytest.raises(ValueError):
            fock_moment(vac, 3, 2, 0, 0)
        with pytest.raises(ValueError):
            fock_moment(vac, -1, 0, 0, 0)


class TestOracleCovariance:
    def test_tmsv_closed_form(self):
        cm = oracle_covariance(0.3, 0.0, 1.0, 0, 30)
        ch, sh = math.cosh(0.6), math.sinh(0.6)
        assert cm.vax == pytest.approx(ch, rel=1e-10)
        assert cm.vap == pytest.approx(ch, rel=1e-10)
        assert cm.vbx == pytest.approx(ch, rel=1e-10)
        assert cm.vbp == pytest.approx(ch, rel=1e-10)
        assert cm.vcx == pytest.approx(sh, rel=1e-10)
        assert cm.vcp == pytest.approx(-sh, rel=1e-10)
        assert cm.mean_x1 == pytest.approx(0.0, abs=1e-12)

    def test_stable_under_truncation_doubling(self):
        lo = oracle_covariance(0.4, 1.0, 0.8, 1, 40)
        hi = oracle_covariance(0.4, 1.0, 0.8, 1, 60)
        for field in CM_FIELDS:
            assert getattr(lo, field) == pytest.approx(
                getattr(hi, field), abs=1e-8
            ), field


class TestSuggestedTruncation:
    def test_floor_and_cap(self):
        assert suggested_truncation(0.0, 0.0) == 20
        assert suggested_truncation(5.0, 5.0) == 96

    def test_monotone(self):
        values = [suggested_truncation(r, 0.5) for r in (0.1, 0.5, 1.0)]
        assert values == sorted(values)


class TestRandomGridComparison:
    def test_small_grid_passes(self):
        report = compare_random_grid(points=8, seed=7, rel_tol=1e-5)
        assert report.passed
        assert report.points == 8
        assert report.max_dev_covariance <= 1e-5

    def test_impossible_tolerance_fails(self):
        report = compare_random_grid(points=3, seed=7, rel_tol=1e-18)
        assert not report.passed
