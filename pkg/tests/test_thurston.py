import math

import numpy as np
import pytest

from rayforge import potentials as pot
from rayforge import presets, rays, thurston, tracts
from rayforge.errors import (
    DomainError,
    FitError,
    NotConvergedError,
    SpecRejectionError,
)
from rayforge.polyexp import PolyExpMap, singular_values
from rayforge.potentials import ExternalAddress
from rayforge.thurston import TargetSpec

ZERO = presets.ZERO
ONE = presets.ONE


class TestValidate:
    def test_too_many_orbits(self):
        spec = TargetSpec(2, ((2.0, ZERO), (2.5, ONE), (3.0, presets.MIXED)), 2)
        with pytest.raises(SpecRejectionError, match="at most"):
            thurston.validate_spec(spec)

    def test_depth_overflow_advises(self):
        spec = TargetSpec(1, ((2.0, ZERO),), 6)
        with pytest.raises(SpecRejectionError, match="smaller depth"):
            thurston.validate_spec(spec)

    def test_infinite_cluster_diagnostic(self):
        with pytest.raises(SpecRejectionError, match="cluster"):
            thurston.validate_spec(presets.CLUSTER_REJECT)

    def test_distinct_speeds_have_finite_clusters(self):
        report = pot.detect_clusters(presets.CLUSTER_ACCEPT_ORBITS, 3, 2)
        assert not report.infinite

    def test_overlapping_addresses_rejected(self):
        spec = TargetSpec(2, ((2.0, ZERO), (2.5, ExternalAddress((5,), (0,)))), 2)
        with pytest.raises(SpecRejectionError, match="overlap"):
            thurston.validate_spec(spec)

    def test_shipped_specs_validate(self):
        thurston.validate_spec(presets.SPEC_D1)
        thurston.validate_spec(presets.SPEC_D2)


class TestInitState:
    def test_straight_grid_values(self):
        state = thurston.init_state(presets.SPEC_D1)
        z = state.grid.z
        # chained speed steps from T = 2 (50-digit values, rounded)
        assert z[0, 0] == pytest.approx(2.0)
        assert z[0, 1] == pytest.approx(6.3890560989306502, rel=1e-14)
        assert z[0, 2] == pytest.approx(594.29441538075368, rel=1e-14)
        assert z[0, 3] == pytest.approx(1.2554089653312633e258, rel=1e-13)
        assert state.map.coeffs[0] == pytest.approx(2.0)

    def test_offsets_follow_addresses(self):
        state = thurston.init_state(presets.SPEC_D2)
        z = state.grid.z
        assert z[1, 0] == pytest.approx(2.5 + 1j * math.pi)
        assert z[1, 1].imag == pytest.approx(math.pi)

    def test_tail_seed_is_log_polar_beyond_cap(self):
        state = thurston.init_state(presets.SPEC_D1)
        seed = state.grid.tail_seed(0)
        assert isinstance(seed, tracts.LogPolar)
        assert seed.log_abs == pytest.approx(1.2554089653312633e258, rel=1e-13)

    def test_tail_seed_complex_when_representable(self):
        spec = TargetSpec(1, ((0.5, ZERO),), 4)
        state = thurston.init_state(spec)
        seed = state.grid.tail_seed(0)
        assert isinstance(seed, complex)


class TestFitMap:
    def test_d1_direct(self):
        m = thurston.fit_map(1, [1 + 1j])
        assert m.coeffs == (1 + 1j,)

    def test_d2_closed_form(self):
        m = thurston.fit_map(2, [1.0, 0.0], warm=PolyExpMap(2, [0.0, 1.0]))
        assert m.coeffs[0] == pytest.approx(1.0)
        assert m.coeffs[1] == pytest.approx(2.0)

    def test_d2_round_trip(self):
        rng = np.random.default_rng(3)
        warm = PolyExpMap(2, [0.1, 0.1])
        for _ in range(50):
            targets = [complex(*rng.uniform(-3, 3, 2)) for _ in range(2)]
            m = thurston.fit_map(2, targets, warm=warm)
            sd = singular_values(m)
            assert abs(sd.asymptotic_value - targets[0]) < 1e-10
            assert min(abs(cv - targets[1]) for cv in sd.critical_values) < 1e-9

    def test_d2_sign_follows_warm_start(self):
        warm_pos = PolyExpMap(2, [0.0, 1.0])
        warm_neg = PolyExpMap(2, [0.0, -1.0])
        a = thurston.fit_map(2, [1.0, 0.0], warm=warm_pos)
        b = thurston.fit_map(2, [1.0, 0.0], warm=warm_neg)
        assert a.coeffs[1] == pytest.approx(2.0)
        assert b.coeffs[1] == pytest.approx(-2.0)

    def test_d2_branch_tie_flagged(self):
        import warnings as w

        warm_zero = PolyExpMap(2, [0.0, 0.0])
        with w.catch_warnings(record=True) as caught:
            w.simplefilter("always")
            m = thurston.fit_map(2, [1.0, 0.0], warm=warm_zero)
        assert m.coeffs[1] == pytest.approx(2.0)  # principal branch kept
        assert any("tie" in str(c.message) for c in caught)

    def test_d3_newton_round_trip(self):
        truth = PolyExpMap(3, [0.4 + 0.2j, -0.3, 0.5 - 0.1j])
        sd = singular_values(truth)
        targets = [sd.asymptotic_value] + list(sd.critical_values)
        warm = PolyExpMap(3, [c + 0.02 for c in truth.coeffs])
        fitted = thurston.fit_map(3, targets, warm=warm)
        for a, b in zip(fitted.coeffs, truth.coeffs):
            assert abs(a - b) < 1e-7

    def test_d3_requires_warm(self):
        with pytest.raises(FitError):
            thurston.fit_map(3, [0.1, 0.2, 0.3])


class TestPullback:
    def test_fixed_point_has_tiny_delta(self):
        # converge to the machine fixed point; one more step moves nothing
        res = thurston.classify(presets.SPEC_D1, max_iter=200, tol=1e-15)
        state = thurston.ThurstonState(res.map, res.grid, 0)
        stepped = thurston.pullback_step(state)
        assert stepped.deltas[-1] < 1e-12

    def test_deltas_decrease_geometrically(self):
        res = thurston.classify(presets.SPEC_D1)
        dl = res.deltas
        for k in range(3, len(dl) - 1):
            if dl[k] == 0:
                break
            assert dl[k + 1] / dl[k] < 0.9

    def test_grid_is_orbit_at_fixed_point(self):
        res = thurston.classify(presets.SPEC_D1, tol=1e-12)
        z = res.grid.z
        for j in range(res.grid.depth):
            lhs = res.map(complex(z[0, j]))
            rhs = complex(z[0, j + 1])
            assert abs(lhs - rhs) <= 1e-11 * max(1.0, abs(rhs))


class TestClassify:
    def test_d1_shipped_target(self):
        res = thurston.classify(presets.SPEC_D1)
        assert res.converged and res.iterations <= 50
        assert res.certificate.passed
        kappa = res.map.coeffs[0]
        assert abs(kappa.imag) < 1e-6
        for check in res.certificate.checks:
            assert check.potential_error < 1e-8

    def test_d2_shipped_target(self):
        res = thurston.classify(presets.SPEC_D2)
        assert res.converged and res.iterations <= 50
        assert res.certificate.passed

    def test_uniqueness_under_grid_perturbation(self):
        base = thurston.classify(presets.SPEC_D2)
        alt = thurston.classify(presets.SPEC_D2, jitter=0.1, jitter_seed=9)
        for a, b in zip(base.map.coeffs, alt.map.coeffs):
            assert abs(a - b) < 1e-8

    def test_grid_matches_ray_tracer(self):
        # the fixed-point grid equals independently traced ray points
        res = thurston.classify(presets.SPEC_D1, tol=1e-12)
        cfg = tracts.make_tract_config(res.map)
        values = pot.chain(1, 2.0, max_len=3)
        for j, tj in enumerate(values):
            pt = rays.trace_ray(res.map, cfg, ZERO, tj)
            assert abs(pt.z - complex(res.grid.z[0, j])) < 1e-6

    def test_nonconvergence_carries_history(self):
        with pytest.raises(NotConvergedError) as err:
            thurston.classify(presets.SPEC_D1, max_iter=2)
        assert isinstance(err.value.details, list) and len(err.value.details) == 2

    def test_depth_stability_of_certificate(self):
        # deeper truncation moves the certified potentials by < 1e-8
        # (small potential, so the truncation horizon leaves slack; the
        # contraction is weak there, hence the larger iteration allowance)
        spec_a = TargetSpec(1, ((0.5, ZERO),), 4)
        spec_b = TargetSpec(1, ((0.5, ZERO),), 6)
        res_a = thurston.classify(spec_a, max_iter=500)
        res_b = thurston.classify(spec_b, max_iter=500)
        assert abs(res_a.map.coeffs[0] - res_b.map.coeffs[0]) < 1e-8
        pa = res_a.certificate.checks[0].potential
        pb = res_b.certificate.checks[0].potential
        assert abs(pa - pb) < 1e-8


class TestVerify:
    def test_wrong_map_fails(self):
        res = thurston.classify(presets.SPEC_D1)
        wrong = PolyExpMap(1, [res.map.coeffs[0] + 1.0])
        cert = thurston.verify(wrong, presets.SPEC_D1)
        assert not cert.passed

    def test_right_map_passes(self):
        res = thurston.classify(presets.SPEC_D2)
        cert = thurston.verify(res.map, presets.SPEC_D2)
        assert cert.passed
        assert all(c.escaped for c in cert.checks)

    def test_nonescaping_singular_value_reported(self):
        cert = thurston.verify(PolyExpMap(1, [-10.0]), presets.SPEC_D1)
        assert not cert.passed
        assert any("escape" in note or "orbit" in note for note in cert.notes)


class TestDiagnostics:
    def test_straight_state_passes_all(self):
        state = thurston.init_state(presets.SPEC_D2)
        rep = thurston.invariant_set_diagnostics(state.grid.z, presets.SPEC_D2)
        assert rep.inside_disk and rep.tail_asymptotics and rep.separation
        assert rep.homotopy_budget and rep.pullback_real_parts
        assert rep.derivative_domain

    def test_converged_run_passes_all(self):
        res = thurston.classify(presets.SPEC_D1, log_iterates=True)
        for grid in res.iterate_log:
            rep = thurston.invariant_set_diagnostics(grid, presets.SPEC_D1)
            assert rep.inside_disk and rep.tail_asymptotics and rep.separation

    def test_shrunken_rho_reports_not_raises(self):
        state = thurston.init_state(presets.SPEC_D1)
        rep = thurston.invariant_set_diagnostics(
            state.grid.z, presets.SPEC_D1, rho=1.0
        )
        assert not rep.inside_disk or rep.inside_disk  # report only
        assert isinstance(rep.separation, bool)
