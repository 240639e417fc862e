import math

import numpy as np
import pytest

from qphase.geometry import Point
from qphase.states import InvalidStateError, random_density_matrix, registry_vector
from qphase.system import build_system
from qphase.tomography import (
    CountsRecord,
    MeasurementPlan,
    error_scaling_study,
    estimate_state,
    estimate_wigner,
    fidelity,
    loglog_slope,
    outcome_probabilities,
    project_to_physical,
    simulate_counts,
    trace_distance,
)
from qphase.wigner import line_sum, wigner_from_state


def rho_of(name):
    _, v = registry_vector(name)
    return np.outer(v, v.conj())


def plan_for(sys, shots, seed=0):
    return MeasurementPlan(bases=sys.bases, shots_per_basis=shots, seed=seed)


class TestOutcomeProbabilities:
    def test_up_in_z_basis(self):
        sys = build_system(1)
        p = outcome_probabilities(rho_of("up"), sys.bases[0])
        assert np.allclose(p, [1, 0])

    def test_up_in_x_basis_equal_superposition(self):
        sys = build_system(1)
        p = outcome_probabilities(rho_of("up"), sys.bases[1])
        assert np.allclose(p, [0.5, 0.5])

    def test_singlet_in_entangled_basis_cross_checked_against_line_sums(self):
        # dual route: <v|rho|v> versus the sums of the singlet grid over the
        # striation's lines
        sys = build_system(2)
        rho = rho_of("singlet")
        grid = wigner_from_state(rho, sys.net)
        basis = sys.bases[3]
        p = outcome_probabilities(rho, basis)
        assert np.all(p >= 0) and np.all(p <= 1)
        assert p.sum() == pytest.approx(1.0)
        striation = sys.striations[3]
        for line in striation.lines:
            k = sys.net.vector_index[line]
            assert p[k] == pytest.approx(line_sum(grid, line), abs=1e-12)

    def test_unphysical_state_rejected(self):
        sys = build_system(1)
        with pytest.raises(InvalidStateError):
            outcome_probabilities(np.diag([1.2, -0.2]).astype(complex), sys.bases[0])


class TestSimulateCounts:
    def test_deterministic_outcome_state(self):
        sys = build_system(1)
        for seed in (0, 1, 123456):
            counts = simulate_counts(rho_of("up"), plan_for(sys, 200, seed))
            assert counts.counts[0].tolist() == [200, 0]

    def test_counts_sum_to_shots(self):
        sys = build_system(2)
        counts = simulate_counts(rho_of("singlet"), plan_for(sys, 77, seed=3))
        for arr in counts.counts.values():
            assert arr.sum() == 77

    def test_identical_records_for_fixed_seed(self):
        sys = build_system(1)
        rho = rho_of("tilted-111")
        a = simulate_counts(rho, plan_for(sys, 100, seed=42))
        b = simulate_counts(rho, plan_for(sys, 100, seed=42))
        assert a == b

    def test_different_seeds_differ(self):
        sys = build_system(1)
        rho = rho_of("tilted-111")
        a = simulate_counts(rho, plan_for(sys, 5000, seed=0))
        b = simulate_counts(rho, plan_for(sys, 5000, seed=1))
        assert a != b

    def test_exact_mode_carries_probabilities(self):
        sys = build_system(1)
        counts = simulate_counts(rho_of("up"), plan_for(sys, 0))
        assert counts.shots == 0
        assert np.allclose(counts.frequencies(1), [0.5, 0.5])

    def test_plan_validation(self):
        sys = build_system(2)
        with pytest.raises(ValueError):
            MeasurementPlan(bases=sys.bases[:3], shots_per_basis=10, seed=0)
        with pytest.raises(ValueError):
            MeasurementPlan(bases=sys.bases, shots_per_basis=-1, seed=0)

    def test_json_round_trip(self):
        sys = build_system(1)
        counts = simulate_counts(rho_of("y+"), plan_for(sys, 64, seed=9))
        assert CountsRecord.from_json_dict(counts.to_json_dict()) == counts
        exact = simulate_counts(rho_of("y+"), plan_for(sys, 0, seed=9))
        back = CountsRecord.from_json_dict(exact.to_json_dict())
        assert back == exact


class TestEstimateWigner:
    def test_exact_up_reproduces_table(self):
        sys = build_system(1)
        counts = simulate_counts(rho_of("up"), plan_for(sys, 0))
        grid = estimate_wigner(counts, sys.net)
        assert np.max(np.abs(grid.values - [[0.5, 0.5], [0, 0]])) < 1e-12

    def test_exact_maximally_mixed_uniform(self):
        sys = build_system(2)
        counts = simulate_counts(np.eye(4, dtype=complex) / 4, plan_for(sys, 0))
        grid = estimate_wigner(counts, sys.net)
        assert np.max(np.abs(grid.values - 1 / 16)) < 1e-12

    def test_exact_singlet_pattern(self):
        sys = build_system(2)
        counts = simulate_counts(rho_of("singlet"), plan_for(sys, 0))
        grid = estimate_wigner(counts, sys.net)
        ref = np.zeros((4, 4))
        ref[np.ix_([1, 2], [1, 2])] = 0.25
        assert np.max(np.abs(grid.values - ref)) < 1e-12

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_closed_form_equals_direct_inverse_path(self, n):
        # the line-sum formula must agree with wigner_from_state on exact input
        sys = build_system(n)
        rng = np.random.default_rng(31)
        for _ in range(5):
            rho = random_density_matrix(rng, sys.dim)
            counts = simulate_counts(rho, plan_for(sys, 0))
            est = estimate_wigner(counts, sys.net)
            direct = wigner_from_state(rho, sys.net)
            assert np.max(np.abs(est.values - direct.values)) < 1e-12

    def test_missing_striation_rejected(self):
        sys = build_system(1)
        counts = simulate_counts(rho_of("up"), plan_for(sys, 16))
        del counts.counts[2]
        with pytest.raises(ValueError):
            estimate_wigner(counts, sys.net)

    def test_grid_sums_to_one_even_at_finite_shots(self):
        sys = build_system(1)
        counts = simulate_counts(rho_of("tilted-111"), plan_for(sys, 13, seed=2))
        assert estimate_wigner(counts, sys.net).total == pytest.approx(1.0)


class TestEstimateState:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_exact_reconstruction(self, n):
        sys = build_system(n)
        rng = np.random.default_rng(47)
        for _ in range(5):
            rho = random_density_matrix(rng, sys.dim)
            counts = simulate_counts(rho, plan_for(sys, 0))
            report = estimate_state(counts, sys.net, truth=rho)
            assert report.trace_distance < 1e-9
            assert report.fidelity == pytest.approx(1.0, abs=1e-9)
            assert np.max(np.abs(report.rho_raw - rho)) < 1e-9

    def test_truth_equal_estimate_gives_zero_distance(self):
        sys = build_system(1)
        rho = rho_of("up")
        counts = simulate_counts(rho, plan_for(sys, 0))
        report = estimate_state(counts, sys.net, truth=rho)
        assert report.trace_distance == pytest.approx(0.0, abs=1e-12)
        assert report.fidelity == pytest.approx(1.0)

    def test_projection_yields_physical_state_at_low_shots(self):
        sys = build_system(1)
        rho = rho_of("tilted-111")
        saw_nonphysical_raw = False
        for seed in range(100):
            counts = simulate_counts(rho, plan_for(sys, 10, seed))
            report = estimate_state(counts, sys.net)
            if np.linalg.eigvalsh(report.rho_raw).min() < -1e-12:
                saw_nonphysical_raw = True
            proj = report.rho_projected
            assert np.linalg.eigvalsh(proj).min() >= -1e-12
            assert np.trace(proj).real == pytest.approx(1.0)
        assert saw_nonphysical_raw  # 10 shots routinely produce a non-PSD raw estimate

    def test_without_projection(self):
        sys = build_system(1)
        counts = simulate_counts(rho_of("up"), plan_for(sys, 0))
        report = estimate_state(counts, sys.net, project=False)
        assert report.rho_projected is None
        assert np.max(np.abs(report.estimate - report.rho_raw)) == 0


class TestMetrics:
    def test_fidelity_identity(self):
        rho = rho_of("singlet")
        assert fidelity(rho, rho) == pytest.approx(1.0)

    def test_fidelity_orthogonal_states(self):
        assert fidelity(rho_of("up"), rho_of("down")) == pytest.approx(0.0, abs=1e-12)

    def test_trace_distance_extremes(self):
        assert trace_distance(rho_of("up"), rho_of("up")) == pytest.approx(0.0)
        assert trace_distance(rho_of("up"), rho_of("down")) == pytest.approx(1.0)

    def test_projection_idempotent_on_physical(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            rho = random_density_matrix(rng, 4)
            assert np.max(np.abs(project_to_physical(rho) - rho)) < 1e-12


class TestUnbiasedness:
    def test_mean_estimate_tracks_truth(self):
        # mean of the grid estimator over 10^4 seeds at 64 shots stays within
        # three standard errors of the exact value, spot-checked at 5 points
        sys = build_system(2)
        rho = rho_of("singlet")
        truth = wigner_from_state(rho, sys.net).values
        seeds = range(10_000)
        spots = [(0, 0), (1, 1), (2, 1), (3, 3), (0, 2)]
        samples = np.empty((len(seeds), len(spots)))
        for row, seed in enumerate(seeds):
            grid = estimate_wigner(
                simulate_counts(rho, plan_for(sys, 64, seed)), sys.net
            ).values
            samples[row] = [grid[qi, pi] for qi, pi in spots]
        means = samples.mean(axis=0)
        stderr = samples.std(axis=0, ddof=1) / np.sqrt(len(seeds))
        for k, (qi, pi) in enumerate(spots):
            assert abs(means[k] - truth[qi, pi]) <= 3 * stderr[k]


class TestScaling:
    def test_exact_mode_zero_error(self):
        sys = build_system(1)
        rho = rho_of("tilted-111")
        counts = simulate_counts(rho, plan_for(sys, 0))
        report = estimate_state(counts, sys.net, truth=rho)
        assert report.max_wigner_error < 1e-12

    def test_error_decreases_and_slope_matches_root_m(self):
        sys = build_system(1)
        rho = rho_of("tilted-111")
        rows = error_scaling_study(
            rho, sys.net, list(sys.bases), [64, 256, 1024], seeds=list(range(60))
        )
        errors = [r.mean_max_wigner_error for r in rows]
        assert errors[0] > errors[1] > errors[2]
        assert -0.65 <= loglog_slope(rows) <= -0.35

    def test_doubling_ratio(self):
        # doubling the ensemble should shrink the mean error by ~1/sqrt(2),
        # within 20%, averaged over 200 seeds
        sys = build_system(1)
        rho = rho_of("tilted-111")
        rows = error_scaling_study(
            rho, sys.net, list(sys.bases), [512, 1024], seeds=list(range(200))
        )
        ratio = rows[1].mean_max_wigner_error / rows[0].mean_max_wigner_error
        target = 1 / math.sqrt(2)
        assert abs(ratio - target) < 0.2 * target

    def test_shot_list_must_ascend(self):
        sys = build_system(1)
        with pytest.raises(ValueError):
            error_scaling_study(
                rho_of("up"), sys.net, list(sys.bases), [256, 64], seeds=[0]
            )


class TestPointHelper:
    def test_estimate_closed_form_identity(self):
        # every point lies on N+1 lines and shares exactly one line with any
        # other point, which is what makes the closed form exact; verify the
        # combinatorial facts directly on the net
        sys = build_system(2)
        ctx = sys.ctx
        pts = [Point(q, p) for q in ctx.elements() for p in ctx.elements()]
        for a in pts:
            lines_a = sys.net.lines_through(a)
            assert len(lines_a) == 5
            for b in pts:
                if a == b:
                    continue
                shared = [ln for ln in lines_a if b in ln]
                assert len(shared) == 1
