"""Runtime invariant suite behind the ``verify`` command.

Each check re-derives a structural property from scratch (exhaustively for
small n, sampled where the count explodes) and reports pass/fail with a
short detail string.  The suite is deterministic: all sampling uses fixed
seeds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import Point, find_wraparound_witness, intersect
from .mub import check_conjugacy
from .operators import joint_eigenbasis, projective_check, translation_unitary
from .states import random_density_matrix, random_pure_state
from .system import PhaseSpaceSystem, build_system
from .tomography import (
    MeasurementPlan,
    estimate_state,
    project_to_physical,
    simulate_counts,
)
from .wigner import line_sum, translate_grid, wigner_from_state

TOL = 1e-9


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


def _result(name: str, dev: float, tol: float = TOL) -> CheckResult:
    return CheckResult(name, dev <= tol, f"max deviation {dev:.3e} (tol {tol:.0e})")


# -- field ------------------------------------------------------------------


def check_field_axioms(sys: PhaseSpaceSystem) -> CheckResult:
    """Exhaustive field axioms plus the not-mod-N witness."""
    ctx = sys.ctx
    elems = ctx.elements()
    try:
        for a in elems:
            if not (a + a).is_zero:
                return CheckResult("field axioms", False, f"{a} + {a} != 0")
            if not a.is_zero and not (a * a.inverse() == ctx.one):
                return CheckResult("field axioms", False, f"{a} * inv({a}) != 1")
        for a in elems:
            for b in elems:
                if a + b != b + a or a * b != b * a:
                    return CheckResult("field axioms", False, "commutativity failed")
        for a in elems:
            for b in elems:
                for c in elems:
                    if (a + b) + c != a + (b + c) or (a * b) * c != a * (b * c):
                        return CheckResult("field axioms", False, "associativity failed")
                    if a * (b + c) != a * b + a * c:
                        return CheckResult("field axioms", False, "distributivity failed")
        # Z_N with composite N has zero divisors; GF(2^n) must not.
        if ctx.n >= 2:
            for a in elems[1:]:
                for b in elems[1:]:
                    if (a * b).is_zero:
                        return CheckResult("field axioms", False, f"zero divisor {a}*{b}")
    except Exception as exc:  # noqa: BLE001 - invariant suite reports, never raises
        return CheckResult("field axioms", False, repr(exc))
    return CheckResult("field axioms", True, f"exhaustive over {len(elems)} elements")


def check_label_bijection(sys: PhaseSpaceSystem) -> CheckResult:
    ctx = sys.ctx
    ok = all(ctx.parse(e.label) == e for e in ctx.elements())
    distinct = len(set(ctx.labels)) == ctx.order
    return CheckResult("label round-trip", ok and distinct, f"{ctx.order} labels")


# -- geometry ----------------------------------------------------------------


def check_affine_axioms(sys: PhaseSpaceSystem) -> CheckResult:
    ctx = sys.ctx
    n_pts = ctx.order**2
    all_lines = [ln for s in sys.striations for ln in s.lines]
    through: dict[Point, set[int]] = {}
    for idx, ln in enumerate(all_lines):
        for pt in ln.points:
            through.setdefault(pt, set()).add(idx)

    if any(len(ids) != ctx.order + 1 for ids in through.values()) or len(through) != n_pts:
        return CheckResult("affine axioms", False, "some point is not on exactly N+1 lines")

    pts = list(through)
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if len(through[pts[i]] & through[pts[j]]) != 1:
                return CheckResult(
                    "affine axioms", False, f"points {pts[i]}, {pts[j]} share != 1 line"
                )

    for i in range(len(all_lines)):
        for j in range(i + 1, len(all_lines)):
            common = intersect(all_lines[i], all_lines[j])
            if len(common) > 1:
                return CheckResult(
                    "affine axioms", False, f"distinct lines share {len(common)} points"
                )

    for s in sys.striations:
        covered = set()
        for ln in s.lines:
            if covered & ln.point_set:
                return CheckResult("affine axioms", False, f"striation {s.direction} overlaps")
            covered |= ln.point_set
        if len(covered) != n_pts:
            return CheckResult("affine axioms", False, f"striation {s.direction} misses points")
    return CheckResult(
        "affine axioms", True, f"{len(all_lines)} lines, {n_pts} points, exhaustive"
    )


def check_translation_geometry(sys: PhaseSpaceSystem) -> CheckResult:
    """Translations map lines to lines of the same striation."""
    ctx = sys.ctx
    line_class = {ln.point_set: s.direction for s in sys.striations for ln in s.lines}
    elems = ctx.elements()
    if ctx.n <= 3:
        vectors = [Point(q, p) for q in elems for p in elems]
    else:
        rng = np.random.default_rng(2024)
        vectors = [
            Point(elems[rng.integers(ctx.order)], elems[rng.integers(ctx.order)])
            for _ in range(20)
        ]
    for v in vectors:
        for s in sys.striations:
            for ln in s.lines:
                image = frozenset(pt + v for pt in ln.points)
                if line_class.get(image) != s.direction:
                    return CheckResult(
                        "translation geometry", False, f"translate by {v} broke striation {s.direction}"
                    )
    return CheckResult("translation geometry", True, f"{len(vectors)} vectors checked")


def check_ring_witness(sys: PhaseSpaceSystem) -> CheckResult:
    """Mod-N wrap-around lines break the geometry that GF lines satisfy."""
    if sys.n < 2:
        return CheckResult("ring-line witness", True, "skipped: Z_2 is a field")
    witness = find_wraparound_witness(sys.ctx.order)
    if witness is None:
        return CheckResult("ring-line witness", False, f"no witness found mod {sys.ctx.order}")
    eq1, eq2, shared = witness
    return CheckResult(
        "ring-line witness",
        True,
        f"mod {sys.ctx.order}: {eq1} and {eq2} share {len(shared)} points",
    )


# -- operators ----------------------------------------------------------------


def check_unitarity(sys: PhaseSpaceSystem) -> CheckResult:
    ctx = sys.ctx
    eye = np.eye(ctx.order)
    dev = 0.0
    for q in ctx.elements():
        for p in ctx.elements():
            u = translation_unitary(Point(q, p), sys.labeling).unitary
            dev = max(dev, float(np.max(np.abs(u @ u.conj().T - eye))))
    return _result("translation unitarity", dev, 1e-12)


def check_translation_homomorphism(sys: PhaseSpaceSystem) -> CheckResult:
    """H_q H_q' = H_(q+q') exactly, and likewise for V."""
    ctx = sys.ctx
    zero = ctx.zero
    for a in ctx.elements():
        for b in ctx.elements():
            ha = translation_unitary(Point(a, zero), sys.labeling).unitary
            hb = translation_unitary(Point(b, zero), sys.labeling).unitary
            target = translation_unitary(Point(a + b, zero), sys.labeling).unitary
            if np.max(np.abs(ha @ hb - target)) != 0.0:
                return CheckResult("translation homomorphism", False, f"H at {a},{b}")
            vq = translation_unitary(Point(zero, a), sys.labeling).unitary
            vp = translation_unitary(Point(zero, b), sys.labeling).unitary
            vt = translation_unitary(Point(zero, a + b), sys.labeling).unitary
            if np.max(np.abs(vq @ vp - vt)) != 0.0:
                return CheckResult("translation homomorphism", False, f"V at {a},{b}")
    return CheckResult("translation homomorphism", True, "entrywise exact")


def check_projective_closure(sys: PhaseSpaceSystem) -> CheckResult:
    ctx = sys.ctx
    elems = ctx.elements()
    points = [Point(q, p) for q in elems for p in elems]
    if ctx.n <= 2:
        pairs = [(v, w) for v in points for w in points]
    else:
        rng = np.random.default_rng(99)
        pairs = [
            (points[rng.integers(len(points))], points[rng.integers(len(points))])
            for _ in range(300)
        ]
    fourth_roots = np.array([1, 1j, -1, -1j])
    dev = 0.0
    for v, w in pairs:
        lam = projective_check(
            translation_unitary(v, sys.labeling), translation_unitary(w, sys.labeling)
        )
        dev = max(dev, float(np.min(np.abs(fourth_roots - lam))))
    return _result(f"projective closure ({len(pairs)} pairs)", dev)


def check_stabilizer_group(sys: PhaseSpaceSystem) -> CheckResult:
    """Each striation: N-1 stabilizers whose products stay on the ray up to phase."""
    for s, basis in zip(sys.striations, sys.bases):
        if len(s.stabilizer_vectors) != sys.dim - 1:
            return CheckResult("stabilizer group", False, f"striation {s.direction} count")
        ray_pts = set(s.ray.points)
        for op1 in basis.stabilizers:
            for op2 in basis.stabilizers:
                total = op1.vector + op2.vector
                if total not in ray_pts:
                    return CheckResult("stabilizer group", False, "product leaves ray")
                projective_check(op1, op2)  # raises if not proportional to U_(v+w)
    return CheckResult("stabilizer group", True, "closure up to phase verified")


# -- conjugate bases -----------------------------------------------------------


def check_mub(sys: PhaseSpaceSystem) -> CheckResult:
    if len(sys.bases) != sys.dim + 1:
        return CheckResult("mutual conjugacy", False, f"{len(sys.bases)} bases != N+1")
    report = check_conjugacy(list(sys.bases))
    return CheckResult(
        "mutual conjugacy",
        report.all_conjugate,
        f"{len(sys.bases)} bases, worst overlap deviation {report.worst_deviation:.3e}",
    )


def check_eigenvector_residuals(sys: PhaseSpaceSystem) -> CheckResult:
    dev = 0.0
    for basis in sys.bases:
        for op in basis.stabilizers:
            for v in basis.vectors:
                lam = np.vdot(v, op.unitary @ v)
                dev = max(dev, float(np.linalg.norm(op.unitary @ v - lam * v)))
    return _result("stabilizer eigen-residuals", dev)


def check_basis_uniqueness(sys: PhaseSpaceSystem) -> CheckResult:
    """Permuting the stabilizer list must reproduce the basis up to phase/order."""
    dev = 0.0
    for basis in sys.bases:
        redone = joint_eigenbasis([op.unitary for op in reversed(basis.stabilizers)])
        for v in redone:
            pv = np.outer(v, v.conj())
            best = min(
                float(np.max(np.abs(pv - np.outer(w, w.conj())))) for w in basis.vectors
            )
            dev = max(dev, best)
    return _result("basis uniqueness", dev)


# -- Wigner ----------------------------------------------------------------------


def check_a_structure(sys: PhaseSpaceSystem) -> CheckResult:
    stack = sys.net.phase_point_stack()
    dim = sys.dim
    dev = float(np.max(np.abs(stack - np.conj(np.transpose(stack, (0, 2, 1))))))
    traces = np.einsum("aii->a", stack)
    dev = max(dev, float(np.max(np.abs(traces - 1.0))))
    gram = np.einsum("aij,bji->ab", stack, stack)
    dev = max(dev, float(np.max(np.abs(gram - dim * np.eye(len(stack))))))
    dev = max(dev, float(np.max(np.abs(stack.sum(axis=0) - dim * np.eye(dim)))))
    return _result("phase-point operator structure", dev)


def check_a_covariance(sys: PhaseSpaceSystem) -> CheckResult:
    ctx = sys.ctx
    origin = Point(ctx.zero, ctx.zero)
    a0 = sys.net.phase_point_matrix(origin)
    dev = 0.0
    for q in ctx.elements():
        for p in ctx.elements():
            pt = Point(q, p)
            u = translation_unitary(pt, sys.labeling).unitary
            dev = max(dev, float(np.max(np.abs(sys.net.phase_point_matrix(pt) - u @ a0 @ u.conj().T))))
    return _result("phase-point covariance", dev)


def check_wigner_roundtrip(sys: PhaseSpaceSystem) -> CheckResult:
    from .wigner import state_from_wigner

    rng = np.random.default_rng(11)
    dev = 0.0
    for _ in range(20):
        rho = random_density_matrix(rng, sys.dim)
        grid = wigner_from_state(rho, sys.net)
        dev = max(dev, abs(grid.total - 1.0))
        back = state_from_wigner(grid, sys.net)
        dev = max(dev, float(np.max(np.abs(back - rho))))
    return _result("wigner round-trip", dev)


def check_line_sums(sys: PhaseSpaceSystem) -> CheckResult:
    rng = np.random.default_rng(12)
    dev = 0.0
    for _ in range(20):
        rho = random_density_matrix(rng, sys.dim)
        grid = wigner_from_state(rho, sys.net)
        for s in sys.striations:
            for ln in s.lines:
                prob = float(np.real(np.trace(rho @ sys.net.projector(ln))))
                dev = max(dev, abs(line_sum(grid, ln) - prob))
    return _result("line sums = outcome probabilities", dev)


def check_grid_covariance(sys: PhaseSpaceSystem) -> CheckResult:
    ctx = sys.ctx
    elems = ctx.elements()
    rng = np.random.default_rng(13)
    rho = random_density_matrix(rng, sys.dim)
    grid = wigner_from_state(rho, sys.net)
    if ctx.n <= 2:
        vectors = [Point(q, p) for q in elems for p in elems]
    else:
        vectors = [
            Point(elems[rng.integers(ctx.order)], elems[rng.integers(ctx.order)])
            for _ in range(20)
        ]
    dev = 0.0
    for v in vectors:
        u = translation_unitary(v, sys.labeling).unitary
        moved = wigner_from_state(u @ rho @ u.conj().T, sys.net)
        dev = max(dev, float(np.max(np.abs(translate_grid(grid, v).values - moved.values))))
    return _result("grid covariance", dev)


def check_golden_tables(sys: PhaseSpaceSystem) -> CheckResult:
    """Known one- and two-qubit grids, including the negativity extremum."""
    if sys.n == 1:
        from .states import registry_vector

        expected = {
            "up": np.array([[0.5, 0.5], [0.0, 0.0]]),
            "plus": np.array([[0.5, 0.0], [0.5, 0.0]]),
            "y+": np.array([[0.5, 0.0], [0.0, 0.5]]),
        }
        hi = (1 + 1 / math.sqrt(3)) / 4
        lo = (1 - math.sqrt(3)) / 4
        expected["tilted-111"] = np.array([[lo, hi], [hi, hi]])
        dev = 0.0
        for name, grid_ref in expected.items():
            _, vec = registry_vector(name)
            grid = wigner_from_state(np.outer(vec, vec.conj()), sys.net)
            dev = max(dev, float(np.max(np.abs(grid.values - grid_ref))))
        return _result("golden grids", dev)
    if sys.n == 2:
        from .states import registry_vector

        quarter = 0.25
        refs = {}
        refs["upup"] = np.zeros((4, 4))
        refs["upup"][0, :] = quarter
        refs["upright"] = np.zeros((4, 4))
        refs["upright"][np.ix_([0, 1], [0, 2])] = quarter
        refs["singlet"] = np.zeros((4, 4))
        refs["singlet"][np.ix_([1, 2], [1, 2])] = quarter
        dev = 0.0
        for name, grid_ref in refs.items():
            _, vec = registry_vector(name)
            grid = wigner_from_state(np.outer(vec, vec.conj()), sys.net)
            dev = max(dev, float(np.max(np.abs(grid.values - grid_ref))))
        return _result("golden grids", dev, 1e-12)
    return CheckResult("golden grids", True, "skipped: no reference tables beyond n=2")


def check_negativity_floor(sys: PhaseSpaceSystem, samples: int = 100_000) -> CheckResult:
    """One-qubit minimum W over pure states is (1 - sqrt(3))/4, attained by tilted-111."""
    if sys.n != 1:
        return CheckResult("negativity floor", True, "skipped: one-qubit property")
    rng = np.random.default_rng(14)
    vecs = rng.standard_normal((samples, 2)) + 1j * rng.standard_normal((samples, 2))
    vecs /= np.linalg.norm(vecs, axis=1, keepdims=True)
    stack = sys.net.phase_point_stack()
    w = np.real(np.einsum("ni,aij,nj->na", vecs.conj(), stack, vecs)) / 2.0
    floor = (1 - math.sqrt(3)) / 4
    observed = float(w.min())
    from .states import registry_vector

    _, tilt = registry_vector("tilted-111")
    attained = float(
        wigner_from_state(np.outer(tilt, tilt.conj()), sys.net).values.min()
    )
    ok = observed >= floor - 1e-6 and abs(attained - floor) <= 1e-6
    return CheckResult(
        "negativity floor", ok, f"min over {samples} states {observed:.6f}, floor {floor:.6f}"
    )


def check_six_states(sys: PhaseSpaceSystem) -> CheckResult:
    """Exactly the six Pauli eigenstates give two-half/two-zero grids."""
    if sys.n != 1:
        return CheckResult("six-state pattern", True, "skipped: one-qubit property")
    from .states import registry_vector

    def is_pattern(values: np.ndarray) -> bool:
        flat = np.sort(values.reshape(-1))
        return bool(np.max(np.abs(flat - np.array([0, 0, 0.5, 0.5]))) < TOL)

    for name in ("up", "down", "plus", "minus", "y+", "y-"):
        _, vec = registry_vector(name)
        if not is_pattern(wigner_from_state(np.outer(vec, vec.conj()), sys.net).values):
            return CheckResult("six-state pattern", False, f"{name} lacks the pattern")
    rng = np.random.default_rng(15)
    for _ in range(100):
        vec = random_pure_state(rng, 2)
        if is_pattern(wigner_from_state(np.outer(vec, vec.conj()), sys.net).values):
            return CheckResult("six-state pattern", False, "random state matched the pattern")
    return CheckResult("six-state pattern", True, "6 eigenstates match, 100 random states do not")


# -- tomography -------------------------------------------------------------------


def check_tomography_exact(sys: PhaseSpaceSystem) -> CheckResult:
    rng = np.random.default_rng(16)
    dev = 0.0
    for _ in range(5):
        rho = random_density_matrix(rng, sys.dim)
        plan = MeasurementPlan(bases=sys.bases, shots_per_basis=0, seed=0)
        report = estimate_state(simulate_counts(rho, plan), sys.net, truth=rho)
        dev = max(dev, report.trace_distance)
    return _result("exact-mode reconstruction", dev)


def check_tomography_determinism(sys: PhaseSpaceSystem) -> CheckResult:
    rng = np.random.default_rng(17)
    rho = random_density_matrix(rng, sys.dim)
    plan = MeasurementPlan(bases=sys.bases, shots_per_basis=128, seed=424242)
    same = simulate_counts(rho, plan) == simulate_counts(rho, plan)
    return CheckResult("sampling determinism", same, "identical records for one seed")


def check_projection_idempotent(sys: PhaseSpaceSystem) -> CheckResult:
    rng = np.random.default_rng(18)
    dev = 0.0
    for _ in range(5):
        rho = random_density_matrix(rng, sys.dim)
        dev = max(dev, float(np.max(np.abs(project_to_physical(rho) - rho))))
    return _result("physical projection idempotence", dev, 1e-12)


def check_statistical_consistency(sys: PhaseSpaceSystem) -> CheckResult:
    """Finite-shot estimates approach the truth (coarse sanity, not the scaling study)."""
    rng = np.random.default_rng(19)
    rho = random_density_matrix(rng, sys.dim)
    dists = []
    for shots in (64, 4096):
        td = [
            estimate_state(
                simulate_counts(rho, MeasurementPlan(sys.bases, shots, seed)),
                sys.net,
                truth=rho,
            ).trace_distance
            for seed in range(8)
        ]
        dists.append(float(np.mean(td)))
    ok = dists[1] < dists[0]
    return CheckResult(
        "statistical consistency", ok, f"mean trace distance {dists[0]:.4f} -> {dists[1]:.4f}"
    )


ALL_CHECKS = [
    check_field_axioms,
    check_label_bijection,
    check_affine_axioms,
    check_translation_geometry,
    check_ring_witness,
    check_unitarity,
    check_translation_homomorphism,
    check_projective_closure,
    check_stabilizer_group,
    check_mub,
    check_eigenvector_residuals,
    check_basis_uniqueness,
    check_a_structure,
    check_a_covariance,
    check_wigner_roundtrip,
    check_line_sums,
    check_grid_covariance,
    check_golden_tables,
    check_negativity_floor,
    check_six_states,
    check_tomography_exact,
    check_tomography_determinism,
    check_projection_idempotent,
    check_statistical_consistency,
]


def run_checks(n_max: int) -> list[CheckResult]:
    """Every invariant check for n = 1..n_max, names prefixed with the degree."""
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    results = []
    for n in range(1, n_max + 1):
        sys = build_system(n)
        for check in ALL_CHECKS:
            res = check(sys)
            results.append(CheckResult(f"n={n}: {res.name}", res.passed, res.detail))
    return results
