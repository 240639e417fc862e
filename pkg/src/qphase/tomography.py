"""Conjugate-basis measurement simulation and statistical state reconstruction.

Counts come from deterministic counter-based streams keyed by (seed,
striation), so per-basis simulation is reproducible bit-exactly and
order-insensitive.  Reconstruction is linear inversion through line sums:
W_a = (sum of the empirical line probabilities through a, minus 1)/N, then
rho = sum_a W_a A_a, with optional projection back to the physical set.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mub import StriationBasis
from .states import InvalidStateError, validate_density_matrix
from .wigner import QuantumNet, WignerGrid, state_from_wigner, wigner_from_state

PROB_DRIFT_TOL = 1e-9

_UINT64_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class MeasurementPlan:
    """A full conjugate-measurement schedule.

    shots_per_basis = 0 is the exact-probability sentinel: the true outcome
    distribution flows through the same reconstruction path, giving the
    infinite-ensemble limit.
    """

    bases: tuple[StriationBasis, ...]
    shots_per_basis: int
    seed: int

    def __post_init__(self) -> None:
        if self.shots_per_basis < 0:
            raise ValueError("shots_per_basis must be >= 0 (0 = exact mode)")
        dims = {b.dim for b in self.bases}
        if len(dims) != 1:
            raise ValueError("bases have mixed dimensions")
        dim = dims.pop()
        ids = sorted(b.striation for b in self.bases)
        if ids != list(range(dim + 1)):
            raise ValueError(f"plan needs one basis per striation 0..{dim}, got ids {ids}")

    @property
    def dim(self) -> int:
        return self.bases[0].dim

    @property
    def exact(self) -> bool:
        return self.shots_per_basis == 0


@dataclass(eq=False)
class CountsRecord:
    """Per-striation outcome counts (or exact frequencies when shots = 0)."""

    n: int
    shots: int
    seed: int
    counts: dict[int, np.ndarray]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CountsRecord):
            return NotImplemented
        return (
            self.n == other.n
            and self.shots == other.shots
            and self.seed == other.seed
            and self.counts.keys() == other.counts.keys()
            and all(np.array_equal(self.counts[k], other.counts[k]) for k in self.counts)
        )

    def frequencies(self, striation: int) -> np.ndarray:
        c = self.counts[striation]
        if self.shots == 0:
            return c
        return c / self.shots

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "shots": self.shots,
            "seed": self.seed,
            "counts": {
                str(k): [float(x) if self.shots == 0 else int(x) for x in v]
                for k, v in self.counts.items()
            },
        }

    @classmethod
    def from_json_dict(cls, payload: dict) -> "CountsRecord":
        shots = int(payload["shots"])
        dtype = float if shots == 0 else np.int64
        counts = {int(k): np.array(v, dtype=dtype) for k, v in payload["counts"].items()}
        return cls(n=int(payload["n"]), shots=shots, seed=int(payload["seed"]), counts=counts)


def outcome_probabilities(rho: np.ndarray, basis: StriationBasis | np.ndarray) -> np.ndarray:
    """p_k = <v_k| rho |v_k>, clipped to [0, 1] and renormalized.

    Probability drift beyond 1e-9 (before renormalization) means the input
    was not a physical state and raises.
    """
    vectors = basis.vectors if isinstance(basis, StriationBasis) else np.asarray(basis)
    rho = validate_density_matrix(rho, vectors.shape[1])
    p = np.real(np.einsum("ki,ij,kj->k", vectors.conj(), rho, vectors))
    drift = abs(float(p.sum()) - 1.0)
    if drift >= PROB_DRIFT_TOL:
        raise InvalidStateError(f"outcome probabilities drift from 1 by {drift:.3e}")
    p = np.clip(p, 0.0, 1.0)
    return p / p.sum()


def _basis_stream(seed: int, striation: int) -> np.random.Generator:
    """Counter-based stream keyed by (seed, striation): independent per basis."""
    key = np.array([seed & _UINT64_MASK, striation & _UINT64_MASK], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _sample_counts(p: np.ndarray, shots: int, rng: np.random.Generator) -> np.ndarray:
    """Categorical draws via inverse transform; shot i uses stream position i."""
    edges = np.cumsum(p)
    edges[-1] = 1.0
    u = rng.random(shots)
    outcomes = np.searchsorted(edges, u, side="right")
    return np.bincount(outcomes, minlength=len(p)).astype(np.int64)


def simulate_counts(rho: np.ndarray, plan: MeasurementPlan) -> CountsRecord:
    """Measure shots_per_basis copies in each conjugate basis.

    Deterministic: the same (rho, plan) always yields the identical record,
    independent of the order the bases are processed in.
    """
    n = int(np.log2(plan.dim))
    counts: dict[int, np.ndarray] = {}
    for basis in plan.bases:
        p = outcome_probabilities(rho, basis)
        if plan.exact:
            counts[basis.striation] = p
        else:
            rng = _basis_stream(plan.seed, basis.striation)
            counts[basis.striation] = _sample_counts(p, plan.shots_per_basis, rng)
    return CountsRecord(n=n, shots=plan.shots_per_basis, seed=plan.seed, counts=counts)


def estimate_wigner(counts: CountsRecord, net: QuantumNet) -> WignerGrid:
    """Linear-inversion grid estimate from outcome frequencies.

    W_a = (sum over the N+1 lines through a of the empirical probability of
    the outcome assigned to that line, minus 1) / N.  With exact frequencies
    this reproduces wigner_from_state exactly.
    """
    dim = net.dim
    missing = [s.direction for s in net.striations if s.direction not in counts.counts]
    if missing:
        raise ValueError(f"counts record is missing striations {missing}")
    table = net.outcome_index_table()
    totals = np.zeros(len(table))
    for col, striation in enumerate(net.striations):
        freq = np.asarray(counts.frequencies(striation.direction), dtype=float)
        totals += freq[table[:, col]]
    values = ((totals - 1.0) / dim).reshape(net.ctx.order, net.ctx.order)
    return WignerGrid(net.ctx, values)


# -- distance measures ------------------------------------------------------


def _psd_sqrt(rho: np.ndarray) -> np.ndarray:
    eigvals, eigvecs = np.linalg.eigh(rho)
    eigvals = np.clip(eigvals, 0.0, None)
    return (eigvecs * np.sqrt(eigvals)) @ eigvecs.conj().T


def fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Squared-overlap fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2."""
    root = _psd_sqrt(rho)
    inner = root @ sigma @ root
    eigvals = np.clip(np.linalg.eigvalsh(inner), 0.0, None)
    return float(np.sqrt(eigvals).sum() ** 2)


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Half the trace norm of rho - sigma."""
    eigvals = np.linalg.eigvalsh(rho - sigma)
    return float(0.5 * np.abs(eigvals).sum())


def project_to_physical(rho: np.ndarray) -> np.ndarray:
    """Nearest physical state by eigenvalue truncation: clip negatives, renormalize."""
    rho = 0.5 * (rho + rho.conj().T)
    eigvals, eigvecs = np.linalg.eigh(rho)
    eigvals = np.clip(eigvals, 0.0, None)
    total = eigvals.sum()
    if total <= 0:
        raise InvalidStateError("estimate has no positive eigenvalue to keep")
    eigvals = eigvals / total
    return (eigvecs * eigvals) @ eigvecs.conj().T


@dataclass(eq=False)
class ReconstructionReport:
    """Outcome of a simulate-and-reconstruct run, with metrics when truth is known."""

    wigner: WignerGrid
    rho_raw: np.ndarray
    rho_projected: np.ndarray | None
    shots: int
    seed: int
    fidelity: float | None = None
    trace_distance: float | None = None
    max_wigner_error: float | None = None

    @property
    def estimate(self) -> np.ndarray:
        return self.rho_projected if self.rho_projected is not None else self.rho_raw


def estimate_state(
    counts: CountsRecord,
    net: QuantumNet,
    project: bool = True,
    truth: np.ndarray | None = None,
) -> ReconstructionReport:
    """Reconstruct rho from counts; optionally project to the physical set.

    When the true state is supplied the report carries fidelity, trace
    distance and the worst grid deviation, all measured against the projected
    estimate (or the raw one when projection is disabled).
    """
    grid = estimate_wigner(counts, net)
    rho_raw = state_from_wigner(grid, net)
    rho_proj = project_to_physical(rho_raw) if project else None
    report = ReconstructionReport(
        wigner=grid,
        rho_raw=rho_raw,
        rho_projected=rho_proj,
        shots=counts.shots,
        seed=counts.seed,
    )
    if truth is not None:
        truth = validate_density_matrix(truth, net.dim)
        estimate = report.estimate
        report.fidelity = min(fidelity(truth, estimate), 1.0)
        report.trace_distance = trace_distance(truth, estimate)
        true_grid = wigner_from_state(truth, net)
        report.max_wigner_error = float(np.max(np.abs(grid.values - true_grid.values)))
    return report


@dataclass(frozen=True)
class ScalingPoint:
    """Monte-Carlo error averages for one ensemble size."""

    shots: int
    mean_max_wigner_error: float
    mean_trace_distance: float


def error_scaling_study(
    rho: np.ndarray,
    net: QuantumNet,
    mub_set: list[StriationBasis],
    shot_list: list[int],
    seeds: list[int],
) -> list[ScalingPoint]:
    """Mean reconstruction errors across seeds for each ensemble size.

    shot_list must be ascending; the expected statistical behavior is a
    log-log slope near -1/2 for both error measures.
    """
    if sorted(shot_list) != list(shot_list):
        raise ValueError("shot_list must be ascending")
    if not seeds:
        raise ValueError("need at least one seed")
    rho = validate_density_matrix(rho, net.dim)
    bases = tuple(mub_set)
    rows = []
    for shots in shot_list:
        dw, td = [], []
        for seed in seeds:
            plan = MeasurementPlan(bases=bases, shots_per_basis=shots, seed=seed)
            counts = simulate_counts(rho, plan)
            report = estimate_state(counts, net, project=True, truth=rho)
            dw.append(report.max_wigner_error)
            td.append(report.trace_distance)
        rows.append(ScalingPoint(shots, float(np.mean(dw)), float(np.mean(td))))
    return rows


def loglog_slope(points: list[ScalingPoint]) -> float:
    """Least-squares slope of log(mean max error) against log(shots)."""
    x = np.log([p.shots for p in points])
    y = np.log([p.mean_max_wigner_error for p in points])
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)
