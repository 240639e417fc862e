"""Line-to-state assignments, phase-point operators, and Wigner grids.

A quantum net assigns one basis vector (as a rank-1 projector) to every line
so that translated lines carry translated vectors.  Summing the N+1
projectors through a point and subtracting the identity gives the Hermitian
phase-point operator A of that point; W = tr(rho A)/N maps states to real
N x N grids whose line sums are measurement probabilities, and
rho = sum_a W_a A_a inverts the map exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fields import ContextMismatchError, FieldContext
from .geometry import Line, Point, Striation, enumerate_striations
from .mub import StriationBasis
from .operators import QubitLabeling, translation_unitary
from .serialize import round_float
from .states import validate_density_matrix

CLOSURE_TOL = 1e-9
IMAG_RESIDUE_TOL = 1e-9


class NetConstructionError(RuntimeError):
    """The requested line-to-vector assignment cannot be realized consistently."""


def _ray_vectors_1q() -> list[np.ndarray]:
    s = 1.0 / np.sqrt(2.0)
    return [
        np.array([1, 0], dtype=complex),           # vertical ray (q = 0): spin up
        np.array([s, s], dtype=complex),           # horizontal ray (p = 0): spin right
        np.array([s, 1j * s], dtype=complex),      # diagonal ray: +1 eigenstate of sigma_y
    ]


def _ray_vectors_2q() -> list[np.ndarray]:
    return [
        np.array([1, 0, 0, 0], dtype=complex),                     # q = 0: up-up
        np.array([1, 1, 1, 1], dtype=complex) / 2,                 # p = 0: right-right
        np.array([1, -1j, 1j, 1], dtype=complex) / 2,              # slope 1 ray
        np.array([1, 1, 1j, -1j], dtype=complex) / 2,              # slope w ray
        np.array([1, -1j, 1, 1j], dtype=complex) / 2,              # slope w2 ray
    ]


def _hermitian_form(u: np.ndarray) -> np.ndarray:
    """Rescale a translation unitary to a Hermitian involution (u or i*u)."""
    if np.max(np.abs(u - u.conj().T)) < 1e-9:
        return u
    t = 1j * u
    if np.max(np.abs(t - t.conj().T)) > 1e-9:
        raise NetConstructionError("translation unitary is neither Hermitian nor anti-Hermitian")
    return t


def _lex_sign_ray_vector(striation: Striation, basis: StriationBasis, labeling: QubitLabeling) -> np.ndarray:
    """Ray vector for n >= 3: lexicographically-first stabilizer sign pattern.

    Each stabilizer unitary is rescaled by a fourth root of unity to a
    Hermitian involution; each basis vector then carries a tuple of +-1
    eigenvalues.  The vector whose sign tuple is lexicographically first
    (+1 before -1, stabilizers in canonical ray-point order) is selected.
    """
    forms = [
        _hermitian_form(translation_unitary(v, labeling).unitary)
        for v in striation.stabilizer_vectors
    ]
    best: tuple[tuple[int, ...], np.ndarray] | None = None
    for k in range(basis.vectors.shape[0]):
        v = basis.vectors[k]
        signs = []
        for t in forms:
            val = float(np.real(np.vdot(v, t @ v)))
            if abs(abs(val) - 1.0) > 1e-6:
                raise NetConstructionError("basis vector is not a stabilizer eigenvector")
            signs.append(0 if val > 0 else 1)
        key = tuple(signs)
        if best is None or key < best[0]:
            best = (key, v)
    assert best is not None
    return best[1]


@dataclass(frozen=True, eq=False)
class QuantumNet:
    """Covariant assignment of basis vectors to lines.

    vector_index maps each line to the index of its vector within the
    striation's basis; projectors and phase-point operators are cached after
    construction, which makes the net safe for concurrent reads.
    """

    ctx: FieldContext
    labeling: QubitLabeling
    striations: tuple[Striation, ...]
    bases: tuple[StriationBasis, ...]
    vector_index: dict[Line, int]
    striation_of: dict[Line, int]
    _lines_through: dict[Point, tuple[Line, ...]] = field(repr=False, compare=False)
    _aops: dict[Point, np.ndarray] = field(default_factory=dict, repr=False, compare=False)
    _aux: dict[str, np.ndarray] = field(default_factory=dict, repr=False, compare=False)

    @property
    def dim(self) -> int:
        return self.ctx.order

    def projector(self, line: Line) -> np.ndarray:
        return self.bases[self.striation_of[line]].projector(self.vector_index[line])

    def lines_through(self, pt: Point) -> tuple[Line, ...]:
        return self._lines_through[pt]

    def phase_point_matrix(self, pt: Point) -> np.ndarray:
        cached = self._aops.get(pt)
        if cached is None:
            a = -np.eye(self.dim, dtype=complex)
            for line in self.lines_through(pt):
                a = a + self.projector(line)
            trace = complex(np.trace(a))
            if abs(trace - 1.0) > CLOSURE_TOL:
                raise NetConstructionError(f"phase-point operator at {pt} has trace {trace}")
            a.setflags(write=False)
            self._aops[pt] = cached = a
        return cached

    def phase_point_stack(self) -> np.ndarray:
        """All A operators as one array, indexed [q_index * N + p_index]."""
        cached = self._aux.get("stack")
        if cached is None:
            elements = self.ctx.elements()
            cached = np.array(
                [self.phase_point_matrix(Point(q, p)) for q in elements for p in elements]
            )
            cached.setflags(write=False)
            self._aux["stack"] = cached
        return cached

    def outcome_index_table(self) -> np.ndarray:
        """outcome_index_table()[q_index * N + p_index, s] is the basis-vector
        index of the line through that point in striation s."""
        cached = self._aux.get("outcome_table")
        if cached is None:
            elements = self.ctx.elements()
            n_elems = self.ctx.order
            table = np.empty((n_elems * n_elems, len(self.striations)), dtype=np.intp)
            for qi, q in enumerate(elements):
                for pi, p in enumerate(elements):
                    for s, line in enumerate(self.lines_through(Point(q, p))):
                        table[qi * n_elems + pi, s] = self.vector_index[line]
            table.setflags(write=False)
            self._aux["outcome_table"] = cached = table
        return cached


@dataclass(frozen=True, eq=False)
class PhasePointOperator:
    """Hermitian operator A attached to one phase-space point."""

    point: Point
    matrix: np.ndarray


def default_net(ctx: FieldContext, labeling: QubitLabeling, mub_set: list[StriationBasis]) -> QuantumNet:
    """The standard quantum net.

    Ray assignments: for one and two qubits, the conventional explicit
    choices (axis states on the axis rays, fixed vectors on the diagonal-type
    rays); for n >= 3, the lexicographic stabilizer-sign rule.  All remaining
    lines are filled in by covariance closure, and the closure is verified
    over every translation path rather than assumed.
    """
    striations = enumerate_striations(ctx)
    if len(mub_set) != len(striations):
        raise NetConstructionError(f"expected {len(striations)} bases, got {len(mub_set)}")

    if ctx.n == 1:
        rays = _ray_vectors_1q()
    elif ctx.n == 2:
        rays = _ray_vectors_2q()
    else:
        rays = [
            _lex_sign_ray_vector(s, b, labeling) for s, b in zip(striations, mub_set)
        ]

    vector_index: dict[Line, int] = {}
    striation_of: dict[Line, int] = {}
    for striation, basis, ray_vec in zip(striations, mub_set, rays):
        # The declared ray vector must be one of the striation's basis vectors.
        overlaps = np.abs(basis.vectors.conj() @ ray_vec) ** 2
        if overlaps.max() < 1.0 - CLOSURE_TOL:
            raise NetConstructionError(
                f"ray vector for striation {striation.direction} is not a basis vector "
                f"(best overlap {overlaps.max():.6f})"
            )
        ray_k = int(np.argmax(overlaps))
        proj_ray = basis.projector(ray_k)

        taken: dict[int, Line] = {}
        for line in striation.lines:
            # Any point of the line translates the ray onto it; all such
            # paths must agree (projective phases cancel on projectors).
            candidates = []
            for w in line.points:
                u = translation_unitary(w, labeling).unitary
                candidates.append(u @ proj_ray @ u.conj().T)
            reference = candidates[0]
            for other in candidates[1:]:
                if np.max(np.abs(other - reference)) > CLOSURE_TOL:
                    raise NetConstructionError(
                        f"covariance closure is path-dependent on line {line} "
                        f"of striation {striation.direction}"
                    )
            fit = np.real(np.einsum("ki,ij,kj->k", basis.vectors.conj(), reference, basis.vectors))
            k = int(np.argmax(fit))
            if fit[k] < 1.0 - CLOSURE_TOL:
                raise NetConstructionError(
                    f"translated ray projector matches no basis vector on striation "
                    f"{striation.direction} (best fit {fit[k]:.6f})"
                )
            if k in taken:
                raise NetConstructionError(
                    f"striation {striation.direction} maps two lines to one vector"
                )
            taken[k] = line
            vector_index[line] = k
            striation_of[line] = striation.direction

    lines_through: dict[Point, tuple[Line, ...]] = {}
    for q in ctx.elements():
        for p in ctx.elements():
            pt = Point(q, p)
            lines_through[pt] = tuple(
                next(line for line in s.lines if pt in line) for s in striations
            )

    return QuantumNet(
        ctx=ctx,
        labeling=labeling,
        striations=striations,
        bases=tuple(mub_set),
        vector_index=vector_index,
        striation_of=striation_of,
        _lines_through=lines_through,
    )


def phase_point_operator(alpha: Point, net: QuantumNet) -> PhasePointOperator:
    """A_alpha = sum of the N+1 line projectors through alpha, minus identity."""
    if alpha.ctx is not net.ctx:
        raise ContextMismatchError("point and net use different field contexts")
    return PhasePointOperator(alpha, net.phase_point_matrix(alpha))


@dataclass(frozen=True, eq=False)
class WignerGrid:
    """Real quasi-probability values on the N x N grid, indexed [q][p].

    Indices follow the canonical element order of the context; rendering
    puts the origin bottom-left with p increasing upward.
    """

    ctx: FieldContext
    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        n_elems = self.ctx.order
        if self.values.shape != (n_elems, n_elems):
            raise ValueError(f"grid must be {n_elems}x{n_elems}, got {self.values.shape}")
        self.values.setflags(write=False)

    def value_at(self, pt: Point) -> float:
        return float(self.values[pt.q.index, pt.p.index])

    @property
    def total(self) -> float:
        return float(self.values.sum())

    def to_json_dict(self, precision: int | None = None) -> dict:
        return {
            "n": self.ctx.n,
            "order": list(self.ctx.labels),
            "values": [[round_float(x, precision) for x in row] for row in self.values],
        }


def wigner_from_state(rho: np.ndarray, net: QuantumNet) -> WignerGrid:
    """W_a = tr(rho A_a) / N for every grid point.

    The input must be a physical state (Hermitian, unit trace, PSD within
    1e-9); a large imaginary residue in any W value signals a broken net and
    raises rather than being dropped.
    """
    rho = validate_density_matrix(rho, net.dim)
    n_elems = net.ctx.order
    stack = net.phase_point_stack()
    w = np.einsum("aij,ji->a", stack, rho) / net.dim
    residue = float(np.max(np.abs(w.imag)))
    if residue > IMAG_RESIDUE_TOL:
        raise NetConstructionError(f"Wigner value has imaginary residue {residue:.3e}")
    return WignerGrid(net.ctx, w.real.reshape(n_elems, n_elems).copy())


def state_from_wigner(grid: WignerGrid, net: QuantumNet) -> np.ndarray:
    """rho = sum_a W_a A_a; exact inverse of wigner_from_state."""
    if grid.ctx is not net.ctx:
        raise ContextMismatchError("grid and net use different field contexts")
    if abs(grid.total - 1.0) > 1e-6:
        raise ValueError(f"grid sums to {grid.total!r}, expected 1")
    stack = net.phase_point_stack()
    return np.einsum("a,aij->ij", grid.values.reshape(-1).astype(complex), stack)


def line_sum(grid: WignerGrid, line: Line) -> float:
    """Sum of W over the line; equals the probability of the line's outcome."""
    if grid.ctx is not line.ctx:
        raise ContextMismatchError("grid and line use different field contexts")
    return float(sum(grid.values[pt.q.index, pt.p.index] for pt in line.points))


def translate_grid(grid: WignerGrid, v: Point) -> WignerGrid:
    """Grid of the translated state: W'(a) = W(a - v).

    Covariance contract: translate_grid(wigner_from_state(rho), v) equals
    wigner_from_state(U_v rho U_v^dag) for the net's translation unitaries.
    """
    if grid.ctx is not v.ctx:
        raise ContextMismatchError("grid and vector use different field contexts")
    elements = grid.ctx.elements()
    # In characteristic 2, a - v = a + v.
    perm_q = [(e + v.q).index for e in elements]
    perm_p = [(e + v.p).index for e in elements]
    return WignerGrid(grid.ctx, grid.values[np.ix_(perm_q, perm_p)].copy())


def grid_ascii(grid: WignerGrid, precision: int = 3) -> str:
    """Fixed-point table, origin bottom-left, p increasing upward."""
    n_elems = grid.ctx.order
    labels = grid.ctx.labels
    width = max(precision + 4, max(len(lab) for lab in labels) + 1)

    def fmt(x: float) -> str:
        r = round(float(x), precision)
        if r == 0:
            r = 0.0
        return f"{r:>{width}.{precision}f}"

    lines = []
    for pi in reversed(range(n_elems)):
        row = "".join(fmt(grid.values[qi, pi]) for qi in range(n_elems))
        lines.append(f"p={labels[pi]:<3}|{row}")
    lines.append("    +" + "-" * (width * n_elems))
    lines.append("     " + "".join(f"{('q=' + lab):>{width}}" for lab in labels))
    return "\n".join(lines)
