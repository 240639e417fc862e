"""Translation unitaries on state space and the dense linear algebra behind them.

A phase-space translation by (q0, p0) acts on the 2^n-dimensional state space
as a tensor product of sigma_x factors (for the q component) times sigma_z
factors (for the p component).  Which tensor slot each field-basis coefficient
drives is fixed by a QubitLabeling; the representation is projective, so
products of translation unitaries close only up to fourth-root-of-unity
phases.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .fields import ContextMismatchError, FieldContext, FieldElement
from .geometry import Point

UNITARITY_TOL = 1e-12
COMMUTE_TOL = 1e-10
EIGEN_CLUSTER_TOL = 1e-6


class NonCommutingError(ValueError):
    """A joint eigenbasis was requested for operators that do not commute."""

    def __init__(self, i: int, j: int, deviation: float):
        self.pair = (i, j)
        self.deviation = deviation
        super().__init__(f"operators {i} and {j} do not commute (max deviation {deviation:.3e})")


_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli(name: str) -> np.ndarray:
    """The 2x2 Pauli matrix in the basis where Z = diag(1, -1)."""
    try:
        return _PAULI[name].copy()
    except KeyError:
        raise ValueError(f"unknown Pauli name {name!r}; expected one of I, X, Y, Z") from None


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Tensor product; dimensions multiply."""
    return np.kron(a, b)


# -- GF(2) linear algebra for basis expansions -----------------------------


def _gf2_invert(rows: list[int], n: int) -> list[int]:
    """Invert an n x n matrix over GF(2); rows are ints, bit (n-1-c) = column c."""
    aug = [(row << n) | (1 << (n - 1 - i)) for i, row in enumerate(rows)]
    for col in range(n):
        pivot_bit = 2 * n - 1 - col
        pivot = next((r for r in range(col, n) if aug[r] >> pivot_bit & 1), None)
        if pivot is None:
            raise ValueError("matrix is singular over GF(2)")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        for r in range(n):
            if r != col and aug[r] >> pivot_bit & 1:
                aug[r] ^= aug[col]
    return [row & ((1 << n) - 1) for row in aug]


def _expansion_matrix(basis: Sequence[FieldElement]) -> list[int]:
    """Inverse of the matrix whose columns are the basis coefficient vectors.

    Row i of the result gives element -> coefficient of basis[i]; raises if
    the basis is linearly dependent.
    """
    n = basis[0].ctx.n
    if len(basis) != n:
        raise ValueError(f"basis must have {n} elements, got {len(basis)}")
    rows = []
    for r in range(n):
        row = 0
        for c, e in enumerate(basis):
            row |= (e.bits >> r & 1) << (n - 1 - c)
        rows.append(row)
    try:
        return _gf2_invert(rows, n)
    except ValueError:
        raise ValueError("basis elements are linearly dependent over Z2") from None


def _coords(bits: int, inverse_rows: list[int], n: int) -> tuple[int, ...]:
    out = []
    for r in range(n):
        acc = 0
        for k in range(n):
            acc ^= (inverse_rows[r] >> (n - 1 - k) & 1) & (bits >> k & 1)
        out.append(acc)
    return tuple(out)


def trace_dual_basis(basis: Sequence[FieldElement]) -> tuple[FieldElement, ...]:
    """Basis {f_j} with trace(e_i * f_j) = delta_ij for the given {e_i}."""
    ctx = basis[0].ctx
    n = ctx.n
    rows = []
    for r in range(n):
        row = 0
        for c in range(n):
            row |= (basis[r] * basis[c]).trace() << (n - 1 - c)
        rows.append(row)
    inv = _gf2_invert(rows, n)
    dual = []
    for j in range(n):
        bits = 0
        for i in range(n):
            if inv[i] >> (n - 1 - j) & 1:
                bits ^= basis[i].bits
        dual.append(ctx.element(bits))
    return tuple(dual)


@dataclass(frozen=True)
class QubitLabeling:
    """How field coordinates map onto tensor slots.

    q is expanded in q_basis and p in p_basis (both bases of GF(2^n) over
    Z2); the coefficient of basis element i drives tensor slot
    factor_order[i].  The default order puts the most significant basis
    element in the leftmost slot.
    """

    ctx: FieldContext
    q_basis: tuple[FieldElement, ...]
    p_basis: tuple[FieldElement, ...]
    factor_order: tuple[int, ...]
    _q_inv: tuple[int, ...] = field(init=False, repr=False, compare=False)
    _p_inv: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        n = self.ctx.n
        if sorted(self.factor_order) != list(range(n)):
            raise ValueError("factor_order must be a permutation of the tensor slots")
        for e in (*self.q_basis, *self.p_basis):
            if e.ctx is not self.ctx:
                raise ContextMismatchError("labeling basis elements belong to a different context")
        object.__setattr__(self, "_q_inv", tuple(_expansion_matrix(self.q_basis)))
        object.__setattr__(self, "_p_inv", tuple(_expansion_matrix(self.p_basis)))

    @property
    def n(self) -> int:
        return self.ctx.n

    @property
    def dim(self) -> int:
        return self.ctx.order

    def q_coords(self, e: FieldElement) -> tuple[int, ...]:
        """Z2 coefficients of e in q_basis (index i = basis element i)."""
        return _coords(e.bits, list(self._q_inv), self.n)

    def p_coords(self, e: FieldElement) -> tuple[int, ...]:
        return _coords(e.bits, list(self._p_inv), self.n)


def polynomial_basis(ctx: FieldContext) -> tuple[FieldElement, ...]:
    """{1, w, w^2, ..., w^(n-1)}; for n = 1 just {1}."""
    if ctx.n == 1:
        return (ctx.one,)
    return tuple(ctx.power(k) for k in range(ctx.n))


def same_basis_labeling(ctx: FieldContext) -> QubitLabeling:
    """q and p both expanded in the polynomial basis."""
    basis = polynomial_basis(ctx)
    order = tuple(ctx.n - 1 - i for i in range(ctx.n))
    return QubitLabeling(ctx, basis, basis, order)


def trace_dual_labeling(ctx: FieldContext) -> QubitLabeling:
    """q in the polynomial basis, p in its trace-dual basis.

    With this pairing the commutation form between two translations reduces
    to trace(q1*p2 + q2*p1), which vanishes identically for vectors on a
    common ray in characteristic 2 -- so every striation's stabilizers
    commute, for every n.
    """
    basis = polynomial_basis(ctx)
    order = tuple(ctx.n - 1 - i for i in range(ctx.n))
    return QubitLabeling(ctx, basis, trace_dual_basis(basis), order)


def default_labeling(ctx: FieldContext) -> QubitLabeling:
    """Same-basis for n <= 2 (matches the standard two-qubit translation
    operators exactly); trace-dual for n >= 3, where same-basis fails."""
    return same_basis_labeling(ctx) if ctx.n <= 2 else trace_dual_labeling(ctx)


@dataclass(frozen=True, eq=False)
class TranslationOperator:
    """Unitary implementing the phase-space shift by ``vector``.

    Always a tensor product of I / sigma_x / sigma_z / sigma_x*sigma_z
    factors; the global phase is fixed by the all-X-then-all-Z composition
    order.
    """

    vector: Point
    labeling: QubitLabeling
    unitary: np.ndarray

    @property
    def dim(self) -> int:
        return self.unitary.shape[0]


def translation_unitary(v: Point, labeling: QubitLabeling) -> TranslationOperator:
    """U_v = H_q V_p with sigma_x factors from q and sigma_z factors from p."""
    if v.ctx is not labeling.ctx:
        raise ContextMismatchError("translation vector and labeling use different contexts")
    n = labeling.n
    a = labeling.q_coords(v.q)
    b = labeling.p_coords(v.p)
    x_by_slot = [0] * n
    z_by_slot = [0] * n
    for i in range(n):
        x_by_slot[labeling.factor_order[i]] = a[i]
        z_by_slot[labeling.factor_order[i]] = b[i]
    u = np.ones((1, 1), dtype=complex)
    for slot in range(n):
        f = np.eye(2, dtype=complex)
        if x_by_slot[slot]:
            f = f @ _PAULI["X"]
        if z_by_slot[slot]:
            f = f @ _PAULI["Z"]
        u = np.kron(u, f)
    op = TranslationOperator(v, labeling, u)
    dev = np.max(np.abs(u @ u.conj().T - np.eye(u.shape[0])))
    if dev > UNITARITY_TOL:
        raise AssertionError(f"translation operator failed unitarity by {dev:.3e}")
    return op


def projective_check(u: TranslationOperator, w: TranslationOperator) -> complex:
    """Phase lambda with U_v U_w = lambda * U_(v+w); |lambda| = 1.

    A missing scalar indicates an implementation bug, not bad input.
    """
    if u.labeling != w.labeling:
        raise ValueError("operators use different labelings")
    target = translation_unitary(u.vector + w.vector, u.labeling).unitary
    prod = u.unitary @ w.unitary
    dim = prod.shape[0]
    lam = complex(np.trace(target.conj().T @ prod) / dim)
    if abs(abs(lam) - 1) > 1e-9 or np.max(np.abs(prod - lam * target)) > 1e-9:
        raise AssertionError(f"product of translations is not proportional to U_(v+w) at {u.vector}+{w.vector}")
    return lam


def check_pairwise_commuting(ops: Sequence[np.ndarray], tol: float = COMMUTE_TOL) -> None:
    """Raise NonCommutingError naming the first offending pair."""
    for i in range(len(ops)):
        for j in range(i + 1, len(ops)):
            dev = float(np.max(np.abs(ops[i] @ ops[j] - ops[j] @ ops[i])))
            if dev > tol:
                raise NonCommutingError(i, j, dev)


def joint_eigenbasis(ops: Sequence[np.ndarray], tol: float = COMMUTE_TOL) -> np.ndarray:
    """Orthonormal simultaneous eigenvectors of commuting unitaries.

    Sequential eigenspace refinement: diagonalize the first operator, then
    recurse within each eigenspace.  Output rows are unit vectors sorted by
    the tuple of eigenvalue phases (angles in [0, 2pi)) with respect to the
    input operator list, each with its largest-magnitude component made real
    positive, so the result is deterministic.
    """
    if not len(ops):
        raise ValueError("need at least one operator")
    check_pairwise_commuting(ops, tol)
    dim = ops[0].shape[0]
    blocks: list[np.ndarray] = [np.eye(dim, dtype=complex)]
    for u in ops:
        refined: list[np.ndarray] = []
        for basis in blocks:
            if basis.shape[1] == 1:
                refined.append(basis)
                continue
            sub = basis.conj().T @ u @ basis
            eigvals, eigvecs = np.linalg.eig(sub)
            used = np.zeros(len(eigvals), dtype=bool)
            for k in range(len(eigvals)):
                if used[k]:
                    continue
                cluster = [m for m in range(len(eigvals)) if not used[m] and abs(eigvals[m] - eigvals[k]) < EIGEN_CLUSTER_TOL]
                used[cluster] = True
                q, _ = np.linalg.qr(eigvecs[:, cluster])
                refined.append(basis @ q)
        blocks = refined

    vectors = [block[:, c] for block in blocks for c in range(block.shape[1])]

    def phase_tuple(v: np.ndarray) -> tuple[float, ...]:
        out = []
        for u in ops:
            angle = float(np.angle(np.vdot(v, u @ v))) % (2 * np.pi)
            if angle > 2 * np.pi - EIGEN_CLUSTER_TOL:
                angle = 0.0
            out.append(round(angle, 6))
        return tuple(out)

    vectors.sort(key=phase_tuple)

    normalized = []
    for v in vectors:
        mags = np.abs(v)
        k = int(np.flatnonzero(mags >= mags.max() - 1e-12)[0])
        normalized.append(v * np.exp(-1j * np.angle(v[k])))
    return np.array(normalized)
