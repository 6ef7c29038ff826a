"""Real Lie algebras from structure constants or matrix generators.

Complex and quaternionic matrix algebras are realified once on construction
(layout [[X, -Y], [Y, X]] for X + iY); everything downstream is real.
Vectors are 1-d coordinate arrays, subspace bases are (dim, k) column
matrices.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import block_diag, null_space

__all__ = [
    "JACOBI_TOL",
    "DimensionMismatch",
    "NotClosed",
    "DegenerateRestriction",
    "LieAlgebra",
    "BilinearForm",
    "from_matrix_algebra",
    "stabilizer_subalgebra",
    "orthocomplement",
    "orthonormalize",
    "direct_sum",
    "realify",
    "quaternion_to_complex",
    "su",
    "so",
    "u",
    "sp",
    "abelian",
    "algebra_from_json",
    "algebra_to_json",
]

JACOBI_TOL = 1e-10


class DimensionMismatch(ValueError):
    pass


class NotClosed(ValueError):
    """Commutator of generators leaves their span."""


class DegenerateRestriction(ValueError):
    """A bilinear form restricts degenerately to a subspace."""


class LieAlgebra:
    """Lie algebra given by sparse structure constants c^k_{ij}.

    brackets may be a {(i, j, k): value} map or an iterable of
    (i, j, k, value); missing (j, i, k) entries are completed
    antisymmetrically, conflicting ones rejected.
    """

    def __init__(self, dim: int, brackets, labels=None, jacobi_tol: float = JACOBI_TOL):
        self.dim = int(dim)
        if labels is None:
            labels = ["e%d" % i for i in range(self.dim)]
        assert len(labels) == self.dim
        self.labels = list(labels)

        if isinstance(brackets, dict):
            entries = [(i, j, k, v) for (i, j, k), v in brackets.items()]
        else:
            entries = [tuple(e) for e in brackets]
        seen = {}
        for i, j, k, v in entries:
            i, j, k, v = int(i), int(j), int(k), float(v)
            if not (0 <= i < dim and 0 <= j < dim and 0 <= k < dim):
                raise DimensionMismatch("bracket index out of range: %s" % ((i, j, k),))
            if i == j:
                if v != 0.0:
                    raise ValueError("[e%d, e%d] must vanish" % (i, i))
                continue
            if (i, j, k) in seen and seen[(i, j, k)] != v:
                raise ValueError("conflicting entries for %s" % ((i, j, k),))
            seen[(i, j, k)] = v
        tensor = np.zeros((dim, dim, dim))
        for (i, j, k), v in seen.items():
            tensor[i, j, k] = v
        for (i, j, k), v in seen.items():
            if (j, i, k) in seen:
                if seen[(j, i, k)] != -v:
                    raise ValueError("antisymmetry violated at %s" % ((i, j, k),))
            else:
                tensor[j, i, k] = -v
        self.tensor = tensor
        self.triples = tuple(sorted(
            (i, j, k, tensor[i, j, k])
            for i in range(dim) for j in range(i + 1, dim) for k in range(dim)
            if tensor[i, j, k] != 0.0))
        self.matrices = None  # set by from_matrix_algebra

        residual = self.jacobi_residual()
        if residual > jacobi_tol:
            raise ValueError("Jacobi identity fails: residual %.3e" % residual)

    def jacobi_residual(self) -> float:
        c = self.tensor
        d = np.einsum("ijm,mlk->ijlk", c, c)
        cyc = d + d.transpose(1, 2, 0, 3) + d.transpose(2, 0, 1, 3)
        return float(np.max(np.abs(cyc))) if self.dim else 0.0

    def bracket(self, x, y) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.shape != (self.dim,) or y.shape != (self.dim,):
            raise DimensionMismatch("expected vectors of length %d" % self.dim)
        return np.einsum("ijk,i,j->k", self.tensor, x, y)

    def ad(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise DimensionMismatch("expected vector of length %d" % self.dim)
        return np.einsum("ijk,i->kj", self.tensor, x)

    def killing_form(self) -> "BilinearForm":
        k = np.einsum("imk,jkm->ij", self.tensor, self.tensor)
        return BilinearForm(0.5 * (k + k.T), name="killing")

    def __repr__(self):
        return "LieAlgebra(dim=%d, nnz=%d)" % (self.dim, len(self.triples))


class BilinearForm:
    def __init__(self, matrix, name: str = "B"):
        m = np.asarray(matrix, dtype=float)
        assert np.max(np.abs(m - m.T)) < 1e-12, "form must be symmetric"
        self.matrix = 0.5 * (m + m.T)
        self.name = name

    def __call__(self, x, y) -> float:
        return float(np.asarray(x, float) @ self.matrix @ np.asarray(y, float))

    def restricted(self, basis) -> np.ndarray:
        basis = np.asarray(basis, dtype=float)
        return basis.T @ self.matrix @ basis

    def invariance_residual(self, g: LieAlgebra) -> float:
        worst = 0.0
        for z in range(g.dim):
            a = g.ad(np.eye(g.dim)[z])
            worst = max(worst, float(np.max(np.abs(a.T @ self.matrix + self.matrix @ a))))
        return worst

    def is_invariant(self, g: LieAlgebra, tol: float = 1e-9) -> bool:
        return self.invariance_residual(g) <= tol

    def scaled(self, factor: float) -> "BilinearForm":
        return BilinearForm(factor * self.matrix, name=self.name)

    def __repr__(self):
        return "BilinearForm(%r, dim=%d)" % (self.name, self.matrix.shape[0])


def from_matrix_algebra(matrices, labels=None, tol: float = 1e-9,
                        jacobi_tol: float = JACOBI_TOL) -> LieAlgebra:
    """Lie algebra spanned by real matrices, closed under commutator.

    Structure constants come from expanding commutators in the generator
    basis; a commutator leaving the span raises NotClosed.
    """
    mats = [np.asarray(m, dtype=float) for m in matrices]
    d = len(mats)
    n = mats[0].shape[0]
    span = np.column_stack([m.reshape(-1) for m in mats])
    if np.linalg.matrix_rank(span, tol=1e-10) < d:
        raise ValueError("generators are linearly dependent")
    pinv = np.linalg.pinv(span)
    scale = max(1.0, max(np.linalg.norm(m) for m in mats))
    brackets = {}
    for i in range(d):
        for j in range(i + 1, d):
            comm = mats[i] @ mats[j] - mats[j] @ mats[i]
            coords = pinv @ comm.reshape(-1)
            residual = np.linalg.norm(span @ coords - comm.reshape(-1))
            if residual > tol * scale ** 2:
                raise NotClosed("[m%d, m%d] leaves the span: residual %.3e" % (i, j, residual))
            for k in np.flatnonzero(np.abs(coords) > 1e-12):
                brackets[(i, j, int(k))] = float(coords[k])
    g = LieAlgebra(d, brackets, labels=labels, jacobi_tol=jacobi_tol)
    g.matrices = mats
    return g


def stabilizer_subalgebra(g: LieAlgebra, rep_matrices, tensors) -> np.ndarray:
    """Kernel of A -> A*t (derivation action on the tensors), as columns in
    g-coordinates.  Closure under the bracket is verified before returning.

    tensors: one ndarray or a list of them; each of shape (n,) * order.
    """
    if isinstance(tensors, np.ndarray):
        tensors = [tensors]
    reps = [np.asarray(m, dtype=float) for m in rep_matrices]
    assert len(reps) == g.dim
    rows = []
    for t in tensors:
        t = np.asarray(t, dtype=float)
        order = t.ndim
        cols = []
        for a in reps:
            dt = np.zeros_like(t)
            for axis in range(order):
                # action on covariant tensors: (A*t)(x,..) = -sum_axis t(.., Ax, ..)
                dt -= np.tensordot(t, a, axes=([axis], [0])).transpose(
                    _restore_axis(order, axis))
            cols.append(dt.reshape(-1))
        rows.append(np.column_stack(cols))
    system = np.vstack(rows)
    kernel = null_space(system, rcond=1e-10)
    if kernel.shape[1] == 0:
        return kernel
    # closure check: brackets of kernel elements stay inside the kernel span
    proj = kernel @ kernel.T
    worst = 0.0
    for i in range(kernel.shape[1]):
        for j in range(i + 1, kernel.shape[1]):
            b = g.bracket(kernel[:, i], kernel[:, j])
            worst = max(worst, float(np.linalg.norm(b - proj @ b)))
    assert worst < 1e-9, "stabilizer not closed under bracket: %.3e" % worst
    return kernel


def _restore_axis(order, axis):
    # tensordot moved the contracted slot to the end; put it back at `axis`
    perm = list(range(order - 1))
    perm.insert(axis, order - 1)
    return perm


def orthocomplement(g: LieAlgebra, subspace, B: BilinearForm) -> np.ndarray:
    """B-orthogonal complement of a subspace, as (dim, k) columns."""
    s = np.asarray(subspace, dtype=float)
    if s.ndim != 2 or s.shape[0] != g.dim:
        raise DimensionMismatch("subspace must be (dim, k) columns")
    if s.shape[1] == 0:
        return np.eye(g.dim)
    gram = s.T @ B.matrix @ s
    if s.shape[1] and np.linalg.matrix_rank(gram, tol=1e-10) < s.shape[1]:
        raise DegenerateRestriction("B restricts degenerately to the subspace")
    comp = null_space(s.T @ B.matrix, rcond=1e-10)
    assert comp.shape[1] == g.dim - s.shape[1]
    return comp


def orthonormalize(vectors, B: BilinearForm, tol: float = 1e-10) -> np.ndarray:
    """Modified Gram-Schmidt against B with one re-orthogonalization pass.

    Requires B positive definite on the span; raises DegenerateRestriction on
    (near-)degenerate input.
    """
    v = np.array(vectors, dtype=float, copy=True)
    m = B.matrix
    out = []
    for col in v.T:
        w = col.copy()
        for _ in range(2):
            for q in out:
                w -= (q @ m @ w) * q
        norm2 = float(w @ m @ w)
        if norm2 < tol:
            raise DegenerateRestriction(
                "vector has non-positive B-norm %.3e during Gram-Schmidt" % norm2)
        out.append(w / np.sqrt(norm2))
    return np.column_stack(out) if out else np.zeros((v.shape[0], 0))


def direct_sum(*algebras: LieAlgebra) -> LieAlgebra:
    dims = [g.dim for g in algebras]
    offsets = np.concatenate([[0], np.cumsum(dims)])
    total = int(offsets[-1])
    brackets = {}
    labels = []
    collide = len({lab for g in algebras for lab in g.labels}) < total
    for idx, (g, off) in enumerate(zip(algebras, offsets)):
        off = int(off)
        labels.extend("%d:%s" % (idx, lab) if collide else lab for lab in g.labels)
        for i, j, k, val in g.triples:
            brackets[(i + off, j + off, k + off)] = val
    out = LieAlgebra(total, brackets, labels=labels)
    if all(g.matrices is not None for g in algebras):
        out.matrices = []
        for idx, g in enumerate(algebras):
            for m in g.matrices:
                parts = [np.zeros_like(np.asarray(h.matrices[0])) if i != idx
                         else m for i, h in enumerate(algebras)]
                out.matrices.append(block_diag(*parts))
    return out


def realify(m) -> np.ndarray:
    """Complex n x n matrix X + iY to real 2n x 2n [[X, -Y], [Y, X]]."""
    m = np.asarray(m, dtype=complex)
    x, y = m.real, m.imag
    return np.block([[x, -y], [y, x]])


def quaternion_to_complex(a, b, c, d) -> np.ndarray:
    """Quaternionic matrix A + Bi + Cj + Dk as a complex 2n x 2n matrix.

    Entries are replaced by their 2 x 2 complex blocks, i.e. kron with the
    standard images of 1, i, j, k.
    """
    one = np.eye(2, dtype=complex)
    qi = np.array([[1j, 0], [0, -1j]])
    qj = np.array([[0, 1], [-1, 0]], dtype=complex)
    qk = np.array([[0, 1j], [1j, 0]])
    return (np.kron(a, one) + np.kron(b, qi) + np.kron(c, qj) + np.kron(d, qk))


def su(n: int) -> LieAlgebra:
    """su(n), realified defining representation."""
    mats = []
    for p in range(n):
        for q in range(p + 1, n):
            e = np.zeros((n, n), dtype=complex)
            e[p, q], e[q, p] = 1.0, -1.0
            mats.append(e)
            e = np.zeros((n, n), dtype=complex)
            e[p, q] = e[q, p] = 1j
            mats.append(e)
    for p in range(n - 1):
        e = np.zeros((n, n), dtype=complex)
        e[p, p], e[p + 1, p + 1] = 1j, -1j
        mats.append(e)
    return from_matrix_algebra([realify(m) for m in mats])


def u(n: int) -> LieAlgebra:
    base = su(n)
    mats = list(base.matrices) + [realify(1j * np.eye(n))]
    return from_matrix_algebra(mats)


def so(n: int) -> LieAlgebra:
    mats = []
    for p in range(n):
        for q in range(p + 1, n):
            e = np.zeros((n, n))
            e[p, q], e[q, p] = 1.0, -1.0
            mats.append(e)
    return from_matrix_algebra(mats)


def sp(n: int) -> LieAlgebra:
    """Compact symplectic algebra sp(n): quaternionic skew-Hermitian matrices,
    realified via the complex 2n x 2n picture."""
    zero = np.zeros((n, n))
    mats = []
    for p in range(n):
        for unit in range(3):
            e = np.zeros((n, n))
            e[p, p] = 1.0
            parts = [zero, zero, zero, zero]
            parts[1 + unit] = e
            mats.append(quaternion_to_complex(*parts))
    for p in range(n):
        for q in range(p + 1, n):
            anti = np.zeros((n, n))
            anti[p, q], anti[q, p] = 1.0, -1.0
            mats.append(quaternion_to_complex(anti, zero, zero, zero))
            sym = np.zeros((n, n))
            sym[p, q] = sym[q, p] = 1.0
            for unit in range(3):
                parts = [zero, zero, zero, zero]
                parts[1 + unit] = sym
                mats.append(quaternion_to_complex(*parts))
    return from_matrix_algebra([realify(m) for m in mats])


def abelian(n: int) -> LieAlgebra:
    return LieAlgebra(n, {})


def algebra_from_json(data: dict):
    """Load a (LieAlgebra, {name: BilinearForm}) pair from the JSON schema

    { "dim": n, "labels": [...], "brackets": [[i, j, k, value], ...],
      "forms": { "name": [[...]] } }

    Indices are 0-based; omitted (i, j) pairs mean zero bracket and the
    antisymmetric completion is applied on load.
    """
    dim = int(data["dim"])
    labels = data.get("labels")
    brackets = [(int(i), int(j), int(k), float(v)) for i, j, k, v in data.get("brackets", [])]
    g = LieAlgebra(dim, brackets, labels=labels)
    forms = {name: BilinearForm(np.asarray(mat, dtype=float), name=name)
             for name, mat in data.get("forms", {}).items()}
    return g, forms


def algebra_to_json(g: LieAlgebra, forms=None) -> dict:
    return {
        "dim": g.dim,
        "labels": list(g.labels),
        "brackets": [[i, j, k, v] for i, j, k, v in g.triples],
        "forms": {form.name: form.matrix.tolist() for form in (forms or [])},
    }
