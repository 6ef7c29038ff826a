"""Naturally reductive triples and their infinitesimal models.

A triple (g, h, B) with invariant B and B-orthogonal reductive splitting
g = h + m induces the model data on m: torsion tau(x,y) = -[x,y]_m and
canonical curvature rbar(x,y) = -ad([x,y]_h)|_m, both expressed in a
B-orthonormal basis of m so the metric is the identity.  The curvature sign
convention is R(U,X,X) := R_(U,X)X, anchored by the constant-curvature
oracle on the round 3-sphere in the tests.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import null_space

from .liealg import (BilinearForm, LieAlgebra, orthocomplement, orthonormalize)

__all__ = [
    "NotReductive",
    "IndefiniteMetric",
    "NonInvariantForm",
    "DegeneratePlane",
    "NotComplexStructure",
    "InadmissibleS",
    "NotNormalSubalgebra",
    "NotOneDimensional",
    "ReductiveTriple",
    "InfinitesimalModel",
    "build_triple",
    "to_model",
    "jacobi_operator",
    "sectional_curvature",
    "ricci",
    "scalar_curvature",
    "normal_sectional_cross_check",
    "holomorphic_sectional",
    "check_chsc_equivalences",
    "extend_fibered",
]


class NotReductive(ValueError):
    pass


class IndefiniteMetric(ValueError):
    pass


class NonInvariantForm(ValueError):
    pass


class DegeneratePlane(ValueError):
    pass


class NotComplexStructure(ValueError):
    pass


class InadmissibleS(ValueError):
    pass


class NotNormalSubalgebra(ValueError):
    pass


class NotOneDimensional(ValueError):
    pass


class ReductiveTriple:
    """(g, h, B) with a B-orthonormal basis of m = h-orthocomplement."""

    def __init__(self, g: LieAlgebra, h_basis, B: BilinearForm, m_basis,
                 reductive_tol: float = 1e-9):
        self.g = g
        self.h_basis = np.asarray(h_basis, dtype=float).reshape(g.dim, -1)
        self.B = B
        self.m_basis = np.asarray(m_basis, dtype=float)
        self.dim_m = self.m_basis.shape[1]
        self.check(reductive_tol)

    def m_component(self, v) -> np.ndarray:
        """Coordinates of the m-part of a g-vector in the orthonormal m-basis."""
        return self.m_basis.T @ (self.B.matrix @ v)

    def h_component(self, v) -> np.ndarray:
        """The h-part of a g-vector, as a g-vector."""
        return v - self.m_basis @ self.m_component(v)

    def check(self, tol: float) -> None:
        g, h, m, B = self.g, self.h_basis, self.m_basis, self.B
        np.testing.assert_allclose(m.T @ B.matrix @ m, np.eye(self.dim_m),
                                   atol=1e-10, err_msg="m-basis not B-orthonormal")
        if h.shape[1]:
            np.testing.assert_allclose(h.T @ B.matrix @ m,
                                       np.zeros((h.shape[1], self.dim_m)),
                                       atol=1e-10, err_msg="h and m not B-orthogonal")
        worst_hh = 0.0
        worst_hm = 0.0
        for i in range(h.shape[1]):
            for j in range(i + 1, h.shape[1]):
                v = g.bracket(h[:, i], h[:, j])
                worst_hh = max(worst_hh, float(np.max(np.abs(self.m_component(v)))))
            for a in range(self.dim_m):
                v = g.bracket(h[:, i], m[:, a])
                worst_hm = max(worst_hm, float(np.max(np.abs(h.T @ B.matrix @ v))))
        if worst_hh > tol:
            raise NotReductive("[h,h] leaves h: residual %.3e" % worst_hh)
        if worst_hm > tol:
            raise NotReductive("[h,m] leaves m: residual %.3e" % worst_hm)


def build_triple(g: LieAlgebra, h_basis, B: BilinearForm, m_basis=None,
                 invariance_tol: float = 1e-9,
                 zero_tol: float = 1e-10) -> ReductiveTriple:
    """Construct and fully verify a naturally reductive triple.

    When m_basis is omitted it is computed as the B-orthocomplement of h,
    orthonormalized by modified Gram-Schmidt against B.
    """
    residual = B.invariance_residual(g)
    if residual > invariance_tol:
        raise NonInvariantForm("B is not invariant: residual %.3e" % residual)
    eigs = np.linalg.eigvalsh(B.matrix)
    if np.min(np.abs(eigs)) <= zero_tol:
        raise NonInvariantForm("B is degenerate on g")
    h_basis = np.asarray(h_basis, dtype=float).reshape(g.dim, -1)
    if m_basis is None:
        m_cols = orthocomplement(g, h_basis, B)
        gram = m_cols.T @ B.matrix @ m_cols
        if m_cols.shape[1] and np.min(np.linalg.eigvalsh(gram)) <= zero_tol:
            raise IndefiniteMetric("B restricted to m is not positive definite")
        m_basis = orthonormalize(m_cols, B)
    else:
        m_basis = np.asarray(m_basis, dtype=float)
        gram = m_basis.T @ B.matrix @ m_basis
        if np.min(np.linalg.eigvalsh(gram)) <= zero_tol:
            raise IndefiniteMetric("B restricted to m is not positive definite")
    return ReductiveTriple(g, h_basis, B, m_basis)


class InfinitesimalModel:
    """Torsion 3-form and canonical curvature in orthonormal coordinates.

    tau has shape (n, n, n) with tau[i,j,k] = g(tau(e_i, e_j), e_k); rbar has
    shape (n, n, n, n) with rbar[i,j] the matrix of the skew endomorphism
    rbar(e_i, e_j).  The metric is the identity by construction.
    """

    def __init__(self, tau, rbar, tol: float = 1e-10):
        self.tau = np.asarray(tau, dtype=float)
        self.rbar = np.asarray(rbar, dtype=float)
        self.n = self.tau.shape[0]
        assert self.tau.shape == (self.n,) * 3
        assert self.rbar.shape == (self.n,) * 4
        self.triple = None
        self.check(tol)

    def check(self, tol: float) -> None:
        t = self.tau
        assert np.max(np.abs(t + t.transpose(1, 0, 2))) < tol
        assert np.max(np.abs(t + t.transpose(0, 2, 1))) < tol
        r = self.rbar
        assert np.max(np.abs(r + r.transpose(1, 0, 2, 3))) < tol
        assert np.max(np.abs(r + r.transpose(0, 1, 3, 2))) < tol

    def tau_matrix(self, x) -> np.ndarray:
        """The skew endomorphism tau_X, metric-dual of tau(X, ., .)."""
        return np.einsum("a,abc->cb", np.asarray(x, float), self.tau)

    def rbar_matrix(self, x, y) -> np.ndarray:
        return np.einsum("ijab,i,j->ab", self.rbar,
                         np.asarray(x, float), np.asarray(y, float))

    def holonomy_residual(self) -> float:
        """Maximal residual of rbar(e_i, e_j) acting on tau as a derivation."""
        worst = 0.0
        for i in range(self.n):
            for j in range(i + 1, self.n):
                a = self.rbar[i, j]
                dt = (np.einsum("am,mbc->abc", a, self.tau)
                      + np.einsum("bm,amc->abc", a, self.tau)
                      + np.einsum("cm,abm->abc", a, self.tau))
                worst = max(worst, float(np.max(np.abs(dt))))
        return worst


def to_model(triple: ReductiveTriple, holonomy_tol: float = 1e-9) -> InfinitesimalModel:
    """Infinitesimal model of a triple: tau(x,y) = -[x,y]_m, rbar = -ad([x,y]_h)."""
    g, B, m = triple.g, triple.B, triple.m_basis
    n = triple.dim_m
    tau = np.zeros((n, n, n))
    rbar = np.zeros((n, n, n, n))
    brackets = {}
    for i in range(n):
        for j in range(i + 1, n):
            brackets[(i, j)] = g.bracket(m[:, i], m[:, j])
    for (i, j), v in brackets.items():
        tau_ij = -triple.m_component(v)
        tau[i, j, :] = tau_ij
        tau[j, i, :] = -tau_ij
        h_part = triple.h_component(v)
        # column b of rbar(e_i, e_j) is -[h_part, m_b] in m-coordinates
        cols = np.column_stack([
            -triple.m_component(g.bracket(h_part, m[:, b])) for b in range(n)])
        rbar[i, j] = cols
        rbar[j, i] = -cols
    model = InfinitesimalModel(tau, rbar)
    model.triple = triple
    residual = model.holonomy_residual()
    assert residual < holonomy_tol, \
        "canonical curvature does not preserve tau: %.3e" % residual
    return model


def jacobi_operator(model: InfinitesimalModel, x) -> np.ndarray:
    """R_0(X): U -> rbar(U, X)X - (1/4) tau_X^2 U (symmetric, kills X)."""
    x = np.asarray(x, dtype=float)
    r1 = np.einsum("ujab,j,b->au", model.rbar, x, x)
    t = model.tau_matrix(x)
    return r1 - 0.25 * (t @ t)


def sectional_curvature(model: InfinitesimalModel, x, y,
                        zero_tol: float = 1e-10) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    gram = (x @ x) * (y @ y) - (x @ y) ** 2
    if gram <= zero_tol:
        raise DegeneratePlane("x and y do not span a 2-plane")
    return float(x @ (jacobi_operator(model, y) @ x)) / gram


def ricci(model: InfinitesimalModel, x) -> float:
    return float(np.trace(jacobi_operator(model, x)))


def scalar_curvature(model: InfinitesimalModel) -> float:
    return float(sum(ricci(model, e) for e in np.eye(model.n)))


def normal_sectional_cross_check(triple: ReductiveTriple, x, y) -> float:
    """R(x,y,y,x) for normal triples: B([x,y]_h, [x,y]_h) + (1/4)|tau(x,y)|^2.

    x, y are m-coordinates; the value is unnormalized (not divided by the
    plane's Gram determinant).
    """
    v = triple.g.bracket(triple.m_basis @ np.asarray(x, float),
                         triple.m_basis @ np.asarray(y, float))
    h_part = triple.h_component(v)
    tau_xy = triple.m_component(v)  # = -tau(x,y), sign squares away
    return float(triple.B(h_part, h_part) + 0.25 * (tau_xy @ tau_xy))


def _check_complex_structure(j, n, tol=1e-9):
    j = np.asarray(j, dtype=float)
    if j.shape != (n, n) or np.max(np.abs(j @ j + np.eye(n))) > tol \
            or np.max(np.abs(j.T @ j - np.eye(n))) > tol:
        raise NotComplexStructure("J must be orthogonal with J^2 = -id")
    return j


def holomorphic_sectional(model: InfinitesimalModel, j, x) -> float:
    """H(X) = R(X, JX, JX, X) / |X|^4."""
    j = _check_complex_structure(j, model.n)
    x = np.asarray(x, dtype=float)
    jx = j @ x
    norm4 = float(x @ x) ** 2
    assert norm4 > 0
    return float(jx @ (jacobi_operator(model, x) @ jx)) / norm4


def check_chsc_equivalences(model: InfinitesimalModel, j, n_samples: int = 32,
                            seed: int = 0, rel_tol: float = 1e-6) -> dict:
    """Evaluate the four equivalent constancy conditions by sampling.

    (1) sectional curvature constant, (2) holomorphic sectional curvature
    constant, (3) the Jacobi operator preserves span{JX}, (4) the quadratic
    form of R_0(X) is invariant under U -> tau_X U on {X, JX}-perp.
    Returns per-condition booleans, residuals, and their logical agreement.
    """
    j = _check_complex_structure(j, model.n)
    n = model.n
    rng = np.random.default_rng(seed)
    xs = rng.normal(size=(n_samples, n))
    xs /= np.linalg.norm(xs, axis=1)[:, None]

    sec = []
    for x in xs:
        y = rng.normal(size=n)
        y -= (y @ x) * x
        y /= np.linalg.norm(y)
        sec.append(sectional_curvature(model, x, y))
    sec = np.array(sec)
    scale = max(1.0, float(np.max(np.abs(sec))))
    res_1 = float(sec.max() - sec.min()) / scale

    hol = np.array([holomorphic_sectional(model, j, x) for x in xs])
    res_2 = float(hol.max() - hol.min()) / max(1.0, float(np.max(np.abs(hol))))

    res_3 = 0.0
    res_4 = 0.0
    for x in xs:
        op = jacobi_operator(model, x)
        jx = j @ x
        image = op @ jx
        off = image - (image @ jx) * jx
        res_3 = max(res_3, float(np.linalg.norm(off)) / max(1.0, np.linalg.norm(op)))
        perp = _orthogonal_complement(np.column_stack([x, jx]))
        t = model.tau_matrix(x)
        for u in perp.T:
            lhs = float((t @ u) @ (op @ (t @ u)))
            rhs = float(u @ (op @ u))
            res_4 = max(res_4, abs(lhs - rhs) / max(1.0, np.linalg.norm(op)))

    verdicts = {
        "constant_sectional": bool(res_1 < rel_tol),
        "constant_holomorphic": bool(res_2 < rel_tol),
        "jacobi_preserves_j_line": bool(res_3 < rel_tol),
        "torsion_twist_identity": bool(res_4 < rel_tol),
    }
    report = dict(verdicts)
    report["residuals"] = {
        "constant_sectional": res_1,
        "constant_holomorphic": res_2,
        "jacobi_preserves_j_line": res_3,
        "torsion_twist_identity": res_4,
    }
    report["all_agree"] = len(set(verdicts.values())) == 1
    return report


def _orthogonal_complement(cols):
    n = cols.shape[0]
    q, _ = np.linalg.qr(np.column_stack([cols, np.eye(n)]))
    return q[:, cols.shape[1]:n]


def extend_fibered(triple: ReductiveTriple, h_normal, s: float,
                   allow_higher_fiber: bool = False) -> ReductiveTriple:
    """One-parameter family of naturally reductive metrics on a fiber bundle
    over the base triple (g, k, B), for h normal in the isotropy algebra k.

    The extended algebra is g + k/h with the fiber factor carrying (1/s) B,
    the isotropy is embedded diagonally, and s = 0 returns the normal triple
    on G/H directly.  Admissible s keeps (1+s) B positive on the fiber
    directions.  For a 1-dimensional fiber the model torsion and curvature of
    the result are verified against the closed-form extension of the base
    model; higher-dimensional fibers (behind allow_higher_fiber) verify the
    O'Neill vertical part instead.
    """
    g, k_basis, B = triple.g, triple.h_basis, triple.B
    h_normal = np.asarray(h_normal, dtype=float).reshape(g.dim, -1)

    # h must sit inside k and be an ideal of it
    k_pinv = np.linalg.pinv(k_basis)
    if h_normal.shape[1]:
        if np.max(np.abs(k_basis @ (k_pinv @ h_normal) - h_normal)) > 1e-10:
            raise NotNormalSubalgebra("h is not contained in the isotropy algebra")
        h_pinv = np.linalg.pinv(h_normal)
        for i in range(k_basis.shape[1]):
            for a in range(h_normal.shape[1]):
                v = g.bracket(k_basis[:, i], h_normal[:, a])
                if np.max(np.abs(h_normal @ (h_pinv @ v) - v)) > 1e-9:
                    raise NotNormalSubalgebra("[k, h] leaves h")

    if s == 0.0:
        return build_triple(g, h_normal, B)

    # fiber directions: B-orthocomplement of h inside k
    k_gram = k_basis.T @ B.matrix @ k_basis
    h_in_k = k_pinv @ h_normal
    z_in_k = _nullspace(h_in_k.T @ k_gram)
    z_cols = k_basis @ z_in_k
    q = z_cols.shape[1]
    if q != 1 and not allow_higher_fiber:
        raise NotOneDimensional("k/h has dimension %d, expected 1" % q)

    fiber_gram = z_cols.T @ B.matrix @ z_cols
    fiber_eigs = np.linalg.eigvalsh(fiber_gram)
    if np.min(fiber_eigs) > 0:
        sign = 1.0
    elif np.max(fiber_eigs) < 0:
        sign = -1.0
    else:
        raise InadmissibleS("B is indefinite on the fiber directions")
    if sign * (1.0 + s) <= 0 or s == -1.0:
        raise InadmissibleS("s = %g is outside the admissible range" % s)
    z_cols = orthonormalize(z_cols, B if sign > 0 else B.scaled(-1.0))

    ghat, bhat = _extended_algebra(g, B, z_cols, s, sign)
    d = g.dim
    khat = np.zeros((d + q, h_normal.shape[1] + q))
    khat[:d, :h_normal.shape[1]] = h_normal
    khat[:d, h_normal.shape[1]:] = z_cols
    khat[d:, h_normal.shape[1]:] = np.eye(q)

    # adapted m-basis: base horizontal vectors, then the fiber directions
    scale = 1.0 / np.sqrt(sign * (1.0 + s))
    mhat = np.zeros((d + q, triple.dim_m + q))
    mhat[:d, :triple.dim_m] = triple.m_basis
    mhat[:d, triple.dim_m:] = z_cols * scale
    mhat[d:, triple.dim_m:] = -s * scale * np.eye(q)

    extended = build_triple(ghat, khat, bhat, m_basis=mhat)
    _verify_extension(triple, extended, z_cols, s, sign, q)
    return extended


def _nullspace(a):
    return null_space(a, rcond=1e-10)


def _extended_algebra(g: LieAlgebra, B: BilinearForm, z_cols, s: float, sign: float):
    """g + (k/h) with the fiber carrying the quotient bracket and (1/s) B."""
    d, q = g.dim, z_cols.shape[1]
    z_gram_inv = sign * np.eye(q)  # z-columns are (sign B)-orthonormal
    brackets = {}
    for i, j, k, v in g.triples:
        brackets[(i, j, k)] = v
    for a in range(q):
        for b in range(a + 1, q):
            w = g.bracket(z_cols[:, a], z_cols[:, b])
            coords = z_gram_inv @ (z_cols.T @ B.matrix @ w)
            for c in np.flatnonzero(np.abs(coords) > 1e-12):
                brackets[(d + a, d + b, d + int(c))] = float(coords[c])
    ghat = LieAlgebra(d + q, brackets,
                      labels=list(g.labels) + ["f%d" % a for a in range(q)])
    bm = np.zeros((d + q, d + q))
    bm[:d, :d] = B.matrix
    bm[d:, d:] = (sign / s) * np.eye(q)
    return ghat, BilinearForm(bm, name="%s_hat" % B.name)


def _verify_extension(base: ReductiveTriple, extended: ReductiveTriple,
                      z_cols, s: float, sign: float, q: int,
                      tol: float = 1e-9) -> None:
    """Postcondition of extend_fibered.

    Horizontal torsion is unchanged and the vertical part is the isotropy
    action of the fiber directions scaled by 1/sqrt(|1+s|); for a 1-dim
    fiber the full closed forms of the extended torsion and curvature hold.
    """
    n = base.dim_m
    model = to_model(extended)
    base_model = to_model(base)
    np.testing.assert_allclose(model.tau[:n, :n, :n], base_model.tau, atol=tol,
                               err_msg="horizontal torsion changed")
    denom = np.sqrt(sign * (1.0 + s))
    rhos = []
    for a in range(q):
        rho = np.column_stack([
            base.m_component(base.g.bracket(z_cols[:, a], base.m_basis[:, b]))
            for b in range(n)])
        rhos.append(rho)
        # tau_hat(x, y, w_a) = -<rho_a x, y> / sqrt(|1+s|)
        np.testing.assert_allclose(model.tau[:n, :n, n + a], -rho.T / denom,
                                   atol=tol, err_msg="vertical torsion wrong")
    if q == 1:
        assert np.max(np.abs(model.tau[:, n:, n:])) < tol
        rho = rhos[0]
        form = rho.T  # form[i, j] = <rho e_i, e_j>
        expected_r = base_model.rbar + \
            np.einsum("ij,ab->ijab", form, rho) / (sign * (1.0 + s))
        np.testing.assert_allclose(model.rbar[:n, :n, :n, :n], expected_r,
                                   atol=tol, err_msg="horizontal curvature wrong")
        assert np.max(np.abs(model.rbar[n:, :, :, :])) < tol
        assert np.max(np.abs(model.rbar[:, :, n:, :])) < tol
