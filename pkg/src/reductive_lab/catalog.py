"""Named example spaces with pinned normalizations.

Every entry is built from an explicit matrix realization of its Lie
algebra; nothing geometric is tabulated.  The registry rows carry the
expected relation polynomial (where the normalization determines one) so
reports can show an expected-vs-computed table.  Registry identifiers
are the stable CLI names, e.g. ``nk:flag`` or ``berger:n=2,s=1``.
"""

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import minimize_scalar

from .algebra import Polynomial
from .liealg import (
    BilinearForm,
    LieAlgebra,
    direct_sum,
    from_matrix_algebra,
    realify,
    so,
    sp,
    stabilizer_subalgebra,
    su,
)
from .reductive import (
    InfinitesimalModel,
    ReductiveTriple,
    build_triple,
    extend_fibered,
    holomorphic_sectional,
    scalar_curvature,
    sectional_curvature,
    to_model,
)
from .vcp import InvalidS, g2_sigma

__all__ = [
    "CatalogEntry",
    "aloff_wallach_n11",
    "berger_consistency",
    "berger_total_space",
    "entries",
    "entry",
    "flag_manifold",
    "heisenberg_model",
    "killing_multiple",
    "nearly_kaehler_spaces",
    "nearly_parallel_g2_spaces",
    "negative_cases",
    "quaternionic_hopf",
    "rescale_model",
    "rescaled_to_scalar",
    "round_parameter",
    "s3_x_s3",
    "s6_round",
    "sp2_sp1_sphere",
    "spin7_sphere",
    "squashed_s7",
    "su4_sphere",
    "torsion_block_eigenvalue",
    "cp3_twistor",
    "v1_space",
    "v3_space",
]


def _matrix_gram(g: LieAlgebra) -> np.ndarray:
    mats = g.matrices
    assert mats is not None, "algebra carries no matrix realization"
    d = len(mats)
    gram = np.zeros((d, d))
    for i in range(d):
        for j in range(i, d):
            gram[i, j] = gram[j, i] = np.trace(mats[i] @ mats[j])
    return gram


def _coords(g: LieAlgebra, mat, tol: float = 1e-9) -> np.ndarray:
    """g-coordinates of a matrix lying in the span of g.matrices."""
    span = np.column_stack([np.asarray(m, float).reshape(-1) for m in g.matrices])
    target = np.asarray(mat, dtype=float).reshape(-1)
    coeff, *_ = np.linalg.lstsq(span, target, rcond=None)
    residual = np.linalg.norm(span @ coeff - target)
    assert residual < tol * max(1.0, np.linalg.norm(target)), \
        "matrix does not lie in the algebra: residual %.3e" % residual
    return coeff


def killing_multiple(g: LieAlgebra, factor: float) -> BilinearForm:
    """factor * Killing form, computed from the structure constants."""
    return g.killing_form().scaled(factor)


def trace_multiple(g: LieAlgebra, factor: float) -> BilinearForm:
    """factor * tr(XY) over the matrix realization.

    For realified complex matrices the real trace is twice the complex one,
    so the usual -1/2 complex-trace form is trace_multiple(g, -1/4).
    """
    return BilinearForm(factor * _matrix_gram(g), name="trace")


# ---------------------------------------------------------------------------
# direct infinitesimal models


def heisenberg_model(n: int, c: float) -> InfinitesimalModel:
    """Heisenberg-type model on R^(2n+1): tau = c J^eta, rbar = c^2 omega x J."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if c <= 0:
        raise ValueError("c must be positive")
    dim = 2 * n + 1
    j = np.zeros((dim, dim))
    for k in range(n):
        j[2 * k + 1, 2 * k] = 1.0
        j[2 * k, 2 * k + 1] = -1.0
    omega = j.T  # omega[i, l] = <J e_i, e_l>
    eta = np.zeros(dim)
    eta[2 * n] = 1.0
    tau = c * (np.einsum("il,k->ilk", omega, eta)
               + np.einsum("lk,i->ilk", omega, eta)
               + np.einsum("ki,l->ilk", omega, eta))
    rbar = c ** 2 * np.einsum("il,ab->ilab", omega, j)
    return InfinitesimalModel(tau, rbar)


def aloff_wallach_n11(s: float) -> InfinitesimalModel:
    """One-parameter family on su(3)+su(2) with u(2) isotropy.

    The form is -1/2 the complex trace on su(3) and -1/(2s) on su(2); the
    m-basis splits as (su(2)-like directions, C^2 directions) in that order.
    """
    if s in (0.0, -1.0):
        raise InvalidS("s = %g degenerates the family" % s)
    g = direct_sum(su(3), su(2))
    e = np.eye(g.dim)
    # u(2) diagonal: traceless A paired with itself, the center paired with 0
    h = np.column_stack([e[0] + e[8], e[1] + e[9], e[6] + e[10], e[6] + 2 * e[7]])
    gram = _matrix_gram(g)
    b = np.zeros((g.dim, g.dim))
    b[:8, :8] = -0.25 * gram[:8, :8]
    b[8:, 8:] = -(0.25 / s) * gram[8:, 8:]
    form = BilinearForm(b, name="split_trace")
    if 1.0 + s > 0:
        root = np.sqrt(1.0 + s)
        m_basis = np.column_stack([
            (e[0] - s * e[8]) / root,
            (e[1] - s * e[9]) / root,
            (e[6] - s * e[10]) / root,
            -e[2], -e[3], -e[4], -e[5],
        ])
        triple = build_triple(g, h, form, m_basis=m_basis)
    else:
        triple = build_triple(g, h, form)  # raises IndefiniteMetric
    return to_model(triple)


# ---------------------------------------------------------------------------
# circle bundles over projective bases


def _su_hyperbolic(n: int) -> LieAlgebra:
    """su(n,1) in the realification of its defining representation.

    Generator order: su(n) upper-left block, then the u(n) center, then the
    2n off-block directions.
    """
    d = n + 1
    mats = []
    for p in range(n):
        for q in range(p + 1, n):
            m = np.zeros((d, d), dtype=complex)
            m[p, q], m[q, p] = 1.0, -1.0
            mats.append(m)
            m = np.zeros((d, d), dtype=complex)
            m[p, q] = m[q, p] = 1j
            mats.append(m)
    for p in range(n - 1):
        m = np.zeros((d, d), dtype=complex)
        m[p, p], m[p + 1, p + 1] = 1j, -1j
        mats.append(m)
    center = 1j * np.diag([1.0] * n + [-float(n)]) / (n + 1)
    mats.append(center)
    for j in range(n):
        m = np.zeros((d, d), dtype=complex)
        m[j, n] = m[n, j] = 1.0
        mats.append(m)
        m = np.zeros((d, d), dtype=complex)
        m[j, n], m[n, j] = 1j, -1j
        mats.append(m)
    return from_matrix_algebra([realify(m) for m in mats])


def _berger_pieces(n: int, kappa: int):
    """(g, isotropy columns of the base, normal-subalgebra columns, form)."""
    if kappa > 0:
        g = su(n + 1)
        form = trace_multiple(g, -0.25)
        h_cols = []
        for p in range(n):
            for q in range(p + 1, n):
                m = np.zeros((n + 1, n + 1), dtype=complex)
                m[p, q], m[q, p] = 1.0, -1.0
                h_cols.append(_coords(g, realify(m)))
                m = np.zeros((n + 1, n + 1), dtype=complex)
                m[p, q] = m[q, p] = 1j
                h_cols.append(_coords(g, realify(m)))
        for p in range(n - 1):
            m = np.zeros((n + 1, n + 1), dtype=complex)
            m[p, p], m[p + 1, p + 1] = 1j, -1j
            h_cols.append(_coords(g, realify(m)))
        center = 1j * np.diag([1.0] * n + [-float(n)]) / (n + 1)
        z_col = _coords(g, realify(center))
        h = (np.column_stack(h_cols) if h_cols
             else np.zeros((g.dim, 0)))
        k = np.column_stack([h, z_col]) if h_cols else z_col.reshape(-1, 1)
        return g, k, h, form
    g = _su_hyperbolic(n)
    form = trace_multiple(g, 0.25)
    e = np.eye(g.dim)
    h = e[:, : n * n - 1]
    k = e[:, : n * n]
    return g, k, h, form


def berger_total_space(n: int, s: float, kappa: int = 1) -> ReductiveTriple:
    """Circle bundle over the complex projective (kappa > 0) or hyperbolic
    (kappa < 0) base, as a fibered extension of the normal base triple.

    kappa > 0 admits s > -1 and contains the round sphere at
    s = -(n-1)/(2n); kappa < 0 admits s < -1 only.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    g, k_cols, h_cols, form = _berger_pieces(n, kappa)
    base = build_triple(g, k_cols, form)
    return extend_fibered(base, h_cols, s)


def torsion_block_eigenvalue(model: InfinitesimalModel, x=None,
                             tol: float = 1e-8) -> float:
    """The constant nonzero eigenvalue of -tau_x^2.

    x defaults to the last basis direction, the fiber direction of an
    extended triple.  Raises if the nonzero spectrum is not constant.
    """
    if x is None:
        x = np.eye(model.n)[-1]
    t = model.tau_matrix(x)
    eigs = np.linalg.eigvalsh(-t @ t)
    top = float(eigs[-1])
    assert top > tol, "tau_x vanishes"
    block = eigs[eigs > tol * top]
    assert float(block.max() - block.min()) < tol * top, \
        "nonzero spectrum of -tau_x^2 is not constant"
    return float(block.mean())


def _curvature_spread(model: InfinitesimalModel, samples: int = 24,
                      seed: int = 0):
    rng = np.random.default_rng(seed)
    values = []
    for _ in range(samples):
        x = rng.normal(size=model.n)
        x /= np.linalg.norm(x)
        y = rng.normal(size=model.n)
        y -= (y @ x) * x
        y /= np.linalg.norm(y)
        values.append(sectional_curvature(model, x, y))
    values = np.asarray(values)
    return float(values.max() - values.min()), values


def round_parameter(build, lo: float, hi: float, samples: int = 24,
                    seed: int = 0) -> float:
    """Parameter in (lo, hi) minimizing the sectional-curvature spread of
    build(s); the round member of a one-parameter family."""
    def spread(s):
        return _curvature_spread(to_model(build(s)), samples, seed)[0]
    res = minimize_scalar(spread, bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-10})
    return float(res.x)


def berger_consistency(n: int, s: float) -> dict:
    """Fiber-circle consistency data for the positive-curvature family.

    Returns c^2 read off the torsion, the squared fiber radius r^2 derived
    from the round member, the base curvature kappa, and the two sides of
    4 c^2 = r^2 kappa^2.
    """
    star = -0.5 * (n - 1) / n
    g, k_cols, h_cols, form = _berger_pieces(n, 1)
    base = build_triple(g, k_cols, form)
    ext = to_model(extend_fibered(base, h_cols, s))
    c2 = torsion_block_eigenvalue(ext)

    round_model = to_model(extend_fibered(base, h_cols, star)
                           if star != 0.0 else build_triple(g, h_cols, form))
    spread, values = _curvature_spread(round_model)
    assert spread < 1e-8 * max(1.0, abs(values[0]))
    r2_round = 1.0 / float(values.mean())
    r2 = r2_round * (1.0 + star) / (1.0 + s)

    base_model = to_model(base)
    if base_model.n == 2:
        kappa = sectional_curvature(base_model, *np.eye(2))
    else:
        j = ext.tau_matrix(np.eye(ext.n)[-1])[: base_model.n, : base_model.n]
        j /= np.sqrt(c2)
        hs = [holomorphic_sectional(base_model, j, x)
              for x in np.eye(base_model.n)]
        assert max(hs) - min(hs) < 1e-8 * abs(hs[0])
        kappa = float(np.mean(hs))
    return {"c2": c2, "r2": r2, "kappa": kappa,
            "lhs": 4.0 * c2, "rhs": r2 * kappa ** 2}


def quaternionic_hopf(s: float) -> ReductiveTriple:
    """Three-dimensional fiber over the quaternionic projective line.

    The base is sp(2) modulo both diagonal sp(1) blocks; the lower-right
    block stays isotropy and the upper-left block becomes the fiber.
    """
    g = sp(2)
    form = trace_multiple(g, -0.25)
    e = np.eye(g.dim)
    k_cols = e[:, :6]
    h_cols = e[:, 3:6]
    base = build_triple(g, k_cols, form)
    return extend_fibered(base, h_cols, s, allow_higher_fiber=True)


# ---------------------------------------------------------------------------
# nearly Kaehler presets (six-dimensional, scal = 30 at -1/12 Killing)


def flag_manifold(form_scale: float = -1.0 / 12.0) -> ReductiveTriple:
    """su(3) modulo its diagonal torus."""
    g = su(3)
    e = np.eye(g.dim)
    return build_triple(g, e[:, 6:8], killing_multiple(g, form_scale))


def s3_x_s3(form_scale: float = -1.0 / 12.0) -> ReductiveTriple:
    """Triple product of su(2) modulo the diagonal."""
    g = direct_sum(su(2), su(2), su(2))
    e = np.eye(g.dim)
    h = np.column_stack([e[k] + e[3 + k] + e[6 + k] for k in range(3)])
    return build_triple(g, h, killing_multiple(g, form_scale))


def cp3_twistor(form_scale: float = -1.0 / 12.0) -> ReductiveTriple:
    """so(5) modulo u(2), the u(2) solved as a stabilizer."""
    g = so(5)
    omega = np.zeros((5, 5))
    for k in range(2):
        omega[2 * k, 2 * k + 1] = 1.0
        omega[2 * k + 1, 2 * k] = -1.0
    axis = np.zeros(5)
    axis[4] = 1.0
    h = stabilizer_subalgebra(g, g.matrices, [omega, axis])
    assert h.shape[1] == 4
    return build_triple(g, h, killing_multiple(g, form_scale))


def s6_round(form_scale: float = -1.0 / 12.0) -> ReductiveTriple:
    """Stabilizer chain so(7) -> g2 -> su(3); the quotient is the round
    six-sphere with its non-symmetric reductive structure."""
    base = so(7)
    g2_cols = stabilizer_subalgebra(base, base.matrices, g2_sigma().values)
    assert g2_cols.shape[1] == 14
    mats = [sum(float(c) * m for c, m in zip(col, base.matrices))
            for col in g2_cols.T]
    g2 = from_matrix_algebra(mats)
    axis = np.zeros(7)
    axis[6] = 1.0
    su3_cols = stabilizer_subalgebra(g2, g2.matrices, axis)
    assert su3_cols.shape[1] == 8
    return build_triple(g2, su3_cols, killing_multiple(g2, form_scale))


# ---------------------------------------------------------------------------
# nearly parallel presets (seven-dimensional, scal = 21/8 at -6/5 Killing)


def spin7_sphere(form_scale: float = -6.0 / 5.0) -> ReductiveTriple:
    """so(7) modulo g2: the round seven-sphere."""
    g = so(7)
    g2_cols = stabilizer_subalgebra(g, g.matrices, g2_sigma().values)
    return build_triple(g, g2_cols, killing_multiple(g, form_scale))


def squashed_s7(form_scale: float = -6.0 / 5.0) -> ReductiveTriple:
    """sp(2)+sp(1) modulo sp(1)+sp(1), the second block paired with the
    extra factor."""
    g = direct_sum(sp(2), sp(1))
    e = np.eye(g.dim)
    h = np.column_stack([e[0], e[1], e[2],
                         e[3] + e[10], e[4] + e[11], e[5] + e[12]])
    return build_triple(g, h, killing_multiple(g, form_scale))


def _spin_32() -> list:
    """Skew-Hermitian generators of the irreducible su(2) on C^4."""
    jz = np.diag([1.5, 0.5, -0.5, -1.5])
    jp = np.zeros((4, 4))
    for row, m in enumerate((0.5, -0.5, -1.5)):
        jp[row, row + 1] = np.sqrt(15.0 / 4.0 - m * (m + 1.0))
    jm = jp.T
    jx = 0.5 * (jp + jm)
    jy = (jp - jm) / 2j
    return [1j * jx, 1j * jy, 1j * jz.astype(complex)]


def v1_space(form_scale: float = -1.0 / 30.0) -> ReductiveTriple:
    """sp(2) modulo the irreducible su(2).

    sp(2) is realized as the stabilizer in su(4) of the invariant
    antisymmetric pairing of the irreducible representation.
    """
    gens = _spin_32()
    basis = [m for m in np.eye(4)]
    # invariant bilinear pairing: solve A^T W + W A = 0 over the generators
    rows = []
    for a in gens:
        op = np.zeros((16, 16), dtype=complex)
        for idx in range(16):
            w = np.zeros((4, 4), dtype=complex)
            w[idx // 4, idx % 4] = 1.0
            op[:, idx] = (a.T @ w + w @ a).reshape(-1)
        rows.append(op)
    pairing = null_space(np.vstack(rows), rcond=1e-10)
    assert pairing.shape[1] == 1
    omega = pairing[:, 0].reshape(4, 4)
    assert np.max(np.abs(omega + omega.T)) < 1e-9

    # u(4) basis: X skew, iY with Y symmetric
    u4 = []
    for p in range(4):
        for q in range(p, 4):
            if p != q:
                m = np.zeros((4, 4), dtype=complex)
                m[p, q], m[q, p] = 1.0, -1.0
                u4.append(m)
            m = np.zeros((4, 4), dtype=complex)
            m[p, q] = m[q, p] = 1j
            u4.append(m)
    cond = np.zeros((32, len(u4)))
    for idx, m in enumerate(u4):
        val = (m.T @ omega + omega @ m).reshape(-1)
        cond[:16, idx] = val.real
        cond[16:, idx] = val.imag
    coeff = null_space(cond, rcond=1e-10)
    assert coeff.shape[1] == 10
    mats = [realify(sum(float(c) * m for c, m in zip(col, u4)))
            for col in coeff.T]
    g = from_matrix_algebra(mats)
    h = np.column_stack([_coords(g, realify(a)) for a in gens])
    return build_triple(g, h, killing_multiple(g, form_scale))


def v3_space(form_scale: float = -1.0 / 12.0) -> ReductiveTriple:
    """su(3)+su(2) modulo the diagonal u(2); same isotropy columns as the
    Aloff-Wallach family, the form a Killing multiple."""
    g = direct_sum(su(3), su(2))
    e = np.eye(g.dim)
    h = np.column_stack([e[0] + e[8], e[1] + e[9], e[6] + e[10], e[6] + 2 * e[7]])
    return build_triple(g, h, killing_multiple(g, form_scale))


# ---------------------------------------------------------------------------
# negative controls


def su4_sphere() -> ReductiveTriple:
    """su(4) modulo the upper-left su(3): the strict normal structure on the
    seven-sphere."""
    g = su(4)
    h_cols = []
    for p in range(3):
        for q in range(p + 1, 3):
            m = np.zeros((4, 4), dtype=complex)
            m[p, q], m[q, p] = 1.0, -1.0
            h_cols.append(_coords(g, realify(m)))
            m = np.zeros((4, 4), dtype=complex)
            m[p, q] = m[q, p] = 1j
            h_cols.append(_coords(g, realify(m)))
    for p in range(2):
        m = np.zeros((4, 4), dtype=complex)
        m[p, p], m[p + 1, p + 1] = 1j, -1j
        h_cols.append(_coords(g, realify(m)))
    return build_triple(g, np.column_stack(h_cols), trace_multiple(g, -0.25))


def sp2_sp1_sphere(form_scale: float = -6.0 / 5.0) -> ReductiveTriple:
    """sp(2) modulo the lower-right sp(1) block."""
    g = sp(2)
    e = np.eye(g.dim)
    return build_triple(g, e[:, 3:6], killing_multiple(g, form_scale))


# ---------------------------------------------------------------------------
# metric rescaling


def rescale_model(model: InfinitesimalModel, t: float) -> InfinitesimalModel:
    """Model of the metric scaled by t > 0, in its orthonormal frame."""
    assert t > 0
    return InfinitesimalModel(model.tau / np.sqrt(t), model.rbar / t)


def rescaled_to_scalar(model: InfinitesimalModel, target: float) -> InfinitesimalModel:
    """Rescale the metric so the scalar curvature equals target."""
    current = scalar_curvature(model)
    assert current * target > 0, "scalar curvature cannot change sign"
    return rescale_model(model, current / target)


# ---------------------------------------------------------------------------
# registry


class CatalogEntry:
    """Registry row: identifier, constructor, parameters, expected relation."""

    def __init__(self, name, builder, params=None, expected=None, note=""):
        self.name = name
        self.params = dict(params or {})
        self.expected = expected
        self.note = note
        self._builder = builder

    def build(self) -> InfinitesimalModel:
        built = self._builder(**self.params)
        if isinstance(built, ReductiveTriple):
            built = to_model(built)
        return built

    def __repr__(self):
        return "CatalogEntry(%r)" % self.name


_POL_ORDER4 = Polynomial([0.0, 0.25, 0.0, 1.25, 0.0, 1.0])
_POL_LINEAR = Polynomial([0.0, 1.0])


def nearly_kaehler_spaces() -> list:
    """Six-dimensional strict nearly Kaehler presets at the scal = 30 form."""
    note = "order-4 relation with coefficients 5/4 and 1/4 at scal = 30"
    return [
        CatalogEntry("nk:flag", flag_manifold, expected=_POL_ORDER4, note=note),
        CatalogEntry("nk:s3xs3", s3_x_s3, expected=_POL_ORDER4, note=note),
        CatalogEntry("nk:cp3", cp3_twistor, expected=_POL_ORDER4, note=note),
        CatalogEntry("nk:s6", s6_round, expected=_POL_LINEAR,
                     note="constant sectional curvature; the relation "
                          "degenerates to the symmetric one"),
    ]


def nearly_parallel_g2_spaces() -> list:
    """Seven-dimensional nearly parallel presets at their standard forms."""
    return [
        CatalogEntry("np:spin7-g2", spin7_sphere, expected=_POL_LINEAR,
                     note="round sphere; the order-2 family relation "
                          "lambda^3 + lambda/36 still annihilates"),
        CatalogEntry("np:squashed-s7", squashed_s7,
                     expected=Polynomial([0.0, 1.0 / 36.0, 0.0, 1.0]),
                     note="scal = 21/8 at the -6/5 Killing form"),
        CatalogEntry("np:v1", v1_space,
                     expected=Polynomial([0.0, 1.0, 0.0, 1.0]),
                     note="irreducible su(2) isotropy, -1/30 Killing form"),
        CatalogEntry("np:v3", v3_space,
                     expected=Polynomial([0.0, 0.4, 0.0, 1.0]),
                     note="diagonal u(2) isotropy, -1/12 Killing form"),
    ]


def negative_cases() -> list:
    """Seven-spheres whose normal structures fall outside the family law."""
    return [
        CatalogEntry("neg:su4-su3", su4_sphere,
                     note="relation exists but its coefficient is not "
                          "2 scal / 189"),
        CatalogEntry("neg:sp2-sp1", sp2_sp1_sphere,
                     note="no linear relation; kept as the negative control"),
    ]


def _parametric(name, kind, kv):
    if kind == "berger":
        params = {"n": int(kv["n"]), "s": float(kv["s"])}
        if "kappa" in kv:
            params["kappa"] = int(kv["kappa"])
        return CatalogEntry(name, berger_total_space, params,
                            note="fiber over the projective base; relation "
                                 "lambda (lambda^2 + c^2) with c^2 read off "
                                 "the torsion")
    if kind == "heisenberg":
        return CatalogEntry(name, heisenberg_model,
                            {"n": int(kv["n"]), "c": float(kv["c"])},
                            note="relation lambda (lambda^2 + c^2)")
    if kind == "aw":
        return CatalogEntry(name, aloff_wallach_n11, {"s": float(kv["s"])},
                            note="splitting-family member; a cross product "
                                 "multiple only at s = 3/2")
    raise KeyError(name)


def entries() -> list:
    """The full registry: fixed presets plus parametric representatives."""
    out = [
        _parametric("berger:n=2,s=1", "berger", {"n": "2", "s": "1"}),
        _parametric("heisenberg:n=2,c=1", "heisenberg", {"n": "2", "c": "1"}),
        _parametric("aw:n11,s=1.5", "aw", {"s": "1.5"}),
    ]
    out += nearly_kaehler_spaces()
    out += nearly_parallel_g2_spaces()
    out += negative_cases()
    return out


def entry(name: str) -> CatalogEntry:
    """Resolve a registry identifier, parsing parametric forms like
    berger:n=2,s=-0.25,kappa=1 or heisenberg:n=3,c=2."""
    for fixed in entries():
        if fixed.name == name:
            return fixed
    kind, _, rest = name.partition(":")
    parts = [p for p in rest.split(",") if p]
    kv = dict(p.split("=", 1) for p in parts if "=" in p)
    if kind == "aw" and (not parts or parts[0] != "n11"):
        raise KeyError(name)
    try:
        return _parametric(name, kind, kv)
    except (KeyError, ValueError):
        raise KeyError("unknown catalog entry %r" % name)
