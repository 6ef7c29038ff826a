"""Vector cross products and their generalized relatives.

A 3-form sigma on euclidean R^n is a vector cross product when
|sigma_X Y| = |X ^ Y| for all X, Y.  The weaker requirement that the
operators sigma_X for unit X all be conjugate in O(n) admits, besides
the classical dimensions 3 and 7, exactly one further family in
dimension six.  Detection works through the eigenvalue spectrum of
-sigma_X^2, which is constant in X precisely in the generalized case.
"""

import itertools

import numpy as np

__all__ = [
    "ThreeForm", "InvalidS",
    "VOLUME_TYPE3", "G2_TYPE7", "SU3_TYPE6", "NOT_GVCP",
    "volume_3form", "g2_sigma", "su3_tau",
    "is_vcp", "is_gvcp", "classify_gvcp", "fit_vcp_multiple",
    "appendix_component_checks",
]

VOLUME_TYPE3 = "VolumeType3"
G2_TYPE7 = "G2Type7"
SU3_TYPE6 = "SU3Type6"
NOT_GVCP = "NotGVCP"

SPECTRUM_TOL = 1e-7


class InvalidS(ValueError):
    pass


def _perm_sign(perm):
    sign = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


class ThreeForm:
    """Alternating 3-form, stored as the full antisymmetric array."""

    def __init__(self, values, tol: float = 1e-12):
        values = np.asarray(values, dtype=float)
        assert values.ndim == 3 and len(set(values.shape)) == 1
        scale = max(1.0, float(np.abs(values).max()))
        for axes in [(1, 0, 2), (0, 2, 1)]:
            if np.abs(values + values.transpose(axes)).max() > tol * scale:
                raise ValueError("coefficients are not totally antisymmetric")
        self.n = values.shape[0]
        self.values = values

    @classmethod
    def from_components(cls, n: int, components: dict) -> "ThreeForm":
        """Build from 1-based strictly increasing index triples."""
        values = np.zeros((n, n, n))
        for (i, j, k), coeff in components.items():
            assert 1 <= i < j < k <= n
            for perm in itertools.permutations((i - 1, j - 1, k - 1)):
                values[perm] = coeff * _perm_sign(perm)
        return cls(values)

    def __call__(self, x, y, z) -> float:
        return float(np.einsum("i,j,k,ijk->", x, y, z, self.values))

    def apply(self, x, y) -> np.ndarray:
        """The vector sigma_X Y (indices raised with the euclidean metric)."""
        return np.einsum("i,j,ijk->k", x, y, self.values)

    def matrix(self, x) -> np.ndarray:
        """sigma_X as a skew matrix acting on column vectors."""
        return np.einsum("i,ijk->kj", x, self.values)

    def scaled(self, c: float) -> "ThreeForm":
        return ThreeForm(c * self.values)

    def norm(self) -> float:
        return float(np.linalg.norm(self.values))

    def __repr__(self):
        return "ThreeForm(n=%d, |.|=%.3g)" % (self.n, self.norm())


def volume_3form() -> ThreeForm:
    return ThreeForm.from_components(3, {(1, 2, 3): 1.0})


def g2_sigma() -> ThreeForm:
    """The associative 3-form: (e12 + e34 + e56) ^ e7 + Re(z1 ^ z2 ^ z3)."""
    return ThreeForm.from_components(7, {
        (1, 2, 7): 1.0, (3, 4, 7): 1.0, (5, 6, 7): 1.0,
        (1, 3, 5): 1.0, (1, 4, 6): -1.0, (2, 3, 6): -1.0, (2, 4, 5): -1.0,
    })


def su3_tau() -> ThreeForm:
    """Real part of the complex volume form on C^3 = R^6."""
    return ThreeForm.from_components(6, {
        (1, 3, 5): 1.0, (1, 4, 6): -1.0, (2, 3, 6): -1.0, (2, 4, 5): -1.0,
    })


def _unit_samples(n: int, count: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    xs = rng.normal(size=(count, n))
    return xs / np.linalg.norm(xs, axis=1)[:, None]


def _orthonormal_pairs(n: int, count: int, seed: int):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        x = rng.normal(size=n)
        x /= np.linalg.norm(x)
        y = rng.normal(size=n)
        y -= (y @ x) * x
        y /= np.linalg.norm(y)
        yield x, y


def is_vcp(sigma: ThreeForm, samples: int = 48, seed: int = 0,
           tol: float = SPECTRUM_TOL):
    """Test |sigma_X Y|^2 = 1 on orthonormal pairs.

    Returns (verdict, max deviation).
    """
    worst = 0.0
    for x, y in _orthonormal_pairs(sigma.n, samples, seed):
        v = sigma.apply(x, y)
        worst = max(worst, abs(float(v @ v) - 1.0))
    return worst < tol, worst


def is_gvcp(tau: ThreeForm, samples: int = 48, seed: int = 0,
            rel_tol: float = SPECTRUM_TOL):
    """Constant spectrum of -tau_X^2 over unit X, or None.

    The zero form does not qualify.
    """
    if tau.norm() < 1e-14:
        return None
    specs = []
    for x in _unit_samples(tau.n, samples, seed):
        m = tau.matrix(x)
        specs.append(np.sort(np.linalg.eigvalsh(-(m @ m))))
    specs = np.array(specs)
    mean = specs.mean(axis=0)
    scale = max(float(specs.max()), 1e-300)
    if float(np.abs(specs - mean).max()) > rel_tol * scale:
        return None
    return mean


def classify_gvcp(tau: ThreeForm, samples: int = 48, seed: int = 0,
                  rel_tol: float = SPECTRUM_TOL) -> str:
    """Match the constant spectrum against the three model patterns.

    Scale never matters: conjugacy classes are tested only through the
    multiplicity pattern of -tau_X^2.
    """
    spectrum = is_gvcp(tau, samples=samples, seed=seed, rel_tol=rel_tol)
    if spectrum is None:
        return NOT_GVCP
    top = float(spectrum.max())
    kernel = int(np.sum(spectrum < rel_tol * top))
    rest = spectrum[kernel:]
    equal = float(np.abs(rest - rest.mean()).max()) < rel_tol * top
    if tau.n == 3 and kernel == 1 and equal:
        return VOLUME_TYPE3
    if tau.n == 7 and kernel == 1 and equal:
        return G2_TYPE7
    if tau.n == 6 and kernel == 2 and equal:
        return SU3_TYPE6
    return NOT_GVCP


def fit_vcp_multiple(tau: ThreeForm, samples: int = 48, seed: int = 0,
                     tol: float = SPECTRUM_TOL):
    """Scale c with c*tau a vector cross product, or None.

    c is fitted as 1/median of |tau_X Y| over orthonormal pairs, so a
    single aligned pair cannot skew the verdict.
    """
    assert tau.n in (3, 7)
    norms = [float(np.linalg.norm(tau.apply(x, y)))
             for x, y in _orthonormal_pairs(tau.n, samples, seed)]
    med = float(np.median(norms))
    if med < 1e-12:
        return None
    c = 1.0 / med
    ok, _ = is_vcp(tau.scaled(c), samples=samples, seed=seed + 1, tol=tol)
    return c if ok else None


# --- the su(2) (+) C^2 model -------------------------------------------------

_PAULI = [
    np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
]


def _su2(v) -> np.ndarray:
    return 1.0j * sum(float(c) * p for c, p in zip(v, _PAULI))


def _su2_inner(a, b) -> float:
    return float(np.real(-0.5 * np.trace(a @ b)))


def _star(a, b) -> np.ndarray:
    # trace-free part of a b^H - b a^H inside u(2)
    m = np.outer(a, b.conj()) - np.outer(b, a.conj())
    return m + 1.0j * float(np.imag(np.vdot(a, b))) * np.eye(2)


def _residual_bracket(s: float, x, y):
    (A, a), (B, b) = x, y
    first = (1.0 - s) * (A @ B - B @ A) - _star(a, b) / (s + 1.0)
    return first, A @ b - B @ a


def _pair_norm(x) -> float:
    u, a = x
    # rounding can push a zero residual slightly negative
    return float(np.sqrt(max(_su2_inner(u, u) + np.real(np.vdot(a, a)), 0.0)))


def appendix_component_checks(s: float, samples: int = 24,
                              seed: int = 0) -> dict:
    """Residuals of the three quadratic cross-product identities.

    The model is su(2) (+) C^2 with the residual bracket of the
    one-parameter family of reductive splittings; the candidate scale
    is always c^2 = s + 1.  Returns per-identity maxima together with
    the 2x2 matrix identity AX + XA = tr(AX) id + tr(X) A used to
    derive them.
    """
    if abs(s) < 1e-12 or abs(s + 1.0) < 1e-12:
        raise InvalidS("the splitting degenerates at s in {0, -1}")
    c2 = s + 1.0
    rng = np.random.default_rng(seed)

    def unit_su2():
        v = rng.normal(size=3)
        return _su2(v / np.linalg.norm(v))

    def unit_c2():
        a = rng.normal(size=2) + 1.0j * rng.normal(size=2)
        return a / np.sqrt(np.real(np.vdot(a, a)))

    worst = {"vcp1": 0.0, "vcp2": 0.0, "vcp3": 0.0, "matrix_identity": 0.0}
    zero2 = np.zeros(2, dtype=complex)
    for _ in range(samples):
        A, a = unit_su2(), unit_c2()
        B, b = unit_su2(), unit_c2()

        def t(v, w):
            return _residual_bracket(s, v, w)

        ea = (A, zero2)
        lhs = t(ea, t(ea, (B, b)))
        lhs = (c2 / (s + 1.0) * lhs[0], c2 / (s + 1.0) * lhs[1])
        rhs = (_su2_inner(A, B) * A - _su2_inner(A, A) * B,
               -_su2_inner(A, A) * b)
        worst["vcp1"] = max(worst["vcp1"],
                            _pair_norm((lhs[0] - rhs[0], lhs[1] - rhs[1])))

        ev = (np.zeros((2, 2), dtype=complex), a)
        lhs = t(ev, t(ev, (B, b)))
        lhs = (c2 * lhs[0], c2 * lhs[1])
        na = float(np.real(np.vdot(a, a)))
        rhs = (-na * B, float(np.real(np.vdot(a, b))) * a - na * b)
        worst["vcp2"] = max(worst["vcp2"],
                            _pair_norm((lhs[0] - rhs[0], lhs[1] - rhs[1])))

        mixed = t(ea, t(ev, (B, b)))
        mixed2 = t(ev, t(ea, (B, b)))
        lhs = (c2 * (mixed[0] + mixed2[0]), c2 * (mixed[1] + mixed2[1]))
        rhs = (float(np.real(np.vdot(a, b))) * A,
               (s + 1.0) * _su2_inner(A, B) * a)
        worst["vcp3"] = max(worst["vcp3"],
                            _pair_norm((lhs[0] - rhs[0], lhs[1] - rhs[1])))

        x = rng.normal(size=(2, 2)) + 1.0j * rng.normal(size=(2, 2))
        ident = A @ x + x @ A - np.trace(A @ x) * np.eye(2) - np.trace(x) * A
        worst["matrix_identity"] = max(worst["matrix_identity"],
                                       float(np.abs(ident).max()))
    return worst
