"""Energy functionals for the three operator families.

Each functional has the shape ``Phi(u) = I0(u) - I(u)`` with ``I = integral
F(u)``, and the duality pairing decomposes as ``Phi'(u)u = J0(u) - J(u)`` with
``J = integral f(u) u``:

* quasilinear: ``I0 = (1/p) integral A(|grad u|^p)`` with ``A`` the primitive
  of the coefficient ``a``;
* Kirchhoff: ``I0 = (1/2) Mhat(|grad u|_2^2)`` with ``Mhat`` the primitive of
  the stiffness law ``M``;
* anisotropic: ``I0 = sum_i (1/p_i) integral |d_i u|^{p_i}``.

All quadratures run over the cell lattice of the owning grid, so ``pairing``
is the exact derivative of the discrete ``energy`` (up to the tiny gradient
regularization noted below) and ``residual`` matches ``pairing`` against the
volume-weighted nodal dot product by construction.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigurationError, ContractError, ParameterError
from .grid import (
    Field,
    Grid,
    axis_edge_differences,
    axis_edge_differences_adjoint,
    axis_norm,
    axis_square_cells,
    integrate,
    integrate_nodal,
    seminorm,
    transverse_cell_average,
    transverse_cell_average_adjoint,
)

# Added to |grad u|^p before fractional powers of it are taken, so that
# exactly flat cells contribute 0 instead of 0 * inf.
GRAD_EPS = 1e-30


class Nonlinearity:
    """Odd power-sum nonlinearity ``f(t) = sum_j c_j |t|^(a_j - 2) t``.

    The primitive is ``F(t) = sum_j (c_j / a_j) |t|^(a_j)``.  Exponents must
    exceed 1; coefficients must be nonnegative unless ``allow_signed=True``,
    which exists so the audit tooling can build deliberately broken examples.
    """

    __slots__ = ("exponents", "coefficients")

    def __init__(self, exponents, coefficients, allow_signed: bool = False):
        exponents = tuple(float(a) for a in np.atleast_1d(exponents))
        coefficients = tuple(float(c) for c in np.atleast_1d(coefficients))
        if len(exponents) != len(coefficients) or not exponents:
            raise ParameterError("exponents and coefficients must pair up")
        for a in exponents:
            if not a > 1.0:
                raise ParameterError(f"nonlinearity exponent must exceed 1, got {a}")
        if not allow_signed:
            for c in coefficients:
                if c < 0.0:
                    raise ParameterError(
                        f"negative coefficient {c}; pass allow_signed=True to audit such f")
        object.__setattr__(self, "exponents", exponents)
        object.__setattr__(self, "coefficients", coefficients)

    def __setattr__(self, name, value):
        raise AttributeError("Nonlinearity is immutable")

    @classmethod
    def power(cls, alpha: float, coefficient: float = 1.0) -> "Nonlinearity":
        return cls((alpha,), (coefficient,))

    @property
    def kind(self) -> str:
        return "pure_power" if len(self.exponents) == 1 else "sum_of_powers"

    @property
    def growth_exponent(self) -> float:
        return max(self.exponents)

    def f(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for a, c in zip(self.exponents, self.coefficients):
            # |t|^(a-2) t written as sign(t) |t|^(a-1): finite for every a > 1
            out = out + c * np.sign(t) * np.abs(t) ** (a - 1.0)
        return out

    def F(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for a, c in zip(self.exponents, self.coefficients):
            out = out + (c / a) * np.abs(t) ** a
        return out

    def __repr__(self):
        terms = ", ".join(f"{c:g}*|t|^{a:g}" for a, c in
                          zip(self.exponents, self.coefficients))
        return f"Nonlinearity(F ~ {terms})"


class QuasilinearOperator:
    """Gradient coefficient ``a`` with primitive ``A`` and exponents p >= q > 1.

    Kinds:
      ``constant_one``  a(t) = 1, the plain p-Laplacian;
      ``p_plus_q``      a(t) = 1 + t^((q-p)/p), the p- plus q-Laplacian;
      ``user_table``    arbitrary callable ``a``; ``A`` is accumulated by
                        adaptive quadrature on a log grid and interpolated
                        monotonically (relative tolerance ~1e-10).
    """

    KINDS = ("constant_one", "p_plus_q", "user_table")

    def __init__(self, p: float = 2.0, q: float | None = None,
                 kind: str = "constant_one", a=None,
                 k0: float | None = None, k1: float | None = None):
        p = float(p)
        q = p if q is None else float(q)
        if not (p >= q > 1.0):
            raise ParameterError(f"need p >= q > 1, got p={p}, q={q}")
        if kind not in self.KINDS:
            raise ParameterError(f"unknown coefficient kind {kind!r}")
        if kind == "user_table" and not callable(a):
            raise ParameterError("user_table requires a callable coefficient")
        self.p = p
        self.q = q
        self.kind = kind
        self._a = a
        if k0 is None or k1 is None:
            # defaults that realize the two-sided coefficient bound for the
            # closed-form kinds (constant_one only when q == p; the general
            # fit lives in the audit module)
            k0, k1 = (1.0, 1.0) if kind == "p_plus_q" else (0.5, 1.0)
        if not (k0 > 0.0 and k1 > 0.0):
            raise ParameterError("bound constants k0, k1 must be positive")
        self.k0 = float(k0)
        self.k1 = float(k1)
        self._primitive = None

    def a(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "constant_one":
            return np.ones_like(t)
        if self.kind == "p_plus_q":
            return 1.0 + t ** ((self.q - self.p) / self.p)
        return np.asarray(self._a(t), dtype=float)

    def A(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "constant_one":
            return t.copy()
        if self.kind == "p_plus_q":
            return t + (self.p / self.q) * t ** (self.q / self.p)
        return self._primitive_table()(t)

    def _primitive_table(self):
        if self._primitive is None:
            self._primitive = _cumulative_primitive(self._a)
        return self._primitive

    def __repr__(self):
        return f"QuasilinearOperator(p={self.p:g}, q={self.q:g}, kind={self.kind!r})"


def _cumulative_primitive(fn, lo: float = 1e-12, hi: float = 1e18,
                          per_decade: int = 10):
    """Primitive of ``fn`` on [0, hi], accumulated segment-wise by quadrature."""
    from scipy.integrate import quad
    from scipy.interpolate import PchipInterpolator

    decades = int(round((np.log10(hi) - np.log10(lo)) * per_decade))
    knots = np.concatenate(([0.0], np.logspace(np.log10(lo), np.log10(hi),
                                               decades + 1)))
    vals = np.zeros_like(knots)
    for k in range(1, knots.size):
        seg, _ = quad(fn, knots[k - 1], knots[k], epsabs=0.0, epsrel=1e-12,
                      limit=200)
        vals[k] = vals[k - 1] + seg
    interp = PchipInterpolator(knots, vals, extrapolate=True)

    def primitive(t):
        return np.asarray(interp(np.asarray(t, dtype=float)), dtype=float)

    return primitive


class KirchhoffOperator:
    """Stiffness law ``M`` with primitive ``Mhat``.

    Kinds: ``affine`` M(t) = slope*t + m0, ``log`` M(t) = m0 + ln(1+t),
    ``power_sum`` M(t) = m0 + sum_i b_i t^(gamma_i) with gamma_i in (0, 1].
    All satisfy M increasing with M(0) = m0 > 0 and M(t)/t decreasing, which
    yields ``Mhat(t) >= M(t) t / 2``.
    """

    KINDS = ("affine", "log", "power_sum")

    def __init__(self, kind: str = "affine", m0: float = 1.0,
                 slope: float = 1.0, terms=((1.0, 0.5),)):
        if kind not in self.KINDS:
            raise ParameterError(f"unknown stiffness kind {kind!r}")
        m0 = float(m0)
        if not m0 > 0.0:
            raise ParameterError(f"m0 must be positive, got {m0}")
        self.kind = kind
        self.m0 = m0
        self.slope = float(slope)
        self.terms = tuple((float(b), float(g)) for b, g in terms)
        if kind == "affine" and self.slope < 0.0:
            raise ParameterError("affine stiffness slope must be nonnegative")
        if kind == "power_sum":
            for b, g in self.terms:
                if b < 0.0 or not 0.0 < g <= 1.0:
                    raise ParameterError(
                        f"power term needs b >= 0 and gamma in (0, 1], got ({b}, {g})")
            if not any(b > 0.0 for b, _ in self.terms):
                raise ParameterError("at least one power term must be active")

    def M(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "affine":
            return self.slope * t + self.m0
        if self.kind == "log":
            return self.m0 + np.log1p(t)
        out = np.full_like(t, self.m0)
        for b, g in self.terms:
            out = out + b * t ** g
        return out

    def M_hat(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "affine":
            return 0.5 * self.slope * t * t + self.m0 * t
        if self.kind == "log":
            # primitive of ln(1+t) is (1+t) ln(1+t) - t
            return self.m0 * t + (1.0 + t) * np.log1p(t) - t
        out = self.m0 * t
        for b, g in self.terms:
            out = out + b * t ** (g + 1.0) / (g + 1.0)
        return out

    def __repr__(self):
        return f"KirchhoffOperator(kind={self.kind!r}, m0={self.m0:g})"


class AnisotropicOperator:
    """Per-axis exponents ``p_i > 1``; axis order is geometric, not sorted."""

    def __init__(self, pvec):
        pvec = tuple(float(p) for p in np.atleast_1d(pvec))
        if not pvec:
            raise ParameterError("exponent vector must be nonempty")
        for p in pvec:
            if not p > 1.0:
                raise ParameterError(f"axis exponent must exceed 1, got {p}")
        self.pvec = pvec

    @property
    def p_max(self) -> float:
        return max(self.pvec)

    @property
    def p_min(self) -> float:
        return min(self.pvec)

    def p_star(self, d: int | None = None) -> float:
        """Critical exponent ``d / (sum 1/p_i - 1)``; +inf when the harmonic
        sum does not exceed 1 (every finite growth is then admissible)."""
        d = len(self.pvec) if d is None else int(d)
        s = sum(1.0 / p for p in self.pvec)
        if s <= 1.0:
            return float("inf")
        return d / (s - 1.0)

    def __repr__(self):
        return f"AnisotropicOperator(pvec={self.pvec})"


class Functional:
    """One operator family plus a nonlinearity, discretized on a grid.

    ``p_hom`` is the homogeneity exponent controlling the ray monotonicity
    certificates (p for quasilinear, 4 for Kirchhoff, max p_i for
    anisotropic); ``r`` is the small-ball exponent of the coercivity bound
    near zero (p, 2 and max p_i respectively).
    """

    def __init__(self, grid: Grid, operator, nonlinearity: Nonlinearity):
        if isinstance(operator, QuasilinearOperator):
            kind = "quasilinear"
            p_hom, r = operator.p, operator.p
        elif isinstance(operator, KirchhoffOperator):
            kind = "kirchhoff"
            p_hom, r = 4.0, 2.0
        elif isinstance(operator, AnisotropicOperator):
            kind = "anisotropic"
            if len(operator.pvec) != grid.dim:
                raise ConfigurationError(
                    f"anisotropic exponents {operator.pvec} do not match grid dim {grid.dim}")
            p_hom = r = operator.p_max
        else:
            raise ParameterError(f"unknown operator family: {operator!r}")
        self.grid = grid
        self.operator = operator
        self.nonlinearity = nonlinearity
        self.kind = kind
        self.p_hom = float(p_hom)
        self.r = float(r)

    # -- helpers -----------------------------------------------------------

    def _check_field(self, u: Field, name: str = "field") -> None:
        if u.grid != self.grid:
            raise ContractError(f"{name} lives on a different grid")

    def _square_cells(self, values):
        """Per-axis cell-collocated squared derivatives of nodal data."""
        return [axis_square_cells(self.grid, values, i)
                for i in range(self.grid.dim)]

    def _cross_cells(self, u_values, v_values):
        """Per-axis cell-collocated (d_i u)(d_i v); the exact linearization of
        :meth:`_square_cells`."""
        grid = self.grid
        out = []
        for i in range(grid.dim):
            du = axis_edge_differences(grid, u_values, i)
            dv = axis_edge_differences(grid, v_values, i)
            out.append(transverse_cell_average(grid, du * dv, i))
        return out

    def _quasi_weight(self, g2):
        """a(s) s^((p-2)/p) with s = |grad u|^p, regularized at flat cells."""
        op = self.operator
        s = g2 ** (op.p / 2.0) + GRAD_EPS
        return op.a(s) * s ** ((op.p - 2.0) / op.p)

    # -- operations --------------------------------------------------------

    def energy(self, u: Field) -> float:
        """Discrete Phi(u); exactly zero for the zero field."""
        self._check_field(u)
        return self._i0(u) - self._i(u)

    def _i(self, u: Field) -> float:
        return integrate_nodal(self.grid, self.nonlinearity.F(u.values))

    def _i0(self, u: Field) -> float:
        op = self.operator
        squares = self._square_cells(u.values)
        if self.kind == "quasilinear":
            g2 = sum(squares)
            return integrate(self.grid, op.A(g2 ** (op.p / 2.0))) / op.p
        if self.kind == "kirchhoff":
            nsq = integrate(self.grid, sum(squares))
            return 0.5 * float(op.M_hat(nsq))
        total = 0.0
        for pi, s in zip(op.pvec, squares):
            total += integrate(self.grid, s ** (pi / 2.0)) / pi
        return total

    def pairing(self, u: Field, v: Field) -> float:
        """Directional derivative ``Phi'(u) v`` of the discrete energy."""
        self._check_field(u, "u")
        self._check_field(v, "v")
        grad_part = self._pairing_grad(u.values, v.values)
        f_part = integrate_nodal(self.grid,
                                 self.nonlinearity.f(u.values) * v.values)
        return grad_part - f_part

    def _axis_weights(self, squares):
        """Cell weights multiplying (d_i u)(d_i v) in the pairing, per axis."""
        op = self.operator
        if self.kind == "quasilinear":
            w = self._quasi_weight(sum(squares))
            return [w] * self.grid.dim
        if self.kind == "kirchhoff":
            m = float(op.M(integrate(self.grid, sum(squares))))
            return [np.full(self.grid.cell_shape, m)] * self.grid.dim
        # anisotropic: |d_i u|^(p_i - 2) as a fractional power of the squares
        return [(s + GRAD_EPS) ** ((pi - 2.0) / 2.0)
                for pi, s in zip(op.pvec, squares)]

    def _pairing_grad(self, u_values, v_values) -> float:
        squares = self._square_cells(u_values)
        weights = self._axis_weights(squares)
        cross = self._cross_cells(u_values, v_values)
        return sum(integrate(self.grid, w * c) for w, c in zip(weights, cross))

    def residual(self, u: Field) -> Field:
        """Nodal field R with ``pairing(u, v) == <R, v>`` in the volume-weighted
        nodal dot product, for every v, by construction."""
        self._check_field(u)
        grid = self.grid
        squares = self._square_cells(u.values)
        weights = self._axis_weights(squares)
        out = -self.nonlinearity.f(u.values)
        for i, w in enumerate(weights):
            du = axis_edge_differences(grid, u.values, i)
            flux = du * transverse_cell_average_adjoint(grid, w, i)
            out = out + axis_edge_differences_adjoint(grid, flux, i)
        return Field._wrap(grid, out)

    def ambient_norm(self, u: Field) -> float:
        """The family's function-space norm; zero iff the field is zero."""
        self._check_field(u)
        op = self.operator
        if self.kind == "quasilinear":
            return seminorm(u, op.p)
        if self.kind == "kirchhoff":
            return seminorm(u, 2.0)
        return sum(axis_norm(u, i, pi) for i, pi in enumerate(op.pvec))

    def decompose(self, u: Field) -> tuple[float, float, float, float]:
        """Split into (I0, I, J0, J): energy = I0 - I, pairing(u,u) = J0 - J."""
        self._check_field(u)
        i0 = self._i0(u)
        i = self._i(u)
        j0 = self._pairing_grad(u.values, u.values)
        j = integrate_nodal(self.grid,
                            self.nonlinearity.f(u.values) * u.values)
        return i0, i, j0, j

    def __repr__(self):
        return (f"Functional(kind={self.kind!r}, operator={self.operator!r}, "
                f"nonlinearity={self.nonlinearity!r})")


def quasilinear(grid: Grid, p: float = 2.0, q: float | None = None,
                a_kind: str = "constant_one", a=None,
                f: Nonlinearity | None = None) -> Functional:
    """Convenience constructor for the quasilinear family (default: the
    Laplacian with a cubic nonlinearity)."""
    op = QuasilinearOperator(p=p, q=q, kind=a_kind, a=a)
    return Functional(grid, op, f or Nonlinearity.power(4.0))


def kirchhoff(grid: Grid, M_kind: str = "affine", m0: float = 1.0,
              slope: float = 1.0, terms=((1.0, 0.5),),
              f: Nonlinearity | None = None) -> Functional:
    """Convenience constructor for the Kirchhoff family (default alpha = 5,
    inside the admissible (4, 6) growth window)."""
    op = KirchhoffOperator(kind=M_kind, m0=m0, slope=slope, terms=terms)
    return Functional(grid, op, f or Nonlinearity.power(5.0))


def anisotropic(grid: Grid, pvec, f: Nonlinearity | None = None) -> Functional:
    """Convenience constructor for the anisotropic family."""
    op = AnisotropicOperator(pvec)
    return Functional(grid, op, f or Nonlinearity.power(4.0))
