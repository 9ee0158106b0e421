import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from nehari import (
    AnisotropicOperator,
    ConfigurationError,
    ContractError,
    Field,
    Functional,
    KirchhoffOperator,
    Nonlinearity,
    ParameterError,
    QuasilinearOperator,
    anisotropic,
    axis_norm,
    build_grid,
    field_from_function,
    integrate_nodal,
    kirchhoff,
    quasilinear,
    seminorm,
    zero_field,
)

from conftest import rand_field


def sine_1d(n=199):
    g = build_grid(1, [1.0], [n])
    return g, field_from_function(g, lambda x: np.sin(np.pi * x))


def all_families(grid):
    return [
        quasilinear(grid),
        quasilinear(grid, p=3.0, q=2.0, a_kind="p_plus_q"),
        kirchhoff(grid),
        anisotropic(grid, (1.8, 2.2) if grid.dim == 2 else (2.0,) * grid.dim),
    ]


class TestNonlinearity:
    @given(t=st.floats(-50, 50))
    @settings(max_examples=60, deadline=None)
    def test_odd(self, t):
        nl = Nonlinearity((4.0, 2.5), (1.0, 0.3))
        assert nl.f(-t) == pytest.approx(-nl.f(t), abs=1e-12 * (1 + abs(nl.f(t))))

    def test_nonnegative_on_positive_axis(self):
        nl = Nonlinearity((4.0, 1.5), (2.0, 0.5))
        t = np.logspace(-6, 6, 121)
        assert np.all(nl.f(t) >= 0.0)

    @pytest.mark.parametrize("t", [0.3, 1.0, 2.7, 9.0])
    def test_primitive_matches_quadrature(self, t):
        nl = Nonlinearity((4.0, 2.5), (1.0, 0.7))
        val, _ = quad(lambda s: float(nl.f(s)), 0.0, t, epsrel=1e-12)
        assert nl.F(t) == pytest.approx(val, rel=1e-8)

    def test_rejects_negative_coefficient_by_default(self):
        with pytest.raises(ParameterError, match="allow_signed"):
            Nonlinearity((4.0, 2.0), (1.0, -2.0))
        nl = Nonlinearity((4.0, 2.0), (1.0, -2.0), allow_signed=True)
        assert nl.f(1.0) == pytest.approx(-1.0)  # t^3 - 2t at t=1

    def test_rejects_small_exponent(self):
        with pytest.raises(ParameterError):
            Nonlinearity((1.0,), (1.0,))

    def test_kind(self):
        assert Nonlinearity.power(4.0).kind == "pure_power"
        assert Nonlinearity((4.0, 2.5), (1.0, 1.0)).kind == "sum_of_powers"


class TestQuasilinearOperator:
    def test_requires_p_ge_q_gt_1(self):
        with pytest.raises(ParameterError):
            QuasilinearOperator(p=2.0, q=3.0)
        with pytest.raises(ParameterError):
            QuasilinearOperator(p=2.0, q=1.0)

    def test_coefficient_bounds_sampled(self):
        op = QuasilinearOperator(p=3.0, q=2.0, kind="p_plus_q")
        t = np.logspace(-6, 6, 201)
        envelope = 1.0 + t ** ((op.q - op.p) / op.p)
        a = op.a(t)
        assert np.all(op.k0 * envelope <= a * (1 + 1e-12))
        assert np.all(a <= op.k1 * envelope * (1 + 1e-12))

    def test_coefficient_non_increasing(self):
        for op in (QuasilinearOperator(p=2.0),
                   QuasilinearOperator(p=3.0, q=2.0, kind="p_plus_q")):
            t = np.logspace(-6, 6, 201)
            a = op.a(t)
            assert np.all(np.diff(a) <= 1e-12 * np.abs(a[:-1]) + 1e-300)

    def test_primitive_closed_forms(self):
        op = QuasilinearOperator(p=3.0, q=2.0, kind="p_plus_q")
        t = np.array([0.0, 0.5, 2.0, 100.0])
        assert op.A(t) == pytest.approx(t + 1.5 * t ** (2.0 / 3.0), rel=1e-13)

    def test_user_table_matches_closed_form(self):
        p, q = 3.0, 2.0
        ref = QuasilinearOperator(p=p, q=q, kind="p_plus_q")
        usr = QuasilinearOperator(p=p, q=q, kind="user_table",
                                  a=lambda t: 1.0 + t ** ((q - p) / p))
        t = np.logspace(-8, 8, 33)
        assert usr.A(t) == pytest.approx(ref.A(t), rel=1e-8)

    def test_user_table_requires_callable(self):
        with pytest.raises(ParameterError):
            QuasilinearOperator(kind="user_table")


class TestKirchhoffOperator:
    @pytest.mark.parametrize("op", [
        KirchhoffOperator("affine", m0=1.0, slope=1.0),
        KirchhoffOperator("log", m0=1.0),
        KirchhoffOperator("power_sum", m0=1.0, terms=((1.0, 0.5),)),
    ])
    def test_catalogue_invariants(self, op):
        t = np.logspace(-6, 6, 241)
        m = op.M(t)
        assert op.M(0.0) == pytest.approx(op.m0)
        assert op.m0 > 0.0
        assert np.all(np.diff(m) >= -1e-12 * np.abs(m[:-1]))          # increasing
        ratio = m / t
        assert np.all(np.diff(ratio) <= 1e-12 * np.abs(ratio[:-1]))   # M/t decreasing
        hat = op.M_hat(t)
        assert np.all(hat >= 0.5 * m * t - 1e-12 * np.abs(hat))       # Mhat >= Mt/2

    def test_primitive_matches_quadrature(self):
        op = KirchhoffOperator("log", m0=2.0)
        for t in (0.5, 3.0, 40.0):
            val, _ = quad(lambda s: float(op.M(s)), 0.0, t, epsrel=1e-12)
            assert op.M_hat(t) == pytest.approx(val, rel=1e-10)

    def test_validation(self):
        with pytest.raises(ParameterError):
            KirchhoffOperator("affine", m0=0.0)
        with pytest.raises(ParameterError):
            KirchhoffOperator("power_sum", terms=((1.0, 1.5),))
        with pytest.raises(ParameterError):
            KirchhoffOperator("power_sum", terms=((0.0, 0.5),))


class TestAnisotropicOperator:
    def test_p_star(self):
        op = AnisotropicOperator((2.0, 2.0, 2.0))
        assert op.p_star(3) == pytest.approx(6.0)
        op = AnisotropicOperator((1.5, 2.0, 2.5))
        assert op.p_star(3) == pytest.approx(3.0 / (1.0 / 1.5 + 0.5 + 0.4 - 1.0))

    def test_p_star_infinite_when_sum_small(self):
        assert AnisotropicOperator((2.0, 2.0)).p_star(2) == np.inf
        assert AnisotropicOperator((4.0, 4.0, 4.0)).p_star(3) == np.inf

    def test_rejects_small_exponent(self):
        with pytest.raises(ParameterError):
            AnisotropicOperator((2.0, 1.0))

    def test_dim_mismatch(self):
        g = build_grid(2, [1.0, 1.0], [5, 5])
        with pytest.raises(ConfigurationError):
            Functional(g, AnisotropicOperator((2.0, 2.0, 2.0)),
                       Nonlinearity.power(4.0))


class TestFunctionalBasics:
    def test_zero_energy(self):
        g = build_grid(2, [1.0, 1.0], [10, 10])
        for F in all_families(g):
            assert F.energy(zero_field(g)) == 0.0

    def test_homogeneity_and_small_ball_exponents(self):
        g = build_grid(2, [1.0, 1.0], [6, 6])
        Fq = quasilinear(g, p=3.0, q=2.0, a_kind="p_plus_q")
        assert (Fq.p_hom, Fq.r) == (3.0, 3.0)
        Fk = kirchhoff(g)
        assert (Fk.p_hom, Fk.r) == (4.0, 2.0)
        Fa = anisotropic(g, (1.8, 2.2))
        assert (Fa.p_hom, Fa.r) == (2.2, 2.2)

    def test_grid_mismatch(self):
        g = build_grid(1, [1.0], [10])
        other = build_grid(1, [1.0], [11])
        F = quasilinear(g)
        with pytest.raises(ContractError):
            F.energy(zero_field(other))


class TestEnergy:
    def test_quasilinear_sine(self):
        g, u = sine_1d()
        F = quasilinear(g)
        exact = np.pi ** 2 / 4.0 - 3.0 / 32.0
        assert abs(F.energy(u) - exact) <= 10 * g.spacing[0] ** 2

    def test_kirchhoff_affine_sine(self):
        # Mhat(t) = t + t^2/2 evaluated at |u|^2 = pi^2/2
        g, u = sine_1d()
        F = kirchhoff(g, f=Nonlinearity.power(4.0))
        t = np.pi ** 2 / 2.0
        exact = 0.5 * (t + t * t / 2.0) - 3.0 / 32.0
        assert abs(F.energy(u) - exact) <= 50 * g.spacing[0] ** 2


class TestPairing:
    def test_zero_direction(self):
        g = build_grid(2, [1.0, 1.0], [8, 8])
        for F in all_families(g):
            v = rand_field(g, 2)
            assert F.pairing(zero_field(g), v) == 0.0

    def test_quasilinear_sine_self_pairing(self):
        g, u = sine_1d()
        F = quasilinear(g)
        exact = np.pi ** 2 / 2.0 - 3.0 / 8.0
        assert abs(F.pairing(u, u) - exact) <= 20 * g.spacing[0] ** 2

    @pytest.mark.parametrize("fam", range(4))
    def test_central_difference_consistency(self, fam):
        g = build_grid(2, [1.0, 1.0], [12, 12])
        F = all_families(g)[fam]
        eps = 1e-5
        worst = 0.0
        for seed in range(50):
            u = rand_field(g, 100 + seed)
            v = rand_field(g, 500 + seed)
            pair = F.pairing(u, v)
            e_plus = F.energy(Field(g, u.values + eps * v.values))
            e_minus = F.energy(Field(g, u.values - eps * v.values))
            cd = (e_plus - e_minus) / (2.0 * eps)
            worst = max(worst, abs(pair - cd) / max(abs(pair), abs(cd), 1e-8))
        assert worst <= 1e-5


class TestResidual:
    def test_zero_field(self):
        g = build_grid(2, [1.0, 1.0], [8, 8])
        for F in all_families(g):
            assert np.all(F.residual(zero_field(g)).values == 0.0)

    @pytest.mark.parametrize("fam", range(4))
    def test_matches_pairing(self, fam):
        g = build_grid(2, [1.0, 1.0], [10, 10])
        F = all_families(g)[fam]
        u = rand_field(g, 21)
        R = F.residual(u)
        for seed in range(10):
            v = rand_field(g, 700 + seed)
            lhs = integrate_nodal(g, R.values * v.values)
            rhs = F.pairing(u, v)
            assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)

    def test_semilinear_euler_lagrange(self):
        # p=2, a=1: residual ~ -u'' - u^3; on sin(pi x) that is
        # pi^2 sin(pi x) - sin^3(pi x), to second order
        g, u = sine_1d(399)
        F = quasilinear(g)
        x = g.axis_nodes(0)
        exact = np.pi ** 2 * np.sin(np.pi * x) - np.sin(np.pi * x) ** 3
        err = np.abs(F.residual(u).values - exact).max()
        assert err <= 5 * np.pi ** 4 * g.spacing[0] ** 2


class TestAmbientNorm:
    def test_zero(self):
        g = build_grid(2, [1.0, 1.0], [8, 8])
        for F in all_families(g):
            assert F.ambient_norm(zero_field(g)) == 0.0

    def test_kirchhoff_sine(self):
        g, u = sine_1d()
        F = kirchhoff(g)
        assert abs(F.ambient_norm(u) - np.pi / np.sqrt(2.0)) <= 5 * g.spacing[0] ** 2

    def test_anisotropic_bubble(self):
        g = build_grid(2, [1.0, 1.0], [63, 63])
        u = field_from_function(g, lambda x, y: x * (1 - x) * y * (1 - y))
        F = anisotropic(g, (2.0, 2.0))
        exact = 2.0 * np.sqrt(1.0 / 90.0)
        assert abs(F.ambient_norm(u) - exact) <= 10 * g.spacing[0] ** 2


class TestDecompose:
    def test_zero(self):
        g = build_grid(2, [1.0, 1.0], [8, 8])
        for F in all_families(g):
            assert F.decompose(zero_field(g)) == (0.0, 0.0, 0.0, 0.0)

    @pytest.mark.parametrize("fam", range(4))
    def test_identities(self, fam):
        g = build_grid(2, [1.0, 1.0], [9, 9])
        F = all_families(g)[fam]
        for seed in range(100):
            u = rand_field(g, seed)
            i0, i, j0, j = F.decompose(u)
            assert F.energy(u) == pytest.approx(i0 - i, rel=1e-12, abs=1e-13)
            assert F.pairing(u, u) == pytest.approx(j0 - j, rel=1e-12, abs=1e-13)

    def test_anisotropic_j0_is_axis_norm_sum(self):
        g = build_grid(2, [1.0, 1.0], [11, 11])
        pvec = (1.8, 2.2)
        F = anisotropic(g, pvec)
        for seed in range(5):
            u = rand_field(g, 40 + seed)
            j0 = F.decompose(u)[2]
            expected = sum(axis_norm(u, i, p) ** p for i, p in enumerate(pvec))
            assert j0 == pytest.approx(expected, rel=1e-10)


class TestEvenness:
    @pytest.mark.parametrize("fam", range(4))
    def test_sign_flip(self, fam):
        g = build_grid(2, [1.0, 1.0], [10, 10])
        F = all_families(g)[fam]
        for seed in range(10):
            u = rand_field(g, seed)
            assert F.energy(-u) == pytest.approx(F.energy(u), rel=1e-13)

    def test_abs_does_not_increase_energy_1d(self):
        g = build_grid(1, [1.0], [80])
        F = quasilinear(g)
        for seed in range(10):
            u = rand_field(g, seed)
            assert F.energy(Field(g, np.abs(u.values))) <= F.energy(u) + 1e-10


class TestGrowthBounds:
    def test_quasilinear_sandwich(self):
        # k0 (t^p + (p/q) t^q) <= A(t^p) <= k1 (t^p + (p/q) t^q)
        op = QuasilinearOperator(p=3.0, q=2.0, kind="p_plus_q")
        t = np.logspace(-6, 6, 201)
        mid = op.A(t ** op.p)
        env = t ** op.p + (op.p / op.q) * t ** op.q
        assert np.all(op.k0 * env <= mid * (1 + 1e-12))
        assert np.all(mid <= op.k1 * env * (1 + 1e-12))

    @pytest.mark.parametrize("op", [
        KirchhoffOperator("affine"),
        KirchhoffOperator("log"),
        KirchhoffOperator("power_sum"),
    ])
    def test_kirchhoff_linear_upper_bound(self, op):
        t = np.logspace(-6, 6, 241)
        m = op.M(t)
        m1 = float(op.M(1.0))
        C = float(np.max(m - m1 * t))
        assert np.isfinite(C)
        assert np.all(m <= m1 * t + C + 1e-12 * np.maximum(np.abs(m), 1.0))
