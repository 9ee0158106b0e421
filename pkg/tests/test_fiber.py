import numpy as np
import pytest

from nehari import (
    DegenerateDirectionError,
    Field,
    FiberLine,
    HypothesisViolationError,
    Nonlinearity,
    ParameterError,
    anisotropic,
    build_grid,
    certify_direction,
    field_from_function,
    fiber_slope,
    fiber_value,
    integrate_nodal,
    kirchhoff,
    project_to_nehari,
    quasilinear,
    seminorm,
    zero_field,
)

from conftest import rand_field


def homogeneous_setup(n=199):
    """a = 1, p = 2, f = t^3: gamma(t) = t^2 |u|^2/2 - t^4 m4/4 closed form."""
    g = build_grid(1, [1.0], [n])
    u = field_from_function(g, lambda x: np.sin(np.pi * x))
    F = quasilinear(g)
    s2 = seminorm(u, 2.0) ** 2
    m4 = integrate_nodal(g, u.values ** 4)
    return g, u, F, s2, m4


def catalogue(grid):
    pvec2 = (2.0, 2.0) if grid.dim == 2 else (2.0,) * grid.dim
    pvec_aniso = (1.8, 2.2) if grid.dim == 2 else pvec2
    return [
        quasilinear(grid, p=2.0, q=2.0, a_kind="constant_one"),
        quasilinear(grid, p=2.0, q=2.0, a_kind="p_plus_q"),
        quasilinear(grid, p=3.0, q=2.0, a_kind="constant_one"),
        quasilinear(grid, p=3.0, q=2.0, a_kind="p_plus_q"),
        kirchhoff(grid, "affine", m0=1.0, slope=1.0),
        kirchhoff(grid, "log", m0=1.0),
        kirchhoff(grid, "power_sum", m0=1.0, terms=((1.0, 0.5),)),
        anisotropic(grid, pvec2),
        anisotropic(grid, pvec_aniso),
    ]


class TestFiberValue:
    def test_positive_for_small_t(self):
        g, u, F, _, _ = homogeneous_setup()
        assert fiber_value(F, u, 1e-3) > 0.0

    def test_closed_form(self):
        g, u, F, s2, m4 = homogeneous_setup()
        for t in (0.5, 1.0, 2.0):
            exact = 0.5 * t * t * s2 - 0.25 * t ** 4 * m4
            assert fiber_value(F, u, t) == pytest.approx(exact, rel=1e-12)

    def test_negative_for_large_t(self):
        g, u, F, _, _ = homogeneous_setup()
        assert fiber_value(F, u, 1e3) < 0.0

    def test_zero_direction_rejected(self):
        g = build_grid(1, [1.0], [20])
        with pytest.raises(DegenerateDirectionError):
            fiber_value(quasilinear(g), zero_field(g), 1.0)

    def test_nonpositive_t_rejected(self):
        g, u, F, _, _ = homogeneous_setup(40)
        with pytest.raises(ParameterError):
            fiber_value(F, u, 0.0)

    @pytest.mark.parametrize("fam", range(9))
    def test_matches_energy_of_scaled_field(self, fam):
        g = build_grid(2, [1.0, 1.0], [10, 10])
        F = catalogue(g)[fam]
        u = rand_field(g, 5)
        line = FiberLine(F, u)
        for t in (0.3, 1.0, 4.2):
            assert line.value(t) == pytest.approx(F.energy(u.scaled(t)),
                                                  rel=1e-11, abs=1e-12)

    @pytest.mark.parametrize("fam", range(9))
    def test_slope_matches_pairing_of_scaled_field(self, fam):
        g = build_grid(2, [1.0, 1.0], [10, 10])
        F = catalogue(g)[fam]
        u = rand_field(g, 6)
        line = FiberLine(F, u)
        for t in (0.3, 1.0, 4.2):
            assert line.slope(t) == pytest.approx(F.pairing(u.scaled(t), u),
                                                  rel=1e-10, abs=1e-12)


class TestFiberSlope:
    def test_closed_form_at_one(self):
        g, u, F, s2, m4 = homogeneous_setup()
        assert fiber_slope(F, u, 1.0) == pytest.approx(s2 - m4, rel=1e-12)

    @pytest.mark.parametrize("fam", range(9))
    def test_is_derivative_of_value(self, fam):
        g = build_grid(2, [1.0, 1.0], [10, 10])
        F = catalogue(g)[fam]
        u = rand_field(g, 8)
        line = FiberLine(F, u)
        for t in (0.2, 1.0, 3.0):
            h = 1e-6 * t
            cd = (line.value(t + h) - line.value(t - h)) / (2.0 * h)
            assert line.slope(t) == pytest.approx(cd, rel=1e-6)

    @pytest.mark.parametrize("fam", range(9))
    def test_bracket_signs(self, fam):
        g = build_grid(2, [1.0, 1.0], [12, 12])
        F = catalogue(g)[fam]
        for seed in range(3):
            u = rand_field(g, 30 + seed)
            line = FiberLine(F, u)
            assert line.slope(1e-3) > 0.0
            assert line.slope(1e3) < 0.0

    def test_small_ball_coercivity_sampled(self):
        # g(eps)*eps / |eps w|^r stays bounded below along shrinking rays
        g = build_grid(1, [1.0], [60])
        F = quasilinear(g)
        w = rand_field(g, 4)
        w = Field(g, w.values / F.ambient_norm(w))
        line = FiberLine(F, w)
        eps = np.array([1e-1, 1e-2, 1e-3, 1e-4])
        vals = eps * np.asarray(line.slope(eps)) / eps ** F.r
        assert np.all(vals > 0.0)
        assert vals[-1] >= 0.5 * vals[-2]


class TestProjection:
    def test_fixed_point(self):
        g, u, F, s2, m4 = homogeneous_setup()
        t_u = (s2 / m4) ** 0.5
        scaled = u.scaled(t_u)  # g(1) = 0 for this direction
        t, diag = project_to_nehari(F, scaled)
        assert t == pytest.approx(1.0, abs=1e-8)

    def test_homogeneous_closed_form(self):
        g, u, F, s2, m4 = homogeneous_setup()
        t, diag = project_to_nehari(F, u)
        assert t == pytest.approx((s2 / m4) ** 0.5, rel=1e-10)
        # and the discrete root approximates the continuum value at O(h^2)
        continuum = (np.pi ** 2 / 2.0 / (3.0 / 8.0)) ** 0.5
        assert t == pytest.approx(continuum, abs=50 * g.spacing[0] ** 2)

    def test_diagnostics(self):
        g, u, F, _, _ = homogeneous_setup()
        t, diag = project_to_nehari(F, u)
        assert diag.bracket[0] < t < diag.bracket[1]
        scale = 1.0 + abs(diag.slope_at_root)
        assert abs(diag.slope_at_root) <= 1e-6 * scale
        assert diag.sign_changes_observed == 1
        assert diag.monotone_certificate is True

    @pytest.mark.parametrize("s", [0.5, 2.0, 10.0])
    def test_scaling_covariance(self, s):
        g, u, F, _, _ = homogeneous_setup(99)
        t_base, _ = project_to_nehari(F, u)
        t_scaled, _ = project_to_nehari(F, u.scaled(s))
        assert t_scaled == pytest.approx(t_base / s, rel=1e-8)

    def test_zero_direction(self):
        g = build_grid(1, [1.0], [20])
        with pytest.raises(DegenerateDirectionError):
            project_to_nehari(quasilinear(g), zero_field(g))

    def test_missing_geometry_raises_with_trace(self):
        # linear f with small coefficient: g(t) = t(|u|^2 - c m2) > 0 for all t
        g = build_grid(1, [1.0], [60])
        F = quasilinear(g, f=Nonlinearity.power(2.0, 0.5))
        u = rand_field(g, 3)
        with pytest.raises(HypothesisViolationError) as err:
            project_to_nehari(F, u)
        assert len(err.value.trace) > 10
        ts = [t for t, _ in err.value.trace]
        assert max(ts) > 1e8


class TestCertificates:
    @pytest.mark.parametrize("fam", range(9))
    def test_catalogue_certificates_hold(self, fam):
        g = build_grid(2, [1.0, 1.0], [12, 12])
        F = catalogue(g)[fam]
        for seed in range(5):
            cert = certify_direction(F, rand_field(g, 50 + seed))
            assert cert.all_hold(), cert.witness
            assert cert.sign_changes == 1
            assert cert.label == "sampled"

    def test_sublinear_term_breaks_monotonicity(self):
        # f = t^3 + sqrt-type term: f(t)/t^{p-1} is not monotone, the slope
        # ratio increases near 0 and the slope changes sign more than once
        g = build_grid(1, [1.0], [80])
        F = quasilinear(g, f=Nonlinearity((4.0, 1.5), (1.0, 1.0)))
        u = rand_field(g, 9)
        cert = certify_direction(F, u)
        assert not cert.slope_ratio_decreasing
        assert cert.witness is not None
        assert cert.witness["certificate"] == "slope_ratio_decreasing"
        t_lo, t_hi = cert.witness["t_pair"]
        assert t_lo < t_hi

    def test_zero_direction_rejected(self):
        g = build_grid(1, [1.0], [20])
        with pytest.raises(DegenerateDirectionError):
            certify_direction(quasilinear(g), zero_field(g))


class TestRayInvariants:
    @pytest.mark.parametrize("fam", range(9))
    def test_max_property_and_positivity(self, fam):
        g = build_grid(2, [1.0, 1.0], [12, 12])
        F = catalogue(g)[fam]
        for seed in range(3):
            u = rand_field(g, 80 + seed)
            t_u, _ = project_to_nehari(F, u)
            line = FiberLine(F, u)
            peak = line.value(t_u)
            assert peak > 0.0
            ts = np.logspace(np.log10(t_u) - 3, np.log10(t_u) + 3, 200)
            assert np.all(peak >= line.value(ts) - 1e-10 * abs(peak))

    def test_projected_norms_bounded_away_from_zero(self):
        g = build_grid(1, [1.0], [60])
        g_fine = build_grid(1, [1.0], [120])
        deltas = []
        for grid in (g, g_fine):
            F = quasilinear(grid)
            norms = []
            for seed in range(100):
                u = rand_field(grid, seed)
                t_u, _ = project_to_nehari(F, u, scan_points=0)
                norms.append(F.ambient_norm(u.scaled(t_u)))
            deltas.append(min(norms))
        assert deltas[0] > 0.0 and deltas[1] > 0.0
        # stable under refinement: same order of magnitude
        assert abs(deltas[0] - deltas[1]) <= 0.5 * max(deltas)
