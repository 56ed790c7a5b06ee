import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from heatsource.errors import GridMismatchError, ParameterError, QuadratureError
from heatsource.spectral import (
    CosineSeries2D,
    GridFunction2D,
    QuadratureSpec,
    ResolutionWarning,
    SpectralEvaluator,
    TimeProfile,
    alpha_integral,
    cos_moment,
    cosine_transform_G,
    data_functional_H,
    grid_transform,
    h_evaluator,
    kernel_D,
    l2_error,
    l2_norm,
    mode_transform_closed,
    quad_1d,
    series_transform,
    simpson_weights,
    synthesize,
    transform_evaluator,
)
from heatsource.spectral.quadrature import oscillatory_node_count
from heatsource.spectral.summation import cosine_sums, kahan_sum
from heatsource.spectral.transforms import default_alpha_nodes, n_window

PI = math.pi


def brute_cos_moment(k, alpha):
    val, _ = integrate.quad(lambda x: math.cos(k * PI * x) * math.cos(alpha * x), 0.0, 1.0,
                            limit=200, epsabs=1e-14, epsrel=1e-13)
    return val


def brute_kernel(phi, lam, t_end=1.0):
    val, _ = integrate.quad(lambda s: math.exp(lam * (s - t_end)) * float(phi(s)), 0.0, t_end,
                            limit=400, epsabs=1e-15, epsrel=1e-13,
                            points=[max(t_end - 1.0 / max(lam, 1.0), 0.0)] if t_end > 0 else None)
    return val


# -- summation and quadrature ---------------------------------------------------


def test_kahan_sum_recovers_cancelled_terms():
    values = np.array([1e16, 1.0, -1e16, 1.0] * 1000)
    assert kahan_sum(values) == 2000.0
    assert kahan_sum(values) == math.fsum(values)


def test_kahan_sum_is_bitwise_reproducible():
    rng = np.random.default_rng(3)
    v = rng.normal(size=100000) * 10.0 ** rng.integers(-8, 8, 100000)
    assert kahan_sum(v) == kahan_sum(v.copy())


def test_cosine_sums_match_dense_product():
    rng = np.random.default_rng(0)
    w, t, f = rng.normal(size=300), rng.uniform(0, 5, 300), rng.uniform(0, 40, 17)
    np.testing.assert_allclose(cosine_sums(w, t, f), np.cos(np.outer(f, t)) @ w, rtol=1e-12, atol=1e-12)


def test_simpson_weights_integrate_cubics_exactly():
    w = simpson_weights(11, 0.0, 2.0)
    x = np.linspace(0.0, 2.0, 11)
    assert math.isclose(np.sum(w * x ** 3), 4.0, rel_tol=1e-14)
    with pytest.raises(ParameterError):
        simpson_weights(10, 0.0, 1.0)


@pytest.mark.parametrize("spec", [QuadratureSpec(), QuadratureSpec(4, 9, "simpson")])
def test_quad_1d_polynomial(spec):
    assert math.isclose(quad_1d(lambda t: 3 * t ** 2, 0.0, 1.0, spec), 1.0, rel_tol=1e-13)


def test_quad_1d_reports_failing_node():
    spec = QuadratureSpec(1, 5, "simpson")
    with pytest.raises(QuadratureError) as info, np.errstate(divide="ignore"):
        quad_1d(lambda t: 1.0 / (t - 0.5), 0.0, 1.0, spec, context="probe")
    assert info.value.node == 0.5
    assert "probe" in str(info.value)


def test_quadrature_spec_validation():
    with pytest.raises(ParameterError):
        QuadratureSpec(1, 4, "simpson")
    with pytest.raises(ParameterError):
        QuadratureSpec(0, 8)
    with pytest.raises(ParameterError):
        QuadratureSpec(1, 8, "trapezoid")


def test_oscillatory_node_count_resolves_eight_per_period():
    n = oscillatory_node_count(1.0, 2 * PI * 10)
    assert n % 2 == 1 and n >= 81


# -- fields ---------------------------------------------------------------------


def test_grid_function_validation():
    with pytest.raises(ParameterError):
        GridFunction2D(np.zeros((4, 5)))
    bad = np.zeros((5, 5))
    bad[2, 2] = np.nan
    with pytest.raises(ParameterError):
        GridFunction2D(bad)
    a, b = GridFunction2D.zeros(5, 5), GridFunction2D.zeros(7, 5)
    with pytest.raises(GridMismatchError):
        a - b


def test_grid_values_are_read_only():
    g = GridFunction2D.zeros(5, 5)
    with pytest.raises(ValueError):
        g.values[0, 0] = 1.0


def test_l2_norm_of_single_mode():
    w = GridFunction2D.from_function(lambda x, y: np.cos(PI * x) * np.cos(PI * y), 201, 201)
    assert math.isclose(l2_norm(w) ** 2, 0.25, rel_tol=1e-9)
    assert l2_error(w, w) == 0.0


def test_series_merges_and_drops_zeros():
    s = CosineSeries2D({(1, 1): 1.0, (2, 0): 0.0})
    assert s.terms == {(1, 1): 1.0}
    assert (s - s).terms == {}
    assert not CosineSeries2D()
    with pytest.raises(ParameterError):
        CosineSeries2D({(-1, 0): 1.0})


def test_series_norms_termwise():
    s = CosineSeries2D({(0, 0): 2.0, (1, 1): 1.0, (0, 3): 1.0})
    assert math.isclose(s.l2_norm_sq(), 4.0 + 0.25 + 0.5)
    h1 = CosineSeries2D({(1, 1): 1.0}).h1_norm_sq()
    assert math.isclose(h1, 0.25 + PI ** 2 / 2)


def test_rasterize_matches_evaluate_and_handles_huge_modes():
    s = CosineSeries2D({(3, 2): 0.7, (0, 1): -1.2})
    g = s.rasterize(11, 9)
    X, Y = np.meshgrid(g.x, g.y, indexing="ij")
    np.testing.assert_allclose(g.values, s.evaluate(X, Y), atol=1e-14)
    # cos(10^15 pi x) on a 201-node grid: phase is exact modulo 2 pi
    big = CosineSeries2D({(10 ** 15, 0): 1.0}).rasterize(201, 3)
    np.testing.assert_allclose(big.values[:, 0], np.cos(PI * 0 * np.arange(201)), atol=0)


# -- time profiles ---------------------------------------------------------------


PROFILES = [TimeProfile.exp_decay(PI ** 2, PI ** 2), TimeProfile.exp_decay(-3.0, 2.0),
            TimeProfile.constant(1.5), TimeProfile.counterexample()]


@pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
@pytest.mark.parametrize("phi", PROFILES, ids=lambda p: p.kind)
@pytest.mark.parametrize("lam", [0.0, 1.0, PI ** 2, 2 * PI ** 2, 1e3])
def test_closed_kernel_matches_adaptive_quadrature(phi, lam):
    expect = brute_kernel(phi, lam)
    assert math.isclose(float(phi.kernel_closed(lam)), expect, rel_tol=1e-10, abs_tol=1e-14)


@pytest.mark.parametrize("phi", PROFILES, ids=lambda p: p.kind)
def test_quadrature_kernel_matches_closed_form(phi):
    lam = np.array([0.0, 3.0, 50.0, 2e3, 9e4])
    np.testing.assert_allclose(phi.kernel_quadrature(lam), phi.kernel_closed(lam), rtol=1e-10, atol=1e-16)


def test_kernel_at_intermediate_time():
    phi = TimeProfile.constant(1.0)
    assert math.isclose(float(phi.kernel_closed(2.0, 0.5)), (1 - math.exp(-1.0)) / 2.0, rel_tol=1e-14)
    assert abs(float(phi.kernel_quadrature(2.0, 0.5)[0]) - (1 - math.exp(-1.0)) / 2.0) < 1e-14


def test_sampled_profile_uses_quadrature():
    t = np.linspace(0.0, 1.0, 1001)
    phi = TimeProfile.sampled(t, np.exp(-t), condition_h=True)
    assert not phi.has_closed_form
    assert phi.condition_h() is True
    exact = float(TimeProfile.exp_decay(1.0, 1.0).kernel_closed(4.0))
    assert math.isclose(float(phi.kernel(4.0)[0]), exact, rel_tol=1e-6)
    with pytest.raises(ParameterError):
        phi.kernel_closed(1.0)


def test_sampled_profile_validation():
    with pytest.raises(ParameterError):
        TimeProfile.sampled([0.0, 0.5], [1.0, 1.0])
    with pytest.raises(ParameterError):
        TimeProfile.sampled([0.0, 1.0], [1.0, np.inf])


@pytest.mark.parametrize("phi", PROFILES + [TimeProfile.sampled([0.0, 0.3, 1.0], [0.0, 2.0, 1.0])],
                         ids=lambda p: p.kind)
def test_profile_dict_round_trip(phi):
    back = TimeProfile.from_dict(phi.to_dict())
    t = np.linspace(0, 1, 7)
    np.testing.assert_array_equal(back(t), phi(t))


def test_condition_h_of_closed_profiles():
    assert TimeProfile.exp_decay(1.0, 1.0).condition_h()
    assert not TimeProfile.constant(0.0).condition_h()


# -- G ----------------------------------------------------------------------------


@pytest.mark.parametrize("k", [0, 1, 2, 5])
@pytest.mark.parametrize("alpha", [0.0, 0.3, 2.9, 7.1, 40.0])
def test_cos_moment_matches_quadrature(k, alpha):
    assert math.isclose(float(cos_moment(k, alpha)), brute_cos_moment(k, alpha), rel_tol=1e-10, abs_tol=1e-13)


@pytest.mark.parametrize("k", [1, 2, 7])
def test_cos_moment_is_continuous_at_the_pole(k):
    kpi = k * PI
    assert math.isclose(float(cos_moment(k, kpi)), 0.5, rel_tol=1e-15)
    for h in (1e-9, 1e-5, 1e-4, 2e-4, 1e-2, 0.99, 1.01):
        assert math.isclose(float(cos_moment(k, kpi + h)), brute_cos_moment(k, kpi + h), rel_tol=1e-9)


@settings(max_examples=60, deadline=None)
@given(k=st.integers(0, 6), alpha=st.floats(-60, 60))
def test_cos_moment_property_matches_quadrature(k, alpha):
    assert abs(float(cos_moment(k, alpha)) - brute_cos_moment(k, alpha)) < 1e-11


def test_mode_transform_closed_y_orthogonality():
    assert mode_transform_closed(1, 1, PI, 1) == 0.25
    assert mode_transform_closed(1, 1, PI, -1) == 0.25
    assert np.all(mode_transform_closed(1, 1, np.array([0.5, 2.0]), 2) == 0.0)
    assert mode_transform_closed(0, 0, 0.0, 0) == 1.0


def test_series_and_grid_transforms_agree():
    s = CosineSeries2D({(1, 1): 1.0, (0, 1): 1.0, (2, 0): -0.5})
    alpha = np.array([0.0, PI / 2, PI, 5.3, 10.0])
    gs, gg = series_transform(s), grid_transform(s.rasterize(201, 201))
    for n in (0, 1, -1, 2):
        np.testing.assert_allclose(gg(alpha, n), gs(alpha, n), atol=2e-8)
    assert math.isclose(cosine_transform_G(s, PI / 2, 1), 1.0 / (3 * PI) + 0.5 * float(cos_moment(0, PI / 2)),
                        rel_tol=1e-14)


def test_grid_transform_warns_beyond_resolution():
    g = grid_transform(GridFunction2D.zeros(21, 21))
    with pytest.warns(ResolutionWarning):
        g(np.array([100.0]), 0)


@settings(max_examples=40, deadline=None)
@given(coeffs=st.lists(st.tuples(st.integers(0, 4), st.integers(0, 3), st.floats(-2, 2)), max_size=5),
       alpha=st.floats(-30, 30), n=st.integers(-4, 4), scale=st.floats(-3, 3))
def test_G_even_and_linear(coeffs, alpha, n, scale):
    w = CosineSeries2D.from_triples(coeffs)
    g = series_transform(w)
    v = g(alpha, n)
    assert g(-alpha, n) == v and g(alpha, -n) == v
    assert math.isclose(series_transform(scale * w)(alpha, n), scale * v, rel_tol=1e-12, abs_tol=1e-14)
    other = CosineSeries2D({(1, 1): 1.0})
    lhs = series_transform(w + other)(alpha, n)
    assert math.isclose(lhs, v + series_transform(other)(alpha, n), rel_tol=1e-12, abs_tol=1e-13)


# -- D and H ------------------------------------------------------------------------------


def test_kernel_D_of_decaying_profile_reduced_formula():
    phi = TimeProfile.exp_decay(PI ** 2, PI ** 2)
    for alpha in (1.0, 0.3, 4.0):
        expect = PI ** 2 * math.exp(-PI ** 2) * (1 - math.exp(-alpha ** 2)) / alpha ** 2
        assert math.isclose(kernel_D(phi, alpha, 1), expect, rel_tol=1e-10)
    assert math.isclose(kernel_D(phi, 0.0, 1), PI ** 2 * math.exp(-PI ** 2), rel_tol=1e-14)


def test_kernel_D_quadrature_method():
    phi = TimeProfile.exp_decay(2.0, 1.0)
    a = np.linspace(-10, 10, 9)
    np.testing.assert_allclose(kernel_D(phi, a, 2, method="quadrature"), kernel_D(phi, a, 2), rtol=1e-11)


def test_counterexample_kernel_zeros():
    phi = TimeProfile.counterexample()
    assert abs(kernel_D(phi, PI, 1)) < 1e-15
    assert abs(kernel_D(phi, math.sqrt(2) * PI, 0)) < 1e-15
    assert abs(kernel_D(phi, PI, 1, method="quadrature")) < 1e-12


@settings(max_examples=40, deadline=None)
@given(alpha=st.floats(-50, 50), n=st.integers(-6, 6))
def test_kernel_D_even_in_alpha_and_n(alpha, n):
    phi = TimeProfile.constant(1.0)
    assert kernel_D(phi, alpha, n) == kernel_D(phi, -alpha, -n)
    assert kernel_D(phi, alpha, n) > 0


def test_data_functional_H_definition():
    g0 = series_transform(CosineSeries2D({(1, 1): 1.0}))
    g1 = series_transform(CosineSeries2D({(1, 1): 2.0, (0, 2): 1.0}))
    for alpha, n in ((0.5, 1), (3.0, -1), (2.0, 2), (1.0, 0)):
        expect = g1(alpha, n) - math.exp(-(alpha ** 2 + n ** 2 * PI ** 2)) * g0(alpha, n)
        assert data_functional_H(g0, g1, alpha, n) == expect
    assert h_evaluator(g0, g1).n_support == (-2, -1, 1, 2)


# -- synthesis -------------------------------------------------------------------------


def test_window_index():
    assert n_window(1.0) == 0
    assert n_window(1.5) == 1
    assert n_window(3.0) == 2
    assert default_alpha_nodes(1000.0) == 16001


def test_synthesize_constant_spectrum_is_sinc_kernel():
    # s = 1 at n = 0 -> (2/pi) sin(R x)/x
    R = 5.0
    s = SpectralEvaluator(lambda a, n: np.ones_like(a), "closed-form:test", (0,))
    f = synthesize(s, R, (21, 3))
    x = f.x
    expect = np.where(x == 0, 2 * R / PI, 2 * np.sin(R * x) / (PI * np.where(x == 0, 1, x)))
    np.testing.assert_allclose(f.values[:, 1], expect, atol=1e-10)
    np.testing.assert_allclose(f.values[:, 0], f.values[:, 2])


def test_synthesize_rejects_odd_spectrum():
    s = SpectralEvaluator(lambda a, n: a, "closed-form:odd", (0,))
    with pytest.raises(ParameterError):
        synthesize(s, 3.0, (5, 5))


def test_synthesize_reports_non_finite_node():
    s = SpectralEvaluator(lambda a, n: 1.0 / (a - a[3]), "closed-form:bad", (0,))
    with pytest.raises(QuadratureError), np.errstate(divide="ignore"):
        synthesize(s, 2.0, (5, 5), n_alpha=11, check_even=False)


def test_synthesize_inverts_series_transform_for_band_limited_tail():
    # truncated inversion of G(cos pi x cos pi y) converges like R^{-1/2} in L2
    w = CosineSeries2D({(1, 1): 1.0})
    errs = []
    for R in (10.0, 40.0):
        f = synthesize(series_transform(w), R, (101, 101))
        errs.append(l2_error(f, w.rasterize(101, 101)))
    assert errs[1] < 0.6 * errs[0]


def test_alpha_integral_exact_for_smooth():
    assert math.isclose(alpha_integral(np.cos, 0.0, 10.0), math.sin(10.0), rel_tol=1e-13)
    assert alpha_integral(np.cos, 1.0, 1.0) == 0.0


def test_transform_evaluator_type_check():
    with pytest.raises(TypeError):
        transform_evaluator([1, 2, 3])


def test_no_warnings_on_resolved_grid():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        grid_transform(GridFunction2D.zeros(201, 201))(np.array([10.0]), 3)
