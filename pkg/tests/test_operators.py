"""Numerical operator evaluation: closed-form oracles, structural
identities and probe behavior."""

import math
from fractions import Fraction

import numpy as np
import pytest

from bifrac.classifier import make_config
from bifrac.functions import (Constant, Gaussian, IndicatorBall,
                              MollifiedDelta, PowerLog, dilate)
from bifrac.matrices import RationalMatrix
from bifrac.operators import (GridSpec, NonIntegrableError, QuadratureSpec,
                              default_quad, dilation_slope, eval_bilinear,
                              eval_linear, eval_radial, lq_norm_on_grid,
                              predicted_dilation_slope,
                              translation_covariance_defect)


REF = make_config(1, 1, 1, [[1]], [[1]], 2, 2, 2, Fraction(3, 2))


def ball(n=1):
    return IndicatorBall(dim=n)


# -- closed-form values -----------------------------------------------


def test_bilinear_closed_form_instance():
    cfg = make_config(1, 1, 1, [[1]], [[1]], 2, 2, 2, Fraction(1, 2))
    est = eval_bilinear(cfg, ball(), ball(), [0.0])
    exact = (32.0 / 3.0) * (math.sqrt(2) - 1)  # iterated antiderivative
    assert est.value == pytest.approx(exact, rel=1e-2)
    assert est.abs_error < 0.05 * exact


def test_linear_closed_form_instance():
    D = RationalMatrix.from_rows([[1]])
    est = eval_linear(1, 1, D, Fraction(1, 2), ball(), [0.0])
    assert est.value == pytest.approx(4.0, rel=5e-3)


def test_radial_closed_form_instance():
    est = eval_radial(1, 1, Fraction(1), ball(), [1.0])
    assert est.value == pytest.approx(2 * math.log(2), rel=5e-3)


def test_linear_far_field_sandwich():
    # support in [-1, 1], x = 10: kernel between 9^(-1/2) and 11^(-1/2)
    D = RationalMatrix.from_rows([[1]])
    est = eval_linear(1, 1, D, Fraction(1, 2), ball(), [10.0],
                      default_quad(1, truncation_radius=16.0))
    assert 2 * 11 ** -0.5 <= est.value <= 2 * 9 ** -0.5


def test_zero_input_gives_zero():
    cfg = make_config(1, 1, 1, [[1]], [[1]], 2, 2, 2, Fraction(1, 2))
    z = Constant(dim=1, value=0.0)
    assert eval_bilinear(cfg, z, ball(), [0.0]).value == 0.0
    D = RationalMatrix.from_rows([[1]])
    assert eval_linear(1, 1, D, Fraction(1, 2), z, [0.0]).value == 0.0
    assert eval_radial(1, 1, Fraction(1), z, [1.0]).value == 0.0


def test_non_integrable_order_rejected():
    cfg = make_config(1, 1, 1, [[1]], [[1]], 1, 1, "1/2", Fraction(2))
    with pytest.raises(NonIntegrableError):
        eval_bilinear(cfg, ball(), ball(), [0.0])
    with pytest.raises(NonIntegrableError):
        eval_linear(1, 1, RationalMatrix.from_rows([[1]]), Fraction(3, 2),
                    ball(), [0.0])


# -- structural identities --------------------------------------------


def test_swap_symmetry_of_kernel():
    cfg = make_config(1, 1, 1, [[1]], [[2]], 2, 2, 2, Fraction(1, 2))
    f1 = Gaussian(dim=1)
    f2 = IndicatorBall(dim=1, radius=0.5)
    a = eval_bilinear(cfg, f1, f2, [0.7])
    b = eval_bilinear(cfg.swapped(), f2, f1, [0.7])
    assert a.value == pytest.approx(b.value, rel=1e-9)


def test_linearity_in_each_slot():
    # the unit interval indicator splits into two half-interval
    # indicators almost everywhere, so the evaluations must add up
    cfg = make_config(1, 1, 1, [[1]], [[1]], 2, 2, 2, Fraction(1, 2))
    whole = IndicatorBall(dim=1)
    left = IndicatorBall(dim=1, radius=0.5, center=(-0.5,))
    right = IndicatorBall(dim=1, radius=0.5, center=(0.5,))
    g = Gaussian(dim=1)
    for x in ([0.25], [1.5]):
        total = eval_bilinear(cfg, whole, g, x).value
        split = (eval_bilinear(cfg, left, g, x).value
                 + eval_bilinear(cfg, right, g, x).value)
        assert split == pytest.approx(total, rel=2e-3)
        total2 = eval_bilinear(cfg, g, whole, x).value
        split2 = (eval_bilinear(cfg, g, left, x).value
                  + eval_bilinear(cfg, g, right, x).value)
        assert split2 == pytest.approx(total2, rel=2e-3)


def test_kernel_monotone_in_order_for_separated_supports():
    # supports sit at distance > 1 from the singular point, so a larger
    # order strictly shrinks the kernel pointwise
    cfg_lo = make_config(1, 1, 1, [[1]], [[1]], 2, 2, 2, Fraction(1, 2))
    cfg_hi = make_config(1, 1, 1, [[1]], [[1]], 2, 2, 2, Fraction(3, 2))
    f = IndicatorBall(dim=1, radius=0.5, center=(3.0,))
    lo = eval_bilinear(cfg_lo, f, f, [0.0]).value
    hi = eval_bilinear(cfg_hi, f, f, [0.0]).value
    assert hi < lo


def test_radial_monotone_in_x():
    f = ball()
    v1 = eval_radial(1, 1, Fraction(1), f, [1.0]).value
    v2 = eval_radial(1, 1, Fraction(1), f, [2.0]).value
    assert v2 < v1


def test_continuum_dilation_identity():
    """I(f1(./a), f2(./a))(x) = a^(n1+n2-lam) I(f1, f2)(x/a)."""
    cfg = make_config(1, 1, 1, [[1]], [[1]], 2, 2, 2, Fraction(3, 2))
    g = Gaussian(dim=1)
    for a in (0.5, 2.0):
        lhs = eval_bilinear(cfg, dilate(g, a), dilate(g, a), [0.5])
        rhs = eval_bilinear(cfg, g, g, [0.5 / a])
        scale = a ** (1 + 1 - 1.5)
        combined = lhs.abs_error + scale * rhs.abs_error
        assert abs(lhs.value - scale * rhs.value) <= combined


def test_scheme_agreement_2d_and_4d():
    g1 = Gaussian(dim=1)
    a2 = eval_bilinear(REF, g1, g1, [0.5])
    q2 = eval_bilinear(REF, g1, g1, [0.5], default_quad(2, scheme="qmc"))
    assert abs(a2.value - q2.value) / a2.value < 0.02

    cfg4 = make_config(2, 2, 1, [[1], [0]], [[0], [1]], 2, 2, 2,
                       Fraction(5, 2))
    g2 = Gaussian(dim=2)
    a4 = eval_bilinear(cfg4, g2, g2, [0.5])
    q4 = eval_bilinear(cfg4, g2, g2, [0.5], default_quad(4, scheme="qmc"))
    assert abs(a4.value - q4.value) / a4.value < 0.02


# -- grid norms -------------------------------------------------------


def test_grid_norm_of_constant_field():
    # a constant integrand over total measure V gives c * V^(1/q)
    grid = GridSpec(half_width=1.0, points_per_axis=5)
    xs = grid.points(1)
    meas = grid.cell_measure(1)
    total = (len(xs) * meas) ** 0.5
    vals = np.full(len(xs), 3.0)
    power = (np.sum(vals ** 2) * meas) ** 0.5
    assert power == pytest.approx(3.0 * total, rel=1e-12)


def test_grid_norm_qinf_is_max():
    cfg = make_config(1, 1, 1, [[1]], [[1]], 2, 2, "inf", Fraction(1))
    g = Gaussian(dim=1)
    grid = GridSpec(half_width=2.0, points_per_axis=9)
    est = lq_norm_on_grid(cfg, g, g, grid)
    center = eval_bilinear(cfg, g, g, [0.0]).value
    assert est.value == pytest.approx(center, rel=1e-9)


def test_grid_refinement_consistency():
    g = Gaussian(dim=1)
    coarse = lq_norm_on_grid(REF, g, g, GridSpec(points_per_axis=33))
    fine = lq_norm_on_grid(REF, g, g, GridSpec(points_per_axis=65))
    assert abs(fine.value - coarse.value) / fine.value < 0.05


def test_grid_norm_deterministic_under_workers():
    g = Gaussian(dim=1)
    grid = GridSpec(points_per_axis=17)
    one = lq_norm_on_grid(REF, g, g, grid, workers=1)
    many = lq_norm_on_grid(REF, g, g, grid, workers=4)
    assert one.value == many.value
    assert one.abs_error == many.abs_error


# -- probes -----------------------------------------------------------


def test_predicted_slope_formula():
    assert predicted_dilation_slope(REF) == 0.0
    shifted = make_config(1, 1, 1, [[1]], [[1]], 2, 2, 2,
                          Fraction(3, 2) + Fraction(1, 10))
    assert predicted_dilation_slope(shifted) == pytest.approx(-0.1)


def test_dilation_slope_homogeneous():
    g = Gaussian(dim=1)
    report = dilation_slope(REF, g, g, [0.5, 1.0, 2.0])
    assert abs(report.slope - report.predicted_slope) < 0.05
    assert all(r > 0 for r in report.ratios)
    assert len(report.dilations) == len(report.ratios) == 3


def test_dilation_slope_rejects_short_lists_and_infinite_q():
    g = Gaussian(dim=1)
    with pytest.raises(ValueError):
        dilation_slope(REF, g, g, [1.0])
    qinf = make_config(1, 1, 1, [[1]], [[1]], 2, 2, "inf", Fraction(1))
    with pytest.raises(ValueError):
        dilation_slope(qinf, g, g, [0.5, 1.0, 2.0])


def test_translation_defect_zero_shift():
    g = Gaussian(dim=1)
    grid = GridSpec(points_per_axis=9)
    assert translation_covariance_defect(REF, g, g, [0.0], grid) == 0.0


def test_translation_defect_small_for_lattice_shift():
    g = Gaussian(dim=1)
    grid = GridSpec(points_per_axis=17)
    d = translation_covariance_defect(REF, g, g, [0.5], grid)
    peak = eval_bilinear(REF, g, g, [0.0]).value
    assert d < 1e-9 * peak
