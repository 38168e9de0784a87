"""Numerical evaluation of the fractional integral operators.

Two quadrature schemes share one contract: integrate a locally
integrable singular integrand over a truncation box and return a value
with an error estimate.

* adaptive-dyadic: a uniform base partition is refined dyadically
  toward the kernel's singular point and toward every coordinate where
  an input descriptor is rough (bump edges, power-law origins).  In
  dimension <= 2 the partition is a tensor product of per-axis
  refinements, so a bump that is narrow in one coordinate but extended
  in the others is still resolved; in higher dimension cells adjacent
  to the singular point split isotropically into 2^d children.  Every
  leaf gets a centroid value plus one 2^d-subcell refinement pass;
  the reported value is the Richardson combination and the error
  estimate is the coarse/fine discrepancy.  A centroid that lands
  exactly on the singular point contributes 0 (measure zero).
* quasi-random: scrambled Sobol points pushed through a per-axis
  power map centered at the singular point, which concentrates samples
  near the singularity and whose Jacobian absorbs the kernel blow-up.

All evaluations are pure functions of (descriptors, spec); grid-point
results are combined by index so concurrent execution is
bit-reproducible.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import qmc

from .classifier import OperatorConfig
from .functions import (Constant, Dilated, Gaussian, IndicatorBall,
                        MollifiedDelta, NormEstimate, PowerLog, SplitPowerLog,
                        TestFunction, Translated, dilate, lp_norm, translate)
from .matrices import RationalMatrix


class NonIntegrableError(ValueError):
    """Kernel exponent too large for local integrability."""


@dataclass(frozen=True)
class QuadratureSpec:
    scheme: str = "adaptive"          # "adaptive" | "qmc"
    max_depth: int = 14
    samples: int = 1 << 14
    truncation_radius: float = 8.0
    target_rel_err: float = 1e-3
    seed: int = 0
    base_depth: Optional[int] = None  # uniform pre-split; default by dim

    def __post_init__(self):
        if self.max_depth < 1 or self.samples < 1:
            raise ValueError("max_depth and samples must be >= 1")
        if self.truncation_radius <= 0 or self.target_rel_err <= 0:
            raise ValueError("truncation_radius and target_rel_err must be > 0")


_DEFAULT_MAX_DEPTH = {1: 20, 2: 14, 3: 11, 4: 9}
_DEFAULT_BASE_DEPTH = {1: 8, 2: 6, 3: 4, 4: 3}


def default_quad(dim: int, **overrides) -> QuadratureSpec:
    """Spec with depths tuned to the integration dimension."""
    base = QuadratureSpec(max_depth=_DEFAULT_MAX_DEPTH.get(dim, 8))
    return replace(base, **overrides) if overrides else base


def _base_depth(quad: QuadratureSpec, dim: int) -> int:
    if quad.base_depth is not None:
        return min(quad.base_depth, quad.max_depth)
    return min(_DEFAULT_BASE_DEPTH.get(dim, 2), quad.max_depth)


@dataclass(frozen=True)
class GridSpec:
    half_width: float = 4.0
    points_per_axis: int = 65

    def __post_init__(self):
        if self.half_width <= 0:
            raise ValueError("half_width must be positive")
        if self.points_per_axis < 3 or self.points_per_axis % 2 == 0:
            raise ValueError("points_per_axis must be an odd integer >= 3")

    def points(self, m: int) -> np.ndarray:
        axis = np.linspace(-self.half_width, self.half_width,
                           self.points_per_axis)
        if m == 1:
            return axis[:, None]
        grids = np.meshgrid(*([axis] * m), indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=-1)

    def cell_measure(self, m: int) -> float:
        h = 2.0 * self.half_width / (self.points_per_axis - 1)
        return h ** m


@dataclass(frozen=True)
class ProbeReport:
    dilations: List[float]
    ratios: List[float]
    ratio_errors: List[float]
    slope: float
    slope_stderr: float
    predicted_slope: float

    def to_record(self) -> dict:
        return {"dilations": list(self.dilations),
                "ratios": list(self.ratios),
                "ratio_errors": list(self.ratio_errors),
                "slope": self.slope,
                "slope_stderr": self.slope_stderr,
                "predicted_slope": self.predicted_slope}


# ---------------------------------------------------------------------------
# rough-coordinate extraction for adaptive refinement


def feature_breaks(f: TestFunction) -> List[List[float]]:
    """Per-axis coordinates where the descriptor is discontinuous,
    singular or sharply concentrated; quadrature refines toward them."""
    if isinstance(f, IndicatorBall):
        return [[c - f.radius, c, c + f.radius] for c in f.center]
    if isinstance(f, MollifiedDelta):
        return [[-f.width, 0.0, f.width]] * f.dim
    if isinstance(f, PowerLog):
        return [[-f.cutoff, 0.0, f.cutoff]] * f.dim
    if isinstance(f, SplitPowerLog):
        return [[-0.5, 0.0, 0.5]] * f.dim
    if isinstance(f, (Constant, Gaussian)):
        return [[] for _ in range(f.dim)]
    if isinstance(f, Dilated):
        return [[v * f.a for v in axis] for axis in feature_breaks(f.inner)]
    if isinstance(f, Translated):
        shift = np.asarray(f.z, dtype=float)
        if f.mask is not None:
            shift = shift * np.asarray(f.mask, dtype=float)
        return [[v + s for v in axis]
                for axis, s in zip(feature_breaks(f.inner), shift)]
    return [[] for _ in range(f.dim)]


# ---------------------------------------------------------------------------
# core integrators


def _axis_cells(half: float, specials: Sequence[float],
                base_depth: int, max_depth: int) -> np.ndarray:
    """1-d dyadic partition of [-half, half]: uniform to base_depth,
    then only intervals whose own-width neighborhood contains a
    special coordinate keep splitting.  Returns a (k, 2) array."""
    segs = [(-half, half)]
    leaves: List[Tuple[float, float]] = []
    for level in range(max_depth):
        nxt = []
        for a, b in segs:
            w = b - a
            if level < base_depth or any(a - w <= s <= b + w
                                         for s in specials):
                mid = 0.5 * (a + b)
                nxt.append((a, mid))
                nxt.append((mid, b))
            else:
                leaves.append((a, b))
        segs = nxt
    leaves.extend(segs)
    return np.array(leaves)


def _leaf_sum(func: Callable[[np.ndarray], np.ndarray],
              lo: np.ndarray, hi: np.ndarray) -> Tuple[float, float]:
    """Centroid value plus one 2^d refinement pass over leaf cells;
    Richardson-combined value with the coarse/fine discrepancy as the
    error estimate."""
    d = lo.shape[1]
    width = hi - lo
    vol = np.prod(width, axis=1)
    corners = np.array(list(itertools.product((0.25, 0.75), repeat=d)))
    coarse = func((lo + hi) / 2.0) * vol
    sub = lo[:, None, :] + corners[None, :, :] * width[:, None, :]
    fine = func(sub.reshape(-1, d)).reshape(len(lo), -1).mean(axis=1) * vol
    value = float(np.sum(fine + (fine - coarse) / 3.0))
    err = float(np.sum(np.abs(fine - coarse)))
    return value, err


def _tensor_adaptive(func, specials_per_axis, half, base_depth, max_depth):
    axes = [_axis_cells(half, sp, base_depth, max_depth)
            for sp in specials_per_axis]
    lo_grids = np.meshgrid(*[a[:, 0] for a in axes], indexing="ij")
    hi_grids = np.meshgrid(*[a[:, 1] for a in axes], indexing="ij")
    lo = np.stack([g.ravel() for g in lo_grids], axis=-1)
    hi = np.stack([g.ravel() for g in hi_grids], axis=-1)
    return _leaf_sum(func, lo, hi)


def _isotropic_adaptive(func, singular, half, base_depth, max_depth):
    """Point-refinement scheme for higher dimensions: cells in the
    3^d neighborhood of the singular point split into 2^d children."""
    d = singular.size
    lo = np.full((1, d), -half)
    hi = np.full((1, d), half)
    leaves_lo: List[np.ndarray] = []
    leaves_hi: List[np.ndarray] = []
    corners = np.array(list(itertools.product((0.0, 0.5), repeat=d)))
    for level in range(max_depth):
        width = hi - lo
        split = np.all((singular >= lo - width) & (singular <= hi + width),
                       axis=1)
        if level < base_depth:
            split = np.ones(len(lo), dtype=bool)
        leaves_lo.append(lo[~split])
        leaves_hi.append(hi[~split])
        slo, swid = lo[split], width[split]
        lo = (slo[:, None, :] + corners[None, :, :] * swid[:, None, :]
              ).reshape(-1, d)
        hi = lo + np.repeat(swid / 2.0, len(corners), axis=0)
        if len(lo) == 0:
            break
    leaves_lo.append(lo)
    leaves_hi.append(hi)
    return _leaf_sum(func, np.concatenate(leaves_lo),
                     np.concatenate(leaves_hi))


def _qmc_integral(func: Callable[[np.ndarray], np.ndarray],
                  singular: np.ndarray,
                  half_width: float,
                  samples: int,
                  seed: int,
                  warp_power: float = 3.0) -> Tuple[float, float]:
    """Quasi-random integral over [-R, R]^d with an importance warp.

    Each axis maps t in [0, 1) to the box through a signed power map
    centered at the singular point; the Jacobian weight tames the
    kernel singularity.  Deterministic for a fixed seed.
    """
    d = singular.size
    s = np.clip(singular, -half_width, half_width)
    m_bits = max(4, int(math.ceil(math.log2(samples))))
    sampler = qmc.Sobol(d=d, scramble=True, seed=seed)
    t = sampler.random_base2(m_bits)[:samples]

    u = 2.0 * t - 1.0                      # (-1, 1)
    au = np.abs(u)
    side = np.where(u >= 0,
                    (half_width - s)[None, :],
                    (s + half_width)[None, :])
    y = s[None, :] + np.sign(u) * au ** warp_power * side
    jac = np.prod(2.0 * warp_power * au ** (warp_power - 1.0) * side, axis=1)

    vals = func(y) * jac
    value = float(vals.mean())
    half = float(vals[: samples // 2].mean()) if samples >= 2 else value
    return value, abs(value - half)


def _box_integral(func, singular: np.ndarray,
                  feature_axes: List[List[float]],
                  quad: QuadratureSpec) -> Tuple[float, float]:
    d = singular.size
    if quad.scheme == "adaptive":
        b = _base_depth(quad, d)
        if d <= 2:
            specials = [[float(singular[j])] + list(feature_axes[j])
                        for j in range(d)]
            return _tensor_adaptive(func, specials, quad.truncation_radius,
                                    b, quad.max_depth)
        return _isotropic_adaptive(func, singular, quad.truncation_radius,
                                   b, quad.max_depth)
    if quad.scheme == "qmc":
        return _qmc_integral(func, singular, quad.truncation_radius,
                             quad.samples, quad.seed)
    raise ValueError(f"unknown quadrature scheme {quad.scheme!r}")


def _safe_power(base: np.ndarray, lam: float) -> np.ndarray:
    """base^(-lam) with base = 0 mapped to 0 (a measure-zero point)."""
    out = np.zeros_like(base)
    pos = base > 0
    out[pos] = base[pos] ** (-lam)
    return out


# ---------------------------------------------------------------------------
# operator evaluations


def eval_bilinear(cfg: OperatorConfig, f1: TestFunction, f2: TestFunction,
                  x, quad: Optional[QuadratureSpec] = None) -> NormEstimate:
    """I(f1, f2)(x): integral of f1(y1) f2(y2) against the kernel
    (|D1 x - y1| + |D2 x - y2|)^-lam over the truncation box."""
    n1, n2 = cfg.n1, cfg.n2
    lam = float(cfg.lam)
    if not 0 < cfg.lam < n1 + n2:
        raise NonIntegrableError(
            f"kernel order {cfg.lam} not locally integrable in R^{n1 + n2}")
    if f1.dim != n1 or f2.dim != n2:
        raise ValueError("witness dimensions do not match the config")
    quad = quad or default_quad(n1 + n2)
    x = np.asarray(x, dtype=float).reshape(cfg.m)
    s1 = cfg.D1.to_float() @ x
    s2 = cfg.D2.to_float() @ x

    def integrand(y):
        y1, y2 = y[:, :n1], y[:, n1:]
        base = (np.linalg.norm(s1 - y1, axis=1)
                + np.linalg.norm(s2 - y2, axis=1))
        return f1.values(y1) * f2.values(y2) * _safe_power(base, lam)

    value, err = _box_integral(integrand, np.concatenate([s1, s2]),
                               feature_breaks(f1) + feature_breaks(f2), quad)
    return NormEstimate(value, err, "quadrature")


def eval_linear(n: int, m: int, D: RationalMatrix, lam, f: TestFunction,
                x, quad: Optional[QuadratureSpec] = None) -> NormEstimate:
    """Generalized Riesz potential: integral of f(y) |Dx - y|^-lam."""
    lam_f = float(lam)
    if not 0 < lam_f < n:
        raise NonIntegrableError(f"order {lam} not locally integrable in R^{n}")
    if f.dim != n:
        raise ValueError("input dimension does not match n")
    quad = quad or default_quad(n)
    x = np.asarray(x, dtype=float).reshape(m)
    s = D.to_float() @ x

    def integrand(y):
        return f.values(y) * _safe_power(np.linalg.norm(s - y, axis=1), lam_f)

    value, err = _box_integral(integrand, s, feature_breaks(f), quad)
    return NormEstimate(value, err, "quadrature")


def eval_radial(n: int, m: int, lam, f: TestFunction, x,
                quad: Optional[QuadratureSpec] = None) -> NormEstimate:
    """Radial operator: integral of f(y) (|x| + |y|)^-lam."""
    lam_f = float(lam)
    if lam_f <= 0:
        raise NonIntegrableError("order must be positive")
    if f.dim != n:
        raise ValueError("input dimension does not match n")
    quad = quad or default_quad(n)
    x = np.asarray(x, dtype=float).reshape(m)
    ax = float(np.linalg.norm(x))

    def integrand(y):
        return f.values(y) * _safe_power(ax + np.linalg.norm(y, axis=1), lam_f)

    value, err = _box_integral(integrand, np.zeros(n), feature_breaks(f),
                               quad)
    return NormEstimate(value, err, "quadrature")


# ---------------------------------------------------------------------------
# grid norms and probes


def _pointwise_values(cfg, f1, f2, xs, quad, workers=None):
    """Operator values at each grid point, combined by index."""
    vals = [0.0] * len(xs)
    errs = [0.0] * len(xs)

    def run(k):
        est = eval_bilinear(cfg, f1, f2, xs[k], quad)
        vals[k] = est.value
        errs[k] = est.abs_error

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, range(len(xs))))
    else:
        for k in range(len(xs)):
            run(k)
    return np.array(vals), np.array(errs)


def lq_norm_on_grid(cfg: OperatorConfig, f1: TestFunction, f2: TestFunction,
                    grid: Optional[GridSpec] = None,
                    quad: Optional[QuadratureSpec] = None,
                    workers: Optional[int] = None) -> NormEstimate:
    """Discrete L^q (quasi-)norm of I(f1, f2) over a uniform grid.

    q < 1 uses the same power-sum formula; q = inf takes the grid max.
    """
    grid = grid or GridSpec()
    quad = quad or default_quad(cfg.n1 + cfg.n2)
    xs = grid.points(cfg.m)
    vals, errs = _pointwise_values(cfg, f1, f2, xs, quad, workers=workers)
    if cfg.q.is_infinite:
        k = int(np.argmax(np.abs(vals)))
        return NormEstimate(float(np.abs(vals[k])), float(errs[k]),
                            "quadrature")
    qv = float(cfg.q)
    meas = grid.cell_measure(cfg.m)
    power_sum = float(np.sum(np.abs(vals) ** qv) * meas)
    value = power_sum ** (1.0 / qv)
    upper = float(np.sum((np.abs(vals) + errs) ** qv) * meas) ** (1.0 / qv)
    return NormEstimate(value, upper - value, "quadrature")


def predicted_dilation_slope(cfg: OperatorConfig) -> float:
    """Exact exponent of the norm-ratio power law under dilation:
    (n1 + n2 - lam + m/q) - n1/p1 - n2/p2."""
    return float(cfg.n1 + cfg.n2 - cfg.lam + cfg.m * cfg.q.recip
                 - cfg.n1 * cfg.p1.recip - cfg.n2 * cfg.p2.recip)


def norm_ratio(cfg: OperatorConfig, f1: TestFunction, f2: TestFunction,
               grid=None, quad=None, workers=None) -> Tuple[float, float]:
    """||I(f1, f2)||_q / (||f1||_p1 ||f2||_p2) on the grid, with the
    propagated numerator error."""
    num = lq_norm_on_grid(cfg, f1, f2, grid, quad, workers=workers)
    d1 = lp_norm(f1, cfg.p1).value
    d2 = lp_norm(f2, cfg.p2).value
    return num.value / (d1 * d2), num.abs_error / (d1 * d2)


def dilation_slope(cfg: OperatorConfig, f1: TestFunction, f2: TestFunction,
                   a_list: Sequence[float],
                   grid: Optional[GridSpec] = None,
                   quad: Optional[QuadratureSpec] = None,
                   workers: Optional[int] = None) -> ProbeReport:
    """Least-squares slope of log(norm ratio) against log(a) for the
    dilated pair (f1(./a), f2(./a)), with the exact prediction."""
    if len(a_list) < 2:
        raise ValueError("need at least two dilation factors")
    if cfg.q.is_infinite:
        raise ValueError("slope probe requires q < inf")
    pairs = [norm_ratio(cfg, dilate(f1, a), dilate(f2, a),
                        grid, quad, workers=workers) for a in a_list]
    ratios = [r for r, _ in pairs]
    if any(r <= 0 for r in ratios):
        raise ArithmeticError("nonpositive norm ratio in slope probe")
    xs = np.log(np.asarray(a_list, dtype=float))
    ys = np.log(np.asarray(ratios))
    if len(a_list) > 2:
        (slope, _), cov = np.polyfit(xs, ys, 1, cov=True)
        stderr = float(math.sqrt(max(cov[0, 0], 0.0)))
    else:
        slope, _ = np.polyfit(xs, ys, 1)
        stderr = 0.0
    return ProbeReport(dilations=[float(a) for a in a_list],
                       ratios=[float(r) for r in ratios],
                       ratio_errors=[float(e) for _, e in pairs],
                       slope=float(slope),
                       slope_stderr=stderr,
                       predicted_slope=predicted_dilation_slope(cfg))


def translation_covariance_defect(cfg: OperatorConfig,
                                  f1: TestFunction, f2: TestFunction,
                                  z,
                                  grid: Optional[GridSpec] = None,
                                  quad: Optional[QuadratureSpec] = None,
                                  workers: Optional[int] = None) -> float:
    """Max-over-grid defect of the translation covariance identity.

    Shifting each input by its own matrix image of z must equal an
    output shift by z: I(f1(. - D1 z), f2(. - D2 z))(x) =
    I(f1, f2)(x - z) exactly in the continuum; the defect is
    quadrature-level small.
    """
    grid = grid or GridSpec()
    quad = quad or default_quad(cfg.n1 + cfg.n2)
    z = np.asarray(z, dtype=float).reshape(cfg.m)
    z1 = cfg.D1.to_float() @ z
    z2 = cfg.D2.to_float() @ z
    xs = grid.points(cfg.m)
    shifted, _ = _pointwise_values(cfg, translate(f1, z1), translate(f2, z2),
                                   xs, quad, workers=workers)
    base, _ = _pointwise_values(cfg, f1, f2, xs - z[None, :], quad,
                                workers=workers)
    return float(np.max(np.abs(shifted - base)))


def combined_grid_error(cfg: OperatorConfig, f1: TestFunction,
                        f2: TestFunction,
                        grid: Optional[GridSpec] = None,
                        quad: Optional[QuadratureSpec] = None,
                        workers: Optional[int] = None) -> float:
    """Sum of per-point quadrature error estimates over the grid; the
    natural yardstick for translation-defect comparisons."""
    grid = grid or GridSpec()
    quad = quad or default_quad(cfg.n1 + cfg.n2)
    _, errs = _pointwise_values(cfg, f1, f2, grid.points(cfg.m), quad,
                                workers=workers)
    return float(np.sum(errs))


def blowup_probe(cfg: OperatorConfig, family,
                 grid: Optional[GridSpec] = None,
                 quad: Optional[QuadratureSpec] = None,
                 workers: Optional[int] = None) -> List[float]:
    """Norm ratios along a witness family (ordered by decreasing
    concentration parameter); monotone growth is the finite-probe
    signature of unboundedness."""
    out = []
    for member in family:
        f1, f2 = member[0], member[1]
        r, _ = norm_ratio(cfg, f1, f2, grid, quad, workers=workers)
        out.append(r)
    return out
