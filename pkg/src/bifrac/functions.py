"""Evaluable witness-function descriptors with exact or semi-analytic
Lp norms.

Descriptors are immutable and evaluation is lazy, so quadrature can
refine arbitrarily close to singular points without re-ingesting data.
All evaluators accept an (N, dim) array of points and return an (N,)
array; a single point may be passed as a 1-d array.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy.integrate import quad as _scipy_quad

from .exponents import Exponent


class DivergentNormError(ArithmeticError):
    """The requested Lp norm is infinite for this descriptor."""


@dataclass(frozen=True)
class NormEstimate:
    value: float
    abs_error: float
    method: str  # "analytic" | "quadrature"

    def to_record(self) -> dict:
        return {"value": self.value, "abs_error": self.abs_error,
                "method": self.method}


def unit_ball_volume(n: int) -> float:
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


# ---------------------------------------------------------------------------
# descriptors


@dataclass(frozen=True)
class TestFunction:
    dim: int

    def values(self, y: np.ndarray) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True)
class IndicatorBall(TestFunction):
    """Characteristic function of a ball."""

    radius: float = 1.0
    center: Tuple[float, ...] = None

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        if self.center is None:
            object.__setattr__(self, "center", (0.0,) * self.dim)

    def values(self, y):
        d = y - np.asarray(self.center)
        return (np.linalg.norm(d, axis=-1) <= self.radius).astype(float)


@dataclass(frozen=True)
class MollifiedDelta(TestFunction):
    """Unit-mass bump of width delta concentrating at the origin."""

    width: float = 1.0

    def __post_init__(self):
        if self.width <= 0:
            raise ValueError("width must be positive")

    @property
    def height(self) -> float:
        return 1.0 / (unit_ball_volume(self.dim) * self.width ** self.dim)

    def values(self, y):
        r = np.linalg.norm(y, axis=-1)
        return np.where(r <= self.width, self.height, 0.0)


@dataclass(frozen=True)
class PowerLog(TestFunction):
    """|y|^(-n/p) (log 1/|y|)^(-(1+eps)/p) on {|y| <= cutoff}.

    The borderline extremal of L^p: the norm at exponent p is finite
    exactly when eps > 0.  Value at the origin is 0 (measure zero).
    """

    p: float = 2.0
    eps: float = 0.1
    cutoff: float = 0.5

    def __post_init__(self):
        if self.p <= 0 or not (0 < self.cutoff < 1):
            raise ValueError("need p > 0 and cutoff in (0, 1)")

    def values(self, y):
        r = np.linalg.norm(np.atleast_2d(y), axis=-1)
        out = np.zeros_like(r)
        inside = (r > 0) & (r <= self.cutoff)
        ri = r[inside]
        out[inside] = (ri ** (-self.dim / self.p)
                       * np.log(1.0 / ri) ** (-(1.0 + self.eps) / self.p))
        if np.ndim(y) == 1:
            return out[0]
        return out


@dataclass(frozen=True)
class SplitPowerLog(TestFunction):
    """Power-log weight in the trailing coordinate block only.

    On {|y| <= 1/2} in R^(head+tail) the value is
    |y_t|^(-tail/p) (log 1/|y_t|)^(-(1+eps)/p) with y_t the trailing
    block; finite L^p norm at its own p exactly when eps > 0.
    """

    head: int = 1
    tail: int = 1
    p: float = 2.0
    eps: float = 0.1

    def __post_init__(self):
        if self.head + self.tail != self.dim:
            raise ValueError("head + tail must equal dim")
        if self.tail < 1:
            raise ValueError("tail block must be nonempty")

    def values(self, y):
        y2 = np.atleast_2d(y)
        r = np.linalg.norm(y2, axis=-1)
        rt = np.linalg.norm(y2[..., self.head:], axis=-1)
        out = np.zeros_like(r)
        inside = (r <= 0.5) & (rt > 0)
        ri = rt[inside]
        out[inside] = (ri ** (-self.tail / self.p)
                       * np.log(1.0 / ri) ** (-(1.0 + self.eps) / self.p))
        if np.ndim(y) == 1:
            return out[0]
        return out


@dataclass(frozen=True)
class Constant(TestFunction):
    value: float = 1.0

    def values(self, y):
        r = np.linalg.norm(np.atleast_2d(y), axis=-1)
        out = np.full_like(r, self.value)
        if np.ndim(y) == 1:
            return out[0]
        return out


@dataclass(frozen=True)
class Gaussian(TestFunction):
    """exp(-|y|^2 / scale^2)."""

    scale: float = 1.0

    def __post_init__(self):
        if self.scale <= 0:
            raise ValueError("scale must be positive")

    def values(self, y):
        r2 = np.sum(np.square(np.asarray(y)), axis=-1)
        return np.exp(-r2 / self.scale ** 2)


@dataclass(frozen=True)
class Dilated(TestFunction):
    """f(. / a)."""

    inner: TestFunction = None
    a: float = 1.0

    def __post_init__(self):
        if self.a <= 0:
            raise ValueError("dilation factor must be positive")
        if self.inner is None or self.inner.dim != self.dim:
            raise ValueError("inner descriptor dimension mismatch")

    def values(self, y):
        return self.inner.values(np.asarray(y) / self.a)


@dataclass(frozen=True)
class Translated(TestFunction):
    """f(. - z), optionally restricted to masked coordinates."""

    inner: TestFunction = None
    z: Tuple[float, ...] = ()
    mask: Optional[Tuple[bool, ...]] = None

    def __post_init__(self):
        if self.inner is None or self.inner.dim != self.dim:
            raise ValueError("inner descriptor dimension mismatch")
        if len(self.z) != self.dim:
            raise ValueError("shift dimension mismatch")
        if self.mask is not None and len(self.mask) != self.dim:
            raise ValueError("mask dimension mismatch")

    def values(self, y):
        shift = np.asarray(self.z, dtype=float)
        if self.mask is not None:
            shift = shift * np.asarray(self.mask, dtype=float)
        return self.inner.values(np.asarray(y) - shift)


def dilate(f: TestFunction, a: float) -> TestFunction:
    if a == 1:
        return f
    return Dilated(dim=f.dim, inner=f, a=float(a))


def translate(f: TestFunction, z: Sequence[float], mask=None) -> TestFunction:
    z = tuple(float(v) for v in z)
    if all(v == 0 for v in z):
        return f
    return Translated(dim=f.dim, inner=f, z=z,
                      mask=None if mask is None else tuple(mask))


def evaluate(f: TestFunction, y) -> float:
    """Pointwise value at a single point y."""
    y = np.asarray(y, dtype=float)
    if y.shape != (f.dim,):
        raise ValueError(f"point has shape {y.shape}, expected ({f.dim},)")
    return float(f.values(y))


# ---------------------------------------------------------------------------
# Lp norms


def _as_p(p: Union[Exponent, float, int]) -> float:
    if isinstance(p, Exponent):
        return float(p)
    return float(p)


def _powerlog_radial_norm(dim: int, p_own: float, eps: float, cutoff: float,
                          p: float, tail_cross_section=None,
                          rel_err: float = 1e-10) -> Tuple[float, float]:
    """||f||_p^p for a power-log profile via the u = log(1/r)
    substitution; raises DivergentNormError when infinite.

    tail_cross_section(rho), when given, multiplies the radial density
    (used by the split variant where the head block contributes the
    volume of its section)."""
    alpha = dim - dim * p / p_own          # r-exponent beyond r^(dim-1)... see below
    beta = p * (1.0 + eps) / p_own         # log-power
    # integrand: omega_d * r^(dim-1) * r^(-dim p/p_own) * (log 1/r)^(-beta)
    # near r = 0 the power of r is dim - 1 - dim p/p_own; integrable iff
    # alpha > 0, or alpha == 0 with beta > 1.
    if alpha < 0 or (alpha == 0 and beta <= 1):
        raise DivergentNormError(
            f"L^{p} norm of power-log descriptor diverges")
    omega = dim * unit_ball_volume(dim)    # surface area of unit sphere
    u0 = math.log(1.0 / cutoff)
    if tail_cross_section is None and alpha == 0:
        # closed form: omega * int_u0^inf u^-beta du
        val = omega * u0 ** (1.0 - beta) / (beta - 1.0)
        return val, abs(val) * 1e-12

    def integrand(u):
        r = math.exp(-u)
        dens = omega * math.exp(-alpha * u) * u ** (-beta)
        if tail_cross_section is not None:
            dens *= tail_cross_section(r)
        return dens

    val, err = _scipy_quad(integrand, u0, math.inf,
                           epsabs=0.0, epsrel=rel_err, limit=200)
    return val, err


def lp_norm(f: TestFunction, p, quad=None) -> NormEstimate:
    """Lp (quasi-)norm of a descriptor; analytic where a closed form
    exists, radial quadrature otherwise.

    p may be an Exponent or a float; p = inf uses the descriptor's
    supremum.  Raises DivergentNormError when the norm is infinite.
    """
    if isinstance(p, Exponent) and p.is_infinite:
        return _sup_norm(f)
    pv = _as_p(p)
    if math.isinf(pv):
        return _sup_norm(f)
    if pv <= 0:
        raise ValueError("p must be positive")
    rel = getattr(quad, "target_rel_err", 1e-10) if quad is not None else 1e-10

    if isinstance(f, IndicatorBall):
        vol = unit_ball_volume(f.dim) * f.radius ** f.dim
        return NormEstimate(vol ** (1.0 / pv), 0.0, "analytic")
    if isinstance(f, MollifiedDelta):
        mass = unit_ball_volume(f.dim) * f.width ** f.dim
        return NormEstimate(f.height * mass ** (1.0 / pv), 0.0, "analytic")
    if isinstance(f, Constant):
        if f.value == 0:
            return NormEstimate(0.0, 0.0, "analytic")
        raise DivergentNormError("nonzero constant is not in L^p for p < inf")
    if isinstance(f, Gaussian):
        # int exp(-p |y|^2 / s^2) dy = (pi s^2 / p)^(n/2)
        val = (math.pi * f.scale ** 2 / pv) ** (f.dim / (2.0 * pv))
        return NormEstimate(val, 0.0, "analytic")
    if isinstance(f, PowerLog):
        val, err = _powerlog_radial_norm(f.dim, f.p, f.eps, f.cutoff, pv,
                                         rel_err=rel)
        return NormEstimate(val ** (1.0 / pv),
                            err * val ** (1.0 / pv - 1.0) / pv
                            if val > 0 else err,
                            "quadrature")
    if isinstance(f, SplitPowerLog):
        if f.head == 0:
            section = None
        else:
            vol_head = unit_ball_volume(f.head)

            def section(rho, _v=vol_head, _k=f.head):
                s2 = 0.25 - rho * rho
                return _v * s2 ** (_k / 2.0) if s2 > 0 else 0.0

        val, err = _powerlog_radial_norm(f.tail, f.p, f.eps, 0.5, pv,
                                         tail_cross_section=section,
                                         rel_err=rel)
        return NormEstimate(val ** (1.0 / pv),
                            err * val ** (1.0 / pv - 1.0) / pv
                            if val > 0 else err,
                            "quadrature")
    if isinstance(f, Dilated):
        base = lp_norm(f.inner, pv, quad)
        scale = f.a ** (f.dim / pv)
        return NormEstimate(base.value * scale, base.abs_error * scale,
                            base.method)
    if isinstance(f, Translated):
        return lp_norm(f.inner, pv, quad)
    raise TypeError(f"no norm rule for {type(f).__name__}")


def _sup_norm(f: TestFunction) -> NormEstimate:
    if isinstance(f, IndicatorBall):
        return NormEstimate(1.0, 0.0, "analytic")
    if isinstance(f, MollifiedDelta):
        return NormEstimate(f.height, 0.0, "analytic")
    if isinstance(f, Constant):
        return NormEstimate(abs(f.value), 0.0, "analytic")
    if isinstance(f, Gaussian):
        return NormEstimate(1.0, 0.0, "analytic")
    if isinstance(f, (PowerLog, SplitPowerLog)):
        raise DivergentNormError("power-log descriptor is unbounded")
    if isinstance(f, Dilated):
        return _sup_norm(f.inner)
    if isinstance(f, Translated):
        return _sup_norm(f.inner)
    raise TypeError(f"no sup-norm rule for {type(f).__name__}")


def truncated_powerlog_norm(f: PowerLog, p, inner_radius: float) -> float:
    """||f||_p^p over {inner_radius <= |y| <= cutoff}, for divergence
    probes: with eps <= 0 at p = f.p this grows without bound as
    inner_radius -> 0."""
    pv = _as_p(p)
    omega = f.dim * unit_ball_volume(f.dim)
    alpha = f.dim - f.dim * pv / f.p
    beta = pv * (1.0 + f.eps) / f.p

    def integrand(u):
        return omega * math.exp(-alpha * u) * u ** (-beta)

    u0 = math.log(1.0 / f.cutoff)
    u1 = math.log(1.0 / inner_radius)
    val, _ = _scipy_quad(integrand, u0, u1, limit=200)
    return val


# ---------------------------------------------------------------------------
# counterexample families

DEFAULT_EPS_SWEEP = (0.4, 0.2, 0.1, 0.05)
DEFAULT_DELTA_SWEEP = (0.25, 0.0625, 0.015625)


class NoWitnessError(LookupError):
    """No counterexample family is defined for this clause."""


def witness_for(cfg, clause, eps_sweep=DEFAULT_EPS_SWEEP,
                delta_sweep=DEFAULT_DELTA_SWEEP):
    """Counterexample family for an Unbounded clause of cfg.

    Returns a list of (f1, f2, h) triples (h may be None), swept over
    the family parameter (delta for concentration families, eps for
    power-log families).  The families follow the necessity
    constructions: concentrating bumps where an exponent equals 1,
    constants where it is infinite, power-log extremals at interior
    exponents, and split power-log weights where only a coordinate
    block is deficient.
    """
    from .classifier import Clause  # local import to avoid cycles

    n1, n2, m = cfg.n1, cfg.n2, cfg.m
    a1, a2 = cfg.p1.recip, cfg.p2.recip
    p1f = float(cfg.p1)
    p2f = float(cfg.p2)

    def side_witness(n, a, pf, eps):
        # extremal input on one side, by exponent position
        if a == 1:  # p = 1: concentrating bump (swept separately)
            return MollifiedDelta(dim=n, width=0.25)
        if a == 0:  # p = inf: constant
            return Constant(dim=n, value=1.0)
        return PowerLog(dim=n, p=pf, eps=eps)

    if clause == Clause.ACCEPTED:
        raise NoWitnessError("no counterexample exists for a bounded config")

    if clause == Clause.RANK_STACK_DEFICIENT:
        # output depends on fewer than m coordinates; any fixed bump pair
        # witnesses the divergent L^q norm over growing truncations
        return [(IndicatorBall(dim=n1), IndicatorBall(dim=n2), None)]

    if clause == Clause.HOMOGENEITY_FAILED:
        # the dilation sweep itself is the witness family
        ball1, ball2 = IndicatorBall(dim=n1), IndicatorBall(dim=n2)
        return [(dilate(ball1, a), dilate(ball2, a), None)
                for a in (0.5, 1.0, 2.0, 4.0)]

    if clause == Clause.EXPONENT_RANGE_FAILED:
        if a1 == 1 and a2 == 1:
            return [(IndicatorBall(dim=n1), IndicatorBall(dim=n2), None)]
        # one exponent at an endpoint: pair an indicator with the
        # slowly-decaying tail that stays in the other space
        return [(IndicatorBall(dim=n1), Constant(dim=n2, value=1.0), None)]

    if clause == Clause.Q_MUST_BE_FINITE:
        # dual bump h concentrating at the output origin
        return [(side_witness(n1, a1, p1f, 0.1),
                 side_witness(n2, a2, p2f, 0.1),
                 MollifiedDelta(dim=m, width=d)) for d in delta_sweep]

    if clause in (Clause.CASE_4A, Clause.CASE_4B, Clause.CASE_4C,
                  Clause.CASE_4D):
        if a1 == 1 or a2 == 1:
            # concentrate the p = 1 side; the partner carries the
            # power-log extremal of its own exponent
            if a1 == 1:
                return [(MollifiedDelta(dim=n1, width=d),
                         side_witness(n2, a2, p2f, 0.1), None)
                        for d in delta_sweep]
            return [(side_witness(n1, a1, p1f, 0.1),
                     MollifiedDelta(dim=n2, width=d), None)
                    for d in delta_sweep]
        if a1 == 0 or a2 == 0:
            const_side = 1 if a1 == 0 else 2
            if const_side == 1:
                return [(Constant(dim=n1, value=1.0),
                         PowerLog(dim=n2, p=p2f, eps=e), None)
                        for e in eps_sweep]
            return [(PowerLog(dim=n1, p=p1f, eps=e),
                     Constant(dim=n2, value=1.0), None)
                    for e in eps_sweep]
        # both exponents in (1, inf): power-log pair; when a rank is
        # deficient, the weight lives only in the deficient block of
        # the reduced coordinates
        from .matrices import rank as _rank
        r1 = _rank(cfg.D1)
        r2 = _rank(cfg.D2)

        def two_sided(n, r, pf, eps):
            if 0 < r < n:
                return SplitPowerLog(dim=n, head=r, tail=n - r, p=pf, eps=eps)
            return PowerLog(dim=n, p=pf, eps=eps)

        h = IndicatorBall(dim=m) if clause != Clause.CASE_4A else None
        return [(two_sided(n1, r1, p1f, e), two_sided(n2, r2, p2f, e), h)
                for e in eps_sweep]

    raise NoWitnessError(f"no witness family defined for clause {clause}")


# ---------------------------------------------------------------------------
# descriptor serialization (tag + parameters)

_TAGS = {
    "indicator-ball": IndicatorBall,
    "mollified-delta": MollifiedDelta,
    "power-log": PowerLog,
    "split-power-log": SplitPowerLog,
    "constant": Constant,
    "gaussian": Gaussian,
    "dilated": Dilated,
    "translated": Translated,
}


def descriptor_to_dict(f: TestFunction) -> dict:
    """Serialize a descriptor to {tag, parameters}."""
    if isinstance(f, IndicatorBall):
        return {"tag": "indicator-ball", "dim": f.dim, "radius": f.radius,
                "center": list(f.center)}
    if isinstance(f, MollifiedDelta):
        return {"tag": "mollified-delta", "dim": f.dim, "width": f.width}
    if isinstance(f, PowerLog):
        return {"tag": "power-log", "dim": f.dim, "p": f.p, "eps": f.eps,
                "cutoff": f.cutoff}
    if isinstance(f, SplitPowerLog):
        return {"tag": "split-power-log", "dim": f.dim, "head": f.head,
                "tail": f.tail, "p": f.p, "eps": f.eps}
    if isinstance(f, Constant):
        return {"tag": "constant", "dim": f.dim, "value": f.value}
    if isinstance(f, Gaussian):
        return {"tag": "gaussian", "dim": f.dim, "scale": f.scale}
    if isinstance(f, Dilated):
        return {"tag": "dilated", "dim": f.dim, "a": f.a,
                "inner": descriptor_to_dict(f.inner)}
    if isinstance(f, Translated):
        return {"tag": "translated", "dim": f.dim, "z": list(f.z),
                "mask": None if f.mask is None else list(f.mask),
                "inner": descriptor_to_dict(f.inner)}
    raise TypeError(f"cannot serialize {type(f).__name__}")


def descriptor_from_dict(d: dict) -> TestFunction:
    """Rebuild a descriptor from its {tag, parameters} form."""
    d = dict(d)
    tag = d.pop("tag", None)
    if tag not in _TAGS:
        raise ValueError(f"unknown descriptor tag {tag!r}")
    if tag == "indicator-ball" and "center" in d and d["center"] is not None:
        d["center"] = tuple(d["center"])
    if tag in ("dilated", "translated"):
        d["inner"] = descriptor_from_dict(d["inner"])
    if tag == "translated":
        d["z"] = tuple(d["z"])
        if d.get("mask") is not None:
            d["mask"] = tuple(d["mask"])
    return _TAGS[tag](**d)
