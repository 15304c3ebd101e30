"""Piecewise-trigonometric oscillator functions and action-angle transforms.

An oscillator with restoring force ``a*x`` on ``x > 0`` and ``b*x`` on
``x < 0`` sits on the resonance curve ``1/sqrt(a) + 1/sqrt(b) = 2/n``.  Its
normalized free solution (the asymmetric cosine) glues a cosine arc of
half-width ``pi/(2 sqrt(a))`` to a scaled sine arc, is even, C^1, and
``2*pi/n``-periodic.  This module evaluates that function, its derivative
and primitive in closed form, the associated Fourier coefficients, and the
exact change of variables between Cartesian ``(x, y)`` and action-angle
``(theta, r)`` coordinates.  All evaluators accept scalars or arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError

TWO_PI = 2.0 * math.pi

#: Tolerance on the resonance identity enforced at FucikPair construction.
RESONANCE_TOL = 1e-12


@dataclass(frozen=True)
class FucikPair:
    """Stiffness pair ``(a, b)`` on the resonance curve of order ``n``.

    ``a`` acts on the positive half-line, ``b`` on the negative one.  The
    constructor rejects pairs violating ``1/sqrt(a) + 1/sqrt(b) = 2/n``.
    """

    a: float
    b: float
    n: int

    def __post_init__(self):
        if self.a <= 0.0 or self.b <= 0.0:
            raise PreconditionError("stiffnesses must be positive")
        if not (isinstance(self.n, int) and self.n >= 1):
            raise PreconditionError("resonance order n must be a positive integer")
        defect = 1.0 / math.sqrt(self.a) + 1.0 / math.sqrt(self.b) - 2.0 / self.n
        if abs(defect) > RESONANCE_TOL:
            raise PreconditionError(
                f"(a, b) = ({self.a}, {self.b}) is off the resonance curve "
                f"of order {self.n}: identity defect {defect:.3e}"
            )
        # Implied by the identity, asserted for safety.
        if not (self.a > self.n**2 / 4.0 and self.b > self.n**2 / 4.0):
            raise PreconditionError("resonant stiffnesses must exceed n^2/4")

    @classmethod
    def from_a(cls, a: float, n: int = 1) -> "FucikPair":
        """Build the pair from ``a`` alone, deriving ``b`` from the identity."""
        if a <= n**2 / 4.0:
            raise PreconditionError("need a > n^2/4 to solve for b")
        b = 1.0 / (2.0 / n - 1.0 / math.sqrt(a)) ** 2
        return cls(a, b, n)

    @property
    def tau(self) -> float:
        """Period of the free solution, ``2*pi/n``."""
        return TWO_PI / self.n

    @property
    def gamma(self) -> float:
        """Radial scale ``sqrt(2n/a)`` of the action-angle substitution."""
        return math.sqrt(2.0 * self.n / self.a)

    @property
    def half_width(self) -> float:
        """Half-width ``pi/(2 sqrt(a))`` of the positive hump."""
        return math.pi / (2.0 * math.sqrt(self.a))

    @property
    def linear(self) -> bool:
        """True when ``a == b`` (plain harmonic oscillator)."""
        return self.a == self.b


def _reduce(p: FucikPair, t):
    """Range-reduce ``t`` into [-tau/2, tau/2], returning (t0, periods)."""
    t = np.asarray(t, dtype=float)
    m = np.round(t / p.tau)
    return t - m * p.tau, m


def _scalar_out(t, value):
    return float(value) if np.isscalar(t) or np.ndim(t) == 0 else value


def asym_cosine(p: FucikPair, t):
    """Free solution with initial value 1 and initial velocity 0.

    Piecewise: ``cos(sqrt(a) t)`` for ``|t| <= pi/(2 sqrt(a))`` and
    ``-sqrt(a/b) sin(sqrt(b) (|t| - pi/(2 sqrt(a))))`` up to half a period,
    extended evenly and periodically.
    """
    t0, _ = _reduce(p, t)
    sa, sb = math.sqrt(p.a), math.sqrt(p.b)
    w = p.half_width
    at = np.abs(t0)
    inner = at <= w
    c = np.where(
        inner,
        np.cos(sa * t0),
        -math.sqrt(p.a / p.b) * np.sin(sb * (at - w)),
    )
    return _scalar_out(t, c)


def asym_sine(p: FucikPair, t):
    """Derivative of :func:`asym_cosine` (the velocity of the free solution)."""
    t0, _ = _reduce(p, t)
    sa, sb = math.sqrt(p.a), math.sqrt(p.b)
    w = p.half_width
    at = np.abs(t0)
    inner = at <= w
    s = np.where(
        inner,
        -sa * np.sin(sa * t0),
        -np.sign(t0) * sa * np.cos(sb * (at - w)),
    )
    return _scalar_out(t, s)


def primitive_K(p: FucikPair, t):
    """Primitive of :func:`asym_cosine` vanishing at 0.

    On the fundamental half-period the antiderivative is explicit; each full
    period adds twice the constant ``1/sqrt(a) - sqrt(a)/b``, which is ``tau``
    times the mean value of the asymmetric cosine.
    """
    t0, m = _reduce(p, t)
    sa, sb = math.sqrt(p.a), math.sqrt(p.b)
    w = p.half_width
    per_period = 2.0 * (1.0 / sa - sa / p.b)
    at = np.abs(t0)
    inner = at <= w
    k = np.where(
        inner,
        np.sin(sa * t0) / sa,
        np.sign(t0) * (1.0 / sa + (sa / p.b) * (np.cos(sb * (at - w)) - 1.0)),
    )
    return _scalar_out(t, k + m * per_period)


def fourier_coeff(p: FucikPair, h: int) -> float:
    """Cosine-series coefficient of the asymmetric cosine at harmonic ``h``.

    The expansion is in ``cos(h n t)``; it applies to genuinely asymmetric
    pairs only.  At the degenerate harmonics ``a == (h n)^2`` or
    ``b == (h n)^2`` the generic formula is replaced by ``1/(2h)``.
    """
    if p.a == p.b:
        raise PreconditionError("Fourier expansion requires an asymmetric pair")
    if h < 0:
        raise PreconditionError("harmonic index must be nonnegative")
    a, b, n, tau = p.a, p.b, p.n, p.tau
    if h == 0:
        return (2.0 / tau) * (b - a) / (b * math.sqrt(a))
    hn2 = (h * n) ** 2
    if a != hn2 and b != hn2:
        return (
            (4.0 / tau)
            * (b - a)
            / (b - hn2)
            * math.sqrt(a)
            / (a - hn2)
            * math.cos(h * n * math.pi / (2.0 * math.sqrt(a)))
        )
    return 1.0 / (2.0 * h)


def energy_invariant(p: FucikPair, c, s):
    """Signed-stiffness energy ``s^2 + a (c+)^2 + b (c-)^2``.

    Constant along the free flow; equals ``a`` on the orbit of the
    asymmetric cosine/sine pair.
    """
    c = np.asarray(c, dtype=float)
    s = np.asarray(s, dtype=float)
    val = s**2 + p.a * np.maximum(c, 0.0) ** 2 + p.b * np.maximum(-c, 0.0) ** 2
    return _scalar_out(c, val)


def to_action_angle(p: FucikPair, x: float, y: float) -> tuple[float, float]:
    """Invert the action-angle substitution at a single Cartesian point.

    Returns ``(theta, r)`` with ``theta`` in ``[0, 2*pi)`` and ``r > 0`` such
    that ``x = gamma r C(theta/n)`` and ``y = gamma r S(theta/n)``.
    """
    energy = energy_invariant(p, x, y)
    if energy == 0.0:
        raise PreconditionError("action-angle coordinates are singular at the origin")
    r = math.sqrt(energy / (2.0 * p.n))
    scale = p.gamma * r
    c, s = x / scale, y / scale
    sa, sb = math.sqrt(p.a), math.sqrt(p.b)
    w = p.half_width
    if c >= 0.0:
        # cosine arc: cos(sa t) = c, sin(sa t) = -s/sa
        t_star = math.atan2(-s / sa, c) / sa
        if t_star < 0.0:
            t_star += p.tau
    else:
        # sine arc, parameterized by u = sb (t - w) in [0, pi]
        u = math.atan2(-c * sb / sa, -s / sa)
        t_star = w + u / sb
    theta = math.fmod(p.n * t_star, TWO_PI)
    if theta < 0.0:
        theta += TWO_PI
    return theta + 0.0, r  # +0.0 clears IEEE negative zero


def from_action_angle(p: FucikPair, theta: float, r: float) -> tuple[float, float]:
    """Map ``(theta, r)`` to Cartesian ``(x, y) = gamma r (C, S)(theta/n)``."""
    if r <= 0.0:
        raise PreconditionError("action radius must be positive")
    scale = p.gamma * r
    t = theta / p.n
    return scale * asym_cosine(p, t), scale * asym_sine(p, t)


def torus_wrap(theta):
    """Reduce angles componentwise into ``[0, 2*pi)``."""
    return np.mod(np.asarray(theta, dtype=float), TWO_PI)


def angle_difference(u, v):
    """Signed angular difference ``u - v`` wrapped into ``[-pi, pi)``."""
    d = np.asarray(u, dtype=float) - np.asarray(v, dtype=float)
    return (d + math.pi) % TWO_PI - math.pi


def torus_distance(u, v) -> float:
    """Euclidean combination of per-coordinate circle distances."""
    return float(np.sqrt(np.sum(angle_difference(u, v) ** 2)))
