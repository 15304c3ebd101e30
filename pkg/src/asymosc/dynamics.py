"""Time integration, the Poincare section map, and certified invariant sets.

The coupled second-order system is integrated as a first-order field in
``(x1, x2, y1, y2)`` with an adaptive embedded 4(5) pair.  The section map
over one forcing period, conjugated through the action-angle transforms
with the angle lift tracked continuously along the flow, is the discrete
dynamical system whose large-radius behavior this module certifies:

* measure the defect of the first-order expansion of the section map
  against the torus resonance function;
* around a zero with the right Jacobian sign structure, construct a set
  ``E`` (angle ball x confined radius ratio x large radii) that the map
  sends into itself while pushing every radius up by a fixed margin;
* verify the construction by sampling and iterate orbits to exhibit the
  resulting unbounded growth (in reverse time for the expanding class).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Optional

import numpy as np

from . import _kernel
from .errors import (
    PreconditionError,
    RadiusCollapseError,
    SearchError,
    StepUnderflowError,
)
from .oscillator import TWO_PI, angle_difference, torus_distance, torus_wrap
from .resonance import ResonanceEval, SystemConfig
from .spectral import DpmClass, find_cone_params

RADIUS_FLOOR = 1e-6


@dataclass(frozen=True)
class IntegratorSettings:
    """Adaptive-step configuration for the embedded 4(5) integrator."""

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = TWO_PI / 200.0
    method: str = "dormand-prince-45"

    def __post_init__(self):
        for tol in (self.rel_tol, self.abs_tol):
            if not 1e-14 <= tol <= 1e-3:
                raise PreconditionError("tolerances must lie in [1e-14, 1e-3]")
        if self.max_step <= 0.0:
            raise PreconditionError("max_step must be positive")
        if self.method != "dormand-prince-45":
            raise PreconditionError(f"unknown integrator method {self.method!r}")


class PolarState(NamedTuple):
    """Action-angle state; angles are lifted (not reduced mod 2*pi)."""

    theta1: float
    theta2: float
    r1: float
    r2: float

    @property
    def angles(self) -> np.ndarray:
        return np.array([self.theta1, self.theta2])

    @property
    def radii(self) -> np.ndarray:
        return np.array([self.r1, self.r2])


@lru_cache(maxsize=32)
def _packed(cfg: SystemConfig):
    f1, f2 = cfg.forcings
    c1, c2 = cfg.couplings
    def split(f):
        ks = [float(k) for k, _, _ in f.harmonics]
        ac = [a for _, a, _ in f.harmonics]
        bs = [b for _, _, b in f.harmonics]
        return f.constant, ks, ac, bs
    from ._kernel.pure import pack_params

    s1, s2 = split(f1), split(f2)
    return pack_params(
        cfg.pair1.a, cfg.pair1.b, cfg.pair2.a, cfg.pair2.b,
        *s1, *s2,
        c1.limit_plus, c1.perturb_amp, c2.limit_plus, c2.perturb_amp,
    )


@lru_cache(maxsize=8)
def _eval_for(cfg: SystemConfig) -> ResonanceEval:
    return ResonanceEval(cfg)


def vector_field(cfg: SystemConfig, t: float, s) -> np.ndarray:
    """First-order field ``(y1, y2, p1 - a1 x1+ + b1 x1- - phi1(x2), ...)``."""
    x1, x2, y1, y2 = (float(v) for v in s)
    p1 = float(cfg.forcing1(t))
    p2 = float(cfg.forcing2(t))
    a1 = p1 - cfg.pair1.a * max(x1, 0.0) + cfg.pair1.b * max(-x1, 0.0) - float(cfg.coupling1(x2))
    a2 = p2 - cfg.pair2.a * max(x2, 0.0) + cfg.pair2.b * max(-x2, 0.0) - float(cfg.coupling2(x1))
    return np.array([y1, y2, a1, a2])


def integrate(
    cfg: SystemConfig,
    s0,
    t0: float,
    t1: float,
    st: IntegratorSettings = IntegratorSettings(),
    record: bool = False,
):
    """Flow the Cartesian state from ``t0`` to ``t1`` (backward allowed).

    Returns the final state, or ``(state, ts, ys)`` when ``record`` is set.
    """
    if t1 == t0 and not record:
        return np.asarray(s0, dtype=float)
    y_end, ts, ys, status = _kernel.integrate_system(
        _packed(cfg), tuple(float(v) for v in s0), float(t0), float(t1),
        st.rel_tol, st.abs_tol, st.max_step, record,
    )
    if status == _kernel.STATUS_STEP_UNDERFLOW:
        raise StepUnderflowError(f"step size underflow near t = {ts[-1] if record else t1}")
    if record:
        return y_end, ts, ys
    return y_end


def _angles_radii(pair, x, y):
    """Vectorized action-angle inversion for one oscillator (angles in [0, 2pi))."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    a, b, n = pair.a, pair.b, pair.n
    sa, sb = math.sqrt(a), math.sqrt(b)
    energy = y**2 + a * np.maximum(x, 0.0) ** 2 + b * np.maximum(-x, 0.0) ** 2
    r = np.sqrt(energy / (2.0 * n))
    scale = np.sqrt(energy / a)
    with np.errstate(invalid="ignore", divide="ignore"):
        c = np.where(scale > 0.0, x / scale, 1.0)
        s = np.where(scale > 0.0, y / scale, 0.0)
    inner = c >= 0.0
    t_in = np.arctan2(-s / sa, c) / sa
    t_in = np.where(t_in < 0.0, t_in + pair.tau, t_in)
    u = np.arctan2(-c * sb / sa, -s / sa)
    t_out = pair.half_width + u / sb
    t_star = np.where(inner, t_in, t_out)
    return torus_wrap(n * t_star), r


def _lift(theta_start: float, wrapped: np.ndarray) -> float:
    """Lifted final angle anchored at ``theta_start`` along a dense sample path."""
    steps = angle_difference(wrapped[1:], wrapped[:-1])
    return theta_start + float(np.sum(steps))


def _poincare_lifted(cfg, theta, r, st, direction: int):
    """One section-map application; returns lifted angles and final radii."""
    from .oscillator import from_action_angle

    x1, y1 = from_action_angle(cfg.pair1, torus_wrap(theta[0]), r[0])
    x2, y2 = from_action_angle(cfg.pair2, torus_wrap(theta[1]), r[1])
    t1 = direction * TWO_PI
    _, ts, ys = integrate(cfg, (x1, x2, y1, y2), 0.0, t1, st, record=True)
    th1, r1 = _angles_radii(cfg.pair1, ys[:, 0], ys[:, 2])
    th2, r2 = _angles_radii(cfg.pair2, ys[:, 1], ys[:, 3])
    if min(float(np.min(r1)), float(np.min(r2))) < RADIUS_FLOOR:
        raise RadiusCollapseError("an action radius collapsed during the flight")
    lifted = np.array([_lift(theta[0], th1), _lift(theta[1], th2)])
    return lifted, np.array([float(r1[-1]), float(r2[-1])])


def _direction_sign(direction) -> int:
    if direction in (1, "forward"):
        return 1
    if direction in (-1, "backward"):
        return -1
    raise PreconditionError(f"direction must be 'forward' or 'backward', got {direction!r}")


def poincare_map(
    cfg: SystemConfig,
    s: PolarState,
    st: IntegratorSettings = IntegratorSettings(),
    direction="forward",
) -> PolarState:
    """Section map over one forcing period in action-angle coordinates.

    Angles advance continuously (by roughly ``2*pi*n`` per forward period);
    they are returned lifted, not reduced.
    """
    if s.r1 <= 0.0 or s.r2 <= 0.0:
        raise PreconditionError("action radii must be positive")
    sgn = _direction_sign(direction)
    lifted, radii = _poincare_lifted(cfg, (s.theta1, s.theta2), (s.r1, s.r2), st, sgn)
    return PolarState(lifted[0], lifted[1], radii[0], radii[1])


@dataclass(frozen=True)
class AsymptoticResidual:
    """Measured defect of the first-order section-map expansion.

    ``angle_residuals[i] = r_i * (Delta theta_i - 2 pi n) - L_i(theta0)`` and
    ``radial_residuals[i] = Delta r_i + dL_i/dtheta_i(theta0)`` for the
    forward map (signs flip with the map for the backward one).
    """

    theta0: tuple[float, float]
    r0: tuple[float, float]
    angle_residuals: np.ndarray
    radial_residuals: np.ndarray


def asymptotic_residual(
    cfg: SystemConfig,
    theta0,
    r0,
    st: IntegratorSettings = IntegratorSettings(),
    *,
    ev: Optional[ResonanceEval] = None,
    direction="forward",
) -> AsymptoticResidual:
    """Compare one numeric section-map application with its expansion."""
    if min(r0) <= 0.0:
        raise PreconditionError("action radii must be positive")
    sgn = _direction_sign(direction)
    ev = ev if ev is not None else _eval_for(cfg)
    theta0 = (float(theta0[0]), float(theta0[1]))
    r0 = (float(r0[0]), float(r0[1]))
    lifted, radii = _poincare_lifted(cfg, theta0, r0, st, sgn)
    L = sgn * ev.L(theta0)
    J = sgn * ev.JL(theta0)
    rotation = sgn * TWO_PI * cfg.n
    angle_res = np.array(
        [r0[i] * (lifted[i] - theta0[i] - rotation) - L[i] for i in (0, 1)]
    )
    radial_res = np.array([(radii[i] - r0[i]) + J[i, i] for i in (0, 1)])
    return AsymptoticResidual(theta0, r0, angle_res, radial_res)


@dataclass(frozen=True)
class InvariantSetParams:
    """Forward- (or backward-) invariant set around a torus zero.

    ``E = { dist(theta, omega) <= Theta, r_i >= R,
            lam - eta <= r1/r2 <= lam + eta }``; the map raises each radius
    by at least the corresponding growth margin on ``E``.
    """

    omega: np.ndarray
    R: float
    Theta: float
    lam: float
    eta: float
    growth_margins: tuple[float, float]
    direction: str = "forward"

    def __post_init__(self):
        if not (0.0 < self.Theta < math.pi):
            raise PreconditionError("angular radius must lie in (0, pi)")
        if not (0.0 < self.eta < self.lam):
            raise PreconditionError("ratio band must satisfy 0 < eta < lam")
        if self.R <= 0.0 or min(self.growth_margins) <= 0.0:
            raise PreconditionError("radius and growth margins must be positive")

    def contains(self, theta, r, slack: float = 1e-9) -> bool:
        """Membership test with a tiny relative slack against roundoff."""
        q = r[0] / r[1]
        return (
            min(r) >= self.R * (1.0 - slack)
            and self.lam - self.eta - slack <= q <= self.lam + self.eta + slack
            and torus_distance(torus_wrap(theta), torus_wrap(self.omega))
            <= self.Theta * (1.0 + slack) + slack
        )


def _ball_offsets(radius: float, n_angles: int, n_radii: int) -> np.ndarray:
    """Deterministic polar grid covering the closed disk of given radius."""
    offs = [np.zeros(2)]
    for j in range(1, n_radii + 1):
        rho = radius * j / n_radii
        for k in range(n_angles):
            ang = TWO_PI * (k + 0.5 * (j % 2)) / n_angles
            offs.append(rho * np.array([math.cos(ang), math.sin(ang)]))
    return np.array(offs)


def _signed_eval(ev, sgn):
    L = lambda th: sgn * ev.L(th)
    J = lambda th: sgn * ev.JL(th)
    return L, J


def choose_invariant_set(
    cfg: SystemConfig,
    zero,
    st: IntegratorSettings = IntegratorSettings(),
    *,
    direction="forward",
    ev: Optional[ResonanceEval] = None,
    safety: float = 2.0,
    n_angles: int = 24,
    n_radii: int = 8,
    residual_probes: int = 6,
    radius_budget: int = 24,
) -> InvariantSetParams:
    """Constructive search for invariant-set parameters at a torus zero.

    The ratio center comes from the Jacobian diagonal, the cone search
    supplies the contraction rate and ratio half-width, the angular radius
    shrinks until slope, ratio-slope, and linearization-defect conditions
    hold on a sampled ball, and the radius floor grows until the measured
    expansion remainders pass their thresholds with the requested safety
    factor.  Forward direction requires a negative-diagonal zero; backward
    requires a positive-diagonal one and certifies the inverse map.
    """
    sgn = _direction_sign(direction)
    want = DpmClass.DPLUS if sgn == 1 else DpmClass.DMINUS
    if zero.classification is not want:
        raise PreconditionError(
            f"{direction} invariant sets need a {want.value} zero, "
            f"got {zero.classification.value}"
        )
    ev = ev if ev is not None else _eval_for(cfg)
    omega = np.asarray(zero.omega, dtype=float)
    A = sgn * np.asarray(zero.jacobian, dtype=float)
    L_eff, J_eff = _signed_eval(ev, sgn)

    lam = A[0, 0] / A[1, 1]
    cone = find_cone_params(A)
    a0, eps0, eta = cone.a0, cone.eps0, cone.eta
    gammas = (-A[0, 0] / 2.0, -A[1, 1] / 2.0)

    # Angular radius: halve until all ball conditions hold on the sample grid.
    theta_cap = 0.9 * math.pi
    Theta = None
    trial = theta_cap
    for _ in range(60):
        offs = _ball_offsets(trial, n_angles, n_radii)
        ok = True
        for off in offs:
            th = omega + off
            J = J_eff(th)
            if not (J[0, 0] <= -gammas[0] and J[1, 1] <= -gammas[1]):
                ok = False
                break
            rhs_plus = -A[1, 1] * eta / (2.0 * (lam + eta))
            rhs_minus = -A[1, 1] * eta / (2.0 * (lam - eta))
            if J[0, 0] / (lam + eta) - J[1, 1] < 1.05 * rhs_plus:
                ok = False
                break
            if J[1, 1] - J[0, 0] / (lam - eta) < 1.05 * rhs_minus:
                ok = False
                break
            dist = float(np.hypot(*off))
            if dist > 0.0:
                defect = L_eff(th) - A @ off
                if float(np.hypot(*defect)) / dist > a0 / 4.0 / 1.05:
                    ok = False
                    break
        if ok:
            Theta = trial
            break
        trial /= 2.0
    if Theta is None:
        raise SearchError("no angular radius satisfies the ball conditions")

    half_offs = _ball_offsets(Theta / 2.0, n_angles, n_radii)
    l_star = max(float(np.hypot(*L_eff(omega + off))) for off in half_offs)
    if l_star <= 0.0:
        raise SearchError("resonance function vanishes on the half ball")
    g_threshold = min(l_star, a0 * Theta / 8.0)
    pair_plus = -A[1, 1] * eta / (2.0 * (lam + eta))
    pair_minus = -A[1, 1] * eta / (2.0 * (lam - eta))

    # remainders enter the invariance argument only at angles inside the ball
    probe_offs = np.vstack(
        [_ball_offsets(0.7 * Theta, residual_probes, 1), _ball_offsets(Theta, residual_probes, 1)[1:]]
    )
    ratios = [lam - eta, lam, lam + eta]

    r_base = max(math.sqrt(2.0) / eps0, 4.0 * l_star / Theta, 1.0)
    r_try = r_base
    for _ in range(radius_budget):
        f1s, f2s, gnorms = [], [], []
        for idx, off in enumerate(probe_offs):
            q = ratios[idx % len(ratios)]
            if q <= 1.0:
                r1, r2 = r_try, r_try / q
            else:
                r1, r2 = q * r_try, r_try
            res = asymptotic_residual(
                cfg, omega + off, (r1, r2), st, ev=ev, direction=direction
            )
            f1s.append(float(res.radial_residuals[0]))
            f2s.append(float(res.radial_residuals[1]))
            gnorms.append(float(np.hypot(*res.angle_residuals)))
        f1a, f2a = np.array(f1s), np.array(f2s)
        ok = (
            float(np.min(f1a)) >= -gammas[0] / (2.0 * safety)
            and float(np.min(f2a)) >= -gammas[1] / (2.0 * safety)
            and safety * float(np.max(np.abs(f2a - f1a / (lam + eta)))) < pair_plus
            and safety * float(np.max(np.abs(f1a / (lam - eta) - f2a))) < pair_minus
            and safety * max(gnorms) < g_threshold
        )
        if ok:
            R = max(r_try, 4.0 * l_star / Theta, math.sqrt(2.0) / eps0)
            return InvariantSetParams(
                omega=omega,
                R=R,
                Theta=Theta,
                lam=lam,
                eta=eta,
                growth_margins=(gammas[0] / 2.0, gammas[1] / 2.0),
                direction="forward" if sgn == 1 else "backward",
            )
        r_try *= 2.0
    raise SearchError(
        "expansion remainders did not reach their thresholds within the radius budget"
    )


@dataclass(frozen=True)
class InvarianceReport:
    """Sampling certificate for an invariant set."""

    samples: int
    violations: int
    worst_growth_slack: float
    worst_ratio_slack: float
    worst_angle_slack: float


def verify_invariance(
    cfg: SystemConfig,
    params: InvariantSetParams,
    n_samples: int = 500,
    st: IntegratorSettings = IntegratorSettings(),
    seed: int = 0,
) -> InvarianceReport:
    """Sample the set, apply the map once, and check every membership bound.

    Samples are uniform on the angle ball, log-uniform in the smaller radius
    over ``[R, 10R]``, uniform in the radius ratio across its band, which
    stresses both the inner boundary and the far radial regime.
    """
    rng = np.random.default_rng(seed)
    sgn = _direction_sign(params.direction)
    violations = 0
    worst_growth = math.inf
    worst_ratio = math.inf
    worst_angle = math.inf
    for _ in range(n_samples):
        ang = rng.uniform(0.0, TWO_PI)
        rho = params.Theta * math.sqrt(rng.uniform())
        theta = params.omega + rho * np.array([math.cos(ang), math.sin(ang)])
        q = rng.uniform(params.lam - params.eta, params.lam + params.eta)
        rmin = math.exp(rng.uniform(math.log(params.R), math.log(10.0 * params.R)))
        if q <= 1.0:
            r = np.array([rmin, rmin / q])
        else:
            r = np.array([q * rmin, rmin])
        lifted, radii = _poincare_lifted(cfg, theta, r, st, sgn)

        growth = min(radii[i] - r[i] - params.growth_margins[i] for i in (0, 1))
        q_out = radii[0] / radii[1]
        ratio = min(params.lam + params.eta - q_out, q_out - (params.lam - params.eta))
        angle = params.Theta - torus_distance(torus_wrap(lifted), torus_wrap(params.omega))
        floor = min(radii) - params.R
        if growth < 0.0 or ratio < 0.0 or angle < 0.0 or floor < 0.0:
            violations += 1
        worst_growth = min(worst_growth, growth)
        worst_ratio = min(worst_ratio, ratio)
        worst_angle = min(worst_angle, angle)
    return InvarianceReport(
        samples=n_samples,
        violations=violations,
        worst_growth_slack=worst_growth,
        worst_ratio_slack=worst_ratio,
        worst_angle_slack=worst_angle,
    )


@dataclass
class OrbitTrace:
    """Sequence of section-map iterates with optional set-membership flags."""

    states: list[PolarState]
    direction: str
    in_set: Optional[list[bool]] = None

    @property
    def radii(self) -> np.ndarray:
        return np.array([[s.r1, s.r2] for s in self.states])

    @property
    def angles(self) -> np.ndarray:
        return np.array([[s.theta1, s.theta2] for s in self.states])

    def section_energies(self, cfg: SystemConfig) -> np.ndarray:
        """Per-oscillator ``|x|^2 + |y|^2`` at the section times."""
        from .oscillator import from_action_angle

        out = np.empty((len(self.states), 2))
        for k, s in enumerate(self.states):
            x1, y1 = from_action_angle(cfg.pair1, torus_wrap(s.theta1), s.r1)
            x2, y2 = from_action_angle(cfg.pair2, torus_wrap(s.theta2), s.r2)
            out[k] = (x1 * x1 + y1 * y1, x2 * x2 + y2 * y2)
        return out


def iterate_orbit(
    cfg: SystemConfig,
    s0: PolarState,
    n_steps: int,
    direction="forward",
    st: IntegratorSettings = IntegratorSettings(),
    params: Optional[InvariantSetParams] = None,
) -> OrbitTrace:
    """Iterate the section map ``n_steps`` times from ``s0``.

    Membership flags are recorded when invariant-set parameters are given.
    """
    if n_steps < 1:
        raise PreconditionError("need at least one iterate")
    sgn = _direction_sign(direction)
    states = [PolarState(*map(float, s0))]
    flags = None
    if params is not None:
        flags = [params.contains((s0.theta1, s0.theta2), (s0.r1, s0.r2))]
    current = states[0]
    for _ in range(n_steps):
        current = poincare_map(cfg, current, st, "forward" if sgn == 1 else "backward")
        states.append(current)
        if flags is not None:
            flags.append(
                params.contains((current.theta1, current.theta2), (current.r1, current.r2))
            )
    return OrbitTrace(states=states, direction="forward" if sgn == 1 else "backward", in_set=flags)
