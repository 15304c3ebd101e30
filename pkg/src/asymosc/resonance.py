"""Resonance functions of the coupled pair and zero-finding on the torus.

For each oscillator the window average ``Lambda(t)`` (difference of the
cosine primitive across a window set by the partner's hump width), its
derivative-scaled companion ``Sigma``, the forcing response ``Phi`` and the
combined torus map

    L_i(theta) = Phi_i(theta_i)
                 + gamma_i n phi_i(+inf) (Lambda_i(theta_i - theta_{i+1}) - alpha_i)

organize the large-radius dynamics.  ``Phi`` is evaluated by composite
Gauss-Legendre quadrature split at the kink set of the asymmetric cosine,
which restores spectral accuracy on the piecewise-analytic integrand.  Zeros
of ``L`` are located by damped Newton iteration seeded from a sign-change
grid and classified by the diagonal-sign structure of the Jacobian.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError, QuadratureError, SearchError
from .forcing import CouplingFunction, ForcingSignal
from .oscillator import (
    TWO_PI,
    FucikPair,
    asym_cosine,
    asym_sine,
    primitive_K,
    torus_distance,
    torus_wrap,
)
from .spectral import DpmClass, classify_dpm


def alpha(p: FucikPair) -> float:
    """Mean-value constant ``1/sqrt(a) - sqrt(a)/b`` of the asymmetric cosine.

    Equals the integral of the cosine over a full forcing period divided by
    ``2n``.
    """
    return 1.0 / math.sqrt(p.a) - math.sqrt(p.a) / p.b


def _require_shared_n(p_i: FucikPair, p_other: FucikPair):
    if p_i.n != p_other.n:
        raise PreconditionError("oscillators must share the resonance order n")


def lambda_fn(p_i: FucikPair, p_other: FucikPair, t):
    """Window average ``K(t/n + w') - K(t/n - w')`` with ``w'`` the partner hump half-width.

    Even and ``2*pi``-periodic; strictly decreasing on ``(0, pi)``.
    """
    _require_shared_n(p_i, p_other)
    t = np.asarray(t, dtype=float)
    shift = p_other.half_width
    return primitive_K(p_i, t / p_i.n + shift) - primitive_K(p_i, t / p_i.n - shift)


def sigma_fn(p_i: FucikPair, p_other: FucikPair, t):
    """Scaled derivative of :func:`lambda_fn`: the cosine difference across the window."""
    _require_shared_n(p_i, p_other)
    t = np.asarray(t, dtype=float)
    shift = p_other.half_width
    return asym_cosine(p_i, t / p_i.n + shift) - asym_cosine(p_i, t / p_i.n - shift)


# ---------------------------------------------------------------------------
# Quadrature panels for the forcing response

_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gl_rule(m: int):
    if m not in _GL_CACHE:
        _GL_CACHE[m] = np.polynomial.legendre.leggauss(m)
    return _GL_CACHE[m]


def _kink_breakpoints(p: FucikPair) -> np.ndarray:
    """Curvature-jump locations of the asymmetric cosine in ``[0, 2*pi]``."""
    w, tau, n = p.half_width, p.tau, p.n
    pts = [0.0, TWO_PI]
    for j in range(n + 1):
        for x in (j * tau + w, j * tau - w):
            if 1e-15 < x < TWO_PI - 1e-15:
                pts.append(x)
    return np.unique(np.array(sorted(pts)))


def _panel_nodes(p: FucikPair, nodes_per_panel: int):
    """Gauss-Legendre nodes/weights on ``[0, 2*pi]`` split at the kink set."""
    x, w = _gl_rule(nodes_per_panel)
    brk = _kink_breakpoints(p)
    nodes, weights = [], []
    for lo, hi in zip(brk[:-1], brk[1:]):
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        nodes.append(mid + half * x)
        weights.append(half * w)
    return np.concatenate(nodes), np.concatenate(weights)


def _phi_from_nodes(p, forcing, theta, nodes, weights, cvals, svals=None):
    """Forcing response (or its derivative when ``svals`` is given) at ``theta``."""
    theta = np.asarray(theta, dtype=float)
    scalar = theta.ndim == 0
    th = np.atleast_1d(theta)
    shift = th[:, None] / p.n
    pv = forcing(nodes[None, :] - shift)
    if svals is None:
        out = -(p.gamma / 2.0) * pv @ (weights * cvals)
    else:
        out = -(p.gamma / (2.0 * p.n)) * pv @ (weights * svals)
    return float(out[0]) if scalar else out


def phi_fn(p: FucikPair, forcing: ForcingSignal, theta, *, nodes_per_panel: int = 32, tol: float = 1e-10):
    """Forcing response ``-(gamma/2) * integral of C(theta/n + t) p(t) dt``.

    Substituting ``u = theta/n + t`` and using joint periodicity moves the
    kink set to fixed positions, so one panel decomposition serves every
    ``theta``.  The result is checked against a doubled-node rule; exceeding
    ``tol`` raises :class:`QuadratureError`.
    """
    nodes, weights = _panel_nodes(p, nodes_per_panel)
    cvals = asym_cosine(p, nodes)
    out = _phi_from_nodes(p, forcing, theta, nodes, weights, cvals)
    nodes2, weights2 = _panel_nodes(p, 2 * nodes_per_panel)
    ref = _phi_from_nodes(p, forcing, theta, nodes2, weights2, asym_cosine(p, nodes2))
    err = np.max(np.abs(np.atleast_1d(out - ref)))
    scale = max(1.0, float(np.max(np.abs(np.atleast_1d(ref)))))
    if err > tol * scale:
        raise QuadratureError(f"forcing-response quadrature stalled at error {err:.3e}")
    return ref


def phi_derivative(p: FucikPair, forcing: ForcingSignal, theta, *, nodes_per_panel: int = 32, tol: float = 1e-10):
    """Derivative of :func:`phi_fn`, with the cosine replaced by its derivative."""
    nodes, weights = _panel_nodes(p, nodes_per_panel)
    out = _phi_from_nodes(p, forcing, theta, nodes, weights, None, asym_sine(p, nodes))
    nodes2, weights2 = _panel_nodes(p, 2 * nodes_per_panel)
    ref = _phi_from_nodes(p, forcing, theta, nodes2, weights2, None, asym_sine(p, nodes2))
    err = np.max(np.abs(np.atleast_1d(out - ref)))
    scale = max(1.0, float(np.max(np.abs(np.atleast_1d(ref)))))
    if err > tol * scale:
        raise QuadratureError(f"forcing-response quadrature stalled at error {err:.3e}")
    return ref


# ---------------------------------------------------------------------------
# System configuration and the torus map

@dataclass(frozen=True)
class SystemConfig:
    """Two resonant oscillators with their forcings and couplings."""

    pair1: FucikPair
    pair2: FucikPair
    forcing1: ForcingSignal
    forcing2: ForcingSignal
    coupling1: CouplingFunction
    coupling2: CouplingFunction

    def __post_init__(self):
        if self.pair1.n != self.pair2.n:
            raise PreconditionError("both oscillators must share the resonance order n")

    @property
    def n(self) -> int:
        return self.pair1.n

    @property
    def pairs(self):
        return (self.pair1, self.pair2)

    @property
    def forcings(self):
        return (self.forcing1, self.forcing2)

    @property
    def couplings(self):
        return (self.coupling1, self.coupling2)


@dataclass(frozen=True)
class ResolubilityReport:
    """Membership of ``(a1, a2)`` in the set where the window equation is solvable."""

    inside: bool
    lambda_at_pi: float
    alpha_value: float
    lambda_at_zero: float

    @property
    def margins(self) -> tuple[float, float]:
        """Positive iff strictly inside: (alpha - Lambda(pi), Lambda(0) - alpha)."""
        return (
            self.alpha_value - self.lambda_at_pi,
            self.lambda_at_zero - self.alpha_value,
        )


def resolubility_check(p1: FucikPair, p2: FucikPair) -> ResolubilityReport:
    """True iff ``Lambda_1(pi) < alpha_1 < Lambda_1(0)`` for the ordered pair."""
    lam_pi = float(lambda_fn(p1, p2, math.pi))
    lam_0 = float(lambda_fn(p1, p2, 0.0))
    a1 = alpha(p1)
    return ResolubilityReport(
        inside=lam_pi < a1 < lam_0,
        lambda_at_pi=lam_pi,
        alpha_value=a1,
        lambda_at_zero=lam_0,
    )


def lambda_star(p1: FucikPair, p2: FucikPair, tol: float = 1e-12) -> float:
    """Unique ``t`` in ``(0, pi)`` where the window average crosses ``alpha_1``.

    Bisection on the strictly decreasing branch; requires resolubility.
    """
    rep = resolubility_check(p1, p2)
    if not rep.inside:
        raise PreconditionError(
            "window equation has no simple root: "
            f"Lambda(pi)={rep.lambda_at_pi:.6g}, alpha={rep.alpha_value:.6g}, "
            f"Lambda(0)={rep.lambda_at_zero:.6g}"
        )
    a1 = rep.alpha_value
    lo, hi = 0.0, math.pi
    # f(lo) > 0 > f(hi) with f = Lambda - alpha, decreasing
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if float(lambda_fn(p1, p2, mid)) - a1 > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < tol:
            break
    return 0.5 * (lo + hi)


class ResonanceEval:
    """Cached evaluator of the torus map ``L`` and its Jacobian.

    Quadrature nodes, weights and cosine/derivative samples are frozen at
    construction (one panel set per oscillator), after a doubled-node
    self-check against ``quad_tol``; every later evaluation is a dot product
    and therefore deterministic.
    """

    def __init__(self, cfg: SystemConfig, nodes_per_panel: int = 32, quad_tol: float = 1e-10):
        self.cfg = cfg
        self.quad_tol = quad_tol
        self._nodes = []
        self._weights = []
        self._cvals = []
        self._svals = []
        for p in cfg.pairs:
            nodes, weights = _panel_nodes(p, nodes_per_panel)
            self._nodes.append(nodes)
            self._weights.append(weights)
            self._cvals.append(asym_cosine(p, nodes))
            self._svals.append(asym_sine(p, nodes))
        self._alpha = [alpha(p) for p in cfg.pairs]
        # gamma_i * n * phi_i(+inf), the coupling weight in L_i
        self._cw = [
            p.gamma * cfg.n * c.limit_plus for p, c in zip(cfg.pairs, cfg.couplings)
        ]
        self._self_check(nodes_per_panel)

    def _self_check(self, nodes_per_panel: int):
        probe = np.linspace(0.0, TWO_PI, 17)
        for i in (0, 1):
            p, forcing = self.cfg.pairs[i], self.cfg.forcings[i]
            got = self.phi(i, probe)
            nodes2, weights2 = _panel_nodes(p, 2 * nodes_per_panel)
            ref = _phi_from_nodes(p, forcing, probe, nodes2, weights2, asym_cosine(p, nodes2))
            scale = max(1.0, float(np.max(np.abs(ref))))
            if np.max(np.abs(got - ref)) > self.quad_tol * scale:
                raise QuadratureError(
                    "cached forcing-response quadrature failed its doubled-node check"
                )

    def phi(self, i: int, theta):
        """Forcing response of oscillator ``i`` (0-based)."""
        return _phi_from_nodes(
            self.cfg.pairs[i],
            self.cfg.forcings[i],
            theta,
            self._nodes[i],
            self._weights[i],
            self._cvals[i],
        )

    def phi_prime(self, i: int, theta):
        return _phi_from_nodes(
            self.cfg.pairs[i],
            self.cfg.forcings[i],
            theta,
            self._nodes[i],
            self._weights[i],
            None,
            self._svals[i],
        )

    def alpha_value(self, i: int) -> float:
        return self._alpha[i]

    def lam(self, i: int, t):
        pairs = self.cfg.pairs
        return lambda_fn(pairs[i], pairs[1 - i], t)

    def sigma(self, i: int, t):
        pairs = self.cfg.pairs
        return sigma_fn(pairs[i], pairs[1 - i], t)

    def L(self, theta) -> np.ndarray:
        """Torus map value ``(L1, L2)`` at ``theta = (theta1, theta2)``."""
        th1, th2 = float(theta[0]), float(theta[1])
        l1 = self.phi(0, th1) + self._cw[0] * (self.lam(0, th1 - th2) - self._alpha[0])
        l2 = self.phi(1, th2) + self._cw[1] * (self.lam(1, th2 - th1) - self._alpha[1])
        return np.array([l1, l2])

    def L_grid(self, axis1: np.ndarray, axis2: np.ndarray):
        """Componentwise values on the grid ``axis1 x axis2`` (vectorized)."""
        phi1 = np.asarray(self.phi(0, axis1))
        phi2 = np.asarray(self.phi(1, axis2))
        d = axis1[:, None] - axis2[None, :]
        L1 = phi1[:, None] + self._cw[0] * (self.lam(0, d) - self._alpha[0])
        L2 = phi2[None, :] + self._cw[1] * (self.lam(1, -d) - self._alpha[1])
        return L1, L2

    def JL(self, theta) -> np.ndarray:
        """Analytic Jacobian of the torus map."""
        th1, th2 = float(theta[0]), float(theta[1])
        g1 = self.cfg.pair1.gamma * self.cfg.coupling1.limit_plus
        g2 = self.cfg.pair2.gamma * self.cfg.coupling2.limit_plus
        s1 = g1 * float(self.sigma(0, th1 - th2))
        s2 = g2 * float(self.sigma(1, th2 - th1))
        return np.array(
            [
                [float(self.phi_prime(0, th1)) + s1, -s1],
                [-s2, float(self.phi_prime(1, th2)) + s2],
            ]
        )


def L_map(ev: ResonanceEval, theta) -> np.ndarray:
    """Functional form of :meth:`ResonanceEval.L`."""
    return ev.L(theta)


def JL_map(ev: ResonanceEval, theta) -> np.ndarray:
    """Functional form of :meth:`ResonanceEval.JL`."""
    return ev.JL(theta)


@dataclass(frozen=True)
class TorusZero:
    """A zero of the torus map with its Jacobian and classification."""

    omega: np.ndarray
    jacobian: np.ndarray
    classification: DpmClass
    residual_norm: float


def _newton_polish(ev, theta0, newton_tol, max_iter=50, step_tol=1e-12):
    """Damped Newton from ``theta0``; returns the lifted root or None."""
    theta = np.array(theta0, dtype=float)
    value = ev.L(theta)
    nrm = float(np.hypot(*value))
    for _ in range(max_iter):
        J = ev.JL(theta)
        det = J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
        scale = max(np.max(np.abs(J)) ** 2, 1e-300)
        if abs(det) < 1e-12 * scale:
            return None  # singular Jacobian at the iterate
        step = np.linalg.solve(J, -value)
        lam = 1.0
        for _ in range(30):
            trial = theta + lam * step
            tval = ev.L(trial)
            tnrm = float(np.hypot(*tval))
            if tnrm < nrm:
                break
            lam *= 0.5
        else:
            # cannot descend further: accept only if already converged
            return theta if nrm <= newton_tol else None
        theta, value, nrm = trial, tval, tnrm
        if nrm <= newton_tol and lam * float(np.hypot(*step)) < step_tol:
            return theta
    return None


def find_zeros(
    ev: ResonanceEval,
    grid_per_axis: int = 32,
    newton_tol: float = 1e-11,
    dedupe_tol: float = 1e-6,
) -> list[TorusZero]:
    """Locate all zeros of the torus map.

    Newton iterations are seeded from every grid cell whose corner values
    show a sign change in both components or contain a small-norm corner.
    Converged roots are wrapped to the fundamental domain, deduplicated in
    the torus metric and sorted lexicographically, so the output is
    reproducible under grid refinement.
    """
    if grid_per_axis < 8:
        raise PreconditionError("grid must have at least 8 cells per axis")
    axis = np.linspace(0.0, TWO_PI, grid_per_axis + 1)
    L1, L2 = ev.L_grid(axis, axis)
    scale = max(float(np.max(np.hypot(L1, L2))), 1e-300)

    roots: list[np.ndarray] = []
    residuals: list[float] = []
    skipped_singular = 0
    g = grid_per_axis
    for i in range(g):
        for j in range(g):
            c1 = np.array([L1[i, j], L1[i + 1, j], L1[i, j + 1], L1[i + 1, j + 1]])
            c2 = np.array([L2[i, j], L2[i + 1, j], L2[i, j + 1], L2[i + 1, j + 1]])
            sign_change = (c1.min() <= 0.0 <= c1.max()) and (c2.min() <= 0.0 <= c2.max())
            small = float(np.min(np.hypot(c1, c2))) < 0.05 * scale
            if not (sign_change or small):
                continue
            seed = np.array([0.5 * (axis[i] + axis[i + 1]), 0.5 * (axis[j] + axis[j + 1])])
            theta = _newton_polish(ev, seed, newton_tol)
            if theta is None:
                skipped_singular += 1
                continue
            theta = torus_wrap(theta)
            res = float(np.hypot(*ev.L(theta)))
            if res > newton_tol:
                continue
            for k, known in enumerate(roots):
                if torus_distance(theta, known) < dedupe_tol:
                    if res < residuals[k]:
                        roots[k], residuals[k] = theta, res
                    break
            else:
                roots.append(theta)
                residuals.append(res)

    order = sorted(range(len(roots)), key=lambda k: (roots[k][0], roots[k][1]))
    out = []
    for k in order:
        J = ev.JL(roots[k])
        out.append(
            TorusZero(
                omega=roots[k],
                jacobian=J,
                classification=classify_dpm(J),
                residual_norm=residuals[k],
            )
        )
    return out
