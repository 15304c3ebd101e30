"""End-to-end demonstration scenarios for unbounded-orbit construction.

Three parameter regimes in which the torus resonance map provably has zeros
with the diagonal sign structure needed by the invariant-set machinery:

* ``small_coupling`` - both forcing responses have simple falling zeros and
  the couplings are scaled down until the Jacobian keeps its uncoupled
  diagonal character;
* ``phi1_null`` - the first forcing response vanishes identically (its
  driving harmonic hits a vanishing cosine coefficient) and the second
  forcing is a single strong harmonic, which yields four explicit zeros;
* ``linear_symmetric`` - both oscillators harmonic, the first forcing with
  no component at the resonant harmonic, again with four explicit zeros.

Each scenario verifies its preconditions, reproduces the explicit zeros
where available, cross-validates classifications between explicit Jacobians
and the quadrature-based evaluator, and optionally runs the full
invariance + orbit pipeline at the appropriate zeros.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .dynamics import (
    IntegratorSettings,
    PolarState,
    choose_invariant_set,
    iterate_orbit,
    verify_invariance,
)
from .errors import NumericalError, PreconditionError
from .forcing import CouplingFunction, ForcingSignal
from .oscillator import TWO_PI, FucikPair, fourier_coeff, torus_distance, torus_wrap
from .resonance import (
    ResonanceEval,
    SystemConfig,
    TorusZero,
    _newton_polish,
    alpha,
    find_zeros,
    lambda_fn,
    lambda_star,
    phi_fn,
    resolubility_check,
    sigma_fn,
)
from .spectral import DpmClass, classify_dpm

DEFAULT_SETTINGS = IntegratorSettings(rel_tol=1e-12, abs_tol=1e-12)


@dataclass
class ScenarioReport:
    """Structured outcome of one scenario run."""

    name: str
    summary: dict
    checks: dict = field(default_factory=dict)
    zeros: list = field(default_factory=list)
    closed_form_zeros: list = field(default_factory=list)
    invariant_sets: list = field(default_factory=list)
    orbits: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)
    traces: list = field(default_factory=list)  # OrbitTrace objects, not serialized

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "summary": self.summary,
            "checks": self.checks,
            "passed": self.passed,
            "zeros": self.zeros,
            "closed_form_zeros": self.closed_form_zeros,
            "invariant_sets": self.invariant_sets,
            "orbits": self.orbits,
            "extras": self.extras,
        }


def _zero_dict(z: TorusZero) -> dict:
    return {
        "omega": [float(v) for v in z.omega],
        "jacobian": [[float(v) for v in row] for row in z.jacobian],
        "classification": z.classification.value,
        "residual_norm": float(z.residual_norm),
    }


def _match_closed_to_found(closed, found, tol=1e-8):
    """For each explicit zero, the torus distance to its nearest found zero."""
    out = []
    for om in closed:
        if not found:
            out.append(math.inf)
            continue
        out.append(min(torus_distance(torus_wrap(om), z.omega) for z in found))
    return out


def _start_state(params) -> PolarState:
    rmin = 1.2 * params.R
    if params.lam <= 1.0:
        r1, r2 = rmin, rmin / params.lam
    else:
        r1, r2 = params.lam * rmin, rmin
    return PolarState(float(params.omega[0]), float(params.omega[1]), r1, r2)


def _run_pipeline(report, cfg, zero, st, direction, ev, n_samples, n_iterates, seed):
    """choose -> verify -> iterate at one zero; records results and checks."""
    tag = direction
    params = choose_invariant_set(cfg, zero, st, direction=direction, ev=ev)
    ver = verify_invariance(cfg, params, n_samples, st, seed=seed)
    report.invariant_sets.append(
        {
            "direction": direction,
            "omega": [float(v) for v in params.omega],
            "R": params.R,
            "Theta": params.Theta,
            "lambda": params.lam,
            "eta": params.eta,
            "growth_margins": list(params.growth_margins),
            "samples": ver.samples,
            "violations": ver.violations,
            "worst_growth_slack": ver.worst_growth_slack,
            "worst_ratio_slack": ver.worst_ratio_slack,
            "worst_angle_slack": ver.worst_angle_slack,
        }
    )
    report.checks[f"invariance_{tag}_zero_violations"] = ver.violations == 0

    trace = iterate_orbit(cfg, _start_state(params), n_iterates, direction, st, params)
    radii = trace.radii
    increments = np.diff(radii, axis=0)
    monotone = bool(np.all(increments > 0.0))
    growth = float(np.min(radii[-1] - radii[0]))
    needed = n_iterates * min(params.growth_margins)
    report.orbits.append(
        {
            "direction": direction,
            "iterates": n_iterates,
            "initial_radii": radii[0].tolist(),
            "final_radii": radii[-1].tolist(),
            "monotone": monotone,
            "min_growth": growth,
            "guaranteed_growth": needed,
            "all_in_set": bool(all(trace.in_set)),
        }
    )
    report.traces.append(trace)
    report.checks[f"orbit_{tag}_monotone"] = monotone
    report.checks[f"orbit_{tag}_growth_bound"] = growth >= needed
    report.checks[f"orbit_{tag}_stays_in_set"] = bool(all(trace.in_set))
    return params, trace


def _complex_coeff_quadrature(p: ForcingSignal, k: int, samples: int = 4096) -> complex:
    """Trapezoidal cross-check of the complex coefficient (exact for trig series)."""
    t = np.arange(samples) * (TWO_PI / samples)
    vals = p(t) * np.exp(1j * k * t)
    return complex(np.sum(vals) * TWO_PI / samples)


# ---------------------------------------------------------------------------
# Scenario 1: small coupling


def scenario_small_coupling(
    pair1: Optional[FucikPair] = None,
    pair2: Optional[FucikPair] = None,
    forcing1: Optional[ForcingSignal] = None,
    forcing2: Optional[ForcingSignal] = None,
    scale_grid=None,
    base_limits: tuple[float, float] = (1.0, 1.0),
    pipeline_scale: Optional[float] = None,
    st: IntegratorSettings = DEFAULT_SETTINGS,
    run_pipeline: bool = True,
    n_samples: int = 500,
    n_iterates: int = 200,
    seed: int = 2024,
) -> ScenarioReport:
    """Continue the uncoupled zero through a grid of coupling magnitudes.

    At zero coupling the Jacobian is diagonal with the two falling slopes of
    the forcing responses; the scenario reports the largest grid scale up to
    which the negative-diagonal classification survives and runs the full
    pipeline at one admissible scale.
    """
    pair1 = pair1 if pair1 is not None else FucikPair.from_a(4.0, 1)
    pair2 = pair2 if pair2 is not None else FucikPair.from_a(2.25, 1)
    n = pair1.n
    forcing1 = forcing1 if forcing1 is not None else ForcingSignal.cosine(n)
    forcing2 = forcing2 if forcing2 is not None else ForcingSignal.cosine(n)
    if scale_grid is None:
        scale_grid = np.linspace(0.0, 0.6, 13)
    scale_grid = np.asarray(scale_grid, dtype=float)
    if scale_grid[0] != 0.0 or np.any(np.diff(scale_grid) <= 0.0):
        raise PreconditionError("scale grid must be increasing and start at 0")

    report = ScenarioReport(
        name="small-coupling",
        summary={
            "pair1": {"a": pair1.a, "b": pair1.b, "n": pair1.n},
            "pair2": {"a": pair2.a, "b": pair2.b, "n": pair2.n},
            "base_limits": list(base_limits),
            "scale_grid": scale_grid.tolist(),
        },
    )

    # Simple falling zero of each forcing response, by bracketing + bisection.
    roots = []
    for pair, forcing in ((pair1, forcing1), (pair2, forcing2)):
        grid = np.linspace(0.0, TWO_PI, 512, endpoint=False)
        vals = np.asarray(phi_fn(pair, forcing, grid))
        root = None
        for j in range(len(grid)):
            v0, v1 = vals[j], vals[(j + 1) % len(grid)]
            if v0 > 0.0 >= v1:  # falling crossing
                lo, hi = grid[j], grid[j] + (TWO_PI / 512)
                for _ in range(80):
                    mid = 0.5 * (lo + hi)
                    if float(phi_fn(pair, forcing, mid)) > 0.0:
                        lo = mid
                    else:
                        hi = mid
                root = 0.5 * (lo + hi)
                break
        if root is None:
            raise PreconditionError("a forcing response has no falling zero")
        roots.append(root)
    omega_star = np.array(roots)

    def cfg_at(scale: float) -> SystemConfig:
        return SystemConfig(
            pair1, pair2, forcing1, forcing2,
            CouplingFunction(base_limits[0] * scale),
            CouplingFunction(base_limits[1] * scale),
        )

    # Uncoupled slopes must be strictly negative at the roots.
    ev0 = ResonanceEval(cfg_at(0.0))
    slopes = (float(ev0.phi_prime(0, roots[0])), float(ev0.phi_prime(1, roots[1])))
    report.extras["uncoupled_zero"] = omega_star.tolist()
    report.extras["uncoupled_slopes"] = list(slopes)
    report.checks["uncoupled_slopes_negative"] = slopes[0] < 0.0 and slopes[1] < 0.0

    # Continuation over the scale grid.
    continuation = []
    omega = omega_star.copy()
    classes = []
    for scale in scale_grid:
        ev = ResonanceEval(cfg_at(float(scale)))
        polished = _newton_polish(ev, omega, 1e-11)
        if polished is None:
            continuation.append({"scale": float(scale), "status": "continuation-failed"})
            classes.append(None)
            continue
        omega = polished
        J = ev.JL(omega)
        cls = classify_dpm(J)
        classes.append(cls)
        continuation.append(
            {
                "scale": float(scale),
                "status": "ok",
                "omega": torus_wrap(omega).tolist(),
                "classification": cls.value,
            }
        )
    report.extras["continuation"] = continuation
    report.checks["dplus_at_zero_scale"] = classes[0] is DpmClass.DPLUS

    phi_star = 0.0
    for scale, cls in zip(scale_grid, classes):
        if cls is DpmClass.DPLUS:
            phi_star = float(scale)
        else:
            break
    report.extras["phi_star"] = phi_star
    flips = sum(
        1
        for c0, c1 in zip(classes[:-1], classes[1:])
        if c0 is not None and c1 is not None and c0 != c1
    )
    report.extras["classification_flips"] = flips
    report.checks["phi_star_positive"] = phi_star > 0.0

    if run_pipeline:
        if pipeline_scale is None:
            admissible = scale_grid[(scale_grid > 0.0) & (scale_grid <= phi_star)]
            if len(admissible) == 0:
                raise NumericalError("no admissible coupling scale below phi_star")
            pipeline_scale = float(admissible[len(admissible) // 2])
        if pipeline_scale > phi_star:
            raise PreconditionError("pipeline scale must not exceed phi_star")
        report.extras["pipeline_scale"] = pipeline_scale
        cfg = cfg_at(pipeline_scale)
        ev = ResonanceEval(cfg)
        polished = _newton_polish(ev, omega_star, 1e-11)
        if polished is None:
            raise NumericalError("continuation to the pipeline scale failed")
        J = ev.JL(polished)
        zero = TorusZero(
            omega=torus_wrap(polished),
            jacobian=J,
            classification=classify_dpm(J),
            residual_norm=float(np.hypot(*ev.L(polished))),
        )
        report.zeros.append(_zero_dict(zero))
        report.checks["pipeline_zero_dplus"] = zero.classification is DpmClass.DPLUS
        _run_pipeline(report, cfg, zero, st, "forward", ev, n_samples, n_iterates, seed)
    return report


# ---------------------------------------------------------------------------
# Scenario 2: vanishing first forcing response


def scenario_phi1_null(
    k: int = 2,
    a2: float = 1.21,
    r_harm: int = 1,
    mu: Optional[float] = None,
    n: int = 1,
    phi_limits: tuple[float, float] = (0.3, 0.2),
    mu_grid=None,
    st: IntegratorSettings = DEFAULT_SETTINGS,
    run_pipeline: bool = True,
    n_samples: int = 500,
    n_iterates: int = 200,
    grid_per_axis: int = 48,
    seed: int = 2024,
) -> ScenarioReport:
    """Explicit zeros when the first forcing response vanishes identically.

    The first oscillator has ``sqrt(a1)/n = 2k/(2k+1)``, so the cosine
    coefficient at harmonic ``2k`` vanishes and forcing ``cos(2 k n t)``
    produces no response.  The second forcing is ``mu cos(r n t)``.  Above
    the explicit amplitude threshold the resonance map has four zeros in
    closed form; the scenario reproduces, classifies, and (optionally) runs
    the pipeline at the contracting/expanding pair.
    """
    if k < 1:
        raise PreconditionError("need k >= 1")
    if k == 1:
        # sqrt(b1) = 2n makes the coefficient at harmonic 2 equal 1/4, not 0
        # (the degenerate branch of the coefficient formula), so the
        # construction genuinely fails there.
        raise PreconditionError(
            "k = 1 is degenerate: the partner stiffness collides with the "
            "driving harmonic and the response coefficient does not vanish"
        )
    s = 2 * k
    pair1 = FucikPair.from_a((s * n / (2 * k + 1.0)) ** 2, n)
    pair2 = FucikPair.from_a(float(a2), n)
    c_s1 = fourier_coeff(pair1, s)
    if abs(c_s1) > 1e-12:
        raise PreconditionError(f"response coefficient at harmonic {s} is {c_s1:.3e}, not 0")
    res = resolubility_check(pair1, pair2)
    if not res.inside:
        raise PreconditionError(
            f"(a1, a2) outside the resolubility set: margins {res.margins}"
        )
    c_r2 = fourier_coeff(pair2, r_harm)
    if abs(c_r2) < 1e-9:
        raise PreconditionError(f"partner coefficient at harmonic {r_harm} vanishes")
    if phi_limits[0] == 0.0:
        raise PreconditionError("the first coupling limit must be nonzero")

    forcing1 = ForcingSignal.cosine(s * n)
    lam_star = lambda_star(pair1, pair2)
    lam2_at = float(lambda_fn(pair2, pair1, lam_star))
    alpha2 = alpha(pair2)
    mu_hat = abs(2.0 * n * phi_limits[1] * (lam2_at - alpha2) / (math.pi * c_r2))
    if mu is None:
        mu = 2.0 * mu_hat + 1.0

    report = ScenarioReport(
        name="phi1-null",
        summary={
            "k": k,
            "n": n,
            "r_harm": r_harm,
            "pair1": {"a": pair1.a, "b": pair1.b, "n": n},
            "pair2": {"a": pair2.a, "b": pair2.b, "n": n},
            "phi_limits": list(phi_limits),
            "mu": mu,
        },
    )
    report.extras.update(
        {
            "lambda_star": lam_star,
            "mu_hat": mu_hat,
            "c_s1": c_s1,
            "c_r2": c_r2,
            "resolubility_margins": list(res.margins),
        }
    )

    # The response to the first forcing must vanish along the whole circle.
    probe = np.linspace(0.0, TWO_PI, 1000)
    phi1_max = float(np.max(np.abs(phi_fn(pair1, forcing1, probe))))
    report.extras["max_abs_phi1"] = phi1_max
    report.checks["phi1_identically_zero"] = phi1_max <= 1e-9

    cfg = SystemConfig(
        pair1, pair2, forcing1, ForcingSignal.cosine(r_harm * n, mu),
        CouplingFunction(phi_limits[0]), CouplingFunction(phi_limits[1]),
    )
    ev = ResonanceEval(cfg)

    X = 2.0 * n * phi_limits[1] * (lam2_at - alpha2) / (math.pi * mu * c_r2)
    report.extras["arccos_argument"] = X
    report.checks["mu_above_threshold"] = abs(X) < 1.0
    if abs(X) >= 1.0:
        return report  # below the amplitude threshold: no explicit zeros

    beta = math.acos(X)
    sig1 = float(sigma_fn(pair1, pair2, lam_star))
    sig2 = float(sigma_fn(pair2, pair1, lam_star))
    g1, g2 = pair1.gamma, pair2.gamma
    closed = []
    for up, up_sign in (("+", 1.0), ("-", -1.0)):
        for i in (1, 2):
            lam_sign = 1.0 if i == 1 else -1.0
            om = torus_wrap(
                np.array(
                    [
                        lam_sign * lam_star + up_sign * beta / r_harm,
                        up_sign * beta / r_harm,
                    ]
                )
            )
            sgn_i = (-1.0) ** (i + 1)
            J = np.array(
                [
                    [sgn_i * g1 * phi_limits[0] * sig1, -sgn_i * g1 * phi_limits[0] * sig1],
                    [
                        sgn_i * g2 * phi_limits[1] * sig2,
                        up_sign * (g2 / 2.0) * math.pi * mu * c_r2 * r_harm * math.sin(beta)
                        - sgn_i * g2 * phi_limits[1] * sig2,
                    ],
                ]
            )
            closed.append(
                {
                    "label": f"{up},{i}",
                    "omega": om.tolist(),
                    "jacobian": J.tolist(),
                    "classification": classify_dpm(J).value,
                }
            )
    report.closed_form_zeros = closed

    found = find_zeros(ev, grid_per_axis, 1e-11)
    report.zeros = [_zero_dict(z) for z in found]
    dists = _match_closed_to_found([np.array(c["omega"]) for c in closed], found)
    report.extras["closed_form_match_distances"] = dists
    report.checks["closed_forms_matched"] = max(dists) <= 1e-8

    # classification agreement between explicit and quadrature Jacobians
    agree = True
    for c in closed:
        z = min(found, key=lambda z: torus_distance(z.omega, np.array(c["omega"])))
        if z.classification.value != c["classification"]:
            agree = False
    report.checks["classification_agreement"] = agree

    # expected contraction/expansion pair per the sign analysis
    i_plus = 1 if phi_limits[0] > 0.0 else 2
    up_plus = "-" if c_r2 > 0.0 else "+"
    label_plus = f"{up_plus},{i_plus}"
    label_minus = f"{'+' if up_plus == '-' else '-'},{3 - i_plus}"
    by_label = {c["label"]: c for c in closed}
    report.extras["expected_dplus_label"] = label_plus
    report.extras["expected_dminus_label"] = label_minus
    report.checks["dplus_at_expected_zero"] = (
        by_label[label_plus]["classification"] == DpmClass.DPLUS.value
    )
    report.checks["dminus_at_expected_zero"] = (
        by_label[label_minus]["classification"] == DpmClass.DMINUS.value
    )

    # amplitude threshold scan for the empirical mu*
    if mu_grid is None:
        if mu_hat > 0.0:
            mu_grid = [mu_hat * f for f in (1.05, 1.25, 2.0)] + [2.0 * mu_hat + 1.0]
        else:
            mu_grid = [0.5, 1.0, 2.0]
    mu_star = None
    scan = []
    for m in sorted(mu_grid):
        Xm = 2.0 * n * phi_limits[1] * (lam2_at - alpha2) / (math.pi * m * c_r2)
        if abs(Xm) >= 1.0:
            scan.append({"mu": m, "status": "below-threshold"})
            mu_star = None
            continue
        bm = math.acos(Xm)
        main = (g2 / 2.0) * math.pi * m * c_r2 * r_harm * math.sin(bm)
        sgn_ip = (-1.0) ** (i_plus + 1)
        upv = -1.0 if up_plus == "-" else 1.0
        Jp = np.array(
            [
                [sgn_ip * g1 * phi_limits[0] * sig1, -sgn_ip * g1 * phi_limits[0] * sig1],
                [sgn_ip * g2 * phi_limits[1] * sig2, upv * main - sgn_ip * g2 * phi_limits[1] * sig2],
            ]
        )
        ok = classify_dpm(Jp) is DpmClass.DPLUS
        scan.append({"mu": m, "status": "dplus" if ok else "not-dplus"})
        if ok and mu_star is None:
            mu_star = m
        if not ok:
            mu_star = None
    report.extras["mu_scan"] = scan
    report.extras["mu_star"] = mu_star

    if run_pipeline:
        z_plus = min(
            found, key=lambda z: torus_distance(z.omega, np.array(by_label[label_plus]["omega"]))
        )
        z_minus = min(
            found, key=lambda z: torus_distance(z.omega, np.array(by_label[label_minus]["omega"]))
        )
        _run_pipeline(report, cfg, z_plus, st, "forward", ev, n_samples, n_iterates, seed)
        _run_pipeline(report, cfg, z_minus, st, "backward", ev, n_samples, n_iterates, seed + 1)
    return report


# ---------------------------------------------------------------------------
# Scenario 3: symmetric (harmonic) oscillators


def scenario_linear_symmetric(
    n: int = 1,
    forcing1: Optional[ForcingSignal] = None,
    forcing2: Optional[ForcingSignal] = None,
    phi_limits: tuple[float, float] = (math.pi / 8.0, math.pi / 8.0),
    st: IntegratorSettings = DEFAULT_SETTINGS,
    run_pipeline: bool = True,
    n_samples: int = 500,
    n_iterates: int = 200,
    grid_per_axis: int = 32,
    seed: int = 2024,
) -> ScenarioReport:
    """Explicit zeros for two harmonic oscillators with a silent first harmonic.

    Both stiffness pairs are ``(n^2, n^2)``.  The first forcing has no
    component at harmonic ``n`` (checked exactly and by quadrature); the
    second must have one, strong enough against the second coupling limit.
    The four explicit zeros, their Jacobians, the classification chain, and
    the full pipeline at the contracting/expanding pair are validated.
    """
    pair = FucikPair(float(n * n), float(n * n), n)
    forcing1 = forcing1 if forcing1 is not None else ForcingSignal.cosine(2 * n)
    forcing2 = forcing2 if forcing2 is not None else ForcingSignal.cosine(n)

    p1_hat = forcing1.complex_coeff(n)
    p1_hat_quad = _complex_coeff_quadrature(forcing1, n)
    if abs(p1_hat) > 1e-12 or abs(p1_hat_quad) > 1e-9:
        raise PreconditionError(
            f"first forcing has a resonant component: {abs(p1_hat):.3e}"
        )
    p2_hat = forcing2.complex_coeff(n)
    if phi_limits[0] == 0.0:
        raise PreconditionError("the first coupling limit must be nonzero")
    if not abs(phi_limits[1]) < (3.0 / 16.0) * abs(p2_hat):
        raise PreconditionError(
            "second coupling limit too large: "
            f"|phi2| = {abs(phi_limits[1]):.6g} >= 3/16 |p2_hat| = {3 / 16 * abs(p2_hat):.6g}"
        )

    cfg = SystemConfig(
        pair, pair, forcing1, forcing2,
        CouplingFunction(phi_limits[0]), CouplingFunction(phi_limits[1]),
    )
    ev = ResonanceEval(cfg)

    report = ScenarioReport(
        name="linear-symmetric",
        summary={
            "n": n,
            "phi_limits": list(phi_limits),
            "forcing1": {"constant": forcing1.constant, "harmonics": [list(h) for h in forcing1.harmonics]},
            "forcing2": {"constant": forcing2.constant, "harmonics": [list(h) for h in forcing2.harmonics]},
        },
    )
    report.checks["first_harmonic_silent"] = True

    # amplitude/phase extraction of the second response at frequency 1
    thetas = np.arange(512) * (TWO_PI / 512)
    vals = np.asarray(ev.phi(1, thetas))
    ac = float(np.sum(vals * np.cos(thetas)) * 2.0 / 512)
    bs = float(np.sum(vals * np.sin(thetas)) * 2.0 / 512)
    m_amp = math.hypot(ac, bs)  # |p2_hat| / sqrt(2 n)
    p2_abs_quad = m_amp * math.sqrt(2.0 * n)
    psi2 = math.atan2(bs, -ac) % TWO_PI
    report.extras["psi2"] = psi2
    report.extras["p2_hat_abs"] = abs(p2_hat)
    report.extras["p2_hat_abs_quadrature"] = p2_abs_quad
    report.checks["p2_hat_cross_check"] = abs(p2_abs_quad - abs(p2_hat)) <= 1e-9 * max(
        1.0, abs(p2_hat)
    )

    kappa = 2.0 * math.sqrt(2.0 / n)
    m = abs(p2_hat) / math.sqrt(2.0 * n)
    closed = []
    for up, up_sign in (("+", 1.0), ("-", -1.0)):
        for i in (1, 2):
            i_sign = (-1.0) ** i
            om = torus_wrap(
                np.array(
                    [
                        -psi2 + (math.pi / 2.0 if i == 1 else -math.pi / 2.0) + up_sign * math.pi / 2.0,
                        -psi2 + up_sign * math.pi / 2.0,
                    ]
                )
            )
            J = np.array(
                [
                    [i_sign * kappa * phi_limits[0], -i_sign * kappa * phi_limits[0]],
                    [i_sign * kappa * phi_limits[1], up_sign * m - i_sign * kappa * phi_limits[1]],
                ]
            )
            closed.append(
                {
                    "label": f"{up},{i}",
                    "omega": om.tolist(),
                    "jacobian": J.tolist(),
                    "classification": classify_dpm(J).value,
                }
            )
    report.closed_form_zeros = closed

    found = find_zeros(ev, grid_per_axis, 1e-11)
    report.zeros = [_zero_dict(z) for z in found]
    report.checks["exactly_four_zeros"] = len(found) == 4
    dists = _match_closed_to_found([np.array(c["omega"]) for c in closed], found)
    report.extras["closed_form_match_distances"] = dists
    report.checks["closed_forms_matched"] = max(dists) <= 1e-8

    agree = True
    for c in closed:
        z = min(found, key=lambda z: torus_distance(z.omega, np.array(c["omega"])))
        if z.classification.value != c["classification"]:
            agree = False
    report.checks["classification_agreement"] = agree

    # sign analysis: the contracting zero sits at the falling first slope
    i_plus = 1 if phi_limits[0] > 0.0 else 2
    label_plus = f"-,{i_plus}"
    label_minus = f"+,{3 - i_plus}"
    by_label = {c["label"]: c for c in closed}
    report.extras["expected_dplus_label"] = label_plus
    report.extras["expected_dminus_label"] = label_minus
    report.checks["dplus_at_expected_zero"] = (
        by_label[label_plus]["classification"] == DpmClass.DPLUS.value
    )
    report.checks["dminus_at_expected_zero"] = (
        by_label[label_minus]["classification"] == DpmClass.DMINUS.value
    )

    # strict cross bound at the chosen pair (the classification inequality)
    for lbl in (label_plus, label_minus):
        J = np.array(by_label[lbl]["jacobian"])
        lhs = abs(J[0, 1] * J[1, 1] + J[0, 0] * J[1, 0])
        rhs = 2.0 * J[0, 0] * J[1, 1]
        report.checks[f"cross_bound_strict_{lbl}"] = lhs < rhs

    if run_pipeline:
        z_plus = min(
            found, key=lambda z: torus_distance(z.omega, np.array(by_label[label_plus]["omega"]))
        )
        z_minus = min(
            found, key=lambda z: torus_distance(z.omega, np.array(by_label[label_minus]["omega"]))
        )
        _run_pipeline(report, cfg, z_plus, st, "forward", ev, n_samples, n_iterates, seed)
        _run_pipeline(report, cfg, z_minus, st, "backward", ev, n_samples, n_iterates, seed + 1)
    return report


SCENARIOS = {
    "small-coupling": scenario_small_coupling,
    "phi1-null": scenario_phi1_null,
    "linear-symmetric": scenario_linear_symmetric,
}
