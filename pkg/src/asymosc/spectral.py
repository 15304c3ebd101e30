"""Sign-structured 2x2 matrices and the contraction cone of their identity perturbations.

A matrix ``A`` with both diagonal entries negative (resp. positive) and
``|a12 a22 + a11 a21| < 2 a11 a22`` drives contraction (resp. expansion) of
the perturbed identity ``B_eps = I + diag(eps) A`` for ``eps`` in a cone
around the direction ``eps2/eps1 = a11/a22``.  This module classifies such
matrices, evaluates the exact 2-norm of ``B_eps``, derives the contraction
rate ``a0``, searches for certified cone parameters, and verifies the norm
bound ``|B_eps|_2 <= 1 - a0 |eps| / 2`` by sampling.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError, SearchError


class DpmClass(enum.Enum):
    """Diagonal-sign classification of a 2x2 matrix."""

    DPLUS = "DPlus"
    DMINUS = "DMinus"
    NEITHER = "Neither"


def _as_matrix(A) -> np.ndarray:
    M = np.asarray(A, dtype=float)
    if M.shape != (2, 2):
        raise PreconditionError("expected a 2x2 matrix")
    if not np.all(np.isfinite(M)):
        raise PreconditionError("matrix entries must be finite")
    return M


def classify_dpm(A) -> DpmClass:
    """Classify ``A`` by strict diagonal signs and the off-diagonal bound."""
    M = _as_matrix(A)
    a11, a12 = M[0]
    a21, a22 = M[1]
    cross_ok = abs(a12 * a22 + a11 * a21) < 2.0 * a11 * a22
    if a11 < 0.0 and a22 < 0.0 and cross_ok:
        return DpmClass.DPLUS
    if a11 > 0.0 and a22 > 0.0 and cross_ok:
        return DpmClass.DMINUS
    return DpmClass.NEITHER


def b_epsilon(A, eps) -> np.ndarray:
    """Perturbed identity ``[[1 + e1 a11, e1 a12], [e2 a21, 1 + e2 a22]]``."""
    M = _as_matrix(A)
    e1, e2 = float(eps[0]), float(eps[1])
    if e1 <= 0.0 or e2 <= 0.0:
        raise PreconditionError("perturbation parameters must be positive")
    return np.array(
        [
            [1.0 + e1 * M[0, 0], e1 * M[0, 1]],
            [e2 * M[1, 0], 1.0 + e2 * M[1, 1]],
        ]
    )


def spectral_norm(B) -> float:
    """Largest singular value of a 2x2 matrix, in closed form.

    Computed from the eigenvalues of ``B^T B``; the discriminant is clamped
    at zero so near-scalar matrices cannot produce a negative root argument
    through roundoff.
    """
    M = _as_matrix(B)
    C = M.T @ M
    tr = C[0, 0] + C[1, 1]
    det = C[0, 0] * C[1, 1] - C[0, 1] * C[1, 0]
    disc = max(tr * tr - 4.0 * det, 0.0)
    return math.sqrt((tr + math.sqrt(disc)) / 2.0)


def a0_of(A) -> float:
    """Contraction rate of a negative-diagonal matrix.

    One quarter of ``(2 a11 a22 - |a12 a22 + a11 a21|) / (a11^2 + a22^2)``,
    the decay of the leading singular value of ``B_eps`` along the central
    cone direction.
    """
    M = _as_matrix(A)
    if classify_dpm(M) is not DpmClass.DPLUS:
        raise PreconditionError("contraction rate is defined for the negative-diagonal class")
    a11, a12 = M[0]
    a21, a22 = M[1]
    return (2.0 * a11 * a22 - abs(a12 * a22 + a11 * a21)) / (4.0 * (a11**2 + a22**2))


def _g_direction(A, e1, e2):
    """First-order growth rate of ``|B_eps|_2`` along direction ``(e1, e2)``."""
    a11, a12 = A[0]
    a21, a22 = A[1]
    d2 = (a11 * e1 - a22 * e2) ** 2 + (a12 * e1 + a21 * e2) ** 2
    return a11 * e1 + a22 * e2 + np.sqrt(d2)


@dataclass(frozen=True)
class ConeParams:
    """Certified cone: radius ``eps0``, ratio half-width ``eta``, rate ``a0``.

    The cone collects ``eps`` in the positive quadrant with
    ``a11/a22 - eta <= eps2/eps1 <= a11/a22 + eta`` and ``|eps| <= eps0``.
    """

    a0: float
    eps0: float
    eta: float


@dataclass(frozen=True)
class ContractionReport:
    """Outcome of sampling the norm bound over the cone."""

    samples: int
    violations: int
    worst_margin: float


def _cone_samples(A, norms, ratios):
    """Grid of cone points as arrays (e1, e2) for given norms and ratio offsets."""
    slope = A[0, 0] / A[1, 1]
    q = slope + ratios  # eps2/eps1
    nr, nq = np.meshgrid(norms, q, indexing="ij")
    e1 = nr / np.sqrt(1.0 + nq**2)
    e2 = nq * e1
    return e1.ravel(), e2.ravel()


def find_cone_params(A, safety: float = 0.5) -> ConeParams:
    """Search for cone parameters certifying the contraction bound.

    The ratio half-width starts at half the central slope and is halved until
    the first-order rate stays below ``-2 a0`` on the unit arc of the cone;
    the radius starts at ``1/a0`` and is halved until the sampled norm bound
    holds with relative slack at least ``safety``.  Failure after 60 halvings
    signals a nearly degenerate input matrix.
    """
    M = _as_matrix(A)
    if classify_dpm(M) is not DpmClass.DPLUS:
        raise PreconditionError("cone search requires the negative-diagonal class")
    if not 0.0 < safety < 1.0:
        raise PreconditionError("safety must lie in (0, 1)")
    a0 = a0_of(M)
    slope = M[0, 0] / M[1, 1]

    eta = slope / 2.0
    for _ in range(60):
        q = slope + np.linspace(-eta, eta, 1001)
        e1 = 1.0 / np.sqrt(1.0 + q**2)
        e2 = q * e1
        g = _g_direction(M, e1, e2)
        # margin check: strict headroom, not bare inequality
        if np.max(g) <= -2.0 * a0 * 1.01:
            break
        eta /= 2.0
    else:
        raise SearchError("no ratio width achieves the first-order contraction rate")

    eps0 = 1.0 / a0
    norms_unit = np.linspace(1.0 / 128.0, 1.0, 128)
    ratios = np.linspace(-eta, eta, 128)
    for _ in range(60):
        e1, e2 = _cone_samples(M, eps0 * norms_unit, ratios)
        ok = True
        for x1, x2 in zip(e1, e2):
            nrm = math.hypot(x1, x2)
            bound = 1.0 - 0.5 * a0 * nrm
            slack = bound - spectral_norm(b_epsilon(M, (x1, x2)))
            if slack < safety * 0.5 * a0 * nrm:
                ok = False
                break
        if ok:
            return ConeParams(a0=a0, eps0=eps0, eta=eta)
        eps0 /= 2.0
    raise SearchError("no cone radius achieves the norm bound with the requested slack")


def verify_contraction(A, cp: ConeParams, samples: int, seed: int = 0) -> ContractionReport:
    """Sample the cone uniformly and count violations of the norm bound.

    The margin of a sample is ``1 - a0 |eps| / 2 - |B_eps|_2``; the report
    carries the worst (smallest) margin seen.
    """
    M = _as_matrix(A)
    if classify_dpm(M) is not DpmClass.DPLUS:
        raise PreconditionError("verification requires the negative-diagonal class")
    rng = np.random.default_rng(seed)
    slope = M[0, 0] / M[1, 1]
    q = slope + rng.uniform(-cp.eta, cp.eta, size=samples)
    nrm = rng.uniform(0.0, cp.eps0, size=samples)
    nrm = np.maximum(nrm, 1e-12 * cp.eps0)  # stay inside the open quadrant
    e1 = nrm / np.sqrt(1.0 + q**2)
    e2 = q * e1
    violations = 0
    worst = math.inf
    for x1, x2, r in zip(e1, e2, nrm):
        margin = 1.0 - 0.5 * cp.a0 * r - spectral_norm(b_epsilon(M, (x1, x2)))
        if margin < 0.0:
            violations += 1
        worst = min(worst, margin)
    return ContractionReport(samples=samples, violations=violations, worst_margin=worst)
