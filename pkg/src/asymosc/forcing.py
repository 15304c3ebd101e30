"""Periodic forcing signals and bounded coupling nonlinearities.

Forcings are finite trigonometric series with period ``2*pi``, stored as
harmonic coefficient lists so that complex Fourier data can be read off
exactly.  Couplings come from a parametric family (a scaled smooth odd step,
optionally plus a compactly concentrated odd bump) whose limits at infinity
are stored as data rather than estimated numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError


@dataclass(frozen=True)
class ForcingSignal:
    """Finite cosine/sine series ``const + sum_k A_k cos(k t) + B_k sin(k t)``.

    ``harmonics`` is a tuple of ``(k, cos_coef, sin_coef)`` with positive
    integer harmonic numbers.
    """

    constant: float = 0.0
    harmonics: tuple[tuple[int, float, float], ...] = ()

    def __post_init__(self):
        seen = set()
        for k, _, _ in self.harmonics:
            if not (isinstance(k, int) and k >= 1):
                raise PreconditionError("harmonic numbers must be positive integers")
            if k in seen:
                raise PreconditionError(f"duplicate harmonic {k}")
            seen.add(k)

    @classmethod
    def cosine(cls, k: int, amplitude: float = 1.0) -> "ForcingSignal":
        return cls(0.0, ((k, float(amplitude), 0.0),))

    @classmethod
    def zero(cls) -> "ForcingSignal":
        return cls(0.0, ())

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.full_like(t, self.constant)
        for k, ac, bs in self.harmonics:
            out = out + ac * np.cos(k * t) + bs * np.sin(k * t)
        return out if out.ndim else float(out)

    def coefficient(self, k: int) -> tuple[float, float]:
        """(cos, sin) coefficients at harmonic ``k`` (0 when absent)."""
        for kk, ac, bs in self.harmonics:
            if kk == k:
                return ac, bs
        return 0.0, 0.0

    def complex_coeff(self, k: int) -> complex:
        """Integral of ``p(t) e^{i k t}`` over one period, from the coefficients."""
        if k == 0:
            return complex(2.0 * math.pi * self.constant)
        ac, bs = self.coefficient(k)
        return complex(math.pi * ac, math.pi * bs)

    @property
    def sup_bound(self) -> float:
        """Crude upper bound on ``sup |p|`` (sum of coefficient magnitudes)."""
        return abs(self.constant) + sum(
            math.hypot(ac, bs) for _, ac, bs in self.harmonics
        )


# Maximum of x*exp(-x^2), attained at x = 1/sqrt(2).
_BUMP_PEAK = math.exp(-0.5) / math.sqrt(2.0)


@dataclass(frozen=True)
class CouplingFunction:
    """Bounded locally-Lipschitz coupling with exact limits at infinity.

    ``tanh`` step scaled to ``limit_plus`` at ``+inf`` (and its negative at
    ``-inf``), plus an optional odd bump ``perturb_amp * x * exp(-x^2)`` that
    decays at infinity, so the stored limits are exact.
    """

    limit_plus: float
    perturb_amp: float = 0.0

    @property
    def family(self) -> str:
        return "odd-step" if self.perturb_amp == 0.0 else "odd-step+bump"

    @property
    def limit_minus(self) -> float:
        return -self.limit_plus

    @property
    def sup_bound(self) -> float:
        """Recorded bound on ``sup |phi|``."""
        return abs(self.limit_plus) + abs(self.perturb_amp) * _BUMP_PEAK

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        val = self.limit_plus * np.tanh(x)
        if self.perturb_amp != 0.0:
            val = val + self.perturb_amp * x * np.exp(-(x**2))
        return val if val.ndim else float(val)

    def scaled(self, factor: float) -> "CouplingFunction":
        """Same shape with both the limit and the bump scaled by ``factor``."""
        return CouplingFunction(self.limit_plus * factor, self.perturb_amp * factor)
