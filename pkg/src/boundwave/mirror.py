"""Analytic scattering of a single unit-mass particle off one delta mirror.

Conventions: hbar = 1, kinetic term p^2/2, mirror potential strength * delta(x),
so the wavefunction derivative jumps by 2 * strength * psi(0) at the mirror.
Serves as the rigid-molecule limit oracle for the coupled-channel solvers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

__all__ = ["MirrorAmplitudes", "transmission_reflection", "pole_wavenumber"]


@dataclass(frozen=True)
class MirrorAmplitudes:
    """Plane-wave transmission/reflection amplitudes at one delta mirror."""

    k: float
    strength: float
    transmission: complex
    reflection: complex

    @property
    def transmitted_probability(self) -> float:
        return abs(self.transmission) ** 2

    @property
    def reflected_probability(self) -> float:
        return abs(self.reflection) ** 2


def transmission_reflection(k: float, strength: float) -> MirrorAmplitudes:
    """Amplitudes for a plane wave of wavenumber ``k`` hitting the mirror.

    t = k / (k + i*strength), r = -i*strength / (k + i*strength); these satisfy
    1 + r = t (continuity) and |t|^2 + |r|^2 = 1 exactly for real k > 0.
    A vanishing strength returns the exact free result (t, r) = (1, 0).
    """
    if not (math.isfinite(k) and k > 0.0):
        raise DomainError(f"wavenumber must be finite and positive, got {k}")
    if not math.isfinite(strength):
        raise DomainError(f"mirror strength must be finite, got {strength}")
    if strength == 0.0:
        return MirrorAmplitudes(k, strength, 1.0 + 0.0j, 0.0j)
    denom = k + 1j * strength
    return MirrorAmplitudes(k, strength, k / denom, -1j * strength / denom)


def pole_wavenumber(strength: float) -> complex:
    """Complex wavenumber of the mirror's S-matrix pole, k = -i*strength.

    A positive strength places the pole in the lower half plane (resonance),
    a negative one in the upper half plane (bound state).  The pole is purely
    imaginary, so a wavepacket centred at real momentum never sits on it.
    """
    if not math.isfinite(strength):
        raise DomainError(f"mirror strength must be finite, got {strength}")
    if strength == 0.0:
        raise DomainError("free particle has no S-matrix pole")
    return complex(0.0, -strength)
