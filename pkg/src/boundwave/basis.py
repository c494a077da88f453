"""Internal-mode eigenbasis of the binding potential and the channel coupling.

Two closed-form bases are supported: the harmonic binding potential (stiffness
``omega``, channel energies 2*omega*(n + 1/2)) and a hard-wall box of
half-width ``a`` (energies ((n+1)*pi/(2a))^2).  Projecting the delta mirrors
onto this basis turns them into a smooth coupling matrix

    V[n, m](x) = 2*v1*phi_n(-x)*phi_m(-x) + 2*v2*phi_n(x)*phi_m(x)

on the centre-of-mass axis, which is what every solver in the package
propagates or diagonalizes.  No delta function ever appears on a grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, DomainError, PrecisionError

__all__ = [
    "BindingBasis",
    "MirrorConfig",
    "eigenenergy",
    "eigenfunction",
    "effective_potential",
    "potential_matrix",
    "coupling_cutoff",
]

# Recurrence validated against arbitrary-precision evaluation up to this order.
_MAX_CHANNELS = 128


@dataclass(frozen=True)
class MirrorConfig:
    """Delta-mirror strengths felt by particle 1 and particle 2."""

    v1: float = 0.0
    v2: float = 0.0

    def __post_init__(self):
        for name, v in (("v1", self.v1), ("v2", self.v2)):
            if not (math.isfinite(v) and v >= 0.0):
                raise DomainError(f"mirror strength {name} must be finite and >= 0, got {v}")

    @property
    def symmetric(self) -> bool:
        return self.v1 == self.v2

    @property
    def total(self) -> float:
        return self.v1 + self.v2


@dataclass(frozen=True)
class BindingBasis:
    """Eigenbasis of the binding potential, truncated to ``n_channels`` modes.

    ``kind`` is "harmonic" (parameter ``omega`` > 0) or "hardwall"
    (parameter ``half_width`` > 0).  Instances are immutable; all evaluations
    are pure functions of the arguments.
    """

    kind: str
    n_channels: int
    omega: float = 0.0
    half_width: float = 0.0
    energies: tuple = field(init=False)

    def __post_init__(self):
        if self.kind not in ("harmonic", "hardwall"):
            raise DomainError(f"unknown basis kind {self.kind!r}")
        if not 1 <= self.n_channels <= _MAX_CHANNELS:
            raise DomainError(
                f"n_channels must be in [1, {_MAX_CHANNELS}], got {self.n_channels}"
            )
        if self.kind == "harmonic" and not (math.isfinite(self.omega) and self.omega > 0.0):
            raise DomainError(f"harmonic stiffness must be positive, got {self.omega}")
        if self.kind == "hardwall" and not (
            math.isfinite(self.half_width) and self.half_width > 0.0
        ):
            raise DomainError(f"hard-wall half-width must be positive, got {self.half_width}")
        ns = np.arange(self.n_channels)
        if self.kind == "harmonic":
            eps = 2.0 * self.omega * (ns + 0.5)
        else:
            eps = ((ns + 1) * np.pi / (2.0 * self.half_width)) ** 2
        object.__setattr__(self, "energies", tuple(float(e) for e in eps))

    @classmethod
    def harmonic(cls, omega: float, n_channels: int) -> "BindingBasis":
        return cls(kind="harmonic", n_channels=n_channels, omega=omega)

    @classmethod
    def hardwall(cls, half_width: float, n_channels: int) -> "BindingBasis":
        return cls(kind="hardwall", n_channels=n_channels, half_width=half_width)

    @property
    def analytic(self) -> bool:
        """Whether the eigenfunctions continue to complex argument (harmonic only)."""
        return self.kind == "harmonic"

    def energy(self, n: int) -> float:
        self._check_index(n)
        return self.energies[n]

    def eigenfunction(self, n: int, x):
        """Evaluate mode ``n`` at ``x`` (scalar or array, real or complex)."""
        self._check_index(n)
        return self.mode_table(x, n_max=n)[n]

    def mode_table(self, x, n_max: int | None = None) -> np.ndarray:
        """All modes 0..n_max evaluated at ``x``: shape (n_max+1,) + x.shape.

        Harmonic modes use the three-term recurrence on the orthonormal
        Hermite functions, which is stable and overflow-free at any order the
        basis admits; parity phi_n(-x) = (-1)^n phi_n(x) is exact in floating
        point.  Complex arguments are accepted for the harmonic basis only.
        """
        if n_max is None:
            n_max = self.n_channels - 1
        self._check_index(n_max)
        x = np.asarray(x)
        if np.iscomplexobj(x) and not self.analytic:
            raise DomainError("hard-wall eigenfunctions are not analytic in x")
        if self.kind == "harmonic":
            return self._hermite_table(x, n_max)
        return self._hardwall_table(x, n_max)

    def _hermite_table(self, x, n_max):
        xi = np.sqrt(self.omega) * x
        out = np.empty((n_max + 1,) + xi.shape, dtype=xi.dtype)
        out[0] = self.omega ** 0.25 * np.pi ** -0.25 * np.exp(-0.5 * xi * xi)
        if n_max >= 1:
            out[1] = math.sqrt(2.0) * xi * out[0]
        for n in range(1, n_max):
            out[n + 1] = (
                math.sqrt(2.0 / (n + 1)) * xi * out[n]
                - math.sqrt(n / (n + 1.0)) * out[n - 1]
            )
        if not np.isfinite(out).all():
            raise PrecisionError("Hermite recurrence overflowed; reduce n or |x|")
        return out

    def _hardwall_table(self, x, n_max):
        a = self.half_width
        out = np.zeros((n_max + 1,) + x.shape, dtype=float)
        inside = np.abs(x) <= a
        xin = x[inside] if x.shape else x
        for n in range(n_max + 1):
            arg = (n + 1) * np.pi * xin / (2.0 * a)
            val = (np.cos(arg) if n % 2 == 0 else np.sin(arg)) / math.sqrt(a)
            if x.shape:
                out[n][inside] = val
            elif inside:
                out[n] = val
        return out

    def _check_index(self, n: int):
        if not 0 <= n < self.n_channels:
            raise DomainError(f"channel index {n} out of range [0, {self.n_channels})")


def eigenenergy(basis: BindingBasis, n: int) -> float:
    """Channel energy eps_n of mode ``n``."""
    return basis.energy(n)


def eigenfunction(basis: BindingBasis, n: int, x):
    """Binding-potential eigenfunction phi_n evaluated at ``x``."""
    return basis.eigenfunction(n, x)


def effective_potential(
    basis: BindingBasis, mirror: MirrorConfig, n: int, m: int, x
):
    """Channel-coupling potential V[n, m](x) from projecting out the mirrors."""
    basis._check_index(n)
    basis._check_index(m)
    table = basis.mode_table(np.asarray(x), n_max=max(n, m))
    mirrored = basis.mode_table(-np.asarray(x), n_max=max(n, m))
    return 2.0 * mirror.v1 * mirrored[n] * mirrored[m] + 2.0 * mirror.v2 * table[n] * table[m]


def potential_matrix(
    basis: BindingBasis, mirror: MirrorConfig, x: np.ndarray, max_bytes: int = 2**31
) -> np.ndarray:
    """Dense tabulation V[n, m, j] of the coupling on a grid, symmetric in (n, m).

    For equal mirror strengths every entry with n + m odd vanishes exactly
    (parity selection rule); the tabulation preserves that exactly because the
    mode table is parity-exact.
    """
    x = np.asarray(x, dtype=complex if np.iscomplexobj(x) else float)
    nch = basis.n_channels
    itemsize = 16 if np.iscomplexobj(x) else 8
    if nch * nch * x.size * itemsize > max_bytes:
        raise CapacityError(
            f"potential table of {nch}x{nch}x{x.size} entries exceeds {max_bytes} bytes"
        )
    table = basis.mode_table(x)
    mirrored = basis.mode_table(-x)
    out = np.empty((nch, nch) + x.shape, dtype=table.dtype)
    for n in range(nch):
        for m in range(n + 1):
            v = 2.0 * mirror.v1 * mirrored[n] * mirrored[m] + 2.0 * mirror.v2 * table[n] * table[m]
            out[n, m] = v
            if m != n:
                out[m, n] = v
    return out


def coupling_cutoff(basis: BindingBasis, mirror: MirrorConfig, tol: float = 1e-12) -> float:
    """Distance beyond which every |V[n, m](x)| stays below ``tol``.

    Found numerically from the Gaussian-envelope decay of the mode table
    (hard-wall couplings vanish identically beyond the box, so the half-width
    is returned there).  Used as the default integration range of the
    stationary solver and as the mirror-region radius elsewhere.
    """
    if mirror.total == 0.0:
        return 1.0  # no coupling anywhere; any positive radius works
    if basis.kind == "hardwall":
        return basis.half_width
    scale = 1.0 / math.sqrt(basis.omega)

    def worst(x: float) -> float:
        tab = basis.mode_table(np.asarray(x))
        return 2.0 * mirror.total * float(np.max(tab * tab[:, None]))

    hi = scale
    while worst(hi) >= tol:
        hi += scale
        if hi > 1e4 * scale:  # pragma: no cover - envelope always wins
            raise PrecisionError("coupling envelope failed to decay")
    lo = max(hi - scale, 0.0)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if worst(mid) < tol:
            hi = mid
        else:
            lo = mid
    return hi
