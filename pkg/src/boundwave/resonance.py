"""Resonance search by complex scaling of the centre-of-mass coordinate.

Rotating x -> exp(i*theta) x turns the coupled-channel Hamiltonian into the
non-Hermitian matrix

    H(theta) = exp(-2i*theta) p^2 + diag(eps) + V(exp(i*theta) x),

whose continuum eigenvalues swing into the lower half plane along rays of
angle -2*theta anchored at the channel thresholds, while resonances stay put:
they are isolated eigenvalues locally independent of theta.  The harmonic
eigenfunctions are entire, so the coupling continues analytically as long as
the rotated Gaussian envelope still decays, which bounds theta below pi/4.

Discretization is a Dirichlet box with a second-order Laplacian; candidates
are screened by matching eigenvalues across a theta sweep and keeping those
that barely move.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .basis import BindingBasis, MirrorConfig, potential_matrix
from .errors import CapacityError, DomainError

__all__ = [
    "ScaledHamiltonian",
    "ResonanceCandidate",
    "build_scaled_hamiltonian",
    "complex_spectrum",
    "classify_continuum",
    "find_resonances",
    "lifetime",
]

_DEFAULT_MAX_DIM = 4096


@dataclass(frozen=True)
class ScaledHamiltonian:
    """Dense complex-scaled Hamiltonian on a Dirichlet box."""

    theta: float
    box_length: float
    n_points: int
    thresholds: tuple
    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class ResonanceCandidate:
    """A theta-stable complex eigenvalue with its lifetime."""

    e_res: complex
    tau: float
    theta_window: tuple[float, float]
    stability: float
    threshold_below: float
    ambiguous: bool = False


def _check_theta(theta: float):
    if not (0.0 <= theta < math.pi / 4.0):
        raise DomainError(
            f"rotation angle must satisfy 0 <= theta < pi/4 "
            f"(rotated Gaussian envelope must decay), got {theta}"
        )


def build_scaled_hamiltonian(
    basis: BindingBasis,
    mirror: MirrorConfig,
    theta: float,
    box_length: float,
    n_points: int,
) -> ScaledHamiltonian:
    """Assemble H(theta) on ``n_points`` interior points of a Dirichlet box."""
    _check_theta(theta)
    if not basis.analytic:
        raise DomainError("complex scaling requires an entire basis (harmonic only)")
    if n_points < 100:
        raise DomainError(f"need at least 100 box points, got {n_points}")
    if box_length <= 0.0:
        raise DomainError("box length must be positive")
    nch = basis.n_channels
    dim = nch * n_points
    h = box_length / (n_points + 1)
    x = -0.5 * box_length + h * np.arange(1, n_points + 1)

    rot = np.exp(1j * theta)
    vtab = potential_matrix(basis, mirror, rot * x if theta else x)

    kin = (np.exp(-2j * theta) / h**2) * (
        2.0 * np.eye(n_points) - np.eye(n_points, k=1) - np.eye(n_points, k=-1)
    )
    ham = np.zeros((dim, dim), dtype=complex)
    diag = np.arange(n_points)
    for n in range(nch):
        block = slice(n * n_points, (n + 1) * n_points)
        ham[block, block] = kin
        ham[block, block][diag, diag] += basis.energies[n]
        for m in range(nch):
            ham[n * n_points : (n + 1) * n_points, m * n_points : (m + 1) * n_points][
                diag, diag
            ] += vtab[n, m]
    return ScaledHamiltonian(
        theta=theta,
        box_length=box_length,
        n_points=n_points,
        thresholds=basis.energies,
        matrix=ham,
    )


def complex_spectrum(ham: ScaledHamiltonian, max_dim: int = _DEFAULT_MAX_DIM) -> np.ndarray:
    """Full spectrum of the scaled Hamiltonian via a dense general eigensolve."""
    if ham.dim > max_dim:
        raise CapacityError(
            f"matrix dimension {ham.dim} exceeds the eigensolve budget {max_dim}; "
            "reduce n_points or channels"
        )
    return scipy.linalg.eigvals(ham.matrix)


def classify_continuum(
    eigs: np.ndarray, thresholds, theta: float, tol: float = 0.05
) -> np.ndarray:
    """Boolean mask marking eigenvalues on a rotated-continuum ray.

    An eigenvalue belongs to the continuum of threshold eps_n if its argument
    relative to that threshold is within ``tol`` of -2*theta (and it lies above
    the threshold).  Whatever is left over is a resonance candidate.
    """
    eigs = np.asarray(eigs)
    mask = np.zeros(eigs.shape, dtype=bool)
    for eps in thresholds:
        rel = eigs - eps
        with np.errstate(invalid="ignore"):
            dev = np.abs(np.angle(rel) + 2.0 * theta)
        mask |= (rel.real > 0.0) & (dev < tol)
    return mask


def lifetime(e_res: complex) -> float:
    """tau = -1 / (2 Im E) for a decaying resonance energy."""
    if not e_res.imag < 0.0:
        raise DomainError(f"resonance energy must have Im E < 0, got {e_res}")
    return -1.0 / (2.0 * e_res.imag)


def find_resonances(
    basis: BindingBasis,
    mirror: MirrorConfig,
    thetas,
    box_length: float,
    n_points: int,
    stability_tol: float = 0.005,
    angular_tol: float = 0.05,
    pairing_factor: float = 10.0,
    max_dim: int = _DEFAULT_MAX_DIM,
) -> list[ResonanceCandidate]:
    """Theta-stable eigenvalues of the scaled Hamiltonian, with lifetimes.

    Candidates surviving continuum classification at each angle are chained
    across the sweep by nearest-neighbour pairing (radius = pairing_factor *
    stability_tol); a chain whose total spread stays below ``stability_tol``
    and whose imaginary part is negative becomes a resonance.  Chains with a
    second neighbour inside the pairing radius are flagged ambiguous rather
    than silently resolved.  An empty list is a valid outcome.
    """
    thetas = sorted(float(t) for t in thetas)
    if len(thetas) < 2:
        raise DomainError("need at least two rotation angles for a stability check")
    for t in thetas:
        _check_theta(t)

    candidate_sets = []
    for t in thetas:
        ham = build_scaled_hamiltonian(basis, mirror, t, box_length, n_points)
        eigs = complex_spectrum(ham, max_dim=max_dim)
        keep = eigs[~classify_continuum(eigs, basis.energies, t, tol=angular_tol)]
        candidate_sets.append(keep)

    radius = pairing_factor * stability_tol
    results = []
    for e0 in candidate_sets[0]:
        chain = [e0]
        ambiguous = False
        alive = True
        for later in candidate_sets[1:]:
            if len(later) == 0:
                alive = False
                break
            dist = np.abs(later - chain[-1])
            order = np.argsort(dist)
            if dist[order[0]] > radius:
                alive = False
                break
            if len(order) > 1 and dist[order[1]] <= radius:
                ambiguous = True
            chain.append(later[order[0]])
        if not alive:
            continue
        chain = np.array(chain)
        spread = float(np.abs(chain[:, None] - chain[None, :]).max())
        if spread >= stability_tol:
            continue
        e_mean = complex(chain.mean())
        if e_mean.imag >= 0.0:
            continue
        below = [e for e in basis.energies if e <= e_mean.real]
        results.append(
            ResonanceCandidate(
                e_res=e_mean,
                tau=lifetime(e_mean),
                theta_window=(thetas[0], thetas[-1]),
                stability=spread,
                threshold_below=max(below) if below else basis.energies[0],
                ambiguous=ambiguous,
            )
        )
    results.sort(key=lambda c: abs(c.e_res.imag))
    return results
