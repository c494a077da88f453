"""Time-independent coupled-channel scattering at fixed total energy.

Solves -f'' + (diag(eps) + V(x)) f = E f across the coupling region by
fixed-step fourth-order integration of channel-basis solutions from both edges
toward the centre, then matches to plane waves (open channels) and decaying
exponentials (closed channels).  Integrating each half-range inward keeps the
closed-channel growth down to exp(kappa * range/2) per basis solution, and the
matching solve is column-equilibrated on top of that.

This module is the independent cross-check for the split-step evolution: its
flux-folded predictions must reproduce the wavepacket channel probabilities.
"""

from __future__ import annotations

import math
import warnings

import numpy as np

from .basis import BindingBasis, MirrorConfig, coupling_cutoff, potential_matrix
from .errors import ConditioningError, DomainError
from .evolution import WavepacketSpec

__all__ = ["ScatteringMatrix", "solve_smatrix", "wavepacket_prediction"]

_COND_LIMIT = 1e12


class ScatteringMatrix:
    """Energy-resolved transmission/reflection amplitudes between open channels.

    ``t[n, m]`` / ``r[n, m]`` are amplitudes into open channel ``n`` for a unit
    wave incident from the left in open channel ``m``; ``t_rev``/``r_rev`` hold
    the right-incidence data.  Flux probabilities carry the k_n/k_m velocity
    ratio; see flux_transmission / flux_reflection / s_flux.
    """

    def __init__(self, energy, thresholds, k_open, t, r, t_rev, r_rev):
        self.energy = float(energy)
        self.thresholds = tuple(thresholds)
        self.k_open = np.asarray(k_open)
        self.n_open = len(self.k_open)
        self.t = t
        self.r = r
        self.t_rev = t_rev
        self.r_rev = r_rev

    @property
    def open_channels(self) -> list[int]:
        return list(range(self.n_open))

    def flux_transmission(self) -> np.ndarray:
        ratio = self.k_open[:, None] / self.k_open[None, :]
        return np.abs(self.t) ** 2 * ratio

    def flux_reflection(self) -> np.ndarray:
        ratio = self.k_open[:, None] / self.k_open[None, :]
        return np.abs(self.r) ** 2 * ratio

    def unitarity_defect(self) -> float:
        """Worst-case deviation of summed outgoing flux from 1 per incidence."""
        totals = (self.flux_transmission() + self.flux_reflection()).sum(axis=0)
        ratio = self.k_open[:, None] / self.k_open[None, :]
        totals_rev = ((np.abs(self.t_rev) ** 2 + np.abs(self.r_rev) ** 2) * ratio).sum(axis=0)
        return float(max(np.abs(totals - 1.0).max(), np.abs(totals_rev - 1.0).max()))

    def s_flux(self) -> np.ndarray:
        """Full flux-normalized S-matrix over (left, right) open leads."""
        root = np.sqrt(self.k_open[:, None] / self.k_open[None, :])
        return np.block(
            [[self.r * root, self.t_rev * root], [self.t * root, self.r_rev * root]]
        )


def _rk4_sweep(mats, h, y0):
    """Integrate y' = (f', M f) over consecutive nodes; mats holds M at
    points x0, x0+h/2, x0+h, x0+3h/2, ... (2*n_steps + 1 entries)."""
    nch = mats.shape[1]
    y = y0
    n_steps = (len(mats) - 1) // 2

    def deriv(m, y):
        out = np.empty_like(y)
        out[:nch] = y[nch:]
        out[nch:] = m @ y[:nch]
        return out

    for i in range(n_steps):
        m0, m1, m2 = mats[2 * i], mats[2 * i + 1], mats[2 * i + 2]
        k1 = deriv(m0, y)
        k2 = deriv(m1, y + 0.5 * h * k1)
        k3 = deriv(m1, y + 0.5 * h * k2)
        k4 = deriv(m2, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return y


def solve_smatrix(
    energy: float,
    basis: BindingBasis,
    mirror: MirrorConfig,
    x_range: tuple[float, float] | None = None,
    n_steps: int | None = None,
) -> ScatteringMatrix:
    """Scattering matrix of the coupled system at total energy ``energy``.

    ``x_range`` defaults to the coupling cutoff interval; ``n_steps`` to a
    resolution of ~50 integration points per shortest local wavelength.
    """
    eps = np.array(basis.energies)
    if energy <= eps[0]:
        raise DomainError(f"energy {energy} is below the lowest threshold {eps[0]}")
    if x_range is None:
        a = coupling_cutoff(basis, mirror)
        x_range = (-a, a)
    lo, hi = x_range
    if not lo < 0.0 < hi:
        raise DomainError("x_range must straddle the mirror at x = 0")

    n_open = int(np.sum(energy > eps))
    k_open = np.sqrt(energy - eps[:n_open])
    kappa = np.sqrt(eps[n_open:] - energy)
    nch = basis.n_channels

    if n_steps is None:
        kscale = math.sqrt(
            max(
                energy - eps[0],
                float(eps[-1] - energy) if nch > n_open else 0.0,
                2.0 * mirror.total * math.sqrt(basis.omega / math.pi)
                if basis.kind == "harmonic"
                else 1.0,
            )
        )
        n_steps = max(1500, int(100.0 * (hi - lo) * kscale))
    n_half = (n_steps + 1) // 2

    def m_of(x):
        v = potential_matrix(basis, mirror, x)
        m = np.transpose(v, (2, 0, 1)).astype(complex)
        idx = np.arange(nch)
        m[:, idx, idx] += eps - energy
        return m

    # Left half: integrate from lo to 0.
    h_l = (0.0 - lo) / n_half
    mats_l = m_of(lo + 0.5 * h_l * np.arange(2 * n_half + 1))
    n_l = 2 * n_open + (nch - n_open)
    y_l = np.zeros((2 * nch, n_l), dtype=complex)
    for j in range(n_open):  # incident e^{+ik x} and outgoing-left e^{-ik x}
        amp = np.exp(1j * k_open[j] * lo)
        y_l[j, j], y_l[nch + j, j] = amp, 1j * k_open[j] * amp
        amp = np.exp(-1j * k_open[j] * lo)
        y_l[j, n_open + j], y_l[nch + j, n_open + j] = amp, -1j * k_open[j] * amp
    for j in range(nch - n_open):  # decaying toward -inf: e^{+kappa x}
        y_l[n_open + j, 2 * n_open + j] = 1.0
        y_l[nch + n_open + j, 2 * n_open + j] = kappa[j]
    sol_l = _rk4_sweep(mats_l, h_l, y_l)

    # Right half: integrate from hi down to 0.
    h_r = (0.0 - hi) / n_half
    mats_r = m_of(hi + 0.5 * h_r * np.arange(2 * n_half + 1))
    n_r = 2 * n_open + (nch - n_open)
    y_r = np.zeros((2 * nch, n_r), dtype=complex)
    for j in range(n_open):  # outgoing-right e^{+ik x} and incident-from-right e^{-ik x}
        amp = np.exp(1j * k_open[j] * hi)
        y_r[j, j], y_r[nch + j, j] = amp, 1j * k_open[j] * amp
        amp = np.exp(-1j * k_open[j] * hi)
        y_r[j, n_open + j], y_r[nch + j, n_open + j] = amp, -1j * k_open[j] * amp
    for j in range(nch - n_open):  # decaying toward +inf: e^{-kappa x}
        y_r[n_open + j, 2 * n_open + j] = 1.0
        y_r[nch + n_open + j, 2 * n_open + j] = -kappa[j]
    sol_r = _rk4_sweep(mats_r, h_r, y_r)

    # Match value and derivative at x = 0:
    #   inc + [out_L, closed_L] a = [out_R, closed_R] b   (left incidence)
    #   [out_L, closed_L] a' + inc_R = [out_R, closed_R] b'  (right incidence)
    inc_l = sol_l[:, :n_open]
    out_l = np.concatenate([sol_l[:, n_open : 2 * n_open], sol_l[:, 2 * n_open :]], axis=1)
    out_r = np.concatenate([sol_r[:, :n_open], sol_r[:, 2 * n_open :]], axis=1)
    inc_r = sol_r[:, n_open : 2 * n_open]

    a_mat = np.concatenate([out_l, -out_r], axis=1)
    b_mat = np.concatenate([-inc_l, inc_r], axis=1)
    scale = np.abs(a_mat).max(axis=0)
    scale[scale == 0.0] = 1.0
    a_scaled = a_mat / scale
    cond = np.linalg.cond(a_scaled)
    if not np.isfinite(cond) or cond > _COND_LIMIT:
        raise ConditioningError(
            f"matching system condition number {cond:.2e}; reduce x_range or channels"
        )
    coeffs = np.linalg.solve(a_scaled, b_mat) / scale[:, None]

    r = coeffs[:n_open, :n_open]
    t = coeffs[nch : nch + n_open, :n_open]
    t_rev = coeffs[:n_open, n_open:]
    r_rev = coeffs[nch : nch + n_open, n_open:]
    return ScatteringMatrix(energy, basis.energies, k_open, t, r, t_rev, r_rev)


def _momentum_segments(spec: WavepacketSpec, eps, n_nodes):
    """Gauss-Legendre nodes/weights, split at channel-opening momenta."""
    k_lo = max(spec.momentum - 6.0 / spec.sigma, 1e-3, 0.02 * spec.momentum)
    k_hi = spec.momentum + 6.0 / spec.sigma
    if k_hi <= k_lo:
        raise DomainError("momentum window is empty; packet moves the wrong way")
    cuts = [k_lo, k_hi]
    for e in eps[1:]:
        kc = e - eps[spec.channel]
        if kc > 0 and k_lo < math.sqrt(kc) < k_hi:
            cuts.append(math.sqrt(kc))
    cuts = sorted(cuts)
    nodes, weights = [], []
    for a, b in zip(cuts[:-1], cuts[1:]):
        n = max(6, int(round(n_nodes * (b - a) / (k_hi - k_lo))))
        u, w = np.polynomial.legendre.leggauss(n)
        nodes.append(0.5 * (b - a) * u + 0.5 * (a + b))
        weights.append(0.5 * (b - a) * w)
    return np.concatenate(nodes), np.concatenate(weights)


def wavepacket_prediction(
    spec: WavepacketSpec,
    basis: BindingBasis,
    mirror: MirrorConfig,
    n_nodes: int = 64,
    x_range: tuple[float, float] | None = None,
    n_steps: int | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Fold flux probabilities with the packet's momentum density.

    Predicts the asymptotic per-channel probabilities (p_left, p_right) that a
    time-dependent run starting from ``spec`` must reach once the packet has
    fully separated from the mirror.
    """
    eps = np.array(basis.energies)
    if spec.channel >= basis.n_channels:
        raise DomainError("incident channel outside basis")
    sigma_k = 1.0 / spec.sigma
    lo_support = spec.momentum - 6.0 * sigma_k
    if lo_support < 0.0:
        tail = 0.5 * math.erfc(spec.momentum / (math.sqrt(2.0) * sigma_k))
        if tail > 1e-6:
            raise DomainError(
                f"momentum distribution has weight {tail:.2e} below threshold"
            )
    nodes, weights = _momentum_segments(spec, eps, n_nodes)
    for e in eps[1:]:
        kc = e - eps[spec.channel]
        if kc > 0 and abs(math.sqrt(kc) - spec.momentum) < 4.0 * sigma_k:
            warnings.warn(
                "channel threshold inside the packet's momentum support; "
                "prediction degraded near thresholds",
                stacklevel=2,
            )
            break

    p_left = np.zeros(basis.n_channels)
    p_right = np.zeros(basis.n_channels)
    dens = spec.sigma / math.sqrt(2.0 * math.pi)
    for k, w in zip(nodes, weights):
        weight = w * dens * math.exp(-0.5 * spec.sigma**2 * (k - spec.momentum) ** 2)
        if weight < 1e-14:
            continue
        sm = solve_smatrix(k**2 + eps[spec.channel], basis, mirror, x_range, n_steps)
        m = spec.channel  # incident channel position among open channels
        tf = sm.flux_transmission()[:, m]
        rf = sm.flux_reflection()[:, m]
        p_right[: sm.n_open] += weight * tf
        p_left[: sm.n_open] += weight * rf
    return p_left, p_right
