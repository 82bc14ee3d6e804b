"""Boson-number correlation functions and case classifications.

Zero-delay correlations g^(k)(0) = <z'^k z^k> / <z'z>^k are evaluated for
the bare modes a, b and the balanced hybrid modes c, d.  Hybrid-mode
moments are always computed by expanding the mode operator in a and b
first, so only annihilation products act on the truncated space and no
cutoff-boundary commutations occur.

Delay-time curves g^(2)(tau) follow from the quantum regression theorem:
the operator-dressed steady state z rho z' is propagated under the same
Liouvillian and its occupation read out along the grid.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .errors import (ClassificationError, InsufficientDataError,
                     UndefinedCorrelationError)
from .hilbert import QOperator, TruncationConfig
from .lindblad import DensityMatrix, Liouvillian, _propagate
from .model import ModeSelector, SystemParams, hybrid_mode_operator, tau_to_us

#: Mean occupations at or below this make g^(k) undefined (0/0 guard).
OCCUPANCY_FLOOR = 1e-12
#: |g2 - 1| within this band is reported as Poissonian / boundary.
POISSONIAN_BAND = 1e-2
#: Bunching comparisons must exceed this absolute band to count.
UNBUNCHED_BAND = 1e-3

ModeLike = Union[ModeSelector, str, QOperator]


@dataclass(frozen=True)
class CorrelationPoint:
    """One zero-delay correlation value with its mean occupation."""

    mode: str
    order: int
    value: float
    mean_occupation: float


@dataclass(frozen=True)
class G2TauCurve:
    """Delay-time second-order correlation sampled on a grid.

    ``tau_unit`` is 'inv_gamma' (units of 1/gamma) or 'us' (microseconds,
    using gamma = 10 pi rad/us).
    """

    mode: str
    tau_grid: np.ndarray
    values: np.ndarray
    tau_unit: str = "inv_gamma"

    def __post_init__(self):
        object.__setattr__(self, "tau_grid", np.asarray(self.tau_grid, dtype=float))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))

    @property
    def zero_delay(self) -> float:
        return float(self.values[0])


@dataclass(frozen=True)
class StatisticsCase:
    """Sign-pattern classification of (g2_a, g2_b, g2_c).

    ``case`` is the 1..8 pattern number, or None when some value sits
    exactly at the Poissonian point.  ``boundary`` flags any value inside
    the Poissonian band; the strict signs are always recorded.
    """

    case: Optional[int]
    signs: tuple[int, int, int]
    boundary: bool


@dataclass(frozen=True)
class G234Signature:
    """Signs of log g^(k)(0) for k = 2, 3, 4 with per-order boundary flags."""

    signs: tuple[int, int, int]
    boundary: tuple[bool, bool, bool]
    values: tuple[float, float, float]


@dataclass(frozen=True)
class DynamicsLabel:
    """Joint single-time / two-time classification of a g2(tau) curve.

    ``case`` is 'I'..'IV' when both the statistics (sub/super) and the
    bunching comparison are strict, otherwise None (Poissonian statistics
    or an unbunched curve).
    """

    case: Optional[str]
    statistics: str  # 'sub' | 'super' | 'poissonian'
    bunching: str    # 'antibunched' | 'bunched' | 'unbunched'


@dataclass(frozen=True)
class CaseLabel:
    """Bundle of the classifications attached to one operating point."""

    statistics_case: Optional[StatisticsCase] = None
    dynamics_case: Optional[DynamicsLabel] = None
    g234: Optional[tuple[int, int, int]] = None


_SIGN_TO_CASE = {
    (-1, -1, -1): 1, (-1, -1, +1): 2, (-1, +1, -1): 3, (+1, -1, -1): 4,
    (-1, +1, +1): 5, (+1, -1, +1): 6, (+1, +1, -1): 7, (+1, +1, +1): 8,
}


def _resolve_mode(mode: ModeLike, dims: tuple[int, ...]) -> tuple[str, QOperator]:
    if isinstance(mode, QOperator):
        return "custom", mode
    sel = ModeSelector(mode)
    cfg = TruncationConfig(n_a_max=dims[0] - 1, n_b_max=dims[1] - 1)
    return sel.value, hybrid_mode_operator(sel, cfg)


def g_k_zero(rho: DensityMatrix, mode: ModeLike, k: int = 2) -> CorrelationPoint:
    """k-th order zero-delay intensity correlation of the selected mode.

    Raises :class:`UndefinedCorrelationError` when the mean occupation is
    at or below the occupancy floor.
    """
    if k < 2:
        raise ValueError(f"correlation order must be >= 2, got {k}")
    name, op = _resolve_mode(mode, rho.dims)
    z = op.matrix
    n_mean = float(np.einsum("ij,ji->", rho.matrix, z.conj().T @ z).real)
    if n_mean <= OCCUPANCY_FLOOR:
        raise UndefinedCorrelationError(
            f"mode {name}: mean occupation {n_mean:.3e} is at or below the floor "
            f"{OCCUPANCY_FLOOR:.0e}; g^({k})(0) is undefined")
    zk = np.linalg.matrix_power(z, k)
    if not zk.any():
        raise UndefinedCorrelationError(
            f"mode {name}: the k={k} moment is identically zero at this truncation; "
            "raise the Fock cutoffs to represent it")
    num = float(np.einsum("ij,ji->", rho.matrix, zk.conj().T @ zk).real)
    return CorrelationPoint(name, k, num / n_mean**k, n_mean)


def g2_tau(rho_ss: DensityMatrix, L: Liouvillian, mode: ModeLike,
           tau_grid: Sequence[float], tau_unit: str = "inv_gamma") -> G2TauCurve:
    """Delay-time g^(2)(tau) via the quantum regression theorem.

    ``rho_ss`` must be the steady state of ``L``.  The grid must start at
    tau = 0 so the zero-delay consistency invariant is meaningful.
    """
    tau_grid = np.asarray(tau_grid, dtype=float)
    if tau_grid.size == 0 or tau_grid[0] != 0.0:
        raise InsufficientDataError("tau_grid must start at 0")
    if tau_unit not in ("inv_gamma", "us"):
        raise ValueError(f"unknown tau_unit {tau_unit!r}")
    name, op = _resolve_mode(mode, rho_ss.dims)
    z = op.matrix
    n_op = z.conj().T @ z
    n_mean = float(np.einsum("ij,ji->", rho_ss.matrix, n_op).real)
    if n_mean <= OCCUPANCY_FLOOR:
        raise UndefinedCorrelationError(
            f"mode {name}: mean occupation {n_mean:.3e} is at or below the floor")
    dressed = z @ rho_ss.matrix @ z.conj().T
    weight = float(np.trace(dressed).real)  # equals n_mean
    grid_internal = tau_grid if tau_unit == "inv_gamma" else tau_grid * (1.0 / tau_to_us(1.0))
    mats = _propagate(dressed / weight, L, grid_internal)
    values = np.array([float(np.einsum("ij,ji->", m, n_op).real) for m in mats])
    values *= weight / n_mean**2
    return G2TauCurve(name, tau_grid, values, tau_unit)


def classify_statistics(g2_a: float, g2_b: float, g2_c: float) -> StatisticsCase:
    """Map the (a, b, c) sign triple onto the eight blockade/tunnelling cases."""
    vals = (g2_a, g2_b, g2_c)
    if not all(np.isfinite(v) for v in vals):
        raise ClassificationError(f"cannot classify non-finite values {vals}")
    signs = tuple(int(np.sign(v - 1.0)) for v in vals)
    boundary = any(abs(v - 1.0) <= POISSONIAN_BAND for v in vals)
    return StatisticsCase(_SIGN_TO_CASE.get(signs), signs, boundary)


def classify_dynamics(curve: G2TauCurve, p: SystemParams,
                      tau_window: Optional[float] = None) -> DynamicsLabel:
    """Classify a g2(tau) curve into a blockade/tunnelling dynamics case.

    The comparison window is tau_w = 1/max(kappa_a, kappa_b, gamma) unless
    overridden.  Within (0, tau_w] the curve's dominant deviation from
    g2(0) decides between antibunched (upward) and bunched (downward);
    deviations within the unbunched band on both sides give 'unbunched'.
    Cases I..IV require strict sub/super statistics as well.
    """
    tau_w = tau_window if tau_window is not None else 1.0 / p.kappa_max
    if curve.tau_unit == "us":
        tau_w = tau_to_us(tau_w)
    taus, vals = curve.tau_grid, curve.values
    if taus[-1] < tau_w * (1.0 - 1e-9):
        raise InsufficientDataError(
            f"curve covers tau <= {taus[-1]:.4g} but the window is {tau_w:.4g}")
    in_window = (taus > 0.0) & (taus <= tau_w * (1.0 + 1e-9))
    if np.count_nonzero(in_window) < 4:
        raise InsufficientDataError("fewer than 4 samples inside the bunching window")
    g2_0 = float(vals[0])
    windowed = vals[in_window]
    dev_up = float(windowed.max() - g2_0)
    dev_dn = float(g2_0 - windowed.min())
    if dev_up <= UNBUNCHED_BAND and dev_dn <= UNBUNCHED_BAND:
        bunching = "unbunched"
    elif dev_up > dev_dn:
        bunching = "antibunched"
    elif dev_dn > dev_up:
        bunching = "bunched"
    else:
        bunching = "unbunched"
    if abs(g2_0 - 1.0) <= POISSONIAN_BAND:
        statistics = "poissonian"
    else:
        statistics = "sub" if g2_0 < 1.0 else "super"
    case = {
        ("sub", "antibunched"): "I",
        ("super", "bunched"): "II",
        ("super", "antibunched"): "III",
        ("sub", "bunched"): "IV",
    }.get((statistics, bunching))
    return DynamicsLabel(case, statistics, bunching)


def g234_signature(rho: DensityMatrix, mode: ModeLike) -> G234Signature:
    """Signs of log g^(k)(0) for k = 2, 3, 4 for one mode."""
    points = [g_k_zero(rho, mode, k) for k in (2, 3, 4)]
    values = tuple(pt.value for pt in points)
    signs = tuple(int(np.sign(v - 1.0)) for v in values)
    boundary = tuple(abs(v - 1.0) <= POISSONIAN_BAND for v in values)
    return G234Signature(signs, boundary, values)


def hybrid_moments_from_local(rho: DensityMatrix) -> tuple[float, float]:
    """Hybrid-mode moments <c'c> and <c'^2 c^2> from photon/phonon moments.

    Evaluates the detection identities that reconstruct the hybrid-mode
    occupation from four local moments and the two-boson moment from nine,
    using f_kl = a'^k a^l and g_mn = b'^m b^n.  Both identities are exact.
    """
    cfg = TruncationConfig(n_a_max=rho.dims[0] - 1, n_b_max=rho.dims[1] - 1)
    a = hybrid_mode_operator(ModeSelector.A, cfg).matrix
    b = hybrid_mode_operator(ModeSelector.B, cfg).matrix
    ad, bd = a.conj().T, b.conj().T

    def ev(mat: np.ndarray) -> complex:
        return complex(np.einsum("ij,ji->", rho.matrix, mat))

    f11, g11 = ad @ a, bd @ b
    first = 0.5 * (ev(f11) + ev(g11) + ev(a @ bd) + ev(ad @ b))
    f22 = ad @ ad @ a @ a
    g22 = bd @ bd @ b @ b
    second = 0.25 * (
        ev(f22)
        + 4.0 * ev(f11 @ g11)
        + ev(g22)
        + 2.0 * ev(a @ (bd @ bd @ b))
        + 2.0 * ev(ad @ (bd @ b @ b))
        + ev(ad @ ad @ (b @ b))
        + ev(a @ a @ (bd @ bd))
        + 2.0 * ev((ad @ ad @ a) @ b)
        + 2.0 * ev((ad @ a @ a) @ bd)
    )
    return float(first.real), float(second.real)


def dominant_period(tau: Sequence[float], values: Sequence[float],
                    min_cycles: float = 4.0) -> float:
    """Dominant oscillation period of a sampled curve.

    Removes a cubic trend, applies a Hann window, and locates the largest
    spectral line of the zero-padded FFT (with parabolic interpolation),
    ignoring frequencies slower than ``min_cycles`` full cycles per window.
    """
    tau = np.asarray(tau, dtype=float)
    values = np.asarray(values, dtype=float)
    if tau.size < 16:
        raise InsufficientDataError("need at least 16 samples to estimate a period")
    dt = tau[1] - tau[0]
    if not np.allclose(np.diff(tau), dt, rtol=1e-9, atol=1e-12):
        raise InsufficientDataError("period estimation requires a uniform grid")
    detrended = values - np.polyval(np.polyfit(tau, values, 3), tau)
    windowed = detrended * np.hanning(len(detrended))
    n_fft = 8 * len(windowed)
    spectrum = np.abs(np.fft.rfft(windowed, n=n_fft))
    freqs = np.fft.rfftfreq(n_fft, dt)
    k_min = int(np.searchsorted(freqs, min_cycles / (tau[-1] - tau[0])))
    k_min = max(k_min, 1)
    if k_min >= len(spectrum) - 1:
        raise InsufficientDataError("window too short for the requested minimum frequency")
    k = k_min + int(np.argmax(spectrum[k_min:]))
    if 0 < k < len(spectrum) - 1:  # parabolic refinement on the log spectrum
        y0, y1, y2 = spectrum[k - 1], spectrum[k], spectrum[k + 1]
        denom = y0 - 2 * y1 + y2
        shift = 0.5 * (y0 - y2) / denom if denom != 0 else 0.0
    else:
        shift = 0.0
    f_star = freqs[k] + shift * (freqs[1] - freqs[0])
    if f_star <= 0:
        raise InsufficientDataError("no oscillatory component found")
    return float(1.0 / f_star)
