"""System model for a secure downlink with a linear movable-antenna array.

The transmitter carries ``n_antennas`` elements that slide along a line
segment of length ``span``.  The legitimate receiver sees a pure LoS
channel; each of the ``n_eves`` colluding eavesdroppers sees Rician fading
whose LoS part is steered by the antenna positions.  All angles are in
radians, all powers and path gains are linear (not dB).
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

ComplexArray = NDArray[np.complexfloating]
FloatArray = NDArray[np.floating]

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class SystemConfig:
    """Scenario parameters shared by every routine in the package.

    Attributes:
        n_antennas: number of transmit elements (>= 2).
        n_eves: number of colluding eavesdroppers (>= 1).
        theta0: steering angle of the legitimate user.
        thetas: eavesdropper steering angles, pairwise distinct.
        beta0: path gain of the legitimate link.
        betas: eavesdropper path gains.
        ks: Rician K-factors of the eavesdropper links (K = 0 is Rayleigh).
        pa: transmit power budget.
        sigma2: noise power at every receiver.
        rs: target secrecy rate in bits/s/Hz.
        wavelength: carrier wavelength; positions are in the same unit.
        span: length of the line segment the elements move on.
        dmin: minimum spacing between adjacent elements.
    """

    n_antennas: int
    n_eves: int
    theta0: float
    thetas: tuple[float, ...]
    beta0: float
    betas: tuple[float, ...]
    ks: tuple[float, ...]
    pa: float
    sigma2: float
    rs: float
    wavelength: float = 1.0
    span: float = 4.0
    dmin: float = 0.5

    def __post_init__(self) -> None:
        if self.n_antennas < 2:
            raise ValueError("n_antennas must be at least 2")
        if self.n_eves < 1:
            raise ValueError("n_eves must be at least 1")
        for name in ("thetas", "betas", "ks"):
            if len(getattr(self, name)) != self.n_eves:
                raise ValueError(f"{name} must have length n_eves={self.n_eves}")
        if len(set(self.thetas)) != self.n_eves:
            raise ValueError("eavesdropper angles must be pairwise distinct")
        if any(b <= 0 for b in self.betas) or self.beta0 <= 0:
            raise ValueError("path gains must be positive")
        if any(k < 0 for k in self.ks):
            raise ValueError("Rician K-factors must be nonnegative")
        for name in ("pa", "sigma2", "rs", "wavelength"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.dmin < 0:
            raise ValueError("dmin must be nonnegative")
        if self.span < (self.n_antennas - 1) * self.dmin:
            raise ValueError(
                "span too small: need span >= (n_antennas - 1) * dmin")

    @property
    def betas_arr(self) -> FloatArray:
        return np.asarray(self.betas, dtype=float)

    @property
    def ks_arr(self) -> FloatArray:
        return np.asarray(self.ks, dtype=float)

    @property
    def thetas_arr(self) -> FloatArray:
        return np.asarray(self.thetas, dtype=float)


@dataclass(frozen=True)
class FeasibleRegion:
    """Per-element position intervals [lo_i, hi_i].

    The intervals partition the segment so that any choice with
    lo_i <= x_i <= hi_i automatically keeps adjacent elements at least
    dmin apart; consecutive intervals are separated by exactly dmin.
    """

    lo: FloatArray
    hi: FloatArray

    def midpoints(self) -> FloatArray:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x: FloatArray, tol: float = 1e-12) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lo - tol) and np.all(x <= self.hi + tol))


@dataclass(frozen=True)
class ChannelRealization:
    """One draw of all links: deterministic Bob channel, faded eve channels."""

    h_bob: ComplexArray      # shape (N,)
    h_eves: ComplexArray     # shape (M, N)


def steering_vector(x: FloatArray, theta: float, cfg: SystemConfig) -> ComplexArray:
    """Array response for positions ``x`` toward direction ``theta``.

    Entry n equals exp(j * 2*pi/wavelength * x_n * sin(theta)); magnitude one.
    """
    x = np.asarray(x, dtype=float)
    phase = TWO_PI / cfg.wavelength * np.sin(theta) * x
    return np.exp(1j * phase)


def main_channel(x: FloatArray, cfg: SystemConfig) -> ComplexArray:
    """Deterministic LoS channel of the legitimate user, scaled by sqrt(beta0)."""
    return np.sqrt(cfg.beta0) * steering_vector(x, cfg.theta0, cfg)


def eve_los_matrix(x: FloatArray, cfg: SystemConfig) -> ComplexArray:
    """Unit-magnitude LoS responses of all eavesdroppers, stacked (M, N)."""
    x = np.asarray(x, dtype=float)
    sines = np.sin(cfg.thetas_arr)
    phase = TWO_PI / cfg.wavelength * np.outer(sines, x)
    return np.exp(1j * phase)


def sample_wiretap_channels(
    x: FloatArray, cfg: SystemConfig, seed: int
) -> ChannelRealization:
    """Draw one realization of every eavesdropper channel.

    Reproducibility contract: the PCG64 generator from
    ``numpy.random.default_rng(seed)`` first yields the real parts as one
    (M, N) standard-normal block, then the imaginary parts as a second
    block; each scatter entry is scaled by 1/sqrt(2) so its variance is one.
    The LoS component of eve i has weight sqrt(K_i beta_i / (K_i + 1)) and
    the scattered component sqrt(beta_i / (K_i + 1)).
    """
    rng = np.random.default_rng(seed)
    m, n = cfg.n_eves, cfg.n_antennas
    re = rng.standard_normal((m, n))
    im = rng.standard_normal((m, n))
    scatter = (re + 1j * im) / np.sqrt(2.0)

    los = eve_los_matrix(x, cfg)
    k = cfg.ks_arr[:, None]
    b = cfg.betas_arr[:, None]
    h_eves = np.sqrt(k * b / (k + 1.0)) * los + np.sqrt(b / (k + 1.0)) * scatter
    return ChannelRealization(h_bob=main_channel(x, cfg), h_eves=h_eves)


def snr_bob(w: ComplexArray, x: FloatArray, cfg: SystemConfig) -> float:
    """Receive SNR of the legitimate user for a unit-norm beamformer."""
    gain = abs(np.dot(main_channel(x, cfg), w)) ** 2
    return cfg.pa * gain / cfg.sigma2


def sum_eve_power(w: ComplexArray, channels: ChannelRealization) -> float:
    """Aggregate signal power collected by the colluding eavesdroppers.

    Returns sum_i |h_i w|^2; the caller applies the pa/sigma2 factor when an
    SNR is needed.
    """
    proj = channels.h_eves @ np.asarray(w)
    return float(np.sum(np.abs(proj) ** 2))


def feasible_region(cfg: SystemConfig) -> FeasibleRegion:
    """Partition the segment into per-element movement intervals.

    Interval i has width (span - (N-1) dmin) / N and consecutive intervals
    are dmin apart, so the first starts at 0 and the last ends at span.
    A zero-width region (span == (N-1) dmin) pins every element and is
    allowed, with a warning.
    """
    n, d, span = cfg.n_antennas, cfg.dmin, cfg.span
    width = (span - (n - 1) * d) / n
    if width == 0.0:
        warnings.warn("degenerate movement region: every element is pinned",
                      stacklevel=2)
    idx = np.arange(n, dtype=float)
    lo = width * idx + idx * d
    hi = width * (idx + 1.0) + idx * d
    return FeasibleRegion(lo=lo, hi=hi)


def project_positions(x_raw: FloatArray, region: FeasibleRegion) -> FloatArray:
    """Nearest feasible positions: clamp each coordinate into its interval.

    Because the intervals are disjoint boxes, the per-coordinate clamp is the
    exact Euclidean projection.
    """
    return np.clip(np.asarray(x_raw, dtype=float), region.lo, region.hi)


def random_feasible_positions(
    region: FeasibleRegion, rng: np.random.Generator
) -> FloatArray:
    """Uniform draw from the per-element intervals (always feasible)."""
    return rng.uniform(region.lo, region.hi)


def mrt_beamformer(x: FloatArray, cfg: SystemConfig) -> ComplexArray:
    """Unit-norm beamformer matched to the legitimate channel."""
    h = main_channel(x, cfg)
    return h.conj() / np.linalg.norm(h)
