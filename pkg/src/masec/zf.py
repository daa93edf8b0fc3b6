"""Zero-forcing beamforming and eavesdropper-blind placement descent.

With at least one more antenna than eavesdroppers, the transmitter can null
every eavesdropper LoS direction exactly; the residual freedom is spent on
the legitimate user, whose effective gain becomes beta0 * N minus a loss
term Theta(x) that depends only on the antenna positions.  Minimizing that
loss by projected gradient descent decouples the placement from the power
and fading parameters, and the outage of the resulting scheme has the same
Gamma closed form with all LoS eavesdropper gains zeroed.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import cho_factor, cho_solve

from .ascent import OptimizerParams
from .gammainc import lower_incomplete_gamma_reg
from .model import (
    SystemConfig,
    eve_los_matrix,
    feasible_region,
    main_channel,
    project_positions,
)

FloatArray = NDArray[np.floating]
ComplexArray = NDArray[np.complexfloating]

TWO_PI = 2.0 * np.pi

_COND_LIMIT = 1e12


class SingularSteeringError(RuntimeError):
    """Raised when the eavesdropper steering directions are numerically
    dependent and the nulling system cannot be solved reliably."""


def _require_zf(cfg: SystemConfig) -> None:
    if cfg.n_antennas < cfg.n_eves + 1:
        raise ValueError(
            "zero-forcing needs n_antennas >= n_eves + 1 "
            f"(got N={cfg.n_antennas}, M={cfg.n_eves})")


def _gram_factor(x: FloatArray, cfg: SystemConfig):
    """Cholesky factor of the steering Gram matrix, with a condition check."""
    stack = eve_los_matrix(x, cfg).conj().T        # columns h_i^H, (N, M)
    gram = stack.conj().T @ stack
    cond = np.linalg.cond(gram)
    if not np.isfinite(cond) or cond > _COND_LIMIT:
        worst = _closest_pair(cfg)
        raise SingularSteeringError(
            f"eavesdropper steering matrix ill-conditioned (cond={cond:.2e}); "
            f"closest angles: theta_{worst[0]+1}={worst[2]:.6f} and "
            f"theta_{worst[1]+1}={worst[3]:.6f} rad")
    return stack, cho_factor(gram, lower=True)


def _closest_pair(cfg: SystemConfig):
    thetas = cfg.thetas_arr
    sines = np.sin(thetas)
    best = (0, 1, thetas[0], thetas[1], np.inf)
    for i in range(len(thetas)):
        for j in range(i + 1, len(thetas)):
            gap = abs(sines[i] - sines[j])
            if gap < best[4]:
                best = (i, j, thetas[i], thetas[j], gap)
    return best


@dataclass(frozen=True)
class ZfProblem:
    """Placement-dependent pieces of the zero-forcing outage objective.

    ``psi_shape`` and ``psi_scale`` are the Gamma shape of the nulled
    collusion sum and the companion scale factor sigma2/pa-weighted; both
    are placement independent.
    """

    steering_stack: ComplexArray   # (N, M), columns are conjugated eve rows
    cross_row: ComplexArray        # (1, M) couplings between Bob and eves
    psi_shape: float
    psi_scale: float


def build_zf_problem(x: FloatArray, cfg: SystemConfig) -> ZfProblem:
    _require_zf(cfg)
    stack, _ = _gram_factor(np.asarray(x, float), cfg)
    h0 = main_channel(x, cfg)
    c = cfg.betas_arr / (cfg.ks_arr + 1.0)
    return ZfProblem(
        steering_stack=stack,
        cross_row=h0 @ stack,
        psi_shape=float(np.sum(c) ** 2 / np.sum(c**2)),
        psi_scale=float(np.sum(c) / np.sum(c**2) * cfg.sigma2 / cfg.pa),
    )


def zf_beamformer(x: FloatArray, cfg: SystemConfig) -> ComplexArray:
    """Unit-norm beamformer orthogonal to every eavesdropper LoS row.

    Projects the legitimate channel onto the orthogonal complement of the
    eavesdropper steering span; the projection is applied twice to push the
    nulling residual to machine-noise level.
    """
    _require_zf(cfg)
    x = np.asarray(x, dtype=float)
    stack, factor = _gram_factor(x, cfg)
    h0h = main_channel(x, cfg).conj()

    def reject(v):
        return v - stack @ cho_solve(factor, stack.conj().T @ v)

    w = reject(reject(h0h))
    norm = np.linalg.norm(w)
    if norm < 1e-12:
        raise SingularSteeringError(
            "legitimate direction lies inside the eavesdropper steering span")
    return w / norm


def bob_gain_loss(x: FloatArray, cfg: SystemConfig) -> float:
    """Loss Theta(x) of the legitimate gain caused by exact nulling.

    Theta = h (H^H H)^{-1} h^H with h the Bob/eve coupling row; the
    zero-forced gain is beta0 * N - Theta, so Theta lies in [0, beta0 * N].
    """
    x = np.asarray(x, dtype=float)
    prob = build_zf_problem(x, cfg)
    _, factor = _gram_factor(x, cfg)
    h = prob.cross_row
    val = h @ cho_solve(factor, h.conj())
    assert abs(val.imag) <= 1e-10
    return float(val.real)


def bob_gain_loss_grad(x: FloatArray, cfg: SystemConfig) -> FloatArray:
    """Exact gradient of the nulling loss in the antenna positions.

    Differentiates Theta = h A^{-1} h^H with A the steering Gram matrix,
    using d(A^{-1}) = -A^{-1} dA A^{-1}; each position only enters one row
    of the steering stack, so the per-coordinate terms assemble cheaply.
    The assembled value is checked to be numerically real before the
    imaginary residue is dropped.
    """
    x = np.asarray(x, dtype=float)
    cfg_sines = np.sin(cfg.thetas_arr)
    sin0 = np.sin(cfg.theta0)
    rate = TWO_PI / cfg.wavelength

    stack, factor = _gram_factor(x, cfg)
    h0 = main_channel(x, cfg)
    h = h0 @ stack                       # (M,)
    v = cho_solve(factor, h.conj())      # A^{-1} h^H
    t = stack @ v                        # H A^{-1} h^H, (N,)

    # dh/dx_n: one term of the coupling sum moves per coordinate
    diff = sin0 - cfg_sines
    dh = np.sqrt(cfg.beta0) * rate * diff \
        * np.exp(1j * (rate * np.outer(x, diff) + 0.5 * np.pi))   # (N, M)
    # row n of dH/dx_n (times 1/rate): conjugated eve phase derivatives
    db = cfg_sines * np.exp(-1j * (rate * np.outer(x, cfg_sines) + 0.5 * np.pi))

    grad = np.empty_like(x)
    for n in range(x.size):
        first = dh[n] @ v
        row = rate * db[n]
        # v^H (dH^H H + H^H dH) v with dH supported on row n
        mixed = np.conj(t[n]) * (row @ v)
        total = first + np.conj(first) - (mixed + np.conj(mixed))
        assert abs(total.imag) <= 1e-10
        grad[n] = total.real
    return grad


@dataclass
class PgdTraceRecord:
    iteration: int
    delta: float | None
    objective: float
    gap: float | None = None


@dataclass
class PgdResult:
    x: FloatArray
    loss: float
    n_iter: int
    converged: bool
    trace: list[PgdTraceRecord] = field(default_factory=list)


def pgd_solve(x0, cfg: SystemConfig, params=None,
              keep_trace: bool = True) -> PgdResult:
    """Minimize the nulling loss by projected gradient descent.

    Mirrors the ascent solver's backtracking: a candidate is accepted once
    the loss is no larger than the quadratic model around the current point,
    which together with the box projection guarantees a nonincreasing loss
    trace.  Step size resets to delta0 every iteration.
    """
    params = params or OptimizerParams()
    region = feasible_region(cfg)
    x = np.asarray(x0, dtype=float)
    loss = bob_gain_loss(x, cfg)
    trace: list[PgdTraceRecord] = []
    converged = False
    n_iter = 0
    for it in range(1, params.max_outer + 1):
        n_iter = it
        grad = bob_gain_loss_grad(x, cfg)
        delta = params.delta0
        accepted = None
        while delta >= params.min_step:
            cand = project_positions(x - delta * grad, region)
            step = cand - x
            model = loss + float(grad @ step) + float(step @ step) / delta
            value = bob_gain_loss(cand, cfg)
            if value <= model:
                accepted = (delta, cand, value, model - value)
                break
            delta *= params.shrink
        if accepted is None:
            if keep_trace:
                trace.append(PgdTraceRecord(iteration=it, delta=None,
                                            objective=loss))
            converged = True
            break
        improvement = loss - accepted[2]
        x, loss = accepted[1], accepted[2]
        if keep_trace:
            trace.append(PgdTraceRecord(iteration=it, delta=accepted[0],
                                        objective=loss, gap=accepted[3]))
        if improvement < params.obj_tol:
            converged = True
            break
    return PgdResult(x=x, loss=loss, n_iter=n_iter, converged=converged,
                     trace=trace)


def zf_outage(x: FloatArray, cfg: SystemConfig) -> float:
    """Closed-form secrecy outage with the zero-forcing beamformer at x."""
    x = np.asarray(x, dtype=float)
    prob = build_zf_problem(x, cfg)
    gain = cfg.beta0 * cfg.n_antennas - bob_gain_loss(x, cfg)
    rate_pow = 2.0**cfg.rs
    arg = prob.psi_scale * (cfg.pa * gain / (cfg.sigma2 * rate_pow)
                            + 1.0 / rate_pow - 1.0)
    if arg <= 0.0:
        return 1.0
    p = 1.0 - lower_incomplete_gamma_reg(prob.psi_shape, arg)
    return float(min(max(p, 0.0), 1.0))
