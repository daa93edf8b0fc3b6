"""Joint beamformer/placement optimization of the secrecy confidence.

The outage minimization is driven from the outside by bisection on the
secrecy confidence level eps: a level is feasible when the maximum of a
margin objective (the scaled outage threshold minus the linear surrogate
of the required Gamma quantile, cleared of its positive denominator) is
positive.  The inner maximization alternates projected gradient ascent
steps on the unit-norm beamformer and on the antenna positions, each with
backtracking against a quadratic model.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numpy.typing import NDArray
from scipy import optimize

from .gammainc import lower_incomplete_gamma_reg
from .model import (
    SystemConfig,
    FeasibleRegion,
    feasible_region,
    mrt_beamformer,
    project_positions,
)
from .outage import secrecy_outage_closed_form
from .surrogate import LinearFitTable, default_table, surrogate_lookup

FloatArray = NDArray[np.floating]
ComplexArray = NDArray[np.complexfloating]

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class OptimizerParams:
    """Shared knobs of the ascent/descent loops.

    delta0 is the initial step size of every backtracking line search and is
    reset at the start of each beamformer block and each position block;
    shrink multiplies it on rejection.  tau is both the surrogate grid
    spacing and the bisection termination width.
    """

    delta0: float = 1.0
    shrink: float = 0.5
    max_outer: int = 2000
    obj_tol: float = 1e-8
    tau: float = 0.01
    min_step: float = 1e-15


@dataclass(frozen=True)
class PhaseWorkspace:
    """Shared factors of the position gradient of every LoS power gain.

    Direction index 0 is the legitimate user, 1..M the eavesdroppers.
    ``outer_sym``/``outer_skew`` are the symmetric and antisymmetric outer
    products of the beamformer's real and imaginary parts; ``cos_phase``
    and ``neg_sin_phase`` hold the element phases per direction, and
    ``rate_sin``/``rate_cos`` the corresponding derivative diagonals, whose
    entries are bounded by 2 pi |sin theta| / wavelength.
    """

    re_w: FloatArray
    im_w: FloatArray
    outer_sym: FloatArray        # (N, N), symmetric
    outer_skew: FloatArray       # (N, N), antisymmetric
    cos_phase: FloatArray        # (M+1, N)
    neg_sin_phase: FloatArray    # (M+1, N)
    rate_sin: FloatArray         # (M+1, N)
    rate_cos: FloatArray         # (M+1, N)


@dataclass
class TraceRecord:
    """One outer iteration: accepted steps, objective, model gaps.

    ``beam_gap``/``pos_gap`` store objective-minus-model at the accepted
    point; the backtracking contract requires them to be nonnegative.
    """

    iteration: int
    delta_beam: float | None
    delta_pos: float | None
    objective: float
    beam_gap: float | None = None
    pos_gap: float | None = None


@dataclass
class ApgaResult:
    w: ComplexArray
    x: FloatArray
    objective: float
    n_iter: int
    converged: bool
    trace: list[TraceRecord] = field(default_factory=list)


@dataclass
class BisectionResult:
    """Outcome of the confidence bisection.

    ``eps`` is the largest confidence level certified feasible; ``p_out``
    is the closed-form outage at the returned solution.  When no probed
    level was feasible, ``feasible`` is False and the best-effort iterate
    of the last probe is returned with eps = 0.
    """

    eps: float
    p_out: float
    w: ComplexArray
    x: FloatArray
    feasible: bool
    rounds: int
    total_iterations: int
    probes: list[tuple[float, bool, float]] = field(default_factory=list)
    best_trace: list[TraceRecord] | None = None


class _Scenario:
    """Precomputed constants of the margin objective for one config."""

    def __init__(self, cfg: SystemConfig):
        self.cfg = cfg
        self.sines = np.concatenate(([np.sin(cfg.theta0)], np.sin(cfg.thetas_arr)))
        self.wave_rate = TWO_PI / cfg.wavelength
        c = cfg.betas_arr / (cfg.ks_arr + 1.0)
        self.ck = c * cfg.ks_arr
        self.c2k = c**2 * cfg.ks_arr
        self.c_sum = float(np.sum(c))
        self.c2_sum = float(np.sum(c**2))
        self.rate_pow = 2.0**cfg.rs
        self.noise_off = cfg.sigma2 / cfg.pa * (1.0 / self.rate_pow - 1.0)
        self.beta0 = cfg.beta0

    def steer_rows(self, x: FloatArray) -> ComplexArray:
        """Unit-magnitude steering rows for Bob and all eves, (M+1, N)."""
        return np.exp(1j * self.wave_rate * np.outer(self.sines, x))

    def margin(self, rows: ComplexArray, w: ComplexArray,
               slope: float, intercept: float) -> float:
        v = rows @ w
        gains = np.abs(v) ** 2
        bob = self.beta0 * gains[0]
        lin = self.ck @ gains[1:] + self.c_sum
        quad = 2.0 * (self.c2k @ gains[1:]) + self.c2_sum
        thr = bob / self.rate_pow + self.noise_off
        return float(lin * thr - slope * lin**2 - intercept * quad)

    def margin_grad_w(self, rows: ComplexArray, w: ComplexArray,
                      slope: float, intercept: float) -> ComplexArray:
        v = rows @ w
        gains = np.abs(v) ** 2
        bob = self.beta0 * gains[0]
        lin = self.ck @ gains[1:] + self.c_sum
        thr = bob / self.rate_pow + self.noise_off
        # per-eve h_i^H (h_i w) rows
        proj = v[1:, None] * rows[1:].conj()
        lin_grad = self.ck @ proj
        quad_grad = 2.0 * (self.c2k @ proj)
        bob_grad = self.beta0 * v[0] * rows[0].conj()
        return (thr - 2.0 * slope * lin) * lin_grad \
            + lin / self.rate_pow * bob_grad - intercept * quad_grad

    def workspace(self, rows: ComplexArray, w: ComplexArray) -> PhaseWorkspace:
        re_w, im_w = w.real, w.imag
        sym = np.outer(re_w, re_w) + np.outer(im_w, im_w)
        skew = np.outer(re_w, im_w) - np.outer(im_w, re_w)
        cos_p, sin_p = rows.real, rows.imag
        rate = (self.wave_rate * self.sines)[:, None]
        return PhaseWorkspace(
            re_w=re_w, im_w=im_w, outer_sym=sym, outer_skew=skew,
            cos_phase=cos_p, neg_sin_phase=-sin_p,
            rate_sin=rate * sin_p, rate_cos=rate * cos_p)

    def los_gain_grads(self, ws: PhaseWorkspace) -> FloatArray:
        """d|s_d w|^2 / dx per direction, stacked (M+1, N); no beta factors."""
        out = np.empty_like(ws.cos_phase)
        c2, d2 = 2.0 * ws.outer_sym, 2.0 * ws.outer_skew
        for d in range(out.shape[0]):
            g, q = ws.cos_phase[d], ws.neg_sin_phase[d]
            out[d] = -ws.rate_sin[d] * (c2 @ g + d2 @ q) \
                - ws.rate_cos[d] * (c2 @ q - d2 @ g)
        return out

    def margin_grad_x(self, rows: ComplexArray, w: ComplexArray,
                      slope: float, intercept: float) -> FloatArray:
        v = rows @ w
        gains = np.abs(v) ** 2
        bob = self.beta0 * gains[0]
        lin = self.ck @ gains[1:] + self.c_sum
        thr = bob / self.rate_pow + self.noise_off
        grads = self.los_gain_grads(self.workspace(rows, w))
        return (thr - 2.0 * slope * lin) * (self.ck @ grads[1:]) \
            - 2.0 * intercept * (self.c2k @ grads[1:]) \
            + lin * self.beta0 / self.rate_pow * grads[0]


def margin_objective(w, x, eps: float, table: LinearFitTable,
                     cfg: SystemConfig) -> float:
    """Feasibility margin of confidence level eps at (w, x); > 0 is feasible."""
    slope, intercept = surrogate_lookup(table, eps)
    sc = _Scenario(cfg)
    return sc.margin(sc.steer_rows(np.asarray(x, float)), np.asarray(w), slope, intercept)


def margin_grad_beamformer(w, x, eps: float, table: LinearFitTable,
                           cfg: SystemConfig) -> ComplexArray:
    """Ascent direction in w; half the real-pair gradient, complex form."""
    slope, intercept = surrogate_lookup(table, eps)
    sc = _Scenario(cfg)
    return sc.margin_grad_w(sc.steer_rows(np.asarray(x, float)), np.asarray(w),
                            slope, intercept)


def margin_grad_positions(w, x, eps: float, table: LinearFitTable,
                          cfg: SystemConfig) -> FloatArray:
    """Exact gradient of the margin objective in the antenna positions."""
    slope, intercept = surrogate_lookup(table, eps)
    sc = _Scenario(cfg)
    return sc.margin_grad_x(sc.steer_rows(np.asarray(x, float)), np.asarray(w),
                            slope, intercept)


def build_phase_workspace(w, x, cfg: SystemConfig) -> PhaseWorkspace:
    sc = _Scenario(cfg)
    return sc.workspace(sc.steer_rows(np.asarray(x, float)), np.asarray(w))


def _normalize(w: ComplexArray) -> ComplexArray:
    return w / np.linalg.norm(w)


def apga_solve(
    w0, x0, eps: float, table: LinearFitTable, cfg: SystemConfig,
    params: OptimizerParams | None = None, mode: str = "joint",
    keep_trace: bool = True,
) -> ApgaResult:
    """Maximize the margin objective by alternating projected ascent.

    mode "joint" runs a beamformer block then a position block per outer
    iteration; "beam_only" holds the positions fixed; "positions_mrt"
    replaces the beamformer block by the closed-form matched filter and only
    ascends in the positions (the objective trace is then not guaranteed
    monotone, since the matched filter maximizes the legitimate gain, not
    the margin).

    Beamformer candidates are renormalized to the unit sphere and position
    candidates clamped into the movement region; a candidate is accepted
    once the objective at it reaches the quadratic model built from the
    step's gradient, which for these projections implies the objective
    never decreases within a block.
    """
    if mode not in ("joint", "beam_only", "positions_mrt"):
        raise ValueError(f"unknown mode {mode!r}")
    params = params or OptimizerParams()
    slope, intercept = surrogate_lookup(table, eps)
    sc = _Scenario(cfg)
    region = feasible_region(cfg)

    w = _normalize(np.asarray(w0, dtype=complex))
    x = np.asarray(x0, dtype=float)
    rows = sc.steer_rows(x)
    obj = sc.margin(rows, w, slope, intercept)

    trace: list[TraceRecord] = []
    converged = False
    n_iter = 0
    for it in range(1, params.max_outer + 1):
        n_iter = it
        rec = TraceRecord(iteration=it, delta_beam=None, delta_pos=None,
                          objective=obj)

        if mode == "positions_mrt":
            w = mrt_beamformer(x, cfg)
            obj_w = sc.margin(rows, w, slope, intercept)
        elif mode in ("joint", "beam_only"):
            grad = sc.margin_grad_w(rows, w, slope, intercept)
            delta = params.delta0
            obj_w = obj
            while delta >= params.min_step:
                cand = _normalize(w + delta * grad)
                step = cand - w
                model = obj + 2.0 * float(np.real(np.vdot(grad, step))) \
                    - float(np.real(np.vdot(step, step))) / delta
                value = sc.margin(rows, cand, slope, intercept)
                if value >= model:
                    rec.delta_beam, rec.beam_gap = delta, value - model
                    w, obj_w = cand, value
                    break
                delta *= params.shrink
        else:
            obj_w = obj

        if mode in ("joint", "positions_mrt"):
            grad = sc.margin_grad_x(rows, w, slope, intercept)
            delta = params.delta0
            obj_x = obj_w
            while delta >= params.min_step:
                cand = project_positions(x + delta * grad, region)
                step = cand - x
                cand_rows = sc.steer_rows(cand)
                model = obj_w + float(grad @ step) \
                    - float(step @ step) / delta
                value = sc.margin(cand_rows, w, slope, intercept)
                if value >= model:
                    rec.delta_pos, rec.pos_gap = delta, value - model
                    x, rows, obj_x = cand, cand_rows, value
                    break
                delta *= params.shrink
        else:
            obj_x = obj_w

        improvement = obj_x - obj
        obj = obj_x
        rec.objective = obj
        if keep_trace:
            trace.append(rec)
        if abs(improvement) < params.obj_tol:
            converged = True
            break

    return ApgaResult(w=w, x=x, objective=obj, n_iter=n_iter,
                      converged=converged, trace=trace)


def bisection_outage_min(
    cfg: SystemConfig,
    table: LinearFitTable | None = None,
    params: OptimizerParams | None = None,
    w0=None, x0=None, mode: str = "joint",
    keep_trace: bool = False,
) -> BisectionResult:
    """Minimize the secrecy outage by bisection on the confidence level.

    Starts probing at eps = 0.5 over [0, min(1, table max)]; each probe
    solves the margin maximization (warm-started from the previous probe)
    and the sign of the attained maximum steers the bisection, which stops
    once the bracket is narrower than params.tau.  The reported outage is
    the closed-form value at the best feasible solution.
    """
    table = table or default_table()
    params = params or OptimizerParams()
    region = feasible_region(cfg)
    x = np.asarray(x0, dtype=float) if x0 is not None else region.midpoints()
    w = np.asarray(w0, dtype=complex) if w0 is not None else mrt_beamformer(x, cfg)

    eps_lo, eps_hi = 0.0, min(1.0, table.max_eps)
    eps = 0.5
    best: tuple[float, ApgaResult] | None = None
    last: ApgaResult | None = None
    probes: list[tuple[float, bool, float]] = []
    rounds = 0
    total_iter = 0
    while True:
        rounds += 1
        res = apga_solve(w, x, eps, table, cfg, params, mode=mode,
                         keep_trace=keep_trace)
        total_iter += res.n_iter
        last = res
        w, x = res.w, res.x
        feasible = res.objective > 0.0
        probes.append((eps, feasible, res.objective))
        if feasible:
            eps_lo = eps
            best = (eps, res)
            eps = 0.5 * (eps + eps_hi)
        else:
            eps_hi = eps
            eps = 0.5 * (eps_lo + eps)
        if eps_hi - eps_lo <= params.tau:
            break

    if best is not None:
        eps_star, sol = best
        p_out = secrecy_outage_closed_form(sol.w, sol.x, cfg)
        return BisectionResult(eps=eps_star, p_out=p_out, w=sol.w, x=sol.x,
                               feasible=True, rounds=rounds,
                               total_iterations=total_iter, probes=probes,
                               best_trace=sol.trace if keep_trace else None)
    p_out = secrecy_outage_closed_form(last.w, last.x, cfg)
    return BisectionResult(eps=0.0, p_out=p_out, w=last.w, x=last.x,
                           feasible=False, rounds=rounds,
                           total_iterations=total_iter, probes=probes,
                           best_trace=last.trace if keep_trace else None)


@dataclass
class ToyResult:
    eps: float
    point: FloatArray
    value: float


def maximize_gamma_objective(
    shape_fn, threshold_fn, bounds: list[tuple[float, float]],
    table: LinearFitTable | None = None, tau: float = 0.01,
) -> ToyResult:
    """Bisection framework for box-constrained gamma-CDF maximization.

    Maximizes P(shape_fn(v), threshold_fn(v)) over the box ``bounds`` by the
    same confidence bisection used for the outage problem; the inner margin
    maximization threshold_fn - slope * shape_fn - intercept is concave for
    the intended toys and is handed to a bounded quasi-Newton solver from a
    deterministic grid of starts.

    Returns the certified confidence level, the maximizing point, and the
    exact objective value there.
    """
    table = table or default_table()
    lo = np.array([b[0] for b in bounds], dtype=float)
    hi = np.array([b[1] for b in bounds], dtype=float)
    fracs = [0.15, 0.5, 0.85]
    if len(bounds) == 1:
        starts = [lo + f * (hi - lo) for f in fracs]
    else:
        mesh = np.meshgrid(*[[f for f in fracs]] * len(bounds), indexing="ij")
        starts = [lo + np.array(pt) * (hi - lo)
                  for pt in zip(*[m.ravel() for m in mesh])]

    def inner_max(slope: float, intercept: float):
        def neg(v):
            return -(threshold_fn(v) - slope * shape_fn(v) - intercept)
        best_v, best_val = None, np.inf
        for s in starts:
            r = optimize.minimize(neg, s, method="L-BFGS-B",
                                  bounds=list(zip(lo, hi)))
            if r.fun < best_val:
                best_v, best_val = r.x, r.fun
        return best_v, -best_val

    eps_lo, eps_hi = 0.0, min(1.0, table.max_eps)
    eps = 0.5
    best = None
    last_v = 0.5 * (lo + hi)
    while True:
        slope, intercept = surrogate_lookup(table, eps)
        v, margin = inner_max(slope, intercept)
        last_v = v
        if margin > 0.0:
            eps_lo, best = eps, (eps, v)
            eps = 0.5 * (eps + eps_hi)
        else:
            eps_hi = eps
            eps = 0.5 * (eps_lo + eps)
        if eps_hi - eps_lo <= tau:
            break

    eps_star, v_star = best if best is not None else (0.0, last_v)
    value = float(lower_incomplete_gamma_reg(shape_fn(v_star),
                                             threshold_fn(v_star)))
    return ToyResult(eps=eps_star, point=np.asarray(v_star), value=value)


def write_trace(trace: list[TraceRecord], path) -> None:
    """Plain-text iteration trace: iteration, accepted step, objective."""
    lines = ["# iteration delta objective"]
    for rec in trace:
        delta = rec.delta_pos if rec.delta_pos is not None else rec.delta_beam
        lines.append(f"{rec.iteration} {'' if delta is None else repr(delta)} "
                     f"{rec.objective!r}")
    Path(path).write_text("\n".join(lines) + "\n")
