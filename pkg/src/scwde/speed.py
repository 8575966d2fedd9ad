"""Wave steady state, propagation speed, and its upper bounds."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np

from .coupled import CoupledPotentialContext, coupled_potential
from .scalar import PotentialLandscape, potential, potential_d1
from .window import (
    CoupledSpec,
    DEState,
    Trajectory,
    WindowSchedule,
    decode_success,
    run_wd,
)

STEADY_TOL = 1e-9
T_MAX_DEFAULT = 200


@dataclass(frozen=True)
class SteadyState:
    """First window configuration from which the profile translates exactly.

    ``residual`` is the largest shift mismatch over the steady suffix;
    ``c_prime`` is None when no steady configuration exists in the run.
    """

    c_prime: Optional[int]
    residual: Optional[float]
    tol: float


def _interior_pairs(traj: Trajectory) -> list[int]:
    """Window indices c with both windows c, c+1 recorded and fully inside
    the uniform-channel region (no termination effects)."""
    spec, sched = traj.spec, traj.sched
    interior_last = spec.N - sched.W + 1
    cs = traj.windows()
    have = set(cs)
    return [c for c in cs if c + 1 in have and c + 1 <= interior_last]


def detect_steady_state(traj: Trajectory, tol: float = STEADY_TOL) -> SteadyState:
    """Locate the first c' whose profile shifts one position per window slide.

    For each consecutive interior pair (c, c+1) and every recorded
    iteration t, the shift mismatch max_z |x_z^(c,t) - x_{z+1}^(c+1,t)|
    and the spatial ordering x_{z+1} >= x_z - tol are evaluated over the
    wave-carrying positions: from w left of the window rightward, with a
    margin of w positions at both chain boundaries. (Positions the window
    left long before c keep the start-up transient frozen forever and say
    nothing about the traveling profile.) c' is the smallest index such
    that every later interior pair also complies.
    """
    spec, sched = traj.spec, traj.sched
    w, N = spec.w, spec.N
    pairs = _interior_pairs(traj)
    mismatches: dict[int, float] = {}
    ordered: dict[int, bool] = {}
    for c in pairs:
        z_lo = max(w + 1, c - w)
        z_hi = N - 1  # compare z against z+1, both clear of the right boundary
        if z_lo > z_hi:
            continue
        cur = traj.block(c)
        nxt = traj.block(c + 1)
        rows = min(cur.shape[0], nxt.shape[0])
        seg = cur[:rows, z_lo - 1 : z_hi]
        seg_next = nxt[:rows, z_lo : z_hi + 1]
        mismatches[c] = float(np.max(np.abs(seg - seg_next)))
        ordered[c] = bool(np.all(cur[:rows, z_lo : z_hi + 1] >= seg - tol))
    c_prime = None
    best: Optional[float] = None
    for c in sorted(mismatches, reverse=True):
        if mismatches[c] <= tol and ordered[c]:
            c_prime = c
            best = mismatches[c] if best is None else max(best, mismatches[c])
        else:
            break
    if c_prime is None:
        return SteadyState(c_prime=None, residual=None, tol=tol)
    return SteadyState(c_prime=c_prime, residual=best, tol=tol)


def bound_a1(
    traj: Trajectory,
    c_prime: int,
    alpha: float = 1.0,
) -> float:
    """Trajectory upper bound on the speed from the potential drop per slide.

    Both potential evaluations use window configuration c'; the denominator
    sums rho'(1-x_z) (x_z - x_{z-1})^2 over the window at t = 0, reading
    x_0 as zero.
    """
    spec, sched = traj.spec, traj.sched
    if c_prime + 1 not in set(traj.windows()):
        raise ValueError(f"trajectory lacks window {c_prime + 1}")
    ctx = CoupledPotentialContext(spec=spec, sched=sched, c=c_prime, alpha=alpha)
    x_now = traj.vector(c_prime, 0)
    x_next = traj.vector(c_prime + 1, 0)
    num = alpha * (coupled_potential(x_now, ctx) - coupled_potential(x_next, ctx))
    lo = c_prime - 1
    xs = x_now[lo : lo + sched.W]
    left = np.empty_like(xs)
    left[1:] = xs[:-1]
    left[0] = x_now[lo - 1] if lo >= 1 else 0.0
    den = float(np.sum(spec.ens.rho_d1(1.0 - xs) * (xs - left) ** 2))
    if abs(den) < 1e-300:
        raise ZeroDivisionError("flat steady profile: speed-bound denominator is zero")
    return float(num / den)


@dataclass(frozen=True)
class LandscapeBounds:
    """Closed-form speed bounds from the scalar potential landscape.

    ``finite_w``/``infinite_w`` are None when the corresponding denominator
    is not positive (bound vacuous). ``variant='w_inverse'`` replaces the
    default W (U')^2 / D curvature terms by (U')^2 / (2 D W).
    """

    finite_w: Optional[float]
    infinite_w: Optional[float]
    B1: float
    B2: float
    numerator_finite: float
    numerator_infinite: float
    alpha: float
    variant: str
    subtrahend: str


def bound_th2(
    spec: CoupledSpec,
    W: int,
    land: PotentialLandscape,
    alpha: float = 1.0,
    infinite_subtrahend: Literal["none", "x_e"] = "none",
    variant: Literal["w_scaled", "w_inverse"] = "w_scaled",
) -> LandscapeBounds:
    """Evaluate the landscape-only speed bounds for window size W.

    Requires the landscape to provide x_a, x_b, x_c0, x_d and D. The
    infinite-coupling numerator optionally subtracts the potential at the
    trailing inflection point x_e.
    """
    if abs(land.epsilon - spec.epsilon) > 1e-15:
        raise ValueError(
            f"landscape epsilon {land.epsilon} does not match spec epsilon {spec.epsilon}"
        )
    needed = {"x_a": land.x_a, "x_b": land.x_b, "x_c0": land.x_c0, "x_d": land.x_d}
    missing = [k for k, v in needed.items() if v is None]
    if missing or land.D is None:
        missing += ["D"] if land.D is None else []
        raise ValueError(f"landscape lacks {', '.join(missing)}")
    ens, w, eps = spec.ens, spec.w, land.epsilon
    u_xb = float(potential(land.x_b, eps, ens))
    u_xd = float(potential(land.x_d, eps, ens))
    du_xa = float(potential_d1(land.x_a, eps, ens))
    du_xc0 = float(potential_d1(land.x_c0, eps, ens))
    if variant == "w_scaled":
        curvature_terms = W * (du_xa**2 + du_xc0**2) / land.D
    elif variant == "w_inverse":
        curvature_terms = (du_xa**2 + du_xc0**2) / (2.0 * land.D * W)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    b2 = 2.0 * u_xb - u_xd + curvature_terms
    b1 = b2 - land.D * land.x_d / w

    u_at_1 = float(potential(1.0, eps, ens))
    num_finite = w * alpha * u_at_1
    if infinite_subtrahend == "none":
        sub = 0.0
    elif infinite_subtrahend == "x_e":
        if land.x_e is None:
            raise ValueError("landscape lacks x_e for the requested subtrahend")
        sub = float(potential(land.x_e, eps, ens))
    else:
        raise ValueError(f"unknown subtrahend {infinite_subtrahend!r}")
    num_infinite = w * alpha * (u_at_1 - sub)

    return LandscapeBounds(
        finite_w=(num_finite / b1) if b1 > 0.0 else None,
        infinite_w=(num_infinite / b2) if b2 > 0.0 else None,
        B1=b1,
        B2=b2,
        numerator_finite=num_finite,
        numerator_infinite=num_infinite,
        alpha=alpha,
        variant=variant,
        subtrahend=infinite_subtrahend,
    )


@dataclass(frozen=True)
class SlopeMarginReport:
    min_margin: float
    holds: bool
    margins: tuple[float, ...]


def slope_margin_check(
    state: DEState,
    spec: CoupledSpec,
    sched: WindowSchedule,
    tol: float = 1e-9,
) -> SlopeMarginReport:
    """Check the profile-slope lower bound at the state's window.

    For each in-window z the margin is
    (x_z - x_{z-1}) - |x_z - eps lam(1 - rho(1 - x_z))| / w;
    the bound holds when every margin is >= -tol.
    """
    ens, w = spec.ens, spec.w
    margins = []
    for z in range(state.c, state.c + sched.W):
        xz = state.get(z)
        diff = xz - state.get(z - 1)
        proxy = abs(xz - spec.epsilon * ens.lam(1.0 - ens.rho(1.0 - xz))) / w
        margins.append(diff - proxy)
    min_margin = min(margins)
    return SlopeMarginReport(
        min_margin=float(min_margin),
        holds=bool(min_margin >= -tol),
        margins=tuple(float(m) for m in margins),
    )


@dataclass(frozen=True)
class SpeedReport:
    """Outcome of a speed measurement at one (epsilon, W) point.

    ``T_min`` is the smallest iterations-per-window count that decodes;
    the wave speed is its reciprocal. Bounds are filled when computable.
    """

    epsilon: float
    W: int
    T_min: Optional[int]
    c_prime: Optional[int]
    A1: Optional[float]
    th2_finite: Optional[float]
    th2_infinite: Optional[float]
    alpha: float
    success_policy: str
    N: int
    w: int
    schedule: str
    T_max: int
    best_avg: Optional[float] = None
    steady_residual: Optional[float] = None
    th2_B1: Optional[float] = None
    th2_B2: Optional[float] = None
    th2_hypothesis_residual: Optional[float] = None

    @property
    def v(self) -> Optional[float]:
        return None if self.T_min is None else 1.0 / self.T_min

    CSV_COLUMNS = (
        "epsilon",
        "W",
        "T_min",
        "v",
        "c_prime",
        "A1",
        "th2_finite",
        "th2_infinite",
        "alpha",
        "success_policy",
    )

    def csv_values(self) -> tuple:
        return (
            self.epsilon,
            self.W,
            self.T_min,
            self.v,
            self.c_prime,
            self.A1,
            self.th2_finite,
            self.th2_infinite,
            self.alpha,
            self.success_policy,
        )


def _th2_left_edge_residual(traj: Trajectory) -> Optional[float]:
    """Largest x_{c-1} at t = 0 over recorded interior windows c > 1.

    Diagnoses the closed-form bound's hypothesis that the position just
    left of the window has fully decoded when the window arrives.
    """
    vals = [
        traj.vector(c, 0)[c - 2]
        for c in traj.windows()
        if c > 1 and c - 2 < traj.spec.chain_len
    ]
    return float(max(vals)) if vals else None


def measure_speed(
    spec: CoupledSpec,
    W: int,
    T_max: int = T_MAX_DEFAULT,
    alpha: float = 1.0,
    success_policy: str = "average",
    success_threshold: float = 1e-6,
    schedule_variant: str = "literal",
    steady_tol: float = STEADY_TOL,
    land: Optional[PotentialLandscape] = None,
    compute_bounds: bool = True,
    validate: bool = True,
) -> SpeedReport:
    """Scan T = 1..T_max upward for the smallest iteration budget that decodes.

    The scan is linear so the reported minimum is exact even if success
    were non-monotone in T. On success the run is repeated with trajectory
    recording to locate the steady state and evaluate the trajectory bound;
    the landscape bounds are attached when a landscape is supplied.
    """
    if not 1 <= W <= spec.N:
        raise ValueError(f"window size {W} outside 1..{spec.N}")
    if T_max < 1:
        raise ValueError("T_max must be >= 1")
    t_min = None
    best_avg = None
    for T in range(1, T_max + 1):
        sched = WindowSchedule(W=W, T=T, variant=schedule_variant)
        final, _ = run_wd(spec, sched, record="none", validate=validate)
        report = decode_success(
            final, spec, threshold=success_threshold, policy=success_policy
        )
        metric = report.avg if success_policy == "average" else report.max
        best_avg = metric if best_avg is None else min(best_avg, metric)
        if report.success:
            t_min = T
            break

    c_prime = a1 = steady_residual = hyp_residual = None
    if t_min is not None and compute_bounds:
        sched = WindowSchedule(W=W, T=t_min, variant=schedule_variant)
        _, traj = run_wd(spec, sched, record="per-window", validate=validate)
        steady = detect_steady_state(traj, tol=steady_tol)
        c_prime = steady.c_prime
        steady_residual = steady.residual
        if c_prime is not None:
            a1 = bound_a1(traj, c_prime, alpha=alpha)
        hyp_residual = _th2_left_edge_residual(traj)

    th2_finite = th2_infinite = th2_b1 = th2_b2 = None
    if land is not None and compute_bounds:
        try:
            th2 = bound_th2(spec, W, land, alpha=alpha)
        except ValueError:
            th2 = None
        if th2 is not None:
            th2_finite = th2.finite_w
            th2_infinite = th2.infinite_w
            th2_b1 = th2.B1
            th2_b2 = th2.B2

    return SpeedReport(
        epsilon=spec.epsilon,
        W=W,
        T_min=t_min,
        c_prime=c_prime,
        A1=a1,
        th2_finite=th2_finite,
        th2_infinite=th2_infinite,
        alpha=alpha,
        success_policy=success_policy,
        N=spec.N,
        w=spec.w,
        schedule=schedule_variant,
        T_max=T_max,
        best_avg=best_avg,
        steady_residual=steady_residual,
        th2_B1=th2_b1,
        th2_B2=th2_b2,
        th2_hypothesis_residual=hyp_residual,
    )
