"""Two-point comparison system bounding the PDE's spatial envelope.

In normalized variables U = u/u*, tau = a t, the running maximum ubar and
minimum ulow of U are squeezed by the ODE pair

    ubar' = k ubar^m (ubar^g - ulow^g) + q k ubar^m (ubar^g - ulow^g)^2
            + ubar (1 - ubar^a)
    ulow' = k ulow^m (ulow^g - ubar^g) + ulow (1 - ulow^a)

with k = chi0 nu u*^(m+g-1) / a and q = beta v* M0^2. When the signal is
known to stay above a floor v_lb, sensitivity saturation improves both
coefficients: k -> k / (1+v_lb)^beta and q -> q / (1+v_lb). The pair
preserves ulow <= 1 <= ubar and contracts to (1, 1) when k (2 + q0) < 1,
where q0 is the unreduced quadratic coefficient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Equilibrium, ModelParams
from .integrator import Trajectory
from .thresholds import v_lower_ab


class MinimalModelUnsupported(ValueError):
    """The comparison system needs the logistic source (a, b > 0)."""


class OrderViolation(RuntimeError):
    """The ordering ulow <= 1 <= ubar broke during integration."""


class TimeGridMismatch(ValueError):
    """PDE sample times do not land on the comparison-system time grid."""


@dataclass(frozen=True)
class RectangleParams:
    """Normalized coefficients of the comparison ODE pair."""

    kappa: float           # effective coupling (after any signal-floor gain)
    quad: float            # effective quadratic coefficient
    m: float
    alpha: float
    gamma: float
    a: float               # time scale of the tau = a t map
    kappa0: float          # raw coupling chi0 nu u*^(m+gamma-1) / a
    contraction: bool      # kappa (2 + beta v* M0^2) < 1
    mode: str              # "plain" or "signal-floor"


def normalize(
    params: ModelParams,
    eq: Equilibrium,
    m0: float,
    mode: str = "plain",
) -> RectangleParams:
    """Build comparison-system coefficients from the PDE parameters.

    `mode` selects the plain reduction or the signal-floor variant that
    divides the coupling by (1 + v_lb)^beta using the eventual signal
    floor of the logistic dynamics.
    """
    if params.minimal:
        raise MinimalModelUnsupported(
            "the comparison system requires a, b > 0; the mass-conserving "
            "model has no logistic relaxation to normalize by"
        )
    if mode not in ("plain", "signal-floor"):
        raise ValueError(f"unknown mode {mode!r}")
    if m0 < 0.0:
        raise ValueError(f"m0 must be >= 0, got {m0}")
    kappa0 = (
        params.chi0
        * params.nu
        * eq.u_star ** (params.m + params.gamma - 1.0)
        / params.a
    )
    quad0 = params.beta * eq.v_star * m0**2
    if mode == "signal-floor":
        floor = v_lower_ab(params)
        kappa = kappa0 / (1.0 + floor) ** params.beta
        quad = quad0 / (1.0 + floor)
    else:
        kappa = kappa0
        quad = quad0
    return RectangleParams(
        kappa=kappa,
        quad=quad,
        m=params.m,
        alpha=params.alpha,
        gamma=params.gamma,
        a=params.a,
        kappa0=kappa0,
        contraction=kappa * (2.0 + quad0) < 1.0,
        mode=mode,
    )


def rectangle_rhs(state: np.ndarray, rp: RectangleParams) -> np.ndarray:
    """Right-hand side of the (ubar, ulow) pair in normalized time."""
    ubar, ulow = state
    gap = ubar**rp.gamma - ulow**rp.gamma
    dbar = (
        rp.kappa * ubar**rp.m * gap
        + rp.quad * rp.kappa * ubar**rp.m * gap**2
        + ubar * (1.0 - ubar**rp.alpha)
    )
    dlow = -rp.kappa * ulow**rp.m * gap + ulow * (1.0 - ulow**rp.alpha)
    return np.array([dbar, dlow])


ORDER_TOL = 1e-9


@dataclass
class RectangleTrajectory:
    rp: RectangleParams
    tau: np.ndarray
    ubar: np.ndarray
    ulow: np.ndarray

    def log_gap(self) -> np.ndarray:
        """ln(ubar) - ln(ulow), the contraction functional."""
        return np.log(self.ubar) - np.log(self.ulow)

    @property
    def dt(self) -> float:
        return float(self.tau[1] - self.tau[0])


def integrate_rectangle(
    rp: RectangleParams,
    ubar0: float,
    ulow0: float,
    tau_end: float,
    dt: float = 1e-3,
) -> RectangleTrajectory:
    """Classical fourth-order Runge-Kutta on a fixed normalized-time grid.

    Raises OrderViolation when ulow <= 1 <= ubar (or positivity) fails
    beyond rounding tolerance, including on the initial pair.
    """
    if tau_end <= 0.0 or dt <= 0.0:
        raise ValueError("tau_end and dt must be positive")
    if not (0.0 < ulow0 <= 1.0 + ORDER_TOL and ubar0 >= 1.0 - ORDER_TOL):
        raise OrderViolation(
            f"initial pair must satisfy 0 < ulow <= 1 <= ubar, "
            f"got ({ubar0}, {ulow0})"
        )
    n_steps = max(1, int(round(tau_end / dt)))
    tau = np.linspace(0.0, n_steps * dt, n_steps + 1)
    ubar = np.empty(n_steps + 1)
    ulow = np.empty(n_steps + 1)
    state = np.array([float(ubar0), float(ulow0)])
    ubar[0], ulow[0] = state
    for i in range(n_steps):
        k1 = rectangle_rhs(state, rp)
        k2 = rectangle_rhs(state + 0.5 * dt * k1, rp)
        k3 = rectangle_rhs(state + 0.5 * dt * k2, rp)
        k4 = rectangle_rhs(state + dt * k3, rp)
        state = state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(state)):
            raise OrderViolation(f"non-finite state at tau = {tau[i + 1]}")
        if state[1] <= 0.0 or state[1] > 1.0 + ORDER_TOL or state[0] < 1.0 - ORDER_TOL:
            raise OrderViolation(
                f"ordering ulow <= 1 <= ubar broke at tau = {tau[i + 1]}: "
                f"({state[0]}, {state[1]})"
            )
        ubar[i + 1], ulow[i + 1] = state
    return RectangleTrajectory(rp=rp, tau=tau, ubar=ubar, ulow=ulow)


@dataclass(frozen=True)
class SandwichReport:
    """Envelope containment of a PDE run inside the comparison bounds."""

    n_times: int
    max_upper_excess: float    # max over time of (max u / u*) - ubar
    max_lower_excess: float    # max over time of ulow - (min u / u*)
    slack: float

    @property
    def ok(self) -> bool:
        return self.max_upper_excess <= self.slack and (
            self.max_lower_excess <= self.slack
        )


def verify_sandwich(
    rect: RectangleTrajectory,
    traj: Trajectory,
    eq: Equilibrium,
    slack: float,
) -> SandwichReport:
    """Check ulow(a t) - slack <= u/u* <= ubar(a t) + slack at every sample.

    PDE sample times are mapped by tau = a t and must land on the ODE grid
    to within 1e-9 relative; otherwise TimeGridMismatch.
    """
    taus = rect.rp.a * traj.times
    idx = np.rint(taus / rect.dt).astype(int)
    if np.any(idx < 0) or np.any(idx >= len(rect.tau)):
        raise TimeGridMismatch(
            "PDE samples extend beyond the comparison-system time grid"
        )
    misfit = np.abs(idx * rect.dt - taus)
    if np.any(misfit > 1e-9 * np.maximum(1.0, np.abs(taus))):
        raise TimeGridMismatch(
            f"PDE sample times miss the ODE grid by up to {misfit.max():.3e}"
        )
    upper = traj.u_max / eq.u_star - rect.ubar[idx]
    lower = rect.ulow[idx] - traj.u_min / eq.u_star
    return SandwichReport(
        n_times=len(taus),
        max_upper_excess=float(upper.max()),
        max_lower_excess=float(lower.max()),
        slack=slack,
    )


def contraction_tail(rect: RectangleTrajectory) -> tuple[float, float, bool]:
    """Final distance of (ubar, ulow) from (1, 1) and log-gap monotonicity."""
    final = max(abs(rect.ubar[-1] - 1.0), abs(rect.ulow[-1] - 1.0))
    gap = rect.log_gap()
    increase = float(np.max(np.diff(gap))) if len(gap) > 1 else 0.0
    monotone = increase <= ORDER_TOL
    return float(final), increase, monotone


def tau_grid_for(traj_times: np.ndarray, a: float, dt: float) -> float:
    """Smallest tau_end covering a t for all PDE sample times, grid-aligned."""
    tau_max = float(a * np.max(traj_times))
    return math.ceil(tau_max / dt - 1e-9) * dt
