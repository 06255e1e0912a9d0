"""
Explicit time integration: CFL step size, classical RK4, and sampled trajectories.

The scaled equations carry damping with unit rate and an O(ε) ion sound speed, so the
explicit scheme has no ε-stiffness; the step is bounded by the electron sound speed and
by DT_MAX, which keeps the damping timescale resolved.
"""

from __future__ import annotations

import logging

import numpy as np

from spectral.exceptions import SpectralError

from ..exceptions import IntegrationError, PlasmaError, UnstableStateError
from .equations import check_state, rhs, sound_speed, state_field
from .types import BepState, PlasmaParams, Sample, State, StepPolicy, System, Trajectory

logger = logging.getLogger(__name__)

# Sample times closer than this (relative to the interval) count as reached.
LANDING_RTOL = 1e-12


def _speed(u: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(u * u, axis=0))


def max_characteristic_speed(state: State, params: PlasmaParams) -> float:
    """
    λ_max = max(|u_e| + √p_e′(ρ_e), |u_i| + ε√p_i′(ρ_i)) over all nodes.

    The unipolar state has only the electron term.
    """
    lam = np.max(_speed(state.u_e) + sound_speed(params.electron_law, state.rho_e))
    if isinstance(state, BepState):
        ion = _speed(state.u_i) + params.epsilon * sound_speed(params.ion_law, state.rho_i)
        lam = max(lam, np.max(ion))
    return float(lam)


def cfl_dt(state: State, params: PlasmaParams, policy: StepPolicy | None = None) -> float:
    """
    Step size cfl·dx/λ_max, capped at dt_max.

    Args:
        state: current state (BEP or UEP)
        params: model parameters
        policy: supplies cfl_number and dt_max; defaults to StepPolicy(0, 1)

    Returns:
        The admissible step

    Raises:
        UnstableStateError: if λ_max is not finite
    """
    policy = policy or StepPolicy(t_end=0.0, sample_interval=1.0)
    with np.errstate(invalid="ignore", over="ignore"):
        lam = max_characteristic_speed(state, params)
    if not np.isfinite(lam):
        raise UnstableStateError(f"Characteristic speed is not finite ({lam})")
    if lam == 0:
        return policy.dt_max
    return float(min(policy.cfl_number * state.grid.spacing / lam, policy.dt_max))


def _restore_neutrality(state: State) -> State:
    """Subtract the roundoff-level charge mean, split evenly between the species."""
    grid = state.grid
    if isinstance(state, BepState):
        drift = float(grid.mean(state.rho_i - state.rho_e))
        if drift == 0.0:
            return state
        return BepState(
            grid, state.rho_i - drift / 2, state.u_i, state.rho_e + drift / 2, state.u_e
        )
    drift = float(grid.mean(state.ion_density - state.rho_e))
    if drift == 0.0:
        return state
    return state.with_fields((state.rho_e + drift, state.u_e))


def step_rk4(state: State, params: PlasmaParams, dt: float) -> State:
    """
    Advance one classical four-stage Runge-Kutta step.

    Every stage evaluates the dealiased right-hand side of the state's system.

    Raises:
        DensityFloorError: if a stage or the result falls below the density floor
    """
    k1 = rhs(state, params)
    k2 = rhs(state.axpy(dt / 2, k1), params)
    k3 = rhs(state.axpy(dt / 2, k2), params)
    k4 = rhs(state.axpy(dt, k3), params)
    increment = tuple(a + 2 * b + 2 * c + d for a, b, c, d in zip(k1, k2, k3, k4))
    result = _restore_neutrality(state.axpy(dt / 6, increment))
    check_state(result, params.density_floor)
    return result


def make_sample(t: float, state: State) -> Sample:
    phi, E = state_field(state)
    return Sample(t=t, state=state, phi=phi, E=E)


def integrate(state: State, params: PlasmaParams, policy: StepPolicy) -> Trajectory:
    """
    Integrate from t = 0 to policy.t_end, sampling every policy.sample_interval.

    The step is recomputed from the CFL condition every step and truncated so the
    integration lands exactly on each sample time and on t_end.

    Args:
        state: initial state (BEP or UEP)
        params: model parameters
        policy: step and sampling policy

    Returns:
        Trajectory with the initial sample and one sample per sample time

    Raises:
        IntegrationError: wrapping the model or solver error, with the failure time
    """
    params.check_order(state.grid.d)
    system = System.BEP if isinstance(state, BepState) else System.UEP
    t = 0.0
    steps = 0
    try:
        check_state(state, params.density_floor, t)
        samples = [make_sample(0.0, state)]
        for target in policy.sample_times()[1:]:
            target = float(target)
            while target - t > LANDING_RTOL * policy.sample_interval:
                dt = min(cfl_dt(state, params, policy), target - t)
                state = step_rk4(state, params, dt)
                t = t + dt
                steps += 1
            t = target
            samples.append(make_sample(t, state))
    except (PlasmaError, SpectralError) as exc:
        logger.debug("Integration of %s stopped at t=%.6g: %s", system.value, t, exc)
        raise IntegrationError(t, exc) from exc

    logger.debug(
        "Integrated %s to t=%.6g in %d steps (%d samples)", system.value, t, steps, len(samples)
    )
    return Trajectory(system=system, samples=tuple(samples))
