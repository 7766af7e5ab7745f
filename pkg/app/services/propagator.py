import logging
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from app.models.state import ConstraintReport, ProjectiveState, TransformParams
from app.models.trajectory import DriftReport, IntegratorConfig, Trajectory
from app.services.projective_transform import DEFAULT_PARAMS, ProjectiveTransformService
from app.utils.errors import MaxStepsExceeded, NonFiniteState, StepUnderflow
from config.settings import Config

logger = logging.getLogger(__name__)

VectorField = Callable[[float, np.ndarray], np.ndarray]
Monitor = Callable[[np.ndarray], Optional[ConstraintReport]]

# Dormand-Prince 5(4)
C = np.array([0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0])
A = [
    [],
    [1.0 / 5.0],
    [3.0 / 40.0, 9.0 / 40.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
]
B = np.array([35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0])
# fifth minus fourth order weights
E = np.array(
    [
        71.0 / 57600.0,
        0.0,
        -71.0 / 16695.0,
        71.0 / 1920.0,
        -17253.0 / 339200.0,
        22.0 / 525.0,
        -1.0 / 40.0,
    ]
)
ORDER = 5
PI_ALPHA = 0.7 / ORDER
PI_BETA = 0.4 / ORDER


class PropagatorService:
    """Adaptive Dormand-Prince integration with constraint monitoring"""

    @staticmethod
    def dormand_prince_step(
        rhs: VectorField, t: float, y: np.ndarray, h: float, f0: Optional[np.ndarray] = None
    ) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        One step of the 5(4) pair. Returns the fifth-order state, the
        embedded error estimate and the derivative at the new point.
        """
        k = np.empty((7, y.size))
        k[0] = rhs(t, y) if f0 is None else f0
        for i in range(1, 7):
            k[i] = rhs(t + C[i] * h, y + h * np.dot(A[i], k[:i]))
        y_new = y + h * np.dot(B, k)
        return y_new, h * np.dot(E, k), k[6]

    @staticmethod
    def integrate(
        rhs: VectorField,
        x0: np.ndarray,
        span: Tuple[float, float],
        config: Optional[IntegratorConfig] = None,
        parameter: str = "t",
    ) -> Trajectory:
        """
        Integrate rhs from span[0] to span[1], landing exactly on span[1]
        """
        config = config or IntegratorConfig()
        start, end = float(span[0]), float(span[1])
        if start == end:
            raise ValueError("Integration span must have nonzero length")
        direction = np.sign(end - start)

        y = np.array(x0, dtype=float)
        f = np.asarray(rhs(start, y), dtype=float)
        if not (np.all(np.isfinite(y)) and np.all(np.isfinite(f))):
            raise NonFiniteState(f"Non-finite state or derivative at {parameter}={start}")

        h = PropagatorService._initial_step(y, f, start, end, config)
        t = start
        params, states, derivatives = [t], [y.copy()], [f.copy()]
        rejected = 0
        prev_err = 1.0
        steps = 0

        while direction * (end - t) > 0:
            if steps >= config.max_steps:
                raise MaxStepsExceeded(
                    f"Exceeded {config.max_steps} steps at {parameter}={t} before {end}"
                )
            floor = 16.0 * np.finfo(float).eps * max(abs(t), 1.0)
            if abs(end - t) <= floor:
                t = end
                params[-1] = end
                break
            last = direction * (t + h - end) >= 0
            if last:
                h = end - t
            if abs(h) <= floor:
                raise StepUnderflow(f"Step size {h:.3e} underflowed at {parameter}={t}")

            y_new, err_vec, f_new = PropagatorService.dormand_prince_step(rhs, t, y, h, f)
            err = PropagatorService._error_norm(err_vec, y, y_new, config)
            steps += 1

            if err <= 1.0:
                t = end if last else t + h
                y, f = y_new, f_new
                params.append(t)
                states.append(y.copy())
                derivatives.append(f.copy())
                factor = Config.SAFETY * max(err, 1e-10) ** -PI_ALPHA * prev_err**PI_BETA
                factor = min(Config.MAX_FACTOR, max(Config.MIN_FACTOR, factor))
                prev_err = max(err, 1e-4)
                h = direction * min(abs(h) * factor, config.max_step)
            else:
                rejected += 1
                if np.isfinite(err):
                    factor = max(Config.MIN_FACTOR, Config.SAFETY * err**-PI_ALPHA)
                else:
                    factor = Config.MIN_FACTOR
                logger.debug(f"Rejected step {h:.3e} at {parameter}={t} (error {err:.3e})")
                h *= min(factor, 1.0)

        logger.debug(f"Integrated {parameter} in {len(params) - 1} steps, {rejected} rejected")
        return Trajectory(
            params=np.array(params),
            states=np.array(states),
            derivatives=np.array(derivatives),
            parameter=parameter,
            rejected=rejected,
        )

    @staticmethod
    def propagate_with_monitor(
        rhs: VectorField,
        x0: np.ndarray,
        span: Tuple[float, float],
        config: Optional[IntegratorConfig] = None,
        monitor: Optional[Monitor] = None,
        parameter: str = "t",
    ) -> Tuple[Trajectory, DriftReport]:
        """
        Integrate and collect the constraint drift over every accepted step.
        A monitor returning None (Cartesian states) gives an empty report.
        """
        traj = PropagatorService.integrate(rhs, x0, span, config, parameter)
        report = DriftReport()
        if monitor is None:
            return traj, report
        reports = [monitor(state) for state in traj.states]
        reports = [r for r in reports if r is not None]
        traj.constraints = reports
        if reports:
            report.max_q_drift = max(abs(r.q_norm - 1.0) for r in reports)
            report.max_lambda_drift = max(abs(r.lam) for r in reports)
            report.samples = len(reports)
            if report.max_q_drift > Config.DRIFT_TOL or report.max_lambda_drift > Config.DRIFT_TOL:
                logger.warning(
                    f"Constraint drift above {Config.DRIFT_TOL}: |q|-1 {report.max_q_drift:.3e}, "
                    f"lambda {report.max_lambda_drift:.3e}"
                )
        return traj, report

    @staticmethod
    def projective_monitor(
        layout: str = "standard", params: TransformParams = DEFAULT_PARAMS
    ) -> Monitor:
        """
        Constraint monitor for flat projective arrays: standard (q, u, p, p_u, ...)
        or quasi (q, p, u, w, ...). The quasi layout implies n = m = -1.
        """

        def monitor(y: np.ndarray) -> ConstraintReport:
            if layout == "standard":
                state = ProjectiveState.from_array(y[0:8])
            elif layout == "quasi":
                state = ProjectiveState(y[0:3], y[6], y[3:6], y[7] / y[6] ** 2)
            else:
                raise ValueError(f"Unknown layout {layout}")
            return ProjectiveTransformService.constraint_report(state, params)

        return monitor

    @staticmethod
    def find_periapses(
        traj: Trajectory, radial_rate: Callable[[np.ndarray], float]
    ) -> List[float]:
        """
        Parameter values where the quasi-momentum w crosses zero from + to -,
        refined with Brent's method on the Hermite dense output
        """

        def rate(value: float) -> float:
            return radial_rate(traj.interpolate(value))

        rates = np.array([radial_rate(state) for state in traj.states])
        found = []
        for i in range(len(traj) - 1):
            if rates[i] > 0 >= rates[i + 1]:
                lo, hi = sorted((traj.params[i], traj.params[i + 1]))
                if rate(lo) * rate(hi) > 0:
                    continue
                found.append(float(optimize.brentq(rate, lo, hi, xtol=Config.ROOT_XTOL)))
        return found

    @staticmethod
    def states_at_times(
        traj: Trajectory, times: Sequence[float], time_channel: Optional[int] = None
    ) -> np.ndarray:
        """
        Dense-output states at physical times. Without a time channel the
        trajectory parameter is time itself; with one, each time is located
        on that state component by Brent's method and the state is read there.
        """
        if time_channel is None:
            return np.array([traj.interpolate(t) for t in times])

        clock = traj.states[:, time_channel]
        direction = np.sign(clock[-1] - clock[0]) or 1.0
        if np.any(direction * np.diff(clock) <= 0):
            raise ValueError(f"State component {time_channel} is not monotone along the trajectory")
        samples = []
        for t in times:
            lo, hi = sorted((clock[0], clock[-1]))
            if not lo <= t <= hi:
                raise ValueError(f"{t} outside trajectory time span [{lo}, {hi}]")
            idx = int(np.searchsorted(direction * clock, direction * t, side="right")) - 1
            idx = min(max(idx, 0), len(clock) - 2)
            if t == clock[idx]:
                samples.append(traj.states[idx])
                continue

            def offset(value: float, target: float = t) -> float:
                return traj.interpolate(value)[time_channel] - target

            a, b = sorted((traj.params[idx], traj.params[idx + 1]))
            value = optimize.brentq(offset, a, b, xtol=Config.ROOT_XTOL)
            samples.append(traj.interpolate(value))
        return np.array(samples)

    # helpers

    @staticmethod
    def _error_norm(
        err_vec: np.ndarray, y: np.ndarray, y_new: np.ndarray, config: IntegratorConfig
    ) -> float:
        scale = config.abs_tol + config.rel_tol * np.maximum(np.abs(y), np.abs(y_new))
        ratio = err_vec / scale
        if not np.all(np.isfinite(ratio)):
            return np.inf
        return float(np.sqrt(np.mean(ratio**2)))

    @staticmethod
    def _initial_step(
        y: np.ndarray, f: np.ndarray, start: float, end: float, config: IntegratorConfig
    ) -> float:
        direction = np.sign(end - start)
        length = abs(end - start)
        if config.initial_step is not None:
            return direction * min(abs(config.initial_step), length, config.max_step)
        scale = config.abs_tol + config.rel_tol * np.abs(y)
        d0 = np.sqrt(np.mean((y / scale) ** 2))
        d1 = np.sqrt(np.mean((f / scale) ** 2))
        h = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
        return direction * min(h, length, config.max_step)
