"""Classical Langevin ensembles M x'' + R x' = f and the Einstein-relation estimate."""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Tuple

import numpy as np
from scipy import signal
from tqdm import tqdm

from ..models.params import PhysParams
from ..models.stochastic import DiffusionEstimate, LangevinConfig, LangevinEnsemble
from .errors import InvalidParameter, UnstableDt, WindowTooEarly
from .noise import NoiseStream

logger = logging.getLogger(__name__)

BLOCK_SIZE = 500
FIT_WINDOW = (10.0, 100.0)


def _velocity_update(params: PhysParams, dt: float) -> Tuple[float, float]:
    """(a, b) of v_{n+1} = a v_n + b f_n with exact exponential damping of the drag."""
    if params.friction == 0:
        return 1.0, dt / params.mass
    a = math.exp(-params.friction * dt / params.mass)
    return a, -math.expm1(-params.friction * dt / params.mass) / params.friction


def _run_block(start: int, stop: int, cfg: LangevinConfig, params: PhysParams,
               a: float, b: float, stride: int) -> Tuple[np.ndarray, np.ndarray]:
    n = stop - start
    forces = np.empty((n, cfg.n_steps))
    for row, index in enumerate(range(start, stop)):
        forces[row] = NoiseStream(cfg.seed, index, params, cfg.dt).forces(cfg.n_steps)
    zi = np.full((n, 1), a * cfg.v0)
    velocity, _ = signal.lfilter([b], [1.0, -a], forces, axis=1, zi=zi)
    position = cfg.x0 + np.cumsum(velocity, axis=1) * cfg.dt

    picks = np.arange(stride - 1, cfg.n_steps, stride)
    x_rec = np.empty((n, picks.size + 1))
    v_rec = np.empty((n, picks.size + 1))
    x_rec[:, 0] = cfg.x0
    v_rec[:, 0] = cfg.v0
    x_rec[:, 1:] = position[:, picks]
    v_rec[:, 1:] = velocity[:, picks]
    return x_rec, v_rec


def simulate_langevin(cfg: LangevinConfig, params: PhysParams, threads: int = 1,
                      progress: bool = False) -> LangevinEnsemble:
    """Integrate the ensemble with counter-based per-trajectory noise.

    Trajectory i always draws from substream (seed, i), and blocks are written back by
    index, so the output does not depend on `threads`.
    """
    if params.friction > 0 and cfg.dt >= params.mass / (10.0 * params.friction):
        raise UnstableDt(
            f"dt = {cfg.dt} does not resolve the momentum relaxation time M/R = "
            f"{params.mass / params.friction:.6g}; need dt < M/(10R)"
        )
    a, b = _velocity_update(params, cfg.dt)
    stride = cfg.stride
    n_records = cfg.n_steps // stride + 1
    positions = np.empty((cfg.n_ensembles, n_records))
    velocities = np.empty((cfg.n_ensembles, n_records))
    bounds = [(s, min(s + BLOCK_SIZE, cfg.n_ensembles)) for s in range(0, cfg.n_ensembles, BLOCK_SIZE)]

    def work(bound):
        return bound, _run_block(bound[0], bound[1], cfg, params, a, b, stride)

    logger.info("langevin: %d trajectories x %d steps, dt = %g, %d thread(s)",
                cfg.n_ensembles, cfg.n_steps, cfg.dt, threads)
    bar = tqdm(total=len(bounds), desc="langevin", disable=not progress)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = pool.map(work, bounds)
            for (start, stop), (x_rec, v_rec) in results:
                positions[start:stop] = x_rec
                velocities[start:stop] = v_rec
                bar.update()
    else:
        for bound in bounds:
            (start, stop), (x_rec, v_rec) = work(bound)
            positions[start:stop] = x_rec
            velocities[start:stop] = v_rec
            bar.update()
    bar.close()

    times = np.arange(n_records) * stride * cfg.dt
    return LangevinEnsemble(times=times, positions=positions, velocities=velocities, x0=cfg.x0)


def fit_window(params: PhysParams, t_final: float) -> Tuple[float, float]:
    """Default MSD fit window [10, 100] M/R, clipped to the run length."""
    if params.friction == 0:
        raise InvalidParameter("the default fit window needs R > 0")
    relax = params.mass / params.friction
    return FIT_WINDOW[0] * relax, min(FIT_WINDOW[1] * relax, t_final)


def estimate_diffusion(ensemble: LangevinEnsemble, params: PhysParams,
                       window: Optional[Tuple[float, float]] = None) -> DiffusionEstimate:
    """D = (least-squares slope of the squared displacement) / 2, averaged over trajectories.

    Each trajectory contributes one slope, so the estimate and its standard error do not
    depend on trajectory order.
    """
    t = ensemble.times
    if window is None:
        window = fit_window(params, float(t[-1]))
    lo, hi = window
    if params.friction > 0 and lo < FIT_WINDOW[0] * params.mass / params.friction * (1.0 - 1e-12):
        raise WindowTooEarly(
            f"fit window starts at t = {lo:.6g}, before 10 momentum relaxation times "
            f"({FIT_WINDOW[0] * params.mass / params.friction:.6g})"
        )
    mask = (t >= lo) & (t <= hi)
    if np.count_nonzero(mask) < 2:
        raise WindowTooEarly(f"fit window [{lo:.6g}, {hi:.6g}] holds fewer than two records")

    tw = t[mask]
    centred = tw - tw.mean()
    sq = ensemble.squared_displacement()[:, mask]
    slopes = (sq - sq.mean(axis=1, keepdims=True)) @ centred / float(np.dot(centred, centred))
    n = slopes.size
    D = math.fsum(slopes) / n / 2.0
    stderr = float(np.std(slopes, ddof=1)) / math.sqrt(n) / 2.0
    logger.info("D estimate %.6g +/- %.2g over window [%.4g, %.4g]", D, stderr, lo, hi)
    return DiffusionEstimate(D=D, stderr=stderr, window=(float(lo), float(hi)), n_ensembles=n)


def velocity_variance(ensemble: LangevinEnsemble, t_min: float) -> Tuple[float, float]:
    """Ensemble velocity variance over records with t >= t_min and its standard error."""
    mask = ensemble.times >= t_min
    if not np.any(mask):
        raise InvalidParameter(f"no records at or after t = {t_min}")
    v = ensemble.velocities[:, mask]
    # records along one trajectory are correlated; the error bar uses per-trajectory means
    per_traj = np.mean(v * v, axis=1)
    value = float(np.mean(v * v) - np.mean(v) ** 2)
    stderr = float(np.std(per_traj, ddof=1) / math.sqrt(per_traj.size))
    return value, stderr
