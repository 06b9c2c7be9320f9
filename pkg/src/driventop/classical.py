"""Classical driven-top dynamics on the unit angular-momentum sphere.

The Hamiltonian has a linear precession term (coefficient normalized to 1),
a quadratic torsion term beta, and a sinusoidal transverse drive gamma at
frequency freq, all dimensionless. The canonical time variable t' makes the
drive period exactly 1/freq and the undriven precession period exactly 1,
so the equations of motion carry a 2 pi prefactor:

    dLx/dt' = 2 pi (-Ly + gamma Lz cos(2 pi freq t'))
    dLy/dt' = 2 pi ( Lx - 2 beta Lx Lz)
    dLz/dt' = 2 pi ( 2 beta Lx Ly - gamma Lx cos(2 pi freq t'))

The right-hand side is grad(h) x l for h = Lz + beta Lx^2 +
gamma Ly cos(2 pi freq t'), so l . dl/dt' = 0 exactly and |l| is conserved.

Divergence exponents are therefore rates per unit t'. The classification
duration default (100 / linear coefficient in physical time) equals
100 / (2 pi) in t'.

Integration uses an embedded Dormand-Prince 5(4) pair. Trajectories are
advanced in fixed-size batches sharing one adaptive step (the step is
accepted only when every batch member meets tolerance), which keeps results
bit-reproducible for any worker count; after each accepted step the state is
projected back to the unit sphere, whose radius is a first integral.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from joblib import Parallel, delayed
from numba import njit

from .errors import ConfigError, IntegrationError
from .spinops import SphereDirection

__all__ = [
    "ClassicalParams",
    "AngularMomentumState",
    "StroboscopicMap",
    "ChaosClassification",
    "ChaosConfig",
    "FractionResult",
    "eom",
    "integrate",
    "stroboscopic_map",
    "classify_chaotic",
    "calibrate_chaos_threshold",
    "chaotic_fraction",
    "ExponentMap",
    "exponent_map",
    "classical_to_dimensionless",
    "quantum_to_dimensionless",
    "hammer_projection",
    "hammer_inverse",
    "regular_island_centers",
]

TWO_PI = 2.0 * math.pi

#: Default divergence-exponent threshold (per t'), 5x the integrable-case
#: bound of 0.02 per alpha-unit time; fraction scans recalibrate and record it.
DEFAULT_CHAOS_THRESHOLD = 5 * 0.02 * TWO_PI

#: Trajectory pairs per shared-step batch; fixed so batch composition never
#: depends on the worker count.
BATCH_PAIRS = 256


@dataclass(frozen=True)
class ClassicalParams:
    """Dimensionless driven-top coefficients (linear term normalized to 1)."""

    beta: float
    gamma: float
    freq: float

    def __post_init__(self) -> None:
        if not self.freq > 0:
            raise ConfigError(f"freq must be positive, got {self.freq}")
        if self.gamma < 0:
            raise ConfigError(f"gamma must be non-negative, got {self.gamma}")

    @property
    def drive_period(self) -> float:
        """Drive period in t' units."""
        return 1.0 / self.freq


@dataclass(frozen=True)
class AngularMomentumState:
    """Normalized angular momentum, a unit 3-vector (Lx, Ly, Lz)."""

    l: tuple

    def __post_init__(self) -> None:
        v = np.asarray(self.l, dtype=float)
        if v.shape != (3,):
            raise ConfigError(f"l must be a 3-vector, got shape {v.shape}")
        norm = float(np.linalg.norm(v))
        if abs(norm - 1.0) > 1e-9:
            raise ConfigError(f"|l| = {norm!r} deviates from 1 beyond 1e-9")
        object.__setattr__(self, "l", (float(v[0]), float(v[1]), float(v[2])))

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.l)

    @classmethod
    def from_direction(cls, direction: SphereDirection) -> "AngularMomentumState":
        return cls(tuple(direction.unit_vector))

    @property
    def direction(self) -> SphereDirection:
        return SphereDirection.from_vector(self.vector)


@dataclass(frozen=True)
class StroboscopicMap:
    """Trajectory sampled once per drive period; points has shape (n+1, 3)."""

    points: np.ndarray
    params: ClassicalParams

    def __len__(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class ChaosClassification:
    """Fitted divergence rate (per t') and thresholded verdict."""

    exponent: float
    is_chaotic: bool
    fit_residual: float
    threshold: float


@dataclass(frozen=True)
class ChaosConfig:
    """Protocol knobs for neighbor-divergence classification.

    separation is the initial pair distance; pairs are pulled back to it
    whenever their distance exceeds renorm_threshold at one of the n_checks
    uniformly spaced sample times; the exponent is the least-squares slope
    of log-distance over [0, first renormalization or duration].
    threshold None means: use the module default (see
    DEFAULT_CHAOS_THRESHOLD); calibrate_chaos_threshold can supply a
    measured alternative.
    """

    separation: float = 1e-8
    renorm_threshold: float = 1e-4
    duration: float = 100.0
    n_checks: int = 500
    threshold: float | None = None
    rtol: float = 1e-10
    atol: float = 1e-12


@dataclass(frozen=True)
class FractionResult:
    """Chaotic-fraction scan output; fraction lies in [0, 1]."""

    params: ClassicalParams
    fraction: float
    n_chaotic: int
    n_samples: int
    threshold: float
    exponents: np.ndarray = field(repr=False)

    @property
    def percent(self) -> float:
        return 100.0 * self.fraction


def _rhs(t: float, y: np.ndarray, beta: float, gamma: float, freq: float) -> np.ndarray:
    """Batched right-hand side; y has shape (n, 3)."""
    drive = gamma * math.cos(TWO_PI * freq * t)
    x = y[:, 0]
    yy = y[:, 1]
    z = y[:, 2]
    out = np.empty_like(y)
    out[:, 0] = -yy + drive * z
    out[:, 1] = x - 2.0 * beta * x * z
    out[:, 2] = 2.0 * beta * x * yy - drive * x
    out *= TWO_PI
    return out


def eom(state: AngularMomentumState, p: ClassicalParams, t: float) -> np.ndarray:
    """dL'/dt' at time t (t' clock); tangent to the sphere by construction."""
    return _rhs(t, state.vector[None, :], p.beta, p.gamma, p.freq)[0]


# Dormand-Prince 5(4) tableau.
_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0])
_DP_A = [
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
]
_DP_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
_DP_E = np.array(
    [71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40]
)
_DP_A_DENSE = np.zeros((5, 5))
for _i, _row in enumerate(_DP_A):
    _DP_A_DENSE[_i, : len(_row)] = _row
del _i, _row
for _arr in (_DP_C, _DP_B, _DP_E, _DP_A_DENSE, *_DP_A):
    _arr.setflags(write=False)
del _arr


@njit(cache=True)
def _rhs_rows(t, y, beta, gamma, freq, out):
    c = math.cos(TWO_PI * freq * t)
    for r in range(y.shape[0]):
        x = y[r, 0]
        yy = y[r, 1]
        z = y[r, 2]
        out[r, 0] = TWO_PI * (-yy + gamma * c * z)
        out[r, 1] = TWO_PI * (x - 2.0 * beta * x * z)
        out[r, 2] = TWO_PI * (2.0 * beta * x * yy - gamma * c * x)


@njit(cache=True)
def _advance_kernel(
    y0,
    times,
    beta,
    gamma,
    freq,
    rtol,
    atol,
    separation,
    renorm_threshold,
    out,
    log_dist,
    first_cross,
    track_pairs,
):
    """Evolve a batch of states with one shared adaptive embedded RK step.

    y0 has shape (n, 3); sampled states land in out with shape
    (len(times), n, 3). With track_pairs, rows form seed/neighbor pairs
    (seeds at even rows): at each sample time the pair distances go into
    log_dist and pairs beyond renorm_threshold are pulled back to the
    initial separation (first crossing index recorded).
    Returns 0, or -1 on step-size underflow.
    """
    n_rows = y0.shape[0]
    n_pairs = n_rows // 2
    y = y0.copy()
    k = np.empty((7, n_rows, 3))
    yk = np.empty((n_rows, 3))
    y_new = np.empty((n_rows, 3))
    t = times[0]
    span = times[-1] - times[0]
    h_min = max(span, 1.0) * 1e-14
    h = min(1e-3, span)
    _rhs_rows(t, y, beta, gamma, freq, k[0])
    for r in range(n_rows):
        for c in range(3):
            out[0, r, c] = y[r, c]
    if track_pairs:
        for j in range(n_pairs):
            log_dist[0, j] = math.log(separation)

    for idx in range(1, times.shape[0]):
        target = times[idx]
        while t < target:
            clipped = target - t <= h
            h_try = target - t if clipped else h
            for stage in range(5):
                for r in range(n_rows):
                    ax = 0.0
                    ay = 0.0
                    az = 0.0
                    for j in range(stage + 1):
                        a = _DP_A_DENSE[stage, j]
                        ax += a * k[j, r, 0]
                        ay += a * k[j, r, 1]
                        az += a * k[j, r, 2]
                    yk[r, 0] = y[r, 0] + h_try * ax
                    yk[r, 1] = y[r, 1] + h_try * ay
                    yk[r, 2] = y[r, 2] + h_try * az
                _rhs_rows(
                    t + _DP_C[stage + 1] * h_try, yk, beta, gamma, freq, k[stage + 1]
                )
            err_norm = 0.0
            for r in range(n_rows):
                for c in range(3):
                    acc = 0.0
                    for j in range(6):
                        acc += _DP_B[j] * k[j, r, c]
                    y_new[r, c] = y[r, c] + h_try * acc
            _rhs_rows(t + h_try, y_new, beta, gamma, freq, k[6])
            for r in range(n_rows):
                for c in range(3):
                    acc = 0.0
                    for j in range(7):
                        acc += _DP_E[j] * k[j, r, c]
                    err = abs(h_try * acc)
                    ay = abs(y[r, c])
                    an = abs(y_new[r, c])
                    scale = atol + rtol * (ay if ay > an else an)
                    ratio = err / scale
                    if ratio > err_norm:
                        err_norm = ratio
            if err_norm <= 1.0:
                t = target if clipped else t + h_try
                # radius is a first integral; project out its numerical drift
                for r in range(n_rows):
                    norm = math.sqrt(
                        y_new[r, 0] ** 2 + y_new[r, 1] ** 2 + y_new[r, 2] ** 2
                    )
                    y[r, 0] = y_new[r, 0] / norm
                    y[r, 1] = y_new[r, 1] / norm
                    y[r, 2] = y_new[r, 2] / norm
                factor = (
                    5.0
                    if err_norm == 0.0
                    else min(5.0, max(0.2, 0.9 * err_norm**-0.2))
                )
                h_grown = h_try * factor
                if clipped:
                    if h_grown > h:
                        h = h_grown
                else:
                    h = h_grown
                _rhs_rows(t, y, beta, gamma, freq, k[0])
            else:
                h = h_try * max(0.2, 0.9 * err_norm**-0.2)
                if h < h_min:
                    return -1
        for r in range(n_rows):
            for c in range(3):
                out[idx, r, c] = y[r, c]
        if track_pairs:
            renormed = False
            for j in range(n_pairs):
                dx = y[2 * j + 1, 0] - y[2 * j, 0]
                dy = y[2 * j + 1, 1] - y[2 * j, 1]
                dz = y[2 * j + 1, 2] - y[2 * j, 2]
                dist = math.sqrt(dx * dx + dy * dy + dz * dz)
                log_dist[idx, j] = math.log(max(dist, 1e-300))
                if dist > renorm_threshold:
                    if first_cross[j] < 0:
                        first_cross[j] = idx
                    s = separation / dist
                    y[2 * j + 1, 0] = y[2 * j, 0] + dx * s
                    y[2 * j + 1, 1] = y[2 * j, 1] + dy * s
                    y[2 * j + 1, 2] = y[2 * j, 2] + dz * s
                    renormed = True
            if renormed:
                _rhs_rows(t, y, beta, gamma, freq, k[0])
    return 0


def _integrate_samples(
    y0: np.ndarray, times: np.ndarray, p: ClassicalParams, rtol: float, atol: float
) -> np.ndarray:
    """Advance a batch through all sample times with one shared adaptive step.

    Returns an array of shape (len(times), n, 3).
    """
    y = np.array(y0, dtype=float)
    if y.ndim != 2 or y.shape[1] != 3:
        raise ConfigError(f"batch must have shape (n, 3), got {y.shape}")
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or len(times) < 1 or np.any(np.diff(times) <= 0):
        raise ConfigError("sample times must be strictly increasing")
    out = np.empty((len(times), *y.shape))
    status = _advance_kernel(
        y,
        times,
        p.beta,
        p.gamma,
        p.freq,
        rtol,
        atol,
        0.0,
        0.0,
        out,
        np.empty((1, 1)),
        np.empty(1, dtype=np.int64),
        False,
    )
    if status != 0:
        raise IntegrationError(f"step size underflow while integrating at {p!r}")
    return out


def integrate(
    state0: AngularMomentumState,
    p: ClassicalParams,
    times,
    rtol: float = 1e-10,
    atol: float = 1e-12,
) -> np.ndarray:
    """Trajectory of one state sampled at the given strictly increasing times.

    Returns shape (len(times), 3) with times[0] holding the initial state.
    """
    traj = _integrate_samples(state0.vector[None, :], np.asarray(times, float), p, rtol, atol)
    return traj[:, 0, :]


def stroboscopic_map(
    state0: AngularMomentumState, p: ClassicalParams, n_periods: int = 1000
) -> StroboscopicMap:
    """Sample the trajectory exactly at multiples of the drive period 1/freq."""
    if n_periods < 1:
        raise ConfigError("n_periods must be >= 1")
    times = np.arange(n_periods + 1) * p.drive_period
    points = integrate(state0, p, times)
    points.setflags(write=False)
    return StroboscopicMap(points=points, params=p)


def _neighbor_offsets(seeds: np.ndarray, separation: float) -> np.ndarray:
    """Deterministic neighbors at the given distance, tangent to the sphere."""
    ref = np.zeros_like(seeds)
    near_pole = np.abs(seeds[:, 2]) > 0.9
    ref[:, 2] = 1.0
    ref[near_pole] = [1.0, 0.0, 0.0]
    tangent = np.cross(seeds, ref)
    tangent /= np.linalg.norm(tangent, axis=1, keepdims=True)
    neighbors = seeds + separation * tangent
    return neighbors / np.linalg.norm(neighbors, axis=1, keepdims=True)


def _classify_batch(seeds: np.ndarray, p: ClassicalParams, cfg: ChaosConfig):
    """Divergence exponents and fit residuals for a batch of seed points."""
    n = seeds.shape[0]
    pair = np.empty((2 * n, 3))
    pair[0::2] = seeds
    pair[1::2] = _neighbor_offsets(seeds, cfg.separation)
    times = np.linspace(0.0, cfg.duration, cfg.n_checks + 1)
    log_dist = np.empty((cfg.n_checks + 1, n))
    first_cross = np.full(n, -1, dtype=np.int64)

    status = _advance_kernel(
        pair,
        times,
        p.beta,
        p.gamma,
        p.freq,
        cfg.rtol,
        cfg.atol,
        cfg.separation,
        cfg.renorm_threshold,
        np.empty((cfg.n_checks + 1, 2 * n, 3)),
        log_dist,
        first_cross,
        True,
    )
    if status != 0:
        raise IntegrationError(
            f"step size underflow while classifying a batch at {p!r}"
        )

    exponents = np.empty(n)
    residuals = np.empty(n)
    for j in range(n):
        k_end = first_cross[j] if first_cross[j] >= 0 else cfg.n_checks
        k_end = max(k_end, 1)
        ts = times[: k_end + 1]
        ys = log_dist[: k_end + 1, j]
        slope, intercept = np.polyfit(ts, ys, 1)
        exponents[j] = slope
        residuals[j] = float(np.sqrt(np.mean((ys - (slope * ts + intercept)) ** 2)))
    return exponents, residuals


def classify_chaotic(
    state0: AngularMomentumState, p: ClassicalParams, cfg: ChaosConfig | None = None
) -> ChaosClassification:
    """Classify one seed by its neighbor-divergence exponent."""
    cfg = cfg or ChaosConfig()
    threshold = cfg.threshold if cfg.threshold is not None else DEFAULT_CHAOS_THRESHOLD
    exps, residuals = _classify_batch(state0.vector[None, :], p, cfg)
    exponent = float(exps[0])
    return ChaosClassification(
        exponent=exponent,
        is_chaotic=exponent > threshold,
        fit_residual=float(residuals[0]),
        threshold=threshold,
    )


def _sample_sphere(n_samples: int, seed: int) -> np.ndarray:
    """Area-uniform points on the sphere from a counter-keyed RNG stream."""
    rng = np.random.default_rng([seed, 0x5EED])
    z = rng.uniform(-1.0, 1.0, n_samples)
    phi = rng.uniform(0.0, TWO_PI, n_samples)
    s = np.sqrt(1.0 - z**2)
    return np.column_stack([s * np.cos(phi), s * np.sin(phi), z])


def _batched_exponents(
    seeds: np.ndarray, p: ClassicalParams, cfg: ChaosConfig, workers: int
) -> np.ndarray:
    chunks = [seeds[i : i + BATCH_PAIRS] for i in range(0, len(seeds), BATCH_PAIRS)]
    if workers > 1 and len(chunks) > 1:
        results = Parallel(n_jobs=workers)(
            delayed(_classify_batch)(chunk, p, cfg) for chunk in chunks
        )
    else:
        results = [_classify_batch(chunk, p, cfg) for chunk in chunks]
    return np.concatenate([exps for exps, _ in results])


def calibrate_chaos_threshold(
    p: ClassicalParams,
    n_samples: int = 500,
    cfg: ChaosConfig | None = None,
    seed: int = 0,
    workers: int = 1,
) -> float:
    """Threshold = 5x the largest exponent of the undriven (gamma=0) system.

    Uses the same seed set as a fraction scan with the same (n_samples, seed),
    so a scan and its calibration share phase-space coverage. Rare seeds that
    shadow the undriven saddle can inflate the max (that is the known
    misclassification risk of finite-window fits), so scans default to the
    fixed module threshold and this calibration is opt-in via cfg.threshold.
    """
    cfg = cfg or ChaosConfig()
    integrable = replace(p, gamma=0.0)
    seeds = _sample_sphere(n_samples, seed)
    exponents = _batched_exponents(seeds, integrable, cfg, workers)
    return 5.0 * float(np.max(exponents))


def chaotic_fraction(
    p: ClassicalParams,
    n_samples: int = 2000,
    cfg: ChaosConfig | None = None,
    seed: int = 0,
    workers: int = 1,
) -> FractionResult:
    """Fraction of area-uniform seeds classified chaotic.

    With cfg.threshold None the fixed module threshold applies (5x the
    integrable-case exponent bound); the threshold actually used is recorded
    in the result. Batches share one adaptive step, so results are identical
    for any worker count.
    """
    if n_samples < 1:
        raise ConfigError("n_samples must be >= 1")
    cfg = cfg or ChaosConfig()
    threshold = cfg.threshold
    if threshold is None:
        threshold = DEFAULT_CHAOS_THRESHOLD
    seeds = _sample_sphere(n_samples, seed)
    exponents = _batched_exponents(seeds, p, cfg, workers)
    n_chaotic = int(np.sum(exponents > threshold))
    return FractionResult(
        params=p,
        fraction=n_chaotic / n_samples,
        n_chaotic=n_chaotic,
        n_samples=n_samples,
        threshold=threshold,
        exponents=exponents,
    )


@dataclass(frozen=True)
class ExponentMap:
    """Divergence exponents over a grid of initial directions.

    thetas and phis hold cell-center angles; values[i, j] is the fitted
    exponent for the seed at (thetas[i], phis[j]); chaotic applies the
    recorded threshold.
    """

    thetas: np.ndarray
    phis: np.ndarray
    values: np.ndarray
    threshold: float

    @property
    def chaotic(self) -> np.ndarray:
        return self.values > self.threshold


def exponent_map(
    p: ClassicalParams,
    grid: tuple[int, int] = (48, 96),
    cfg: ChaosConfig | None = None,
    workers: int = 1,
) -> ExponentMap:
    """Classify a full cell-centered (theta, phi) grid of seeds.

    Batch composition is fixed by index, so the map is bitwise identical
    for every worker count.
    """
    n_theta, n_phi = grid
    if n_theta < 1 or n_phi < 1:
        raise ConfigError(f"grid must be at least 1x1, got {grid}")
    cfg = cfg or ChaosConfig()
    threshold = cfg.threshold if cfg.threshold is not None else DEFAULT_CHAOS_THRESHOLD
    thetas = (np.arange(n_theta) + 0.5) * math.pi / n_theta
    phis = (np.arange(n_phi) + 0.5) * TWO_PI / n_phi
    tt, pp = np.meshgrid(thetas, phis, indexing="ij")
    seeds = np.column_stack(
        [
            (np.sin(tt) * np.cos(pp)).ravel(),
            (np.sin(tt) * np.sin(pp)).ravel(),
            np.cos(tt).ravel(),
        ]
    )
    values = _batched_exponents(seeds, p, cfg, workers).reshape(n_theta, n_phi)
    values.setflags(write=False)
    return ExponentMap(thetas=thetas, phis=phis, values=values, threshold=threshold)


def classical_to_dimensionless(
    alpha: float, beta: float, gamma: float, freq: float, l_magnitude: float = 1.0
) -> ClassicalParams:
    """Dimensionless coefficients from physical classical parameters.

    alpha, beta, gamma are angular rates (rad/s, as in the classical
    Hamiltonian); freq is in Hz. Mapping: beta' = beta |L| / alpha,
    gamma' = gamma / alpha, freq' = 2 pi freq / alpha.
    """
    if alpha == 0:
        raise ConfigError("linear coefficient alpha must be nonzero")
    return ClassicalParams(
        beta=beta * l_magnitude / alpha,
        gamma=gamma / alpha,
        freq=TWO_PI * freq / alpha,
    )


def quantum_to_dimensionless(
    spin_i: float, gamma_n: float, b0: float, q: float, b1: float, drive_freq: float
) -> ClassicalParams:
    """Dimensionless coefficients from quantum-side parameters (all in Hz, T).

    Mapping: beta' = Q I / (gamma_n B0), gamma' = B1 / B0,
    freq' = f / (gamma_n B0); the quantum linear rate gamma_n B0 (Hz) plays
    the role of alpha / 2 pi.
    """
    if gamma_n * b0 == 0:
        raise ConfigError("linear term gamma_n * b0 must be nonzero")
    return ClassicalParams(
        beta=q * spin_i / (gamma_n * b0),
        gamma=b1 / b0,
        freq=drive_freq / (gamma_n * b0),
    )


def _hammer_xy(theta, phi):
    """Vectorized equal-area projection; latitude pi/2 - theta, cut at phi = pi."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    lat = math.pi / 2.0 - theta
    lon = np.where(phi > math.pi, phi - TWO_PI, phi)
    denom = np.sqrt(1.0 + np.cos(lat) * np.cos(lon / 2.0))
    x = 2.0 * math.sqrt(2.0) * np.cos(lat) * np.sin(lon / 2.0) / denom
    y = math.sqrt(2.0) * np.sin(lat) / denom
    return x, y


def hammer_projection(direction: SphereDirection):
    """Equal-area planar coordinates (x, y); poles map to (0, +-sqrt(2))."""
    x, y = _hammer_xy(direction.theta, direction.phi)
    return float(x), float(y)


def hammer_inverse(x: float, y: float) -> SphereDirection:
    """Inverse projection; round-trips with hammer_projection below 1e-12."""
    z2 = 1.0 - (x / 4.0) ** 2 - (y / 2.0) ** 2
    if z2 < 0.5:  # outside the projection ellipse
        raise ConfigError(f"point ({x}, {y}) lies outside the projected sphere")
    z = math.sqrt(z2)
    lon = 2.0 * math.atan2(z * x, 2.0 * (2.0 * z2 - 1.0))
    lat = math.asin(max(-1.0, min(1.0, z * y)))
    theta = math.pi / 2.0 - lat
    phi = lon % TWO_PI
    if phi >= TWO_PI:
        phi = 0.0
    return SphereDirection(theta=min(math.pi, max(0.0, theta)), phi=phi)


def regular_island_centers(p: ClassicalParams) -> list[SphereDirection]:
    """Fixed points of the undriven flow that seed the regular islands.

    For beta > 1/2: two centers at Lz = 1/(2 beta), Ly = 0,
    Lx = +-sqrt(1 - Lz^2), plus the stable south pole. The north pole is a
    saddle in this regime and is not included.
    """
    if p.beta <= 0.5:
        return [SphereDirection(math.pi, 0.0)]
    z = 1.0 / (2.0 * p.beta)
    theta = math.acos(z)
    return [
        SphereDirection(theta, 0.0),
        SphereDirection(theta, math.pi),
        SphereDirection(math.pi, 0.0),
    ]
