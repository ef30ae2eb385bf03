"""Monte-Carlo DOA evaluation on the difference coarray.

Snapshots follow the narrowband model x = C A s + w with circular complex
Gaussian source amplitudes and noise. Lag statistics of the sample
covariance form a virtual ULA measurement; spatial smoothing turns it into
a covariance whose MUSIC pseudospectrum yields the estimates. Directions
are normalized as sin(theta) / 2 in [-0.5, 0.5].
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from .core import SensorArray, difference_coarray
from .coupling import CouplingModel, coupling_matrix

DEFAULT_GRID = 1 << 14
SWEEP_AXES = ("coupling_c1_mag", "failure_probability", "snr_db")


class IdentifiabilityError(ValueError):
    """Smoothed coarray too small for the requested source count."""


class EstimationFailure(RuntimeError):
    """Trial produced no usable estimate."""


@dataclass(frozen=True)
class Scenario:
    """One simulation configuration.

    thetas are the normalized source directions (distinct); powers default
    to all ones. snr_db is per-source power over noise power, so noise
    power is 10^(-snr/10); math.inf means noiseless. Each sensor fails
    independently per trial with failure_probability, shrinking the array
    for that trial.
    """

    array: SensorArray
    thetas: tuple
    powers: tuple = ()
    snapshots: int = 1000
    snr_db: float = 0.0
    coupling: CouplingModel | None = None
    failure_probability: float = 0.0
    trials: int = 500
    seed: int = 0
    grid_size: int = DEFAULT_GRID

    def __post_init__(self):
        th = tuple(float(t) for t in self.thetas)
        if not th:
            raise ValueError("need at least one source")
        if len(set(th)) != len(th):
            raise ValueError("source directions must be distinct")
        if any(not -0.5 <= t <= 0.5 for t in th):
            raise ValueError("normalized directions must lie in [-0.5, 0.5]")
        object.__setattr__(self, "thetas", th)
        p = tuple(float(x) for x in self.powers) or (1.0,) * len(th)
        if len(p) != len(th):
            raise ValueError("powers must match the source count")
        if any(x <= 0 for x in p):
            raise ValueError("source powers must be positive")
        object.__setattr__(self, "powers", p)
        if self.snapshots < 1:
            raise ValueError("need at least one snapshot")
        if not 0 <= self.failure_probability < 1:
            raise ValueError("failure probability must lie in [0, 1)")
        if self.trials < 1:
            raise ValueError("need at least one trial")
        if self.grid_size < 4:
            raise ValueError("grid too coarse")

    @property
    def noise_power(self):
        return 10.0 ** (-self.snr_db / 10.0)


def equally_spaced_thetas(k, lo=-0.45, hi=0.45):
    """k distinct normalized directions covering [lo, hi] uniformly."""
    if k < 1:
        raise ValueError("need at least one source")
    if k == 1:
        return ((lo + hi) / 2.0,)
    return tuple(float(t) for t in np.linspace(lo, hi, k))


def synthesize(scenario, rng):
    """Draw one trial's surviving array and its N x T snapshot matrix.

    Draw order is fixed for reproducibility: sensor failures, coupling
    phases (random-phase models only), source amplitudes, then noise.
    Raises EstimationFailure if every sensor fails.
    """
    pos = scenario.array.as_array()
    if scenario.failure_probability > 0:
        alive = rng.random(pos.size) >= scenario.failure_probability
        if not alive.any():
            raise EstimationFailure("all sensors failed")
        pos = pos[alive]
    surviving = SensorArray(tuple(int(e) for e in pos))
    C = None
    if scenario.coupling is not None:
        C = coupling_matrix(surviving, scenario.coupling, rng).entries
    th = np.asarray(scenario.thetas)
    steer = np.exp(2j * np.pi * np.outer(pos, th))
    amp = np.sqrt(np.asarray(scenario.powers) / 2.0)
    shape = (th.size, scenario.snapshots)
    s = amp[:, None] * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    x = steer @ s
    if C is not None:
        x = C @ x
    pw = scenario.noise_power
    if pw > 0:
        nshape = (pos.size, scenario.snapshots)
        x = x + math.sqrt(pw / 2.0) * (rng.standard_normal(nshape) + 1j * rng.standard_normal(nshape))
    return surviving, x


def coarray_statistics(x, array):
    """Average sample-covariance entries over equal lags.

    Returns the virtual ULA measurement restricted to the central
    contiguous lag run of the array's coarray, ordered lag -m..m. Each lag
    averages its w(m) duplicate entries.
    """
    pos = array.as_array()
    if x.shape[0] != pos.size:
        raise ValueError("snapshot rows must match the array size")
    R = (x @ x.conj().T) / x.shape[1]
    m = difference_coarray(array).central_ula_halfwidth
    lag = pos[:, None] - pos[None, :]
    sel = np.abs(lag) <= m
    acc = np.zeros(2 * m + 1, dtype=complex)
    cnt = np.zeros(2 * m + 1, dtype=np.int64)
    np.add.at(acc, lag[sel] + m, R[sel])
    np.add.at(cnt, lag[sel] + m, 1)
    return acc / cnt


def _local_maxima(y):
    # strictly above both neighbours, circularly (the direction grid wraps)
    return np.nonzero((y > np.roll(y, 1)) & (y > np.roll(y, -1)))[0]


def coarray_music(virtual, num_sources, grid_size=DEFAULT_GRID):
    """MUSIC estimates from a virtual ULA measurement vector.

    Spatial smoothing stacks the m+1 length-(m+1) shifted subvectors into a
    positive-semidefinite covariance; its noise eigenvectors score a
    pseudospectrum on a uniform direction grid and the num_sources largest
    strict local peaks come back sorted ascending.
    """
    v = np.asarray(virtual)
    if v.ndim != 1 or v.size % 2 == 0:
        raise ValueError("virtual measurement must be an odd-length vector")
    m = (v.size - 1) // 2
    if m + 1 <= num_sources:
        raise IdentifiabilityError(
            f"smoothed subarray of {m + 1} cannot separate {num_sources} sources")
    idx = np.arange(m + 1)
    Z = v[m + idx[:, None] - idx[None, :]]
    R = (Z @ Z.conj().T) / (m + 1)
    _, vecs = np.linalg.eigh(R)
    noise = vecs[:, : m + 1 - num_sources]
    grid = np.arange(grid_size) / grid_size - 0.5
    steer = np.exp(2j * np.pi * np.outer(idx, grid))
    den = (np.abs(noise.conj().T @ steer) ** 2).sum(axis=0)
    spectrum = 1.0 / np.maximum(den, 1e-300)
    peaks = _local_maxima(spectrum)
    if peaks.size < num_sources:
        raise EstimationFailure(
            f"found {peaks.size} spectrum peaks, need {num_sources}")
    top = peaks[np.argsort(spectrum[peaks])[-num_sources:]]
    return np.sort(grid[top])


def trial_seed(seed, value, index):
    """Deterministic per-trial seed from the campaign seed, the swept value
    and the trial index; independent of execution order."""
    bits = int(np.float64(value).view(np.uint64))
    return np.random.SeedSequence((int(seed), bits, int(index)))


def run_trial(scenario, seed):
    """One synthesize-estimate cycle. Returns ascending estimates, or None
    when the trial fails (all sensors dead, too few usable lags for the
    source count, or too few spectrum peaks)."""
    rng = np.random.default_rng(seed)
    try:
        surviving, x = synthesize(scenario, rng)
        virtual = coarray_statistics(x, surviving)
        return coarray_music(virtual, len(scenario.thetas), scenario.grid_size)
    except (EstimationFailure, IdentifiabilityError):
        return None


@dataclass(frozen=True)
class SweepPoint:
    value: float
    rmse: object            # float, or None when every trial failed
    success_count: int
    trial_count: int


@dataclass(frozen=True)
class SweepResult:
    axis: str
    points: tuple


def _with_axis_value(scenario, axis, value):
    if axis == "snr_db":
        return replace(scenario, snr_db=value)
    if axis == "failure_probability":
        return replace(scenario, failure_probability=value)
    if axis == "coupling_c1_mag":
        model = scenario.coupling
        if model is None:
            model = CouplingModel(q=15, c1_magnitude=0.0, phase_mode="random")
        return replace(scenario, coupling=replace(model, c1_magnitude=value))
    raise ValueError(f"unknown sweep axis {axis!r}; choose from {SWEEP_AXES}")


def run_sweep(base, axis, grid, workers=1, on_trial=None):
    """Monte-Carlo sweep of one scenario parameter.

    Runs base.trials independent trials per grid value; each trial's RNG
    stream derives from (base.seed, value, trial index), so the result does
    not depend on worker count or scheduling. Per-point RMSE averages the
    per-trial root-mean-square direction errors over successful trials
    (None if all failed); truth and estimates pair by sorted order.

    on_trial, if given, is called as on_trial(value, index, estimates) in
    deterministic order, estimates being None for failed trials.
    """
    if not len(grid):
        raise ValueError("sweep grid must be non-empty")
    points = []
    for value in grid:
        value = float(value)
        sc = _with_axis_value(base, axis, value)
        seeds = [trial_seed(base.seed, value, i) for i in range(sc.trials)]
        if workers > 1:
            from concurrent.futures import ThreadPoolExecutor
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(lambda s: run_trial(sc, s), seeds))
        else:
            results = [run_trial(sc, s) for s in seeds]
        truth = np.sort(np.asarray(sc.thetas))
        errs = []
        for i, est in enumerate(results):
            if on_trial is not None:
                on_trial(value, i, est)
            if est is not None:
                errs.append(math.sqrt(float(np.mean((est - truth) ** 2))))
        rmse = float(np.mean(errs)) if errs else None
        points.append(SweepPoint(value, rmse, len(errs), sc.trials))
    return SweepResult(axis, tuple(points))
