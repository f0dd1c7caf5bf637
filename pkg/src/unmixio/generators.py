"""Seeded generators for the three synthetic signal families and for mixing.

Families
--------
- ``gen_var5``: the five-node order-2 autoregressive toy network.
- ``gen_oscillators``: three noisy epoched sinusoids, two sharing 10 Hz.
- ``gen_ampmod``: three amplitude-modulated carriers with independent envelopes.

Each generator draws from its own PRNG stream, so the same seed gives the
same data whichever other generators run.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import EpochedSeries, SeedSpec, SingularMatrixError, as_series, standard_normal, uniform

# Default PRNG stream ids, one per family.
STREAM_VAR5 = 1
STREAM_OSCILLATORS = 2
STREAM_AMPMOD = 3

AR5_LAG1 = np.array(
    [
        [1.5, -0.25, 0.0, 0.0, 0.0],
        [-0.2, 1.8, 0.0, 0.0, 0.0],
        [0.0, 0.9, 1.65, 0.0, 0.0],
        [0.0, 0.9, 0.0, 1.65, 0.0],
        [0.0, 0.9, 0.0, 0.0, 1.65],
    ]
)
AR5_LAG2 = np.array(
    [
        [-0.95, 0.0, 0.0, 0.0, 0.0],
        [0.0, -0.96, 0.0, 0.0, 0.0],
        [0.0, -0.8, -0.95, 0.0, 0.0],
        [0.0, -0.8, 0.0, -0.95, 0.0],
        [0.0, -0.8, 0.0, 0.0, -0.95],
    ]
)

# Ordered (receiver, sender) pairs of the toy network, 0-based.
AR5_TRUE_EDGES = frozenset({(1, 0), (0, 1), (2, 1), (3, 1), (4, 1)})


def companion(coefs) -> np.ndarray:
    """Companion matrix of a VAR with coefficient stack ``(q, p, p)``."""
    coefs = np.asarray(coefs, dtype=np.float64)
    q, p, _ = coefs.shape
    c = np.zeros((q * p, q * p))
    c[:p, :] = np.hstack(list(coefs))
    c[p:, :-p] = np.eye((q - 1) * p)
    return c


def is_stable(coefs) -> bool:
    """True when every root of the VAR lies strictly inside the unit circle."""
    return bool(np.max(np.abs(np.linalg.eigvals(companion(coefs)))) < 1.0)


def simulate_var(coefs, n_samples: int, rng: np.random.Generator, burn_in: int = 1000,
                 innovation_scale=None) -> np.ndarray:
    """Simulate ``x_t = sum_k A_k x_{t-k} + e_t`` from a zero start.

    ``e_t`` is standard Gaussian, optionally scaled per channel by
    ``innovation_scale``. The first ``burn_in`` samples are dropped.
    """
    coefs = np.asarray(coefs, dtype=np.float64)
    q, p, _ = coefs.shape
    total = n_samples + burn_in
    e = standard_normal(rng, (total, p))
    if innovation_scale is not None:
        e = e * np.asarray(innovation_scale, dtype=np.float64)
    x = np.zeros((total + q, p))
    # lag-stacked coefficients: x_t = [x_{t-1}, ..., x_{t-q}] @ big
    big = np.vstack([a.T for a in coefs])
    for t in range(q, total + q):
        past = x[t - q:t][::-1].ravel()
        x[t] = past @ big + e[t - q]
    return x[q + burn_in:]


@dataclass(frozen=True, eq=False)
class Ar5Spec:
    """Five-channel order-2 network; coefficients may be overridden for tests."""

    lag1: np.ndarray = field(default_factory=lambda: AR5_LAG1.copy())
    lag2: np.ndarray = field(default_factory=lambda: AR5_LAG2.copy())
    burn_in: int = 1000

    def __post_init__(self):
        if not is_stable(self.coefs):
            raise ValueError("VAR coefficients are not stable")

    @property
    def coefs(self) -> np.ndarray:
        return np.stack([np.asarray(self.lag1, float), np.asarray(self.lag2, float)])


def gen_var5(n_samples: int = 25600, seed: SeedSpec = SeedSpec(0, STREAM_VAR5),
             spec: Optional[Ar5Spec] = None) -> np.ndarray:
    """Simulate the five-node toy network, returning ``(n_samples, 5)``."""
    if n_samples < 100:
        raise ValueError("n_samples must be at least 100")
    spec = spec or Ar5Spec()
    return simulate_var(spec.coefs, n_samples, seed.generator(), burn_in=spec.burn_in)


def _two_pi_over(n: float, cycles: Sequence[float]) -> tuple:
    return tuple(2.0 * np.pi * c / n for c in cycles)


@dataclass(frozen=True)
class OscillatorSpec:
    """Parameters of the noisy-oscillator family (frequencies in rad/sample)."""

    omegas: tuple = _two_pi_over(256, (10, 10, 17))
    delays: tuple = (0.0, -1.0, -2.0)
    amp_halfwidth: float = 0.5
    noise_halfwidth: float = 0.9
    n_epochs: int = 100
    epoch_length: int = 256
    sampling_rate: float = 256.0

    def __post_init__(self):
        if len(self.omegas) != len(self.delays):
            raise ValueError("omegas and delays must have equal length")
        if self.n_epochs < 1 or self.epoch_length < 2:
            raise ValueError("need at least one epoch of two samples")
        if self.amp_halfwidth < 0 or self.noise_halfwidth < 0:
            raise ValueError("half-widths must be non-negative")


def gen_oscillators(spec: OscillatorSpec = OscillatorSpec(),
                    seed: SeedSpec = SeedSpec(0, STREAM_OSCILLATORS)) -> EpochedSeries:
    """Epoched noisy sinusoids with per-epoch random amplitudes.

    Channel i in each epoch is ``a_i*sin(w_i*(t - tau_i)) + noise`` for
    ``t = 1..epoch_length``; ``a_i`` is uniform on ``1 +/- amp_halfwidth``
    (drawn once per epoch) and the noise is uniform on ``+/- noise_halfwidth``.
    """
    rng = seed.generator()
    p = len(spec.omegas)
    w = np.asarray(spec.omegas, dtype=np.float64)
    tau = np.asarray(spec.delays, dtype=np.float64)
    t = np.arange(1, spec.epoch_length + 1, dtype=np.float64)[:, None]
    carrier = np.sin(w * (t - tau))
    data = np.empty((spec.n_epochs, spec.epoch_length, p))
    u1, u2 = spec.amp_halfwidth, spec.noise_halfwidth
    for ep in range(spec.n_epochs):
        a = uniform(rng, 1.0 - u1, 1.0 + u1, p)
        noise = uniform(rng, -u2, u2, (spec.epoch_length, p))
        data[ep] = a * carrier + noise
    return EpochedSeries(data, spec.sampling_rate)


@dataclass(frozen=True)
class AmpModSpec:
    """Parameters of the amplitude-modulated family (frequencies in rad/sample)."""

    slow_omegas: tuple = _two_pi_over(256, (2, 3, 5))
    slow_delays: tuple = (0.0, -4.0, -4.0)
    fast_omegas: tuple = _two_pi_over(256, (22, 22, 28))
    fast_delays: tuple = (0.0, -1.0, -2.0)
    modulation_depth: float = 0.5
    noise_low: float = 0.8
    noise_high: float = 1.2
    n_samples: int = 25600
    sampling_rate: float = 256.0

    def __post_init__(self):
        lens = {len(self.slow_omegas), len(self.slow_delays),
                len(self.fast_omegas), len(self.fast_delays)}
        if len(lens) != 1:
            raise ValueError("all frequency/delay tuples must have equal length")


def gen_ampmod(spec: AmpModSpec = AmpModSpec(),
               seed: SeedSpec = SeedSpec(0, STREAM_AMPMOD)) -> tuple[np.ndarray, np.ndarray]:
    """Amplitude-modulated carriers and their true envelopes.

    Returns ``(signals, envelopes)`` where channel i of ``envelopes`` is
    ``(1 + depth*sin(ws_i*(t - ts_i))) * eps_i,t`` and ``signals`` multiplies
    it by the carrier ``sin(wf_i*(t - tf_i))``, ``t = 1..n_samples``.
    """
    rng = seed.generator()
    p = len(spec.slow_omegas)
    t = np.arange(1, spec.n_samples + 1, dtype=np.float64)[:, None]
    eps = uniform(rng, spec.noise_low, spec.noise_high, (spec.n_samples, p))
    ws, ts = np.asarray(spec.slow_omegas), np.asarray(spec.slow_delays)
    wf, tf = np.asarray(spec.fast_omegas), np.asarray(spec.fast_delays)
    envelopes = (1.0 + spec.modulation_depth * np.sin(ws * (t - ts))) * eps
    signals = envelopes * np.sin(wf * (t - tf))
    return signals, envelopes


def uniform_mixing(p: int, c: float) -> np.ndarray:
    """Symmetric mixing matrix with unit diagonal and ``c`` off the diagonal."""
    if p < 1:
        raise ValueError("p must be positive")
    if not abs(c) < 1:
        raise ValueError(f"off-diagonal value must satisfy |c| < 1, got {c}")
    # eigenvalues are 1 + (p-1)c and 1 - c
    if p > 1 and np.isclose(1.0 + (p - 1) * c, 0.0, rtol=0.0, atol=1e-12):
        raise SingularMatrixError(f"c = {c} = -1/(p-1) makes the {p}x{p} mixing matrix singular")
    m = np.full((p, p), float(c))
    np.fill_diagonal(m, 1.0)
    return m


def apply_mixing(x, m) -> np.ndarray:
    """Instantaneous mixture ``Y_t = M X_t`` of a time-in-rows series."""
    x = as_series(x)
    m = np.asarray(m, dtype=np.float64)
    if m.shape != (x.shape[1], x.shape[1]):
        raise ValueError(f"mixing matrix shape {m.shape} does not match {x.shape[1]} channels")
    return x @ m.T
