"""Connectivity measures: lag-zero correlation, epoch-averaged squared
coherence, isolated effective coherence (iCoh) and envelope correlation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal

from .core import EpochedSeries, SingularMatrixError, as_series
from .var_model import VarModel, var_transfer

COHERENCE = "coherence_squared"
ICOH = "icoh"
ENVELOPE_TRIM = 0.02


@dataclass(frozen=True, eq=False)
class SpectralConnectivity:
    """Per-frequency ``p x p`` connectivity values in ``[0, 1]``.

    For iCoh, ``values[f, i, j]`` is the flow from channel j to channel i
    (a column sends, a row receives) and the diagonal is stored as 0.
    Coherence is symmetric with a unit diagonal.
    """

    freqs: np.ndarray
    kind: str
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        f = np.asarray(self.freqs, dtype=np.float64)
        if v.ndim != 3 or v.shape[0] != f.shape[0] or v.shape[1] != v.shape[2]:
            raise ValueError(f"values shape {v.shape} does not match {f.shape[0]} frequencies")
        if np.any(v < 0) or np.any(v > 1):
            raise ValueError(f"{self.kind} values outside [0, 1]")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "freqs", f)

    @property
    def n_channels(self) -> int:
        return self.values.shape[1]

    def curve(self, to: int, frm: int) -> np.ndarray:
        return self.values[:, to, frm]

    def peak(self) -> np.ndarray:
        """Maximum over frequency for every channel pair."""
        return self.values.max(axis=0)

    def rows(self):
        """``(freq_hz, from, to, value)`` records with 1-based channels, off-diagonal only."""
        p = self.n_channels
        for fi, f in enumerate(self.freqs):
            for to in range(p):
                for frm in range(p):
                    if to != frm:
                        yield float(f), frm + 1, to + 1, float(self.values[fi, to, frm])


def lag_zero_correlation(x) -> np.ndarray:
    """Pearson correlation matrix of the channels at lag zero."""
    x = as_series(x, "x")
    xc = x - x.mean(axis=0)
    sd = np.sqrt(np.sum(xc * xc, axis=0))
    # centring a constant column leaves rounding noise, not exact zeros
    scale = np.sqrt(x.shape[0]) * np.max(np.abs(x), axis=0)
    flat = np.flatnonzero(sd <= 1e-12 * scale)
    if flat.size:
        raise ValueError(f"channel {int(flat[0]) + 1} has zero variance")
    z = xc / sd
    r = z.T @ z
    r = np.clip(0.5 * (r + r.T), -1.0, 1.0)
    np.fill_diagonal(r, 1.0)
    return r


def coherence_squared(e: EpochedSeries, freq_range_hz=(0.0, np.inf)) -> SpectralConnectivity:
    """Squared coherence from rectangular-window DFTs averaged over epochs.

    ``|S_ij|**2 / (S_ii S_jj)`` on the DFT bins ``k * fs / epoch_length``
    that fall inside the closed ``freq_range_hz``.
    """
    if e.n_epochs < 2:
        raise ValueError("coherence needs at least two epochs")
    if e.epoch_length < 2:
        raise ValueError("epochs must have at least two samples")
    lo, hi = freq_range_hz
    freqs = np.fft.rfftfreq(e.epoch_length, d=1.0 / e.sampling_rate)
    keep = (freqs >= lo) & (freqs <= hi)
    if not np.any(keep):
        raise ValueError(f"no DFT bins inside {freq_range_hz}")
    spec = np.fft.rfft(e.data, axis=1)[:, keep, :]  # (epochs, F, p)
    cross = np.einsum("efi,efj->fij", spec, spec.conj()) / e.n_epochs
    auto = np.real(np.einsum("fii->fi", cross))
    denom = auto[:, :, None] * auto[:, None, :]
    with np.errstate(invalid="ignore", divide="ignore"):
        coh = np.where(denom > 0, np.abs(cross) ** 2 / denom, 0.0)
    coh = np.clip(coh, 0.0, 1.0)
    idx = np.arange(coh.shape[1])
    coh[:, idx, idx] = 1.0
    return SpectralConnectivity(freqs[keep], COHERENCE, coh)


def icoh(model: VarModel, freqs_hz, sampling_rate: float) -> SpectralConnectivity:
    """Isolated effective coherence of every ordered channel pair.

    With ``Abar(f) = I - sum_k A_k exp(-2j*pi*f*k/fs)`` and ``P`` the
    inverse innovation covariance::

        iCoh[i <- j](f) = P_ii |Abar_ij|^2 / (P_ii |Abar_ij|^2 + P_jj |Abar_jj|^2)
    """
    try:
        if np.linalg.cond(model.sigma) > 1e14:
            raise np.linalg.LinAlgError
        precision = np.linalg.inv(model.sigma)
    except np.linalg.LinAlgError:
        raise SingularMatrixError("innovation covariance is singular") from None
    pdiag = np.diag(precision)
    f = np.atleast_1d(np.asarray(freqs_hz, dtype=np.float64))
    power = np.abs(var_transfer(model, f, sampling_rate)) ** 2  # (F, p, p)
    num = pdiag[None, :, None] * power
    den = num + pdiag[None, None, :] * np.einsum("fjj->fj", power)[:, None, :]
    with np.errstate(invalid="ignore", divide="ignore"):
        vals = np.where(den > 0, num / den, 0.0)
    idx = np.arange(model.n_channels)
    vals[:, idx, idx] = 0.0
    return SpectralConnectivity(f, ICOH, np.clip(vals, 0.0, 1.0))


def hilbert_envelope(x) -> np.ndarray:
    """Instantaneous amplitude, the modulus of the DFT-built analytic signal."""
    arr = np.asarray(x, dtype=np.float64)
    squeeze = arr.ndim == 1
    if squeeze:
        arr = arr[:, None]
    if arr.shape[0] < 4:
        raise ValueError("need at least 4 samples")
    env = np.abs(signal.hilbert(arr, axis=0))
    return env[:, 0] if squeeze else env


def envelope_correlation(x, trim: float = ENVELOPE_TRIM) -> np.ndarray:
    """Lag-zero correlation of Hilbert envelopes, ``trim`` fraction cut per edge."""
    x = as_series(x, "x")
    env = hilbert_envelope(x)
    k = int(trim * x.shape[0])
    if k:
        env = env[k:-k]
    return lag_zero_correlation(env)
