"""Synthetic experiments contrasting innovations orthogonalization with
leakage correction. Each experiment is a pure function of its config and
writes CSV tables, SVG figures and a manifest into ``cfg.out_dir``.
"""

from __future__ import annotations

import contextlib
import os

import numpy as np

from ..connectivity import (
    SpectralConnectivity,
    coherence_squared,
    envelope_correlation,
    icoh,
    lag_zero_correlation,
)
from ..core import (
    EpochedSeries,
    SeedSpec,
    UnmixioError,
    ensure_dir,
    write_matrix_csv,
    write_rows_csv,
)
from ..generators import (
    STREAM_AMPMOD,
    STREAM_OSCILLATORS,
    STREAM_VAR5,
    AmpModSpec,
    OscillatorSpec,
    apply_mixing,
    gen_ampmod,
    gen_oscillators,
    gen_var5,
    uniform_mixing,
)
from ..unmixing import innovations_orthogonalize, leakage_correct
from ..var_model import fit_var, select_order_aic
from . import svg
from .config import ExperimentConfig
from .manifest import Manifest

SAMPLING_RATE = 256.0
ICOH_FREQS = np.arange(1.0, 128.0)
COHERENCE_RANGE = (1.0, 30.0)
VAR5_MAX_ORDER = 10
NON_AR_ORDER = 9
NON_AR_MAX_ORDER = 20


class StageError(UnmixioError):
    """A pipeline stage failed; ``cause`` keeps the original exception."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause


@contextlib.contextmanager
def stage(name: str):
    try:
        yield
    except StageError:
        raise
    except (UnmixioError, ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        raise StageError(name, exc) from exc


class _Run:
    """Output bookkeeping for one experiment run."""

    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        self.root = ensure_dir(cfg.out_dir)
        self.manifest = Manifest(cfg.experiment, cfg.overrides(), root=self.root)

    def path(self, name: str) -> str:
        return os.path.join(self.root, name)

    def matrix(self, name: str, m, role: str) -> None:
        write_matrix_csv(m, self.path(name))
        self.manifest.add(name, role)

    def spectral(self, name: str, conn: SpectralConnectivity, role: str) -> None:
        write_rows_csv(["freq_hz", "from", "to", "value"], conn.rows(), self.path(name))
        self.manifest.add(name, role)

    def table(self, name: str, header, rows, role: str) -> None:
        write_rows_csv(header, rows, self.path(name))
        self.manifest.add(name, role)

    def plot(self, name: str, freqs, series: dict, title: str) -> None:
        svg.panel_grid(self.path(name), freqs, series, title)
        self.manifest.add(name, "plot")


# data sources ---------------------------------------------------------------

def _var5(cfg: ExperimentConfig) -> np.ndarray:
    with stage("generate var5"):
        return gen_var5(cfg.n_samples or 25600, SeedSpec(cfg.seed, STREAM_VAR5))


def _oscillators(cfg: ExperimentConfig) -> EpochedSeries:
    spec = OscillatorSpec(n_epochs=cfg.epochs or 100)
    with stage("generate oscillators"):
        return gen_oscillators(spec, SeedSpec(cfg.seed, STREAM_OSCILLATORS))


def _ampmod(cfg: ExperimentConfig):
    spec = AmpModSpec(n_samples=cfg.n_samples or 25600)
    with stage("generate amplitude-modulated signals"):
        return gen_ampmod(spec, SeedSpec(cfg.seed, STREAM_AMPMOD))


def _mixing(p: int, c: float) -> np.ndarray:
    with stage("build mixing matrix"):
        return uniform_mixing(p, c)


def _icoh_of(x, q: int, label: str) -> SpectralConnectivity:
    with stage(f"iCoh ({label})"):
        model, _ = fit_var(x, q)
        return icoh(model, ICOH_FREQS, SAMPLING_RATE)


def _coherence_of(x, epoch_length: int, label: str) -> SpectralConnectivity:
    with stage(f"coherence ({label})"):
        e = EpochedSeries.from_continuous(x, epoch_length, SAMPLING_RATE)
        return coherence_squared(e, COHERENCE_RANGE)


def _io(y, q: int, label: str):
    with stage(f"innovations orthogonalization ({label})"):
        return innovations_orthogonalize(y, q)


def _lc(y, label: str) -> np.ndarray:
    with stage(f"leakage correction ({label})"):
        return leakage_correct(y)[0]


def _mix_tag(c: float) -> str:
    return f"c{c:g}"


def _aic_table(run: _Run, datasets: dict, q_max: int) -> dict:
    scores, best = {}, {}
    for label, y in datasets.items():
        with stage(f"AIC order selection ({label})"):
            best[label], scores[label] = select_order_aic(y, q_max)
    labels = list(datasets)
    rows = [[q] + [float(scores[k][q - 1]) for k in labels] for q in range(1, q_max + 1)]
    run.table("aic.csv", ["order"] + [f"aic_{k}" for k in labels], rows, "aic")
    return best


# experiments -----------------------------------------------------------------

def _table1(run: _Run) -> None:
    x = _var5(run.cfg)
    with stage("lag-zero correlation"):
        r = lag_zero_correlation(x)
    run.matrix("corr0.csv", r, "correlation")


def _table3(run: _Run) -> None:
    x = _var5(run.cfg)
    c = run.cfg.mix
    data = {_mix_tag(0.0): x, _mix_tag(c): apply_mixing(x, _mixing(5, c))}
    best = _aic_table(run, data, VAR5_MAX_ORDER)
    for tag, y in data.items():
        q = run.cfg.order or best[tag]
        res = _io(y, q, tag)
        run.matrix(f"mixing_{tag}.csv", res.estimated_mixing, "estimated mixing")


def _fig2(run: _Run) -> None:
    x = _var5(run.cfg)
    q = run.cfg.order or 2
    true = _icoh_of(x, q, "true")
    lc = _icoh_of(_lc(x, "unmixed"), q, "leakage corrected")
    run.spectral("icoh_true.csv", true, "icoh")
    run.spectral("icoh_lc.csv", lc, "icoh")
    run.plot("fig2.svg", ICOH_FREQS, {"true": true.values, "leakage corrected": lc.values},
             "iCoh: true vs leakage-corrected (column sends, row receives)")


def _appendix3(run: _Run) -> None:
    x = _var5(run.cfg)
    q = run.cfg.order or 2
    y = apply_mixing(x, _mixing(5, run.cfg.mix))
    true = _icoh_of(x, q, "true")
    lc = _icoh_of(_lc(x, "unmixed"), q, "leakage corrected")
    lcm = _icoh_of(_lc(y, "mixed"), q, "leakage corrected, mixed")
    run.spectral("icoh_true.csv", true, "icoh")
    run.spectral("icoh_lc.csv", lc, "icoh")
    run.spectral(f"icoh_lc_mixed_{_mix_tag(run.cfg.mix)}.csv", lcm, "icoh")
    run.plot("appendix3.svg", ICOH_FREQS,
             {"true": true.values, "leakage corrected": lc.values,
              f"leakage corrected after mixing c={run.cfg.mix:g}": lcm.values},
             "iCoh with and without leakage correction and mixing")


def _fig3(run: _Run) -> None:
    e = _oscillators(run.cfg)
    x = e.concatenated()
    with stage("lag-zero correlation"):
        run.matrix("corr0.csv", lag_zero_correlation(x), "correlation")
    raw = _coherence_of(x, e.epoch_length, "raw")
    lc = _coherence_of(_lc(x, "oscillators"), e.epoch_length, "leakage corrected")
    run.spectral("coherence_raw.csv", raw, "coherence")
    run.spectral("coherence_lc.csv", lc, "coherence")
    run.plot("fig3.svg", raw.freqs, {"original": raw.values, "leakage corrected": lc.values},
             "Squared coherence of noisy oscillators")


def _sec7(run: _Run) -> None:
    s, env = _ampmod(run.cfg)
    with stage("correlations"):
        run.matrix("corr0.csv", lag_zero_correlation(s), "correlation")
        run.matrix("envcorr_true.csv", lag_zero_correlation(env), "envelope correlation")
        run.matrix("envcorr_raw.csv", envelope_correlation(s), "envelope correlation")
    x_lc = _lc(s, "amplitude-modulated")
    with stage("envelope correlation (leakage corrected)"):
        run.matrix("envcorr_lc.csv", envelope_correlation(x_lc), "envelope correlation")


def _sec9(run: _Run) -> None:
    x = _var5(run.cfg)
    q = run.cfg.order or 2
    c = run.cfg.mix
    y = apply_mixing(x, _mixing(5, c))
    res0, resc = _io(x, q, _mix_tag(0.0)), _io(y, q, _mix_tag(c))
    run.matrix(f"mixing_{_mix_tag(0.0)}.csv", res0.estimated_mixing, "estimated mixing")
    run.matrix(f"mixing_{_mix_tag(c)}.csv", resc.estimated_mixing, "estimated mixing")
    true = _icoh_of(x, q, "true")
    io0 = _icoh_of(res0.unmixed, q, "unmixed original")
    ioc = _icoh_of(resc.unmixed, q, "unmixed mixture")
    run.spectral("icoh_true.csv", true, "icoh")
    run.spectral("icoh_io.csv", io0, "icoh")
    run.spectral(f"icoh_io_mixed_{_mix_tag(c)}.csv", ioc, "icoh")
    run.plot("sec9.svg", ICOH_FREQS,
             {"true": true.values, "unmixed original": io0.values,
              f"unmixed mixture c={c:g}": ioc.values},
             "iCoh after innovations orthogonalization")


def _sec10(run: _Run) -> None:
    e = _oscillators(run.cfg)
    x = e.concatenated()
    c = run.cfg.mix
    q = run.cfg.order or NON_AR_ORDER
    y = apply_mixing(x, _mixing(3, c))
    _aic_table(run, {_mix_tag(0.0): x, _mix_tag(c): y}, NON_AR_MAX_ORDER)
    res0, resc = _io(x, q, _mix_tag(0.0)), _io(y, q, _mix_tag(c))
    run.matrix(f"mixing_{_mix_tag(0.0)}.csv", res0.estimated_mixing, "estimated mixing")
    run.matrix(f"mixing_{_mix_tag(c)}.csv", resc.estimated_mixing, "estimated mixing")
    raw = _coherence_of(x, e.epoch_length, "original")
    io0 = _coherence_of(res0.unmixed, e.epoch_length, "unmixed original")
    ioc = _coherence_of(resc.unmixed, e.epoch_length, "unmixed mixture")
    run.spectral("coherence_raw.csv", raw, "coherence")
    run.spectral("coherence_io.csv", io0, "coherence")
    run.spectral(f"coherence_io_mixed_{_mix_tag(c)}.csv", ioc, "coherence")
    run.plot("sec10.svg", raw.freqs,
             {"original": raw.values, "unmixed original": io0.values,
              f"unmixed mixture c={c:g}": ioc.values},
             "Squared coherence after innovations orthogonalization")


def _sec11(run: _Run) -> None:
    s, _ = _ampmod(run.cfg)
    c = run.cfg.mix
    q = run.cfg.order or NON_AR_ORDER
    y = apply_mixing(s, _mixing(3, c))
    _aic_table(run, {_mix_tag(0.0): s, _mix_tag(c): y}, NON_AR_MAX_ORDER)
    for tag, data in ((_mix_tag(0.0), s), (_mix_tag(c), y)):
        res = _io(data, q, tag)
        run.matrix(f"mixing_{tag}.csv", res.estimated_mixing, "estimated mixing")
        with stage(f"envelope correlation ({tag})"):
            run.matrix(f"envcorr_io_{tag}.csv", envelope_correlation(res.unmixed),
                       "envelope correlation")


_RUNNERS = {
    "table1": _table1,
    "table3": _table3,
    "fig2": _fig2,
    "fig3": _fig3,
    "appendix3": _appendix3,
    "sec7-envelope": _sec7,
    "sec9-unmix": _sec9,
    "sec10-oscillators": _sec10,
    "sec11-ampmod": _sec11,
}


def run_experiment(cfg: ExperimentConfig) -> Manifest:
    """Run one experiment and write its outputs plus ``manifest.json``."""
    run = _Run(cfg)
    _RUNNERS[cfg.experiment](run)
    run.manifest.write()
    return run.manifest
