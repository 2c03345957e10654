"""Seeded Monte Carlo BER engine and sweep apparatus.

A trial is one coherence block end to end: draw data, modulate per
framework, interleave, run T OFDM symbols through the channel, detect, and
count bit errors.  Every random draw comes from a counter-based stream
keyed by (seed, trial index, role), so results are bit-identical no matter
how trials are distributed across workers.
"""

from __future__ import annotations

import configparser
import csv
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import link
from .adaptive import run_adaptive
from .analysis import ber_upper
from .baselines import OfdmImConfig, ofdmim_detect_batch
from .channel import (
    JammingPattern,
    Role,
    draw_channel,
    draw_jamming,
    snr_sjr_to_variances,
    substream,
)
from .constellations import build_default
from .detectors import approx_mld_batch, full_mld_batch, lowcomp_mld_batch
from .errors import ConfigurationError, InputError
from .frame import SystemConfig, active_mask
from .spreading import build_spreading

FRAMEWORKS = ("AJ-OFDM", "AJ-OFDM-Adapt", "QAM-OFDM", "OFDM-IM")
DETECTORS = ("lowcomp", "full", "approx")

CSV_HEADER = [
    "scenario_id", "framework", "K", "N", "p", "M", "N_A", "pattern", "rho",
    "snr_db", "sjr_db", "seed", "trials", "bits_sent", "bit_errors", "ber",
    "runtime_ms",
]

_BATCH = 32  # stopping rule granularity, fixed so parallelism never changes output


@dataclass(frozen=True)
class Scenario:
    scenario_id: str
    framework: str
    K: int = 512
    N: int = 4
    p: int = 4
    M: int | str = 4  # "auto" only with AJ-OFDM-Adapt
    N_A: int | None = None  # OFDM-IM only
    pattern: str = "partial_band"
    rho_frac: float = 0.5
    snr_db: float = 20.0
    sjr_db: float = -20.0
    T: int = 28
    T_e: int = 28
    detector: str = "lowcomp"  # AJ-OFDM only: lowcomp | full | approx
    seed: int = 0
    min_trials: int = 1
    min_bit_errors: int = 100
    max_trials: int = 0  # 0 -> 10 * min_trials

    def __post_init__(self):
        if self.framework not in FRAMEWORKS:
            raise ConfigurationError(f"unknown framework {self.framework!r}")
        if self.detector not in DETECTORS:
            raise ConfigurationError(f"unknown detector {self.detector!r}")
        if self.M == "auto" and self.framework != "AJ-OFDM-Adapt":
            raise ConfigurationError('M="auto" is only valid with AJ-OFDM-Adapt')
        if self.pattern not in ("partial_band", "random"):
            raise ConfigurationError(f"unknown jamming pattern {self.pattern!r}")
        if self.min_trials < 1:
            raise ConfigurationError("min_trials must be >= 1")

    @property
    def jamming_pattern(self) -> JammingPattern:
        return JammingPattern(self.pattern)

    @property
    def order(self) -> int:
        if self.M == "auto":
            return 4  # phase-1 order; phase 2 adapts internally
        return int(self.M)

    @property
    def effective_max_trials(self) -> int:
        return self.max_trials if self.max_trials > 0 else 10 * self.min_trials

    def system_config(self) -> SystemConfig:
        sw2, sz2 = snr_sjr_to_variances(self.snr_db, self.sjr_db)
        if self.framework == "OFDM-IM":
            # index+modulation bit split has no spreading (S, M) relation;
            # carry a BPSK placeholder that satisfies p = S*log2(M)
            s, m = self.p, 2
        else:
            m = self.order
            bps = int(round(math.log2(m)))
            if self.p % bps != 0:
                raise ConfigurationError(f"p={self.p} not divisible by log2(M)={bps}")
            s = self.p // bps
        return SystemConfig(
            K=self.K, N=self.N, p=self.p, S=s, M=m, T=self.T, T_e=self.T_e,
            sigma_w2=sw2, sigma_z2=sz2,
        )


@dataclass(frozen=True)
class BerCurvePoint:
    scenario: Scenario
    trials: int
    bits_sent: int
    bit_errors: int
    runtime_ms: int

    @property
    def ber(self) -> float:
        return self.bit_errors / self.bits_sent if self.bits_sent else 0.0


# ---------------------------------------------------------------------------
# per-framework trial bodies
# ---------------------------------------------------------------------------


def _draw_common(scenario: Scenario, cfg: SystemConfig, trial: int):
    ch = draw_channel(cfg, None, substream(scenario.seed, trial, Role.CHANNEL))
    jam = draw_jamming(
        cfg, scenario.jamming_pattern, scenario.rho_frac,
        substream(scenario.seed, trial, Role.JAMMING),
    )
    noise = link.draw_noise(cfg, substream(scenario.seed, trial, Role.NOISE))
    data_rng = substream(scenario.seed, trial, Role.DATA)
    bits = data_rng.integers(0, 2, size=(cfg.T, cfg.G, cfg.p))
    return ch, jam, noise, data_rng, bits


def _detect_mask(cfg: SystemConfig, reps: int):
    mask = active_mask(cfg)
    if np.all(mask):
        return None
    return np.tile(mask, (reps, 1))


def _trial_ajofdm(scenario: Scenario, cfg: SystemConfig, trial: int) -> int:
    ch, jam, noise, _rng, bits = _draw_common(scenario, cfg, trial)
    const = build_default(cfg.M)
    sm = build_spreading(cfg.N, cfg.S)
    x = link.modulate_blocks(bits, const, sm, cfg)
    y_blocks, h_blocks, _ = link.pass_through_channel(x, cfg, ch, jam, noise)
    yb = y_blocks.reshape(-1, cfg.N)
    hb = np.tile(h_blocks, (cfg.T, 1, 1)).reshape(-1, cfg.N)
    mask = _detect_mask(cfg, cfg.T)
    if scenario.detector == "full":
        s_idx, _c, _j, _ll = full_mld_batch(yb, hb, sm, const, cfg.sigma_w2, cfg.sigma_z2, mask)
    elif scenario.detector == "approx":
        s_idx, _j, _ll, _sz = approx_mld_batch(yb, hb, sm, const, cfg.sigma_w2, mask)
    else:
        s_idx, _j, _ll = lowcomp_mld_batch(yb, hb, sm, const, cfg.sigma_w2, cfg.sigma_z2, mask)
    decoded = link.decode_blocks(s_idx, const).reshape(cfg.T, cfg.G, cfg.p)
    return int(np.sum(decoded != bits))


def _trial_adapt(scenario: Scenario, cfg: SystemConfig, trial: int) -> int:
    ch, jam, noise, _rng, bits = _draw_common(scenario, cfg, trial)
    decoded, _est, _m_star = run_adaptive(cfg, ch, jam, bits, noise)
    return int(np.sum(decoded != bits))


def _trial_qamofdm(scenario: Scenario, cfg: SystemConfig, trial: int) -> int:
    ch, jam, noise, rng, bits = _draw_common(scenario, cfg, trial)
    const = build_default(cfg.M)
    mask = active_mask(cfg)  # (G, N)
    scale = math.sqrt(cfg.N / cfg.S)
    # per (t, g): S distinct active subcarriers, redrawn per OFDM symbol
    u = rng.random((cfg.T, cfg.G, cfg.N))
    u[:, ~mask] = np.inf  # never select padded positions
    sel = np.argsort(u, axis=-1)[..., : cfg.S]  # (T, G, S)
    idx = link.bits_to_indices(bits.reshape(-1, cfg.p), const).reshape(
        cfg.T, cfg.G, cfg.S
    )
    symbols = const.points[idx]
    x = np.zeros((cfg.T, cfg.G, cfg.N), dtype=complex)
    np.put_along_axis(x, sel, scale * symbols, axis=-1)
    y_blocks, h_blocks, _ = link.pass_through_channel(x, cfg, ch, jam, noise)
    y_sel = np.take_along_axis(y_blocks, sel, axis=-1)
    h_sel = np.take_along_axis(np.broadcast_to(h_blocks, y_blocks.shape), sel, axis=-1)
    metric = np.abs(
        y_sel[..., None] - h_sel[..., None] * scale * const.points[None, None, None, :]
    ) ** 2
    idx_hat = np.argmin(metric, axis=-1)
    decoded = link.decode_blocks(idx_hat, const).reshape(cfg.T, cfg.G, cfg.p)
    return int(np.sum(decoded != bits))


def _trial_ofdmim(scenario: Scenario, cfg: SystemConfig, trial: int) -> int:
    if scenario.N_A is None:
        raise ConfigurationError("OFDM-IM scenarios require N_A")
    im = OfdmImConfig(N=cfg.N, N_A=scenario.N_A, M=scenario.order)
    if im.p != cfg.p:
        raise ConfigurationError(
            f"OFDM-IM bit budget mismatch: p={cfg.p} but "
            f"floor(log2(C({im.N},{im.N_A}))) + N_A*log2(M) = {im.p}"
        )
    ch, jam, noise, _rng, bits = _draw_common(scenario, cfg, trial)
    const = build_default(im.M)
    from .baselines import _active_sets  # table shared with the modulator

    sets = _active_sets(im)
    flat_bits = bits.reshape(-1, cfg.p)
    if im.p_index:
        shifts = (1 << np.arange(im.p_index - 1, -1, -1))
        ranks = flat_bits[:, : im.p_index] @ shifts
    else:
        ranks = np.zeros(flat_bits.shape[0], dtype=np.int64)
    sym_idx = link.bits_to_indices(
        flat_bits[:, im.p_index :].ravel(), const
    ).reshape(-1, im.N_A)
    x = np.zeros((flat_bits.shape[0], cfg.N), dtype=complex)
    np.put_along_axis(
        x, sets[ranks], math.sqrt(im.N / im.N_A) * const.points[sym_idx], axis=-1
    )
    x = x.reshape(cfg.T, cfg.G, cfg.N) * active_mask(cfg)
    y_blocks, h_blocks, _ = link.pass_through_channel(x, cfg, ch, jam, noise)
    yb = y_blocks.reshape(-1, cfg.N)
    hb = np.tile(h_blocks, (cfg.T, 1, 1)).reshape(-1, cfg.N)
    decoded = ofdmim_detect_batch(yb, hb, im, const, cfg.sigma_w2)
    return int(np.sum(decoded.reshape(cfg.T, cfg.G, cfg.p) != bits))


_TRIAL_BODIES = {
    "AJ-OFDM": _trial_ajofdm,
    "AJ-OFDM-Adapt": _trial_adapt,
    "QAM-OFDM": _trial_qamofdm,
    "OFDM-IM": _trial_ofdmim,
}


def run_trial(scenario: Scenario, trial_index: int) -> tuple[int, int]:
    """One coherence block; deterministic given (scenario.seed, trial_index)."""
    cfg = scenario.system_config()
    errors = _TRIAL_BODIES[scenario.framework](scenario, cfg, trial_index)
    return cfg.m * cfg.T, errors


def _run_trial_batch(scenario: Scenario, start: int, count: int) -> tuple[int, int]:
    bits_sent = 0
    errors = 0
    for i in range(start, start + count):
        b, e = run_trial(scenario, i)
        bits_sent += b
        errors += e
    return bits_sent, errors


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------


def run_scenario(scenario: Scenario, parallelism: int = 1) -> BerCurvePoint:
    """Run trials until min_trials and min_bit_errors are both met (capped at
    max_trials).  Output is independent of the parallelism degree."""
    t0 = time.monotonic()
    bits_sent = 0
    errors = 0
    trials = 0
    cap = scenario.effective_max_trials

    def done() -> bool:
        return trials >= cap or (
            trials >= scenario.min_trials and errors >= scenario.min_bit_errors
        )

    pool = ProcessPoolExecutor(parallelism) if parallelism > 1 else None
    try:
        while not done():
            n_batches = max(parallelism, 1)
            jobs = []
            for _ in range(n_batches):
                if trials + sum(j[1] for j in jobs) >= cap:
                    break
                start = trials + sum(j[1] for j in jobs)
                count = min(_BATCH, cap - start)
                jobs.append((start, count))
            if pool is not None:
                results = list(
                    pool.map(_run_trial_batch, [scenario] * len(jobs),
                             [j[0] for j in jobs], [j[1] for j in jobs])
                )
            else:
                results = [_run_trial_batch(scenario, s, c) for s, c in jobs]
            for (start, count), (b, e) in zip(jobs, results):
                trials += count
                bits_sent += b
                errors += e
                if done():
                    break
    finally:
        if pool is not None:
            pool.shutdown()
    runtime_ms = int((time.monotonic() - t0) * 1000)
    return BerCurvePoint(
        scenario=scenario, trials=trials, bits_sent=bits_sent,
        bit_errors=errors, runtime_ms=runtime_ms,
    )


def run_sweep(
    scenarios: list[Scenario],
    parallelism: int = 1,
    on_point=None,
) -> list[BerCurvePoint]:
    """Run each scenario in order; invoke on_point after each for persistence."""
    points = []
    for sc in scenarios:
        pt = run_scenario(sc, parallelism=parallelism)
        points.append(pt)
        if on_point is not None:
            on_point(pt)
    return points


# ---------------------------------------------------------------------------
# analytic bounds on the CSV schema
# ---------------------------------------------------------------------------


def analytic_ber(scenario: Scenario) -> float:
    """Union-bound BER for an AJ-OFDM scenario under its jamming pattern.

    Partial band: the stride interleaver turns a contiguous band into a
    cyclic run of floor/ceil(J_tot/G) jammed entries per block; the bound is
    averaged over run lengths and rotations.  Random: per-position jamming
    is approximated as i.i.d. Bernoulli(rho) and the bound averaged over all
    2^N indicator patterns.
    """
    cfg = scenario.system_config()
    const = build_default(cfg.M)
    sm = build_spreading(cfg.N, cfg.S)
    sw2, sz2 = cfg.sigma_w2, cfg.sigma_z2
    n = cfg.N
    rho = scenario.rho_frac
    if scenario.jamming_pattern is JammingPattern.PARTIAL_BAND:
        j_tot = round(rho * cfg.K)
        per_block = j_tot / cfg.G
        lo, hi = math.floor(per_block), math.ceil(per_block)
        frac_hi = per_block - lo
        total = 0.0
        for run, weight in ((lo, 1.0 - frac_hi), (hi, frac_hi)):
            if weight == 0.0:
                continue
            run = min(run, n)
            acc = 0.0
            for shift in range(n):
                c = np.zeros(n)
                c[(np.arange(run) + shift) % n] = 1
                acc += ber_upper(sm, const, c, sw2, sz2, 1.0).value
            total += weight * acc / n
        return total
    # random jamming: Bernoulli(rho) per position
    total = 0.0
    for bits in range(1 << n):
        c = np.array([(bits >> i) & 1 for i in range(n)], dtype=float)
        j = int(c.sum())
        prob = rho**j * (1.0 - rho) ** (n - j)
        if prob == 0.0:
            continue
        total += prob * ber_upper(sm, const, c, sw2, sz2, 1.0).value
    return total


def analytic_point(scenario: Scenario) -> tuple[Scenario, float]:
    return scenario, analytic_ber(scenario)


# ---------------------------------------------------------------------------
# scenario files and CSV persistence
# ---------------------------------------------------------------------------

_INT_KEYS = {"K", "N", "p", "N_A", "T", "T_e", "seed", "min_trials",
             "min_bit_errors", "max_trials"}
_FLOAT_KEYS = {"rho_frac", "snr_db", "sjr_db"}
_STR_KEYS = {"framework", "pattern", "detector"}
_ALL_KEYS = _INT_KEYS | _FLOAT_KEYS | _STR_KEYS | {"M"}


def parse_scenarios(text: str) -> list[Scenario]:
    """Parse the flat key-value scenario format (one section per scenario)."""
    cp = configparser.ConfigParser()
    cp.optionxform = str  # keys are case-sensitive field names
    cp.read_string(text)
    out = []
    for section in cp.sections():
        kwargs = {}
        for key, raw in cp.items(section):
            if key not in _ALL_KEYS:
                raise InputError(f"unknown scenario key {key!r} in [{section}]")
            if key == "M":
                kwargs[key] = raw if raw == "auto" else int(raw)
            elif key in _INT_KEYS:
                kwargs[key] = int(raw)
            elif key in _FLOAT_KEYS:
                kwargs[key] = float(raw)
            else:
                kwargs[key] = raw
        out.append(Scenario(scenario_id=section, **kwargs))
    return out


def load_scenarios(path) -> list[Scenario]:
    with open(path, encoding="utf-8") as fh:
        return parse_scenarios(fh.read())


def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".9g")
    return "" if x is None else str(x)


def point_row(pt: BerCurvePoint) -> list[str]:
    sc = pt.scenario
    return [
        sc.scenario_id, sc.framework, str(sc.K), str(sc.N), str(sc.p), str(sc.M),
        _fmt(sc.N_A), sc.pattern, _fmt(float(sc.rho_frac)), _fmt(float(sc.snr_db)),
        _fmt(float(sc.sjr_db)), str(sc.seed), str(pt.trials), str(pt.bits_sent),
        str(pt.bit_errors), _fmt(pt.ber), str(pt.runtime_ms),
    ]


def bound_row(scenario: Scenario, value: float) -> list[str]:
    sc = scenario
    return [
        sc.scenario_id, sc.framework, str(sc.K), str(sc.N), str(sc.p), str(sc.M),
        _fmt(sc.N_A), sc.pattern, _fmt(float(sc.rho_frac)), _fmt(float(sc.snr_db)),
        _fmt(float(sc.sjr_db)), str(sc.seed), "0", "0", "0", _fmt(value), "0",
    ]


def write_csv(rows: list[list[str]], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_HEADER)
        w.writerows(rows)


def points_to_csv(points: list[BerCurvePoint]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(CSV_HEADER)
    for pt in points:
        w.writerow(point_row(pt))
    return buf.getvalue()
