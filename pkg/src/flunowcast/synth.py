"""Seeded synthetic generator of coupled case and search-volume series.

Cases are a sum of Gaussian epidemic bumps plus level-dependent noise.
Signal queries track cases a few weeks early, degraded by the two
failure modes the real data exhibits: media-driven spikes uncorrelated
with incidence, and multi-year attention decay that pushes volumes
below the integer quantization floor. Noise queries are pure noise.

All randomness comes from one PCG64 stream per scenario, so a config
reproduces its output bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidConfig
from .regress import QueryPanel
from .timeseries import WeekStamp, WeeklySeries, scale_0_100

DEFAULT_START = WeekStamp(2009, 1)


@dataclass(frozen=True)
class ScenarioConfig:
    seed: int
    weeks: int
    epidemic_peaks: tuple[tuple[float, float, float], ...]  # (center week, height, width)
    lead_weeks: int = 2
    media_spikes: tuple[tuple[int, float, float], ...] = ()  # (week, magnitude, decay weeks)
    attention_decay: float = 1.0  # per-year multiplier on query volume
    noise_sd: float = 0.0
    n_signal_queries: int = 3
    n_noise_queries: int = 0
    start: WeekStamp = field(default=DEFAULT_START)

    def __post_init__(self):
        if self.weeks < 20:
            raise InvalidConfig("scenario needs at least 20 weeks")
        if any(w <= 0 for _, _, w in self.epidemic_peaks):
            raise InvalidConfig("peak widths must be positive")
        if any(m < 0 for _, m, _ in self.media_spikes):
            raise InvalidConfig("spike magnitudes must be non-negative")
        if not 0.0 < self.attention_decay <= 1.0:
            raise InvalidConfig("attention_decay must be in (0, 1]")
        if self.noise_sd < 0:
            raise InvalidConfig("noise_sd must be non-negative")
        if self.lead_weeks < 0:
            raise InvalidConfig("lead_weeks must be non-negative")
        if self.n_signal_queries < 0 or self.n_noise_queries < 0:
            raise InvalidConfig("query counts must be non-negative")
        if self.n_signal_queries + self.n_noise_queries < 1:
            raise InvalidConfig("scenario needs at least one query")


def _bump_level(cfg: ScenarioConfig, horizon: int) -> np.ndarray:
    t = np.arange(horizon, dtype=float)
    level = np.zeros(horizon)
    for center, height, width in cfg.epidemic_peaks:
        level += height * np.exp(-0.5 * ((t - center) / width) ** 2)
    return level


def _spike_pulse(cfg: ScenarioConfig, horizon: int) -> np.ndarray:
    t = np.arange(horizon, dtype=float)
    pulse = np.zeros(horizon)
    for week, magnitude, decay in cfg.media_spikes:
        mask = t >= week
        pulse[mask] += magnitude * np.exp(-(t[mask] - week) / max(decay, 1e-9))
    return pulse


def _decay_weights(cfg: ScenarioConfig) -> np.ndarray:
    start_year = cfg.start.iso_year
    years = np.array(
        [cfg.start.add(i).iso_year - start_year for i in range(cfg.weeks)], dtype=float
    )
    return cfg.attention_decay ** years


def generate(cfg: ScenarioConfig) -> tuple[WeeklySeries, QueryPanel]:
    """Produce (cases, panel) for the scenario, deterministically per seed."""
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    horizon = cfg.weeks + cfg.lead_weeks

    level = _bump_level(cfg, horizon)
    case_noise = rng.normal(0.0, 1.0, size=horizon) * cfg.noise_sd * np.sqrt(level + 1.0)
    cases_ext = np.maximum(np.rint(level + case_noise), 0.0)
    cases = WeeklySeries(cfg.start, tuple(cases_ext[:cfg.weeks]), "cases")

    pulse = _spike_pulse(cfg, cfg.weeks)
    decay = _decay_weights(cfg)

    series = []
    for i in range(cfg.n_signal_queries):
        # amplitude alone would cancel under 0-100 rescaling, so each
        # query also gets a baseline offset to keep columns distinct
        scale = 1.0 / (1.0 + 0.5 * i)
        offset = 2.5 * i
        lead_source = cases_ext[cfg.lead_weeks:cfg.lead_weeks + cfg.weeks]
        raw = scale * lead_source * decay + offset + pulse
        raw += rng.normal(0.0, 1.0, size=cfg.weeks) * cfg.noise_sd * np.sqrt(raw.clip(0) + 1.0)
        raw = np.maximum(raw, 0.0)
        series.append(scale_0_100(WeeklySeries(cfg.start, tuple(raw), f"signal_{i + 1}")))
    for i in range(cfg.n_noise_queries):
        raw = rng.uniform(0.0, 100.0, size=cfg.weeks)
        series.append(scale_0_100(WeeklySeries(cfg.start, tuple(raw), f"noise_{i + 1}")))

    return cases, QueryPanel.build(series)
