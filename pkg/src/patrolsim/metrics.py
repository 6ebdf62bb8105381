"""Idleness and situation-awareness metrics plus per-robot visit heatmaps.

Instantaneous values are sampled at the end of each timestep (after visit
resets), accumulated only from the warm-up step onward. The unfiltered time
series is kept for plotting regardless of warm-up.
"""

from dataclasses import dataclass, field
from typing import Dict, List

import numpy as np

from .errors import MetricsError
from .world import VisitEvent, WorldState


@dataclass
class MetricsAccumulator:
    K: int
    n_robots: int  # total including the BS
    warmup_t0: int
    record_series: bool = True
    sum_ig: float = 0.0
    max_iw: int = 0
    sum_dmsa: float = 0.0
    max_dwsa: int = 0
    samples: int = 0
    visit_counts: np.ndarray = field(init=False)  # row = robot id - 1
    series: Dict[str, List] = field(init=False)

    def __post_init__(self):
        self.visit_counts = np.zeros((self.n_robots, self.K), dtype=np.int64)
        self.series = {k: [] for k in ("t", "i_g", "i_w", "d_msa", "d_wsa", "n_active")}


def sa_delays(t: int, bs_utimes: np.ndarray) -> np.ndarray:
    """Per-grid information age at the BS: t minus its update times."""
    return t - bs_utimes


def sample_instantaneous(
    world: WorldState,
    bs_utimes: np.ndarray,
    acc: MetricsAccumulator,
    n_active: int,
) -> MetricsAccumulator:
    i_g = float(world.idleness.mean())
    i_w = int(world.idleness.max())
    d = sa_delays(world.t, bs_utimes)
    d_msa = float(d.mean())
    d_wsa = int(d.max())
    if world.t >= acc.warmup_t0:
        acc.sum_ig += i_g
        acc.max_iw = max(acc.max_iw, i_w)
        acc.sum_dmsa += d_msa
        acc.max_dwsa = max(acc.max_dwsa, d_wsa)
        acc.samples += 1
    if acc.record_series:
        s = acc.series
        s["t"].append(world.t)
        s["i_g"].append(i_g)
        s["i_w"].append(i_w)
        s["d_msa"].append(d_msa)
        s["d_wsa"].append(d_wsa)
        s["n_active"].append(n_active)
    return acc


def record_visit(acc: MetricsAccumulator, event: VisitEvent) -> MetricsAccumulator:
    acc.visit_counts[event.robot_id - 1, event.grid] += 1
    return acc


def finalize(acc: MetricsAccumulator):
    """(I_G, I_W, D_MSA, D_WSA) over the sampled (post-warm-up) window."""
    if acc.samples == 0:
        raise MetricsError(
            f"no samples at or after warm-up t0={acc.warmup_t0}; mission too short"
        )
    return (
        acc.sum_ig / acc.samples,
        acc.max_iw,
        acc.sum_dmsa / acc.samples,
        acc.max_dwsa,
    )


def normalize(metric: float, n_robots: int, K: int) -> float:
    """Scale by (N-1)/K; the BS does not patrol."""
    return metric * (n_robots - 1) / K


def normalize_active(metric: float, n_active: int, K: int) -> float:
    """Failure-phase variant: scale by the operational patroller count."""
    return metric * n_active / K
