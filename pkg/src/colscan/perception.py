"""Pluggable per-image damage detector.

Ships a ground-truth oracle with a configurable noise model (miss rate,
false positives, bbox jitter). Draws come from a stream keyed by
(seed, tick), so identical inputs always produce identical outputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Protocol

import numpy as np

from .sensors import ImageObservation
from .world import DamageKind

_KINDS = (DamageKind.SPALLING, DamageKind.REBAR_EXPOSURE)


@dataclass(frozen=True)
class DamageDetection:
    kind: DamageKind
    u_min: float
    v_min: float
    u_max: float
    v_max: float
    confidence: float
    source_patch: Optional[str] = None  # ground-truth id, oracle only


@dataclass(frozen=True)
class DetectorConfig:
    miss_rate: float = 0.0
    false_positive_rate: float = 0.0  # expected spurious detections per image
    jitter_sigma: float = 0.0  # normalized bbox perturbation
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 <= self.miss_rate < 1.0 + 1e-12:
            raise ValueError("miss_rate must lie in [0, 1]")
        if self.false_positive_rate < 0.0:
            raise ValueError("false_positive_rate must be non-negative")
        if self.jitter_sigma < 0.0:
            raise ValueError("jitter_sigma must be non-negative")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


class Detector(Protocol):
    """Interface a learned model must satisfy to replace the oracle."""

    def __call__(self, observation: ImageObservation, config: DetectorConfig) -> list[DamageDetection]:
        ...


def detect_damage(
    observation: ImageObservation, config: DetectorConfig
) -> list[DamageDetection]:
    """Oracle detector: one detection per visible ground-truth patch
    surviving a Bernoulli miss draw, plus Poisson-distributed false positives
    with uniform random kind and region."""
    rng = np.random.default_rng([config.seed, observation.tick])
    out: list[DamageDetection] = []
    for pv in observation.visible_patches:
        if config.miss_rate > 0.0 and rng.random() < config.miss_rate:
            continue
        u0, v0, u1, v1 = pv.u_min, pv.v_min, pv.u_max, pv.v_max
        if config.jitter_sigma > 0.0:
            j = rng.normal(0.0, config.jitter_sigma, size=4)
            u0, v0, u1, v1 = (
                float(np.clip(u0 + j[0], 0.0, 1.0)),
                float(np.clip(v0 + j[1], 0.0, 1.0)),
                float(np.clip(u1 + j[2], 0.0, 1.0)),
                float(np.clip(v1 + j[3], 0.0, 1.0)),
            )
            u0, u1 = min(u0, u1), max(u0, u1)
            v0, v1 = min(v0, v1), max(v0, v1)
        out.append(
            DamageDetection(
                kind=DamageKind(pv.kind),
                u_min=u0,
                v_min=v0,
                u_max=u1,
                v_max=v1,
                confidence=1.0,
                source_patch=pv.patch_id,
            )
        )
    if config.false_positive_rate > 0.0:
        for _ in range(int(rng.poisson(config.false_positive_rate))):
            kind = _KINDS[int(rng.integers(0, 2))]
            ua, ub = sorted(rng.uniform(0.0, 1.0, size=2).tolist())
            va, vb = sorted(rng.uniform(0.0, 1.0, size=2).tolist())
            out.append(
                DamageDetection(
                    kind=kind,
                    u_min=ua,
                    v_min=va,
                    u_max=ub,
                    v_max=vb,
                    confidence=float(rng.uniform(0.0, 1.0)),
                    source_patch=None,
                )
            )
    return out
