"""Per-element utility of candidate sound bins.

Combines two ingredients: the probability that a cue played in a candidate
bin is perceived in the element's own bin (localization blur), and how far
the candidate's cone of confusion stays from every other element (front-back
safety). Both live in [0, 1] so the weights are comparable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .angles import angular_distance, bin_center, bin_of, cone_set, mirror_front_back
from .confusion import ConfusionModel
from .layout import Layout

ConeRule = Literal["point-plus-mirror", "mirror-only"]

DEFAULT_W_BLUR = 0.9
DEFAULT_W_CONE = 0.1

# Distance reported when there is no other element to collide with; the
# safest possible value on the half-circle.
MAX_CONE_DISTANCE_DEG = 180.0


@dataclass(frozen=True)
class Weights:
    blur: float = DEFAULT_W_BLUR
    cone: float = DEFAULT_W_CONE

    def __post_init__(self):
        if self.blur < 0 or self.cone < 0:
            raise ValueError(f"weights must be non-negative, got {self}")


@dataclass(frozen=True, eq=False)
class ScoreMatrix:
    """n x bin_count utilities; row i scores element i at each candidate bin."""

    values: np.ndarray
    weights: Weights
    model: ConfusionModel
    layout: Layout
    cone_rule: ConeRule = "point-plus-mirror"

    @property
    def n_elements(self) -> int:
        return self.values.shape[0]

    @property
    def bin_count(self) -> int:
        return self.values.shape[1]


def blur_probability(model: ConfusionModel, visual_azimuth_deg: float, sound_bin: int) -> float:
    """P(perceived in the visual element's bin | cue played in sound_bin)."""

    v_bin = bin_of(visual_azimuth_deg, model.bin_size_deg)
    return float(model.matrix[sound_bin, v_bin])


def cone_distance(
    layout: Layout,
    element_index: int,
    sound_azimuth_deg: float,
    cone_rule: ConeRule = "point-plus-mirror",
) -> float:
    """Shortest arc from the sound's cone of confusion to any other element.

    The cone is reduced to azimuths: the sound's own angle plus its
    front-back mirror ("point-plus-mirror"), or just the mirror
    ("mirror-only"). Larger is safer; a single-element layout returns the
    maximum since there is nothing to confuse with.
    """

    others = [
        e.visual_azimuth_deg for i, e in enumerate(layout.elements) if i != element_index
    ]
    if not others:
        return MAX_CONE_DISTANCE_DEG
    if cone_rule == "mirror-only":
        points = [mirror_front_back(sound_azimuth_deg)]
    elif cone_rule == "point-plus-mirror":
        points = sorted(cone_set(sound_azimuth_deg))
    else:
        raise ValueError(f"unknown cone rule {cone_rule!r}")
    return min(angular_distance(p, v) for p in points for v in others)


def build_score_matrix(
    model: ConfusionModel,
    layout: Layout,
    weights: Weights = Weights(),
    cone_rule: ConeRule = "point-plus-mirror",
) -> ScoreMatrix:
    """Score every (element, candidate bin) pair.

    Entry (i, s) = w_blur * P(v_i | s) + w_cone * D(v_i, s) / 180 where the
    candidate's geometry is taken at its bin center. Pure function of its
    inputs.
    """

    n = len(layout)
    values = np.empty((n, model.bin_count))
    for i, element in enumerate(layout.elements):
        v_bin = bin_of(element.visual_azimuth_deg, model.bin_size_deg)
        blur = model.matrix[:, v_bin]
        cone = np.array(
            [
                cone_distance(layout, i, bin_center(s, model.bin_size_deg), cone_rule)
                for s in range(model.bin_count)
            ]
        )
        values[i] = weights.blur * blur + weights.cone * cone / MAX_CONE_DISTANCE_DEG
    values.flags.writeable = False
    return ScoreMatrix(values, weights, model, layout, cone_rule)
