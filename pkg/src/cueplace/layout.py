"""Layouts of visual elements around the listener."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .angles import normalize

# Spread applied to coinciding visual azimuths so the ordering constraints
# see a strict order; small enough to be perceptually meaningless.
DECONFLICT_STEP_DEG = 0.001


class LayoutError(ValueError):
    """Raised when a layout fails validation or parsing."""


@dataclass(frozen=True)
class Element:
    id: str
    visual_azimuth_deg: float
    elevation_deg: float = 0.0
    label: str | None = None


@dataclass(frozen=True, eq=False)
class Layout:
    """Ordered collection of visual elements; order is the input order.

    Azimuths are normalized and de-conflicted at construction: elements
    sharing an azimuth are spread by +-DECONFLICT_STEP_DEG in id order so
    every element has a distinct angle.
    """

    elements: tuple[Element, ...]

    def __post_init__(self):
        if len(self.elements) < 1:
            raise LayoutError("layout must contain at least one element")
        ids = [e.id for e in self.elements]
        if len(set(ids)) != len(ids):
            dup = next(i for i in ids if ids.count(i) > 1)
            raise LayoutError(f"duplicate element id {dup!r}")
        object.__setattr__(self, "elements", tuple(_deconflict(self.elements)))

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def ids(self) -> list[str]:
        return [e.id for e in self.elements]

    @property
    def visual_azimuths(self) -> np.ndarray:
        return np.array([e.visual_azimuth_deg for e in self.elements])

    def index_of(self, element_id: str) -> int:
        for i, e in enumerate(self.elements):
            if e.id == element_id:
                return i
        raise KeyError(element_id)

    def circular_order(self) -> list[int]:
        """Element indices sorted by ascending visual azimuth from 0 degrees."""

        return sorted(range(len(self.elements)), key=lambda i: self.elements[i].visual_azimuth_deg)


def _deconflict(elements) -> list[Element]:
    normalized = [
        Element(e.id, normalize(e.visual_azimuth_deg), float(e.elevation_deg), e.label)
        for e in elements
    ]
    groups: dict[float, list[int]] = {}
    for i, e in enumerate(normalized):
        groups.setdefault(e.visual_azimuth_deg, []).append(i)
    for az, idxs in groups.items():
        if len(idxs) == 1:
            continue
        idxs.sort(key=lambda i: normalized[i].id)
        # centered spread keeps the group's mean azimuth in place
        for k, i in enumerate(idxs):
            offset = (k - (len(idxs) - 1) / 2.0) * DECONFLICT_STEP_DEG
            e = normalized[i]
            normalized[i] = Element(e.id, normalize(az + offset), e.elevation_deg, e.label)
    return normalized


def layout_from_dict(d: dict) -> Layout:
    try:
        raw = d["elements"]
    except (KeyError, TypeError):
        raise LayoutError("layout JSON must be an object with an 'elements' list") from None
    if not isinstance(raw, list) or not raw:
        raise LayoutError("'elements' must be a non-empty list")
    elements = []
    for i, item in enumerate(raw):
        try:
            elements.append(
                Element(
                    id=str(item["id"]),
                    visual_azimuth_deg=float(item["azimuth_deg"]),
                    elevation_deg=float(item.get("elevation_deg", 0.0)),
                    label=item.get("label"),
                )
            )
        except (KeyError, TypeError, ValueError) as e:
            raise LayoutError(f"element {i}: {e}") from None
    return Layout(tuple(elements))


def load_layout(path: str | Path) -> Layout:
    """Load a layout from its JSON format: {"elements": [{"id", "azimuth_deg", ...}]}."""

    path = Path(path)
    try:
        d = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise LayoutError(f"{path}: invalid JSON: {e}") from None
    try:
        return layout_from_dict(d)
    except LayoutError as e:
        raise LayoutError(f"{path}: {e}") from None
