"""Visibility graphs of annotated document pages.

Each region becomes a node carrying a 7-dim feature vector (normalized box
corners plus digit/letter/symbol content fractions).  Two regions are linked
when an axis-aligned sight line joins their boxes without crossing any other
region; vertical links longer than a quarter of the page height are dropped.
"""

from __future__ import annotations

import json
import unicodedata
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

from .errors import FormatError, InputError
from .graphs import Graph

# Shipped region class table for invoice-style pages.
CLASS_NAMES = {0: "header", 1: "table", 2: "address", 3: "date", 4: "total", 5: "other"}
CLASS_IDS = {name: cid for cid, name in CLASS_NAMES.items()}

# Vertical sight lines longer than this fraction of the page height are discarded.
MAX_VERTICAL_GAP_FRACTION = 0.25


@dataclass(frozen=True)
class Region:
    """An annotated page region: class, bounding box, and content summary.

    ``box`` is (x0, y0, x1, y1) with y increasing downward; ``histogram``
    is (digits, alphas, symbols) counts of the region's content.
    """

    class_id: int
    box: tuple[float, float, float, float]
    histogram: tuple[int, int, int] = (0, 0, 0)

    def __post_init__(self):
        x0, y0, x1, y1 = self.box
        if not (x0 < x1 and y0 < y1):
            raise InputError(f"degenerate box {self.box}")
        if any(c < 0 for c in self.histogram):
            raise InputError(f"negative histogram counts {self.histogram}")

    @classmethod
    def from_text(cls, class_id: int, box, text: str) -> "Region":
        return cls(class_id=class_id, box=tuple(box), histogram=content_histogram(text))


@dataclass(frozen=True)
class LayoutPage:
    """Page extents plus its regions; boxes must lie within the page."""

    width: float
    height: float
    regions: tuple[Region, ...] = ()

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise InputError(f"page extents must be positive, got {self.width}x{self.height}")
        object.__setattr__(self, "regions", tuple(self.regions))
        for r in self.regions:
            x0, y0, x1, y1 = r.box
            if x0 < 0 or y0 < 0 or x1 > self.width or y1 > self.height:
                raise InputError(f"region box {r.box} outside page {self.width}x{self.height}")


def content_histogram(text: str) -> tuple[int, int, int]:
    """Count (digits, alphas, symbols); whitespace is ignored.

    Unicode general categories decide the bucket: Nd is a digit, L* is a
    letter, anything else non-whitespace is a symbol.
    """
    digits = alphas = symbols = 0
    for ch in text:
        if ch.isspace():
            continue
        cat = unicodedata.category(ch)
        if cat == "Nd":
            digits += 1
        elif cat.startswith("L"):
            alphas += 1
        else:
            symbols += 1
    return digits, alphas, symbols


def node_features(r: Region, page: LayoutPage) -> tuple[float, ...]:
    """7-dim node vector: box corners normalized by page extents + content fractions.

    The three fraction components sum to 1 when the region has content and
    are all 0 otherwise.
    """
    x0, y0, x1, y1 = r.box
    total = sum(r.histogram)
    if total > 0:
        fracs = tuple(c / total for c in r.histogram)
    else:
        fracs = (0.0, 0.0, 0.0)
    return (
        x0 / page.width,
        y0 / page.height,
        x1 / page.width,
        y1 / page.height,
        *fracs,
    )


def _interval_overlap(a0, a1, b0, b1) -> tuple[float, float]:
    return max(a0, b0), min(a1, b1)


def visible_axis(
    a: Region,
    b: Region,
    others: Sequence[Region],
    page: LayoutPage,
    max_vertical_gap_fraction: float = MAX_VERTICAL_GAP_FRACTION,
    max_horizontal_gap_fraction: float | None = None,
) -> str | None:
    """Axis along which ``a`` sees ``b`` ("vertical"/"horizontal"), or None.

    A sight line exists along an axis when the boxes' intervals on the other
    axis overlap with positive length and no region in ``others`` intersects
    the open corridor between the facing edges.  Overlapping boxes are always
    visible.  Vertical gaps longer than ``max_vertical_gap_fraction`` of the
    page height are discarded; horizontal gaps are uncapped unless
    ``max_horizontal_gap_fraction`` is set.
    """
    if _corridor_clear(a.box, b.box, others, vertical=True,
                       gap_cap=max_vertical_gap_fraction * page.height):
        return "vertical"
    h_cap = None if max_horizontal_gap_fraction is None else max_horizontal_gap_fraction * page.width
    if _corridor_clear(a.box, b.box, others, vertical=False, gap_cap=h_cap):
        return "horizontal"
    return None


def _corridor_clear(box_a, box_b, others, vertical: bool, gap_cap: float | None) -> bool:
    ax0, ay0, ax1, ay1 = box_a
    bx0, by0, bx1, by1 = box_b
    if vertical:
        lo, hi = _interval_overlap(ax0, ax1, bx0, bx1)
        gap_lo, gap_hi = min(ay1, by1), max(ay0, by0)
    else:
        lo, hi = _interval_overlap(ay0, ay1, by0, by1)
        gap_lo, gap_hi = min(ax1, bx1), max(ax0, bx0)
    if hi - lo <= 0:
        return False
    gap = max(0.0, gap_hi - gap_lo)
    if gap_cap is not None and gap > gap_cap:
        return False
    if gap_hi <= gap_lo:
        return True  # boxes overlap or touch: zero-length sight line
    for c in others:
        cx0, cy0, cx1, cy1 = c.box
        if vertical:
            blocked = cx0 < hi and cx1 > lo and cy0 < gap_hi and cy1 > gap_lo
        else:
            blocked = cy0 < hi and cy1 > lo and cx0 < gap_hi and cx1 > gap_lo
        if blocked:
            return False
    return True


def build_visibility_graph(
    page: LayoutPage,
    max_vertical_gap_fraction: float = MAX_VERTICAL_GAP_FRACTION,
    max_horizontal_gap_fraction: float | None = None,
) -> Graph:
    """One node per region (input order) with features and class labels;
    an edge wherever some axis-aligned sight line connects the pair."""
    regions = page.regions
    edges = []
    for i in range(len(regions)):
        for j in range(i + 1, len(regions)):
            others = [r for k, r in enumerate(regions) if k != i and k != j]
            if visible_axis(regions[i], regions[j], others, page,
                            max_vertical_gap_fraction, max_horizontal_gap_fraction):
                edges.append((i, j))
    return Graph.from_edges(
        len(regions),
        edges,
        features=tuple(node_features(r, page) for r in regions) if regions else None,
        labels=tuple(r.class_id for r in regions) if regions else None,
    )


def load_page(path) -> LayoutPage:
    """Read a page annotation file (JSON, one document per file)."""
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path.name}: invalid JSON ({exc})") from exc
    return page_from_dict(doc, origin=path.name)


def page_from_dict(doc: dict, origin: str = "<annotation>") -> LayoutPage:
    try:
        width = float(doc["page_width"])
        height = float(doc["page_height"])
        raw_regions = doc["regions"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"{origin}: missing or malformed top-level keys ({exc})") from exc
    regions = []
    for k, entry in enumerate(raw_regions):
        try:
            name = entry["class"]
            box = tuple(float(c) for c in entry["box"])
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"{origin}: region {k} malformed ({exc})") from exc
        if len(box) != 4:
            raise FormatError(f"{origin}: region {k} box must have 4 coordinates")
        if name not in CLASS_IDS:
            raise FormatError(
                f"{origin}: region {k} has unknown class {name!r}"
                f" (known: {', '.join(sorted(CLASS_IDS))})"
            )
        if "text" in entry:
            region = Region.from_text(CLASS_IDS[name], box, str(entry["text"]))
        elif "histogram" in entry:
            hist = entry["histogram"]
            if len(hist) != 3:
                raise FormatError(f"{origin}: region {k} histogram must have 3 counts")
            region = Region(CLASS_IDS[name], box, tuple(int(c) for c in hist))
        else:
            raise FormatError(f"{origin}: region {k} needs either 'text' or 'histogram'")
        regions.append(region)
    return LayoutPage(width=width, height=height, regions=tuple(regions))
