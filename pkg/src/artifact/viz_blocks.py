"""Block decomposition of categorical axes for parallel-coordinates plots.

Each attribute axis is cut into value bars (blocks) sized by case count.
Reference blocks additionally carry the class histogram of their cases, a
dominant class, and a purity, which is what makes the picture useful for
classification work: pure blocks are single-clause rules waiting to be
extracted. Axis layouts hold display metadata only (order, flips,
thresholds); no transform ever changes a block's contents, so the plot
stays a lossless view of the data.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional, Sequence

import numpy as np

from .data_model import Dataset, ValidationError
from .rule_engine import Clause, Rule

ROLES = ("normal", "merged-small", "merged-non-dominant")

DEFAULT_COLORS = ("#cc33cc", "#3355cc", "#e0b400", "#44aa55", "#cc5533", "#557788")
NON_DOMINANT_GREY = "#9a9a9a"


@dataclass(frozen=True)
class Block:
    """One bar on an axis: a value set plus its class make-up."""

    attribute: int
    value_codes: frozenset
    frequency: int
    class_histogram: Mapping[int, int]
    dominant_class: int
    purity: float
    role: str = "normal"

    def __post_init__(self):
        values = frozenset(int(v) for v in self.value_codes)
        if not values:
            raise ValidationError("block needs at least one value code")
        histogram = {int(k): int(v) for k, v in self.class_histogram.items()}
        if self.frequency != sum(histogram.values()):
            raise ValidationError("block frequency must equal its histogram total")
        if self.role not in ROLES:
            raise ValidationError(f"unknown block role: {self.role!r}")
        object.__setattr__(self, "value_codes", values)
        object.__setattr__(self, "class_histogram", histogram)

    @property
    def sort_values(self) -> tuple:
        return tuple(sorted(self.value_codes))

    def as_dict(self) -> dict:
        return {
            "attribute": self.attribute,
            "values": list(self.sort_values),
            "frequency": self.frequency,
            "histogram": {str(k): v for k, v in sorted(self.class_histogram.items())},
            "dominant_class": self.dominant_class,
            "purity": self.purity,
            "role": self.role,
        }


def _block_for(attribute: int, values, histogram: dict, role: str = "normal") -> Block:
    frequency = sum(histogram.values())
    dominant = max(histogram, key=lambda cid: (histogram[cid], -cid))
    purity = histogram[dominant] / frequency if frequency else 0.0
    return Block(
        attribute=attribute,
        value_codes=frozenset(values),
        frequency=frequency,
        class_histogram=histogram,
        dominant_class=dominant,
        purity=purity,
        role=role,
    )


def _reference_labels(dataset: Dataset, reference: Optional[int]) -> tuple:
    """(labels array, label ids) for the reference column (class when None)."""
    if reference is None:
        return dataset.class_labels, tuple(dataset.class_ids)
    col = dataset.column(reference)
    return col, tuple(int(v) for v in np.unique(col))


def frequency_blocks(dataset: Dataset, attribute: int) -> list:
    """One block per distinct value, largest first (bottom of the axis).

    Equal frequencies stay separate bars, so no information is lost to
    collisions the way frequency *encoding* loses it.
    """
    return reference_blocks(dataset, attribute)


def reference_blocks(
    dataset: Dataset,
    attribute: int,
    reference: Optional[int] = None,
    *,
    small_block_threshold: float = 0.0,
) -> list:
    """Per-value blocks with reference histograms, largest first.

    Values whose case fraction falls under small_block_threshold are merged
    into a single block placed last (the top of the axis).
    """
    if not 0 <= small_block_threshold <= 1:
        raise ValidationError("small_block_threshold must lie in [0, 1]")
    col = dataset.column(attribute)
    labels, label_ids = _reference_labels(dataset, reference)
    total = dataset.n_cases
    blocks = []
    for v in np.unique(col):
        inside = col == v
        histogram = {cid: int(np.count_nonzero(labels[inside] == cid)) for cid in label_ids}
        blocks.append(_block_for(attribute, (int(v),), histogram))
    blocks.sort(key=lambda b: (-b.frequency, b.sort_values))
    if small_block_threshold > 0:
        big = [b for b in blocks if b.frequency / total >= small_block_threshold]
        small = [b for b in blocks if b.frequency / total < small_block_threshold]
        if len(small) > 1:
            merged_hist = {cid: 0 for cid in label_ids}
            merged_values = set()
            for b in small:
                merged_values |= b.value_codes
                for cid, count in b.class_histogram.items():
                    merged_hist[cid] = merged_hist.get(cid, 0) + count
            blocks = big + [_block_for(attribute, merged_values, merged_hist, "merged-small")]
        else:
            blocks = big + small
    return blocks


def split_non_dominant(blocks: Sequence[Block]) -> list:
    """Explode each bar into its dominant part plus one grey remainder.

    The remainder block joins every non-dominant class of the bar, which is
    how the grey mass is drawn; frequencies still sum to the case count.
    """
    out = []
    for b in blocks:
        rest = {cid: n for cid, n in b.class_histogram.items() if cid != b.dominant_class and n}
        dom = {b.dominant_class: b.class_histogram[b.dominant_class]}
        out.append(_block_for(b.attribute, b.value_codes, dom, b.role))
        if rest:
            out.append(_block_for(b.attribute, b.value_codes, rest, "merged-non-dominant"))
    return out


def purity_filter(blocks: Sequence[Block], min_purity: float) -> list:
    if not 0 <= min_purity <= 1:
        raise ValidationError("min_purity must lie in [0, 1]")
    return [b for b in blocks if b.purity >= min_purity]


def linguistic_description(
    dataset: Dataset,
    purity_threshold: float = 0.8,
    size_threshold: float = 0.1,
    *,
    near_total_threshold: float = 0.8,
    reference: Optional[int] = None,
) -> list:
    """Plain-language block notes, one line per finding.

    Near-total bars report their total frequency, large high-purity bars
    report their purity (integer percent), and attributes holding bars
    under the size threshold get a small-block note.
    """
    for name, value in (
        ("purity_threshold", purity_threshold),
        ("size_threshold", size_threshold),
        ("near_total_threshold", near_total_threshold),
    ):
        if not 0 <= value <= 1:
            raise ValidationError(f"{name} must lie in [0, 1]")
    total = dataset.n_cases
    lines = []
    for schema in dataset.attributes:
        blocks = reference_blocks(dataset, schema.index, reference)
        has_small = False
        for position, block in enumerate(blocks, start=1):
            fraction = block.frequency / total if total else 0.0
            if fraction < size_threshold:
                has_small = True
                continue
            if fraction >= near_total_threshold:
                lines.append(
                    f"X{schema.index}, block, {position} has a total frequency of "
                    f"{round(100 * fraction)}"
                )
            elif block.purity >= purity_threshold:
                lines.append(
                    f"X{schema.index}, block, {position} has a purity of "
                    f"{round(100 * block.purity)}"
                )
        if has_small:
            lines.append(f"X{schema.index} has a small frequency block.")
    return lines


# --- axis layouts ------------------------------------------------------------


@dataclass(frozen=True)
class AxisState:
    """Display state of one axis: block order is bottom to top."""

    blocks: tuple
    flipped: bool = False
    small_block_threshold: float = 0.0
    purity_threshold: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        for name in ("small_block_threshold", "purity_threshold"):
            value = getattr(self, name)
            if not 0 <= value <= 1:
                raise ValidationError(f"{name} must lie in [0, 1]")

    @property
    def total_frequency(self) -> int:
        return sum(b.frequency for b in self.blocks)


@dataclass(frozen=True)
class AxisLayout:
    attribute_order: tuple
    axes: Mapping[int, AxisState]

    def __post_init__(self):
        order = tuple(int(a) for a in self.attribute_order)
        axes = dict(self.axes)
        if sorted(order) != sorted(axes):
            raise ValidationError("attribute order must be a permutation of the axes")
        object.__setattr__(self, "attribute_order", order)
        object.__setattr__(self, "axes", axes)

    def axis(self, attribute: int) -> AxisState:
        try:
            return self.axes[attribute]
        except KeyError:
            raise ValidationError(f"no axis for attribute {attribute}") from None


@dataclass(frozen=True)
class PlotSpec:
    layout: AxisLayout
    line_weighting: str = "frequency"
    colors: Mapping[int, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.line_weighting not in ("frequency", "uniform"):
            raise ValidationError(f"unknown line weighting: {self.line_weighting!r}")
        object.__setattr__(self, "colors", dict(self.colors))

    def color_of(self, class_id: int, class_ids: Sequence[int]) -> str:
        if class_id in self.colors:
            return self.colors[class_id]
        ordered = sorted(class_ids)
        return DEFAULT_COLORS[ordered.index(class_id) % len(DEFAULT_COLORS)]


def build_layout(
    dataset: Dataset,
    *,
    reference: Optional[int] = None,
    small_block_threshold: float = 0.0,
    purity_threshold: float = 0.0,
    attributes: Optional[Sequence[int]] = None,
) -> AxisLayout:
    if attributes is None:
        attributes = [a.index for a in dataset.attributes]
    axes = {}
    for attr in attributes:
        blocks = reference_blocks(
            dataset, attr, reference, small_block_threshold=small_block_threshold
        )
        axes[attr] = AxisState(
            blocks=tuple(blocks),
            small_block_threshold=small_block_threshold,
            purity_threshold=purity_threshold,
        )
    return AxisLayout(tuple(attributes), axes)


def flip_attribute(layout: AxisLayout, attribute: int) -> AxisLayout:
    """Mirror one axis's display positions; flipping twice restores it."""
    axis = layout.axis(attribute)
    axes = dict(layout.axes)
    axes[attribute] = replace(axis, flipped=not axis.flipped)
    return AxisLayout(layout.attribute_order, axes)


def reorder_attributes(layout: AxisLayout, order: Sequence[int]) -> AxisLayout:
    order = tuple(int(a) for a in order)
    if sorted(order) != sorted(layout.attribute_order):
        raise ValidationError("new order must permute the existing attributes")
    return AxisLayout(order, layout.axes)


def relocate_small_blocks(layout: AxisLayout, threshold: float = 0.2) -> AxisLayout:
    """Move bars under the size threshold to the top of their axis."""
    if not 0 <= threshold <= 1:
        raise ValidationError("threshold must lie in [0, 1]")
    axes = {}
    for attr, axis in layout.axes.items():
        total = axis.total_frequency or 1
        big = [b for b in axis.blocks if b.frequency / total >= threshold]
        small = [b for b in axis.blocks if b.frequency / total < threshold]
        axes[attr] = replace(axis, blocks=tuple(big + small))
    return AxisLayout(layout.attribute_order, axes)


def sort_blocks_by_class(layout: AxisLayout, class_id: int, *, on_top: bool = True) -> AxisLayout:
    """Gather the class's dominant bars at one end of every axis."""
    axes = {}
    for attr, axis in layout.axes.items():
        chosen = [b for b in axis.blocks if b.dominant_class == class_id]
        others = [b for b in axis.blocks if b.dominant_class != class_id]
        blocks = others + chosen if on_top else chosen + others
        axes[attr] = replace(axis, blocks=tuple(blocks))
    return AxisLayout(layout.attribute_order, axes)


def order_attributes_by_purity(
    dataset: Dataset,
    blocks_by_attribute: Mapping[int, Sequence[Block]],
    *,
    min_purity: float = 0.8,
) -> tuple:
    """Attributes sorted by their pure-block case mass, purest first.

    The score is the number of cases sitting in blocks at or above the
    purity bar, so a single large pure block outranks many tiny ones.
    """
    if not 0 <= min_purity <= 1:
        raise ValidationError("min_purity must lie in [0, 1]")
    scores = {
        attr: sum(b.frequency for b in blocks if b.purity >= min_purity)
        for attr, blocks in blocks_by_attribute.items()
    }
    return tuple(sorted(scores, key=lambda attr: (-scores[attr], attr)))


def visual_rule_from_blocks(selections: Sequence[tuple], target_class: int) -> Rule:
    """Rule from block picks: "in" gives an include clause, "not-in" an exclude.

    Each selection is (block, membership); one selection per attribute.
    """
    if not selections:
        raise ValidationError("select at least one block")
    clauses = []
    seen = set()
    for block, membership in selections:
        if membership not in ("in", "not-in"):
            raise ValidationError(f"membership must be 'in' or 'not-in', got {membership!r}")
        if block.attribute in seen:
            raise ValidationError(f"two selections on attribute {block.attribute}")
        seen.add(block.attribute)
        polarity = "include" if membership == "in" else "exclude"
        clauses.append(Clause(block.attribute, polarity, block.sort_values))
    return Rule(tuple(clauses), target_class)


# --- geometry and rendering ---------------------------------------------------


def _axis_geometry(axis: AxisState) -> list:
    """(block, y0, y1) stacked bottom-up in [0,1], flip applied."""
    total = axis.total_frequency
    out = []
    y = 0.0
    for block in axis.blocks:
        height = block.frequency / total if total else 0.0
        y0, y1 = y, y + height
        if axis.flipped:
            y0, y1 = 1.0 - y1, 1.0 - y0
        out.append((block, y0, y1))
        y += height
    return out


def _block_center(geometry, value: int) -> float:
    for block, y0, y1 in geometry:
        if value in block.value_codes:
            return (y0 + y1) / 2
    raise ValidationError(f"value {value} is missing from the axis blocks")


def export_plot_json(dataset: Dataset, spec: PlotSpec) -> dict:
    """Geometry document the UI draws: axes with stacked blocks, then lines.

    Lines group identical (values-on-shown-axes, class) cases; weight is
    the multiplicity of the group.
    """
    layout = spec.layout
    axes_doc = []
    geometries = {}
    for attr in layout.attribute_order:
        axis = layout.axis(attr)
        geometry = _axis_geometry(axis)
        geometries[attr] = geometry
        axes_doc.append(
            {
                "attr": attr,
                "flipped": axis.flipped,
                "blocks": [
                    {
                        "values": list(block.sort_values),
                        "y0": round(y0, 9),
                        "y1": round(y1, 9),
                        "frequency": block.frequency,
                        "histogram": {str(k): v for k, v in sorted(block.class_histogram.items())},
                        "dominant_class": block.dominant_class,
                        "purity": block.purity,
                        "role": block.role,
                    }
                    for block, y0, y1 in geometry
                ],
            }
        )

    order = layout.attribute_order
    columns = [dataset.column(a) for a in order]
    labels = dataset.class_labels
    groups = {}
    for row in range(dataset.n_cases):
        key = (tuple(int(col[row]) for col in columns), int(labels[row]))
        groups[key] = groups.get(key, 0) + 1
    lines_doc = []
    for (values, cid), count in sorted(groups.items()):
        path = [round(_block_center(geometries[a], v), 9) for a, v in zip(order, values)]
        weight = count if spec.line_weighting == "frequency" else 1
        lines_doc.append({"path": path, "weight": weight, "class": cid})
    return {"axes": axes_doc, "lines": lines_doc}


def plot_json_text(dataset: Dataset, spec: PlotSpec) -> str:
    return json.dumps(export_plot_json(dataset, spec), sort_keys=True) + "\n"


def render_svg(
    dataset: Dataset,
    spec: PlotSpec,
    *,
    width: int = 1200,
    height: int = 600,
    margin: int = 40,
) -> str:
    """Static SVG of the plot; identical inputs give identical bytes."""
    doc = export_plot_json(dataset, spec)
    axes = doc["axes"]
    n_axes = len(axes)
    if n_axes == 0:
        raise ValidationError("cannot render a plot with no axes")
    inner_w = width - 2 * margin
    inner_h = height - 2 * margin
    step = inner_w / max(1, n_axes - 1) if n_axes > 1 else 0.0
    x_of = {axis["attr"]: margin + i * step for i, axis in enumerate(axes)}
    class_ids = dataset.class_ids

    def ypix(y: float) -> float:
        return margin + (1.0 - y) * inner_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    for line in doc["lines"]:
        points = " ".join(
            f"{x_of[axis['attr']]:.2f},{ypix(y):.2f}"
            for axis, y in zip(axes, line["path"])
        )
        color = spec.color_of(line["class"], class_ids)
        stroke = 0.5 + 2.5 * (line["weight"] / dataset.n_cases)
        parts.append(
            f'<polyline points="{points}" fill="none" stroke="{color}" '
            f'stroke-width="{stroke:.3f}" stroke-opacity="0.45"/>'
        )
    bar_w = 12.0
    for axis in axes:
        x = x_of[axis["attr"]]
        parts.append(
            f'<line x1="{x:.2f}" y1="{margin}" x2="{x:.2f}" y2="{margin + inner_h}" '
            f'stroke="black" stroke-width="1"/>'
        )
        for block in axis["blocks"]:
            top = ypix(block["y1"])
            h = ypix(block["y0"]) - ypix(block["y1"])
            if block["role"] == "merged-non-dominant":
                color = NON_DOMINANT_GREY
            else:
                color = spec.color_of(block["dominant_class"], class_ids)
            parts.append(
                f'<rect x="{x - bar_w / 2:.2f}" y="{top:.2f}" width="{bar_w}" '
                f'height="{h:.2f}" fill="{color}" stroke="black" stroke-width="0.5"/>'
            )
        parts.append(
            f'<text x="{x:.2f}" y="{margin + inner_h + 16}" font-size="11" '
            f'text-anchor="middle">X{axis["attr"]}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def reconstruct_triples(blocks_by_attribute: Mapping[int, Sequence[Block]]) -> dict:
    """(attribute, value, class) -> count multiset from unmerged blocks.

    Merged blocks pool several values into one histogram, so only layouts
    built without merging reconstruct the exact multiset; that is the
    lossless claim, and it is what this helper feeds the tests.
    """
    triples = {}
    for attr, blocks in blocks_by_attribute.items():
        for block in blocks:
            if len(block.value_codes) != 1:
                raise ValidationError(
                    f"block on attribute {attr} pools values {sorted(block.value_codes)}; "
                    "reconstruction needs unmerged blocks"
                )
            (value,) = block.value_codes
            for cid, count in block.class_histogram.items():
                if count:
                    triples[(attr, value, cid)] = triples.get((attr, value, cid), 0) + count
    return triples


def dataset_triples(dataset: Dataset) -> dict:
    """The same multiset computed straight from the table."""
    triples = {}
    labels = dataset.class_labels
    for schema in dataset.attributes:
        col = dataset.column(schema.index)
        for cid in dataset.class_ids:
            inside = labels == cid
            values, counts = np.unique(col[inside], return_counts=True)
            for v, c in zip(values, counts):
                triples[(schema.index, int(v), cid)] = int(c)
    return triples
