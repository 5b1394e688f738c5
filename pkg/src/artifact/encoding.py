"""Coding schemes for categorical and mixed attributes.

Two families. Structural encoders (label, one_hot, ordinal, key_group,
interval_group) rewrite an attribute into new integer codes or indicator
columns. Statistics-based encoders (frequency, mean_target,
probability_ratio, james_stein) replace each value with a number computed
from the data distribution; these can assign equal codes to distinct values,
so they are lossy by construction and the derived column carries no
codebook. Statistics may be fit on a row subset (fit_rows) so that
cross-validation folds do not leak validation counts into training codes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .data_model import (
    AttributeSchema,
    Codebook,
    Dataset,
    MeasurementType,
    ValidationError,
)

SCHEME_KINDS = (
    "label",
    "one_hot",
    "ordinal",
    "key_group",
    "interval_group",
    "frequency",
    "mean_target",
    "probability_ratio",
    "james_stein",
)

# measurement kinds each scheme accepts
_LEGAL_SOURCES = {
    "label": {"nominal", "ordinal"},
    "one_hot": {"nominal", "ordinal"},
    "ordinal": {"ordinal"},
    "key_group": {"nominal", "ordinal"},
    "interval_group": {"interval", "ratio", "absolute"},
    "frequency": {"nominal", "ordinal"},
    "mean_target": {"nominal", "ordinal"},
    "probability_ratio": {"nominal", "ordinal"},
    "james_stein": {"nominal", "ordinal"},
}

_STATISTICAL = ("frequency", "mean_target", "probability_ratio", "james_stein")


@dataclass(frozen=True)
class EncodingScheme:
    """One encoding recipe for one attribute.

    kind-specific params: `order` lists raw tokens from lowest to highest
    (ordinal); `key_map` maps raw tokens to group ids (key_group); `start`
    and `width` define the bucketing grid (interval_group); `smoothing` is
    the additive count added to both class counts (probability_ratio);
    `weight` fixes the James-Stein mixing weight, otherwise it is
    n_v/(n_v + shrinkage); `target_class` selects the class whose indicator
    the target statistics average (defaults to the smallest class id).
    """

    kind: str
    order: Optional[Sequence[str]] = None
    key_map: Optional[Mapping[str, int]] = None
    start: Optional[float] = None
    width: Optional[float] = None
    smoothing: float = 1.0
    weight: Optional[float] = None
    shrinkage: float = 10.0
    target_class: Optional[int] = None

    def __post_init__(self):
        if self.kind not in SCHEME_KINDS:
            raise ValidationError(f"unknown encoding kind: {self.kind!r}")
        if self.kind == "ordinal":
            if not self.order:
                raise ValidationError("ordinal encoding requires an explicit value order")
            if len(set(self.order)) != len(tuple(self.order)):
                raise ValidationError("ordinal order must not repeat values")
            object.__setattr__(self, "order", tuple(self.order))
        if self.kind == "key_group":
            if not self.key_map:
                raise ValidationError("key_group encoding requires a key map")
            object.__setattr__(self, "key_map", dict(self.key_map))
        if self.kind == "interval_group":
            if self.start is None or self.width is None:
                raise ValidationError("interval_group encoding requires start and width")
            if not self.width > 0:
                raise ValidationError(f"interval width must be > 0, got {self.width}")
        if self.smoothing < 0:
            raise ValidationError("smoothing must be >= 0")
        if self.weight is not None and not 0 <= self.weight <= 1:
            raise ValidationError("james_stein weight must lie in [0, 1]")
        if self.shrinkage < 0:
            raise ValidationError("shrinkage must be >= 0")

    def to_document(self) -> dict:
        doc = {"kind": self.kind}
        if self.order is not None:
            doc["order"] = list(self.order)
        if self.key_map is not None:
            doc["key_map"] = dict(self.key_map)
        if self.start is not None:
            doc["start"] = self.start
        if self.width is not None:
            doc["width"] = self.width
        if self.kind == "probability_ratio":
            doc["smoothing"] = self.smoothing
        if self.kind == "james_stein":
            doc["shrinkage"] = self.shrinkage
            if self.weight is not None:
                doc["weight"] = self.weight
        if self.target_class is not None:
            doc["target_class"] = self.target_class
        return doc

    @classmethod
    def from_document(cls, doc: Mapping) -> "EncodingScheme":
        try:
            kind = doc["kind"]
        except KeyError:
            raise ValidationError("encoding scheme document needs a 'kind'") from None
        return cls(
            kind=kind,
            order=doc.get("order"),
            key_map=doc.get("key_map"),
            start=doc.get("start"),
            width=doc.get("width"),
            smoothing=doc.get("smoothing", 1.0),
            weight=doc.get("weight"),
            shrinkage=doc.get("shrinkage", 10.0),
            target_class=doc.get("target_class"),
        )


@dataclass(frozen=True)
class EncodedDataset:
    """Result of applying a scheme: new dataset plus derivation records.

    provenance maps every derived attribute index (in the new dataset) to
    (source attribute index in the old dataset, scheme).
    """

    dataset: Dataset
    provenance: Mapping[int, tuple] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "provenance", dict(self.provenance))

    def provenance_document(self) -> dict:
        return {
            str(new): {"source": src, "scheme": scheme.to_document()}
            for new, (src, scheme) in sorted(self.provenance.items())
        }


def _token_of(schema: AttributeSchema, value) -> str:
    if schema.codebook is not None:
        return schema.codebook.decode(int(value))
    return str(value)


def _guard_kind(schema: AttributeSchema, scheme: EncodingScheme) -> None:
    kind = schema.mtype.kind
    if kind not in _LEGAL_SOURCES[scheme.kind]:
        raise ValidationError(
            f"{scheme.kind} encoding is not meaningful for {kind} attribute {schema.name!r}"
        )


def _fit_view(dataset: Dataset, attribute: int, fit_rows) -> tuple:
    """(codes column, class labels) restricted to the fitting rows."""
    col = dataset.column(attribute)
    labels = dataset.class_labels
    if fit_rows is None:
        return col, labels
    rows = np.asarray(fit_rows, dtype=np.int64)
    if rows.size == 0:
        raise ValidationError("fit_rows must name at least one case")
    return col[rows], labels[rows]


def _replace_attribute(dataset: Dataset, attribute: int, new_schemas, new_columns) -> tuple:
    """Swap one attribute for one or more derived ones, reindexing 1..n."""
    attrs = []
    cols = []
    provenance = {}
    for schema in dataset.attributes:
        if schema.index == attribute:
            for derived_schema, derived_col in zip(new_schemas, new_columns, strict=True):
                index = len(attrs) + 1
                attrs.append(
                    AttributeSchema(
                        name=derived_schema.name,
                        index=index,
                        mtype=derived_schema.mtype,
                        codebook=derived_schema.codebook,
                        uninformative=derived_schema.uninformative,
                    )
                )
                cols.append(derived_col)
                provenance[index] = attribute
        else:
            index = len(attrs) + 1
            attrs.append(
                AttributeSchema(
                    name=schema.name,
                    index=index,
                    mtype=schema.mtype,
                    codebook=schema.codebook,
                    uninformative=schema.uninformative,
                )
            )
            cols.append(dataset.column(schema.index))
    new_ds = Dataset(attrs, cols, dataset.class_labels, dataset.class_names)
    return new_ds, provenance


def _target_indicator(dataset: Dataset, scheme: EncodingScheme) -> np.ndarray:
    target = scheme.target_class
    if target is None:
        target = min(dataset.class_ids)
    if target not in dataset.class_ids:
        raise ValidationError(f"target class {target} not present in dataset")
    return (dataset.class_labels == target).astype(np.float64)


def apply_encoding(
    dataset: Dataset,
    attribute: int,
    scheme: EncodingScheme,
    *,
    fit_rows: Optional[Sequence[int]] = None,
) -> EncodedDataset:
    """Apply one scheme to one attribute, returning the re-coded dataset.

    Statistical schemes compute their per-value statistics on fit_rows only
    (all rows when omitted) and then code every row; a value absent from the
    fitting rows is an error because it has no fitted statistic.
    """
    schema = dataset.schema(attribute)
    _guard_kind(schema, scheme)
    col = dataset.column(attribute)
    values = [int(v) for v in np.unique(col)]
    tokens = {v: _token_of(schema, v) for v in values}

    if scheme.kind == "label":
        mapping = {v: i + 1 for i, v in enumerate(values)}
        new_col = np.array([mapping[int(v)] for v in col], dtype=np.int64)
        codebook = Codebook({tokens[v]: mapping[v] for v in values}, "explicit")
        derived = AttributeSchema(schema.name, 1, MeasurementType("nominal"), codebook)
        new_ds, sources = _replace_attribute(dataset, attribute, [derived], [new_col])

    elif scheme.kind == "one_hot":
        schemas = []
        cols = []
        for v in values:
            indicator = (col == v).astype(np.int64)
            constant = bool(indicator.min() == indicator.max())
            schemas.append(
                AttributeSchema(
                    f"{schema.name}={tokens[v]}",
                    1,
                    MeasurementType("nominal"),
                    None,
                    uninformative=constant,
                )
            )
            cols.append(indicator)
        new_ds, sources = _replace_attribute(dataset, attribute, schemas, cols)

    elif scheme.kind == "ordinal":
        order = list(scheme.order)
        missing = [tokens[v] for v in values if tokens[v] not in order]
        if missing:
            raise ValidationError(f"ordinal order misses values {missing} of {schema.name!r}")
        rank = {tok: i + 1 for i, tok in enumerate(order)}
        mapping = {v: rank[tokens[v]] for v in values}
        new_col = np.array([mapping[int(v)] for v in col], dtype=np.int64)
        codebook = Codebook({tok: rank[tok] for tok in order}, "explicit")
        derived = AttributeSchema(schema.name, 1, MeasurementType("ordinal"), codebook)
        new_ds, sources = _replace_attribute(dataset, attribute, [derived], [new_col])

    elif scheme.kind == "key_group":
        key_map = dict(scheme.key_map)
        missing = [tokens[v] for v in values if tokens[v] not in key_map]
        if missing:
            raise ValidationError(f"key map misses values {missing} of {schema.name!r}")
        mapping = {v: int(key_map[tokens[v]]) for v in values}
        new_col = np.array([mapping[int(v)] for v in col], dtype=np.int64)
        # several tokens may share a group id, so the bijective codebook is gone
        derived = AttributeSchema(schema.name, 1, MeasurementType("nominal"), None)
        new_ds, sources = _replace_attribute(dataset, attribute, [derived], [new_col])

    elif scheme.kind == "interval_group":
        numeric = col.astype(np.float64)
        groups = 1 + np.floor((numeric - scheme.start) / scheme.width)
        new_col = groups.astype(np.int64)
        derived = AttributeSchema(schema.name, 1, MeasurementType("ordinal"), None)
        new_ds, sources = _replace_attribute(dataset, attribute, [derived], [new_col])

    else:
        codes = _fit_statistics(dataset, attribute, scheme, fit_rows)
        unseen = [tokens[v] for v in values if v not in codes]
        if unseen:
            raise ValidationError(
                f"values {unseen} of {schema.name!r} absent from the fitting rows"
            )
        new_col = np.array([codes[int(v)] for v in col], dtype=np.float64)
        derived = AttributeSchema(schema.name, 1, MeasurementType("ratio"), None)
        new_ds, sources = _replace_attribute(dataset, attribute, [derived], [new_col])

    provenance = {new: (src, scheme) for new, src in sources.items()}
    return EncodedDataset(new_ds, provenance)


def _fit_statistics(dataset, attribute, scheme, fit_rows) -> dict:
    """Per-value code for the statistics-based schemes."""
    schema = dataset.schema(attribute)
    col, labels = _fit_view(dataset, attribute, fit_rows)
    n = col.shape[0]
    values = [int(v) for v in np.unique(col)]

    if scheme.kind == "frequency":
        return {v: float(np.count_nonzero(col == v)) / n for v in values}

    indicator_full = _target_indicator(dataset, scheme)
    if fit_rows is None:
        indicator = indicator_full
    else:
        indicator = indicator_full[np.asarray(fit_rows, dtype=np.int64)]

    if scheme.kind == "mean_target":
        return {v: float(indicator[col == v].mean()) for v in values}

    if scheme.kind == "probability_ratio":
        codes = {}
        for v in values:
            inside = col == v
            pos = float(indicator[inside].sum()) + scheme.smoothing
            neg = float(np.count_nonzero(inside)) - float(indicator[inside].sum()) + scheme.smoothing
            if neg == 0:
                raise ValidationError(
                    f"probability ratio undefined for value {_token_of(schema, v)!r}: "
                    "no opposite-class case and no smoothing"
                )
            codes[v] = pos / neg
        return codes

    # james_stein
    global_mean = float(indicator.mean())
    codes = {}
    for v in values:
        inside = col == v
        n_v = int(np.count_nonzero(inside))
        local = float(indicator[inside].mean())
        w = scheme.weight if scheme.weight is not None else n_v / (n_v + scheme.shrinkage)
        codes[v] = w * local + (1 - w) * global_mean
    return codes


def one_hot_expand(dataset: Dataset, attributes: Optional[Sequence[int]] = None) -> EncodedDataset:
    """One-hot every listed attribute (default: all with a codebook).

    Constant indicator columns are flagged uninformative, not silently
    dropped; drop_uninformative() removes them when a narrower table is
    wanted.
    """
    if attributes is None:
        attributes = [a.index for a in dataset.attributes if a.codebook is not None]
    source_names = [dataset.schema(a).name for a in attributes]
    scheme = EncodingScheme("one_hot")
    current = dataset
    derived_from = {}  # derived attribute name -> source index in the original dataset
    for src_index, name in zip(attributes, source_names):
        # replacement renumbers attributes, so resolve the source by name
        index = next(a.index for a in current.attributes if a.name == name)
        step = apply_encoding(current, index, scheme)
        for new in step.provenance:
            derived_from[step.dataset.schema(new).name] = src_index
        current = step.dataset
    provenance = {
        a.index: (derived_from[a.name], scheme)
        for a in current.attributes
        if a.name in derived_from
    }
    return EncodedDataset(current, provenance)


def drop_uninformative(dataset: Dataset) -> Dataset:
    """Remove attributes flagged uninformative (constant indicators)."""
    keep = [a for a in dataset.attributes if not a.uninformative]
    if not keep:
        raise ValidationError("dropping uninformative attributes would empty the dataset")
    attrs = []
    cols = []
    for schema in keep:
        attrs.append(
            AttributeSchema(
                name=schema.name,
                index=len(attrs) + 1,
                mtype=schema.mtype,
                codebook=schema.codebook,
                uninformative=False,
            )
        )
        cols.append(dataset.column(schema.index))
    return Dataset(attrs, cols, dataset.class_labels, dataset.class_names)


def scheme_file_document(schemes: Mapping[int, EncodingScheme]) -> dict:
    return {str(attr): scheme.to_document() for attr, scheme in sorted(schemes.items())}


def scheme_file_from_json(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed scheme file: {exc}") from None
    if not isinstance(doc, dict):
        raise ValidationError("scheme file must be a JSON object of attribute -> scheme")
    out = {}
    for key, item in doc.items():
        try:
            attr = int(key)
        except ValueError:
            raise ValidationError(f"scheme file key {key!r} is not an attribute index") from None
        out[attr] = EncodingScheme.from_document(item)
    return out
