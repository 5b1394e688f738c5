"""Typed data tables for rule mining on categorical and mixed data.

A Dataset is an immutable table of coded cases plus a class column. Every
attribute carries a measurement type and, for categorical data, a codebook
mapping raw tokens to small positive integers. Measurement types fix which
relations are meaningful on an attribute (allowed_ops), and guard() checks
clauses, hyperblock sides, or raw relation tags against those whitelists
before anything gets evaluated.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

MEASUREMENT_KINDS = ("nominal", "ordinal", "interval", "ratio", "absolute", "cyclical")

ORDERING_POLICIES = ("documentation-order", "alphabetical", "first-appearance", "explicit")

# Relation whitelists per measurement kind. Absolute data is stored as its
# own kind but behaves like ratio everywhere.
_ALLOWED_OPS = {
    "nominal": frozenset({"eq", "neq"}),
    "ordinal": frozenset({"eq", "neq", "leq"}),
    "interval": frozenset({"eq", "neq", "leq", "difference"}),
    "ratio": frozenset({"eq", "neq", "leq", "difference", "ratio"}),
    "cyclical": frozenset({"eq", "neq", "cyclic-difference"}),
}
_ALLOWED_OPS["absolute"] = _ALLOWED_OPS["ratio"]


class ValidationError(ValueError):
    """Input violates a schema or value constraint."""


class StructuralError(ValidationError):
    """Malformed input file: empty, ragged rows, missing columns."""


@dataclass(frozen=True)
class MeasurementType:
    kind: str = "nominal"

    def __post_init__(self):
        if self.kind not in MEASUREMENT_KINDS:
            raise ValidationError(f"unknown measurement kind: {self.kind!r}")

    @property
    def effective_kind(self) -> str:
        return "ratio" if self.kind == "absolute" else self.kind


def allowed_ops(mtype) -> frozenset:
    """Relations that are meaningful for a measurement type.

    Accepts a MeasurementType or a bare kind string.
    """
    kind = mtype.kind if isinstance(mtype, MeasurementType) else str(mtype)
    try:
        return _ALLOWED_OPS[kind]
    except KeyError:
        raise ValidationError(f"unknown measurement kind: {kind!r}") from None


@dataclass(frozen=True)
class Codebook:
    """Bijection between raw tokens and integer codes 1..k."""

    raw_to_code: Mapping[str, int]
    ordering_policy: str = "first-appearance"

    def __post_init__(self):
        mapping = dict(self.raw_to_code)
        if not mapping:
            raise ValidationError("codebook must not be empty")
        codes = sorted(mapping.values())
        if codes != list(range(1, len(mapping) + 1)):
            raise ValidationError(f"codebook codes must be exactly 1..{len(mapping)}, got {codes}")
        if self.ordering_policy not in ORDERING_POLICIES:
            raise ValidationError(f"unknown ordering policy: {self.ordering_policy!r}")
        object.__setattr__(self, "raw_to_code", mapping)

    @property
    def code_to_raw(self) -> dict:
        return {code: raw for raw, code in self.raw_to_code.items()}

    @property
    def size(self) -> int:
        return len(self.raw_to_code)

    @property
    def codes(self) -> tuple:
        return tuple(sorted(self.raw_to_code.values()))

    def encode(self, raw: str) -> int:
        try:
            return self.raw_to_code[raw]
        except KeyError:
            raise ValidationError(f"token {raw!r} not in codebook") from None

    def decode(self, code: int) -> str:
        try:
            return self.code_to_raw[code]
        except KeyError:
            raise ValidationError(f"code {code!r} not in codebook") from None

    @classmethod
    def from_ordered(cls, tokens: Sequence[str], ordering_policy: str = "explicit") -> "Codebook":
        """Codebook with codes assigned by position in the given token list."""
        seen = {}
        for tok in tokens:
            if tok in seen:
                raise ValidationError(f"duplicate token {tok!r} in codebook ordering")
            seen[tok] = len(seen) + 1
        return cls(seen, ordering_policy)

    @classmethod
    def from_values(cls, values: Iterable[str], ordering_policy: str = "first-appearance") -> "Codebook":
        """Build a codebook from observed tokens under an ordering policy."""
        if ordering_policy == "alphabetical":
            ordered = sorted(set(values))
        elif ordering_policy == "first-appearance":
            ordered = list(dict.fromkeys(values))
        else:
            raise ValidationError(
                f"policy {ordering_policy!r} needs an explicit token order, "
                "use Codebook.from_ordered"
            )
        return cls.from_ordered(ordered, ordering_policy)


@dataclass(frozen=True)
class AttributeSchema:
    """One attribute of a dataset. index is the 1-based x_i position."""

    name: str
    index: int
    mtype: MeasurementType = field(default_factory=MeasurementType)
    codebook: Optional[Codebook] = None
    uninformative: bool = False

    def __post_init__(self):
        if self.index < 1:
            raise ValidationError(f"attribute index must be >= 1, got {self.index}")


class Dataset:
    """Immutable table of coded cases with per-attribute schema.

    Columns are numpy arrays, integer coded for categorical attributes.
    Derived numeric columns (from encodings) may be float valued and carry
    codebook None. Every transformation produces a new Dataset.
    """

    def __init__(self, attributes, columns, class_labels, class_names):
        attributes = tuple(attributes)
        if not attributes:
            raise ValidationError("dataset needs at least one attribute")
        for pos, schema in enumerate(attributes, start=1):
            if schema.index != pos:
                raise ValidationError(
                    f"attribute indices must be 1..n in order, got {schema.index} at position {pos}"
                )
        cols = []
        n_rows = None
        for schema, col in zip(attributes, columns, strict=True):
            arr = np.asarray(col)
            if arr.ndim != 1:
                raise ValidationError(f"column {schema.name!r} must be one dimensional")
            if n_rows is None:
                n_rows = arr.shape[0]
            elif arr.shape[0] != n_rows:
                raise ValidationError("all columns must have the same length")
            if schema.codebook is not None:
                arr = arr.astype(np.int64)
                present = set(np.unique(arr).tolist())
                legal = set(schema.codebook.codes)
                if not present <= legal:
                    bad = sorted(present - legal)
                    raise ValidationError(
                        f"attribute {schema.name!r} has codes {bad} outside its codebook"
                    )
            arr = arr.copy()
            arr.flags.writeable = False
            cols.append(arr)
        labels = np.asarray(class_labels, dtype=np.int64)
        if labels.shape[0] != n_rows:
            raise ValidationError("class labels must match the number of cases")
        present = set(np.unique(labels).tolist()) if n_rows else set()
        names = dict(class_names)
        if not present <= set(names):
            raise ValidationError(f"class ids {sorted(present - set(names))} missing from class_names")
        labels = labels.copy()
        labels.flags.writeable = False
        self._attributes = attributes
        self._columns = cols
        self._labels = labels
        self._class_names = names

    @property
    def attributes(self) -> tuple:
        return self._attributes

    @property
    def class_names(self) -> dict:
        return dict(self._class_names)

    @property
    def class_labels(self) -> np.ndarray:
        return self._labels

    @property
    def n_cases(self) -> int:
        return int(self._labels.shape[0])

    @property
    def n_attributes(self) -> int:
        return len(self._attributes)

    @property
    def class_ids(self) -> tuple:
        return tuple(sorted(self._class_names))

    def schema(self, index: int) -> AttributeSchema:
        if not 1 <= index <= self.n_attributes:
            raise ValidationError(f"unknown attribute index {index}")
        return self._attributes[index - 1]

    def column(self, index: int) -> np.ndarray:
        if not 1 <= index <= self.n_attributes:
            raise ValidationError(f"unknown attribute index {index}")
        return self._columns[index - 1]

    def case(self, row: int) -> tuple:
        return tuple(col[row] for col in self._columns)

    def iter_cases(self):
        for row in range(self.n_cases):
            yield self.case(row)

    def class_mask(self, class_id: int) -> np.ndarray:
        return self._labels == class_id

    def class_count(self, class_id: int) -> int:
        return int(np.count_nonzero(self._labels == class_id))

    def subset(self, rows) -> "Dataset":
        """New Dataset restricted to the given row indices (order preserved)."""
        rows = np.asarray(rows, dtype=np.int64)
        cols = [col[rows] for col in self._columns]
        return Dataset(self._attributes, cols, self._labels[rows], self._class_names)

    def values_present(self, index: int) -> tuple:
        """Distinct values of an attribute, ascending."""
        return tuple(np.unique(self.column(index)).tolist())

    # --- schema serialization -------------------------------------------

    def schema_document(self) -> dict:
        attrs = []
        for a in self._attributes:
            attrs.append(
                {
                    "name": a.name,
                    "index": a.index,
                    "mtype": a.mtype.kind,
                    "codebook": None if a.codebook is None else dict(a.codebook.raw_to_code),
                    "policy": None if a.codebook is None else a.codebook.ordering_policy,
                    "uninformative": a.uninformative,
                }
            )
        return {
            "attributes": attrs,
            "class": {"names": {str(k): v for k, v in sorted(self._class_names.items())}},
        }

    def schema_json(self) -> str:
        return json.dumps(self.schema_document(), sort_keys=True, indent=2) + "\n"

    def fingerprint(self) -> str:
        """Content hash: identical loads give identical fingerprints."""
        h = hashlib.sha256()
        h.update(self.schema_json().encode())
        for col in self._columns:
            h.update(np.ascontiguousarray(col).tobytes())
        h.update(np.ascontiguousarray(self._labels).tobytes())
        return h.hexdigest()


def schema_from_document(doc: dict) -> tuple:
    """Rebuild (attributes, class_names) from a schema document."""
    attrs = []
    for item in doc["attributes"]:
        codebook = None
        if item.get("codebook") is not None:
            codebook = Codebook(item["codebook"], item.get("policy") or "explicit")
        attrs.append(
            AttributeSchema(
                name=item["name"],
                index=item["index"],
                mtype=MeasurementType(item["mtype"]),
                codebook=codebook,
                uninformative=bool(item.get("uninformative", False)),
            )
        )
    class_names = {int(k): v for k, v in doc["class"]["names"].items()}
    return tuple(attrs), class_names


def load_csv(
    path,
    schema: Optional[Sequence[AttributeSchema]] = None,
    class_column: int = 1,
    *,
    ordering_policy: str = "first-appearance",
    class_tokens: Optional[Mapping[str, int]] = None,
    class_names: Optional[Mapping[int, str]] = None,
    attribute_names: Optional[Sequence[str]] = None,
) -> Dataset:
    """Load a comma separated file of categorical tokens into a Dataset.

    One case per row, no header. class_column is the 1-based position of the
    class column; the remaining columns become attributes x1..xn in file
    order. Missing-value tokens such as "?" are ordinary tokens and receive
    their own code. With schema given, the provided codebooks are used and
    unknown tokens are rejected; otherwise codebooks are built from the data
    under ordering_policy.
    """
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if not rows:
        raise StructuralError(f"{path}: empty file")
    width = len(rows[0])
    for i, row in enumerate(rows, start=1):
        if len(row) != width:
            raise StructuralError(f"{path}: row {i} has {len(row)} fields, expected {width}")
    if not 1 <= class_column <= width:
        raise StructuralError(f"{path}: class column {class_column} out of range 1..{width}")
    if width < 2:
        raise StructuralError(f"{path}: need at least one attribute besides the class")

    rows = [[tok.strip() for tok in row] for row in rows]
    class_raw = [row[class_column - 1] for row in rows]
    attr_cols = []
    for j in range(width):
        if j == class_column - 1:
            continue
        attr_cols.append([row[j] for row in rows])
    n_attrs = len(attr_cols)

    if class_tokens is not None:
        token_map = dict(class_tokens)
        unknown = sorted(set(class_raw) - set(token_map))
        if unknown:
            raise ValidationError(f"unknown class tokens {unknown}")
        names = dict(class_names) if class_names else {v: k for k, v in token_map.items()}
    else:
        cb = Codebook.from_values(class_raw, ordering_policy)
        token_map = dict(cb.raw_to_code)
        names = {v: k for k, v in token_map.items()}
    labels = np.array([token_map[t] for t in class_raw], dtype=np.int64)

    if schema is not None:
        schemas = tuple(schema)
        if len(schemas) != n_attrs:
            raise ValidationError(f"schema has {len(schemas)} attributes, file has {n_attrs}")
    else:
        if attribute_names is not None and len(attribute_names) != n_attrs:
            raise ValidationError("attribute_names length does not match the file")
        schemas = tuple(
            AttributeSchema(
                name=attribute_names[j] if attribute_names else f"X{j + 1}",
                index=j + 1,
                mtype=MeasurementType("nominal"),
                codebook=Codebook.from_values(attr_cols[j], ordering_policy),
            )
            for j in range(n_attrs)
        )

    columns = []
    for j, schema_j in enumerate(schemas):
        cb = schema_j.codebook
        if cb is None:
            raise ValidationError(f"attribute {schema_j.name!r} needs a codebook to load raw tokens")
        try:
            columns.append(np.array([cb.raw_to_code[t] for t in attr_cols[j]], dtype=np.int64))
        except KeyError as exc:
            raise ValidationError(
                f"attribute {schema_j.name!r}: token {exc.args[0]!r} not in codebook"
            ) from None
    return Dataset(schemas, columns, labels, names)


# --- interpretability guard -----------------------------------------------


@dataclass(frozen=True)
class GuardViolation:
    attribute: int
    relation: str
    kind: str

    def __str__(self):
        return f"relation {self.relation!r} is not meaningful on {self.kind} attribute x{self.attribute}"


@dataclass(frozen=True)
class GuardResult:
    ok: bool
    violations: tuple = ()

    def __bool__(self):
        return self.ok


def _relations_required(obj) -> tuple:
    """Relation tags an expression needs, duck typed on shape."""
    # (relation, attribute) pair
    if isinstance(obj, tuple) and len(obj) == 2 and isinstance(obj[0], str):
        return ((obj[0], int(obj[1])),)
    polarity = getattr(obj, "polarity", None)
    if polarity in ("include", "exclude"):
        tag = "eq" if polarity == "include" else "neq"
        return ((tag, obj.attribute),)
    # hyperblock sides
    if hasattr(obj, "center") and hasattr(obj, "length"):
        return (("difference", obj.attribute), ("leq", obj.attribute))
    if hasattr(obj, "start") and hasattr(obj, "end"):
        return (("leq", obj.attribute),)
    if hasattr(obj, "allowed"):
        return (("eq", obj.attribute),)
    raise ValidationError(f"cannot derive required relations for {obj!r}")


def guard(clause_or_expression, schema: AttributeSchema, extra_allowed=()) -> GuardResult:
    """Check that an expression only uses relations meaningful on schema.

    Accepts rule clauses, hyperblock sides, or a raw (relation, attribute)
    pair. extra_allowed widens the whitelist for attributes with a declared
    exception list (semi-ordered nominal data).
    """
    required = _relations_required(clause_or_expression)
    permitted = allowed_ops(schema.mtype.effective_kind) | frozenset(extra_allowed)
    violations = []
    for relation, attr in required:
        if attr != schema.index:
            raise ValidationError(
                f"expression references attribute {attr}, schema is for {schema.index}"
            )
        if relation not in permitted:
            violations.append(GuardViolation(attr, relation, schema.mtype.kind))
    return GuardResult(not violations, tuple(violations))


def guard_rule(rule, dataset: Dataset, extra_allowed=()) -> GuardResult:
    """Guard every clause of a rule against its attribute's schema."""
    violations = []
    for clause in rule.clauses:
        result = guard(clause, dataset.schema(clause.attribute), extra_allowed)
        violations.extend(result.violations)
    return GuardResult(not violations, tuple(violations))
