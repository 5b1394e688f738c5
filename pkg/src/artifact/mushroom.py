"""Loader for the UCI mushroom dataset (agaricus-lepiota.data).

Letter codes are mapped to integers in the order the values are listed in
the UCI attribute documentation, 1-based. That ordering is what makes the
classic odor rule come out as x5 in {3,4,5,6,8,9}: almond=1, anise=2,
creosote=3, fishy=4, foul=5, musty=6, none=7, pungent=8, spicy=9.

Class ids: poisonous=1, edible=2.
"""

from __future__ import annotations

from pathlib import Path

from .data_model import (
    AttributeSchema,
    Codebook,
    Dataset,
    MeasurementType,
    ValidationError,
    load_csv,
)

POISONOUS = 1
EDIBLE = 2

CLASS_TOKENS = {"p": POISONOUS, "e": EDIBLE}
CLASS_NAMES = {POISONOUS: "poisonous", EDIBLE: "edible"}

# (attribute name, letter codes in documentation order)
ATTRIBUTES = (
    ("cap-shape", "bcxfks"),
    ("cap-surface", "fgys"),
    ("cap-color", "nbcgrpuewy"),
    ("bruises", "tf"),
    ("odor", "alcyfmnps"),
    ("gill-attachment", "adfn"),
    ("gill-spacing", "cwd"),
    ("gill-size", "bn"),
    ("gill-color", "knbhgropuewy"),
    ("stalk-shape", "et"),
    ("stalk-root", "bcuezr?"),
    ("stalk-surface-above-ring", "fyks"),
    ("stalk-surface-below-ring", "fyks"),
    ("stalk-color-above-ring", "nbcgopewy"),
    ("stalk-color-below-ring", "nbcgopewy"),
    ("veil-type", "pu"),
    ("veil-color", "nowy"),
    ("ring-number", "not"),
    ("ring-type", "ceflnpsz"),
    ("spore-print-color", "knbhrouwy"),
    ("population", "acnsvy"),
    ("habitat", "glmpuwd"),
)

DEFAULT_DATA_PATH = Path(__file__).resolve().parents[2] / "data" / "agaricus-lepiota.data"


def mushroom_schema() -> tuple:
    """AttributeSchema list with documentation-order codebooks."""
    schemas = []
    for pos, (name, letters) in enumerate(ATTRIBUTES, start=1):
        schemas.append(
            AttributeSchema(
                name=name,
                index=pos,
                mtype=MeasurementType("nominal"),
                codebook=Codebook.from_ordered(list(letters), "documentation-order"),
            )
        )
    return tuple(schemas)


def load_mushroom(path=None) -> Dataset:
    """Load agaricus-lepiota.data (class in column 1, tokens p/e)."""
    if path is None:
        path = DEFAULT_DATA_PATH
    return load_csv(
        path,
        schema=mushroom_schema(),
        class_column=1,
        class_tokens=CLASS_TOKENS,
        class_names=CLASS_NAMES,
    )


def code_of(attribute_name: str, letter: str) -> int:
    """Integer code of a letter value, by attribute name."""
    for name, letters in ATTRIBUTES:
        if name == attribute_name:
            if letter not in letters:
                raise ValidationError(f"{letter!r} is not a documented value of {attribute_name}")
            return letters.index(letter) + 1
    raise ValidationError(f"unknown attribute {attribute_name!r}")


if __name__ == "__main__":
    ds = load_mushroom()
    print(f"{ds.n_cases} cases, {ds.n_attributes} attributes")
    for cid in ds.class_ids:
        print(f"  class {cid} ({ds.class_names[cid]}): {ds.class_count(cid)}")
