import pathlib

import hypothesis
import numpy as np
import pytest

from artifact.data_model import AttributeSchema, Codebook, Dataset, MeasurementType
from artifact.mushroom import load_mushroom

hypothesis.settings.register_profile(
    "suite", max_examples=60, deadline=None, derandomize=True
)
hypothesis.settings.load_profile("suite")

DATA = pathlib.Path(__file__).resolve().parent.parent / "data" / "agaricus-lepiota.data"

# filled by test_acceptance, printed at the end of the run
ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def mushroom() -> Dataset:
    return load_mushroom(DATA)


def make_dataset(columns, labels, class_names=None, kinds=None):
    """Small coded dataset for unit tests; columns are 1-based code lists."""
    columns = [np.asarray(c, dtype=np.int64) for c in columns]
    labels = np.asarray(labels, dtype=np.int64)
    if class_names is None:
        class_names = {int(c): f"C{int(c)}" for c in np.unique(labels)}
    attrs = []
    for i, col in enumerate(columns, start=1):
        kind = kinds[i - 1] if kinds else "nominal"
        codebook = Codebook({f"v{v}": int(v) for v in range(1, int(col.max()) + 1)})
        attrs.append(
            AttributeSchema(
                name=f"x{i}", index=i, mtype=MeasurementType(kind), codebook=codebook
            )
        )
    return Dataset(attrs, columns, labels, class_names)


@pytest.fixture
def toy():
    # 12 cases, 2 attributes; attribute 1 separates class 1 cleanly via {1, 3}
    return make_dataset(
        columns=[
            [1, 1, 1, 3, 3, 2, 2, 2, 2, 4, 4, 4],
            [1, 2, 1, 2, 1, 2, 1, 2, 1, 2, 1, 2],
        ],
        labels=[1, 1, 1, 1, 1, 2, 2, 2, 2, 2, 2, 2],
    )


def random_categorical(rng, n_cases=1000, n_attrs=6, max_arity=7, n_classes=3):
    columns = [
        rng.integers(1, rng.integers(2, max_arity + 1) + 1, size=n_cases)
        for _ in range(n_attrs)
    ]
    labels = rng.integers(1, n_classes + 1, size=n_cases)
    return make_dataset(columns, labels)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
