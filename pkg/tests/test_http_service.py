"""Service endpoints agree with direct library calls and fail loudly."""

import time

import pytest
from fastapi.testclient import TestClient

from artifact.http_service import build_app
from artifact.rule_engine import Rule, include, metrics, rule_to_json
from artifact.srg_miner import GroupingStrategy, MinerConfig, Thresholds, run_miner
from artifact.viz_blocks import linguistic_description, purity_filter, reference_blocks

from conftest import DATA


@pytest.fixture(scope="module")
def client():
    app = build_app([str(DATA)])
    with TestClient(app) as c:
        yield c


def _config_doc(precision=1.0):
    return MinerConfig(
        algorithm="srg1",
        grouping=GroupingStrategy(kind="sequential", size=3),
        thresholds=Thresholds(min_precision=precision, min_coverage=0.005),
        seed=0,
        target_class=1,
    ).to_document()


def _wait_for(client, run_id, timeout=120.0):
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        record = client.get(f"/runs/{run_id}").json()
        if record["status"] != "running":
            return record
        time.sleep(0.05)
    raise TimeoutError(f"run {run_id} did not finish")


def test_dataset_listing(client, mushroom):
    listing = client.get("/datasets").json()
    assert len(listing) == 1
    entry = listing[0]
    assert entry["id"] == "agaricus-lepiota"
    assert entry["cases"] == 8124 and entry["attributes"] == 22

    summary = client.get("/datasets/agaricus-lepiota/summary").json()
    assert summary["class_counts"] == {"1": 3916, "2": 4208}
    assert len(summary["attributes"]) == 22
    assert summary["fingerprint"] == mushroom.fingerprint()

    assert client.get("/datasets/nope/summary").status_code == 404


def test_blocks_endpoint_matches_library(client, mushroom):
    got = client.get(
        "/datasets/agaricus-lepiota/blocks", params={"attr": 5, "purity": 1.0}
    ).json()
    want = [b.as_dict() for b in purity_filter(reference_blocks(mushroom, 5), 1.0)]
    assert got == want
    assert sum(b["frequency"] for b in got if b["dominant_class"] == 1) == 3796

    assert client.get("/datasets/agaricus-lepiota/blocks", params={"attr": 99}).status_code == 422
    assert client.get("/datasets/nope/blocks", params={"attr": 5}).status_code == 404


def test_layout_endpoint(client):
    resp = client.post("/datasets/agaricus-lepiota/layout", json={})
    assert resp.status_code == 200
    doc = resp.json()
    assert len(doc["axes"]) == 22
    assert sum(line["weight"] for line in doc["lines"]) == 8124

    transformed = client.post(
        "/datasets/agaricus-lepiota/layout",
        json={
            "attributes": [5, 20, 21],
            "transforms": [
                {"op": "flip", "attr": 5},
                {"op": "reorder", "order": [21, 20, 5]},
                {"op": "relocate", "threshold": 0.1},
                {"op": "sort", "class": 1},
            ],
        },
    )
    assert transformed.status_code == 200
    axes = transformed.json()["axes"]
    assert [a["attr"] for a in axes] == [21, 20, 5]
    assert next(a for a in axes if a["attr"] == 5)["flipped"]

    bad = client.post(
        "/datasets/agaricus-lepiota/layout",
        json={"transforms": [{"op": "rotate", "attr": 5}]},
    )
    assert bad.status_code == 422


def test_rule_metrics_endpoint(client, mushroom):
    odor_rule = Rule((include(5, 3, 4, 5, 6, 8, 9),), 1)  # poisonous odors
    resp = client.post("/datasets/agaricus-lepiota/rule/metrics", json=rule_to_json(odor_rule))
    assert resp.status_code == 200
    body = resp.json()
    want = metrics(odor_rule, mushroom).as_dict()
    assert body["metrics"] == want
    assert body["metrics"]["N_covered"] == 3796 and body["metrics"]["precision_pct"] == 100.0

    assert (
        client.post("/datasets/agaricus-lepiota/rule/metrics", json={"kind": "what"}).status_code
        == 422
    )


def test_rule_from_blocks_endpoint(client):
    resp = client.post(
        "/datasets/agaricus-lepiota/rule/from-blocks",
        json={
            "selections": [{"attr": 5, "values": [5], "membership": "in"}],
            "target_class": 1,
        },
    )
    assert resp.status_code == 200
    m = resp.json()["metrics"]
    assert m["N_covered"] == 2160 and m["precision_pct"] == 100.0

    merged = client.post(
        "/datasets/agaricus-lepiota/rule/from-blocks",
        json={
            "selections": [{"attr": 5, "values": [3, 4], "membership": "in"}],
            "target_class": 1,
        },
    )
    assert merged.status_code == 200
    assert merged.json()["metrics"]["N_covered"] == 192 + 576

    no_target = client.post(
        "/datasets/agaricus-lepiota/rule/from-blocks",
        json={"selections": [{"attr": 5, "values": [5]}]},
    )
    assert no_target.status_code == 422

    bogus = client.post(
        "/datasets/agaricus-lepiota/rule/from-blocks",
        json={"selections": [{"attr": 5, "values": [77]}], "target_class": 1},
    )
    assert bogus.status_code == 422


def test_describe_endpoint(client, mushroom):
    got = client.get("/datasets/agaricus-lepiota/describe").json()["lines"]
    assert got == linguistic_description(mushroom, 0.8, 0.1)
    assert client.get(
        "/datasets/agaricus-lepiota/describe", params={"purity": 5.0}
    ).status_code == 422


def test_mining_run_lifecycle(client, mushroom):
    config = _config_doc()
    first = client.post("/datasets/agaricus-lepiota/mine", json=config)
    assert first.status_code == 202
    run_id = first.json()["run_id"]

    # identical request lands on the same run: still running or already done
    again = client.post("/datasets/agaricus-lepiota/mine", json=config)
    if again.status_code == 409:
        assert again.json()["detail"]["run_id"] == run_id
    else:
        assert again.status_code == 200 and again.json()["run_id"] == run_id

    record = _wait_for(client, run_id)
    assert record["status"] == "done"
    covered = [r["metrics"]["N_covered"] for r in record["result"]["rules"]]
    assert covered == [3796, 1752, 1340, 1184, 388, 72, 52]

    direct = run_miner(
        MinerConfig(
            algorithm="srg1",
            grouping=GroupingStrategy(kind="sequential", size=3),
            thresholds=Thresholds(min_precision=1.0, min_coverage=0.005),
            seed=0,
            target_class=1,
        ),
        mushroom,
    )
    assert record["result"]["summary"] == direct.summary

    done = client.post("/datasets/agaricus-lepiota/mine", json=config)
    assert done.status_code == 200
    assert done.json() == {"run_id": run_id, "status": "done"}

    other = client.post("/datasets/agaricus-lepiota/mine", json=_config_doc(precision=0.99))
    assert other.status_code in (200, 202)
    assert other.json()["run_id"] != run_id
    _wait_for(client, other.json()["run_id"])


def test_mining_error_paths(client):
    assert client.get("/runs/ffffffffffffffff").status_code == 404
    bad = client.post("/datasets/agaricus-lepiota/mine", json={})
    assert bad.status_code == 422
    bad_grouping = client.post(
        "/datasets/agaricus-lepiota/mine",
        json={"algorithm": "srg1", "grouping": {"kind": "spiral"}},
    )
    assert bad_grouping.status_code == 422
    assert client.post("/datasets/nope/mine", json=_config_doc()).status_code == 404
