#!/usr/bin/env python3
"""Snapshot live service responses into tests/fixtures.

The UI tests replay these documents through a fake fetch, so every number
they assert against is a real server answer, not something invented in
TypeScript. Re-run after changing the service:

    python3 scripts/capture_fixtures.py
"""

import json
from pathlib import Path

from fastapi.testclient import TestClient

from artifact.http_service import build_app

HERE = Path(__file__).resolve().parent
FIXTURES = HERE.parent / "tests" / "fixtures"
DATA = HERE.parent.parent / "data" / "agaricus-lepiota.data"


def save(name, payload):
    path = FIXTURES / name
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    print(f"wrote {path.relative_to(HERE.parent)}")


def main():
    FIXTURES.mkdir(parents=True, exist_ok=True)
    client = TestClient(build_app([str(DATA)]))
    ds = "agaricus-lepiota"

    save("datasets.json", client.get("/datasets").json())
    save("summary.json", client.get(f"/datasets/{ds}/summary").json())
    save("blocks_odor.json", client.get(f"/datasets/{ds}/blocks", params={"attr": 5}).json())
    save(
        "blocks_odor_pure.json",
        client.get(f"/datasets/{ds}/blocks", params={"attr": 5, "purity": 1.0}).json(),
    )

    layout_req = {"attributes": [5, 20, 21]}
    save("layout_small.json", client.post(f"/datasets/{ds}/layout", json=layout_req).json())
    flipped_req = {"attributes": [5, 20, 21], "transforms": [{"op": "flip", "attr": 5}]}
    save("layout_flipped.json", client.post(f"/datasets/{ds}/layout", json=flipped_req).json())
    twice_req = {
        "attributes": [5, 20, 21],
        "transforms": [{"op": "flip", "attr": 5}, {"op": "flip", "attr": 5}],
    }
    save("layout_flip_twice.json", client.post(f"/datasets/{ds}/layout", json=twice_req).json())
    save(
        "layout_stalk.json",
        client.post(f"/datasets/{ds}/layout", json={"attributes": [11, 12]}).json(),
    )

    foul_req = {
        "selections": [{"attr": 5, "values": [5], "membership": "in"}],
        "target_class": 1,
    }
    save("extract_foul.json", client.post(f"/datasets/{ds}/rule/from-blocks", json=foul_req).json())

    blocks11 = client.get(f"/datasets/{ds}/blocks", params={"attr": 11}).json()
    blocks12 = client.get(f"/datasets/{ds}/blocks", params={"attr": 12}).json()
    two_req = {
        "selections": [
            {"attr": 11, "values": blocks11[0]["values"], "membership": "in"},
            {"attr": 12, "values": blocks12[0]["values"], "membership": "not-in"},
        ],
        "target_class": 1,
    }
    save("blocks_stalk_root.json", blocks11)
    save("blocks_stalk_surface.json", blocks12)
    save("extract_two_block.json", client.post(f"/datasets/{ds}/rule/from-blocks", json=two_req).json())

    save("describe.json", client.get(f"/datasets/{ds}/describe").json())


if __name__ == "__main__":
    main()
