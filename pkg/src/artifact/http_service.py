"""HTTP API over datasets: blocks, layouts, rule metrics, and mining runs.

Read endpoints are pure functions of their inputs and are cached per
dataset. Mining is asynchronous: POST /mine returns a run id derived from
the dataset and the canonical config JSON, so identical requests land on
the same run; each dataset executes at most one mining run at a time and
further requests queue behind it.
"""

from __future__ import annotations

import hashlib
import json
import threading
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

from fastapi import Body, FastAPI, HTTPException, Query, Response
from fastapi.middleware.cors import CORSMiddleware

from .data_model import Dataset, ValidationError
from .mushroom import load_mushroom
from .rule_engine import metrics, rule_from_json, rule_to_json
from .srg_miner import MinerConfig, config_from_document, run_miner
from .viz_blocks import (
    AxisLayout,
    PlotSpec,
    build_layout,
    export_plot_json,
    flip_attribute,
    linguistic_description,
    purity_filter,
    reference_blocks,
    relocate_small_blocks,
    reorder_attributes,
    sort_blocks_by_class,
    visual_rule_from_blocks,
    Block,
)


def _load_any(path: str) -> Dataset:
    from .cli import _load_dataset

    return _load_dataset(path, "auto")


class _DatasetEntry:
    def __init__(self, dataset_id: str, dataset: Dataset):
        self.id = dataset_id
        self.dataset = dataset
        self.block_cache = {}
        self.cache_lock = threading.Lock()
        # one worker per dataset serializes its mining runs
        self.miner = ThreadPoolExecutor(max_workers=1)


class ServiceState:
    def __init__(self):
        self.datasets = {}
        self.runs = {}
        self.runs_lock = threading.Lock()

    def add_dataset(self, dataset_id: str, dataset: Dataset) -> None:
        self.datasets[dataset_id] = _DatasetEntry(dataset_id, dataset)

    def entry(self, dataset_id: str) -> _DatasetEntry:
        try:
            return self.datasets[dataset_id]
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown dataset {dataset_id!r}") from None


def _run_id(dataset_id: str, config_doc: dict) -> str:
    canonical = json.dumps(config_doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(f"{dataset_id}\n{canonical}".encode()).hexdigest()[:16]


def _blocks_for(
    entry: _DatasetEntry,
    attr: int,
    ref: Optional[int],
    purity: float,
    small: float,
) -> list:
    key = (attr, ref, float(purity), float(small))
    with entry.cache_lock:
        cached = entry.block_cache.get(key)
    if cached is None:
        blocks = reference_blocks(entry.dataset, attr, ref, small_block_threshold=small)
        cached = [b.as_dict() for b in purity_filter(blocks, purity)]
        with entry.cache_lock:
            entry.block_cache[key] = cached
    return cached


def _catch_validation(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except ValidationError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from None


def _layout_from_request(dataset: Dataset, payload: dict) -> AxisLayout:
    reference = payload.get("reference")
    layout = build_layout(
        dataset,
        reference=reference,
        small_block_threshold=float(payload.get("small", 0.0)),
        purity_threshold=float(payload.get("purity", 0.0)),
        attributes=payload.get("attributes"),
    )
    for step in payload.get("transforms", []):
        op = step.get("op")
        if op == "flip":
            layout = flip_attribute(layout, int(step["attr"]))
        elif op == "reorder":
            layout = reorder_attributes(layout, [int(a) for a in step["order"]])
        elif op == "relocate":
            layout = relocate_small_blocks(layout, float(step.get("threshold", 0.2)))
        elif op == "sort":
            layout = sort_blocks_by_class(
                layout, int(step["class"]), on_top=bool(step.get("on_top", True))
            )
        else:
            raise ValidationError(f"unknown layout transform {op!r}")
    return layout


def _selection_blocks(dataset: Dataset, payload: dict) -> list:
    selections = payload.get("selections")
    if not isinstance(selections, list) or not selections:
        raise ValidationError("body needs a non-empty 'selections' list")
    out = []
    for item in selections:
        attr = int(item["attr"])
        values = [int(v) for v in item.get("values", [])]
        membership = item.get("membership", "in")
        if not values:
            raise ValidationError(f"selection on attribute {attr} names no values")
        blocks = reference_blocks(dataset, attr)
        chosen = [b for b in blocks if b.value_codes == frozenset(values)]
        if not chosen:
            # several bars picked at once: pool them into one ad hoc block
            histogram = {}
            col = dataset.column(attr)
            labels = dataset.class_labels
            for cid in dataset.class_ids:
                inside = (labels == cid) & _values_mask(col, values)
                histogram[cid] = int(inside.sum())
            frequency = sum(histogram.values())
            if frequency == 0:
                raise ValidationError(f"values {sorted(values)} cover no case on attribute {attr}")
            dominant = max(histogram, key=lambda c: (histogram[c], -c))
            chosen = [
                Block(
                    attribute=attr,
                    value_codes=frozenset(values),
                    frequency=frequency,
                    class_histogram=histogram,
                    dominant_class=dominant,
                    purity=histogram[dominant] / frequency,
                )
            ]
        out.append((chosen[0], membership))
    return out


def _values_mask(col, values):
    import numpy as np

    return np.isin(col, sorted(values))


def build_app(paths: Sequence[str], *, datasets: Optional[dict] = None) -> FastAPI:
    """App over the given dataset files (or preloaded {id: Dataset})."""
    state = ServiceState()
    if datasets:
        for dataset_id, dataset in datasets.items():
            state.add_dataset(dataset_id, dataset)
    for path in paths:
        dataset = _load_any(path)
        base = Path(path).stem or "dataset"
        dataset_id = base
        suffix = 2
        while dataset_id in state.datasets:
            dataset_id = f"{base}-{suffix}"
            suffix += 1
        state.add_dataset(dataset_id, dataset)
    if not state.datasets:
        raise ValidationError("the service needs at least one dataset")

    app = FastAPI(title="categorical rule discovery service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.service = state

    @app.get("/datasets")
    def list_datasets():
        out = []
        for entry in state.datasets.values():
            ds = entry.dataset
            out.append(
                {
                    "id": entry.id,
                    "cases": ds.n_cases,
                    "attributes": ds.n_attributes,
                    "classes": {str(k): v for k, v in sorted(ds.class_names.items())},
                }
            )
        return out

    @app.get("/datasets/{dataset_id}/summary")
    def summary(dataset_id: str):
        ds = state.entry(dataset_id).dataset
        return {
            "id": dataset_id,
            "cases": ds.n_cases,
            "attributes": [
                {
                    "index": a.index,
                    "name": a.name,
                    "mtype": a.mtype.kind,
                    "values": len(a.codebook.raw_to_code) if a.codebook else None,
                }
                for a in ds.attributes
            ],
            "classes": {str(k): v for k, v in sorted(ds.class_names.items())},
            "class_counts": {str(c): ds.class_count(c) for c in ds.class_ids},
            "fingerprint": ds.fingerprint(),
        }

    @app.get("/datasets/{dataset_id}/blocks")
    def blocks(
        dataset_id: str,
        attr: int = Query(...),
        ref: Optional[int] = Query(None),
        purity: float = Query(0.0),
        small: float = Query(0.0),
    ):
        entry = state.entry(dataset_id)
        return _catch_validation(_blocks_for, entry, attr, ref, purity, small)

    @app.post("/datasets/{dataset_id}/layout")
    def layout(dataset_id: str, payload: dict = Body(...)):
        entry = state.entry(dataset_id)
        lay = _catch_validation(_layout_from_request, entry.dataset, payload)
        return export_plot_json(entry.dataset, PlotSpec(lay))

    @app.post("/datasets/{dataset_id}/rule/metrics")
    def rule_metrics(dataset_id: str, payload: dict = Body(...)):
        entry = state.entry(dataset_id)
        rule = _catch_validation(rule_from_json, payload)
        m = _catch_validation(metrics, rule, entry.dataset)
        return {"rule": rule_to_json(rule), "text": str(rule), "metrics": m.as_dict()}

    @app.post("/datasets/{dataset_id}/rule/from-blocks")
    def rule_from_blocks(dataset_id: str, payload: dict = Body(...)):
        entry = state.entry(dataset_id)
        selections = _catch_validation(_selection_blocks, entry.dataset, payload)
        target = payload.get("target_class")
        if target is None:
            raise HTTPException(status_code=422, detail="body needs 'target_class'")
        rule = _catch_validation(visual_rule_from_blocks, selections, int(target))
        m = _catch_validation(metrics, rule, entry.dataset)
        return {"rule": rule_to_json(rule), "text": str(rule), "metrics": m.as_dict()}

    @app.get("/datasets/{dataset_id}/describe")
    def describe(
        dataset_id: str,
        purity: float = Query(0.8),
        size: float = Query(0.1),
    ):
        entry = state.entry(dataset_id)
        lines = _catch_validation(linguistic_description, entry.dataset, purity, size)
        return {"lines": lines}

    @app.post("/datasets/{dataset_id}/mine", status_code=202)
    def mine(dataset_id: str, response: Response, payload: dict = Body(...)):
        entry = state.entry(dataset_id)
        try:
            config = config_from_document(payload)
        except (ValidationError, KeyError, TypeError) as exc:
            raise HTTPException(status_code=422, detail=f"bad mining config: {exc}") from None
        run_id = _run_id(dataset_id, config.to_document())
        with state.runs_lock:
            existing = state.runs.get(run_id)
            if existing is not None:
                if existing["status"] == "running":
                    raise HTTPException(
                        status_code=409,
                        detail={"run_id": run_id, "status": "running"},
                    )
                response.status_code = 200
                return {"run_id": run_id, "status": existing["status"]}
            state.runs[run_id] = {
                "status": "running",
                "dataset": dataset_id,
                "config": config.to_document(),
                "result": None,
                "error": None,
            }

        def work(cfg: MinerConfig = config):
            try:
                result = run_miner(cfg, entry.dataset)
                with state.runs_lock:
                    state.runs[run_id]["status"] = "done"
                    state.runs[run_id]["result"] = result.to_document()
            except Exception as exc:  # report, never crash the worker
                with state.runs_lock:
                    state.runs[run_id]["status"] = "error"
                    state.runs[run_id]["error"] = str(exc)

        entry.miner.submit(work)
        return {"run_id": run_id, "status": "running"}

    @app.get("/runs/{run_id}")
    def run_status(run_id: str):
        with state.runs_lock:
            run = state.runs.get(run_id)
            if run is None:
                raise HTTPException(status_code=404, detail=f"unknown run {run_id!r}")
            return {
                "run_id": run_id,
                "dataset": run["dataset"],
                "status": run["status"],
                "config": run["config"],
                "result": run["result"],
                "error": run["error"],
            }

    return app
