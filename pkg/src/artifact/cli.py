"""Command line front end: encode, mine, cv, overlap, viz, describe, serve.

Exit codes: 0 success, 1 bad input or usage, 2 I/O failure. All outputs are
deterministic for fixed inputs and seed.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .data_model import Dataset, ValidationError, load_csv, schema_from_document
from .encoding import apply_encoding, scheme_file_from_json
from .mushroom import load_mushroom
from .rule_engine import metrics, overlap, rule_from_json
from .srg_miner import (
    GroupingStrategy,
    MinerConfig,
    Thresholds,
    config_from_document,
    kfold_cv,
    run_miner,
)
from .viz_blocks import (
    PlotSpec,
    build_layout,
    linguistic_description,
    plot_json_text,
    render_svg,
)


def _read_text(path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise IOError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _write_text(path, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise IOError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _looks_like_mushroom(path) -> bool:
    try:
        with open(path) as fh:
            first = fh.readline().strip()
    except OSError as exc:
        raise IOError(f"cannot read {path}: {exc.strerror or exc}") from exc
    fields = first.split(",")
    return len(fields) == 23 and fields[0] in ("e", "p")


def _load_dataset(path, fmt: str, schema_path=None) -> Dataset:
    if fmt == "auto":
        fmt = "mushroom" if _looks_like_mushroom(path) else "csv"
    if fmt == "mushroom":
        return load_mushroom(path)
    schema = None
    class_names = None
    if schema_path:
        doc = json.loads(_read_text(schema_path))
        schema, class_names = schema_from_document(doc)
    try:
        return load_csv(path, schema, class_names=class_names)
    except OSError as exc:
        raise IOError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _parse_grouping(text: str, seed: int) -> GroupingStrategy:
    """sequential:SIZE | random:SIZExCOUNT | groups:1,2,3;4,5,6 | expert:FILE"""
    kind, _, rest = text.partition(":")
    if kind == "sequential":
        return GroupingStrategy(kind="sequential", size=int(rest or 3))
    if kind == "random":
        size_s, _, count_s = rest.partition("x")
        return GroupingStrategy(
            kind="random", size=int(size_s or 3), count=int(count_s or 30), seed=seed
        )
    if kind == "groups":
        groups = tuple(
            tuple(int(a) for a in part.split(",") if a) for part in rest.split(";") if part
        )
        if not groups:
            raise ValidationError("groups grouping needs at least one group")
        return GroupingStrategy(kind="expert", groups=groups, source="cli")
    if kind == "expert":
        doc = json.loads(_read_text(rest))
        groups = tuple(tuple(int(a) for a in g) for g in doc)
        return GroupingStrategy(kind="expert", groups=groups, source=str(rest))
    raise ValidationError(f"unknown grouping {text!r}")


@click.group()
def cli() -> None:
    """Rule discovery and lossless block visualization for categorical data."""


_data_options = [
    click.option("--data", "data_path", required=True, help="input data file"),
    click.option(
        "--format",
        "fmt",
        default="auto",
        type=click.Choice(["auto", "mushroom", "csv"]),
        help="input format (auto sniffs the 23-column letter file)",
    ),
    click.option("--schema", "schema_path", default=None, help="schema JSON for csv input"),
]


def _with_data(cmd):
    for opt in reversed(_data_options):
        cmd = opt(cmd)
    return cmd


@cli.command()
@_with_data
@click.option("--schemes", "schemes_path", required=True, help="JSON map attribute -> scheme")
@click.option("--out", "out_path", required=True, help="encoded dataset CSV")
@click.option("--out-schema", "out_schema_path", default=None, help="schema JSON for the output")
def encode(data_path, fmt, schema_path, schemes_path, out_path, out_schema_path):
    """Apply encoding schemes and write the recoded dataset."""
    dataset = _load_dataset(data_path, fmt, schema_path)
    schemes = scheme_file_from_json(_read_text(schemes_path))
    # apply highest index first so earlier indices stay valid while columns shift
    for attr in sorted(schemes, reverse=True):
        dataset = apply_encoding(dataset, attr, schemes[attr]).dataset
    rows = []
    for row in range(dataset.n_cases):
        values = [str(dataset.column(a.index)[row]) for a in dataset.attributes]
        rows.append(",".join([str(int(dataset.class_labels[row]))] + values))
    _write_text(out_path, "\n".join(rows) + "\n")
    if out_schema_path:
        _write_text(out_schema_path, dataset.schema_json())
    click.echo(f"wrote {dataset.n_cases} cases x {dataset.n_attributes} attributes to {out_path}")


def _thresholds(precision: float, coverage: float) -> Thresholds:
    return Thresholds(min_precision=precision, min_coverage=coverage)


@cli.command()
@_with_data
@click.option("--algo", default="srg1", type=click.Choice(["srg0", "srg1", "srg2", "srg3", "srg4", "srg5"]))
@click.option("--grouping", default="sequential:3", help="sequential:N | random:NxM | groups:... | expert:FILE")
@click.option("--precision", default=1.0, show_default=True, help="minimum rule precision")
@click.option("--coverage", default=0.005, show_default=True, help="minimum coverage fraction")
@click.option("--target", "target_class", default=1, show_default=True, help="target class id")
@click.option("--seed", default=0, show_default=True)
@click.option("--config", "config_path", default=None, help="full MinerConfig JSON (overridden by flags)")
@click.option("--out", "out_path", default=None, help="MiningResult JSON path")
@click.option("--report", "report_path", default=None, help="text report path")
def mine(data_path, fmt, schema_path, algo, grouping, precision, coverage,
         target_class, seed, config_path, out_path, report_path):
    """Run a mining pass and print its report."""
    dataset = _load_dataset(data_path, fmt, schema_path)
    if config_path:
        config = config_from_document(json.loads(_read_text(config_path)))
    else:
        config = MinerConfig(
            algorithm=algo,
            grouping=_parse_grouping(grouping, seed),
            thresholds=_thresholds(precision, coverage),
            seed=seed,
            target_class=target_class,
        )
    result = run_miner(config, dataset)
    click.echo(result.report())
    if out_path:
        _write_text(out_path, result.to_json())
    if report_path:
        _write_text(report_path, result.report() + "\n")


@cli.command()
@_with_data
@click.option("--algo", default="srg1", type=click.Choice(["srg0", "srg1", "srg2", "srg3", "srg4", "srg5"]))
@click.option("--grouping", default="sequential:3")
@click.option("--precision", default=0.95, show_default=True)
@click.option("--coverage", default=0.005, show_default=True)
@click.option("--target", "target_class", default=1, show_default=True)
@click.option("--k", default=10, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--stratified/--no-stratified", default=True, show_default=True)
@click.option("--out", "out_path", default=None, help="CV report JSON path")
def cv(data_path, fmt, schema_path, algo, grouping, precision, coverage,
       target_class, k, seed, stratified, out_path):
    """K-fold cross-validation of a mining configuration."""
    dataset = _load_dataset(data_path, fmt, schema_path)
    config = MinerConfig(
        algorithm=algo,
        grouping=_parse_grouping(grouping, seed),
        thresholds=_thresholds(precision, coverage),
        seed=seed,
        target_class=target_class,
    )
    report = kfold_cv(dataset, config, k=k, seed=seed, stratified=stratified)
    click.echo(report.report())
    if out_path:
        _write_text(out_path, report.to_json())


@cli.command(name="overlap")
@_with_data
@click.option("--rules", "rules_path", required=True, help="MiningResult JSON")
@click.option("--out", "out_path", default=None, help="overlap table path")
def overlap_cmd(data_path, fmt, schema_path, rules_path, out_path):
    """Pairwise overlap table for a mined rule set."""
    dataset = _load_dataset(data_path, fmt, schema_path)
    doc = json.loads(_read_text(rules_path))
    try:
        rule_docs = [item["rule"] for item in doc["rules"]]
        target = int(doc["target_class"])
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"not a mining result document: missing {exc}") from None
    rules = [rule_from_json(d) for d in rule_docs]
    lines = []
    for i, r1 in enumerate(rules):
        for j in range(i + 1, len(rules)):
            r2 = rules[j]
            res = overlap(r1, r2, dataset, target)
            lines.append(
                f"R{i + 1} vs R{j + 1}: union {res.union_cases} overlap {res.overlap_cases} "
                f"({res.overlap_pct:.2f}%) added {res.added_cases}"
            )
    table = "\n".join(lines) + "\n"
    click.echo(table, nl=False)
    if out_path:
        _write_text(out_path, table)


@cli.command()
@_with_data
@click.option("--attrs", default=None, help="comma separated attribute indices (default all)")
@click.option("--purity", default=0.0, show_default=True, help="purity filter for shown blocks")
@click.option("--small", default=0.0, show_default=True, help="small-block merge threshold")
@click.option("--svg", "svg_path", default=None, help="SVG output path")
@click.option("--json", "json_path", default=None, help="plot JSON output path")
def viz(data_path, fmt, schema_path, attrs, purity, small, svg_path, json_path):
    """Render the block plot as SVG and/or plot JSON."""
    dataset = _load_dataset(data_path, fmt, schema_path)
    attributes = None
    if attrs:
        attributes = [int(a) for a in attrs.split(",") if a]
    layout = build_layout(
        dataset,
        small_block_threshold=small,
        purity_threshold=purity,
        attributes=attributes,
    )
    spec = PlotSpec(layout)
    if not svg_path and not json_path:
        raise ValidationError("viz needs --svg and/or --json output paths")
    if svg_path:
        _write_text(svg_path, render_svg(dataset, spec))
        click.echo(f"wrote {svg_path}")
    if json_path:
        _write_text(json_path, plot_json_text(dataset, spec))
        click.echo(f"wrote {json_path}")


@cli.command()
@_with_data
@click.option("--purity", default=0.8, show_default=True)
@click.option("--size", default=0.1, show_default=True)
@click.option("--out", "out_path", default=None)
def describe(data_path, fmt, schema_path, purity, size, out_path):
    """Write the linguistic block description."""
    dataset = _load_dataset(data_path, fmt, schema_path)
    lines = linguistic_description(dataset, purity, size)
    text = "\n".join(lines) + ("\n" if lines else "")
    click.echo(text, nl=False)
    if out_path:
        _write_text(out_path, text)


@cli.command()
@click.option("--data", "data_paths", multiple=True, required=True, help="dataset file (repeatable)")
@click.option("--port", default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
def serve(data_paths, port, host):
    """Start the HTTP service over the given datasets."""
    import uvicorn

    from .http_service import build_app

    app = build_app(list(data_paths))
    uvicorn.run(app, host=host, port=port, log_level="warning")


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.UsageError as exc:
        click.echo(exc.format_message(), err=True)
        if exc.ctx is not None:
            click.echo(exc.ctx.get_usage(), err=True)
        return 1
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.Abort:
        return 1
    except ValidationError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except IOError as exc:
        click.echo(f"io error: {exc}", err=True)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
