#!/usr/bin/env python3
"""Block-level view of a categorical dataset.

Prints the per-attribute pure-block ranking and the plain-language block
notes, and can write the parallel-coordinates plot as SVG and JSON.
"""

import argparse

from artifact.mushroom import load_mushroom
from artifact.viz_blocks import (
    PlotSpec,
    build_layout,
    linguistic_description,
    order_attributes_by_purity,
    plot_json_text,
    purity_filter,
    reference_blocks,
    render_svg,
)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--data", default="data/agaricus-lepiota.data")
    parser.add_argument("--purity", type=float, default=0.8)
    parser.add_argument("--size", type=float, default=0.1)
    parser.add_argument("--attrs", default=None, help="comma separated indices for the plot")
    parser.add_argument("--svg", default=None)
    parser.add_argument("--json", dest="json_path", default=None)
    args = parser.parse_args()

    dataset = load_mushroom(args.data)
    blocks = {a.index: reference_blocks(dataset, a.index) for a in dataset.attributes}

    ranked = order_attributes_by_purity(dataset, blocks, min_purity=args.purity)
    print(f"attributes by pure-block mass (purity >= {args.purity:.2f}):")
    for attr in ranked[:10]:
        mass = sum(b.frequency for b in purity_filter(blocks[attr], args.purity))
        name = dataset.schema(attr).name
        print(f"  X{attr:<3} {name:<28} {mass:>6} cases in pure blocks")

    print()
    print("block notes:")
    for line in linguistic_description(dataset, args.purity, args.size):
        print(f"  {line}")

    if args.svg or args.json_path:
        attributes = None
        if args.attrs:
            attributes = [int(a) for a in args.attrs.split(",") if a]
        layout = build_layout(dataset, attributes=attributes)
        spec = PlotSpec(layout)
        if args.svg:
            with open(args.svg, "w") as fh:
                fh.write(render_svg(dataset, spec))
            print(f"\nwrote {args.svg}")
        if args.json_path:
            with open(args.json_path, "w") as fh:
                fh.write(plot_json_text(dataset, spec))
            print(f"wrote {args.json_path}")


if __name__ == "__main__":
    main()
