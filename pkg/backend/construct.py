# -*- coding: utf-8 -*-
"""
construct.py - Build a graph from a JSON recipe.

Writes <output>.txt (GraphFile) and <output>.manifest.json. The manifest
carries the full recipe, so rebuilding from it gives a byte-identical
graph file.

Usage:
    python construct.py <recipe.json> [options]

Examples:
    python construct.py cd_7_5.json
    python construct.py lps.json -o out/lps_5_13 --seed 3 --json
"""

from __future__ import annotations

import argparse
import os
import sys
import traceback

from errors import ForgeError
from events import emit, fail, notes_to_warnings, say
from graph_io import write_graph, write_json
from recipes import Artifact, Recipe, build


def parse_args() -> argparse.Namespace:
    """Parse command-line arguments."""
    parser = argparse.ArgumentParser(
        description="Construct a bipartite graph (D(k,q), CD, LPS, incidence, tripartite, gadget, composites).",
        epilog="FORGE_CATALOG_DIR sets where gadget searches are cached.",
    )
    parser.add_argument("recipe", help="Recipe JSON file")
    parser.add_argument(
        "-o", "--output", default="",
        help="Output path without extension (default: recipe 'output', else the recipe file name)",
    )
    parser.add_argument("--seed", type=int, default=None, help="Override the recipe seed")
    parser.add_argument(
        "--json", action="store_true",
        help="Output JSON lines instead of text",
    )
    return parser.parse_args()


def output_base(recipe: Recipe, recipe_path: str, override: str = "") -> str:
    if override:
        return override
    if recipe.output:
        return recipe.output
    return os.path.splitext(recipe_path)[0]


def write_artifact(artifact: Artifact, base: str) -> tuple[str, str]:
    """Write <base>.txt and <base>.manifest.json; returns both paths."""
    graph_path = base + ".txt"
    manifest_path = base + ".manifest.json"
    written = write_graph(artifact.graph, graph_path, manifest_ref=os.path.basename(manifest_path))
    if written != artifact.checksum:
        raise ForgeError(f"{graph_path}: written checksum differs from the audited graph")
    manifest = dict(artifact.manifest)
    if artifact.certificate is not None:
        manifest["certificate"] = artifact.certificate
    write_json(manifest_path, manifest)
    return graph_path, manifest_path


def main() -> None:
    """Main entry point."""
    try:
        _main_logic()
    except ForgeError as e:
        fail("--json" in sys.argv, str(e), error=type(e).__name__)
        sys.exit(2)
    except Exception as e:
        fail("--json" in sys.argv, f"Critical Error: {e}")
        traceback.print_exc()
        sys.exit(2)


def _main_logic() -> None:
    """Core logic, wrapped by main() for error handling."""
    args = parse_args()
    json_mode = args.json

    recipe = Recipe.load(args.recipe)
    if args.seed is not None:
        recipe = Recipe(recipe.kind, recipe.params, args.seed, recipe.output)
    base = output_base(recipe, args.recipe, args.output)

    say(json_mode, f"Building {recipe.kind} (seed {recipe.seed})")
    result = build(recipe)
    product = result.product
    graph_path, manifest_path = write_artifact(product, base)
    notes_to_warnings(json_mode, result.notes, kind=recipe.kind)

    g = product.graph
    emit(json_mode, {
        "type": "summary",
        "kind": recipe.kind,
        "graph": graph_path,
        "manifest": manifest_path,
        "n_left": g.n_left,
        "n_right": g.n_right,
        "n_edges": g.n_edges,
        "bidegree": [g.d_left, g.d_right],
        "checksum": product.checksum,
    })
    if not json_mode:
        print(f"\n{'='*50}")
        print(f"  {g.name}")
        print(f"  {g.n_left} + {g.n_right} vertices, {g.n_edges} edges, ({g.d_left},{g.d_right})-biregular")
        print(f"  Graph:    {graph_path}")
        print(f"  Manifest: {manifest_path}")
        print(f"{'='*50}")


if __name__ == "__main__":
    main()
