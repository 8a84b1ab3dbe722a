# -*- coding: utf-8 -*-
"""
pipeline.py - Build a recipe, audit every stage, and keep it all in a bundle.

The bundle directory receives one GraphFile + manifest per intermediate
graph (gadgets also get their certificate), one JSON report per audit, and
a summary manifest.json listing stages, checksums and verdicts. If a stage
fails, everything finished before it stays on disk and manifest.json is
written with "status": "aborted" and the failing stage.

Usage:
    python pipeline.py <recipe.json> [options]

Examples:
    python pipeline.py composite_incidence.json
    python pipeline.py composite_lossless.json --bundle-dir out/lossless --json
"""

from __future__ import annotations

import argparse
import os
import sys
import time
import traceback

from construct import write_artifact
from errors import ForgeError, RecipeError
from events import emit, fail, notes_to_warnings, say, warn
from graph_io import write_json
from recipes import Artifact, Recipe, build, default_audits
from verify import run_audit, summarize


def parse_args() -> argparse.Namespace:
    """Parse command-line arguments."""
    parser = argparse.ArgumentParser(
        description="Construct a composite expander and run its full audit suite.",
        epilog="FORGE_WORKERS and FORGE_CATALOG_DIR are honored as in construct/verify.",
    )
    parser.add_argument("recipe", help="Recipe JSON file")
    parser.add_argument(
        "-b", "--bundle-dir", default="",
        help="Bundle directory (default: <recipe name>.bundle)",
    )
    parser.add_argument("--seed", type=int, default=None, help="Override the recipe seed")
    parser.add_argument(
        "--json", action="store_true",
        help="Output JSON lines instead of text",
    )
    return parser.parse_args()


def _file_stem(role: str, used: set[str]) -> str:
    stem, n = role, 2
    while stem in used:
        stem = f"{role}_{n}"
        n += 1
    used.add(stem)
    return stem


class Bundle:
    """Writes artifacts and reports into one directory and tracks the summary."""

    def __init__(self, directory: str, recipe: Recipe) -> None:
        self.directory = directory
        self.recipe = recipe
        self.stages: list[dict] = []
        self.audits: list[dict] = []
        self._stems: set[str] = set()
        self._files: dict[str, str] = {}
        os.makedirs(directory, exist_ok=True)

    def add_artifact(self, artifact: Artifact) -> None:
        if id(artifact.graph) in self._files:
            return
        stem = _file_stem(artifact.role, self._stems)
        graph_path, manifest_path = write_artifact(artifact, os.path.join(self.directory, stem))
        entry = {
            "stage": stem,
            "role": artifact.role,
            "name": artifact.graph.name,
            "file": os.path.basename(graph_path),
            "manifest": os.path.basename(manifest_path),
            "checksum": artifact.checksum,
        }
        if artifact.certificate is not None:
            cert_path = os.path.join(self.directory, f"{stem}.certificate.json")
            write_json(cert_path, artifact.certificate)
            entry["certificate"] = os.path.basename(cert_path)
        self._files[id(artifact.graph)] = stem
        self.stages.append(entry)

    def stem_of(self, artifact: Artifact) -> str:
        return self._files[id(artifact.graph)]

    def add_report(self, stem: str, index: int, report) -> None:
        path = os.path.join(self.directory, f"audit_{index:02d}_{stem}_{report.kind}.json")
        write_json(path, report.to_dict())
        self.audits.append({
            "stage": stem,
            "kind": report.kind,
            "passed": report.passed,
            "value": report.to_dict()["value"],
            "report": os.path.basename(path),
        })

    def finish(self, status: str, started: float, **extra) -> str:
        path = os.path.join(self.directory, "manifest.json")
        write_json(path, {
            "status": status,
            "recipe": self.recipe.to_dict(),
            "stages": self.stages,
            "audits": self.audits,
            "passed": status == "complete" and all(a["passed"] for a in self.audits),
            "wall_time": time.perf_counter() - started,
            **extra,
        })
        return path


def main() -> None:
    """Main entry point."""
    try:
        sys.exit(_main_logic())
    except ForgeError as e:
        fail("--json" in sys.argv, str(e), error=type(e).__name__)
        sys.exit(2)
    except Exception as e:
        fail("--json" in sys.argv, f"Critical Error: {e}")
        traceback.print_exc()
        sys.exit(2)


def _main_logic() -> int:
    """Core logic, wrapped by main() for error handling. Returns the exit code."""
    args = parse_args()
    json_mode = args.json
    started = time.perf_counter()

    recipe = Recipe.load(args.recipe)
    if args.seed is not None:
        recipe = Recipe(recipe.kind, recipe.params, args.seed, recipe.output)
    directory = args.bundle_dir or os.path.splitext(args.recipe)[0] + ".bundle"
    bundle = Bundle(directory, recipe)

    say(json_mode, f"Pipeline {recipe.kind} (seed {recipe.seed}) -> {directory}")
    finished: list[Artifact] = []
    try:
        result = build(recipe, finished)
    except ForgeError as e:
        for artifact in finished:
            bundle.add_artifact(artifact)
        stage = e.stage if isinstance(e, RecipeError) else "parameters"
        path = bundle.finish("aborted", started, failed_stage=stage, error=str(e))
        fail(json_mode, f"stage '{stage}' failed: {e}", stage=stage, manifest=path)
        return 2

    for artifact in result.artifacts:
        bundle.add_artifact(artifact)
        emit(json_mode, {"type": "progress", "stage": bundle.stem_of(artifact), "checksum": artifact.checksum})
    notes_to_warnings(json_mode, result.notes, kind=recipe.kind)

    suite = default_audits(result)
    for i, (artifact, spec) in enumerate(suite, 1):
        stem = bundle.stem_of(artifact)
        emit(json_mode, {"type": "progress", "current": i, "total": len(suite), "stage": stem,
                         "kind": spec["kind"]})
        try:
            report = run_audit(artifact.graph, spec, recipe.seed)
        except ForgeError as e:
            path = bundle.finish("aborted", started, failed_stage=f"audit:{stem}:{spec['kind']}", error=str(e))
            fail(json_mode, f"audit {spec['kind']} on {stem} failed: {e}", manifest=path)
            return 2
        bundle.add_report(stem, i, report)
        emit(json_mode, {"type": "result", "stage": stem, **report.to_dict()})
        if not json_mode:
            print(f"{stem}:\n{summarize(report)}", flush=True)
        for note in report.notes:
            warn(json_mode, note, stage=stem, audit=report.kind)

    path = bundle.finish("complete", started, product=bundle.stem_of(result.product))
    passed = all(a["passed"] for a in bundle.audits)
    emit(json_mode, {"type": "summary", "manifest": path, "stages": len(bundle.stages),
                     "audits": len(bundle.audits), "passed": passed})
    if not json_mode:
        print(f"\n{sum(a['passed'] for a in bundle.audits)}/{len(bundle.audits)} audits passed. Bundle: {directory}")
    return 0 if passed else 1


if __name__ == "__main__":
    main()
