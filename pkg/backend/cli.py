# -*- coding: utf-8 -*-
"""
cli.py - Unified entry point for the forge commands.

Dispatches to construct.py, verify.py or pipeline.py based on the first
argument, so one console script handles every workflow.

Usage:
    forge construct <recipe.json> [options]
    forge verify <graph.txt> <audit.json> [options]
    forge pipeline <recipe.json> [options]
"""

from __future__ import annotations

import sys

_USAGE = (
    "forge - Unique-neighbor expander constructions and audits\n\n"
    "Commands:\n"
    "  construct <recipe.json> [-o base] [--seed N]      Build a graph file and manifest\n"
    "  verify    <graph.txt> <audit.json> [-o report]    Run an audit suite\n"
    "  pipeline  <recipe.json> [-b dir] [--seed N]       Build, audit and bundle every stage\n\n"
    "All commands take --json for one JSON event per line.\n"
    "Exit codes: 0 pass, 1 audit failed (witness in report), 2 bad input or precondition.\n\n"
    "Environment:\n"
    "  FORGE_WORKERS       threads for subset scans (default: CPU count)\n"
    "  FORGE_CATALOG_DIR   gadget catalog (default: ~/Documents/UNForge/gadgets)\n\n"
    "Examples:\n"
    "  forge construct recipes/cd_7_5.json\n"
    "  forge verify cd_7_5.txt audits/girth.json\n"
    "  forge pipeline recipes/composite_incidence.json --json\n"
)


def main() -> None:
    if len(sys.argv) < 2 or sys.argv[1] in ("-h", "--help"):
        print(_USAGE)
        sys.exit(0)

    command = sys.argv[1].lower()
    # Remove the command from argv so argparse in submodules works correctly
    sys.argv = [f"forge {command}"] + sys.argv[2:]

    if command == "construct":
        from construct import main as construct_main
        construct_main()
    elif command == "verify":
        from verify import main as verify_main
        verify_main()
    elif command == "pipeline":
        from pipeline import main as pipeline_main
        pipeline_main()
    else:
        print(f"Unknown command: {command}", file=sys.stderr)
        print("Use 'construct', 'verify' or 'pipeline'.", file=sys.stderr)
        sys.exit(2)


if __name__ == "__main__":
    main()
