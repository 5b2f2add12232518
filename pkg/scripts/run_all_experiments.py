"""Run every config in configs/ through the CLI and collect exit codes.

    python3 scripts/run_all_experiments.py [--out results/] [--only NAME ...]

Outputs land in <out>/<config name>/.  Exit status is the largest CLI exit code seen.
"""
import argparse
import pathlib
import sys
import time

from efetlab.cli import main as efetlab_main
from efetlab.experiments import parse_config

ROOT = pathlib.Path(__file__).resolve().parent.parent


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--configs", default=str(ROOT / "configs"))
    parser.add_argument("--out", default="results")
    parser.add_argument("--only", nargs="*", help="config names (without .json)")
    args = parser.parse_args(argv)
    paths = sorted(pathlib.Path(args.configs).glob("*.json"))
    if args.only:
        paths = [p for p in paths if p.stem in set(args.only)]
    worst = 0
    for path in paths:
        tag = parse_config(path.read_text()).experiment
        start = time.perf_counter()
        code = efetlab_main([tag, "--config", str(path), "--out", f"{args.out}/{path.stem}/"])
        print(f"{path.stem}: exit {code} ({time.perf_counter() - start:.1f} s)", flush=True)
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
