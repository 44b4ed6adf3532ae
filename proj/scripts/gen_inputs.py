#!/usr/bin/env python3
"""Write <program>.inputs.json next to every corpus program.

Each run draws VALUES_PER_RUN integers uniformly from [LOW, HIGH] with a
per-program seed derived from SEED and the file name, so regenerating is
reproducible.
"""

import argparse
import json
import pathlib
import random
import zlib

SEED = 42
RUNS = 200
VALUES_PER_RUN = 64
LOW, HIGH = -12, 12


def inputs_for(name: str, runs: int) -> list:
    rng = random.Random(SEED * 1_000_003 + zlib.crc32(name.encode()))
    return [
        {"name": f"run{i:03d}", "values": [rng.randint(LOW, HIGH) for _ in range(VALUES_PER_RUN)]}
        for i in range(runs)
    ]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("corpus", nargs="?", default=pathlib.Path(__file__).resolve().parent.parent / "corpus")
    ap.add_argument("--runs", type=int, default=RUNS)
    args = ap.parse_args()
    for src in sorted(pathlib.Path(args.corpus).glob("*.mc")):
        out = src.with_suffix(".inputs.json")
        out.write_text(json.dumps(inputs_for(src.name, args.runs), separators=(",", ":")) + "\n")
        print(out)


if __name__ == "__main__":
    main()
