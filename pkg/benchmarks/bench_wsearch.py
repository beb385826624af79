"""Compare the compiled and pure-Python weight-search kernels.

    python3 benchmarks/bench_wsearch.py [--repeat N]

Each workload is solved by both kernels; results must agree.
"""

from __future__ import annotations

import argparse
import statistics
import sys
import time
from importlib.resources import files

from socheck import wsearch
from socheck.manifest import parse_manifest
from socheck.modular import a_with_projections, explicit_split, split_fo_ho
from socheck.weights import find_linear_weights


def corpus_lower(name: str, split: str):
    m = parse_manifest(files("socheck").joinpath("corpus", f"{name}.sol").read_text())
    cs = m.system
    sp = split_fo_ho(cs) if split == "fo" else explicit_split(cs, [r.name for r in cs.rules], [])
    return a_with_projections(cs, sp)


def weight_workload(cs, cb: int, kb: int):
    return lambda kernel: find_linear_weights(cs, cb, kb, kernel=kernel).weights


def timed(fn, kernel: str, repeat: int) -> tuple[float, object]:
    times, out = [], None
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn(kernel)
        times.append(time.perf_counter() - start)
    return statistics.median(times), out


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    kernels = wsearch.kernels()
    if "compiled" not in kernels:
        print("compiled kernel not built; only the Python kernel is available")
    workloads = [
        ("gstate+Proj bound 2/2", weight_workload(corpus_lower("gstate", "all"), 2, 2)),
        ("gstate+Proj bound 3/3", weight_workload(corpus_lower("gstate", "all"), 3, 3)),
        ("mapDiv A+Proj bound 2/2", weight_workload(corpus_lower("mapDivMinusHard", "fo"), 2, 2)),
        ("gstate+Proj bound 4/4", weight_workload(corpus_lower("gstate", "all"), 4, 4)),
        ("mapDiv A+Proj bound 3/3", weight_workload(corpus_lower("mapDivMinusHard", "fo"), 3, 3)),
    ]
    print(f"{'workload':28s} " + " ".join(f"{k:>12s}" for k in kernels) + "   speedup")
    for name, fn in workloads:
        results = {k: timed(fn, k, args.repeat) for k in kernels}
        outs = {repr(out) for _, out in results.values()}
        if len(outs) != 1:
            print(f"{name}: kernels disagree", file=sys.stderr)
            return 1
        cols = " ".join(f"{results[k][0] * 1e3:10.2f}ms" for k in kernels)
        speed = ""
        if "compiled" in results and results["compiled"][0] > 0:
            speed = f"{results['python'][0] / results['compiled'][0]:8.1f}x"
        print(f"{name:28s} {cols} {speed}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
