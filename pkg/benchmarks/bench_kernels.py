"""Compare the compiled and pure-Python execution kernels.

Stabilizes a pile of chips on the sandpile network of a torus grid with each
kernel and reports the best wall time of several runs.

    python3 benchmarks/bench_kernels.py --side 16 --chips 2000 --repeat 3
"""

from __future__ import annotations

import argparse
import time
from array import array

from abelnet import _pykernels, zoo
from abelnet.core import Digraph

try:
    from abelnet import _ckernels
except ImportError:
    _ckernels = None


def torus(side: int) -> Digraph:
    vertices = [(i, j) for i in range(side) for j in range(side)]
    edges = []
    for i, j in vertices:
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            edges.append(((i, j), ((i + di) % side, (j + dj) % side)))
    return Digraph.from_edge_list(vertices, edges)


def time_kernel(mod, net, start: int, chips: int, repeat: int) -> tuple[float, int]:
    n = len(net.alphabet)
    best, steps = float("inf"), 0
    for _ in range(repeat):
        x = array("q", [0] * n)
        x[start] = chips
        q = array("q", [0] * len(net.vertices))
        counts = array("q", [0] * n)
        limit = array("q", [-1] * n)
        t0 = time.perf_counter()
        steps, _ = mod.greedy_run(*net._tables, x, q, counts, limit, 10**12, None)
        best = min(best, time.perf_counter() - t0)
    return best, steps


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--side", type=int, default=16)
    ap.add_argument("--chips", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    net = zoo.sandpile(torus(args.side), [(0, 0)])
    start = net.letter_index((args.side // 2, args.side // 2))
    py_t, steps = time_kernel(_pykernels, net, start, args.chips, args.repeat)
    print(f"grid {args.side}x{args.side}, {args.chips} chips, {steps} letters processed")
    print(f"python  {py_t * 1e3:10.1f} ms")
    if _ckernels is None:
        print("cython  not built")
        return
    c_t, c_steps = time_kernel(_ckernels, net, start, args.chips, args.repeat)
    assert c_steps == steps
    print(f"cython  {c_t * 1e3:10.1f} ms")
    print(f"speedup {py_t / c_t:10.1f}x")


if __name__ == "__main__":
    main()
