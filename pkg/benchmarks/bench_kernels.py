"""Time the compiled kernels against the pure-Python ones on the same inputs.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each row reports the best of ``repeat`` runs per backend and the speedup.
"""

import argparse
import random
import timeit

from chainlab import _backend
from chainlab.complex import flag_completion, full_skeleton, graph
from chainlab.model import ModelParams, trial_bitgen


def _random_graph(N, density, seed):
    rng = random.Random(seed)
    return graph(N, [(a, b) for a in range(N) for b in range(a + 1, N) if rng.random() < density])


def cases():
    """(name, callable taking a kernel module)."""
    prm = ModelParams.from_p([0.95, 0.7, 0.6, 0.5], N=40)
    G = _random_graph(40, 0.5, 1)
    dense = _random_graph(11, 0.8, 2)
    K = flag_completion(_random_graph(30, 0.6, 3), 1)
    S = full_skeleton(16, 2)
    y = sum(1 << v for v in range(0, 40, 3))

    def sample(ker):
        for t in range(20):
            ker.sample_levels(prm.N, prm.r, prm.p, trial_bitgen(5, t))

    def flags(ker):
        ker.flag_levels(list(K.adjacency), K.vertex_mask, K.sorted_masks(1), 5)

    def closed(ker):
        lower = S.sorted_masks(2)
        ker.boundary_closed(lower, set(lower), list(S.adjacency), S.vertex_mask, 3)

    def expand(ker):
        for _ in range(20):
            ker.expand_once(list(G.adjacency), G.vertex_mask, y)

    def count(ker):
        ker.count_patterns(list(dense.adjacency), dense.vertex_mask, 1, 1)

    return [
        ("sample_levels N=40 r=3 x20", sample),
        ("flag_levels N=30 r=5", flags),
        ("boundary_closed N=16 d=3", closed),
        ("expand_once N=40 x20", expand),
        ("count_patterns N=11 g=1", count),
    ]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    names = _backend.available()
    if "cython" not in names:
        print("compiled kernels are not built; only the Python backend is available")
    print(f"{'case':32s}" + "".join(f"{n:>12s}" for n in names) + ("   speedup" if len(names) > 1 else ""))
    for label, fn in cases():
        best = {}
        for n in names:
            ker = _backend.by_name(n)
            best[n] = min(timeit.repeat(lambda: fn(ker), number=1, repeat=args.repeat))
        row = f"{label:32s}" + "".join(f"{best[n] * 1e3:10.2f}ms" for n in names)
        if len(names) > 1:
            row += f"{best['python'] / best['cython']:9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
