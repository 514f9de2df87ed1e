"""Compare the numba and numpy kernel backends on synthetic link streams.

Usage: python3 benchmarks/bench_kernels.py [--nodes 300] [--links 20000] [--repeat 5]

Each backend is warmed up once (numba compiles or loads its cache) and then
timed over ``--repeat`` runs; the best time is reported. Results of both
backends are checked to agree before timing.
"""
import argparse
import time

import numpy as np

import streampredict as sp
from streampredict import ALL_METRICS, Interval, LinkStream, score_all
from streampredict import _kernels


def synthetic_stream(n_nodes, n_links, horizon, seed):
    rng = np.random.default_rng(seed)
    # skewed node popularity so neighbourhoods overlap like contact traces do
    weights = rng.pareto(1.5, n_nodes) + 1
    weights /= weights.sum()
    u = rng.choice(n_nodes, n_links, p=weights)
    v = rng.choice(n_nodes, n_links, p=weights)
    keep = u != v
    t = np.sort(rng.uniform(0, horizon, keep.sum()))
    links = list(zip(t.tolist(), u[keep].tolist(), v[keep].tolist()))
    return LinkStream.from_links(links, Interval(0, horizon))


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def run(stream, repeat):
    codes = stream.candidate_codes()
    rng = np.random.default_rng(1)
    pred = rng.uniform(0, 3, 2_000_000)
    act = rng.integers(0, 3, 2_000_000).astype(np.float64)
    cases = {
        "score_all (14 metrics)": lambda: score_all(stream, ALL_METRICS, codes),
        "confusion (2M pairs)": lambda: _kernels.confusion_sums(pred, act),
    }
    results = {}
    outputs = {}
    for backend in ("numba", "numpy"):
        previous = sp.set_backend(backend)
        try:
            outputs[backend] = [t.raw for t in score_all(stream, ALL_METRICS, codes)]
            _kernels.confusion_sums(pred, act)
            for name, fn in cases.items():
                results[(name, backend)] = best_of(fn, repeat)
        finally:
            sp.set_backend(previous)
    for a, b in zip(outputs["numba"], outputs["numpy"]):
        np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-12)
    return cases, results


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--nodes", type=int, default=300)
    parser.add_argument("--links", type=int, default=20000)
    parser.add_argument("--horizon", type=float, default=86400.0)
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)
    if not sp._accel.HAS_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    stream = synthetic_stream(args.nodes, args.links, args.horizon, args.seed)
    print(f"{len(stream.nodes)} nodes, {len(stream)} links, "
          f"{len(stream.candidate_codes())} candidate pairs")
    cases, results = run(stream, args.repeat)
    print(f"{'case':<26}{'numba (s)':>12}{'numpy (s)':>12}{'speedup':>10}")
    for name in cases:
        nb, npy = results[(name, "numba")], results[(name, "numpy")]
        print(f"{name:<26}{nb:>12.4f}{npy:>12.4f}{npy / nb:>9.1f}x")


if __name__ == "__main__":
    main()
