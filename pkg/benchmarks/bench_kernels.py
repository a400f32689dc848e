"""Time the compiled kernels against the numpy fallback on a real design.

    python3 benchmarks/bench_kernels.py [--topology grid:5x5] [--repeat 20]
"""
import argparse
import timeit

import numpy as np

from freqplace import _kernels_py, engine as E
from freqplace.model import PlacerConfig
from freqplace.pipeline import prepare
from freqplace.topology import resolve

try:
    from freqplace import _kernels as _compiled
except ImportError:
    _compiled = None


def cases(topology: str, bins: int):
    cfg = PlacerConfig()
    design = prepare(resolve(topology), cfg)
    region = E.placement_region(design, cfg)
    pos = np.ascontiguousarray(E.initial_positions(design, region, seed=0))
    sizes = np.ascontiguousarray(E.padded_sizes(design.instances))
    xl, yl, xh, yh = region
    bw, bh = (xh - xl) / bins, (yh - yl) / bins
    phi = np.ascontiguousarray(np.random.default_rng(0).normal(size=(bins, bins)))
    nets = E.NetArrays(design.nets, len(pos))
    pi, pj = E.build_collision_map(design.instances, cfg.delta_c).pairs()
    info = f"{topology}: {len(pos)} instances, {len(nets.weights)} nets, {len(pi)} collision pairs, {bins}x{bins} bins"
    return info, {
        "density_map": lambda k: k.density_map(pos, sizes, xl, yl, bw, bh, bins, bins),
        "density_grad": lambda k: k.density_grad(pos, sizes, xl, yl, bw, bh, phi),
        "wa_wirelength": lambda k: k.wa_wirelength(pos, nets.pins, nets.ptr, nets.weights, 0.3),
        "freq_repulsion": lambda k: k.freq_repulsion(pos, pi, pj, 1e-3),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--topology", default="grid:5x5")
    ap.add_argument("--bins", type=int, default=64)
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args(argv)
    info, fns = cases(args.topology, args.bins)
    print(info)
    if _compiled is None:
        print("compiled extension not built; timing the numpy fallback only")
    print(f"{'kernel':<16}{'numpy ms':>12}{'cython ms':>12}{'speedup':>10}")
    for name, fn in fns.items():
        t_py = min(timeit.repeat(lambda: fn(_kernels_py), number=1, repeat=args.repeat)) * 1e3
        if _compiled is None:
            print(f"{name:<16}{t_py:>12.3f}{'-':>12}{'-':>10}")
            continue
        t_c = min(timeit.repeat(lambda: fn(_compiled), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<16}{t_py:>12.3f}{t_c:>12.3f}{t_py / t_c:>9.1f}x")


if __name__ == "__main__":
    main()
