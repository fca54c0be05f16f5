#!/usr/bin/env python3
"""Benchmark the compiled kernels against the NumPy fallback.

Times the batch forward/backward passes on the shapes the package actually
uses (growth surrogate: 20 -> 32 -> 4; Q-net: 13 -> 64 -> 81), plus a short
end-to-end surrogate training run under each backend.

Usage:
    python benchmarks/bench_kernels.py [--repeats 2000]

The compiled backend must have been built (it is by default when Cython is
present at install time); otherwise only the NumPy numbers are reported.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from greenhouse_rl._kernels import pure

try:
    from greenhouse_rl._kernels import _fast
except ImportError:
    _fast = None

SHAPES = [
    # (label, batch, d_in, d_hidden, d_out)
    ("surrogate fwd batch", 128, 20, 32, 4),
    ("surrogate fwd single", 1, 20, 32, 4),
    ("q-net fwd batch", 32, 13, 64, 81),
    ("q-net fwd single", 1, 13, 64, 81),
]


def time_fn(fn, repeats: int) -> float:
    fn()  # warm-up
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - t0) / repeats * 1e6  # microseconds


def bench_kernels(repeats: int) -> None:
    backends = [("numpy", pure)] + ([("compiled", _fast)] if _fast else [])
    print(f"{'case':<28}" + "".join(f"{name:>12}" for name, _ in backends) + "    speedup")
    rng = np.random.default_rng(0)
    for label, n, d_in, d_h, d_out in SHAPES:
        x = rng.normal(size=(n, d_in))
        w1 = rng.normal(size=(d_in, d_h))
        b1 = rng.normal(size=d_h)
        w2 = rng.normal(size=(d_h, d_out))
        b2 = rng.normal(size=d_out)
        dy = rng.normal(size=(n, d_out))
        _, h = pure.mlp_forward(x, w1, b1, w2, b2)

        fwd_times = [
            time_fn(lambda impl=impl: impl.mlp_forward(x, w1, b1, w2, b2), repeats)
            for _, impl in backends
        ]
        bwd_times = [
            time_fn(lambda impl=impl: impl.mlp_backward(x, h, dy, w2), repeats)
            for _, impl in backends
        ]
        for suffix, times in (("", fwd_times), (" backward", bwd_times)):
            row = f"{label + suffix:<28}" + "".join(f"{t:>10.1f}us" for t in times)
            if len(times) == 2:
                row += f"    {times[0] / times[1]:.2f}x"
            print(row)


def bench_training(repeats: int) -> None:
    """End-to-end surrogate fit on synthetic data, once per backend."""
    import os
    import subprocess
    import sys

    code = (
        "import time, numpy as np\n"
        "from greenhouse_rl import surrogate, _kernels\n"
        "rng = np.random.default_rng(0)\n"
        "samples = [surrogate.WindowSample(rng.normal(size=(4, 4)),"
        " rng.normal(size=4), rng.normal(size=4) * 0.01) for _ in range(2000)]\n"
        "cfg = surrogate.TrainConfig(window_len=4, epochs=30, seed=1)\n"
        "t0 = time.perf_counter()\n"
        "surrogate.train(samples, cfg)\n"
        "print(f'{_kernels.BACKEND}: {time.perf_counter() - t0:.2f}s')\n"
    )
    print("\nsurrogate training, 2000 samples x 30 epochs:")
    for backend in ("python", "compiled", "auto"):
        if backend != "python" and _fast is None:
            continue
        env = dict(os.environ, GREENHOUSE_RL_KERNELS=backend)
        out = subprocess.run([sys.executable, "-c", code], env=env,
                             capture_output=True, text=True)
        print("  " + (out.stdout.strip() or out.stderr.strip()))


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=2000)
    args = parser.parse_args()
    if _fast is None:
        print("note: compiled backend unavailable, reporting NumPy only\n")
    bench_kernels(args.repeats)
    bench_training(args.repeats)


if __name__ == "__main__":
    main()
