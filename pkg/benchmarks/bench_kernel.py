"""Compare the compiled and pure-Python merge kernels.

    python benchmarks/bench_kernel.py [--repeat N]

Times ``interleavings`` on trace pairs of growing length, with and without
a synchronisation set, and the Broker system enumeration end to end under
each kernel.
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import timeit
from pathlib import Path

from ccsp import _pykernel
from ccsp.terms import Event

try:
    from ccsp import _ckernel
except ImportError:
    _ckernel = None

ROOT = Path(__file__).resolve().parent.parent


def _traces(n: int):
    a = tuple(Event(f"a{i % 3}", (i,)) for i in range(n)) + (Event("s"),)
    b = tuple(Event(f"b{i % 3}", (i,)) for i in range(n)) + (Event("s"),)
    return a, b


def bench_merge(repeat: int):
    print(f"{'case':<24}{'python ms':>12}{'cython ms':>12}{'speedup':>10}")
    for n in (4, 6, 8, 10):
        for sync in (frozenset(), frozenset({"s"})):
            a, b = _traces(n)
            label = f"len {n + 1} x {n + 1}" + (" sync" if sync else "")
            py = min(timeit.repeat(lambda: _pykernel.interleavings(a, b, sync), number=1, repeat=repeat))
            if _ckernel is None:
                print(f"{label:<24}{py * 1e3:>12.2f}{'n/a':>12}")
                continue
            cy = min(timeit.repeat(lambda: _ckernel.interleavings(a, b, sync), number=1, repeat=repeat))
            print(f"{label:<24}{py * 1e3:>12.2f}{cy * 1e3:>12.2f}{py / cy:>9.1f}x")


def bench_system():
    code = (
        "import time\n"
        "from ccsp import IMPLEMENTATION\n"
        "from ccsp.dsl import parse_model\n"
        "from ccsp.analyzer import enumerate_traces\n"
        f"m = parse_model(open({str(ROOT / 'fixtures' / 'broker.ccsp')!r}).read())\n"
        "s = time.perf_counter(); r = enumerate_traces(m, 'System')\n"
        "print(IMPLEMENTATION, len(r.traces), round(time.perf_counter() - s, 3))\n"
    )
    for pure in ("0", "1"):
        env = {**os.environ, "CCSP_PURE_PYTHON": pure}
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
        kernel, traces, seconds = out.stdout.split()
        print(f"broker System, {kernel:<7} kernel: {traces} traces in {seconds} s")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    bench_merge(args.repeat)
    bench_system()


if __name__ == "__main__":
    main()
