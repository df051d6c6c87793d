"""Compare the compiled and pure-Python kernels.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Three workloads: the raw SD scan, SD-EF1 checks on random allocations, and the
largest built-in counterexample search.
"""

import argparse
import random
import timeit

from tempfair import _kernels
from tempfair.fairness import Predicate, check
from tempfair.model import Allocation, TemporalInstance
from tempfair.oracle import exists_allocation, fixtures


def scan_workload(seed=0, count=2000, m=40):
    rng = random.Random(seed)
    cases = []
    for _ in range(count):
        n = rng.randint(2, 6)
        owner = _kernels.ints([rng.randrange(n) for _ in range(m)])
        boundary = _kernels.ints([rng.randint(0, 1) for _ in range(m - 1)] + [1])
        cases.append((owner, boundary, n, rng.randrange(n)))

    def run():
        for owner, boundary, n, i in cases:
            _kernels.sd_scan(owner, boundary, n, i, _kernels.SD_EF1)

    return run


def check_workload(seed=1, count=300):
    rng = random.Random(seed)
    cases = []
    for _ in range(count):
        n = rng.randint(2, 5)
        day = [tuple(rng.randint(0, 9) for _ in range(n)) for _ in range(30)]
        inst = TemporalInstance.from_table([day])
        cases.append((inst, Allocation({g: rng.randrange(n) for g in inst.goods})))

    def run():
        for inst, a in cases:
            check(inst, a, inst.goods, Predicate.SD_EF1)

    return run


def search_workload():
    fx = next(f for f in fixtures() if f.name == "identical-days-prefix")
    return lambda: exists_allocation(fx.instance, fx.query)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    workloads = [("sd_scan x2000", scan_workload()), ("SD-EF1 check x300", check_workload()),
                 ("counterexample search", search_workload())]
    backends = _kernels.available_backends()
    if len(backends) < 2:
        print("compiled kernels not built; only the python backend is timed")
    print(f"{'workload':<24}" + "".join(f"{b:>12}" for b in backends) + ("     speedup" if len(backends) > 1 else ""))
    for label, fn in workloads:
        times = []
        for b in backends:
            prev = _kernels.use_backend(b)
            times.append(min(timeit.repeat(fn, number=1, repeat=args.repeat)))
            _kernels.use_backend(prev)
        row = f"{label:<24}" + "".join(f"{t * 1000:>10.2f}ms" for t in times)
        if len(times) > 1:
            row += f"{times[1] / times[0]:>11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
