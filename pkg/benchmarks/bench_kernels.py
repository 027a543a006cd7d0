"""Compare the compiled and pure-Python kernel backends.

Runs each hot kernel on the same seeded workload with both backends, checks
that the answers are identical, and prints timings.  An end-to-end sweep
slice is timed in subprocesses so that each one selects its backend at
import.

    python benchmarks/bench_kernels.py [--calls N] [--json out.json]
"""
import argparse
import json
import os
import random
import subprocess
import sys
import time

from orbifoldkit import _kernels
from orbifoldkit._kernels import _pykernels

MATS = {2: [(2, 0, 0, 2), (1, 1, -1, 1), (2, 1, 1, -2), (3, 0, 0, 3)],
        3: [(2, 0, 0, 2), (1, -2, 2, -1)],
        4: [(2, 0, 0, 2), (1, -1, 1, 1)],
        6: [(2, 0, 0, 2), (2, -1, 1, 1)]}


def workload(calls, seed=0):
    rng = random.Random(seed)
    out = []
    for _ in range(calls):
        n = rng.choice(sorted(MATS))
        a, b, c, e = rng.choice(MATS[n])
        f = (a, b, c, e, 0, 0, 1)
        q = rng.choice([(1, 0, 0, 1, 0, 0, 1), f])
        d = rng.randint(1, 1000)
        p = _pykernels.normalize(rng.randrange(d), rng.randrange(d), d)
        out.append((n, f, q, p))
    return out


KERNELS = {
    "affine_apply": lambda K, n, f, q, p: K.affine_apply(f, *p),
    "affine_preimages": lambda K, n, f, q, p: K.affine_preimages(f, *p),
    "orbit_canonical": lambda K, n, f, q, p: K.orbit_canonical(n, *p),
    "project": lambda K, n, f, q, p: K.project(n, q, *p),
    "pi_fiber": lambda K, n, f, q, p: sorted(K.pi_fiber(n, q, *p)),
    "project_preimages": lambda K, n, f, q, p: K.project_preimages(n, f, q, *p),
    "transversal_failure": lambda K, n, f, q, p: K.transversal_failure(n, f, q, *p),
}


def time_kernel(K, fn, work):
    started = time.perf_counter()
    out = [fn(K, *w) for w in work]
    return time.perf_counter() - started, out


SWEEP_SNIPPET = (
    "import time;from orbifoldkit.reports import run_sweep;t=time.perf_counter();"
    "s=run_sweep((2,3,4,6),6,2,('id','F'),samples=20);"
    "print(time.perf_counter()-t, s['accepted'], s['ok'])"
)


def time_sweep(pure):
    env = dict(os.environ)
    env["ORBIFOLDKIT_PURE_PYTHON"] = "1" if pure else "0"
    out = subprocess.run([sys.executable, "-c", SWEEP_SNIPPET], env=env,
                         capture_output=True, text=True, check=True).stdout.split()
    return float(out[0]), int(out[1]), out[2] == "True"


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--calls", type=int, default=20000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--no-sweep", action="store_true")
    ap.add_argument("--json")
    args = ap.parse_args(argv)

    compiled = _kernels.compiled
    if compiled is None:
        print("compiled backend not available; build with `pip install -e .`")
    work = workload(args.calls, args.seed)
    rows = []
    print(f"{'kernel':22s} {'python (s)':>11s} {'compiled (s)':>13s} {'speedup':>8s}")
    for name, fn in KERNELS.items():
        t_py, ref = time_kernel(_pykernels, fn, work)
        row = {"kernel": name, "python": t_py}
        if compiled is not None:
            t_c, got = time_kernel(compiled, fn, work)
            if got != ref:
                raise SystemExit(f"backends disagree on {name}")
            row.update(compiled=t_c, speedup=t_py / t_c)
            print(f"{name:22s} {t_py:11.3f} {t_c:13.3f} {t_py / t_c:7.1f}x")
        else:
            print(f"{name:22s} {t_py:11.3f} {'-':>13s} {'-':>8s}")
        rows.append(row)
    result = {"calls": args.calls, "kernels": rows}
    if not args.no_sweep:
        t_py, n_py, ok_py = time_sweep(pure=True)
        line = f"sweep slice (|det| <= 6): python {t_py:.2f}s"
        result["sweep"] = {"instances": n_py, "python": t_py, "ok": ok_py}
        if compiled is not None:
            t_c, n_c, ok_c = time_sweep(pure=False)
            line += f", compiled {t_c:.2f}s, {t_py / t_c:.1f}x"
            result["sweep"].update(compiled=t_c, ok=ok_py and ok_c)
        print(line + f" ({n_py} instances)")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(result, fh, indent=2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
