"""Command line entry points: dataset generation, experiment reproduction,
kernel benchmarking, and the HTTP service."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import kernels
from .bench import kernel_bench, run_convergence, run_runtime
from .data import to_csv
from .synth import gen_adversarial3, gen_clustered, gen_intro3d, gen_x5


def _write(path: str | None, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x]


def cmd_gen(args) -> int:
    if args.generator == "x5":
        data, efg = gen_x5(seed=args.seed)
        text = to_csv(data, extra_labels={"label2": list(efg)})
    elif args.generator == "clustered":
        text = to_csv(gen_clustered(args.n, args.d, args.k, seed=args.seed))
    elif args.generator == "adversarial3":
        data, cons_a, cons_b = gen_adversarial3()
        text = to_csv(data)
        print(f"constraint sets: A={len(cons_a)} primitives, B={len(cons_b)} primitives",
              file=sys.stderr)
    else:
        text = to_csv(gen_intro3d(seed=args.seed))
    _write(args.out, text)
    return 0


def cmd_convergence(args) -> int:
    trace = run_convergence(args.case, args.sweeps)
    lines = ["sweep,var11"]
    lines += [f"{s},{float(v)!r}" for s, v in enumerate(trace)]
    _write(args.out, "\n".join(lines) + "\n")
    return 0


def cmd_runtime(args) -> int:
    rows = run_runtime(
        _int_list(args.n), _int_list(args.d), _int_list(args.k),
        repeats=args.repeats, seed=args.seed,
    )
    if args.markdown:
        lines = ["| n | d | k | init s | optim s | ica s | sweeps | status |",
                 "|---|---|---|--------|---------|-------|--------|--------|"]
        for r in rows:
            lines.append(
                f"| {r.n} | {r.d} | {r.k} | {r.init_s:.3f} | {r.optim_s:.3f} "
                f"| {r.ica_s:.3f} | {r.sweeps} | {r.fit_status} |"
            )
    else:
        lines = ["n,d,k,init_s,optim_s,ica_s,sweeps,status"]
        for r in rows:
            lines.append(
                f"{r.n},{r.d},{r.k},{r.init_s:.6f},{r.optim_s:.6f},"
                f"{r.ica_s:.6f},{r.sweeps},{r.fit_status}"
            )
    _write(args.out, "\n".join(lines) + "\n")
    return 0


def cmd_bench_kernels(args) -> int:
    results = kernel_bench(d=args.d, k=args.k, n=args.n, sweeps=args.sweeps)
    print(f"workload: n={args.n} d={args.d} k={args.k}, {args.sweeps} sweeps "
          f"(active backend: {kernels.BACKEND})")
    base = results.get("python")
    for name in sorted(results):
        note = ""
        if base and name != "python":
            note = f"  ({base / results[name]:.1f}x vs python)"
        print(f"  {name:>8}: {results[name]:.3f} s{note}")
    if "compiled" not in results:
        print("  compiled backend not built; run: python3 setup.py build_ext --inplace")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="info")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="maxlens")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="emit a synthetic dataset as CSV")
    p.add_argument("generator", choices=["x5", "clustered", "adversarial3", "intro3d"])
    p.add_argument("--n", type=int, default=2048)
    p.add_argument("--d", type=int, default=16)
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("convergence", help="trace the adversarial variance decay")
    p.add_argument("--case", choices=["A", "B"], required=True)
    p.add_argument("--sweeps", type=int, default=10000)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_convergence)

    p = sub.add_parser("runtime", help="median wall times over an (n, d, k) grid")
    p.add_argument("--n", default="2048,4096,8192")
    p.add_argument("--d", default="16,32,64")
    p.add_argument("--k", default="1,2,4,8")
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--markdown", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_runtime)

    p = sub.add_parser("bench-kernels", help="compare compiled and python kernels")
    p.add_argument("--n", type=int, default=2048)
    p.add_argument("--d", type=int, default=32)
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--sweeps", type=int, default=20)
    p.set_defaults(func=cmd_bench_kernels)

    p = sub.add_parser("serve", help="run the HTTP session service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
