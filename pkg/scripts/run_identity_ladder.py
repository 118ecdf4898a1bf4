"""Print a residual table for every R-matrix identity over a grid of ranks and moduli.

    python3 scripts/run_identity_ladder.py --N 2 3 4 --samples 20 --workers 4
"""
import argparse
import logging

from ellipticll.identity_suite import SamplePlan, run_suite, suite_passed
from ellipticll.rmatrix import RMatrixFamily
from ellipticll.special_functions import EllipticContext


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--N", type=int, nargs="+", default=[2, 3, 4])
    p.add_argument("--tau", type=complex, nargs="+", default=[1j, 0.3 + 0.8j])
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tolerance", type=float, default=1e-8)
    p.add_argument("--workers", type=int, default=1)
    args = p.parse_args()
    logging.basicConfig(level=logging.WARNING)

    ok = True
    print(f"{'N':>2} {'tau':>12} {'identity':<10} {'max':>10} {'mean':>10} {'time/s':>7}  status")
    for N in args.N:
        for tau in args.tau:
            fam = RMatrixFamily(EllipticContext(N=N, tau=tau))
            reports = run_suite(fam, SamplePlan(seed=args.seed, count=args.samples),
                                tol=args.tolerance, workers=args.workers)
            ok &= suite_passed(reports)
            for r in reports:
                print(f"{N:>2} {str(tau):>12} {r.name:<10} {r.max_residual:10.2e} "
                      f"{r.mean_residual:10.2e} {r.wall_time:7.2f}  {'ok' if r.passed else 'FAIL'}")
    raise SystemExit(0 if ok else 1)


if __name__ == "__main__":
    main()
