"""Compiled vs pure-Python kernel: wall time for identical integrations.

Usage: python3 bench/benchmark.py [--repeat N]
"""

import argparse
import time

import numpy as np

from diracpt import _kernels_py, integrator
from diracpt.core import PhysicalParams
from diracpt.potentials import make_model

try:
    from diracpt import _kernels
except ImportError:
    _kernels = None


CASES = [
    ("poeschl_teller", {"lam": 2.0}, 2.5),
    ("scarf_dirac", {"l": 1, "n": 1, "c": 1.0}, 1.5),
    ("centrifugal", {"c_prime": 0.5}, 1.5),
    ("scalar_one_bound", {}, 1.5),
]


def run_case(backend, model, E, repeat):
    system = integrator.dirac_system(model, E, 1.0)
    cfg = integrator.IntegratorConfig()
    L = cfg.box(model.tail)
    y0 = np.eye(2, dtype=complex)
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        y, ls, nsteps, *_ = backend.integrate(system.kind, system.sp, system.mode, system.mp,
                                              system.coef_fn, -L, L, y0, cfg.rtol, cfg.atol,
                                              int(cfg.max_steps), 0.0, None)
        best = min(best, time.perf_counter() - t0)
    return best, nsteps, y * np.exp(ls)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _kernels is None:
        print("compiled extension not built; run `pip install -e . --no-build-isolation` first")
        return
    print(f"{'model':<18} {'steps':>7} {'compiled [ms]':>14} {'python [ms]':>12} {'speedup':>8} {'max diff':>9}")
    for name, kw, E in CASES:
        model = make_model(name, **kw)
        tc, n, yc = run_case(_kernels, model, E, args.repeat)
        tp, _, yp = run_case(_kernels_py, model, E, max(1, args.repeat // 3))
        diff = np.max(np.abs(yc - yp)) / np.max(np.abs(yp))
        print(f"{name:<18} {n:>7} {1e3 * tc:>14.2f} {1e3 * tp:>12.1f} {tp / tc:>8.0f} {diff:>9.1e}")
    # full scattering solve through the public API
    model = make_model("poeschl_teller", lam=2.0)
    t0 = time.perf_counter()
    for E in np.linspace(2.3, 3.5, 20):
        integrator.scatter(model, PhysicalParams(1.0, E))
    print(f"20-energy scatter sweep (active backend {integrator.kernels.BACKEND}): "
          f"{time.perf_counter() - t0:.2f} s")


if __name__ == "__main__":
    main()
