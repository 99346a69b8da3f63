"""CMA-ES in isolation: convergence and the restart-relevant stops.

Minimises the 10-D sphere, then shows the two stopping criteria that
matter for restarting: stagnation on a flat objective and the covariance
condition limit on an extremely ill-conditioned ellipsoid.
"""

import numpy as np

from histarch import (Region, cma_check_stop, cma_init, cma_sample, cma_update,
                      default_lambda)
from histarch.benchmarks import ellipsoid_weights

dim = 10
domain = Region(np.full(dim, -100.0), np.full(dim, 100.0))
lam = default_lambda(dim)
print(f"recommended population size for D={dim}: {lam}")


def minimise(f, state, rng, max_evals):
    evals, best = 0, float("inf")
    while True:
        stop = cma_check_stop(state, evals, max_evals)
        if stop is not None:
            return best, stop, evals
        xs = cma_sample(state, rng)
        fs = np.array([f(x) for x in xs])
        evals += len(fs)
        best = min(best, fs.min())
        cma_update(state, xs, fs)


print("\n== sphere, m0=(3,...,3), sigma0=0.5 ==")
state = cma_init(np.full(dim, 3.0), 0.5, lam, domain)
best, stop, evals = minimise(lambda x: float(x @ x), state,
                             np.random.default_rng(0), 10_000)
print(f"best {best:.3e} after {evals} evaluations, stop: {stop.value}")

print("\n== constant objective stalls into the stagnation stop ==")
state = cma_init(np.zeros(dim), 1.0, lam, domain)
window = state.best_history.maxlen
best, stop, evals = minimise(lambda x: 1.0, state, np.random.default_rng(1), 10 ** 9)
print(f"stop: {stop.value} at generation {state.generation} "
      f"(window 10+ceil(30D/lambda) = {window})")

print("\n== ill-conditioned ellipsoid trips the condition-number stop ==")
w = ellipsoid_weights(dim, 1e8)
state = cma_init(np.full(dim, 3.0), 0.5, lam, domain, tol_fun=None)
best, stop, evals = minimise(lambda x: float(w @ (x * x)), state,
                             np.random.default_rng(2), 50_000)
cond = np.linalg.cond(state.cov)
print(f"stop: {stop.value} after {evals} evaluations, cond(C) = {cond:.3e}")
