"""Timing comparison between the compiled and pure-Python kernel backends.

Run as a script:

    python3 benchmarks/bench_kernels.py

Both backends are exercised on identical inputs.  Outputs are checked for
bit-identity as a side effect, so a benchmark run doubles as a coarse
parity check on larger inputs than the test suite uses.
"""

from __future__ import annotations

import sys
import timeit

import numpy as np

from bellsim._kernels import _pure

try:
    from bellsim._kernels import _fast
except ImportError:
    print("compiled backend is not built; run pip install first", file=sys.stderr)
    raise SystemExit(1)


def _time(fn, repeats: int) -> float:
    return min(timeit.repeat(fn, number=1, repeat=repeats))


def bench_response_product_sum(rng):
    n = 200_000
    f = rng.choice([-1.0, 1.0], size=n)
    g = rng.choice([-1.0, 1.0], size=n)
    w = rng.dirichlet(np.ones(n))
    out_f = _fast.response_product_sum(f, g, w)
    out_p = _pure.response_product_sum(f, g, w)
    assert np.float64(out_f).tobytes() == np.float64(out_p).tobytes()
    return (_time(lambda: _fast.response_product_sum(f, g, w), 20),
            _time(lambda: _pure.response_product_sum(f, g, w), 5))


def bench_outcome_cell_sums(rng):
    n = 200_000
    w = rng.random(n)
    codes = rng.integers(0, 4, size=n).astype(np.uint8)
    assert _fast.outcome_cell_sums(w, codes).tobytes() == \
        _pure.outcome_cell_sums(w, codes).tobytes()
    return (_time(lambda: _fast.outcome_cell_sums(w, codes), 20),
            _time(lambda: _pure.outcome_cell_sums(w, codes), 20))


def bench_mc_outcome_counts(rng):
    cells = 64
    weights = rng.dirichlet(np.ones(cells))
    cum = np.cumsum(weights)
    codes = rng.integers(0, 4, size=cells).astype(np.uint8)
    u = rng.random(1_000_000)
    assert np.array_equal(_fast.mc_outcome_counts(cum, codes, u),
                          _pure.mc_outcome_counts(cum, codes, u))
    return (_time(lambda: _fast.mc_outcome_counts(cum, codes, u), 10),
            _time(lambda: _pure.mc_outcome_counts(cum, codes, u), 10))


def bench_tableau_pivot(rng):
    T = rng.normal(size=(400, 800))
    T[150, 300] = 3.0
    Tf, Tp = T.copy(), T.copy()
    _fast.tableau_pivot(Tf, 150, 300)
    _pure.tableau_pivot(Tp, 150, 300)
    assert Tf.tobytes() == Tp.tobytes()

    def run(impl):
        W = T.copy()
        impl.tableau_pivot(W, 150, 300)

    return (_time(lambda: run(_fast), 20), _time(lambda: run(_pure), 20))


def bench_chsh_strategy_max(_rng):
    n = 5
    assert _fast.chsh_strategy_max(n) == _pure.chsh_strategy_max(n)
    return (_time(lambda: _fast.chsh_strategy_max(n), 5),
            _time(lambda: _pure.chsh_strategy_max(n), 3))


BENCHES = [
    ("response_product_sum (n=2e5)", bench_response_product_sum),
    ("outcome_cell_sums   (n=2e5)", bench_outcome_cell_sums),
    ("mc_outcome_counts   (1e6 draws)", bench_mc_outcome_counts),
    ("tableau_pivot       (400x800)", bench_tableau_pivot),
    ("chsh_strategy_max   (n=5)", bench_chsh_strategy_max),
]


def main() -> None:
    rng = np.random.default_rng(2024)
    header = f"{'kernel':<34} {'fast [ms]':>10} {'pure [ms]':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for name, bench in BENCHES:
        t_fast, t_pure = bench(rng)
        speedup = t_pure / t_fast if t_fast > 0 else float("inf")
        print(f"{name:<34} {t_fast * 1e3:>10.3f} {t_pure * 1e3:>10.3f} "
              f"{speedup:>7.1f}x")
    print("\nall outputs bit-identical across backends")


if __name__ == "__main__":
    main()
