#!/usr/bin/env python3
"""Emit the (statistic, p-value) table used by the ADF test.

Evaluates MacKinnon's (1994) response surface for the Dickey-Fuller tau
statistic with a constant term and a single integrated series, on a fixed
grid, and prints it as a C++ initializer list for include/fcsel/mackinnon_table.hpp.
"""
from scipy.stats import norm

TAU_STAR = -1.61
SMALL_P = [2.1659, 1.4412, 0.038269]
LARGE_P = [1.7339, 0.93202, -0.12745, -0.010368]


def pvalue(t):
    coef = SMALL_P if t <= TAU_STAR else LARGE_P
    return norm.cdf(sum(c * t**i for i, c in enumerate(coef)))


def main():
    grid = [round(-6.0 + 0.05 * i, 2) for i in range(int(round(8.7 / 0.05)) + 1)]
    grid.append(2.74)
    for t in grid:
        print(f"    {{{t:.2f}, {pvalue(t):.10e}}},")


if __name__ == "__main__":
    main()
