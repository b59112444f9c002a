#!/usr/bin/env python3
"""Independent derivation of the constants frozen in tests/unit/frozen_values.h.

Run with `python3 tests/oracles/derive_values.py > tests/unit/frozen_values.h`.
Nothing here imports the C++ library; LPs go through scipy.
"""
import itertools
import math

import numpy as np
from scipy.optimize import linprog


def lp_s(w, v, p, c):
    """max lambda s.t. sum p w y >= lambda, sum p v y <= c, sum_k y <= 1 (one reward, one resource)."""
    J, K = w.shape
    n = 1 + J * K
    obj = np.zeros(n)
    obj[0] = -1.0
    A, b = [], []
    row = np.zeros(n); row[0] = 1.0
    for j in range(J):
        for k in range(K):
            row[1 + j * K + k] = -p[j] * w[j, k]
    A.append(row); b.append(0.0)
    row = np.zeros(n)
    for j in range(J):
        for k in range(K):
            row[1 + j * K + k] = p[j] * v[j, k]
    A.append(row); b.append(c)
    for j in range(J):
        row = np.zeros(n)
        row[1 + j * K:1 + (j + 1) * K] = 1.0
        A.append(row); b.append(1.0)
    res = linprog(obj, A_ub=np.array(A), b_ub=np.array(b), bounds=[(0, None)] * n, method="highs")
    return -res.fun


def lp_e_deterministic(w, a, d, c, T):
    """Per-step optimum of the horizon-expanded program, one type with p = 1, deterministic outcomes."""
    K = len(w)
    n = 1 + T * K
    obj = np.zeros(n); obj[0] = -1.0
    A, b = [], []
    row = np.zeros(n); row[0] = T
    for t in range(T):
        for k in range(K):
            row[1 + t * K + k] = -w[k]
    A.append(row); b.append(0.0)
    for t in range(T):
        row = np.zeros(n)
        for tau in range(t + 1):
            for k in range(K):
                if d[k] >= t - tau + 1:
                    row[1 + tau * K + k] = a[k]
        A.append(row); b.append(c)
        row = np.zeros(n); row[1 + t * K:1 + (t + 1) * K] = 1.0
        A.append(row); b.append(1.0)
    res = linprog(obj, A_ub=np.array(A), b_ub=np.array(b), bounds=[(0, None)] * n, method="highs")
    return -res.fun


def gated_episode(action, w, a, d, c, a_max, T):
    """Always propose `action`; execute it iff occupied + a_max <= c."""
    releases = []
    total = 0.0
    for t in range(1, T + 1):
        occupied = sum(units for (end, units) in releases if end >= t)
        if occupied + a_max <= c:
            total += w[action]
            releases.append((t + d[action] - 1, a[action]))
    return total


def dp_deterministic(w, a, d, c, T):
    """Brute force over every action sequence with the hard capacity constraint."""
    best = 0.0
    for seq in itertools.product(range(len(w)), repeat=T):
        ok, total = True, 0.0
        for t in range(T):
            occ = sum(a[seq[u]] for u in range(t + 1) if d[seq[u]] >= t - u + 1)
            if occ > c + 1e-12:
                ok = False
                break
            total += w[seq[t]]
        if ok:
            best = max(best, total)
    return best


def mnl_best(u, rho, n):
    best, items = 0.0, ()
    for size in range(1, n + 1):
        for s in itertools.combinations(range(len(u)), size):
            den = 1.0 + sum(u[i] for i in s)
            val = sum(rho[i] * u[i] / den for i in s)
            if val > best + 1e-15:
                best, items = val, s
    return best, items


def main():
    vals = {}
    vals["kEpsDExample"] = 8.0 * math.sqrt(math.log(40.0) / 1024.0)
    vals["kLearningRateN4"] = math.sqrt(math.log(4.0))
    vals["kAssumptionXi005"] = 0.05 * math.log(20.0)
    vals["kAssumptionXi1N8"] = math.log(8.0)
    eta2 = math.sqrt(math.log(2.0)) / math.sqrt(2.0)
    vals["kTracePhi2"] = math.exp(-0.5 * eta2) / (math.exp(-0.5 * eta2) + 1.0)

    # Gap instance with d = 8: actions {null, k1, k2}, c = 4, T = 4.
    w, a, d = [0.0, 0.75, 1.0], [0.0, 1.0, 1.0], [0, 4, 8]
    W = np.array([w]); V = np.array([[a[k] * d[k] for k in range(3)]])
    vals["kGapTLambdaS"] = 4 * lp_s(W, V, [1.0], 4.0)
    vals["kGapTLambdaE"] = 4 * lp_e_deterministic(w, a, d, 4.0, 4)
    vals["kGapAlwaysK2Reward"] = gated_episode(2, w, a, d, 4.0, 1.0, 4)
    vals["kGapAlwaysK1Reward"] = gated_episode(1, w, a, d, 4.0, 1.0, 4)

    # Truncated variant: c = 1, k1 = (3/4, D 1), k2 = (1, D 2), T = 2.
    w2, a2, d2 = [0.0, 0.75, 1.0], [0.0, 1.0, 1.0], [0, 1, 2]
    vals["kTruncatedGapDpPerStep"] = dp_deterministic(w2, a2, d2, 1.0, 2) / 2.0
    vals["kTruncatedGapLpEPerStep"] = lp_e_deterministic(w2, a2, d2, 1.0, 2)

    vals["kLpSSlack"] = lp_s(np.array([[0.0, 1.0]]), np.array([[0.0, 1.0]]), [1.0], 10.0)
    vals["kLpSBinding"] = lp_s(np.array([[0.0, 1.0]]), np.array([[0.0, 20.0]]), [1.0], 10.0)

    # Two-type LP-RS from the window [0, 1, 1, 0]: p_hat = (1/2, 1/2).
    W2 = np.array([[0.0, 1.0, 0.5], [0.0, 0.25, 1.0]])
    V2 = np.array([[0.0, 2.0, 0.5], [0.0, 1.0, 3.0]])
    vals["kTwoTypeLpRs"] = lp_s(W2, V2, [0.5, 0.5], 1.0)

    best, items = mnl_best([1.0, 1.0], [1.0, 0.5], 1)
    vals["kMnlExampleObjective"] = best
    assert items == (0,)

    # Assortment catalog size for 14 products and n = 5, empty set included.
    vals["kCatalogSize"] = float(sum(math.comb(14, i) for i in range(6)))

    print("#pragma once")
    print()
    print("// Generated by tests/oracles/derive_values.py. Do not edit by hand.")
    print()
    print("namespace rra::frozen {")
    print()
    for k, v in vals.items():
        print(f"inline constexpr double {k} = {v!r};")
    print()
    print("}  // namespace rra::frozen")


if __name__ == "__main__":
    main()
