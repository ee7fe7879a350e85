"""Numba-jitted twins of the numpy kernels. Same signatures, same semantics.

Loops accumulate left-to-right, matching np.cumsum / ufunc.accumulate order,
so on equal inputs the two paths agree to the last ulp for the quantities
that feed deterministic artifacts (split gains, inventory recurrences).
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def best_split(x, y, feat_ids, min_leaf):
    n = y.shape[0]
    best_feat = -1
    best_thr = 0.0
    best_gain = 0.0
    if n < 2 * min_leaf:
        return best_feat, best_thr, best_gain
    total = 0.0
    for i in range(n):
        total += y[i]
    base = total * total / n
    for fi in range(feat_ids.shape[0]):
        f = feat_ids[fi]
        col = x[:, f].copy()
        order = np.argsort(col, kind="mergesort")
        left_sum = 0.0
        prev_x = 0.0
        for i in range(1, n):
            left_sum += y[order[i - 1]]
            xi = col[order[i]]
            prev_x = col[order[i - 1]]
            if xi <= prev_x:
                continue
            if i < min_leaf or n - i < min_leaf:
                continue
            right_sum = total - left_sum
            gain = left_sum * left_sum / i + right_sum * right_sum / (n - i) - base
            if gain > best_gain:
                best_gain = gain
                best_feat = f
                best_thr = prev_x
    return best_feat, best_thr, best_gain


@njit(cache=True)
def predict_tree(feature, threshold, left, right, value, x):
    n = x.shape[0]
    out = np.empty(n, dtype=np.float64)
    for i in range(n):
        node = 0
        while feature[node] >= 0:
            if x[i, feature[node]] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[i] = value[node]
    return out


@njit(cache=True)
def pattern_stack(values, w, t_start, count):
    zero_pct = np.empty(count, dtype=np.float64)
    last_nonzero = np.empty(count, dtype=np.float64)
    trend = np.empty(count, dtype=np.float64)
    updown = np.empty(count, dtype=np.float64)
    idx_mean = (w - 1) / 2.0
    denom = 0.0
    for j in range(w):
        denom += (j - idx_mean) * (j - idx_mean)
    for i in range(count):
        lo = t_start + i - w
        zeros = 0
        last_nz = 0.0
        mean = 0.0
        for j in range(w):
            v = values[lo + j]
            mean += v
            if v == 0.0:
                zeros += 1
            else:
                last_nz = v
        mean /= w
        zero_pct[i] = zeros / w
        last_nonzero[i] = last_nz
        num = 0.0
        for j in range(w):
            num += (j - idx_mean) * (values[lo + j] - mean)
        trend[i] = num / denom
        alt = 0
        prev_sign = 0
        for j in range(1, w):
            d = values[lo + j] - values[lo + j - 1]
            if d > 0.0:
                s = 1
            elif d < 0.0:
                s = -1
            else:
                continue
            if prev_sign != 0 and s != prev_sign:
                alt += 1
            prev_sign = s
        updown[i] = float(alt)
    return zero_pct, last_nonzero, trend, updown


@njit(cache=True)
def statistic_stack(values, w, t_start, count):
    mean = np.empty(count, dtype=np.float64)
    vmin = np.empty(count, dtype=np.float64)
    vmax = np.empty(count, dtype=np.float64)
    std = np.empty(count, dtype=np.float64)
    for i in range(count):
        lo = t_start + i - w
        m = 0.0
        lo_v = values[lo]
        hi_v = values[lo]
        for j in range(w):
            v = values[lo + j]
            m += v
            if v < lo_v:
                lo_v = v
            if v > hi_v:
                hi_v = v
        m /= w
        var = 0.0
        for j in range(w):
            d = values[lo + j] - m
            var += d * d
        mean[i] = m
        vmin[i] = lo_v
        vmax[i] = hi_v
        std[i] = np.sqrt(var / w)
    return mean, vmin, vmax, std


@njit(cache=True)
def inventory_run(replenishment, demand, initial):
    n = replenishment.shape[0]
    fulfilled = np.empty(n, dtype=np.float64)
    unfulfilled = np.empty(n, dtype=np.float64)
    end_inventory = np.empty(n, dtype=np.float64)
    on_hand = initial
    for t in range(n):
        on_hand += replenishment[t]
        f = demand[t] if demand[t] <= on_hand else on_hand
        fulfilled[t] = f
        unfulfilled[t] = demand[t] - f
        on_hand -= f
        end_inventory[t] = on_hand
    return fulfilled, unfulfilled, end_inventory
