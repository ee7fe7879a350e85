"""Pure-numpy implementations of the hot kernels.

These are the fallback path (see kernels.__init__ for dispatch). Each function
has a numba twin in numba_impl with the same signature and semantics; the
accumulation order is kept identical wherever results feed deterministic
artifacts.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def best_split(x, y, feat_ids, min_leaf):
    """Exact greedy split search over candidate feature columns.

    x: (n, F) float64, y: (n,) float64, feat_ids: int64 candidate columns in
    ascending order, min_leaf: minimum samples on each side.

    Returns (feature, threshold, gain). Samples with value <= threshold go
    left; threshold is the largest left-side value, never a midpoint, so the
    partition at fit time and at predict time is the same comparison. Gain is
    the reduction in sum of squared errors; ties keep the lowest feature id,
    then the lowest threshold (first maximum in scan order). feature == -1
    means no split with positive gain and feasible leaf sizes exists.
    """
    n = y.shape[0]
    best_feat = -1
    best_thr = 0.0
    best_gain = 0.0
    if n < 2 * min_leaf:
        return best_feat, best_thr, best_gain
    total = float(np.cumsum(y)[-1])
    base = total * total / n
    counts = np.arange(1, n, dtype=np.float64)
    for f in feat_ids:
        col = x[:, f].copy()
        order = np.argsort(col, kind="mergesort")
        xs = col[order]
        ys = y[order]
        left_sum = np.cumsum(ys)[:-1]
        gains = left_sum * left_sum / counts + (total - left_sum) ** 2 / (n - counts) - base
        valid = xs[1:] > xs[:-1]
        if min_leaf > 1:
            valid = valid.copy()
            valid[: min_leaf - 1] = False
            valid[n - min_leaf :] = False
        if not valid.any():
            continue
        gains = np.where(valid, gains, -np.inf)
        i = int(np.argmax(gains))
        if gains[i] > best_gain:
            best_gain = float(gains[i])
            best_feat = int(f)
            best_thr = float(xs[i])
    return best_feat, best_thr, best_gain


def predict_tree(feature, threshold, left, right, value, x):
    """Evaluate one regression tree on all rows of x.

    Node arrays are parallel; feature[i] == -1 marks a leaf. Rule: go left
    iff x[:, feature] <= threshold.
    """
    n = x.shape[0]
    node = np.zeros(n, dtype=np.int64)
    while True:
        feat = feature[node]
        internal = feat >= 0
        if not internal.any():
            break
        rows = np.nonzero(internal)[0]
        sub = node[rows]
        go_left = x[rows, feat[rows]] <= threshold[sub]
        node[rows] = np.where(go_left, left[sub], right[sub])
    return value[node]


def pattern_stack(values, w, t_start, count):
    """Shape descriptors of trailing windows.

    For output i, the window is values[t_start + i - w : t_start + i].
    Returns (zero_pct, last_nonzero, trend, updown) arrays of length count.
    updown counts strict sign alternations between consecutive non-zero
    first differences; zero differences break nothing and count nothing.
    """
    wins = sliding_window_view(values, w)[t_start - w : t_start - w + count]
    zero_pct = np.count_nonzero(wins == 0.0, axis=1) / float(w)

    nz = wins != 0.0
    has_nz = nz.any(axis=1)
    last_pos = w - 1 - np.argmax(nz[:, ::-1], axis=1)
    last_nonzero = np.where(has_nz, wins[np.arange(count), last_pos], 0.0)

    idx = np.arange(w, dtype=np.float64)
    idx_c = idx - idx.mean()
    denom = float(np.dot(idx_c, idx_c))
    trend = (wins - wins.mean(axis=1, keepdims=True)) @ idx_c / denom

    diffs = wins[:, 1:] - wins[:, :-1]
    signs = np.sign(diffs)
    nzd = signs != 0.0
    pos = np.where(nzd, np.arange(w - 1), -1)
    prev = np.empty_like(pos)
    prev[:, 0] = -1
    if w > 2:
        prev[:, 1:] = np.maximum.accumulate(pos, axis=1)[:, :-1]
    prev_sign = np.take_along_axis(signs, np.maximum(prev, 0), axis=1)
    alternation = nzd & (prev >= 0) & (prev_sign != signs)
    updown = alternation.sum(axis=1).astype(np.float64)

    return zero_pct, last_nonzero, trend, updown


def statistic_stack(values, w, t_start, count):
    """Mean/min/max/population-std of trailing windows (same alignment as
    pattern_stack)."""
    wins = sliding_window_view(values, w)[t_start - w : t_start - w + count]
    mean = wins.mean(axis=1)
    vmin = wins.min(axis=1)
    vmax = wins.max(axis=1)
    std = np.sqrt(((wins - mean[:, None]) ** 2).mean(axis=1))
    return mean, vmin, vmax, std


def inventory_run(replenishment, demand, initial):
    """One series of the instant-replenishment simulation.

    Start-of-period inventory is previous end inventory plus the period's
    replenishment; demand consumes up to that amount; shortfall is lost.
    Returns (fulfilled, unfulfilled, end_inventory). Vectorized via the
    reflection identity end_t = C_t - min(0, min_{k<=t} C_k) with
    C = initial + cumsum(replenishment - demand).
    """
    c = initial + np.cumsum(replenishment - demand)
    floor = np.minimum(np.minimum.accumulate(c), 0.0)
    end_inventory = c - floor
    start = np.empty_like(end_inventory)
    start[0] = initial + replenishment[0]
    start[1:] = end_inventory[:-1] + replenishment[1:]
    fulfilled = np.minimum(start, demand)
    unfulfilled = demand - fulfilled
    return fulfilled, unfulfilled, end_inventory
