"""Compiled CART kernels (squared-error regression trees).

Trees are stored as flat parallel arrays. ``feature[k] == -1`` marks a leaf.
Samples go left when ``x[feature] <= threshold``.
"""

import numpy as np
from numba import njit

LEAF = -1


@njit(cache=True, nogil=True)
def _better(gain, f, thr, best_gain, best_f, best_thr):
    if gain > best_gain:
        return True
    if gain == best_gain:
        if f < best_f:
            return True
        if f == best_f and thr < best_thr:
            return True
    return False


@njit(cache=True, nogil=True)
def build_tree(X, y, sorted_idx, max_depth, min_samples_split, min_samples_leaf,
               max_features, feature_order):
    """Grow one tree.

    ``sorted_idx[f]`` lists the training rows (duplicates allowed, as in a
    bootstrap) ordered by feature ``f``; every node owns the same
    ``[start, end)`` slice of each list, kept sorted by stable partitioning.

    ``feature_order[k]`` is the feature visiting order for the k-th node
    created; only the first ``max_features`` non-constant features in that
    order are searched. Identity rows with ``max_features = d`` give plain CART.

    Returns the node arrays plus ``fitted``: each row's leaf value for rows in
    the sample (NaN elsewhere).
    """
    n_total = X.shape[0]
    d = X.shape[1]
    m = sorted_idx.shape[1]
    cap = 2 * m - 1

    feature = np.full(cap, LEAF, dtype=np.int64)
    threshold = np.zeros(cap)
    left = np.full(cap, -1, dtype=np.int64)
    right = np.full(cap, -1, dtype=np.int64)
    value = np.zeros(cap)
    count = np.zeros(cap, dtype=np.int64)
    fitted = np.full(n_total, np.nan)

    idx = sorted_idx.copy()
    buf = np.empty(m, dtype=np.int64)
    goes_left = np.zeros(n_total, dtype=np.bool_)

    # stack entries: node id, start, end, depth
    stack = np.empty((cap, 4), dtype=np.int64)
    stack[0, 0] = 0
    stack[0, 1] = 0
    stack[0, 2] = m
    stack[0, 3] = 0
    top = 1
    n_nodes = 1

    while top > 0:
        top -= 1
        node = stack[top, 0]
        start = stack[top, 1]
        end = stack[top, 2]
        depth = stack[top, 3]
        size = end - start

        total = 0.0
        ymin = np.inf
        ymax = -np.inf
        for i in range(start, end):
            yi = y[idx[0, i]]
            total += yi
            if yi < ymin:
                ymin = yi
            if yi > ymax:
                ymax = yi
        mean = total / size
        value[node] = mean
        count[node] = size

        can_split = (
            size >= min_samples_split
            and size >= 2 * min_samples_leaf
            and (max_depth < 0 or depth < max_depth)
            and ymax > ymin
        )
        best_gain = -np.inf
        best_f = d
        best_thr = np.inf
        best_left = 0
        if can_split:
            searched = 0
            for j in range(d):
                if searched >= max_features:
                    break
                f = feature_order[node, j]
                if X[idx[f, start], f] == X[idx[f, end - 1], f]:
                    continue
                searched += 1
                left_sum = 0.0
                for i in range(start, end - 1):
                    left_sum += y[idx[f, i]]
                    n_left = i - start + 1
                    n_right = size - n_left
                    if n_left < min_samples_leaf:
                        continue
                    if n_right < min_samples_leaf:
                        break
                    a = X[idx[f, i], f]
                    b = X[idx[f, i + 1], f]
                    if not a < b:
                        continue
                    right_sum = total - left_sum
                    gain = left_sum * left_sum / n_left + right_sum * right_sum / n_right
                    thr = 0.5 * (a + b)
                    if not thr < b:
                        thr = a
                    if _better(gain, f, thr, best_gain, best_f, best_thr):
                        best_gain = gain
                        best_f = f
                        best_thr = thr
                        best_left = n_left

        if best_f == d:
            for i in range(start, end):
                fitted[idx[0, i]] = mean
            continue

        for i in range(start, end):
            row = idx[best_f, i]
            goes_left[row] = X[row, best_f] <= best_thr
        for f in range(d):
            k = 0
            for i in range(start, end):
                if goes_left[idx[f, i]]:
                    buf[k] = idx[f, i]
                    k += 1
            for i in range(start, end):
                if not goes_left[idx[f, i]]:
                    buf[k] = idx[f, i]
                    k += 1
            for i in range(size):
                idx[f, start + i] = buf[i]

        feature[node] = best_f
        threshold[node] = best_thr
        lnode = n_nodes
        rnode = n_nodes + 1
        n_nodes += 2
        left[node] = lnode
        right[node] = rnode
        # push right first so the left subtree is grown first
        stack[top, 0] = rnode
        stack[top, 1] = start + best_left
        stack[top, 2] = end
        stack[top, 3] = depth + 1
        top += 1
        stack[top, 0] = lnode
        stack[top, 1] = start
        stack[top, 2] = start + best_left
        stack[top, 3] = depth + 1
        top += 1

    return (feature[:n_nodes].copy(), threshold[:n_nodes].copy(), left[:n_nodes].copy(),
            right[:n_nodes].copy(), value[:n_nodes].copy(), count[:n_nodes].copy(), fitted)


@njit(cache=True, nogil=True)
def predict_tree(X, feature, threshold, left, right, value):
    n = X.shape[0]
    out = np.empty(n)
    for i in range(n):
        k = 0
        while feature[k] != LEAF:
            if X[i, feature[k]] <= threshold[k]:
                k = left[k]
            else:
                k = right[k]
        out[i] = value[k]
    return out


@njit(cache=True, nogil=True)
def predict_boosted(X, base, learning_rate, offsets, feature, threshold, left, right, value):
    """Sequential ``F <- F + lr * tree_m(x)`` over trees packed end to end.

    The accumulation order matches training, so in-sample predictions are
    bit-identical to the values tracked while boosting.
    """
    n = X.shape[0]
    out = np.full(n, base)
    n_trees = offsets.shape[0] - 1
    for t in range(n_trees):
        o = offsets[t]
        for i in range(n):
            k = o
            while feature[k] != LEAF:
                if X[i, feature[k]] <= threshold[k]:
                    k = o + left[k]
                else:
                    k = o + right[k]
            out[i] += learning_rate * value[k]
    return out
