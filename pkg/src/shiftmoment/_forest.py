"""Flat-array CART regression forest kernels (numba-compiled).

Trees are stored as parallel arrays indexed by (tree, node): an interior
node holds a split feature and threshold plus child indices; a leaf holds
the mean response of its samples and feature index -1.  Splits maximize
variance reduction; ties in gain are broken toward the lower threshold,
and candidate order is deterministic, so identical inputs give bitwise
identical forests.
"""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def build_forest(X, y, boot, min_leaf, feat, thresh, left, right, value):
    trees, n = boot.shape
    d = X.shape[1]
    max_nodes = feat.shape[1]
    Xb = np.empty((n, d))
    yb = np.empty(n)
    idx = np.empty(n, np.int64)
    scratch = np.empty(n, np.int64)
    xcol = np.empty(n)
    ycol = np.empty(n)
    stack = np.empty((max_nodes, 3), np.int64)

    for t in range(trees):
        for i in range(n):
            b = boot[t, i]
            for j in range(d):
                Xb[i, j] = X[b, j]
            yb[i] = y[b]
            idx[i] = i

        next_node = 1
        top = 0
        stack[0, 0] = 0
        stack[0, 1] = 0
        stack[0, 2] = n
        while top >= 0:
            node = stack[top, 0]
            lo = stack[top, 1]
            hi = stack[top, 2]
            top -= 1
            k = hi - lo

            total = 0.0
            for i in range(lo, hi):
                total += yb[idx[i]]

            best_gain = -1.0
            best_feat = -1
            best_thresh = 0.0
            if k >= 2 * min_leaf:
                for f in range(d):
                    for i in range(k):
                        xcol[i] = Xb[idx[lo + i], f]
                        ycol[i] = yb[idx[lo + i]]
                    order = np.argsort(xcol[:k])
                    left_sum = 0.0
                    for i in range(min_leaf - 1):
                        left_sum += ycol[order[i]]
                    for nl in range(min_leaf, k - min_leaf + 1):
                        left_sum += ycol[order[nl - 1]]
                        xl = xcol[order[nl - 1]]
                        xr = xcol[order[nl]]
                        if xl < xr:
                            right_sum = total - left_sum
                            gain = left_sum * left_sum / nl + right_sum * right_sum / (k - nl)
                            cut = 0.5 * (xl + xr)
                            if gain > best_gain or (gain == best_gain and cut < best_thresh):
                                best_gain = gain
                                best_feat = f
                                best_thresh = cut

            if best_feat < 0:
                feat[t, node] = -1
                value[t, node] = total / k
                continue

            # Stable partition of idx[lo:hi] by the chosen split.
            nl = 0
            nr = 0
            for i in range(lo, hi):
                if Xb[idx[i], best_feat] <= best_thresh:
                    idx[lo + nl] = idx[i]
                    nl += 1
                else:
                    scratch[nr] = idx[i]
                    nr += 1
            for i in range(nr):
                idx[lo + nl + i] = scratch[i]

            lchild = next_node
            rchild = next_node + 1
            next_node += 2
            feat[t, node] = best_feat
            thresh[t, node] = best_thresh
            left[t, node] = lchild
            right[t, node] = rchild
            top += 1
            stack[top, 0] = lchild
            stack[top, 1] = lo
            stack[top, 2] = lo + nl
            top += 1
            stack[top, 0] = rchild
            stack[top, 1] = lo + nl
            stack[top, 2] = hi


@njit(cache=True, nogil=True)
def build_forest_1d(x_sorted, y_sorted, boot, min_leaf, feat, thresh, left, right, value):
    # One-feature specialization.  Training data arrives pre-sorted and each
    # bootstrap draw indexes the sorted arrays, so a counting pass rebuilds
    # every bootstrap sample already in sorted order (no per-tree sort).
    # Every node is then a contiguous segment [lo, hi), and one prefix-sum
    # array serves all node totals and split scans.
    trees, n = boot.shape
    max_nodes = feat.shape[1]
    xs = np.empty(n)
    ys = np.empty(n)
    counts = np.zeros(n, np.int64)
    psum = np.empty(n + 1)
    stack = np.empty((max_nodes, 3), np.int64)

    for t in range(trees):
        for i in range(n):
            counts[boot[t, i]] += 1
        pos = 0
        for r in range(n):
            c = counts[r]
            counts[r] = 0
            for _ in range(c):
                xs[pos] = x_sorted[r]
                ys[pos] = y_sorted[r]
                pos += 1
        psum[0] = 0.0
        for i in range(n):
            psum[i + 1] = psum[i] + ys[i]

        next_node = 1
        top = 0
        stack[0, 0] = 0
        stack[0, 1] = 0
        stack[0, 2] = n
        while top >= 0:
            node = stack[top, 0]
            lo = stack[top, 1]
            hi = stack[top, 2]
            top -= 1
            k = hi - lo
            total = psum[hi] - psum[lo]

            best_gain = -1.0
            best_cut = -1
            best_thresh = 0.0
            if k >= 2 * min_leaf:
                for nl in range(min_leaf, k - min_leaf + 1):
                    xl = xs[lo + nl - 1]
                    xr = xs[lo + nl]
                    if xl < xr:
                        left_sum = psum[lo + nl] - psum[lo]
                        right_sum = total - left_sum
                        gain = left_sum * left_sum / nl + right_sum * right_sum / (k - nl)
                        cut = 0.5 * (xl + xr)
                        if gain > best_gain or (gain == best_gain and cut < best_thresh):
                            best_gain = gain
                            best_cut = nl
                            best_thresh = cut

            if best_cut < 0:
                feat[t, node] = -1
                value[t, node] = total / k
                continue

            lchild = next_node
            rchild = next_node + 1
            next_node += 2
            feat[t, node] = 0
            thresh[t, node] = best_thresh
            left[t, node] = lchild
            right[t, node] = rchild
            top += 1
            stack[top, 0] = lchild
            stack[top, 1] = lo
            stack[top, 2] = lo + best_cut
            top += 1
            stack[top, 0] = rchild
            stack[top, 1] = lo + best_cut
            stack[top, 2] = hi


@njit(cache=True, nogil=True)
def predict_forest(Q, feat, thresh, left, right, value):
    m = Q.shape[0]
    trees = feat.shape[0]
    d = Q.shape[1]
    out = np.zeros(m)
    # Tree-outer iteration keeps one tree's node arrays cache-hot across all
    # queries.
    if d == 1:
        for t in range(trees):
            for i in range(m):
                q = Q[i, 0]
                node = 0
                while feat[t, node] >= 0:
                    if q <= thresh[t, node]:
                        node = left[t, node]
                    else:
                        node = right[t, node]
                out[i] += value[t, node]
    else:
        for t in range(trees):
            for i in range(m):
                node = 0
                while feat[t, node] >= 0:
                    if Q[i, feat[t, node]] <= thresh[t, node]:
                        node = left[t, node]
                    else:
                        node = right[t, node]
                out[i] += value[t, node]
    inv = 1.0 / trees
    for i in range(m):
        out[i] *= inv
    return out
