"""Pure-numpy sample-evaluation kernel (fallback when the compiled
extension is unavailable).

Both kernels implement the same contract: given per-leaf occurrence times
for a block of samples and a flattened tree (children listed before
parents), count the samples whose top event occurs within the horizon.
Node occurrence times follow the temporal gate semantics:

* AND: latest child time (infinity if any child never occurs)
* OR: earliest child time
* PAND: last child's time when child times strictly increase left to
  right, otherwise never
* POR: first child's time when it is strictly earliest, otherwise never

Only exact comparisons, ``min`` and ``max`` are performed here, so the two
kernels produce bit-identical counts for identical inputs.
"""

import numpy as np

LEAF, AND, OR, PAND, POR = 0, 1, 2, 3, 4

KERNEL_NAME = "python"


def count_top(kinds, offsets, children, leaf_rows, times, horizon):
    n_nodes = len(kinds)
    vals = [None] * n_nodes
    for i in range(n_nodes):
        kind = kinds[i]
        if kind == LEAF:
            vals[i] = times[leaf_rows[i]]
            continue
        cv = [vals[j] for j in children[offsets[i]:offsets[i + 1]]]
        if kind == AND:
            v = cv[0]
            for w in cv[1:]:
                v = np.maximum(v, w)
        elif kind == OR:
            v = cv[0]
            for w in cv[1:]:
                v = np.minimum(v, w)
        elif kind == PAND:
            if len(cv) == 1:
                v = cv[0]
            else:
                ok = cv[0] < cv[1]
                for a, b in zip(cv[1:], cv[2:]):
                    ok &= a < b
                v = np.where(ok, cv[-1], np.inf)
        elif kind == POR:
            if len(cv) == 1:
                v = cv[0]
            else:
                rest = cv[1]
                for w in cv[2:]:
                    rest = np.minimum(rest, w)
                v = np.where(cv[0] < rest, cv[0], np.inf)
        else:
            raise ValueError(f"unknown node kind {kind}")
        vals[i] = v
    return int(np.count_nonzero(vals[n_nodes - 1] <= horizon))
