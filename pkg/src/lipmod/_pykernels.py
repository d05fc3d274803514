"""Pure-Python/numpy versions of the hot kernels.

Semantics must match ``_ckernels.pyx`` exactly; ``tests/test_kernels.py``
compares the two.
"""
import numpy as np


def pairwise_distances(A, B, q_code, split_last):
    """Distance matrix ``D[i, j] = ||A[i] - B[j]||``.

    ``q_code`` selects the exponent (1, 2, or 0 for inf). With
    ``split_last`` the last coordinate is measured separately by absolute
    value and combined by ``max`` (the coefficient-space norm).
    """
    A = np.ascontiguousarray(A, dtype=float)
    B = np.ascontiguousarray(B, dtype=float)
    diff = A[:, None, :] - B[None, :, :]
    head = diff[..., :-1] if split_last else diff
    if q_code == 1:
        d = np.abs(head).sum(axis=-1)
    elif q_code == 2:
        d = np.sqrt((head * head).sum(axis=-1))
    else:
        d = np.abs(head).max(axis=-1) if head.shape[-1] else np.zeros(diff.shape[:2])
    if split_last:
        d = np.maximum(d, np.abs(diff[..., -1]))
    return d


def hildreth_sweeps(A, b, y, lam, row_sq, sweeps):
    """Run ``sweeps`` cyclic dual coordinate ascent passes in place.

    Minimises ``0.5*||y - x||^2`` subject to ``A y <= b`` where the caller
    initialised ``y = x - A.T @ lam``. Returns the largest absolute change
    of any primal coordinate during the final sweep.
    """
    m = A.shape[0]
    change = 0.0
    for _ in range(sweeps):
        change = 0.0
        for i in range(m):
            if row_sq[i] == 0.0:
                continue
            ai = A[i]
            step = (ai @ y - b[i]) / row_sq[i]
            new = lam[i] + step
            if new < 0.0:
                new = 0.0
            delta = new - lam[i]
            if delta != 0.0:
                lam[i] = new
                move = delta * ai
                y -= move
                c = np.abs(move).max()
                if c > change:
                    change = c
    return change
