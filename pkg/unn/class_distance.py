from itertools import combinations
from typing import Sequence

import numpy as np

MAX_BRUTE_FORCE_SIZE = 20


def _check_k(k: int) -> None:
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")


def class_cdf(p: np.ndarray, k: int) -> np.ndarray:
    """
    Probability that at least k of the objects lie within R, for every radius at once.

    `p` has shape (n,) or (n, L): row j holds p_j(R) at L radii. Row i of the
    recurrence P(i, j) = p_j * P(i - 1, j - 1) + (1 - p_j) * P(i, j - 1) is
    built from row i - 1 only, so two rolling arrays of length n + 1 suffice.
    """
    _check_k(k)
    p = np.asarray(p, dtype=np.float64)
    n = p.shape[0] if p.ndim else 0
    tail = p.shape[1:]
    if n < k:
        return np.zeros(tail)
    q = 1.0 - p
    if k == 1:
        return 1.0 - np.prod(q, axis=0)

    # P(0, j) = prod_{h <= j} (1 - p_h), P(0, 0) = 1
    prev = np.empty((n + 1,) + tail)
    prev[0] = 1.0
    prev[1:] = np.cumprod(q, axis=0)
    cur = np.empty_like(prev)
    for i in range(1, k):
        cur[:i] = 0.0  # P(i, j) = 0 for i > j
        for j in range(i, n + 1):
            cur[j] = p[j - 1] * prev[j - 1] + q[j - 1] * cur[j - 1]
        prev, cur = cur, prev
    # sum_j p_j * P(k - 1, j - 1)
    return np.sum(p * prev[:n], axis=0)


def class_cdf_at_radius(p: Sequence[float], k: int) -> float:
    """
    Pr(D_q(c) <= R) from the per-object probabilities p_j(R) at one radius.
    """
    return float(class_cdf(np.asarray(p, dtype=np.float64).reshape(-1), k))


def brute_force_class_cdf(p: Sequence[float], k: int) -> float:
    """
    1 - sum over subsets S with |S| < k of prod_{j in S} p_j * prod_{j not in S} (1 - p_j).
    """
    _check_k(k)
    p = np.asarray(p, dtype=np.float64).reshape(-1)
    n = p.size
    if n > MAX_BRUTE_FORCE_SIZE:
        raise ValueError(
            f"Subset enumeration supports at most {MAX_BRUTE_FORCE_SIZE} objects, got {n}"
        )
    if k > n:
        return 0.0
    below_k = 0.0
    for size in range(k):
        for subset in combinations(range(n), size):
            inside = np.zeros(n, dtype=bool)
            inside[list(subset)] = True
            below_k += float(np.prod(np.where(inside, p, 1.0 - p)))
    return 1.0 - below_k


def nearest_class_probability(
    p_positive: np.ndarray, p_negative: np.ndarray, k: int, midpoint: bool = False
) -> float:
    """
    Discretized Pr(D(q, c) < D(q, c')) from per-object CDF slots of both classes.

    Both inputs have shape (n_c, L) / (n_c', L) over the same increasing radii;
    F_c(0) is taken as 0. By default each step of F_c is weighted by
    1 - F_c' at its right end, which is exact when the radii are the jumps of
    step CDFs. With `midpoint` the weight is 1 - (F_c'(l - 1) + F_c'(l)) / 2,
    for slots of continuous CDFs: then the two directions sum to
    F_c + F_c' - F_c * F_c' at the last radius.
    """
    f_positive = class_cdf(p_positive, k)
    f_negative = class_cdf(p_negative, k)
    steps = np.diff(f_positive, prepend=0.0)
    if midpoint:
        previous = np.concatenate([[0.0], f_negative[:-1]])
        weights = 1.0 - 0.5 * (previous + f_negative)
    else:
        weights = 1.0 - f_negative
    return float(np.clip(np.sum(steps * weights), 0.0, 1.0))
