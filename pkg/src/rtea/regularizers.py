"""Overlapping-group regularizers and their majorization weight sequences.

The group penalty sums a smoothed penalty of masked sliding-window norms of
the signal.  Signals are zero-padded, and the window sum runs over every
position where the mask overlaps the signal, i.e. positions
``-(K-1) .. N-1`` for a mask of length K over a signal of length N.

Both the penalty and the weight sequences reduce to two 1-D convolutions,
which keeps evaluation O(N*K) with deterministic left-to-right summation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .penalties import PenaltySpec, _denom_sq, _smoothed_sq


@dataclass(frozen=True)
class WeightArray:
    """Binary periodic mask: (m+1) runs of ``n1`` ones separated by m runs
    of ``n0`` zeros; it begins and ends with a ones-run.

    ``m`` is the number of periods spanned.  The degenerate ``m = 0`` form
    (a single ones-run, ``n0 = 0``) is permitted so that a plain group of
    size ``n1`` can be expressed with the same type.
    """

    n1: int
    n0: int
    m: int

    def __post_init__(self):
        if self.n1 < 1:
            raise ValueError(f"ones-run length n1 must be >= 1, got {self.n1}")
        if self.n0 < 0:
            raise ValueError(f"zeros-run length n0 must be >= 0, got {self.n0}")
        if self.m < 0:
            raise ValueError(f"period count m must be >= 0, got {self.m}")
        if self.m == 0 and self.n0 != 0:
            raise ValueError("m == 0 (single ones-run) requires n0 == 0")

    @property
    def period(self) -> int:
        return self.n1 + self.n0

    def __len__(self) -> int:
        return self.m * (self.n1 + self.n0) + self.n1

    @property
    def array(self) -> np.ndarray:
        """The 0/1 mask as a float array of length m*(n1+n0)+n1."""
        unit = np.concatenate([np.ones(self.n1), np.zeros(self.n0)])
        return np.concatenate([np.tile(unit, self.m), np.ones(self.n1)])

    @classmethod
    def ones(cls, k: int) -> "WeightArray":
        """All-ones mask of length k (a single group, no period structure)."""
        return cls(n1=k, n0=0, m=0)


def _as_mask(b) -> np.ndarray:
    if isinstance(b, WeightArray):
        return b.array
    mask = np.asarray(b, dtype=float)
    if mask.ndim != 1 or mask.size == 0:
        raise ValueError("mask must be a nonempty 1-D array")
    if not np.all((mask == 0.0) | (mask == 1.0)):
        raise ValueError("mask entries must be 0 or 1")
    if not mask.any():
        raise ValueError("mask must contain at least one 1")
    return mask


def _as_signal(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError(f"expected a 1-D signal, got shape {x.shape}")
    return x


def _group_sq_sums(x: np.ndarray, mask: np.ndarray) -> np.ndarray:
    # Masked sliding sums of x^2 for all N+K-1 overlapping window positions,
    # index i corresponding to window position n = i - (K-1).  All terms are
    # nonnegative, so the sums cannot round below zero.
    return np.convolve(x * x, mask[::-1])


def _penalty_from_sums(s: np.ndarray, spec: PenaltySpec) -> float:
    return float(np.sum(_smoothed_sq(s, spec)))


def _weights_from_sums(s: np.ndarray, mask: np.ndarray, n: int, spec: PenaltySpec) -> np.ndarray:
    inv = 1.0 / _denom_sq(s, spec)
    k = mask.size
    return np.convolve(inv, mask)[k - 1 : k - 1 + n]


def group_penalty(x, b, spec: PenaltySpec) -> float:
    """Repetitive group-sparsity penalty of ``x`` under binary mask ``b``.

    Sums the smoothed penalty of the masked window root-sum-squares over
    every window position overlapping the (zero-padded) signal.
    """
    x = _as_signal(x)
    mask = _as_mask(b)
    if mask.size > x.size:
        raise ValueError(f"mask length {mask.size} exceeds signal length {x.size}")
    return _penalty_from_sums(_group_sq_sums(x, mask), spec)


def combined_penalty(x1, x2, k0: int, spec: PenaltySpec) -> float:
    """Group penalty of the sum x1 + x2 with an all-ones mask of size k0."""
    x1 = _as_signal(x1)
    x2 = _as_signal(x2)
    if x1.size != x2.size:
        raise ValueError(f"length mismatch: {x1.size} vs {x2.size}")
    if k0 < 1:
        raise ValueError(f"group size k0 must be >= 1, got {k0}")
    return group_penalty(x1 + x2, np.ones(k0), spec)


def majorizer_weights(z, b, spec: PenaltySpec) -> np.ndarray:
    """Per-sample weights of the quadratic majorizer of the group penalty.

    At anchor ``z`` the majorizer is ``0.5 * sum_n w[n] * x[n]^2 + const(z)``
    where ``w = majorizer_weights(z, b, spec)``.  Strictly positive.
    """
    z = _as_signal(z)
    mask = _as_mask(b)
    if mask.size > z.size:
        raise ValueError(f"mask length {mask.size} exceeds signal length {z.size}")
    return _weights_from_sums(_group_sq_sums(z, mask), mask, z.size, spec)


def combined_majorizer_weights(z, k0: int, spec: PenaltySpec) -> np.ndarray:
    """Majorizer weights for the all-ones mask of size k0 (sum regularizer)."""
    if k0 < 1:
        raise ValueError(f"group size k0 must be >= 1, got {k0}")
    return majorizer_weights(z, np.ones(k0), spec)


def group_majorizer_gap(x, z, b, spec: PenaltySpec) -> float:
    """Majorizer value minus the true group penalty, anchored at ``z``.

    The additive constant is resolved by tangency (gap(z, z) == 0); the
    result is nonnegative up to floating-point roundoff.
    """
    x = _as_signal(x)
    z = _as_signal(z)
    if x.size != z.size:
        raise ValueError(f"length mismatch: {x.size} vs {z.size}")
    w = majorizer_weights(z, b, spec)
    quad_x = 0.5 * float(np.sum(w * x * x))
    quad_z = 0.5 * float(np.sum(w * z * z))
    return quad_x - quad_z + group_penalty(z, b, spec) - group_penalty(x, b, spec)
