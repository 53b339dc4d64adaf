"""Packed point subsets as rows of uint64 words, for vectorized range scans."""

from __future__ import annotations

import numpy as np


def n_words(n: int) -> int:
    return max(1, (n + 63) // 64)


def pack(mask: np.ndarray) -> np.ndarray:
    """Boolean array ``(..., n)`` to words ``(..., W)``."""
    mask = np.asarray(mask, dtype=bool)
    n = mask.shape[-1]
    W = n_words(n)
    pad = W * 64 - n
    if pad:
        mask = np.concatenate([mask, np.zeros(mask.shape[:-1] + (pad,), bool)], axis=-1)
    bits = mask.reshape(mask.shape[:-1] + (W, 64)).astype(np.uint64)
    weights = np.left_shift(np.uint64(1), np.arange(64, dtype=np.uint64))
    return (bits * weights).sum(axis=-1, dtype=np.uint64)


def unpack(words: np.ndarray, n: int) -> np.ndarray:
    words = np.asarray(words, dtype=np.uint64)
    shifts = np.arange(64, dtype=np.uint64)
    bits = (words[..., None] >> shifts) & np.uint64(1)
    return bits.reshape(words.shape[:-1] + (-1,))[..., :n].astype(bool)


def popcount(words: np.ndarray) -> np.ndarray:
    return np.bitwise_count(np.asarray(words, dtype=np.uint64)).sum(axis=-1, dtype=np.int64)


def prefix_masks(order: np.ndarray, n: int) -> np.ndarray:
    """``out[r]`` holds the first ``r`` indices of ``order``; shape ``(n + 1, W)``."""
    m = np.zeros((n + 1, n), dtype=bool)
    for r in range(1, n + 1):
        m[r] = m[r - 1]
        m[r, order[r - 1]] = True
    return pack(m)


def unique_rows(words: np.ndarray) -> np.ndarray:
    if len(words) == 0:
        return words
    return np.unique(words, axis=0)
