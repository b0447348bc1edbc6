"""Periodized orthonormal wavelet transforms on square images.

Separable multi-level analysis with circular boundary handling.  Both
filter banks are orthonormal, so the forward transform is an isometry and
the inverse is its transpose.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import ConfigError

_SQRT3 = math.sqrt(3.0)

#: Analysis low-pass filters.  "haar" is the two-tap bank; "db4" the
#: four-tap Daubechies bank with two vanishing moments.
FILTERS = {
    "haar": np.array([1.0, 1.0]) / math.sqrt(2.0),
    "db4": np.array([1.0 + _SQRT3, 3.0 + _SQRT3, 3.0 - _SQRT3, 1.0 - _SQRT3])
    / (4.0 * math.sqrt(2.0)),
}


def _bank(wavelet: str):
    try:
        lo = FILTERS[wavelet]
    except KeyError:
        raise ConfigError(f"unknown wavelet {wavelet!r}; choose from {sorted(FILTERS)}")
    L = len(lo)
    hi = np.array([(-1.0) ** k * lo[L - 1 - k] for k in range(L)])
    return lo, hi


def default_levels(side: int) -> int:
    """Decomposition depth leaving an 8x8 coarse block (at least 1 level)."""
    return max(1, int(math.log2(side)) - 3)


def _check(side: int, wavelet: str, levels: int) -> None:
    lo, _ = _bank(wavelet)
    if levels < 1:
        raise ConfigError(f"levels must be >= 1, got {levels}")
    if side % (1 << levels) != 0:
        raise ConfigError(f"side {side} not divisible by 2^{levels}")
    if side // (1 << (levels - 1)) < len(lo):
        raise ConfigError(
            f"{levels} levels leave blocks smaller than the {len(lo)}-tap filter"
        )


def _analyze(x: np.ndarray, lo: np.ndarray, hi: np.ndarray):
    """Split the last axis into approximation and detail halves."""
    n = x.shape[-1]
    L = len(lo)
    idx = (2 * np.arange(n // 2)[:, None] + np.arange(L)[None, :]) % n
    windows = x[..., idx]
    return windows @ lo, windows @ hi


def _synthesize(a: np.ndarray, d: np.ndarray, lo: np.ndarray, hi: np.ndarray):
    """Transpose of :func:`_analyze` (exact inverse by orthonormality)."""
    half = a.shape[-1]
    n = 2 * half
    x = np.zeros(a.shape[:-1] + (n,), dtype=np.result_type(a, d, lo))
    base = 2 * np.arange(half)
    for k in range(len(lo)):
        j = (base + k) % n
        x[..., j] += lo[k] * a + hi[k] * d
    return x


def forward2d(image: np.ndarray, wavelet: str = "haar", levels: int | None = None) -> np.ndarray:
    """Multi-level separable analysis of a square array (rows then columns).

    Returns an array of the same shape with the usual nested block layout:
    the approximation block shrinks into the top-left corner.
    """
    x = np.array(image, dtype=np.result_type(image, np.float64))
    n = x.shape[-1]
    if x.ndim != 2 or x.shape[0] != n:
        raise ConfigError(f"expected a square 2d array, got shape {x.shape}")
    if levels is None:
        levels = default_levels(n)
    _check(n, wavelet, levels)
    lo, hi = _bank(wavelet)
    size = n
    for _ in range(levels):
        block = x[:size, :size]
        a, d = _analyze(block, lo, hi)
        block = np.concatenate([a, d], axis=-1)
        a, d = _analyze(np.swapaxes(block, 0, 1), lo, hi)
        x[:size, :size] = np.swapaxes(np.concatenate([a, d], axis=-1), 0, 1)
        size //= 2
    return x


def inverse2d(coeffs: np.ndarray, wavelet: str = "haar", levels: int | None = None) -> np.ndarray:
    """Inverse of :func:`forward2d`."""
    x = np.array(coeffs, dtype=np.result_type(coeffs, np.float64))
    n = x.shape[-1]
    if x.ndim != 2 or x.shape[0] != n:
        raise ConfigError(f"expected a square 2d array, got shape {x.shape}")
    if levels is None:
        levels = default_levels(n)
    _check(n, wavelet, levels)
    lo, hi = _bank(wavelet)
    size = n >> (levels - 1)
    for _ in range(levels):
        block = np.swapaxes(x[:size, :size], 0, 1)
        half = size // 2
        block = np.swapaxes(_synthesize(block[..., :half], block[..., half:], lo, hi), 0, 1)
        x[:size, :size] = _synthesize(block[..., :half], block[..., half:], lo, hi)
        size *= 2
    return x
