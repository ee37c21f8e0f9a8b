"""Deterministic multi-stream random numbers.

Every Monte Carlo replication owns one :class:`RngStream`, identified by a
64-bit master seed plus a 64-bit stream index.  Streams are backed by the
counter-based Philox generator, so stream ``r`` is constructed directly from
its key without generating streams ``0..r-1`` first, and the variate
sequence for a given key is identical on every platform and under any
worker count.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

_UINT64_MAX = 2**64 - 1


@dataclass(frozen=True)
class RngStream:
    """Key of one reproducible random stream."""

    master_seed: int
    stream_index: int = 0

    def __post_init__(self) -> None:
        for name in ("master_seed", "stream_index"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or not 0 <= v <= _UINT64_MAX:
                raise DomainError(f"{name} must be an unsigned 64-bit integer, got {v!r}")

    def generator(self) -> np.random.Generator:
        key = np.array([self.master_seed, self.stream_index], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))


def substream_index(*labels: object) -> int:
    """Stable 64-bit stream index derived from arbitrary labels.

    Uses SHA-256 of the rendered labels, so indices do not depend on the
    process, platform, or insertion order of unrelated streams.
    """
    text = "|".join(repr(x) for x in labels)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def _as_generator(stream: RngStream | np.random.Generator) -> np.random.Generator:
    if isinstance(stream, RngStream):
        return stream.generator()
    return stream


def correlated_normal_arrays(
    gen: np.random.Generator, rho: float, size: int
) -> tuple[np.ndarray, np.ndarray]:
    """Two arrays of standard normals with pairwise correlation ``rho``.

    The second array equals ``rho * first + sqrt(1 - rho^2) * fresh``, the
    one-factor Cholesky construction.  Draw order is fixed: the first array
    is drawn in full, then the fresh innovations.
    """
    if not -1.0 <= rho <= 1.0:
        raise DomainError(f"correlation must lie in [-1, 1], got {rho}")
    first = gen.standard_normal(size)
    fresh = gen.standard_normal(size)
    second = rho * first + np.sqrt(1.0 - rho * rho) * fresh
    return first, second


def draw_correlated_normals(
    stream: RngStream | np.random.Generator, rho: float
) -> tuple[float, float]:
    """One pair of standard normals with correlation ``rho``."""
    gen = _as_generator(stream)
    a, b = correlated_normal_arrays(gen, rho, 1)
    return float(a[0]), float(b[0])
