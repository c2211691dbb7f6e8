"""Counter-based random streams built on Philox4x64-10.

Every Monte Carlo iteration owns one stream keyed by ``(master_seed, index)``.
A stream is nothing more than a key and a block counter, so the n-th block of
any stream can be computed directly without touching the others.  That is what
makes results independent of how iterations are split across workers.

The block function is the Philox4x64 bijection with ten rounds (Salmon et al.,
"Parallel random numbers: as easy as 1, 2, 3", SC'11), the same function used
by :class:`numpy.random.Philox`.  It is reimplemented here on ``uint64`` arrays
so thousands of streams advance in one vectorized call.
"""

from __future__ import annotations

import numpy as np

_M0 = np.uint64(0xD2E7470EE14C6C93)
_M1 = np.uint64(0xCA5A826395121157)
_W0 = np.uint64(0x9E3779B97F4A7C15)
_W1 = np.uint64(0xBB67AE8584CAA73B)
_LO32 = np.uint64(0xFFFFFFFF)
_S32 = np.uint64(32)
_S11 = np.uint64(11)
_TWO_M53 = 2.0**-53

ROUNDS = 10


def _mulhilo(a: np.uint64, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # 64x64 -> 128 bit product assembled from 32-bit limbs.
    a_lo, a_hi = a & _LO32, a >> _S32
    b_lo, b_hi = b & _LO32, b >> _S32
    p0 = a_lo * b_lo
    p1 = a_lo * b_hi
    p2 = a_hi * b_lo
    p3 = a_hi * b_hi
    mid = (p0 >> _S32) + (p1 & _LO32) + (p2 & _LO32)
    hi = p3 + (p1 >> _S32) + (p2 >> _S32) + (mid >> _S32)
    return hi, a * b


def philox4x64(counter: np.ndarray, key: np.ndarray, rounds: int = ROUNDS) -> np.ndarray:
    """Apply the Philox4x64 bijection.

    ``counter`` has shape ``(..., 4)`` and ``key`` shape ``(..., 2)``, both
    ``uint64`` and broadcastable against each other.  Returns the ``(..., 4)``
    output block.
    """
    counter = np.asarray(counter, dtype=np.uint64)
    key = np.asarray(key, dtype=np.uint64)
    shape = np.broadcast_shapes(counter.shape[:-1], key.shape[:-1])
    c0, c1, c2, c3 = (np.broadcast_to(counter[..., i], shape).copy() for i in range(4))
    k0 = np.broadcast_to(key[..., 0], shape).copy()
    k1 = np.broadcast_to(key[..., 1], shape).copy()
    with np.errstate(over="ignore"):
        for r in range(rounds):
            if r:
                k0 += _W0
                k1 += _W1
            hi0, lo0 = _mulhilo(_M0, c0)
            hi1, lo1 = _mulhilo(_M1, c2)
            c0, c1, c2, c3 = hi1 ^ c1 ^ k0, lo1, hi0 ^ c3 ^ k1, lo0
    return np.stack([c0, c1, c2, c3], axis=-1)


def seed_key(master_seed: int) -> np.uint64:
    """Condense an arbitrary integer seed into the first key word."""
    return np.random.SeedSequence(abs(int(master_seed)), spawn_key=(int(master_seed < 0),)).generate_state(
        1, np.uint64
    )[0]


class RngStream:
    """A batch of independent counter-based streams sharing one master seed.

    Stream ``j`` of the batch is keyed by ``(seed_key(master_seed),
    indices[j])``; its state is the number of blocks already consumed.  A
    batch of length one is the single stream handed out by :func:`make_stream`.

    Streams are single-owner: drawing mutates the counters in place.
    """

    __slots__ = ("master_seed", "indices", "counters", "_key")

    def __init__(self, master_seed: int, indices) -> None:
        self.master_seed = int(master_seed)
        self.indices = np.atleast_1d(np.asarray(indices, dtype=np.int64))
        if np.any(self.indices < 0):
            raise ValueError("stream indices must be non-negative")
        self.counters = np.zeros(self.indices.shape, dtype=np.uint64)
        self._key = np.empty(self.indices.shape + (2,), dtype=np.uint64)
        self._key[..., 0] = seed_key(master_seed)
        self._key[..., 1] = self.indices.astype(np.uint64)

    def __len__(self) -> int:
        return self.indices.shape[0]

    def __repr__(self) -> str:
        return f"RngStream(seed={self.master_seed}, n={len(self)}, first_index={self.indices[0] if len(self) else None})"

    def blocks(self, which=None) -> np.ndarray:
        """Return the next 4-word block for the selected streams and advance them.

        ``which`` is an integer index array (or ``None`` for every stream).
        The result has shape ``(len(which), 4)``.
        """
        if which is None:
            which = np.arange(len(self))
        ctr = np.zeros((len(which), 4), dtype=np.uint64)
        ctr[:, 0] = self.counters[which]
        out = philox4x64(ctr, self._key[which])
        self.counters[which] += np.uint64(1)
        return out

    def take(self, count: int) -> np.ndarray:
        """``count`` consecutive blocks of a single stream, shape ``(count, 4)``."""
        if len(self) != 1:
            raise ValueError("take() needs a single stream")
        ctr = np.zeros((count, 4), dtype=np.uint64)
        ctr[:, 0] = self.counters[0] + np.arange(count, dtype=np.uint64)
        out = philox4x64(ctr, self._key[0])
        self.counters[0] += np.uint64(count)
        return out

    def uniforms(self, which=None) -> np.ndarray:
        """Next block as four doubles in [0, 1), shape ``(len(which), 4)``."""
        return (self.blocks(which) >> _S11).astype(np.float64) * _TWO_M53


def make_stream(master_seed: int, iteration_index: int) -> RngStream:
    """The stream owned by one Monte Carlo iteration."""
    return RngStream(master_seed, [iteration_index])


def make_streams(master_seed: int, start: int, stop: int) -> RngStream:
    """Streams for iterations ``start .. stop-1`` as one vectorized batch.

    Drawing from stream ``j`` of the batch is bit-identical to drawing from
    ``make_stream(master_seed, start + j)``.
    """
    return RngStream(master_seed, np.arange(start, stop, dtype=np.int64))
