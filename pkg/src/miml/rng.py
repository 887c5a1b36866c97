"""Counter-based random streams for reproducible, order-free simulation.

Every variate is a pure function of ``(seed, tag, replication, substream,
index)``.  The generator is Philox4x64-10, evaluated in vectorized numpy
arithmetic so that a whole block of replications can be drawn at once while
each replication still owns an independent stream.  The output is
bit-compatible with :class:`numpy.random.Philox`, which the test suite uses
as a known-answer oracle.
"""

from __future__ import annotations

import hashlib

import numpy as np
from scipy import special

_M0 = np.uint64(0xD2E7470EE14C6C93)
_M1 = np.uint64(0xCA5A826395121157)
_W0 = np.uint64(0x9E3779B97F4A7C15)
_W1 = np.uint64(0xBB67AE8584CAA73B)
_LO = np.uint64(0xFFFFFFFF)
_32 = np.uint64(32)
_M0_LO, _M0_HI = _M0 & _LO, _M0 >> _32
_M1_LO, _M1_HI = _M1 & _LO, _M1 >> _32
_ROUNDS = 10


def _mulhi(b, a_lo, a_hi):
    # high 64 bits of a*b from 32-bit limbs
    b_lo = b & _LO
    b_hi = b >> _32
    ll = a_lo * b_lo
    lh = a_lo * b_hi
    hl = a_hi * b_lo
    mid = (ll >> _32) + (lh & _LO) + (hl & _LO)
    return a_hi * b_hi + (lh >> _32) + (hl >> _32) + (mid >> _32)


def philox4x64(c0, c1, c2, c3, k0, k1):
    """Apply the Philox4x64-10 bijection to broadcastable counter words.

    Args:
        c0, c1, c2, c3: uint64 arrays (or scalars) holding the counter.
        k0, k1: the two 64-bit key words.

    Returns:
        Tuple of four uint64 arrays, the broadcast shape of the counters.
    """
    c0, c1, c2, c3 = np.broadcast_arrays(*(np.asarray(c, dtype=np.uint64) for c in (c0, c1, c2, c3)))
    k0 = np.uint64(k0)
    k1 = np.uint64(k1)
    with np.errstate(over="ignore"):
        for r in range(_ROUNDS):
            if r:
                k0 = k0 + _W0
                k1 = k1 + _W1
            hi0 = _mulhi(c0, _M0_LO, _M0_HI)
            lo0 = c0 * _M0
            hi1 = _mulhi(c2, _M1_LO, _M1_HI)
            lo1 = c2 * _M1
            c0, c1, c2, c3 = hi1 ^ c1 ^ k0, lo1, hi0 ^ c3 ^ k1, lo0
    return c0, c1, c2, c3


def tag_key(tag: str) -> int:
    """Stable 64-bit key word for a purpose tag."""
    return int.from_bytes(hashlib.blake2b(tag.encode(), digest_size=8).digest(), "little")


class CounterStreams:
    """Family of independent streams keyed by a 64-bit seed.

    A stream is addressed by a purpose ``tag`` (e.g. ``"data.x"``), a vector of
    replication indices, and a substream number (regeneration attempt,
    imputation index, ...).  Drawing ``size`` values from a stream always
    returns the first ``size`` values of that stream, whatever else has been
    drawn before.
    """

    def __init__(self, seed: int):
        if not 0 <= int(seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        self.seed = int(seed)

    def raw(self, tag, reps, size, sub=0):
        """uint64 array of shape ``(len(reps), size)``."""
        reps = np.asarray(reps, dtype=np.uint64).reshape(-1, 1)
        sub = np.asarray(sub, dtype=np.uint64)
        if sub.ndim:
            sub = sub.reshape(-1, 1)
        blocks = -(-int(size) // 4)
        # numpy's Philox increments the first counter word before each block
        ctr = np.arange(1, blocks + 1, dtype=np.uint64).reshape(1, -1)
        words = philox4x64(ctr, reps, sub, np.uint64(0), self.seed, tag_key(tag))
        out = np.stack(words, axis=-1).reshape(reps.shape[0], blocks * 4)
        return out[:, :size]

    def uniform(self, tag, reps, size, sub=0):
        """Uniforms on the open interval (0, 1) with 53-bit resolution."""
        u = self.raw(tag, reps, size, sub)
        return ((u >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53

    def normal(self, tag, reps, size, sub=0):
        """Standard normal variates by inversion."""
        return special.ndtri(self.uniform(tag, reps, size, sub))

    def chisquare(self, tag, reps, df, sub=0):
        """One chi-square variate per replication, ``df`` broadcast per row."""
        u = self.uniform(tag, reps, 1, sub)[:, 0]
        return 2.0 * special.gammaincinv(np.asarray(df, dtype=float) / 2.0, u)
