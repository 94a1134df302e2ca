"""Deterministic shared random tape.

Every coin flipped anywhere in the algorithm ladder is a pure function of
(seed, coin identity, probability).  The tape therefore supports O(1) random
access: a per-query oracle and a full global simulation asking about the same
coin always see the same answer, regardless of call order or call count.

Coins come in two disjoint families:

* ``SetSample(i, k, S)`` -- whether set S belongs to the candidate family of
  iteration k in stage i (probability ``2^k / t``).
* ``ElemSample(i, S, e)`` -- whether element e belongs to the size-estimation
  sample of set S in stage i (probability ``p_i``); by construction the same
  sample is reused by every iteration of stage i.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

_MASK = (1 << 64) - 1
_TAG_SET = 0xA24BAED4963EE407
_TAG_ELEM = 0x9FB21C651E98DF25


@dataclass(frozen=True)
class SetSample:
    stage: int
    iteration: int
    set_id: int


@dataclass(frozen=True)
class ElemSample:
    stage: int
    set_id: int
    element_id: int


CoinKind = SetSample | ElemSample


def _mix(x: int) -> int:
    """splitmix64 finalizer; full-avalanche 64-bit mixer."""
    x &= _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


def _threshold(p: float) -> int:
    # Comparing the 64-bit hash against floor(p * 2^64) realizes "u < p".
    return int(p * 18446744073709551616.0)


class RandomTape:
    """Seed-keyed coin source; stateless apart from the seed."""

    __slots__ = ("seed",)

    def __init__(self, seed: int):
        self.seed = int(seed) & _MASK

    def _u64(self, tag: int, a: int, b: int, c: int) -> int:
        h = _mix(self.seed ^ tag)
        h = _mix(h ^ a)
        h = _mix(h ^ b)
        return _mix(h ^ c)

    def coin(self, kind: CoinKind, p: float) -> bool:
        """Flip the coin identified by ``kind`` with acceptance probability p."""
        if not 0.0 <= p <= 1.0:
            raise DomainError(f"probability {p} outside [0, 1]")
        if p >= 1.0:
            return True
        if p <= 0.0:
            return False
        if isinstance(kind, SetSample):
            h = self._u64(_TAG_SET, kind.stage, kind.iteration, kind.set_id)
        else:
            h = self._u64(_TAG_ELEM, kind.stage, kind.set_id, kind.element_id)
        return h < _threshold(p)

    def in_S_ik(self, i: int, k: int, S: int, t: int) -> bool:
        """Membership of set S in the stage-i, iteration-k candidate family."""
        if not 1 <= k <= _log2_ceil(t):
            raise DomainError(f"iteration {k} outside [1, log t] for t={t}")
        return self.coin(SetSample(i, k, S), min(1.0, (1 << k) / t))

    def in_B_i(self, i: int, S: int, e: int, p_i: float) -> bool:
        """Membership of element e in the stage-i estimation sample of set S.

        The caller is responsible for only asking about elements of S; the
        tape itself has no access to the instance.
        """
        return self.coin(ElemSample(i, S, e), p_i)

    # Vectorized twins of the scalar coins, used by the global simulations.
    # They evaluate the exact same mixing chain in uint64 arithmetic, so the
    # answers are bit-identical to the scalar path (asserted in tests).

    def set_mask(self, i: int, k: int, set_ids: np.ndarray, t: int) -> np.ndarray:
        p = min(1.0, (1 << k) / t)
        ids = np.asarray(set_ids, dtype=np.uint64)
        if p >= 1.0:
            return np.ones(ids.shape, dtype=bool)
        prefix = _mix(_mix(_mix(self.seed ^ _TAG_SET) ^ i) ^ k)
        h = _mix_arr(np.uint64(prefix) ^ ids)
        return h < np.uint64(_threshold(p))

    def elem_mask(
        self, i: int, set_ids: np.ndarray, elem_ids: np.ndarray, p_i: float
    ) -> np.ndarray:
        a = np.asarray(set_ids, dtype=np.uint64)
        b = np.asarray(elem_ids, dtype=np.uint64)
        if p_i >= 1.0:
            return np.ones(np.broadcast(a, b).shape, dtype=bool)
        if p_i <= 0.0:
            return np.zeros(np.broadcast(a, b).shape, dtype=bool)
        prefix = _mix(_mix(self.seed ^ _TAG_ELEM) ^ i)
        h = _mix_arr(np.uint64(prefix) ^ a)
        h = _mix_arr(h ^ b)
        return h < np.uint64(_threshold(p_i))

    def __repr__(self):
        return f"RandomTape(seed={self.seed})"


def _mix_arr(x):
    with np.errstate(over="ignore"):
        x = np.uint64(x) if np.isscalar(x) else x
        x = (x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        x = (x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return x ^ (x >> np.uint64(31))


def _log2_ceil(x: int) -> int:
    if x < 1:
        raise DomainError(f"log2 of non-positive value {x}")
    return max(1, (x - 1).bit_length())
