"""Resource identifier minting.

Every entity IRI is ``<base><suffix>`` where the suffix is 26 characters
and lexicographically sortable in creation order. Production stores use a
ULID-style suffix (millisecond timestamp plus randomness, Crockford
base32); tests and golden files inject a sequential source so minted IRIs
are reproducible.
"""

from __future__ import annotations

import os
import threading
import time

SUFFIX_LENGTH = 26

_CROCKFORD = "0123456789ABCDEFGHJKMNPQRSTVWXYZ"


class UlidIdSource:
    """Sortable 26-char suffixes: 48-bit ms timestamp + 80 random bits.

    Within a single millisecond the random part is incremented, keeping
    suffixes strictly increasing for one source instance.
    """

    def __init__(self, clock=time.time):
        self._clock = clock
        self._lock = threading.Lock()
        self._last_ms = -1
        self._last_rand = 0

    def next_suffix(self) -> str:
        with self._lock:
            ms = int(self._clock() * 1000) & (1 << 48) - 1
            if ms == self._last_ms:
                self._last_rand += 1
            else:
                self._last_ms = ms
                self._last_rand = int.from_bytes(os.urandom(10), "big")
            value = (ms << 80) | (self._last_rand & (1 << 80) - 1)
        out = []
        for _ in range(SUFFIX_LENGTH):
            out.append(_CROCKFORD[value & 31])
            value >>= 5
        return "".join(reversed(out))

    def sync(self, numeric_suffixes: list[int]) -> None:
        pass


class SequentialIdSource:
    """Deterministic counter suffixes, zero-padded to 26 digits."""

    def __init__(self, start: int = 1):
        self._next = start

    def next_suffix(self) -> str:
        suffix = f"{self._next:0{SUFFIX_LENGTH}d}"
        self._next += 1
        return suffix

    def sync(self, numeric_suffixes: list[int]) -> None:
        """Resume after replaying a log minted by a sequential source."""
        if numeric_suffixes:
            self._next = max(self._next, max(numeric_suffixes) + 1)


def make_id_source(kind: str):
    if kind == "ulid":
        return UlidIdSource()
    if kind == "seq":
        return SequentialIdSource()
    raise ValueError(f"unknown id source kind: {kind!r}")
