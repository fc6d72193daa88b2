"""Named random substreams derived from one integer seed."""
from __future__ import annotations

import zlib

import numpy as np


def _words(names) -> list[int]:
    return [zlib.crc32(str(n).encode()) for n in names]


def substream(seed: int, *names) -> np.random.Generator:
    """Generator for the stream ``seed/names[0]/names[1]/...``; independent of call order."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), *_words(names)]))


def derive_seed(seed: int, *names) -> int:
    """Integer seed for APIs that take one, drawn from the named stream."""
    ss = np.random.SeedSequence([int(seed), *_words(names)])
    return int(ss.generate_state(1, np.uint64)[0] >> 1)
