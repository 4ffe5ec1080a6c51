"""Deterministic random-number streams.

All stochastic code in the package draws from Philox counter-based
generators keyed by an integer seed plus a tuple of context labels
(sensor axis, epoch, batch, purpose).  Independent streams never share a
key, so results are reproducible regardless of evaluation order.
"""

from __future__ import annotations

import zlib

import numpy as np


def _label_to_int(label) -> int:
    if isinstance(label, (int, np.integer)):
        return int(label) & 0xFFFFFFFF
    return zlib.crc32(str(label).encode("utf-8"))


def stream(seed: int, *context) -> np.random.Generator:
    """Return a Generator keyed by ``seed`` and the context labels.

    The same (seed, context) always produces the same stream; distinct
    contexts produce statistically independent streams.
    """
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF] + [_label_to_int(c) for c in context]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))
