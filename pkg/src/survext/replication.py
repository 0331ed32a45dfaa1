"""Block-parallel Monte Carlo replication.

Replications are cut into fixed-size blocks.  Block ``j`` always draws from
the sub-stream ``(seed, j, *subkeys)`` and writes into its own slice of a
pre-allocated result array, so results are bit-identical for any thread count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from survext.distributions import SeededStream

DEFAULT_BLOCK = 8192


def default_threads() -> int:
    return os.cpu_count() or 1


def replicate(task, replications: int, seed: int, *subkeys: int, threads: int | None = None,
              block_size: int = DEFAULT_BLOCK, width: int | None = None) -> np.ndarray:
    """Run ``task(rng, count)`` over all blocks and concatenate the results.

    ``task`` must return an array whose leading dimension is ``count``;
    ``width`` gives the trailing dimension when the task returns 2-D rows.
    """
    if replications < 1:
        raise ValueError("replications must be positive")
    starts = list(range(0, replications, block_size))
    shape = (replications,) if width is None else (replications, width)
    out = np.empty(shape)

    def run(j):
        start = starts[j]
        count = min(block_size, replications - start)
        rng = SeededStream(seed, j).generator(*subkeys)
        out[start:start + count] = task(rng, count)

    threads = threads or default_threads()
    if threads == 1 or len(starts) == 1:
        for j in range(len(starts)):
            run(j)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run, range(len(starts))))
    return out
