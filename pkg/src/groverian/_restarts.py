"""Seeded, order-preserving execution of independent optimizer restarts."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, TypeVar

import numpy as np

T = TypeVar("T")


def restart_generators(seed: int, count: int) -> list[np.random.Generator]:
    """One PCG64 stream per restart, spawned from a single ``SeedSequence``.

    Restart ``i`` always receives the same stream for a given seed, whatever
    the number of worker threads.
    """
    children = np.random.SeedSequence(seed).spawn(count)
    return [np.random.Generator(np.random.PCG64(child)) for child in children]


def run_restarts(
    task: Callable[[int, np.random.Generator], T],
    count: int,
    seed: int,
    threads: int = 1,
    stop: Callable[[T], bool] | None = None,
) -> list[T]:
    """Run ``task(i, rng_i)`` for ``i < count`` and return results in index order.

    If ``stop`` is given, results are truncated after the first index whose
    result satisfies it. Work is dispatched in batches of ``threads``, so the
    returned list does not depend on the thread count.
    """
    gens = restart_generators(seed, count)
    threads = max(1, threads)
    results: list[T] = []
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        for start in range(0, count, threads):
            batch = range(start, min(start + threads, count))
            if pool is None:
                outs = [task(i, gens[i]) for i in batch]
            else:
                outs = list(pool.map(task, batch, [gens[i] for i in batch]))
            for out in outs:
                results.append(out)
                if stop is not None and stop(out):
                    return results
    finally:
        if pool is not None:
            pool.shutdown()
    return results
