"""Deterministic chunked Monte Carlo.

Trials are split into fixed-size chunks and each chunk gets its own RNG
stream spawned from the run seed.  Chunk results are gathered in chunk
order, so the output does not depend on how many worker processes ran them.
"""
from concurrent.futures import ProcessPoolExecutor

import numpy as np

CHUNK = 1024


def plan(trials, chunk=CHUNK):
    """[(start, size), ...] covering ``trials``."""
    return [(s, min(chunk, trials - s)) for s in range(0, trials, chunk)]


def chunk_rngs(rng_seed, count):
    return [np.random.default_rng(s) for s in np.random.SeedSequence(rng_seed).spawn(count)]


def run(fn, tasks, jobs=1):
    """Map ``fn`` over ``tasks`` preserving order; ``fn`` must be picklable."""
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(*t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, *zip(*tasks)))
