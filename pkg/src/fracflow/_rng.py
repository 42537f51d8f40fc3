"""Counter-based seeding: every fixed-size chunk of a sample gets its own
child stream, so results do not depend on how chunks are scheduled."""

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ._config import get_threads

CHUNK = 1 << 16


def chunk_rngs(seed, n, stream=0):
    """Yield (generator, size) pairs covering n draws for the given stream."""
    nchunks = max(1, -(-int(n) // CHUNK))
    for c in range(nchunks):
        ss = np.random.SeedSequence(entropy=int(seed) & ((1 << 64) - 1), spawn_key=(int(stream), c))
        size = min(CHUNK, int(n) - c * CHUNK)
        yield np.random.Generator(np.random.PCG64(ss)), size


def chunked(seed, n, fn, stream=0):
    """Concatenate ``fn(rng, size)`` over the chunks of a sample of size n."""
    if n <= 0:
        return fn(np.random.default_rng(0), 0)
    jobs = list(chunk_rngs(seed, n, stream))
    threads = get_threads()
    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(lambda job: fn(*job), jobs))
    else:
        parts = [fn(*job) for job in jobs]
    return np.concatenate(parts, axis=0)


def open_uniform(rng, size):
    """Uniform draws on the open interval (0, 1)."""
    return rng.random(size) + 0.5 ** 54
