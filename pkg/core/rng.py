"""Counter-based random streams.

Each (master_seed, stream_id) pair keys its own Philox generator, and draw i of a
stream is the i-th uniform of that generator. A trial therefore sees the same
numbers whatever worker runs it and however its steps are batched.
"""

import numpy as np

from schemas.walk import RngStream, UINT64_MAX


def stream_key(stream: RngStream) -> int:
    return ((stream.stream_id & UINT64_MAX) << 64) | (stream.master_seed & UINT64_MAX)


def generator(stream: RngStream) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=stream_key(stream)))


def trial_generator(master_seed: int, stream_id: int) -> np.random.Generator:
    return generator(RngStream(master_seed=master_seed, stream_id=stream_id))
