# utils/seeds.py
import numpy as np


def child_seeds(seed: int, count: int) -> list[int]:
    """Independent integer seeds derived from one master seed (SeedSequence spawning)."""
    sequence = np.random.SeedSequence(seed)
    return [int(child.generate_state(1, dtype=np.uint64)[0]) for child in sequence.spawn(count)]
