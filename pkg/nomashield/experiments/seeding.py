import numpy as np
import torch


def split(master_seed:int, *key:int) -> int:
    '''Counter-based child seed: the same (master_seed, key) always gives the same seed.'''
    seq = np.random.SeedSequence(master_seed, spawn_key=tuple(int(k) for k in key))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def make_generator(seed:int) -> torch.Generator:
    rng = torch.Generator(device='cpu')
    rng.manual_seed(seed)
    return rng
