"""Seed handling.

Every stochastic routine in the package draws from its own generator,
derived from a user seed plus a small integer tag naming the purpose.
Two routines given the same user seed therefore produce independent
streams, and repeated calls are bitwise reproducible.
"""

import numpy as np

# Stream tags. Values are arbitrary but must stay fixed: changing one
# changes every downstream draw for a given user seed.
LSLDG_CENTERS = 11
LSLDG_FOLDS = 12
WF_CENTERS = 21
WF_FOLDS = 22
MIPP_INIT = 31
SIGNAL = 41
NOISE = 42
AUGMENT = 51
SUBSAMPLE = 52


def substream(seed: int, tag: int) -> np.random.Generator:
    """Generator for stream `tag` under user seed `seed` (both >= 0)."""
    if seed < 0:
        raise ValueError("seed must be nonnegative")
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(tag)]))
