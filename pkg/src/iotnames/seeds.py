"""Deterministic seed derivation.

Every random choice in the package is driven by one caller-supplied seed.
Sub-seeds (per tree, per pick, per stage) are expanded from it with a
splitmix64 chain so that runs are reproducible across platforms and the
streams for different stages stay independent.
"""

_MASK = 0xFFFFFFFFFFFFFFFF


def splitmix64(state: int) -> int:
    """One splitmix64 output for the given state (64-bit)."""
    z = (state + 0x9E3779B97F4A7C15) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return (z ^ (z >> 31)) & _MASK


def canonical_seed(seed: int) -> int:
    """Reduce any int to the unsigned 64-bit seed actually used everywhere.

    Negative or oversized user seeds wrap by two's complement, which keeps
    them valid for numpy generators and representable in model files.
    """
    return seed & _MASK


def derive_seed(master: int, *salts: int) -> int:
    """Expand a master seed into a stable sub-seed for a salted purpose."""
    state = master & _MASK
    for salt in salts:
        state = splitmix64((state ^ (salt & _MASK)) & _MASK)
    return splitmix64(state)
