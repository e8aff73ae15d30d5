"""Counter-based random substreams.

Every random number in an experiment is drawn from a stream derived from one 64-bit master seed,
an experiment tag and integer keys (sample size, replicate index). Streams use the Philox
counter-based bit generator keyed through ``SeedSequence`` spawn keys, so a stream depends only on
its keys and never on the order in which streams are created.
"""

import hashlib

import numpy as np

from ppcurve.errors import DomainError

type FloatArray = np.ndarray

_UNIT_SCALE = 2.0**-52


def tag_code(tag: str) -> int:
    """Stable 32-bit code of an experiment tag."""
    return int.from_bytes(hashlib.blake2b(tag.encode(), digest_size=4).digest(), "big")


class SubstreamFactory:
    def __init__(self, master_seed: int, tag: str) -> None:
        if master_seed < 0 or master_seed >= 2**64:
            raise DomainError(f"Master seed must be a 64-bit unsigned integer, got {master_seed}")
        self.master_seed = master_seed
        self.tag = tag

    def __repr__(self) -> str:
        return f"<SubstreamFactory (seed={self.master_seed}, tag={self.tag!r})>"

    def stream(self, *keys: int) -> np.random.Generator:
        """Return the generator for ``keys``; equal keys always give identical streams."""
        if any(k < 0 for k in keys):
            raise DomainError(f"Stream keys must be nonnegative, got {keys}")
        seq = np.random.SeedSequence(self.master_seed, spawn_key=(tag_code(self.tag), *keys))
        return np.random.Generator(np.random.Philox(seq))

    def child(self, tag: str) -> "SubstreamFactory":
        return SubstreamFactory(self.master_seed, f"{self.tag}/{tag}")


def open_uniform(rng: np.random.Generator, size: int | tuple[int, ...] | None = None) -> FloatArray:
    """Uniform draws on the open interval (0, 1), on the 2**-52 lattice shifted by half a step."""
    bits = rng.integers(0, 2**52, size=size, dtype=np.int64)
    return (bits.astype(np.float64) + 0.5) * _UNIT_SCALE
