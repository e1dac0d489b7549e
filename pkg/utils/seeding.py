"""
Reproducible sub-seed derivation

child_seed(master, tag, *indices) feeds [master, crc32(tag), *indices] into
numpy's SeedSequence and reads back one 64-bit word. SeedSequence hashing is
platform independent, so the same inputs give the same seed on every machine.
"""
import logging
import zlib

import numpy as np

logger = logging.getLogger(__name__)

SEED_MASK = 0xFFFFFFFFFFFFFFFF


def tag_code(tag: str) -> int:
    """CRC32 of the tag"""
    return zlib.crc32(tag.encode('utf-8')) & 0xFFFFFFFF


def child_seed(master: int, tag: str, *indices: int) -> int:
    """Derive an independent 64-bit seed for component `tag` at `indices`"""
    entropy = [int(master) & SEED_MASK, tag_code(tag)] + [int(i) & SEED_MASK for i in indices]
    words = np.random.SeedSequence(entropy).generate_state(2, dtype=np.uint32)
    seed = (int(words[0]) << 32) | int(words[1])
    logger.debug(f"child_seed(master={master}, tag={tag}, indices={indices}) -> {seed}")
    return seed


def rng_for(master: int, tag: str, *indices: int) -> np.random.Generator:
    return np.random.default_rng(child_seed(master, tag, *indices))
