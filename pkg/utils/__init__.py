"""Shared helpers"""
from .seeding import child_seed, rng_for, tag_code

__all__ = ['child_seed', 'rng_for', 'tag_code']
