"""Deterministic seed derivation.

Every random stream in the simulator is derived from a single master seed
plus a tag describing what the stream is for (seat index, scenario name,
triplet, ...). Derivation goes through SHA-256 so streams are independent,
stable across platforms and Python versions, and never depend on call order.
"""

from __future__ import annotations

import hashlib

MASK64 = (1 << 64) - 1


def derive_seed(*parts: object) -> int:
    """Derive a 64-bit seed from a master seed and any number of tag parts."""
    tag = ":".join(str(p) for p in parts)
    digest = hashlib.sha256(tag.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") & MASK64
