"""Truncation bounds under which every verdict is certified."""

from __future__ import annotations

import os
from dataclasses import dataclass

ENV_BOUND = "COHERENCE_FORGE_BOUND"


@dataclass(frozen=True)
class Bound:
    max_arity: int = 4
    max_term_size: int = 8
    max_path_len: int = 16
    budget: int = 100000

    def __post_init__(self):
        if min(self.max_arity, self.max_term_size, self.max_path_len, self.budget) < 1:
            raise ValueError("bounds must be positive")

    def as_dict(self):
        return {
            "max_arity": self.max_arity,
            "max_term_size": self.max_term_size,
            "max_path_len": self.max_path_len,
            "budget": self.budget,
        }

    def __repr__(self):
        return "Bound(arity<=%d, size<=%d, len<=%d)" % (
            self.max_arity, self.max_term_size, self.max_path_len)


def default_bound() -> Bound:
    """Default bound, overridable via COHERENCE_FORGE_BOUND.

    Accepted forms: "6" (max arity) or "6:12:24" or "6:12:24:200000".
    """
    raw = os.environ.get(ENV_BOUND, "").strip()
    if not raw:
        return Bound()
    parts = raw.split(":")
    try:
        nums = [int(x) for x in parts]
    except ValueError:
        raise ValueError("bad %s: %r" % (ENV_BOUND, raw))
    defaults = Bound()
    fields = [defaults.max_arity, defaults.max_term_size,
              defaults.max_path_len, defaults.budget]
    fields[: len(nums)] = nums
    return Bound(*fields)
