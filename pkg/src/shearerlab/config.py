"""Size caps and numeric defaults."""

from __future__ import annotations

import os
from dataclasses import dataclass, replace
from fractions import Fraction

DEFAULT_TOL = Fraction(1, 10**12)
ENV_MAX_VERTICES = "LLL_MAX_SUBSETS"


@dataclass(frozen=True)
class Limits:
    max_vertices: int = 24          # subset enumeration in shearer_check and friends
    max_cycle_length: int = 16
    exact_rank_cap: int = 256       # automatic mode switches to modular rank above this
    exact_mode_cap: int = 4096      # hard limit when exact rank is requested explicitly
    max_rank_entries: int = 1 << 24  # dense rows x columns handed to modular elimination
    max_total_dim: int = 1 << 16    # construction blow-up guard
    max_points: int = 1 << 20       # product sample space of an event system
    entry_bound: int = 1 << 20      # random basis entries lie in [-bound, bound]
    resample_attempts: int = 16
    modular_primes: int = 2


def limits(**overrides) -> Limits:
    """Default limits, with the vertex cap taken from the environment when set."""
    base = Limits()
    raw = os.environ.get(ENV_MAX_VERTICES)
    if raw:
        try:
            base = replace(base, max_vertices=int(raw))
        except ValueError:
            raise ValueError(f"{ENV_MAX_VERTICES} must be an integer, got {raw!r}")
    return replace(base, **overrides) if overrides else base


class CapExceeded(RuntimeError):
    """A configured size cap would be exceeded."""
