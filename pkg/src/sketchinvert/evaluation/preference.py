"""Aggregation arithmetic for pairwise human preference votes.

Each of N raters casts one binary correspondence vote and one binary
naturalness vote; the aggregate is the weighted vote total divided by N.
The study itself is out of scope, only the arithmetic lives here.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import InvalidWeightsError


@dataclass(frozen=True)
class PreferenceTally:
    correspondence_votes: tuple[int, ...]
    naturalness_votes: tuple[int, ...]
    weight_correspondence: float = 0.9
    weight_naturalness: float = 0.1

    def __post_init__(self):
        if len(self.correspondence_votes) != len(self.naturalness_votes):
            raise ValueError("vote lists must have one entry per rater")
        if len(self.correspondence_votes) < 1:
            raise ValueError("need at least one rater")
        for v in (*self.correspondence_votes, *self.naturalness_votes):
            if v not in (0, 1):
                raise ValueError(f"votes must be binary, got {v!r}")


def aggregate_preference(tally: PreferenceTally) -> float:
    """Weighted per-rater preference score in [0, 1]."""
    w_c, w_n = tally.weight_correspondence, tally.weight_naturalness
    if abs(w_c + w_n - 1.0) > 1e-9:
        raise InvalidWeightsError(f"weights must sum to 1, got {w_c} + {w_n}")
    n = len(tally.correspondence_votes)
    r_c = sum(tally.correspondence_votes)
    r_n = sum(tally.naturalness_votes)
    return (w_c * r_c + w_n * r_n) / n
