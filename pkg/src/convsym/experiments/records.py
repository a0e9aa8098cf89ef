"""Per-round run records shared by the process drivers."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class RunRecord:
    """State after ``count`` symmetrizations (``round`` bases drawn so far).

    ``energies`` maps even degrees to E_k (Minkowski runs); ``vol`` is NaN
    when the run does not track volume. ``wall`` is excluded from equality
    so that identical seeds give identical record streams.
    """

    round: int
    count: int
    eps: float
    mstar: float
    rin: float
    rout: float
    vol: float = float("nan")
    energies: tuple = ()
    wall: float = field(default=0.0, compare=False)

    def energy(self, k: int) -> float:
        return dict(self.energies).get(k, float("nan"))


def check_counts(records) -> None:
    counts = [r.count for r in records]
    if any(b <= a for a, b in zip(counts, counts[1:])):
        raise AssertionError("symmetrization count must be strictly increasing")
