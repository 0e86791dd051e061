"""Escape speeds, external addresses, potential ladders and clusters.

The one-step speed map is ``step(d, t) = exp(d*t) - 1``.  An escaping orbit
with potential ``t`` and address ``(s_0 s_1 ...)`` shadows the points
``step^n(t) + 2*pi*i*s_n/d``; everything in this module is bookkeeping for
those two coordinates.  All functions are pure and safe to call concurrently.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

from . import config
from .errors import DomainError, OverflowSignal


@dataclass(frozen=True)
class OverflowAt:
    """Marker returned when an iterated speed first exceeds the cap.

    ``index`` is the first iterate (1-based step count) above the cap.
    """

    index: int


@dataclass(frozen=True)
class ExternalAddress:
    """Integer sequence with an eventually periodic representation.

    ``entry(n)`` walks the preperiod first, then cycles the period.  Only
    bounded sequences are representable, which is exactly the class every
    operation in this package supports; address families with unbounded
    entries are rejected at construction of the consumers that would need
    them.
    """

    preperiod: tuple[int, ...]
    period: tuple[int, ...]

    def __init__(self, preperiod: Sequence[int] = (), period: Sequence[int] = (0,)):
        object.__setattr__(self, "preperiod", tuple(int(x) for x in preperiod))
        object.__setattr__(self, "period", tuple(int(x) for x in period))
        if not self.period:
            raise DomainError("address period must be nonempty")

    def entry(self, n: int) -> int:
        if n < 0:
            raise DomainError("address entries are indexed from 0")
        k = len(self.preperiod)
        if n < k:
            return self.preperiod[n]
        return self.period[(n - k) % len(self.period)]

    def shift(self) -> "ExternalAddress":
        """Drop the first entry (rotate the period when no preperiod is left)."""
        if self.preperiod:
            return ExternalAddress(self.preperiod[1:], self.period)
        return ExternalAddress((), self.period[1:] + self.period[:1])

    def shifted(self, n: int) -> "ExternalAddress":
        addr = self
        for _ in range(n):
            addr = addr.shift()
        return addr

    def bound(self) -> int:
        return max(abs(x) for x in self.preperiod + self.period)

    def canonical(self) -> "ExternalAddress":
        """Minimal-period, minimal-preperiod representative of the sequence."""
        per = list(self.period)
        n = len(per)
        for div in range(1, n + 1):
            if n % div == 0 and per == per[div:] + per[:div]:
                per = per[:div]
                break
        pre = list(self.preperiod)
        while pre and pre[-1] == per[-1]:
            per = [per[-1]] + per[:-1]
            pre.pop()
        return ExternalAddress(pre, per)

    @property
    def is_periodic(self) -> bool:
        """True when some shift returns the sequence to itself."""
        return not self.canonical().preperiod

    def same_sequence(self, other: "ExternalAddress") -> bool:
        a, b = self.canonical(), other.canonical()
        return a.preperiod == b.preperiod and a.period == b.period

    def overlaps(self, other: "ExternalAddress") -> bool:
        """True when some shifts of the two sequences coincide."""
        for a in range(len(self.preperiod) + len(self.period)):
            sa = self.shifted(a)
            for b in range(len(other.preperiod) + len(other.period)):
                if sa.same_sequence(other.shifted(b)):
                    return True
        return False

    def __str__(self) -> str:
        pre = " ".join(str(x) for x in self.preperiod)
        per = " ".join(str(x) for x in self.period)
        return f"({pre} | {per})" if pre else f"({per})"


def step(d: int, t: float) -> float:
    """One escape-speed step: exp(d*t) - 1."""
    if d < 1:
        raise DomainError(f"degree must be >= 1, got {d}")
    if d * t > config.EXP_ARG_LIMIT + 10:
        raise OverflowSignal(f"step({d}, {t}) exceeds the float range")
    return math.expm1(d * t)


def inverse_step(d: int, y: float) -> float:
    """Inverse of the speed step: log(y + 1)/d, defined for y > -1."""
    if d < 1:
        raise DomainError(f"degree must be >= 1, got {d}")
    if y <= -1:
        raise DomainError(f"inverse step needs y > -1, got {y}")
    return math.log1p(y) / d


def log_step(d: int, t: float) -> float:
    """log(step(d, t)) computed without forming the step value.

    Stays finite for any representable t > 0, which is what the far tail
    of an orbit grid needs.
    """
    if t <= 0:
        raise DomainError("log_step needs t > 0")
    x = d * t
    if x > 50:
        return x  # correction below double resolution
    return x + math.log1p(-math.exp(-x))


def iterate(d: int, t: float, n: int, cap: float = config.CAP):
    """n-fold speed step with an explicit overflow signal.

    Returns the value when every intermediate stays <= cap, otherwise
    ``OverflowAt(k)`` with k the first step that exceeded the cap.
    Monotone in t for fixed d, n.
    """
    if n < 0:
        raise DomainError("iterate needs n >= 0")
    value = float(t)
    for k in range(1, n + 1):
        if d * value > config.EXP_ARG_LIMIT:
            return OverflowAt(k)
        value = step(d, value)
        if value > cap:
            return OverflowAt(k)
    return value


def chain(d: int, t: float, cap: float = config.CAP, max_len: int = 512) -> list[float]:
    """[t, step(t), step^2(t), ...] truncated before the first value > cap."""
    values = [float(t)]
    while len(values) < max_len:
        v = values[-1]
        if d * v > config.EXP_ARG_LIMIT:
            break
        nxt = step(d, v)
        if nxt > cap:
            break
        values.append(nxt)
    return values


def minimum_potential(address: ExternalAddress, d: int = 1) -> float:
    """Infimum of admissible potentials for a bounded address.

    For every bounded sequence, s_n / step^n(t) -> 0 for all t > 0, so the
    infimum is 0.
    """
    address.bound()  # validates the representation
    return 0.0


@dataclass(frozen=True)
class PotentialLadder:
    """Sorted potentials of a marked-orbit family plus half-way midpoints.

    Above the threshold ``t_prime`` consecutive rungs are more than 2 apart
    and the sampled separation checks hold, so the midpoints there are safe
    cut radii between rungs.
    """

    potentials: tuple[float, ...]
    midpoints: tuple[float, ...]
    t_prime: float
    d: int
    depth: int

    def midpoints_above_threshold(self) -> tuple[float, ...]:
        return tuple(r for r in self.midpoints if r > self.t_prime)


def _straight_points(orbits, d: int, depth: int, cap: float):
    """Asymptotic marked points (potential, |position|, tract index) per orbit
    entry, to the requested depth, truncating at the overflow cap."""
    pts = []
    for i, (t0, addr) in enumerate(orbits):
        values = chain(d, t0, cap=cap, max_len=depth + 1)
        for j, tj in enumerate(values):
            s = addr.entry(j)
            pos = math.hypot(tj, 2 * math.pi * s / d)
            pts.append((tj, pos, s, i, j))
    return pts


def build_ladder(
    orbits: Sequence[tuple[float, ExternalAddress]],
    d: int,
    depth: int,
    cap: float = config.CAP,
    sampling_extra: int = config.LADDER_EXTRA_DEPTH,
) -> PotentialLadder:
    """Merge the iterated potentials of all orbits into a sorted ladder.

    Duplicates collapse at relative tolerance POTENTIAL_EQ_RTOL.  The
    threshold t_prime is the smallest rung (or 0) above which, on data
    sampled ``sampling_extra`` levels deeper than the ladder itself,
    consecutive gaps exceed 2, moduli of marked points gain more than 2 per
    rung, and every midpoint separates the positions below it from the
    positions above it by at least 1.
    """
    if depth < 0:
        raise DomainError("ladder depth must be >= 0")
    if not orbits:
        raise DomainError("ladder needs at least one orbit")
    for t0, _ in orbits:
        if not t0 > 0:
            raise DomainError(f"orbit potential must be > 0, got {t0}")

    rtol = config.POTENTIAL_EQ_RTOL
    merged: list[float] = []
    for t0, _ in orbits:
        merged.extend(chain(d, t0, cap=cap, max_len=depth + 1))
    merged.sort()
    potentials: list[float] = []
    for t in merged:
        if not potentials or t - potentials[-1] > rtol * max(1.0, t):
            potentials.append(t)
    midpoints = tuple(
        (potentials[i] + potentials[i + 1]) / 2 for i in range(len(potentials) - 1)
    )

    # Sampled separation conditions, probed a couple of levels deeper.
    sample_pts = _straight_points(orbits, d, depth + sampling_extra, cap)

    def distinct(a: float, b: float) -> bool:
        return b - a > rtol * max(1.0, abs(a), abs(b))

    sample_pots: list[float] = []
    for t in sorted(p[0] for p in sample_pts):
        if not sample_pots or distinct(sample_pots[-1], t):
            sample_pots.append(t)

    def conditions_hold(threshold: float) -> bool:
        above = [t for t in sample_pots if t > threshold]
        for a, b in zip(above, above[1:]):
            if b - a <= 2:
                return False
        pts_above = sorted(p for p in sample_pts if p[0] > threshold)
        for (ta, pa, *_), (tb, pb, *_) in itertools.combinations(pts_above, 2):
            if distinct(ta, tb) and not pb > pa + 2:
                return False
        for rho in midpoints:
            if rho <= threshold:
                continue
            for t, pos, *_ in sample_pts:
                if t < rho and not pos < rho - 1:
                    return False
                if t > rho and not pos > rho + 1:
                    return False
        return True

    t_prime = math.inf
    for candidate in [0.0] + potentials:
        if conditions_hold(candidate):
            t_prime = candidate
            break

    return PotentialLadder(tuple(potentials), midpoints, t_prime, d, depth)


@dataclass(frozen=True)
class ClusterReport:
    """Partition of grid indices (orbit, level) by (potential, tract index).

    ``infinite`` is set when two orbits keep equal potentials and agreeing
    tract indices arbitrarily deep, which a finite truncation can detect
    from the periodic representations.
    """

    clusters: tuple[tuple[tuple[int, int], ...], ...]
    nontrivial_count: int
    infinite: bool
    keys: tuple[tuple[float, int], ...] = field(default=())

    @property
    def finite(self) -> bool:
        return not self.infinite


def _tails_agree_infinitely_often(a: ExternalAddress, b: ExternalAddress) -> bool:
    """Do entry(n) of a and b coincide for infinitely many n?"""
    start = max(len(a.preperiod), len(b.preperiod))
    window = math.lcm(len(a.period), len(b.period))
    return any(a.entry(start + k) == b.entry(start + k) for k in range(window))


def detect_clusters(
    orbits: Sequence[tuple[float, ExternalAddress]],
    d: int,
    depth: int,
    cap: float = config.CAP,
) -> ClusterReport:
    """Group the truncated grid by equal potential and equal tract index.

    Two grid points share a cluster exactly when their potentials agree to
    relative tolerance and their address entries at that level are equal.
    The infinite flag fires when two orbits align in potential at some
    offset and their shifted addresses agree at infinitely many positions.
    """
    rtol = config.POTENTIAL_EQ_RTOL
    entries = []  # (potential, tract, orbit, level)
    chains = []
    for i, (t0, addr) in enumerate(orbits):
        values = chain(d, t0, cap=cap, max_len=depth + 1)
        chains.append(values)
        for j, tj in enumerate(values):
            entries.append((tj, addr.entry(j), i, j))

    entries.sort(key=lambda e: (e[0], e[1]))
    groups: list[list[tuple[int, int]]] = []
    keys: list[tuple[float, int]] = []
    for t, s, i, j in entries:
        if keys and s == keys[-1][1] and t - keys[-1][0] <= rtol * max(1.0, t):
            groups[-1].append((i, j))
        else:
            groups.append([(i, j)])
            keys.append((t, s))
    nontrivial = sum(1 for g in groups if len(g) > 1)

    infinite = False
    for a, b in itertools.combinations(range(len(orbits)), 2):
        ta, addr_a = orbits[a]
        tb, addr_b = orbits[b]
        # Potential alignment: step^da(ta) == step^db(tb) persists once true.
        align = None
        for da, va in enumerate(chains[a]):
            for db, vb in enumerate(chains[b]):
                if abs(va - vb) <= rtol * max(1.0, abs(va), abs(vb)):
                    align = (da, db)
                    break
            if align:
                break
        if align is None:
            continue
        if _tails_agree_infinitely_often(
            addr_a.shifted(align[0]), addr_b.shifted(align[1])
        ):
            infinite = True
            break

    return ClusterReport(
        clusters=tuple(tuple(g) for g in groups),
        nontrivial_count=nontrivial,
        infinite=infinite,
        keys=tuple(keys),
    )
