"""Dynamic-ray tracing by backward iteration.

A ray point at potential t with address (s_0 s_1 ...) is the limit of

    L_{s_0} o L_{s_1} o ... o L_{s_{n-1}} ( step^n(t) + 2*pi*i*s_n/d )

as the depth n grows, where L_k is the inverse branch into strip k.  The
seed error decays like exp(-step^n(t)/2), so the deepest representable
seed is already far below double resolution for any moderate potential;
the tracer certifies convergence by comparing two consecutive depths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import config, potentials, tracts
from .errors import (
    DomainError,
    NotConvergedError,
    NotEscapingError,
    OverflowSignal,
)
from .polyexp import PolyExpMap
from .potentials import ExternalAddress


@dataclass(frozen=True)
class RayPoint:
    z: complex
    t: float
    address: ExternalAddress
    depth_used: int
    error_estimate: float


@dataclass(frozen=True)
class RaySegment:
    """Ray samples ordered by strictly increasing potential."""

    samples: tuple[RayPoint, ...]

    def __post_init__(self):
        ts = [p.t for p in self.samples]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise DomainError("segment potentials must strictly increase")

    @property
    def points(self) -> tuple[complex, ...]:
        return tuple(p.z for p in self.samples)


def _pull_chain(
    map_: PolyExpMap,
    cfg: tracts.TractConfig,
    address: ExternalAddress,
    values: list[float],
    depth: int,
) -> complex:
    """Apply the inverse branches s_{depth-1}, ..., s_0 to the straight seed."""
    d = map_.d
    w = complex(values[depth], 2 * math.pi * address.entry(depth) / d)
    for k in range(depth - 1, -1, -1):
        w = tracts.inverse_branch(map_, cfg, address.entry(k), w)
    return w


def trace_ray(
    map_: PolyExpMap,
    cfg: tracts.TractConfig,
    address: ExternalAddress,
    t: float,
    cap: float = config.CAP,
    tol: float = config.TRACER_TOL,
    max_depth: int = config.TRACER_MAX_DEPTH,
) -> RayPoint:
    """Locate the ray point with the given address and potential t > 0.

    Depth is the largest n with step^n(t) <= cap (bounded by max_depth).
    The consecutive-depth increment measures the shallower depth's error;
    scaled by the tail-decay ratio it bounds the returned point's error,
    which must come in under tol.
    """
    if not t > 0:
        raise DomainError(f"potential must be > 0, got {t}")
    values = potentials.chain(map_.d, t, cap=cap, max_len=max_depth + 1)
    depth = len(values) - 1
    z = _pull_chain(map_, cfg, address, values, depth)
    if depth == 0:
        # Potential so large the straight point is the answer to full precision.
        return RayPoint(z, t, address, 0, abs(z) * 1e-16)
    z_prev = _pull_chain(map_, cfg, address, values, depth - 1)
    increment = abs(z - z_prev)
    # The increment measures the depth-(n-1) error; the depth-n error is the
    # increment shrunk by the seed-tail ratio exp(-(step^n - step^(n-1))/2),
    # evaluated in log space because the deepest seed dwarfs the float range.
    floor = abs(z) * 1e-16
    if increment <= floor:
        err = floor
    else:
        log_err = math.log(increment) + (values[depth - 1] - values[depth]) / 2
        err = math.exp(log_err) if log_err > -700 else 0.0
    if err > tol * max(1.0, abs(z)):
        raise NotConvergedError(
            f"depth budget exhausted at n={depth} "
            f"(increment {increment:.3e}, error estimate {err:.3e})",
            details=(z_prev, z),
        )
    return RayPoint(z, t, address, depth, max(err, floor))


def trace_segment(
    map_: PolyExpMap,
    cfg: tracts.TractConfig,
    address: ExternalAddress,
    t_lo: float,
    t_hi: float,
    n_samples: int,
    **opts,
) -> RaySegment:
    """Trace the ray at geometrically spaced potentials in [t_lo, t_hi]."""
    if not 0 < t_lo <= t_hi:
        raise DomainError("need 0 < t_lo <= t_hi")
    if n_samples < 1:
        raise DomainError("need at least one sample")
    if n_samples == 1:
        ts = [t_lo]
    else:
        ratio = (t_hi / t_lo) ** (1.0 / (n_samples - 1))
        ts = [t_lo * ratio**k for k in range(n_samples)]
        ts[-1] = t_hi
    return RaySegment(tuple(trace_ray(map_, cfg, address, t, **opts) for t in ts))


@dataclass(frozen=True)
class Extraction:
    t: float
    prefix: tuple[int, ...]
    residual: float
    depth: int
    start: int = 0  # orbit index of prefix[0] (0 unless the point itself
    #                 sits left of the strip region)


def extract_potential_address(
    map_: PolyExpMap,
    cfg: tracts.TractConfig,
    z: complex,
    n_steps: int = 64,
) -> Extraction:
    """Recover (potential, address prefix) from a point's forward orbit.

    The orbit is iterated forward until the next evaluation would overflow
    (which certifies right escape); the potential is pulled back from the
    deepest iterate, whose *real* part stays well-conditioned.  Strip
    indices, by contrast, are only readable while the accumulated angle
    error (amplified by |f'| per step) stays small, so the prefix stops at
    that precision horizon.  An orbit that stays bounded or leaves the
    strips raises NotEscapingError with the orbit attached.
    """
    orbit = [complex(z)]
    overflowed = False
    for _ in range(n_steps):
        try:
            orbit.append(map_(orbit[-1]))
        except OverflowSignal:
            overflowed = True
            break
    if not overflowed:
        raise NotEscapingError(
            f"orbit did not certify escape within {n_steps} steps", orbit
        )
    angle_budget = math.log(math.pi / (4 * map_.d))
    log_err = math.log(max(abs(orbit[0]), 1.0) * 1e-16)
    prefix: list[int] = []
    start = 0
    for k, zk in enumerate(orbit):
        if k > 0:
            log_err += map_.log_abs_derivative(orbit[k - 1])
        if log_err > angle_budget:
            break
        try:
            idx = tracts.tract_index(zk, map_.d, cfg)
        except DomainError as exc:
            if not prefix:
                start = k + 1  # leading iterates left of the strips
                continue
            raise NotEscapingError(
                f"iterate {k} left the strip region: {exc}", orbit
            ) from exc
        prefix.append(idx)
    if not prefix:
        raise NotEscapingError(
            "no orbit iterate was readable inside the strips", orbit
        )
    # Potential from the deepest iterate: invert the speed step down the chain.
    deepest = len(orbit) - 1
    u = orbit[deepest].real
    for _ in range(deepest):
        u = potentials.inverse_step(map_.d, u)
    k = start + len(prefix) - 1
    level = potentials.iterate(map_.d, u, k)
    straight = complex(level, 2 * math.pi * prefix[-1] / map_.d)
    residual = abs(orbit[k] - straight)
    return Extraction(u, tuple(prefix), residual, deepest, start)


@dataclass(frozen=True)
class MonotoneReport:
    """First iterate from which Re f^n is strictly increasing along a segment."""

    onset: int
    horizon: int
    violations: dict[int, int]


def check_monotone(
    segment: RaySegment, map_: PolyExpMap, n_iterates: int
) -> MonotoneReport:
    """Find the smallest N with Re f^n strictly increasing for all testable
    n >= N.  Overflow truncates the testable range (reported as horizon)."""
    zs = list(segment.points)
    if len(zs) <= 1:
        return MonotoneReport(0, n_iterates, {})
    violations: dict[int, int] = {}
    horizon = 0
    for n in range(n_iterates + 1):
        res = [z.real for z in zs]
        bad = sum(1 for a, b in zip(res, res[1:]) if b <= a)
        if bad:
            violations[n] = bad
        horizon = n
        try:
            zs = [map_(z) for z in zs]
        except OverflowSignal:
            break
    onset = 0
    for n in sorted(violations):
        if n >= onset:
            onset = n + 1
    return MonotoneReport(onset, horizon, violations)
