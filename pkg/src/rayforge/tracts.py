"""Strip geometry of f = p o exp and the inverse branches into each strip.

Far to the right, the preimage of a right half-plane H_r under f splits
into countably many components, one per integer n, squeezed between two
horizontal strips around the center line Im z = 2*pi*n/d:

    outer:  [t_up, oo) x [center - pi/2d - eps, center + pi/2d + eps]
    inner:  [t_lo, oo) x [center - pi/2d + eps, center + pi/2d - eps]

``make_tract_config`` certifies the bounds by boundary sampling (Re f is
harmonic, so edge minima control the interiors) plus analytic tails, and
retries with a larger r on failure.  The certified guarantees hold on
H_r; between the singular-value floor ``r_min`` and ``r`` the inverse
branches are still well-defined single-valued continuations and are served
best-effort, which is what ray tracing at small potentials needs.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from . import config, polyexp
from .errors import (
    AmbiguousTractError,
    BranchSelectionError,
    DomainError,
    OverflowSignal,
    TractConfigError,
)


@dataclass(frozen=True)
class LogPolar:
    """A complex value exp(log_abs + i*arg), for magnitudes beyond floats."""

    log_abs: float
    arg: float = 0.0

    def to_complex(self) -> complex:
        if self.log_abs > config.EXP_ARG_LIMIT:
            raise OverflowSignal("LogPolar value exceeds the float range")
        return cmath.rect(math.exp(self.log_abs), self.arg)


@dataclass(frozen=True)
class TractConfig:
    """Certified strip bounds for one map.

    ``r``: right half-plane on which the branch guarantees (residuals,
    1/2-contraction) were sampled; ``r_min``: hard domain floor just right
    of the singular values; ``t_up``/``t_lo``: left edges of the outer and
    inner strips; ``eps``: fuzz half-width.
    """

    d: int
    r: float
    r_min: float
    t_up: float
    t_lo: float
    eps: float

    def strip_center(self, n: int) -> float:
        return 2 * math.pi * n / self.d

    def strip_half_width(self) -> float:
        return math.pi / (2 * self.d)


def _edge_xs(t_from: float, t_to: float, samples: int) -> list[float]:
    span = t_to - t_from
    return [t_from + span * k / (samples - 1) for k in range(samples)]


def make_tract_config(
    map_: polyexp.PolyExpMap,
    eps: float | None = None,
    r_floor: float = config.R_FLOOR,
    edge_samples: int = config.STRIP_EDGE_SAMPLES,
    budget: int = config.TRACT_RETRY_BUDGET,
) -> TractConfig:
    """Choose and certify (r, t_up, t_lo) for the strip inclusions.

    r starts at max(r_floor, 2*max|SV| + 2).  The strip checks use the
    coefficient moduli, so one pass certifies every strip index at once;
    |f'| >= 2 is additionally sampled on the inner strips.  On a sampled
    violation the half-plane is pushed right and everything is retried,
    up to the budget.
    """
    d = map_.d
    if eps is None:
        eps = config.strip_epsilon(d)
    if not 0 < eps < math.pi / (2 * d):
        raise DomainError(f"eps must lie in (0, pi/2d), got {eps}")
    sv = map_.singular_data()
    abs_coeffs = [abs(c) for c in map_.coeffs]
    r = max(r_floor, 2 * sv.max_modulus() + 2)
    # Hard domain floor: the half-plane right of every singular value is
    # free of branch points, so inverse branches are single-valued there.
    r_min = sv.max_real() + 1e-6
    sin_eps = math.sin(d * eps)

    for _ in range(budget):
        t_up = math.log(r + 1) / d - 1
        t_lo = math.log((r + 1) / sin_eps) / d + 1

        # Beyond x_tail the leading term dominates every coefficient sum.
        x_tail = max(t_lo, t_up) + 1
        while x_tail * d < config.EXP_ARG_LIMIT:
            lead = math.exp(d * x_tail) * sin_eps
            low = sum(b * math.exp(k * x_tail) for k, b in enumerate(abs_coeffs))
            if lead > 2 * (low + r + 1):
                break
            x_tail += 1.0

        ok = True
        half = math.pi / (2 * d)

        # Outer-strip boundary: Re f <= r must hold there (worst case over
        # all strip indices via coefficient moduli).
        def upper_re(x: float, rel_y: float) -> float:
            lead = math.exp(d * x) * math.cos(d * rel_y)
            slack = sum(b * math.exp(k * x) for k, b in enumerate(abs_coeffs))
            return lead + slack

        for x in _edge_xs(t_up, x_tail, edge_samples):
            if upper_re(x, half + eps) > r:  # horizontal edges, cos < 0 there
                ok = False
                break
        if ok:
            ys = _edge_xs(-(half + eps), half + eps, edge_samples)
            if any(upper_re(t_up, y) > r for y in ys):
                ok = False

        # Inner strip: Re f > r on its boundary (hence inside, harmonicity),
        # worst case over strip indices.
        def lower_re(x: float, rel_y: float) -> float:
            lead = math.exp(d * x) * math.cos(d * rel_y)
            slack = sum(b * math.exp(k * x) for k, b in enumerate(abs_coeffs))
            return lead - slack

        if ok:
            for x in _edge_xs(t_lo, x_tail, edge_samples):
                if lower_re(x, half - eps) <= r:
                    ok = False
                    break
        if ok:
            ys = _edge_xs(-(half - eps), half - eps, edge_samples)
            if any(lower_re(t_lo, y) <= r for y in ys):
                ok = False

        # |f'| >= 2 sampled where the preimage of H_r lives: inner-strip
        # edges and a fringe of outer-strip points with Re f > r.
        if ok:
            for n in range(-2, 3):
                c = 2 * math.pi * n / d
                for x in _edge_xs(t_up, x_tail, 64):
                    for rel in (-half - eps, -half + eps, 0.0, half - eps, half + eps):
                        z = complex(x, c + rel)
                        try:
                            if map_(z).real > r and abs(map_.derivative(z)) < 2:
                                ok = False
                                break
                        except OverflowSignal:
                            break
                    if not ok:
                        break
                if not ok:
                    break

        if ok:
            return TractConfig(d=d, r=r, r_min=r_min, t_up=t_up, t_lo=t_lo, eps=eps)
        r = 2 * r + 1

    raise TractConfigError(
        f"could not certify strip bounds within budget (last r={r})"
    )


def tract_index(z: complex, d: int, cfg: TractConfig) -> int:
    """Index of the strip containing z.

    Certified for Re z >= t_lo; points with Re z >= t_up are read
    best-effort.  Angular distance up to pi/2d from a center resolves to
    that strip; within the eps-fuzz beyond it the call raises
    AmbiguousTractError carrying both flanking candidates.
    """
    z = complex(z)
    if z.real < cfg.t_up:
        raise DomainError(
            f"point {z} lies left of the strip region (Re < {cfg.t_up:.3g})"
        )
    m = z.imag * d / (2 * math.pi)
    lower = math.floor(m)
    frac = m - lower
    if frac > 0.5:
        n = lower + 1
    elif frac < 0.5:
        n = lower
    else:
        n = lower if abs(lower) <= abs(lower + 1) else lower + 1
    dist = abs(z.imag - 2 * math.pi * n / d)
    half = math.pi / (2 * d)
    if dist <= half:
        return int(n)
    if dist <= half + cfg.eps:
        side = 1 if z.imag > 2 * math.pi * n / d else -1
        raise AmbiguousTractError(z, (int(n), int(n) + side))
    raise DomainError(f"point {z} lies between strips (offset {dist:.3g})")


def inverse_branch(
    map_: polyexp.PolyExpMap,
    cfg: TractConfig,
    n: int,
    w: complex | LogPolar,
    residual_rtol: float = config.INVERSE_RESIDUAL_RTOL,
) -> complex:
    """The preimage of w under f lying in strip n.

    Solves p(zeta) = w, then lifts log(zeta) by the unique multiple of
    2*pi*i that lands in strip n.  For seeds given in LogPolar form beyond
    the float range the root is expanded to first order in the coefficients
    (the corrections underflow exactly when they should).
    """
    if isinstance(w, LogPolar):
        if w.log_abs > math.log(config.CAP):
            return _asymptotic_branch(map_, n, w)
        w = w.to_complex()
    w = complex(w)
    if w.real <= cfg.r_min:
        raise DomainError(
            f"seed {w} is not right of the singular values (Re <= {cfg.r_min:.3g})"
        )
    d = map_.d
    center = 2 * math.pi * n / d
    roots = polyexp.poly_roots(map_.coeffs, w)
    best = None
    candidates = []
    for zeta in roots:
        if zeta == 0:
            continue
        base = cmath.log(zeta)
        k = round((center - base.imag) / (2 * math.pi))
        z = complex(base.real, base.imag + 2 * math.pi * k)
        dist = abs(z.imag - center)
        candidates.append(z)
        if best is None or dist < best[0]:
            best = (dist, z)
    if best is None or best[0] > math.pi / (2 * d) + cfg.eps:
        raise BranchSelectionError(
            f"no root of p = w lands in strip {n} for w={w}", candidates
        )
    z = best[1]
    fz = map_(z)
    if abs(fz - w) > residual_rtol * max(1.0, abs(w)):
        raise BranchSelectionError(
            f"branch residual {abs(fz - w):.3e} too large for w={w}", candidates
        )
    return z


def _asymptotic_branch(
    map_: polyexp.PolyExpMap, n: int, w: LogPolar
) -> complex:
    """First-order branch for seeds beyond the float range.

    zeta = w^(1/d) * (1 - b_{d-1}/(d*zeta) + ...); only the leading
    correction survives double precision, and it underflows to zero for
    truly enormous seeds.
    """
    d = map_.d
    z0 = complex(w.log_abs / d, w.arg / d + 2 * math.pi * n / d)
    if w.log_abs / d > config.EXP_ARG_LIMIT:
        corr = 0.0
    else:
        eta = cmath.exp(complex(z0.real, w.arg / d))
        corr = -map_.coeffs[d - 1] / (d * eta)
    return z0 + corr


def contraction_ratio(
    map_: polyexp.PolyExpMap,
    cfg: TractConfig,
    w1: complex,
    w2: complex,
    n: int,
) -> float:
    """|L_n(w1) - L_n(w2)| / |w1 - w2|; zero when the seeds coincide.

    Below 1/2 whenever |f'| >= 2 holds along the connecting segment.
    """
    if w1 == w2:
        return 0.0
    z1 = inverse_branch(map_, cfg, n, w1)
    z2 = inverse_branch(map_, cfg, n, w2)
    return abs(z1 - z2) / abs(w1 - w2)
