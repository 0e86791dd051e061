"""Finite-truncation pullback iteration on marked singular orbits.

A target prescribes, for each singular orbit, an escape speed T_i and an
address s_i.  The state is a truncated grid z[i][j] of orbit points
(j = 0..J) plus a map from the family; one step pulls every grid point
back one level through the inverse branch its address dictates (the level
past J is frozen at its straight asymptotic position) and refits the map so
its singular values match the new first column.  At a fixed point the grid
is a genuine orbit segment of the map and the singular values escape with
the prescribed speeds and addresses, which an independent forward-orbit
verifier certifies.

Branches are selected purely by strip index: configurations that would
need nontrivial leg words to pull back are unsupported and surface as
UnsupportedHomotopyError.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import config, potentials, rays, tracts
from .errors import (
    BranchSelectionError,
    DomainError,
    FitError,
    InvariantViolationError,
    NotConvergedError,
    NotEscapingError,
    SpecRejectionError,
    UnsupportedHomotopyError,
)
from .polyexp import PolyExpMap, critical_points
from .potentials import ExternalAddress


@dataclass(frozen=True)
class TargetSpec:
    """Degree, orbit depth, and per-orbit (potential, address) targets.

    Orbit 0 is assigned to the asymptotic value; the remaining orbits to
    critical values.  Addresses must be pairwise non-overlapping under
    shifts and the configuration must admit only finitely many nontrivial
    clusters.
    """

    d: int
    orbits: tuple[tuple[float, ExternalAddress], ...]
    depth: int

    @property
    def m(self) -> int:
        return len(self.orbits)

    def address(self, i: int) -> ExternalAddress:
        return self.orbits[i][1]

    def potential(self, i: int) -> float:
        return self.orbits[i][0]


def validate_spec(spec: TargetSpec, cap: float = config.CAP) -> None:
    """Reject structurally unsupported targets.

    Checks: m <= d, positive potentials, depth representable under the cap,
    pairwise non-overlapping addresses, and finitely many nontrivial
    clusters (equal-speed orbits whose shifted addresses keep agreeing).
    """
    if spec.depth < 1:
        raise SpecRejectionError("grid depth must be >= 1")
    if spec.m < 1:
        raise SpecRejectionError("need at least one singular orbit")
    if spec.m > spec.d:
        raise SpecRejectionError(
            f"a degree-{spec.d} map has at most {spec.d} singular values, "
            f"got {spec.m} orbits"
        )
    for i, (t, _) in enumerate(spec.orbits):
        if not t > 0:
            raise SpecRejectionError(f"orbit {i} potential must be > 0, got {t}")
        top = potentials.iterate(spec.d, t, spec.depth, cap=cap)
        if isinstance(top, potentials.OverflowAt):
            raise SpecRejectionError(
                f"depth {spec.depth} is too deep for orbit {i} (T={t}): its "
                f"speed overflows at level {top.index}; use a smaller depth"
            )
    report = potentials.detect_clusters(spec.orbits, spec.d, spec.depth, cap=cap)
    if report.infinite:
        raise SpecRejectionError(
            "configuration admits infinitely many nontrivial clusters "
            "(equal speeds with persistently agreeing addresses)"
        )
    for i in range(spec.m):
        for k in range(i + 1, spec.m):
            if spec.address(i).overlaps(spec.address(k)):
                raise SpecRejectionError(
                    f"addresses of orbits {i} and {k} overlap under shifts; "
                    "their orbits would share a ray"
                )


@dataclass
class MarkedGrid:
    """Truncated orbit grid: z[i][j], i < m orbits, j = 0..depth levels.

    Levels past the truncation follow the straight asymptotic rule
    step^j(T_i) + 2*pi*i*s_ij/d; ``tail_seed`` serves level depth+1 in a
    form the inverse branches accept beyond the float range.
    """

    z: np.ndarray  # complex, shape (m, depth+1)
    spec: TargetSpec

    @property
    def depth(self) -> int:
        return self.z.shape[1] - 1

    def tail_seed(self, i: int, cap: float = config.CAP):
        spec = self.spec
        d = spec.d
        t_top = potentials.iterate(d, spec.potential(i), spec.depth, cap=cap)
        s_next = spec.address(i).entry(spec.depth + 1)
        v = 2 * math.pi * s_next / d
        log_next = potentials.log_step(d, t_top)
        if log_next <= math.log(cap):
            return complex(math.expm1(d * t_top), v)
        arg = v * math.exp(-log_next) if log_next < 700 else 0.0
        return tracts.LogPolar(log_next, arg)

    def copy(self) -> "MarkedGrid":
        return MarkedGrid(self.z.copy(), self.spec)


@dataclass
class ThurstonState:
    map: PolyExpMap
    grid: MarkedGrid
    iteration: int
    deltas: list[float] = field(default_factory=list)
    tract_cfg: tracts.TractConfig | None = None
    soft_flags: list[str] = field(default_factory=list)


def straight_grid(spec: TargetSpec, cap: float = config.CAP) -> np.ndarray:
    z = np.zeros((spec.m, spec.depth + 1), dtype=complex)
    for i, (t0, addr) in enumerate(spec.orbits):
        values = potentials.chain(spec.d, t0, cap=cap, max_len=spec.depth + 1)
        if len(values) != spec.depth + 1:
            raise SpecRejectionError(
                f"depth {spec.depth} too deep for orbit {i}; speeds overflow"
            )
        for j, tj in enumerate(values):
            z[i, j] = complex(tj, 2 * math.pi * addr.entry(j) / spec.d)
    return z


def init_state(
    spec: TargetSpec,
    cap: float = config.CAP,
    jitter: float = 0.0,
    jitter_seed: int = 0,
) -> ThurstonState:
    """Straight-spider initial state: grid on the asymptotic positions, map
    fitted to the first column.  ``jitter`` displaces every grid entry by
    that radius (seeded) to probe independence of the starting marking."""
    validate_spec(spec, cap=cap)
    z = straight_grid(spec, cap=cap)
    if jitter:
        rng = np.random.default_rng(jitter_seed)
        phases = rng.uniform(0, 2 * math.pi, z.shape)
        z = z + jitter * np.exp(1j * phases)
    grid = MarkedGrid(z, spec)
    map_ = fit_map(spec.d, [complex(v) for v in z[:, 0]])
    return ThurstonState(map_, grid, 0)


def fit_map(
    d: int,
    targets: Sequence[complex],
    warm: PolyExpMap | None = None,
    rtol: float = 1e-10,
) -> PolyExpMap:
    """Map whose singular values match the targets, order-matched.

    targets[0] is the asymptotic value p(0); the rest are critical values.
    Degrees 1 and 2 are closed-form (the d=2 square-root sign follows the
    warm start, principal on a tie); higher degrees run a damped Newton
    iteration on the coefficients and require a warm start.
    """
    targets = [complex(v) for v in targets]
    m = len(targets)
    if m < 1 or m > d:
        raise DomainError(f"need between 1 and {d} targets, got {m}")
    if d == 1:
        return PolyExpMap(1, [targets[0]])
    if d == 2:
        c = targets[0]
        vc = targets[1] if m == 2 else targets[0]
        # p = z^2 + b z + c has critical value c - b^2/4.
        b = 2 * cmath.sqrt(c - vc)
        if warm is not None and b != 0:
            bw = warm.coeffs[1]
            gap_pos, gap_neg = abs(b - bw), abs(-b - bw)
            if gap_neg < gap_pos:
                b = -b
            elif gap_neg == gap_pos:
                warnings.warn(
                    "square-root branch tie: warm start is equidistant from "
                    "both signs; keeping the principal branch",
                    stacklevel=2,
                )
        return PolyExpMap(2, [c, b])
    if warm is None:
        raise FitError(f"degree-{d} fitting needs a warm start")
    if m != d:
        raise FitError(f"degree-{d} fitting supports exactly d targets, got {m}")
    return _fit_newton(d, targets, warm, rtol)


def _singular_vector(map_: PolyExpMap, reference: Sequence[complex]) -> np.ndarray:
    """(asymptotic, critical values) with the critical values ordered to
    match the reference vector (continuity along the iteration)."""
    cps = list(critical_points(map_))
    cvs = [map_.poly(c) for c in cps]
    out = [map_.coeffs[0]]
    remaining = list(cvs)
    for ref in reference[1:]:
        k = min(range(len(remaining)), key=lambda idx: abs(remaining[idx] - ref))
        out.append(remaining.pop(k))
    return np.array(out, dtype=complex)


def _fit_newton(
    d: int, targets: Sequence[complex], warm: PolyExpMap, rtol: float
) -> PolyExpMap:
    target_vec = np.array(targets, dtype=complex)
    scale = max(1.0, float(np.abs(target_vec).max()))
    x = np.array(warm.coeffs, dtype=complex)

    def residual(coeffs: np.ndarray) -> np.ndarray:
        return _singular_vector(PolyExpMap(d, list(coeffs)), targets) - target_vec

    res = residual(x)
    for _ in range(80):
        if float(np.abs(res).max()) <= rtol * scale:
            return PolyExpMap(d, list(x))
        jac = np.zeros((d, d), dtype=complex)
        h = 1e-7 * scale
        for k in range(d):
            bumped = x.copy()
            bumped[k] += h
            jac[:, k] = (residual(bumped) - res) / h
        try:
            step_vec = np.linalg.solve(jac, res)
        except np.linalg.LinAlgError as exc:
            raise FitError(f"singular Jacobian in degree-{d} fit") from exc
        for damping in (1.0, 0.5, 0.25, 0.125, 0.0625):
            trial = x - damping * step_vec
            trial_res = residual(trial)
            if float(np.abs(trial_res).max()) < float(np.abs(res).max()):
                x, res = trial, trial_res
                break
        else:
            break
    worst = float(np.abs(res).max())
    if worst <= rtol * scale:
        return PolyExpMap(d, list(x))
    raise FitError(f"degree-{d} fit stalled at residual {worst:.3e}", residual=worst)


def pullback_step(
    state: ThurstonState, cap: float = config.CAP
) -> ThurstonState:
    """One pullback: lift every grid point one level back through the branch
    its address dictates, then refit the map to the new first column."""
    spec = state.grid.spec
    d = spec.d
    map_ = state.map
    cfg = state.tract_cfg
    if cfg is None:
        cfg = tracts.make_tract_config(map_)
    old = state.grid.z
    new = np.zeros_like(old)
    soft: list[str] = []
    for i in range(spec.m):
        addr = spec.address(i)
        for j in range(spec.depth + 1):
            seed = state.grid.tail_seed(i, cap=cap) if j == spec.depth else old[i, j + 1]
            if isinstance(seed, complex) or isinstance(seed, np.complexfloating):
                seed_c = complex(seed)
                if seed_c.real <= cfg.r_min:
                    raise InvariantViolationError(
                        f"grid point ({i},{j + 1}) fell left of the singular "
                        f"values (Re {seed_c.real:.3g} <= {cfg.r_min:.3g}); "
                        "marked points escaped the admissible region"
                    )
                if seed_c.real <= cfg.r:
                    soft.append(
                        f"({i},{j + 1}) in best-effort zone "
                        f"(Re {seed_c.real:.3g} <= r {cfg.r:.3g})"
                    )
                seed = seed_c
            try:
                new[i, j] = tracts.inverse_branch(map_, cfg, addr.entry(j), seed)
            except BranchSelectionError as exc:
                raise UnsupportedHomotopyError(
                    f"pullback of grid point ({i},{j}) found no branch in its "
                    "strip; the configuration would need nontrivial leg words, "
                    "which the strip-indexed shadow does not support"
                ) from exc
    delta = float(np.abs(new - old).max())
    new_map = fit_map(d, [complex(v) for v in new[:, 0]], warm=map_)
    next_state = ThurstonState(
        new_map,
        MarkedGrid(new, spec),
        state.iteration + 1,
        state.deltas + [delta],
        None,  # map changed; config is rebuilt lazily next step
        state.soft_flags + soft,
    )
    return next_state


@dataclass(frozen=True)
class OrbitCheck:
    orbit: int
    singular_value: complex
    potential: float
    potential_error: float
    prefix_match_length: int
    prefix_length: int
    residual: float
    escaped: bool


@dataclass(frozen=True)
class Certificate:
    """Forward-orbit verification of a classified map against its target."""

    passed: bool
    checks: tuple[OrbitCheck, ...]
    notes: tuple[str, ...] = ()


def verify(
    map_: PolyExpMap,
    spec: TargetSpec,
    potential_rtol: float = config.VERIFY_POTENTIAL_RTOL,
) -> Certificate:
    """Iterate each singular value forward and compare the extracted
    (potential, address prefix) against the target.  Independent of the
    pullback route: only forward evaluation and strip reads are used."""
    cfg = tracts.make_tract_config(map_)
    sv = _singular_vector(
        map_, [complex(t, 2 * math.pi * a.entry(0) / spec.d) for t, a in spec.orbits]
    )
    checks = []
    notes = []
    passed = True
    for i in range(spec.m):
        target_t = spec.potential(i)
        addr = spec.address(i)
        try:
            ext = rays.extract_potential_address(map_, cfg, complex(sv[i]))
        except NotEscapingError as exc:
            checks.append(
                OrbitCheck(i, complex(sv[i]), math.nan, math.inf, 0, 0, math.inf, False)
            )
            notes.append(f"orbit {i}: {exc}; orbit head: {list(exc.orbit)[:4]}")
            passed = False
            continue
        perr = abs(ext.t - target_t)
        match = 0
        for k, s in enumerate(ext.prefix):
            if s == addr.entry(ext.start + k):
                match += 1
            else:
                break
        ok = (
            perr < potential_rtol * max(1.0, target_t)
            and match == len(ext.prefix)
        )
        passed = passed and ok
        checks.append(
            OrbitCheck(
                i, complex(sv[i]), ext.t, perr, match, len(ext.prefix), ext.residual, True
            )
        )
        if not ok:
            notes.append(
                f"orbit {i}: potential error {perr:.3e}, prefix matched "
                f"{match}/{len(ext.prefix)}"
            )
    return Certificate(passed, tuple(checks), tuple(notes))


@dataclass
class ClassifyResult:
    map: PolyExpMap
    grid: MarkedGrid
    certificate: Certificate
    deltas: list[float]
    iterations: int
    converged: bool
    iterate_log: list[np.ndarray] = field(default_factory=list)
    soft_flags: list[str] = field(default_factory=list)


def classify(
    spec: TargetSpec,
    max_iter: int = config.CLASSIFY_MAX_ITER,
    tol: float = config.CLASSIFY_TOL,
    cap: float = config.CAP,
    log_iterates: bool = False,
    jitter: float = 0.0,
    jitter_seed: int = 0,
) -> ClassifyResult:
    """Iterate the pullback to its fixed point and certify the result.

    Raises NotConvergedError (with the delta history attached, so
    oscillation and slow contraction are distinguishable) when max_iter
    steps do not bring the sup-norm grid displacement under tol.
    """
    state = init_state(spec, cap=cap, jitter=jitter, jitter_seed=jitter_seed)
    iterate_log = [state.grid.z.copy()] if log_iterates else []
    converged = False
    for _ in range(max_iter):
        state = pullback_step(state, cap=cap)
        if log_iterates:
            iterate_log.append(state.grid.z.copy())
        if state.deltas[-1] < tol:
            converged = True
            break
    if not converged:
        raise NotConvergedError(
            f"pullback did not converge in {max_iter} iterations "
            f"(last delta {state.deltas[-1]:.3e})",
            details=state.deltas,
        )
    certificate = verify(state.map, spec)
    return ClassifyResult(
        state.map,
        state.grid,
        certificate,
        state.deltas,
        state.iteration,
        converged,
        iterate_log,
        state.soft_flags,
    )


@dataclass(frozen=True)
class InvariantReport:
    """Computable shadows of the invariant-region conditions at one state."""

    rho: float
    n_inside: tuple[int, ...]
    inside_disk: bool
    tail_asymptotics: bool
    separation: bool
    homotopy_budget: bool
    pullback_real_parts: bool
    derivative_domain: bool
    details: dict


def invariant_set_diagnostics(
    grid_z: np.ndarray,
    spec: TargetSpec,
    ladder: potentials.PotentialLadder | None = None,
    rho: float | None = None,
    constant_k: float = config.DERIVATIVE_K,
) -> InvariantReport:
    """Check the marked-grid shadow of the invariant-region conditions.

    (1) the first N_i+1 points of each orbit stay in the rho-disk; (2) the
    rest sit within 1/j of their straight asymptotic positions; (3) points
    inside the disk stay pairwise separated by pi/(2d*M^n) with M the
    log-scale derivative bound K*exp(d^3*t_n); (4) the homotopy budget is
    trivially respected (the shadow forbids nontrivial words).  Also checks
    that pullbacks of inside points keep Re < rho/2 and that points mapping
    into the marked disk keep Re < (d+1)*t_n.  Report only, never raises.
    """
    d = spec.d
    if ladder is None:
        ladder = potentials.build_ladder(spec.orbits, d, spec.depth)
    if rho is None:
        above = ladder.midpoints_above_threshold()
        if not above:
            above = ladder.midpoints or (2 * max(t for t, _ in spec.orbits),)
        rho = above[0]
    t_n = max((t for t in ladder.potentials if t < rho), default=rho / 2)

    m, levels = grid_z.shape
    n_inside = []
    for i in range(m):
        values = potentials.chain(d, spec.potential(i), max_len=levels)
        n_i = max((j for j, tj in enumerate(values) if tj < rho), default=-1)
        n_inside.append(n_i)

    cond_inside = all(
        abs(grid_z[i, j]) < rho
        for i in range(m)
        for j in range(n_inside[i] + 1)
    )
    straight = straight_grid(spec)
    cond_tail = all(
        abs(grid_z[i, j] - straight[i, j]) < (1.0 / j if j > 0 else math.inf)
        for i in range(m)
        for j in range(n_inside[i] + 1, levels)
    )
    # Separation in log scale: M^n with M = K e^{d^3 t_n} overflows floats.
    log_m_rho = math.log(constant_k) + d**3 * t_n
    cond_sep = True
    inside_pts = [
        (i, j) for i in range(m) for j in range(n_inside[i] + 1)
    ]
    for a in range(len(inside_pts)):
        for b in range(a + 1, len(inside_pts)):
            (i, j), (k, l) = inside_pts[a], inside_pts[b]
            n = min(n_inside[i] + 1 - j, n_inside[k] + 1 - l)
            gap = abs(grid_z[i, j] - grid_z[k, l])
            log_bound = math.log(math.pi / (2 * d)) - n * log_m_rho
            if gap <= 0 or math.log(gap) <= log_bound:
                cond_sep = False
    cond_budget = True  # strip-indexed pullbacks keep every leg word empty

    cond_pullback_re = all(
        grid_z[i, j].real < rho / 2
        for i in range(m)
        for j in range(n_inside[i] + 1)
    )
    disk_radius = max(
        abs(straight[i, min(n_inside[i] + 1, levels - 1)]) for i in range(m)
    ) + 1
    cond_deriv_domain = all(
        grid_z[i, j].real < (d + 1) * t_n
        for i in range(m)
        for j in range(levels - 1)
        if abs(grid_z[i, j + 1]) <= disk_radius
    )
    return InvariantReport(
        rho=rho,
        n_inside=tuple(n_inside),
        inside_disk=cond_inside,
        tail_asymptotics=cond_tail,
        separation=cond_sep,
        homotopy_budget=cond_budget,
        pullback_real_parts=cond_pullback_re,
        derivative_domain=cond_deriv_domain,
        details={"t_n": t_n, "log_derivative_bound": log_m_rho},
    )
