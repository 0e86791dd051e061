"""The map family under study: f(z) = p(exp(z)) with p monic of degree d.

Holds evaluation, derivatives and singular data, a simultaneous-iteration
polynomial root solver, and the disk/coefficient/derivative checkers that
probe how singular-value magnitudes control a map's geometry.  Checkers are
Monte-Carlo with explicit seeds; nothing here keeps mutable state.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import config
from .errors import DomainError, OverflowSignal, RootSolveError


@dataclass(frozen=True)
class PolyExpMap:
    """f = p o exp with p(w) = w^d + b_{d-1} w^{d-1} + ... + b_0.

    ``coeffs`` lists b_0 first; the monic leading term is implicit.
    """

    d: int
    coeffs: tuple[complex, ...]

    def __init__(self, d: int, coeffs: Sequence[complex]):
        if d < 1:
            raise DomainError(f"degree must be >= 1, got {d}")
        cs = tuple(complex(c) for c in coeffs)
        if len(cs) != d:
            raise DomainError(f"need {d} coefficients b_0..b_{d-1}, got {len(cs)}")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "coeffs", cs)

    def poly(self, w: complex) -> complex:
        value = complex(1.0)
        for b in reversed(self.coeffs):
            value = value * w + b
        return value

    def poly_derivative(self, w: complex) -> complex:
        value = complex(self.d)
        for k in range(self.d - 1, 0, -1):
            value = value * w + k * self.coeffs[k]
        return value

    def __call__(self, z: complex) -> complex:
        """Evaluate f(z); overflow of exp or of the polynomial raises."""
        z = complex(z)
        if self.d * z.real > config.EXP_ARG_LIMIT:
            raise OverflowSignal(f"exp overflow evaluating map at {z}")
        value = self.poly(cmath.exp(z))
        if not (math.isfinite(value.real) and math.isfinite(value.imag)):
            raise OverflowSignal(f"polynomial overflow evaluating map at {z}")
        return value

    def derivative(self, z: complex) -> complex:
        """f'(z) = p'(exp z) * exp z."""
        z = complex(z)
        if self.d * z.real > config.EXP_ARG_LIMIT:
            raise OverflowSignal(f"exp overflow in derivative at {z}")
        w = cmath.exp(z)
        value = self.poly_derivative(w) * w
        if not (math.isfinite(value.real) and math.isfinite(value.imag)):
            raise OverflowSignal(f"derivative overflow at {z}")
        return value

    def log_abs_derivative(self, z: complex) -> float:
        """log |f'(z)|, valid also where the value itself would overflow."""
        z = complex(z)
        if self.d * z.real <= config.EXP_ARG_LIMIT:
            v = self.derivative(z)
            if v == 0:
                return -math.inf
            return math.log(abs(v))
        # Deep right: p'(w) = d w^{d-1} (1 + lower order), corrections underflow.
        return math.log(self.d) + self.d * z.real

    def singular_data(self) -> "SingularData":
        return singular_values(self)


@dataclass(frozen=True)
class SingularData:
    """Critical values of p (with multiplicity) plus the asymptotic value p(0).

    ``all`` collapses the union to distinct members at a mild tolerance.
    """

    critical_values: tuple[complex, ...]
    asymptotic_value: complex
    all: tuple[complex, ...]

    def max_modulus(self) -> float:
        return max(abs(v) for v in self.all)

    def max_real(self) -> float:
        return max(v.real for v in self.all)


def _dedup(values: Sequence[complex], rtol: float = 1e-9) -> tuple[complex, ...]:
    out: list[complex] = []
    for v in sorted(values, key=lambda c: (c.real, c.imag)):
        if not any(abs(v - u) <= rtol * max(1.0, abs(u)) for u in out):
            out.append(v)
    return tuple(out)


def critical_points(map_: PolyExpMap) -> tuple[complex, ...]:
    """Roots of p', sorted by (re, im).  Empty for d = 1."""
    d = map_.d
    if d == 1:
        return ()
    # p'(w) = d w^{d-1} + (d-1) b_{d-1} w^{d-2} + ... + b_1
    high_to_low = [d] + [k * map_.coeffs[k] for k in range(d - 1, 0, -1)]
    roots = np.roots(np.asarray(high_to_low, dtype=complex))
    return tuple(sorted((complex(r) for r in roots), key=lambda c: (c.real, c.imag)))


def singular_values(map_: PolyExpMap) -> SingularData:
    """Critical values of the polynomial together with the asymptotic value."""
    cps = critical_points(map_)
    cvs = tuple(map_.poly(c) for c in cps)
    asym = map_.coeffs[0]
    return SingularData(cvs, asym, _dedup(cvs + (asym,)))


def _horner_batch(coeffs_high_to_low: np.ndarray, x: np.ndarray) -> np.ndarray:
    value = np.full_like(x, coeffs_high_to_low[0])
    for c in coeffs_high_to_low[1:]:
        value = value * x + c
    return value


def poly_roots_batch(
    coeffs: Sequence[complex],
    ws: np.ndarray,
    max_iter: int = config.ROOT_MAX_ITER,
    rtol: float = config.ROOT_ITER_RTOL,
) -> np.ndarray:
    """Solve p(z) = w simultaneously for a batch of right-hand sides.

    Ehrlich-Aberth iteration started on the d-th-root fan of each w (a fixed
    0.7-radian twist breaks the real-axis symmetry trap).  Returns an array
    of shape (len(ws), d); raises RootSolveError when some residual stays
    above the post tolerance after max_iter sweeps.
    """
    cs = tuple(complex(c) for c in coeffs)
    d = len(cs)
    ws = np.asarray(ws, dtype=complex).ravel()
    scale = np.maximum(1.0, np.abs(ws))
    if d == 1:
        return (ws - cs[0]).reshape(-1, 1)

    p_high_to_low = np.array((1.0,) + tuple(reversed(cs)), dtype=complex)
    dp_high_to_low = np.array(
        (d,) + tuple(k * cs[k] for k in range(d - 1, 0, -1)), dtype=complex
    )

    radius = np.maximum(np.abs(ws), 1.0 + max(abs(c) for c in cs)) ** (1.0 / d)
    angles = (np.angle(ws)[:, None] + 2 * np.pi * np.arange(d)[None, :] + 0.7) / d
    x = radius[:, None] * np.exp(1j * angles)

    wcol = ws[:, None]
    for _ in range(max_iter):
        pv = _horner_batch(p_high_to_low, x) - wcol
        if np.all(np.abs(pv) <= rtol * scale[:, None]):
            break
        dpv = _horner_batch(dp_high_to_low, x)
        dpv = np.where(dpv == 0, 1e-30, dpv)
        newton = pv / dpv
        diff = x[:, :, None] - x[:, None, :]
        np.einsum("bii->bi", diff)[...] = 1.0
        repulsion = (1.0 / diff).sum(axis=2) - 1.0
        denom = 1.0 - newton * repulsion
        denom = np.where(denom == 0, 1e-30, denom)
        corr = newton / denom
        x = x - corr
        if np.all(np.abs(corr) <= 4e-16 * (1.0 + np.abs(x))):
            pv = _horner_batch(p_high_to_low, x) - wcol
            break

    residual = np.abs(_horner_batch(p_high_to_low, x) - wcol)
    worst = float((residual / scale[:, None]).max())
    if worst > config.ROOT_POST_RTOL:
        raise RootSolveError(
            f"root iteration stalled, worst relative residual {worst:.3e}",
            worst_residual=worst,
        )
    return x


def poly_roots(coeffs: Sequence[complex], w: complex) -> tuple[complex, ...]:
    """The d solutions of p(z) = w, complete with multiplicity."""
    roots = poly_roots_batch(coeffs, np.array([w], dtype=complex))[0]
    return tuple(sorted((complex(r) for r in roots), key=lambda c: (c.real, c.imag)))


@dataclass(frozen=True)
class BoundReport:
    """Outcome of a bound checker: the measured ratio(s) against a constant."""

    holds: bool
    ratio: float
    detail: tuple = ()


def check_critical_point_bound(
    map_: PolyExpMap,
    rho: float,
    constant: float = config.CRITICAL_POINT_M,
    normalize: bool = False,
) -> BoundReport:
    """Measure max |critical point| / rho^(1/d) against the configured constant.

    Requires d > 1, p(0) = 0 (pass normalize=True to conjugate by the root of
    p nearest 0 first) and all critical values of p inside the rho-disk;
    violations of the preconditions raise.
    """
    if map_.d < 2:
        return BoundReport(True, 0.0)
    if normalize:
        roots = poly_roots(map_.coeffs, 0.0)
        shift = min(roots, key=abs)
        map_ = translate_argument(map_, shift)
    elif abs(map_.poly(0.0)) > 1e-12:
        raise DomainError("checker needs p(0) = 0; pass normalize=True to shift")
    cps = critical_points(map_)
    cvs = [map_.poly(c) for c in cps]
    if any(abs(v) > rho for v in cvs):
        raise DomainError("critical values are not inside the rho-disk")
    ratio = max(abs(c) for c in cps) / rho ** (1.0 / map_.d)
    return BoundReport(ratio <= constant, ratio, tuple(cps))


def translate_argument(map_: PolyExpMap, shift: complex) -> PolyExpMap:
    """The map with polynomial q(z) = p(z + shift) (same degree, monic)."""
    d = map_.d
    coeffs_high_to_low = [1.0 + 0j] + [map_.coeffs[k] for k in range(d - 1, -1, -1)]
    # Horner-style expansion of p(z + shift).
    acc = [coeffs_high_to_low[0]]
    for c in coeffs_high_to_low[1:]:
        nxt = [acc[0]]
        for k in range(1, len(acc)):
            nxt.append(acc[k] + shift * acc[k - 1])
        nxt.append(acc[-1] * shift + c)
        acc = nxt
    low_to_high = list(reversed(acc))  # q_0, q_1, ..., q_d with q_d = 1
    return PolyExpMap(d, low_to_high[:d])


def check_coefficient_bound(
    map_: PolyExpMap, rho: float, constant: float = config.COEFFICIENT_L
) -> BoundReport:
    """Per-coefficient ratios |b_k| / rho^((d-k)/d) against the constant."""
    d = map_.d
    ratios = tuple(
        abs(map_.coeffs[k]) / rho ** ((d - k) / d) for k in range(d)
    )
    return BoundReport(all(r <= constant for r in ratios), max(ratios), ratios)


@dataclass(frozen=True)
class ContainmentReport:
    holds: bool
    part1: bool
    part2: bool
    inconclusive: bool
    samples: int


def check_disk_containment(
    map_: PolyExpMap, rho: float, r: float, samples: int = 360
) -> ContainmentReport:
    """Sampled containment of polynomial preimages of disks.

    Part 1: roots of p(z) = w stay inside |z| < r for w on the circle
    |w| = r (meaningful for r >= rho).  Part 2: |p(z)| < rho^(2d+1) on
    |z| = rho^2, so the rho^2-disk maps into the rho^(2d+1)-disk.  The
    checker reports; it never asserts its preconditions.
    """
    angles = 2 * np.pi * np.arange(samples) / samples
    circle = np.exp(1j * angles)
    try:
        roots = poly_roots_batch(map_.coeffs, r * circle)
    except RootSolveError:
        return ContainmentReport(False, False, False, True, samples)
    part1 = bool(np.all(np.abs(roots) < r))

    target = rho ** (2 * map_.d + 1)
    zs = rho**2 * circle
    high_to_low = np.array(
        (1.0,) + tuple(reversed(map_.coeffs)), dtype=complex
    )
    values = _horner_batch(high_to_low, zs)
    part2 = bool(np.all(np.abs(values) < target))
    return ContainmentReport(part1 and part2, part1, part2, False, samples)


@dataclass(frozen=True)
class DerivativeSupReport:
    """Log-scale comparison of the sampled sup of |f'| with K*exp(d^3*t)."""

    log_formula_bound: float
    log_empirical: float
    holds: bool
    d: int
    t: float


def sup_derivative_bound(
    d: int,
    t: float,
    rho: float,
    seed: int = 0,
    map_samples: int = 32,
    z_samples: int = 256,
    constant: float = config.DERIVATIVE_K,
) -> DerivativeSupReport:
    """Sample sup |f'(z)| over maps with singular values in the rho-disk and
    Re z < (d+1)t, in log scale, against log K + d^3 t.

    The formula bound is meaningful for d >= 2; for d = 1 the sampled
    supremum itself (which scales like exp(2t)) is still reported but the
    holds flag compares against exp(2t) scaling instead.
    """
    rng = np.random.default_rng(seed)
    x_line = (d + 1) * t
    log_emp = -math.inf
    for _ in range(map_samples):
        map_ = sample_map_with_singular_values_in(d, rho, rng)
        # Maximum principle: the sup over the half-plane sits on the
        # boundary line; sample it plus a few interior points.
        ys = rng.uniform(-math.pi, math.pi, z_samples)
        xs = np.concatenate(
            [np.full(z_samples // 2, x_line), rng.uniform(0, x_line, z_samples - z_samples // 2)]
        )
        for x, y in zip(xs, ys):
            log_emp = max(log_emp, map_.log_abs_derivative(complex(x, y)))
    if d >= 2:
        log_formula = math.log(constant) + d**3 * t
    else:
        log_formula = math.log(constant) + 2 * t
    return DerivativeSupReport(log_formula, log_emp, log_emp <= log_formula, d, t)


@dataclass(frozen=True)
class AppendixReport:
    """Monte-Carlo summary of the disk/coefficient/critical-point checkers."""

    d: int
    rho: float
    samples: int
    seed: int
    max_critical_point_ratio: float
    max_coefficient_ratio: float
    containment_maps: int
    containment_failures: int
    worst_case: dict


def appendix_report(
    d: int,
    rho: float,
    samples: int = 1000,
    seed: int = 0,
    containment_maps: int | None = None,
    containment_samples: int = 360,
    threads: int = 1,
) -> AppendixReport:
    """Sampled bounds: critical points of normalized polynomials with
    critical values in the rho-disk, coefficient ratios of maps with
    singular values in the rho-disk, and preimage containment for r = rho.

    Per-sample RNG streams are seeded by (seed, index), so results are
    byte-identical for a fixed seed regardless of sharding.
    """
    if containment_maps is None:
        containment_maps = min(samples, 200)

    def one_sample(idx: int):
        rng = np.random.default_rng((seed, idx))
        poly = sample_poly_with_critical_values_in(d, rho, rng)
        ratio = check_critical_point_bound(poly, rho, constant=math.inf).ratio
        map_ = sample_map_with_singular_values_in(d, rho, rng)
        coeff = check_coefficient_bound(map_, rho).ratio
        contain = None
        if idx < containment_maps:
            contain = check_disk_containment(
                map_, rho, rho, samples=containment_samples
            )
        return ratio, coeff, contain

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one_sample, range(samples)))
    else:
        results = [one_sample(i) for i in range(samples)]

    ratios = [r for r, _, _ in results]
    coeffs = [c for _, c, _ in results]
    failures = sum(
        1 for _, _, rep in results if rep is not None and not rep.part1
    )
    worst_idx = int(np.argmax(ratios))
    return AppendixReport(
        d=d,
        rho=rho,
        samples=samples,
        seed=seed,
        max_critical_point_ratio=float(max(ratios)),
        max_coefficient_ratio=float(max(coeffs)),
        containment_maps=containment_maps,
        containment_failures=failures,
        worst_case={"sample_index": worst_idx, "ratio": float(ratios[worst_idx])},
    )


def sample_poly_with_critical_values_in(
    d: int, rho: float, rng: np.random.Generator
) -> PolyExpMap:
    """Random monic p with p(0) = 0 and critical values scaled into the
    rho-disk (max modulus placed uniformly in [0.3, 1]*rho)."""
    if d < 2:
        raise DomainError("needs d >= 2")
    cps = rng.standard_normal(d - 1) + 1j * rng.standard_normal(d - 1)
    dp = d * np.poly(cps)  # p' coefficients, highest first
    # integrate with zero constant term
    p_high_to_low = np.concatenate([dp / np.arange(d, 0, -1), [0.0]])
    cvs = _horner_batch(p_high_to_low, cps)
    peak = float(np.abs(cvs).max())
    if peak == 0.0:
        return PolyExpMap(d, [0.0] * d)
    target = rho * rng.uniform(0.3, 1.0)
    # q(z) = a^-d p(a z) scales critical values by a^-d and points by 1/a.
    a = (peak / target) ** (1.0 / d)
    coeffs_low_to_high = [
        complex(p_high_to_low[d - k]) * a ** (k - d) for k in range(d)
    ]
    return PolyExpMap(d, coeffs_low_to_high)


def sample_map_with_singular_values_in(
    d: int, rho: float, rng: np.random.Generator
) -> PolyExpMap:
    """Random map whose singular values (critical values of p and p(0)) are
    scaled into the rho-disk."""
    if d == 1:
        kappa = rho * rng.uniform(0, 1) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        return PolyExpMap(1, [complex(kappa)])
    base = sample_poly_with_critical_values_in(d, rho, rng)
    c = rho / 2 * rng.uniform(0, 1) * np.exp(1j * rng.uniform(0, 2 * np.pi))
    coeffs = list(base.coeffs)
    coeffs[0] = coeffs[0] + complex(c)
    shifted = PolyExpMap(d, coeffs)
    peak = shifted.singular_data().max_modulus()
    if peak <= rho or peak == 0.0:
        return shifted
    a = (peak / (0.95 * rho)) ** (1.0 / d)
    rescaled = [shifted.coeffs[k] * a ** (k - d) for k in range(d)]
    return PolyExpMap(d, rescaled)
