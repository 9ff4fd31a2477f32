"""Asymptotics of relative volumes and the Riemann-Roch slope experiment.

The finite-level volumes vol_m are exact rationals; the limit is read off
an exact least-squares affine fit of vol_m / m^2 against 1/m over the
largest window of m-values.  The reported error bound is twice the
largest fit residual, a conservative empirical figure (no convergence
rate is assumed).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, List, Optional, Tuple

from .field import FieldContext
from .metrics import Metric, envelope, energy, integrate_against, is_psh, ma_measure
from .sections import (
    SectionError,
    required_ramification,
    sup_norm_lattice,
    vol_m,
    _single_center,
    diagonal_weights,
)
from .tree import PLFunction, refine


class VolumeError(Exception):
    pass


DEFAULT_WINDOW = 8


def affine_fit(xs: List[Fraction], ys: List[Fraction]) -> Tuple[Fraction, Fraction]:
    """Exact least-squares fit y = a + b x; returns (a, b)."""
    n = len(xs)
    sx = sum(xs, Fraction(0))
    sy = sum(ys, Fraction(0))
    sxx = sum((x * x for x in xs), Fraction(0))
    sxy = sum((x * y for x, y in zip(xs, ys)), Fraction(0))
    det = n * sxx - sx * sx
    if det == 0:
        raise VolumeError("degenerate fit abscissae")
    b = (n * sxy - sx * sy) / det
    a = (sy - b * sx) / n
    return a, b


@dataclass
class ExtrapolationReport:
    estimate: Fraction
    slope: Fraction
    samples: List[Tuple[int, Fraction]]
    window: List[int]
    residuals: List[Tuple[int, Fraction]]
    error_bound: Fraction

    def normalized(self) -> List[Tuple[int, Fraction]]:
        return [(m, v / (m * m)) for m, v in self.samples]


def _compute_series(fn, ms: List[int], workers: int = 1) -> List[Tuple[int, Fraction]]:
    ms = sorted(set(ms))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            vals = list(ex.map(fn, ms))
    else:
        vals = [fn(m) for m in ms]
    return list(zip(ms, vals))


def vol_limit(
    phi: Metric,
    psi: Metric,
    m_range: Iterable[int],
    window: int = DEFAULT_WINDOW,
    workers: int = 1,
) -> ExtrapolationReport:
    """Extrapolated vol(L, phi, psi) from exact finite-level volumes."""
    if phi.d != psi.d:
        raise VolumeError("metrics live on different line bundles")
    if phi.d == 0:
        samples = [(m, Fraction(0)) for m in sorted(set(m_range))]
        return ExtrapolationReport(
            Fraction(0), Fraction(0), samples, [m for m, _ in samples],
            [(m, Fraction(0)) for m, _ in samples], Fraction(0),
        )
    samples = _compute_series(lambda m: vol_m(phi, psi, m), list(m_range), workers)
    tail = samples[-window:]
    if len(tail) < 4:
        raise VolumeError(f"window of {len(tail)} samples is too small (need >= 4)")
    xs = [Fraction(1, m) for m, _ in tail]
    ys = [v / (m * m) for m, v in tail]
    a, b = affine_fit(xs, ys)
    residuals = [(m, y - (a + b * x)) for (m, _), x, y in zip(tail, xs, ys)]
    bound = 2 * max((abs(r) for _, r in residuals), default=Fraction(0))
    return ExtrapolationReport(a, b, samples, [m for m, _ in tail], residuals, bound)


@dataclass
class VolEnergyReport:
    volume: ExtrapolationReport
    energy: Fraction
    gap: Fraction

    def within_bound(self) -> bool:
        return abs(self.gap) <= self.volume.error_bound


def check_vol_equals_energy(
    phi: Metric, psi: Metric, m_range: Iterable[int], window: int = DEFAULT_WINDOW,
    workers: int = 1,
) -> VolEnergyReport:
    """Compare vol(L, phi, psi) against E(env(phi), env(psi))."""
    rep = vol_limit(phi, psi, m_range, window, workers)
    e = energy(envelope(phi), envelope(psi)).value
    return VolEnergyReport(rep, e, rep.estimate - e)


def rr_content(phi_D: PLFunction, phi_A: Metric, m: int) -> Fraction:
    """Content of the level-m restriction to the vertical divisor of phi_D.

    Computed as the content of the quotient of the unit ball of the
    level-m sup norm of phi_A by the sublattice of sections s with
    pointwise valuation of |s| e^{-m phi_A} at least phi_D everywhere.
    """
    if any(v < 0 for v in phi_D.values.values()):
        raise VolumeError("divisor function must be nonnegative (effectivity)")
    if not is_psh(phi_A):
        raise VolumeError("ample-side metric must be psh")
    shrink = phi_D.scale(Fraction(-1))
    tree = refine(phi_A.tree, phi_D.tree.vertices)
    phi_r = phi_A.on_tree(tree)
    shrink_r = shrink.on_tree(tree)
    if _single_center(phi_r) is not None:
        outer = diagonal_weights(phi_r, m)
        inner = diagonal_weights(phi_r, m, extra=shrink_r)
        return sum(outer, Fraction(0)) - sum(inner, Fraction(0))
    M = math.lcm(
        required_ramification(phi_r, m), required_ramification(phi_r, m, extra=shrink_r)
    )
    ctx = FieldContext(phi_r.p, M)
    outer_lat = sup_norm_lattice(phi_r, m, ctx)
    inner_lat = sup_norm_lattice(phi_r, m, ctx, extra=shrink_r)
    return inner_lat.det_valuation() - outer_lat.det_valuation()


@dataclass
class RRReport:
    samples: List[Tuple[int, Fraction]]
    slope_estimate: Fraction
    target: Fraction
    residuals: List[Tuple[int, Fraction]]
    error_bound: Fraction
    window: List[int]

    @property
    def gap(self) -> Fraction:
        return self.slope_estimate - self.target


def rr_slope_experiment(
    phi_D: PLFunction,
    phi_A: Metric,
    m_range: Iterable[int],
    window: int = DEFAULT_WINDOW,
    workers: int = 1,
) -> RRReport:
    """Fit rr_content(m)/m against 1/m; the intercept should approach
    the pairing of phi_D with the Monge-Ampere measure of phi_A."""
    samples = _compute_series(lambda m: rr_content(phi_D, phi_A, m), list(m_range), workers)
    tail = samples[-window:]
    if len(tail) < 4:
        raise VolumeError(f"window of {len(tail)} samples is too small (need >= 4)")
    xs = [Fraction(1, m) for m, _ in tail]
    ys = [v / m for m, v in tail]
    a, b = affine_fit(xs, ys)
    residuals = [(m, y - (a + b * x)) for (m, _), x, y in zip(tail, xs, ys)]
    bound = 2 * max((abs(r) for _, r in residuals), default=Fraction(0))
    target = ma_measure(phi_A).integrate(phi_D)
    return RRReport(samples, a, target, residuals, bound, [m for m, _ in tail])
