"""Theorem-level experiments: differentiability, the Siu-type sandwich,
orthogonality of envelopes, Dirac Monge-Ampere solutions, and Fekete
point equidistribution.

Every experiment is deterministic given its configuration (and seed, for
the Fekete local search); all intermediate quantities are exact rationals.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

from .metrics import (
    Metric,
    MetricError,
    common_tree,
    envelope,
    equilibrium_metric,
    integrate_against,
    is_psh,
    ma_measure,
)
from .sections import vandermonde_value
from .tree import DiscreteMeasure, PLFunction, SkeletonTree, TreePoint, refine
from .volumes import ExtrapolationReport, vol_limit


class ExperimentError(Exception):
    pass


def _add_direction(phi: Metric, f: PLFunction, t: Fraction) -> Metric:
    tree = refine(phi.tree, f.tree.vertices)
    g = phi.g.on_tree(tree)
    ft = f.on_tree(tree)
    vals = {v: g.values[v] + Fraction(t) * ft.values[v] for v in tree.vertices}
    return Metric(phi.d, PLFunction(tree, vals))


@dataclass
class DiffLeg:
    t: Fraction
    report: ExtrapolationReport


@dataclass
class DiffReport:
    target: Fraction
    legs: List[DiffLeg]
    derivatives: List[Tuple[Fraction, Fraction, Fraction]]  # (|t|, estimate, bound)

    def worst_gap(self) -> Fraction:
        return max(abs(est - self.target) for _, est, _ in self.derivatives)


def diff_experiment(
    phi: Metric,
    f: PLFunction,
    t_grid: Sequence[Fraction],
    m_range: Iterable[int],
    window: int = 8,
    workers: int = 1,
) -> DiffReport:
    """Symmetric finite differences of t -> vol(L, phi + t f, phi)."""
    if not is_psh(phi):
        raise ExperimentError("base metric must be psh")
    ts = sorted({abs(Fraction(t)) for t in t_grid if t != 0})
    target = integrate_against(phi, f)
    legs: List[DiffLeg] = []
    derivs: List[Tuple[Fraction, Fraction, Fraction]] = []
    ms = list(m_range)
    for t in ts:
        rep_p = vol_limit(_add_direction(phi, f, t), phi, ms, window, workers)
        rep_m = vol_limit(_add_direction(phi, f, -t), phi, ms, window, workers)
        legs.extend([DiffLeg(t, rep_p), DiffLeg(-t, rep_m)])
        est = (rep_p.estimate - rep_m.estimate) / (2 * t)
        bound = (rep_p.error_bound + rep_m.error_bound) / (2 * t)
        derivs.append((t, est, bound))
    return DiffReport(target, legs, derivs)


@dataclass
class SandwichReport:
    lower: Fraction
    middle: Fraction
    upper: Fraction
    vol_bound: Fraction

    def holds(self) -> bool:
        return (
            self.lower - self.vol_bound <= self.middle <= self.upper + self.vol_bound
        )


def sandwich_check(
    phi: Metric,
    psi1: Metric,
    psi2: Metric,
    m_range: Iterable[int],
    window: int = 8,
    workers: int = 1,
) -> SandwichReport:
    """Siu-type bound: with f = psi1 - psi2 on O(e) and C = e,
    C inf f <= int f d(MA(phi) + MA(psi1)) - vol(L, phi + f, phi) <= C sup f."""
    if psi1.d != psi2.d:
        raise ExperimentError("auxiliary metrics live on different bundles")
    if not (is_psh(phi) and is_psh(psi1) and is_psh(psi2)):
        raise ExperimentError("all inputs must be psh")
    e = psi1.d
    f = psi1.g - psi2.g
    mixed = ma_measure(phi).add(ma_measure(psi1))
    pairing = mixed.integrate(f)
    rep = vol_limit(_add_direction(phi, f, Fraction(1)), phi, list(m_range), window, workers)
    middle = pairing - rep.estimate
    return SandwichReport(e * f.min_value(), middle, e * f.max_value(), rep.error_bound)


def orthogonality_experiment(phi: Metric) -> Fraction:
    """Exact residual int (phi - env(phi)) d MA(env(phi)); contract: zero."""
    env = envelope(phi)
    diff = phi.g - env.g
    return ma_measure(env).integrate(diff)


@dataclass
class DiracReport:
    point: TreePoint
    metric: Metric
    measure: DiscreteMeasure

    def is_dirac(self) -> bool:
        return self.measure.masses == {self.point: Fraction(self.metric.d)}


def dirac_experiment(x: TreePoint, phi: Metric) -> DiracReport:
    """Monge-Ampere measure of the equilibrium metric of a point."""
    eq = equilibrium_metric(x, phi)
    return DiracReport(x, eq, ma_measure(eq))


@dataclass
class FeketeReport:
    m: int
    n_points: int
    best_configs: List[Tuple[Fraction, ...]]
    best_valuation: Fraction
    empirical: DiscreteMeasure
    target: DiscreteMeasure
    tv_distance: Fraction
    exhaustive: bool


def _config_key(pts: Sequence[Fraction]) -> Tuple[Fraction, ...]:
    return tuple(sorted(pts))


def fekete_experiment(
    phi: Metric,
    m: int,
    pool: Sequence[Fraction],
    reference_tree: Optional[SkeletonTree] = None,
    exhaustive_limit: int = 200_000,
    search_budget: int = 2_000,
    seed: int = 0,
) -> FeketeReport:
    """Best Vandermonde configuration from a pool of rational points.

    Maximizes the metrized determinant, i.e. minimizes its valuation.
    Exhaustive below `exhaustive_limit` subsets; otherwise a seeded
    greedy-swap local search.  Ties break lexicographically on the
    sorted point tuple.
    """
    if not is_psh(phi):
        raise ExperimentError("Fekete experiment needs a psh metric")
    N = m * phi.d + 1
    pool = [Fraction(x) for x in pool]
    if len(set(pool)) != len(pool):
        raise ExperimentError("pool contains repeated points")
    if len(pool) < N:
        raise ExperimentError(f"pool of {len(pool)} points cannot host {N}-tuples")

    def value(cfg: Sequence[Fraction]) -> Fraction:
        return vandermonde_value(list(cfg), phi, m)

    n_subsets = 1
    for i in range(N):
        n_subsets = n_subsets * (len(pool) - i) // (i + 1)
    exhaustive = n_subsets <= exhaustive_limit
    best_val = None
    best: List[Tuple[Fraction, ...]] = []
    if exhaustive:
        for cfg in itertools.combinations(sorted(pool), N):
            v = value(cfg)
            if best_val is None or v < best_val:
                best_val, best = v, [_config_key(cfg)]
            elif v == best_val:
                best.append(_config_key(cfg))
    else:
        rng = random.Random(seed)
        current = rng.sample(pool, N)
        best_val = value(current)
        best = [_config_key(current)]
        for _ in range(search_budget):
            improved = False
            outside = [x for x in pool if x not in current]
            for i in range(N):
                for cand in outside:
                    trial = current[:i] + [cand] + current[i + 1 :]
                    v = value(trial)
                    if v < best_val or (v == best_val and _config_key(trial) < best[0]):
                        current = trial
                        best_val, best = v, [_config_key(trial)]
                        improved = True
                        break
                if improved:
                    break
            if not improved:
                break
    best.sort()
    winner = best[0]

    ref = reference_tree if reference_tree is not None else phi.tree
    emp: dict = {}
    for x in winner:
        r = ref.retract(x, None)
        emp[r] = emp.get(r, Fraction(0)) + Fraction(1, N)
    empirical = DiscreteMeasure(emp)
    target = ma_measure(phi).scale(Fraction(1, phi.d))
    return FeketeReport(
        m, N, best, best_val, empirical, target, empirical.tv_distance(target), exhaustive
    )
