"""Desk-scale studies: triangle histograms (exact or Monte Carlo), the
Poisson shape check, finite-n bound sandwich tables, the coagulation
statistic and the lemma suite over sampled graphs.

Monte Carlo work is split into fixed-size chunks, chunk ``c`` drawing from
``SeedSequence(seed).spawn(...)[c]``.  Chunking does not depend on the
worker count, so results are identical for any ``threads``.
"""

from __future__ import annotations

import logging
import math
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

import numpy as np
from scipy import stats

from .bounds import BoundQuery, theorem_ratios
from .census import (
    census,
    occupancy_violations,
    product_vi_holds,
    sparse_triangle_stats,
    triang_sandwich,
    triangle_stats,
)
from .constructions import as_fraction
from .ensembles import (
    ENUMERATION_CAP,
    EnsembleSpec,
    enumerate_graphs,
    enumeration_prefixes,
    enumeration_size,
    sample,
    sample_arrays,
)
from .errors import CapacityError, SpecError
from .graphs import validate

log = logging.getLogger(__name__)

CHUNK = 500
TV_TAIL = 10
MIN_ACCEPTANCE = 1e-6


def default_threads() -> int:
    env = os.environ.get("TDL_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _run(fn: Callable, jobs: list, threads: int | None) -> list:
    """Map ``fn`` over ``jobs`` preserving order, in processes when threads > 1."""
    threads = default_threads() if threads is None else threads
    if threads <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=min(threads, len(jobs))) as pool:
        return list(pool.map(fn, jobs))


def _chunks(samples: int, seed) -> list[tuple[int, np.random.SeedSequence]]:
    n_chunks = max(1, math.ceil(samples / CHUNK))
    children = np.random.SeedSequence(seed).spawn(n_chunks)
    sizes = [min(CHUNK, samples - c * CHUNK) for c in range(n_chunks)]
    return [(s, ch) for s, ch in zip(sizes, children) if s > 0]


def _mc_stats_chunk(job) -> list[tuple[int, int]]:
    spec, size, child = job
    rng = np.random.default_rng(child)
    return [sparse_triangle_stats(spec.n, *sample_arrays(spec, rng)) for _ in range(size)]


def mc_triangle_stats(spec: EnsembleSpec, samples: int, seed, threads: int | None = None) -> list[tuple[int, int]]:
    """``(t, max link occupancy)`` for ``samples`` independent uniform draws."""
    jobs = [(spec, size, child) for size, child in _chunks(samples, seed)]
    out: list[tuple[int, int]] = []
    for part in _run(_mc_stats_chunk, jobs, threads):
        out.extend(part)
    return out


def _exact_stats_block(job) -> Counter:
    spec, prefix, cap = job
    tally: Counter = Counter()
    for g in enumerate_graphs(spec, cap=cap, prefix=prefix):
        tally[triangle_stats(g)] += 1
    return tally


def exact_triangle_stats(spec: EnsembleSpec, cap: int = ENUMERATION_CAP, threads: int | None = None) -> Counter:
    """Counter of ``(t, max link occupancy)`` over every graph of the model."""
    need = enumeration_size(spec)
    if need > cap:
        raise CapacityError(
            f"exact mode needs {need} enumeration steps (cap {cap}); use Monte Carlo mode instead",
            constraint="enumeration cap",
            required=need,
        )
    jobs = [(spec, p, cap) for p in enumeration_prefixes(spec)]
    total: Counter = Counter()
    for part in _run(_exact_stats_block, jobs, threads):
        total.update(part)
    return total


# --------------------------------------------------------------------------
# histograms


@dataclass
class HistogramResult:
    spec: EnsembleSpec
    mode: str
    counts: dict[int, int | float]
    mean: float
    variance: float
    samples: int | None = None
    seed: int | None = None
    total: int = 0

    def to_json(self) -> dict:
        return {
            "model": self.spec.model,
            "n": self.spec.n,
            "k": self.spec.k,
            "mode": self.mode,
            "samples": self.samples,
            "seed": self.seed,
            "total": self.total,
            "mean": self.mean,
            "variance": self.variance,
            "counts": {str(t): c for t, c in sorted(self.counts.items())},
        }

    def csv_rows(self) -> list[dict]:
        key = "count" if self.mode == "exact" else "frequency"
        return [{"t": t, key: c} for t, c in sorted(self.counts.items())]


def _moments(tally: Counter) -> tuple[float, float]:
    total = sum(tally.values())
    if not total:
        return math.nan, math.nan
    mean = Fraction(sum(t * c for t, c in tally.items()), total)
    var = Fraction(sum(t * t * c for t, c in tally.items()), total) - mean * mean
    return float(mean), float(var)


def triangle_histogram(
    spec: EnsembleSpec,
    mode: str = "exact",
    samples: int = 10_000,
    seed=0,
    cap: int = ENUMERATION_CAP,
    threads: int | None = None,
) -> HistogramResult:
    """Distribution of the triangle count ``t`` over the model.

    ``exact`` censuses every enumerated graph and reports integer graph
    counts; ``mc`` reports frequencies over ``samples`` uniform draws.
    """
    if mode == "exact":
        tally: Counter = Counter()
        for (t, _), c in exact_triangle_stats(spec, cap=cap, threads=threads).items():
            tally[t] += c
        mean, var = _moments(tally)
        return HistogramResult(spec, "exact", dict(sorted(tally.items())), mean, var, total=sum(tally.values()))
    if mode != "mc":
        raise SpecError(f"unknown mode {mode!r}; expected 'exact' or 'mc'")
    if samples < 1:
        raise SpecError("Monte Carlo mode needs samples >= 1")
    tally = Counter(t for t, _ in mc_triangle_stats(spec, samples, seed, threads))
    mean, var = _moments(tally)
    freqs = {t: c / samples for t, c in sorted(tally.items())}
    return HistogramResult(spec, "mc", freqs, mean, var, samples=samples, seed=seed, total=samples)


def tv_distance(p: dict[int, float], q: dict[int, float]) -> float:
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(x, 0.0) - q.get(x, 0.0)) for x in keys)


# --------------------------------------------------------------------------
# Poisson shape


@dataclass
class LadderPoint:
    n: int
    mean: float
    stderr: float
    samples: int


@dataclass
class PoissonComparison:
    histogram: HistogramResult
    lambda_hat: float
    tv_distance: float
    truncation: int
    ladder: list[LadderPoint] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "histogram": self.histogram.to_json(),
            "lambda_hat": self.lambda_hat,
            "tv_distance": self.tv_distance,
            "truncation": self.truncation,
            "ladder": [vars(p) for p in self.ladder],
        }

    def csv_rows(self) -> list[dict]:
        pmf = stats.poisson.pmf(np.arange(self.truncation + 1), self.lambda_hat)
        return [
            {"t": t, "empirical": self.histogram.counts.get(t, 0.0), "poisson": float(pmf[t])}
            for t in range(self.truncation + 1)
        ]


def poisson_check(
    spec: EnsembleSpec,
    samples: int,
    seed: int,
    ladder: Iterable[int] = (),
    threads: int | None = None,
) -> PoissonComparison:
    """Compare the MC triangle histogram with Poisson(empirical mean).

    The reference pmf is truncated at ``max observed t + 10``; its mass
    beyond that point is not counted.  ``ladder`` lists extra node counts
    whose MC means are reported to show how the mean moves with n.
    """
    hist = triangle_histogram(spec, mode="mc", samples=samples, seed=seed, threads=threads)
    lam = hist.mean
    top = max(hist.counts) + TV_TAIL
    pmf = stats.poisson.pmf(np.arange(top + 1), lam)
    tv = tv_distance(hist.counts, {t: float(pmf[t]) for t in range(top + 1)})
    points = []
    for n in ladder:
        # each other rung gets its own stream keyed by (seed, n)
        h = hist if n == spec.n else triangle_histogram(spec.with_n(n), "mc", samples, (seed, n), threads=threads)
        points.append(LadderPoint(n, h.mean, math.sqrt(h.variance / samples), samples))
    return PoissonComparison(hist, lam, min(1.0, tv), top, points)


# --------------------------------------------------------------------------
# bound sandwich


@dataclass
class SandwichRow:
    n: int
    t: int
    class_size: int
    total: int
    numerator: float | None
    denominator: float
    empirical_ratio: float | None
    lower_ratio: float | None
    upper_ratio: float | None
    empty_class: bool

    def to_json(self) -> dict:
        return dict(vars(self))


def sandwich_table(
    model: str, n_list: Iterable[int], k: int, alpha, cap: int = ENUMERATION_CAP, threads: int | None = None
) -> list[SandwichRow]:
    """Finite-n log-cardinality ratios next to the asymptotic bounds.

    Row n conditions on ``t = floor(alpha * n)`` triangles.  The ratios are
    reported, not compared with the bounds (those are limit statements).
    """
    a = as_fraction(alpha)
    rep = theorem_ratios(BoundQuery(model, k, a)) if k >= 1 and (model != "k-regular" or k >= 2) else None
    rows = []
    for n in n_list:
        spec = EnsembleSpec(model, n, k)
        t = math.floor(a * n)
        hist = triangle_histogram(spec, "exact", cap=cap, threads=threads)
        size = int(hist.counts.get(t, 0))
        total = hist.total
        den = math.log(total)
        num = math.log(size) if size else None
        ratio = num / den if num is not None and den > 0 else None
        rows.append(
            SandwichRow(
                n=n,
                t=t,
                class_size=size,
                total=total,
                numerator=num,
                denominator=den,
                empirical_ratio=ratio,
                lower_ratio=None if rep is None or rep.lower_ratio is None else float(rep.lower_ratio),
                upper_ratio=None if rep is None or rep.upper_ratio is None else float(rep.upper_ratio),
                empty_class=size == 0,
            )
        )
    return rows


# --------------------------------------------------------------------------
# coagulation


@dataclass
class CoagulationStat:
    spec: EnsembleSpec
    t_condition: int | None
    mode: str
    graphs: int
    sharing: int
    share_fraction: float
    disjoint_fraction: float
    by_t: dict[int, tuple[int, int]]
    trials: int | None = None

    @property
    def predominantly_sharing(self) -> bool:
        return self.share_fraction > 0.5

    def to_json(self) -> dict:
        return {
            "model": self.spec.model,
            "n": self.spec.n,
            "k": self.spec.k,
            "t_condition": self.t_condition if self.t_condition is not None else ">=2",
            "mode": self.mode,
            "graphs": self.graphs,
            "sharing": self.sharing,
            "share_fraction": self.share_fraction,
            "disjoint_fraction": self.disjoint_fraction,
            "predominantly_sharing": self.predominantly_sharing,
            "trials": self.trials,
            "by_t": {str(t): {"graphs": g, "sharing": s} for t, (g, s) in sorted(self.by_t.items())},
        }


def _coag_from_tally(spec, t_condition, mode, tally: Counter, trials=None) -> CoagulationStat:
    by_t: dict[int, list[int]] = {}
    for (t, occ), c in tally.items():
        if t < 2 or (t_condition is not None and t != t_condition):
            continue
        cell = by_t.setdefault(t, [0, 0])
        cell[0] += c
        if occ >= 2:
            cell[1] += c
    graphs = sum(g for g, _ in by_t.values())
    if graphs == 0:
        what = f"t={t_condition}" if t_condition is not None else "t>=2"
        raise CapacityError(f"conditioning class {what} is empty", constraint="empty class")
    share = sum(s for _, s in by_t.values())
    frac = Fraction(share, graphs)
    return CoagulationStat(
        spec, t_condition, mode, graphs, share, float(frac), float(1 - frac),
        {t: (g, s) for t, (g, s) in sorted(by_t.items())}, trials,
    )


def coagulation(
    spec: EnsembleSpec,
    t_condition: int | None = None,
    mode: str = "exact",
    samples: int = 1000,
    seed: int = 0,
    cap: int = ENUMERATION_CAP,
    max_trials: int = 10**7,
    threads: int | None = None,
) -> CoagulationStat:
    """Fraction of conditioned graphs in which some link lies in two or more triangles.

    The class is ``t == t_condition``, or every ``t >= 2`` when
    ``t_condition`` is None.  MC mode rejection-samples the class and
    aborts when the acceptance rate drops below 1e-6.
    """
    if t_condition is not None and t_condition < 2:
        raise SpecError("coagulation needs a class with at least 2 triangles")
    if mode == "exact":
        return _coag_from_tally(spec, t_condition, "exact", exact_triangle_stats(spec, cap=cap, threads=threads))
    if mode != "mc":
        raise SpecError(f"unknown mode {mode!r}")
    tally: Counter = Counter()
    accepted = trials = 0
    batch = max(samples, CHUNK)
    round_ = 0
    while accepted < samples:
        got = mc_triangle_stats(spec, batch, (seed, round_), threads)
        round_ += 1
        for stat in got:
            trials += 1
            if stat[0] >= 2 and (t_condition is None or stat[0] == t_condition):
                if accepted < samples:
                    tally[stat] += 1
                accepted += 1
        rate = accepted / trials
        if trials >= 1 / MIN_ACCEPTANCE and rate < MIN_ACCEPTANCE:
            raise CapacityError(
                f"rejection acceptance {rate:.2e} below {MIN_ACCEPTANCE:g} after {trials} trials",
                constraint="acceptance rate",
            )
        if trials >= max_trials and accepted < samples:
            raise CapacityError(
                f"only {accepted} of {samples} accepted in {trials} trials (acceptance {rate:.2e})",
                constraint="trial budget",
            )
    return _coag_from_tally(spec, t_condition, "mc", tally, trials)


# --------------------------------------------------------------------------
# lemma suite


@dataclass
class LemmaReport:
    spec: EnsembleSpec
    samples: int
    seed: int
    graphs_with_triangles: int
    max_t: int
    violations: list[str]

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "model": self.spec.model,
            "n": self.spec.n,
            "k": self.spec.k,
            "samples": self.samples,
            "seed": self.seed,
            "graphs_with_triangles": self.graphs_with_triangles,
            "max_t": self.max_t,
            "ok": self.ok,
            "violations": self.violations,
        }


def _lemma_chunk(job) -> tuple[int, int, list[str]]:
    spec, size, child, offset = job
    rng = np.random.default_rng(child)
    k = spec.k
    with_t = top = 0
    bad: list[str] = []
    for i in range(size):
        g = sample(spec, rng)
        where = f"sample {offset + i}"
        v = validate(g, spec.model, k)
        if not v.ok:
            bad.append(f"{where}: invalid graph: {v.violations[0]}")
        r = census(g, spec.model)
        with_t += r.t > 0
        top = max(top, r.t)
        bad.extend(f"{where}: {x}" for x in occupancy_violations(r, k))
        if not triang_sandwich(r, k):
            bad.append(f"{where}: link sandwich t/(2k) <= {r.ell_triang} <= 3t fails for t={r.t}")
        if r.directed and not product_vi_holds(r, k):
            bad.append(f"{where}: prod(v_i + k) exceeds (2k)^n")
    return with_t, top, bad


def check_lemmas(spec: EnsembleSpec, samples: int, seed: int, threads: int | None = None) -> LemmaReport:
    """Run the occupancy caps, link sandwich and in-degree product bound on sampled graphs."""
    jobs = []
    offset = 0
    for size, child in _chunks(samples, seed):
        jobs.append((spec, size, child, offset))
        offset += size
    with_t = top = 0
    bad: list[str] = []
    for w, m, b in _run(_lemma_chunk, jobs, threads):
        with_t += w
        top = max(top, m)
        bad.extend(b)
    if bad:
        log.error("%d lemma violations for %s", len(bad), spec)
    return LemmaReport(spec, samples, seed, with_t, top, bad)
