"""Closed-form bound exponents and exact log-cardinalities.

Ratios are exact :class:`~fractions.Fraction` values; conversion to float
happens only in :meth:`BoundReport.to_json` / :meth:`BoundReport.csv_row`.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .constructions import as_fraction, lower_bound_exponent
from .ensembles import ENUMERATION_CAP, EnsembleSpec, count, enumeration_size
from .errors import CapacityError, SpecError
from .graphs import MODELS

CSV_COLUMNS = ("model", "k", "alpha", "rho", "lower", "upper", "vacuous")


def rho(k: int) -> Fraction:
    """Upper-bound gain constant 1 / (2k(5k+1))."""
    if k < 1:
        raise SpecError(f"rho needs k >= 1, got {k}")
    return Fraction(1, 2 * k * (5 * k + 1))


@dataclass(frozen=True)
class BoundQuery:
    model: str
    k: int
    alpha: Fraction
    n: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "alpha", as_fraction(self.alpha))
        if self.model not in MODELS:
            raise SpecError(f"unknown model {self.model!r}")
        if self.k < 1:
            raise SpecError(f"k must be >= 1, got {self.k}")
        if self.alpha < 0:
            raise SpecError(f"alpha must be >= 0, got {self.alpha}")
        if self.model == "k-regular" and self.k < 2:
            raise SpecError("k-regular bounds need k >= 2")
        if self.n is not None and self.n < 1:
            raise SpecError(f"n must be >= 1, got {self.n}")


class LogCardinality(NamedTuple):
    value: float
    exponent_only: bool


@dataclass(frozen=True)
class BoundReport:
    model: str
    k: int
    alpha: Fraction
    rho_k: Fraction
    upper_ratio: Fraction | None
    lower_ratio: Fraction | None
    vacuous_lower: bool
    finite_n_log_denominator: LogCardinality | None = None
    reg_exponent_terms: tuple[Fraction, Fraction] | None = None

    def to_json(self) -> dict:
        def f(x):
            return None if x is None else float(x)

        def q(x):
            return None if x is None else str(x)

        out = {
            "model": self.model,
            "k": self.k,
            "alpha": float(self.alpha),
            "rho": f(self.rho_k),
            "lower": f(self.lower_ratio),
            "upper": f(self.upper_ratio),
            "vacuous": self.vacuous_lower,
            "exact": {"alpha": q(self.alpha), "rho": q(self.rho_k), "lower": q(self.lower_ratio),
                      "upper": q(self.upper_ratio)},
        }
        if self.finite_n_log_denominator is not None:
            out["log_denominator"] = self.finite_n_log_denominator.value
            out["log_denominator_exponent_only"] = self.finite_n_log_denominator.exponent_only
        if self.reg_exponent_terms is not None:
            out["reg_exponent_terms"] = [float(x) for x in self.reg_exponent_terms]
        return out

    def csv_row(self) -> dict:
        j = self.to_json()
        return {c: j[c] for c in CSV_COLUMNS}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerow(self.csv_row())
        return buf.getvalue()


def upper_ratio(model: str, k: int, alpha) -> Fraction | None:
    a = as_fraction(alpha)
    if model == "general":
        return Fraction(1)
    if model == "k-out":
        return 1 - a * rho(k) / k
    if k < 2:
        return None
    return 1 - 2 * a / (k * (k - 1))


def theorem_ratios(q: BoundQuery, cap: int = ENUMERATION_CAP) -> BoundReport:
    """Evaluate both ratio bounds for ``q``; with ``q.n`` also the log-denominator."""
    low = lower_bound_exponent(q.model, q.k, q.alpha)
    denom = None
    if q.n is not None:
        denom = log_cardinality(q, cap=cap, allow_exponent_only=True)
    terms = None
    if q.model == "k-regular":
        scale = q.n if q.n is not None else 1
        terms = (Fraction(q.k * scale, 2), q.alpha * scale / (q.k - 1))
    return BoundReport(
        model=q.model,
        k=q.k,
        alpha=q.alpha,
        rho_k=rho(q.k),
        upper_ratio=upper_ratio(q.model, q.k, q.alpha),
        lower_ratio=low.ratio,
        vacuous_lower=low.vacuous,
        finite_n_log_denominator=denom,
        reg_exponent_terms=terms,
    )


def log_cardinality(q: BoundQuery, cap: int = ENUMERATION_CAP, allow_exponent_only: bool = False) -> LogCardinality:
    """Natural log of the model's cardinality at ``q.n``.

    general and k-out are exact (big-integer binomials, one final log).
    k-regular is exact by enumeration below ``cap``; above it the
    (nk/2) log n exponent is returned when ``allow_exponent_only``.
    """
    if q.n is None:
        raise SpecError("log_cardinality needs n")
    spec = EnsembleSpec(q.model, q.n, q.k)
    if q.model != "k-regular" or enumeration_size(spec) <= cap:
        c = count(spec, cap=cap)
        return LogCardinality(math.log(c) if c else -math.inf, False)
    if not allow_exponent_only:
        raise CapacityError(
            f"exact k-regular count for n={q.n}, k={q.k} is above the enumeration cap {cap}",
            constraint="enumeration cap",
            required=enumeration_size(spec),
        )
    return LogCardinality(q.n * q.k / 2 * math.log(q.n), True)


def vu_tail_exponent(n: float, alpha: float) -> float:
    """Constant-free concentration exponent alpha^(1/3) n^(1/2)."""
    if n < 1 or alpha <= 0:
        raise SpecError("vu_tail_exponent needs n >= 1 and alpha > 0")
    return alpha ** (1 / 3) * math.sqrt(n)


def counter_loss_exponent(n: float, alpha: float) -> float:
    """(alpha n)^(2/3) log n: log-loss of the clique construction for k-general graphs."""
    if n < 1 or alpha < 0:
        raise SpecError("counter_loss_exponent needs n >= 1 and alpha >= 0")
    return (alpha * n) ** (2 / 3) * math.log(n)
