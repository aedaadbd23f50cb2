"""Hypothesis tests and effect sizes used to compare reading measurements."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Sequence

from .special import chi2_sf, f_sf, student_t_two_sided_p


class StatInputError(ValueError):
    """Raised for samples a test cannot be computed on."""


@dataclass(frozen=True)
class StatResult:
    """Outcome of one statistical test."""

    test: str
    statistic: float
    df: Any  # float, or (between, within) for the F test
    p_value: float
    effect_size: float | None = None
    detail: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not (0.0 <= self.p_value <= 1.0):
            raise ValueError(f"p_value must be in [0, 1], got {self.p_value}")


def _clean(sample: Sequence[float], name: str, min_n: int = 2) -> list[float]:
    values = [float(v) for v in sample]
    if len(values) < min_n:
        raise StatInputError(f"{name} needs at least {min_n} values, got {len(values)}")
    if any(not math.isfinite(v) for v in values):
        raise StatInputError(f"{name} contains non-finite values")
    return values


def _mean(xs: Sequence[float]) -> float:
    return sum(xs) / len(xs)


def _var(xs: Sequence[float]) -> float:
    m = _mean(xs)
    return sum((v - m) ** 2 for v in xs) / (len(xs) - 1)


def welch_t(a: Sequence[float], b: Sequence[float]) -> StatResult:
    """Welch's unequal-variance t-test, two-sided."""
    xa, xb = _clean(a, "a"), _clean(b, "b")
    na, nb = len(xa), len(xb)
    va, vb = _var(xa), _var(xb)
    sa, sb = va / na, vb / nb
    df_denominator = sa**2 / (na - 1) + sb**2 / (nb - 1)
    if sa + sb == 0.0 or df_denominator == 0.0:
        raise StatInputError("sample variances too small; t is undefined")
    t = (_mean(xa) - _mean(xb)) / math.sqrt(sa + sb)
    df = (sa + sb) ** 2 / df_denominator
    return StatResult(
        test="welch_t",
        statistic=t,
        df=df,
        p_value=student_t_two_sided_p(t, df),
        effect_size=cohens_d(xa, xb),
    )


def student_t(
    a: Sequence[float], b: Sequence[float], *, paired: bool = False
) -> StatResult:
    """Student's t-test, two-sided; ``paired`` compares matched samples."""
    xa, xb = _clean(a, "a"), _clean(b, "b")
    if paired:
        if len(xa) != len(xb):
            raise StatInputError(
                f"paired samples must match in length ({len(xa)} vs {len(xb)})"
            )
        diffs = [x - y for x, y in zip(xa, xb)]
        vd = _var(diffs)
        if vd == 0.0:
            raise StatInputError("paired differences have zero variance")
        n = len(diffs)
        t = _mean(diffs) / math.sqrt(vd / n)
        df = float(n - 1)
        effect = _mean(diffs) / math.sqrt(vd)
    else:
        na, nb = len(xa), len(xb)
        va, vb = _var(xa), _var(xb)
        pooled = ((na - 1) * va + (nb - 1) * vb) / (na + nb - 2)
        if pooled == 0.0:
            raise StatInputError("both samples have zero variance; t is undefined")
        t = (_mean(xa) - _mean(xb)) / math.sqrt(pooled * (1.0 / na + 1.0 / nb))
        df = float(na + nb - 2)
        effect = cohens_d(xa, xb)
    return StatResult(
        test="student_t_paired" if paired else "student_t",
        statistic=t,
        df=df,
        p_value=student_t_two_sided_p(t, df),
        effect_size=effect,
    )


def cohens_d(a: Sequence[float], b: Sequence[float], *, paired: bool = False) -> float:
    """Cohen's d: pooled-SD standardized mean difference (or paired diff SD)."""
    xa, xb = _clean(a, "a"), _clean(b, "b")
    if paired:
        if len(xa) != len(xb):
            raise StatInputError("paired samples must match in length")
        diffs = [x - y for x, y in zip(xa, xb)]
        sd = math.sqrt(_var(diffs))
        if sd == 0.0:
            raise StatInputError("paired differences have zero variance")
        return _mean(diffs) / sd
    na, nb = len(xa), len(xb)
    pooled = ((na - 1) * _var(xa) + (nb - 1) * _var(xb)) / (na + nb - 2)
    if pooled == 0.0:
        raise StatInputError("zero pooled variance; effect size undefined")
    return (_mean(xa) - _mean(xb)) / math.sqrt(pooled)


def one_way_anova(*groups: Sequence[float]) -> StatResult:
    """One-way ANOVA with eta-squared as the effect size."""
    if len(groups) < 2:
        raise StatInputError("ANOVA needs at least two groups")
    cleaned = [_clean(g, f"group {i}") for i, g in enumerate(groups)]
    all_values = [v for g in cleaned for v in g]
    grand = _mean(all_values)
    ss_between = sum(len(g) * (_mean(g) - grand) ** 2 for g in cleaned)
    ss_within = sum(sum((v - _mean(g)) ** 2 for v in g) for g in cleaned)
    df_between = len(cleaned) - 1
    df_within = len(all_values) - len(cleaned)
    if df_within <= 0:
        raise StatInputError("ANOVA needs more observations than groups")
    if ss_within == 0.0:
        raise StatInputError("zero within-group variance; F is undefined")
    f = (ss_between / df_between) / (ss_within / df_within)
    ss_total = ss_between + ss_within
    return StatResult(
        test="one_way_anova",
        statistic=f,
        df=(float(df_between), float(df_within)),
        p_value=f_sf(f, df_between, df_within),
        effect_size=ss_between / ss_total if ss_total > 0 else 0.0,
    )


def chi_square(table: Sequence[Sequence[float]]) -> StatResult:
    """Pearson chi-squared test of independence (no continuity correction).

    Effect size is Cramér's V.
    """
    rows = [[float(v) for v in row] for row in table]
    if len(rows) < 2 or any(len(r) != len(rows[0]) for r in rows) or len(rows[0]) < 2:
        raise StatInputError("table must be at least 2x2 and rectangular")
    if any(v < 0 for r in rows for v in r):
        raise StatInputError("table entries must be non-negative")
    n_rows, n_cols = len(rows), len(rows[0])
    row_sums = [sum(r) for r in rows]
    col_sums = [sum(rows[i][j] for i in range(n_rows)) for j in range(n_cols)]
    total = sum(row_sums)
    if any(s == 0 for s in row_sums) or any(s == 0 for s in col_sums):
        raise StatInputError("table has an empty row or column marginal")
    stat = 0.0
    for i in range(n_rows):
        for j in range(n_cols):
            expected = row_sums[i] * col_sums[j] / total
            stat += (rows[i][j] - expected) ** 2 / expected
    df = float((n_rows - 1) * (n_cols - 1))
    v = math.sqrt(stat / (total * (min(n_rows, n_cols) - 1)))
    return StatResult(
        test="chi_square",
        statistic=stat,
        df=df,
        p_value=chi2_sf(stat, df),
        effect_size=v,
    )
