"""Row sampling and sample-side acceptance.

The violation rate over all ordered row pairs is estimated from the
pairs of a uniform row sample.  A candidate is accepted when the
estimate plus a one-sided normal confidence margin still clears the
threshold, i.e. when (1 - p_hat) >= halfwidth + (1 - eps).  The
adjusted satisfied fraction (1 - p_hat) - halfwidth is what that
acceptance guarantees with probability about 1 - alpha.

chebyshev_tail_bound gives a distribution-free (much weaker) tail
bound on the estimator for diagnostics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .evidence import EvidenceSet, uncovered_weight


@dataclass(frozen=True)
class SampleSpec:
    """Sampling switch for a run: row fraction and RNG seed."""

    fraction: float
    seed: int

    def __post_init__(self):
        if not 0.0 < self.fraction <= 1.0:
            raise ValueError("sample fraction must be in (0, 1]")


@dataclass(frozen=True)
class Estimate:
    """Violation-rate estimate from a sample's pair universe."""

    p_hat: float
    n: int


def draw_sample(d: Dataset, fraction: float, seed: int):
    """Uniform sample of round(fraction * rows) rows, original order kept.

    Returns (subset dataset, selected row ids).  Counted-based Philox
    stream, so a (fraction, seed) pair always picks the same rows.
    """
    spec = SampleSpec(fraction, seed)
    size = round(spec.fraction * d.n_rows)
    if size < 2:
        raise ValueError(f"sample of {size} rows has no tuple pairs; "
                         "raise the fraction")
    gen = np.random.Generator(np.random.Philox(spec.seed))
    rows = np.sort(gen.choice(d.n_rows, size=size, replace=False))
    return d.take_rows(rows), rows


def estimate_p(e_j: EvidenceSet, h) -> Estimate:
    """Violating-pair fraction on the sample's evidence."""
    if e_j.pair_universe == 0:
        raise ValueError("sample evidence has no pairs")
    return Estimate(uncovered_weight(e_j, h) / e_j.pair_universe,
                    e_j.pair_universe)


# Acklam's rational approximation to the standard normal quantile,
# polished below to full double precision.
_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00)


def z_quantile(q: float) -> float:
    """Inverse standard normal CDF on (0, 1)."""
    if not 0.0 < q < 1.0:
        raise ValueError("quantile argument must lie strictly in (0, 1)")
    if q < 0.02425:
        u = math.sqrt(-2.0 * math.log(q))
        x = ((((((_C[0] * u + _C[1]) * u + _C[2]) * u + _C[3]) * u + _C[4]) * u + _C[5])
             / ((((_D[0] * u + _D[1]) * u + _D[2]) * u + _D[3]) * u + 1.0))
    elif q > 1.0 - 0.02425:
        u = math.sqrt(-2.0 * math.log(1.0 - q))
        x = -((((((_C[0] * u + _C[1]) * u + _C[2]) * u + _C[3]) * u + _C[4]) * u + _C[5])
              / ((((_D[0] * u + _D[1]) * u + _D[2]) * u + _D[3]) * u + 1.0))
    else:
        u = q - 0.5
        t = u * u
        x = ((((((_A[0] * t + _A[1]) * t + _A[2]) * t + _A[3]) * t + _A[4]) * t + _A[5]) * u
             / (((((_B[0] * t + _B[1]) * t + _B[2]) * t + _B[3]) * t + _B[4]) * t + 1.0))
    # two Halley steps against erfc bring the error below 1e-12
    for _ in range(2):
        err = 0.5 * math.erfc(-x / math.sqrt(2.0)) - q
        density = math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
        if density == 0.0:
            break
        step = err / density
        x -= step / (1.0 + x * step / 2.0)
    return x


def normal_ci_halfwidth(p_hat: float, n: int, alpha: float) -> float:
    """One-sided normal margin z_{1-alpha} * sqrt(p_hat(1-p_hat)/n)."""
    if n < 1:
        raise ValueError("need a positive pair count")
    if not 0.0 < alpha < 0.5:
        raise ValueError("alpha must lie in (0, 0.5)")
    return z_quantile(1.0 - alpha) * math.sqrt(p_hat * (1.0 - p_hat) / n)


def accept_on_sample(est: Estimate, eps: float, alpha: float) -> bool:
    """Accept when the estimated satisfied fraction clears 1 - eps by
    the confidence margin."""
    hw = normal_ci_halfwidth(est.p_hat, est.n, alpha)
    return (1.0 - est.p_hat) >= hw + (1.0 - eps)


def adjusted_f1(est: Estimate, alpha: float) -> float:
    """Lower confidence value for the satisfied-pair fraction."""
    return (1.0 - est.p_hat) - normal_ci_halfwidth(est.p_hat, est.n, alpha)


def normal_approx_suspect(est: Estimate, min_successes: int = 10) -> bool:
    """Rule-of-thumb check that the normal interval is trustworthy:
    expect at least min_successes violating and satisfied pairs."""
    return (est.n * est.p_hat < min_successes
            or est.n * (1.0 - est.p_hat) < min_successes)


def chebyshev_tail_bound(p: float, n_nodes: int, a: float) -> float:
    """Distribution-free bound on P(|p_hat - p| >= a) for a node sample
    of n_nodes rows, using a worst-case pair-correlation variance."""
    if n_nodes < 2:
        raise ValueError("need at least 2 sampled rows")
    if a <= 0.0:
        raise ValueError("deviation must be positive")
    c = n_nodes * (n_nodes - 1) // 2
    var_over_p = (c + c * (c - 1) / 2.0) / (c * c) - p
    bound = p * var_over_p / (a * a)
    return min(1.0, max(0.0, bound))
