"""Tsallis (nonextensive) entropy."""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

SHANNON_BAND = 1e-9


@dataclass(frozen=True)
class TsallisResult:
    q: float
    k: float
    value: float
    outside_tested_regime: bool = False  # set for q <= 0


class AdditivityCheck(NamedTuple):
    lhs: float
    rhs: float
    residual: float


def as_distribution(p, atol=1e-12):
    """Validate probabilities: finite, non-negative, summing to 1 within ``atol``."""
    p = np.asarray(p, dtype=float).ravel()
    if p.size == 0:
        raise ValueError("distribution is empty")
    if not np.all(np.isfinite(p)) or np.any(p < 0):
        raise ValueError("probabilities must be finite and non-negative")
    total = float(np.sum(p))
    if abs(total - 1.0) > atol:
        raise ValueError(f"probabilities sum to {total}, not 1")
    return p


def tsallis_entropy(dist, q, k=1.0):
    """S_q = k (1 - sum p_i**q) / (q - 1), with the Shannon form near q = 1.

    Empty cells are skipped, so they contribute nothing for any q.
    """
    p = as_distribution(dist)
    q, k = float(q), float(k)
    if not np.isfinite(q):
        raise ValueError("q must be finite")
    p = p[p > 0]
    if abs(q - 1.0) < SHANNON_BAND:
        value = -k * float(np.sum(p * np.log(p)))
    else:
        value = k * (1.0 - float(np.sum(p ** q))) / (q - 1.0)
    return TsallisResult(q=q, k=k, value=value, outside_tested_regime=q <= 0)


def additivity_check(dist_a, dist_b, q, k=1.0):
    """Compare S_q(A x B)/k with S_q(A)/k + S_q(B)/k + (1 - q) S_q(A)/k * S_q(B)/k.

    A x B is the joint distribution of two independent systems.
    """
    a, b = as_distribution(dist_a), as_distribution(dist_b)
    sa = tsallis_entropy(a, q, k).value / k
    sb = tsallis_entropy(b, q, k).value / k
    joint = np.outer(a, b).ravel()
    # renormalizing keeps the joint sum inside the validation band
    lhs = tsallis_entropy(joint / joint.sum(), q, k).value / k
    rhs = sa + sb + (1.0 - q) * sa * sb
    return AdditivityCheck(lhs=lhs, rhs=rhs, residual=abs(lhs - rhs))
