"""Largest-remainder apportionment over exact rationals."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Sequence


def largest_remainder(total: int, weights: Sequence[Rational | int]) -> list[int]:
    """Split ``total`` integer units proportionally to ``weights``.

    Each share is the floor of its exact quota; the leftover units go one each
    to the largest fractional remainders. Ties go to the lower index, so
    callers sort by account or rig id to get id-ordered tie breaking.
    The result always sums to ``total`` when at least one weight is positive.

    >>> largest_remainder(100, [1, 1, 1])
    [34, 33, 33]
    """
    if total < 0:
        raise ValueError("total must be non-negative")
    if all(type(w) is int for w in weights):
        return _largest_remainder_int(total, weights)  # type: ignore[arg-type]
    ws = [Fraction(w) for w in weights]
    if any(w < 0 for w in ws):
        raise ValueError("weights must be non-negative")
    wsum = sum(ws, Fraction(0))
    if wsum == 0:
        raise ValueError("at least one weight must be positive")
    quotas = [total * w / wsum for w in ws]
    shares = [q.numerator // q.denominator for q in quotas]
    left = total - sum(shares)
    order = sorted(range(len(ws)), key=lambda i: (-(quotas[i] - shares[i]), i))
    for i in order[:left]:
        shares[i] += 1
    return shares


def _largest_remainder_int(total: int, weights: Sequence[int]) -> list[int]:
    if any(w < 0 for w in weights):
        raise ValueError("weights must be non-negative")
    wsum = sum(weights)
    if wsum == 0:
        raise ValueError("at least one weight must be positive")
    shares = []
    rems = []
    for w in weights:
        q, r = divmod(total * w, wsum)
        shares.append(q)
        rems.append(r)
    left = total - sum(shares)
    if left:
        order = sorted(range(len(weights)), key=lambda i: (-rems[i], i))
        for i in order[:left]:
            shares[i] += 1
    return shares
