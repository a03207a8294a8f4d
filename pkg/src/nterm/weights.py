"""Admissible weight sequences and their finite-range classification.

A weight is a positive nondecreasing sequence eta(k), k >= 1. The admissible
class requires eta nondecreasing, unbounded and doubling; the strict subclass
additionally has sup_k eta(k)/eta(m*k) < 1 for some integer m > 1, which is
equivalent to a positive lower dilation index. All suprema are replaced by
maxima over 1 <= k <= K for a documented range cap K.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import FeasibilityError, NumericError, ParseError

DEFAULT_RANGE_CAP = 10**6
DILATION_M_MAX = 16
# A kappa certificate requires the range max of eta(k)/eta(kappa k) to stay
# below 1 - margin. A slowly varying weight (whose true sup is 1) reaches
# 1 - ln(kappa)/ln(K) at range cap K, so the margin must scale the same way;
# the factor 1.5 keeps such weights out while admitting genuine power growth
# k^a down to a of order 1/ln K.
MARGIN_FACTOR = 1.5
MARGIN_FLOOR = 1e-3


def strict_margin(m, K):
    return max(MARGIN_FLOOR, MARGIN_FACTOR * math.log(m) / math.log(max(K, 3)))


class Weight:
    """Evaluable weight sequence: power-log k^a log^b(k+1), table-backed, or product."""

    def __init__(self, kind, a=0.0, b=0.0, table=None, factors=None):
        self.kind = kind
        self.a = a
        self.b = b
        self.table = None if table is None else np.asarray(table, dtype=float)
        self.factors = factors
        if kind == "table":
            if self.table is None or len(self.table) == 0:
                raise ParseError("table weight needs at least one value")
            if np.any(self.table <= 0):
                raise ParseError("table weight values must be positive")

    @classmethod
    def power_log(cls, a, b=0.0):
        return cls("pow", a=a, b=b)

    @classmethod
    def from_table(cls, values):
        return cls("table", table=values)

    @classmethod
    def product(cls, w1, w2):
        return cls("product", factors=(w1, w2))

    def scaled(self, alpha):
        """The weight k^alpha * eta(k)."""
        if self.kind == "pow":
            return Weight.power_log(self.a + alpha, self.b)
        return Weight.product(Weight.power_log(alpha), self)

    @property
    def range_limit(self):
        """Largest k this weight can be evaluated at (None if unlimited)."""
        if self.kind == "table":
            return len(self.table)
        if self.kind == "product":
            lims = [w.range_limit for w in self.factors]
            lims = [l for l in lims if l is not None]
            return min(lims) if lims else None
        return None

    def __call__(self, k):
        """Evaluate eta at integer k >= 1 (scalar or array)."""
        karr = np.asarray(k, dtype=float)
        if np.any(karr < 1):
            raise ValueError("weights are defined for k >= 1")
        if self.kind == "pow":
            out = karr**self.a * np.log(karr + 1.0) ** self.b
        elif self.kind == "table":
            ki = np.asarray(k, dtype=np.int64)
            if np.any(ki > len(self.table)):
                raise IndexError(
                    f"table weight of length {len(self.table)} queried beyond range"
                )
            out = self.table[ki - 1]
        elif self.kind == "product":
            out = self.factors[0](k) * self.factors[1](k)
        else:
            raise ValueError(f"unknown weight kind {self.kind!r}")
        if np.ndim(k) == 0:
            return float(out)
        return out

    def label(self):
        if self.kind == "pow":
            return f"pow:{self.a:g},{self.b:g}"
        if self.kind == "table":
            return f"table[{len(self.table)}]"
        return f"{self.factors[0].label()}*{self.factors[1].label()}"

    def __repr__(self):
        return f"Weight({self.label()})"


def parse_weight(text):
    """Parse "pow:a,b" (k^a log^b(k+1)) or "table:<path>" (one value per line)."""
    try:
        head, _, rest = text.partition(":")
        if head == "pow":
            parts = rest.split(",")
            a = float(parts[0])
            b = float(parts[1]) if len(parts) > 1 else 0.0
            return Weight.power_log(a, b)
        if head == "table":
            with open(rest) as fh:
                vals = [float(line) for line in fh if line.strip()]
            return Weight.from_table(vals)
    except (ValueError, OSError) as exc:
        raise ParseError(f"cannot parse weight {text!r}: {exc}") from exc
    raise ParseError(f"unknown weight form {text!r} (expected pow:a,b or table:path)")


def _effective_cap(w, cap, m=1):
    lim = w.range_limit
    if lim is not None:
        cap = min(cap, lim // m)
    if cap < 1:
        raise FeasibilityError("weight range too short for requested evaluation")
    return cap


def ratio_sup(w, m, K=DEFAULT_RANGE_CAP):
    """max over 1 <= k <= K of eta(k)/eta(m k): finite-range surrogate of the
    dilation ratio supremum; always <= 1 for nondecreasing eta."""
    if m < 2:
        raise ValueError("m must be >= 2")
    K = _effective_cap(w, K, m)
    k = np.arange(1, K + 1, dtype=np.int64)
    return float(np.max(w(k) / w(m * k)))


def lower_dilation_index(w, M=DILATION_M_MAX, K=DEFAULT_RANGE_CAP):
    """max over 2 <= m <= M of log ratio_sup(m) / (-log m)."""
    if M < 2:
        raise ValueError("M must be >= 2")
    best = -math.inf
    for m in range(2, M + 1):
        r = ratio_sup(w, m, K)
        best = max(best, math.log(r) / (-math.log(m)))
    return max(best, 0.0)


@dataclass
class Classification:
    """Finite-range certificate for a weight."""

    doubling_constant: float
    ratio_table: dict  # m -> max_k eta(k)/eta(mk)
    dilation_index: float
    kappa: int | None  # smallest integer > 1 with ratio_sup(kappa) < 1 - margin
    monotone: bool
    range_cap: int

    @property
    def positive_dilation(self):
        """True when some kappa certifies a strictly positive dilation index."""
        return self.kappa is not None


def classify(w, K=DEFAULT_RANGE_CAP, margin=None):
    """Classify a weight on the range 1..K.

    Raises NumericError naming the first violation if the weight is not
    nondecreasing on the evaluated range.
    """
    if K < 2:
        raise ValueError("K must be >= 2")
    Keff = _effective_cap(w, K)
    vals = w(np.arange(1, Keff + 1, dtype=np.int64))
    bad = np.nonzero(np.diff(vals) < 0)[0]
    if len(bad):
        k = int(bad[0]) + 1
        raise NumericError(
            f"weight not nondecreasing on range: eta({k})={vals[k-1]:g} > "
            f"eta({k+1})={vals[k]:g}"
        )
    half = Keff // 2
    doubling = float(np.max(vals[2 * np.arange(1, half + 1) - 1] / vals[: half])) if half else 1.0
    table = {m: ratio_sup(w, m, Keff) for m in (2, 3, 4, 8, 16) if _fits(w, m, Keff)}
    kappa = None
    for m in range(2, DILATION_M_MAX + 1):
        if not _fits(w, m, Keff):
            break
        bar = margin if margin is not None else strict_margin(m, Keff)
        if ratio_sup(w, m, Keff) < 1.0 - bar:
            kappa = m
            break
    idx = lower_dilation_index(w, K=Keff) if _fits(w, 2, Keff) else 0.0
    return Classification(
        doubling_constant=doubling,
        ratio_table=table,
        dilation_index=idx,
        kappa=kappa,
        monotone=True,
        range_cap=Keff,
    )


def _fits(w, m, K):
    lim = w.range_limit
    return lim is None or lim >= m


def geometric_sum_check(w, kappa, n_max):
    """max over 0 <= n <= n_max of sum_{j<=n} eta(kappa^j) / eta(kappa^n).

    For weights with a certified kappa this stabilizes below 1/(1 - ratio);
    for slowly varying weights it grows with n, which is reported as-is.
    Returns (best_constant, per_n_values).
    """
    if kappa < 2:
        raise ValueError("kappa must be >= 2")
    if kappa**n_max > 2**62:
        raise NumericError("kappa**n_max exceeds integer range")
    lim = w.range_limit
    if lim is not None and kappa**n_max > lim:
        raise NumericError("kappa**n_max beyond table range")
    powers = kappa ** np.arange(0, n_max + 1, dtype=np.int64)
    vals = w(powers)
    ratios = np.cumsum(vals) / vals
    return float(np.max(ratios)), ratios
