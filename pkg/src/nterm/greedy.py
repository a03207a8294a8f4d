"""Greedy and optimal N-term approximation errors and the derived quasi-norms.

All operations here treat sequences as coefficients on the NORMALIZED basis:
ordering compares plain magnitudes and norm evaluation divides by the norm of
each basis element. For l^p-type spaces the two coordinate systems coincide.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations, islice

import numpy as np

from . import _kernels
from .batch import batch_evaluator
from .errors import FeasibilityError
from .indices import canonical_key
from .sequences import Sequence
from .spaces import SpaceSpec, ambient_norm, element_norm

TIE_FAMILY_CAP = 10_000
SUBSET_CAP = 2_000_000
KERNEL_SUPPORT_CAP = 22
MASK_CHUNK = 1 << 16


def _comb(n, k):
    return math.comb(n, k) if 0 <= k <= n else 0


class _Context:
    """Per-(sequence, space) evaluation state shared by the subset engines."""

    def __init__(self, seq: Sequence, spec: SpaceSpec, rng=None):
        self.spec = spec
        self.seq = seq
        items = [(i, v) for i, v in seq.entries.items() if v != 0.0]
        items.sort(key=lambda t: (-abs(t[1]), canonical_key(t[0])))
        self.indices = [i for i, _ in items]
        self.mags = np.array([abs(v) for _, v in items])
        self.n = len(items)
        self.rng = rng or np.random.default_rng(0)
        self._eval = None

    @property
    def evaluator(self):
        if self._eval is None and self.n:
            raw = [
                self.mags[i] / element_norm(self.spec, idx)
                for i, idx in enumerate(self.indices)
            ]
            self._eval = batch_evaluator(self.spec, self.indices, raw)
            pos = {idx: c for c, idx in enumerate(self._eval.indices)}
            self._cols = np.array([pos[idx] for idx in self.indices])
        return self._eval

    def residual_norms(self, kept_rows, threads=1):
        """Norms of the complements of the kept index-position rows."""
        ev = self.evaluator
        m = len(kept_rows)
        masks = np.ones((m, self.n))
        if m and len(kept_rows[0]) and all(len(k) == len(kept_rows[0]) for k in kept_rows):
            kept = np.asarray(kept_rows, dtype=np.intp)
            rows = np.repeat(np.arange(m), kept.shape[1])
            masks[rows, self._cols[kept.reshape(-1)]] = 0.0
        else:
            lens = np.fromiter((len(k) for k in kept_rows), dtype=np.intp, count=m)
            total = int(lens.sum())
            if total:
                rows = np.repeat(np.arange(m), lens)
                cols = self._cols[
                    np.fromiter(
                        (i for k in kept_rows for i in k), dtype=np.intp, count=total
                    )
                ]
                masks[rows, cols] = 0.0
        if threads > 1 and m > 4 * MASK_CHUNK:
            chunks = [masks[i : i + MASK_CHUNK] for i in range(0, m, MASK_CHUNK)]
            with ThreadPoolExecutor(threads) as ex:
                return np.concatenate(list(ex.map(ev.norms, chunks)))
        return ev.norms(masks)

    def greedy_representatives(self, N):
        """Tie family reduced by norm-equivalence where the space is invariant
        under index permutations: any tie choice for l^p, per-component-count
        representatives for the direct sum. Falls back to the full family."""
        if N <= 0 or N >= self.n:
            return self.greedy_kept(N)
        if self.spec.tag == "lp":
            return [tuple(range(N))], True
        if self.spec.tag == "lplq":
            thr = self.mags[N - 1]
            strict = [i for i in range(self.n) if self.mags[i] > thr]
            ties = [i for i in range(self.n) if self.mags[i] == thr]
            ties_a = [i for i in ties if self.indices[i].component == 0]
            ties_b = [i for i in ties if self.indices[i].component == 1]
            m = N - len(strict)
            fam = []
            for j in range(max(0, m - len(ties_b)), min(m, len(ties_a)) + 1):
                fam.append(tuple(strict) + tuple(ties_a[:j]) + tuple(ties_b[: m - j]))
            return fam, True
        return self.greedy_kept(N)

    def greedy_kept(self, N):
        """Admissible kept position-sets of size N (first-N of some
        magnitude-nonincreasing ordering), plus an exactness flag."""
        if N <= 0:
            return [()], True
        if N >= self.n:
            return [tuple(range(self.n))], True
        thr = self.mags[N - 1]
        strict = [i for i in range(self.n) if self.mags[i] > thr]
        ties = [i for i in range(self.n) if self.mags[i] == thr]
        m = N - len(strict)
        count = _comb(len(ties), m)
        if count <= TIE_FAMILY_CAP:
            fam = [tuple(strict) + c for c in combinations(ties, m)]
            return fam, True
        picks = {tuple(ties[:m]), tuple(ties[-m:])}
        for _ in range(TIE_FAMILY_CAP):
            picks.add(tuple(sorted(self.rng.choice(ties, size=m, replace=False))))
            if len(picks) >= TIE_FAMILY_CAP:
                break
        return [tuple(strict) + c for c in picks], False


def greedy_sets(seq: Sequence, N, rng=None):
    """Every kept-index set reachable as the first N entries of a
    magnitude-nonincreasing ordering (sampled beyond the tie-family cap)."""
    ctx = _Context(seq, SpaceSpec("lp", p=1.0), rng)
    fam, exact = ctx.greedy_kept(N)
    return [frozenset(ctx.indices[i] for i in kept) for kept in fam], exact


@dataclass
class ErrorValue:
    value: float
    exact: bool = True

    def __float__(self):
        return self.value


def gamma_n(seq, N, spec, ctx=None):
    """Greedy error at step N: max residual norm over admissible kept sets."""
    ctx = ctx or _Context(seq, spec)
    if ctx.n == 0:
        return ErrorValue(0.0)
    fam, exact = ctx.greedy_representatives(N)
    vals = ctx.residual_norms(fam)
    return ErrorValue(float(vals.max()), exact)


def sigma_n_upper(seq, N, spec, ctx=None):
    """Greedy upper bound on the optimal N-term error: min over admissible
    kept sets of the residual norm."""
    ctx = ctx or _Context(seq, spec)
    if ctx.n == 0:
        return ErrorValue(0.0)
    fam, exact = ctx.greedy_representatives(N)
    vals = ctx.residual_norms(fam)
    return ErrorValue(float(vals.min()), exact)


def sigma_n_exact(seq, N, spec, ctx=None, cap=SUBSET_CAP, threads=1):
    """Optimal N-term error by exhaustive search over all kept sets of size N."""
    ctx = ctx or _Context(seq, spec)
    if ctx.n == 0:
        return ErrorValue(0.0)
    if N >= ctx.n:
        return ErrorValue(0.0)
    count = _comb(ctx.n, N)
    if count > cap:
        raise FeasibilityError(
            f"C({ctx.n},{N}) = {count} kept sets exceeds the exhaustive cap; "
            "use sigma_n_upper"
        )
    best = math.inf
    it = combinations(range(ctx.n), N)
    while True:
        block = list(islice(it, MASK_CHUNK))
        if not block:
            break
        vals = ctx.residual_norms(block, threads=threads)
        best = min(best, float(vals.min()))
    return ErrorValue(best)


@dataclass
class Profile:
    """Error-vs-N table for one sequence in one space."""

    kind: str  # sigma | gamma
    space: str
    values: np.ndarray  # index N = 0 .. n
    flags: list = field(default_factory=list)  # per-N: exact | greedy | sampled

    def value(self, N):
        return self.values[N] if N < len(self.values) else 0.0

    def rows(self):
        return [(N, self.values[N], self.flags[N]) for N in range(len(self.values))]


def _lp_exact_sigma_all(ctx):
    """All sigma_N at once for l^p via the subset-scan kernels (brute force
    over every kept set, exact).

    The subset-sum table indexed by the residual mask gives each residual's
    own sum directly, so small errors are never formed as a difference of two
    large kept/total sums."""
    pw = ctx.mags**ctx.spec.p
    sums = _kernels.subset_sums(np.ascontiguousarray(pw))
    mins, _ = _kernels.extrema_by_popcount(sums, ctx.n)
    resid = mins[::-1][: ctx.n + 1]  # min residual over |kept| = N
    return resid ** (1.0 / ctx.spec.p)


def sigma_profile(seq, spec, method="auto", cap=SUBSET_CAP, threads=1):
    """Profile of optimal errors sigma_N, N = 0..|supp|.

    method: "exact" forces exhaustive search at every N (error beyond cap),
    "greedy" forces the greedy upper bound, "auto" runs the full exhaustive
    profile when the support is small enough for every N to be affordable and
    the uniform greedy bound otherwise.
    """
    ctx = _Context(seq, spec)
    n = ctx.n
    vals = np.zeros(n + 1)
    flags = ["exact"] * (n + 1)
    if n == 0:
        return Profile("sigma", spec.label(), vals, flags)
    if method in ("auto", "exact") and spec.tag == "lp" and n <= KERNEL_SUPPORT_CAP:
        vals[:n] = _lp_exact_sigma_all(ctx)[:n]
        return Profile("sigma", spec.label(), vals, flags)
    whole_exact = 2**n <= 2 * cap
    for N in range(n):
        if method == "exact" or (method == "auto" and whole_exact):
            vals[N] = sigma_n_exact(seq, N, spec, ctx=ctx, cap=cap, threads=threads).value
        else:
            ev = sigma_n_upper(seq, N, spec, ctx=ctx)
            vals[N] = ev.value
            flags[N] = "greedy" if ev.exact else "sampled"
    return Profile("sigma", spec.label(), vals, flags)


def gamma_profile(seq, spec):
    """Profile of greedy errors gamma_N, N = 0..|supp|."""
    ctx = _Context(seq, spec)
    n = ctx.n
    vals = np.zeros(n + 1)
    flags = ["exact"] * (n + 1)
    for N in range(n):
        ev = gamma_n(seq, N, spec, ctx=ctx)
        vals[N] = ev.value
        if not ev.exact:
            flags[N] = "sampled"
    return Profile("gamma", spec.label(), vals, flags)


def aspace_norm(
    seq,
    alpha,
    q,
    spec,
    error_kind="sigma",
    form="full",
    profile=None,
    method="auto",
):
    """Approximation-space quasi-norm built from the sigma or gamma profile.

    full form:   ||x|| + [sum_{N>=1} (N^alpha e_N)^q / N]^(1/q)
    dyadic form: ||x|| + [sum_{k>=0} (2^{k alpha} e_{2^k})^q]^(1/q)
    with sup in place of the sum when q = inf. Terms with N beyond the support
    vanish since e_N = 0 there.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if q <= 0:
        raise ValueError("q must be positive")
    base = ambient_norm(spec, seq)
    if profile is None:
        profile = (
            sigma_profile(seq, spec, method=method)
            if error_kind == "sigma"
            else gamma_profile(seq, spec)
        )
    n = len(profile.values) - 1
    if n <= 0:
        return base
    if form == "full":
        Ns = range(1, n + 1)
        terms = [(N, profile.value(N)) for N in Ns]
    elif form == "dyadic":
        terms = []
        k = 0
        while 2**k <= n:
            terms.append((2**k, profile.value(2**k)))
            k += 1
    else:
        raise ValueError("form must be full or dyadic")
    if math.isinf(q):
        tail = max((N**alpha * e for N, e in terms), default=0.0)
    else:
        weight = (lambda N: 1.0 / N) if form == "full" else (lambda N: 1.0)
        tail = math.fsum((N**alpha * e) ** q * weight(N) for N, e in terms) ** (1.0 / q)
    return base + tail
