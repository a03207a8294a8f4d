"""Left/right democracy functions: exhaustive scans over finite universes and
structured extremizer families, the half-subset stability check, and the
democracy functions induced on the approximation spaces."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, islice

import numpy as np

from .batch import batch_evaluator
from .errors import FeasibilityError, ParseError
from .greedy import MASK_CHUNK, aspace_norm
from .indices import Cube, Rect, interval
from .sequences import indicator
from .spaces import SpaceSpec, ambient_norm, element_norm

EXHAUSTIVE_CAP = 500_000
ORLICZ_LEVEL_RANGE = 61  # levels probed when optimizing the same-size family
PROPERTY_H_BAND = 4.0


# ---------------------------------------------------------------------------
# universes
# ---------------------------------------------------------------------------

@dataclass
class Universe:
    kind: str
    indices: list
    label: str = ""

    def __len__(self):
        return len(self.indices)


def default_universe(spec: SpaceSpec, size=None):
    """Finite surrogate index family per space universe.

    integers 1..64; cubes of levels 0..J in [0,1)^d with |U| <= 4096;
    intervals of [0,1) to depth 12; rectangles of [0,1)^2 with level sum <= 10;
    paired streams of 32 + 32. Cached per (universe kind, dimension, size);
    treat the returned index list as read-only.
    """
    return _default_universe_cached(spec.universe, spec.d, size)


@lru_cache(maxsize=64)
def _default_universe_cached(kind, d, size):
    if kind == "integer":
        n = size or 64
        return Universe(kind, list(range(1, n + 1)), f"integers 1..{n}")
    if kind == "pair":
        from .indices import Pair

        n = size or 32
        idx = [Pair(0, k) for k in range(1, n + 1)] + [Pair(1, k) for k in range(1, n + 1)]
        return Universe(kind, idx, f"pair streams 1..{n}")
    if kind == "interval":
        depth = size or 12
        idx = [interval(j, k) for j in range(depth + 1) for k in range(2**j)]
        return Universe(kind, idx, f"intervals to depth {depth}")
    if kind == "cube":
        cap = size or 4096
        idx = []
        j = 0
        while len(idx) + 2 ** (j * d) <= cap:
            for flat in range(2 ** (j * d)):
                k = []
                rem = flat
                for _ in range(d):
                    k.append(rem % 2**j)
                    rem //= 2**j
                idx.append(Cube(j, tuple(k)))
            j += 1
        return Universe(kind, idx, f"cubes to level {j-1} in [0,1)^{d}")
    if kind == "rect":
        if d != 2:
            raise FeasibilityError("default rectangle universe is two-dimensional")
        cap = size or 10
        idx = []
        for total in range(cap + 1):
            for j1 in range(total + 1):
                j2 = total - j1
                for k1 in range(2**j1):
                    for k2 in range(2**j2):
                        idx.append(Rect((interval(j1, k1), interval(j2, k2))))
        return Universe(kind, idx, f"rectangles with level sum <= {cap}")
    raise AssertionError(kind)


# ---------------------------------------------------------------------------
# structured extremizer families
# ---------------------------------------------------------------------------

def _same_size_cubes(d, N, level=None):
    if level is None:
        level = max(1, math.ceil(math.log2(N) / d)) if N > 1 else 1
    if N > 2 ** (level * d):
        raise FeasibilityError(f"cannot place {N} disjoint cubes at level {level}")
    out = []
    for flat in range(N):
        k = []
        rem = flat
        for _ in range(d):
            k.append(rem % 2**level)
            rem //= 2**level
        out.append(Cube(level, tuple(k)))
    return out


def structured_family(spec: SpaceSpec, N, family, level=None):
    """Index set of the named extremizer family at size N.

    Families: same-size-disjoint, different-sizes, nested-tower, full-tree,
    level-optimized (Orlicz same-size at the ratio-maximizing level),
    fixed-size-rects (all rectangles of one size, sliced to N canonically),
    stream-a / stream-b / balanced (paired-stream universes).
    """
    kind = spec.universe
    if kind == "integer":
        return list(range(1, N + 1))
    if kind == "pair":
        from .indices import Pair

        if family == "stream-b":
            return [Pair(1, k) for k in range(1, N + 1)]
        if family == "balanced":
            half = N // 2
            return [Pair(0, k) for k in range(1, N - half + 1)] + [
                Pair(1, k) for k in range(1, half + 1)
            ]
        return [Pair(0, k) for k in range(1, N + 1)]
    if kind in ("cube", "interval"):
        d = spec.d if kind == "cube" else 1
        if family == "same-size-disjoint":
            return _same_size_cubes(d, N, level)
        if family == "different-sizes":
            return [Cube(i, (1,) + (0,) * (d - 1)) for i in range(1, N + 1)]
        if family == "nested-tower":
            return [Cube(i, (0,) * d) for i in range(N)]
        if family == "full-tree":
            out = []
            j = 0
            while len(out) < N:
                out.extend(_same_size_cubes(d, min(2 ** (j * d), N - len(out)), j))
                j += 1
            return out
        if family == "level-optimized":
            if spec.tag != "orlicz":
                raise ParseError("level-optimized family is for orlicz spaces")
            phi = spec.orlicz.fundamental
            best, best_level = -math.inf, 0
            for lev in range(ORLICZ_LEVEL_RANGE):
                s = 2.0 ** (-lev * d)
                ratio = phi(N * s) / phi(s)
                if ratio > best:
                    best, best_level = ratio, lev
            lev = max(best_level, math.ceil(math.log2(max(N, 2)) / d))
            return _same_size_cubes(d, N, lev)
        raise ParseError(f"family {family!r} not available for {kind} universes")
    if kind == "rect":
        if spec.d != 2:
            raise FeasibilityError("rectangle families are two-dimensional")
        if family == "same-size-disjoint":
            lev = level if level is not None else max(1, math.ceil(math.log2(N)))
            if N > 2**lev:
                raise FeasibilityError("too many disjoint rectangles at this level")
            return [Rect((interval(lev, k), interval(0, 0))) for k in range(N)]
        if family == "different-sizes":
            return [Rect((interval(i, 1), interval(0, 0))) for i in range(1, N + 1)]
        if family == "fixed-size-rects":
            n = 0
            while (n + 1) * 2**n < N:
                n += 1
            out = []
            for j1 in range(n + 1):
                j2 = n - j1
                for k1 in range(2**j1):
                    for k2 in range(2**j2):
                        out.append(Rect((interval(j1, k1), interval(j2, k2))))
                        if len(out) == N:
                            return out
            return out
        raise ParseError(f"family {family!r} not available for rect universes")
    raise AssertionError(kind)


FAMILY_CATALOG = {
    "integer": ["same-size-disjoint"],
    "pair": ["stream-a", "stream-b", "balanced"],
    "cube": ["same-size-disjoint", "different-sizes", "nested-tower", "full-tree"],
    "interval": ["same-size-disjoint", "different-sizes", "nested-tower", "full-tree"],
    "rect": ["same-size-disjoint", "different-sizes", "fixed-size-rects"],
}


def family_catalog(spec: SpaceSpec):
    cat = list(FAMILY_CATALOG[spec.universe])
    if spec.tag == "orlicz":
        cat.append("level-optimized")
    return cat


def normalized_indicator_norm(spec, indices):
    """||sum_Gamma e_k/||e_k|| || for the index set Gamma."""
    return ambient_norm(spec, indicator(indices, spec.universe))


def h_structured(spec, N, family, level=None):
    """Democracy value of the canonical representative of a structured family."""
    return normalized_indicator_norm(spec, structured_family(spec, N, family, level))


def h_exhaustive(spec, universe: Universe, N, cap=EXHAUSTIVE_CAP, threads=1):
    """Exact min/max of the normalized indicator norm over all size-N subsets.

    Returns (h_ell, h_r, argmin set, argmax set). Subset chunks evaluate in
    parallel when threads > 1; the min/max reduction is order-independent.
    """
    count = math.comb(len(universe), N)
    if count > cap:
        raise FeasibilityError(
            f"C({len(universe)},{N}) = {count} subsets exceeds the exhaustive cap; "
            "use structured families"
        )
    idx = universe.indices
    vals = [1.0 / element_norm(spec, i) for i in idx]
    ev = batch_evaluator(spec, idx, vals)
    cols = np.array([ev.pos[i] for i in idx])

    def scan(block):
        kept = np.asarray(block, dtype=np.intp)
        masks = np.zeros((len(block), len(idx)))
        rows = np.repeat(np.arange(len(block)), N)
        masks[rows, cols[kept.reshape(-1)]] = 1.0
        out = ev.norms(masks)
        i_min, i_max = int(np.argmin(out)), int(np.argmax(out))
        return (float(out[i_min]), block[i_min], float(out[i_max]), block[i_max])

    it = combinations(range(len(idx)), N)
    blocks = iter(lambda: list(islice(it, MASK_CHUNK)), [])
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(threads) as ex:
            results = list(ex.map(scan, blocks))
    else:
        results = [scan(b) for b in blocks]
    best_min, block_min, _, _ = min(results, key=lambda t: t[0])
    _, _, best_max, block_max = max(results, key=lambda t: t[2])
    return (
        best_min,
        best_max,
        [idx[i] for i in block_min],
        [idx[i] for i in block_max],
    )


@dataclass
class DemocracyRow:
    N: int
    h_ell: float
    h_r: float
    method: str  # exhaustive | structured
    bound_direction: str
    attaining: dict = field(default_factory=dict)


@dataclass
class DemocracyProfile:
    spec_label: str
    rho: float
    rows: list
    checks: dict = field(default_factory=dict)

    def column(self, name):
        return np.array([getattr(r, name) for r in self.rows])


def democracy_profile(spec, N_list, strategy="auto", universe=None, cap=EXHAUSTIVE_CAP):
    """Democracy functions over N_list with structural checks.

    strategy: exhaustive | structured | auto (exhaustive where the subset count
    permits). Exhaustive rows are exact over the finite universe; structured
    rows bound h_ell from above and h_r from below.
    """
    rows = []
    if universe is None and strategy != "structured":
        universe = default_universe(spec)
    for N in N_list:
        use_exh = strategy == "exhaustive" or (
            strategy == "auto"
            and universe is not None
            and N <= len(universe)
            and math.comb(len(universe), N) <= cap
        )
        if use_exh:
            h_ell, h_r, arg_min, arg_max = h_exhaustive(spec, universe, N, cap=cap)
            rows.append(
                DemocracyRow(
                    N, h_ell, h_r, "exhaustive", "exact-on-universe",
                    {"min": arg_min, "max": arg_max},
                )
            )
        else:
            vals = {}
            for family in family_catalog(spec):
                try:
                    vals[family] = h_structured(spec, N, family)
                except FeasibilityError:
                    continue
            if not vals:
                raise FeasibilityError(f"no structured family feasible at N={N}")
            fmin = min(vals, key=vals.get)
            fmax = max(vals, key=vals.get)
            rows.append(
                DemocracyRow(
                    N, vals[fmin], vals[fmax], "structured",
                    "h_ell:upper,h_r:lower",
                    {"min": fmin, "max": fmax, "values": vals},
                )
            )
    prof = DemocracyProfile(spec.label(), spec.rho, rows)
    prof.checks = _structure_checks(prof)
    return prof


def _structure_checks(prof: DemocracyProfile):
    Ns = prof.column("N")
    he = prof.column("h_ell")
    hr = prof.column("h_r")
    rho = prof.rho
    bounds_ok = bool(np.all((1.0 - 1e-9 <= he) & (he <= hr * (1 + 1e-12)))
                     and np.all(hr <= Ns ** (1.0 / rho) * (1 + 1e-9)))
    exact = np.array([r.method == "exhaustive" for r in prof.rows])
    mono_ok = True
    if exact.any():
        idx = np.nonzero(exact)[0]
        mono_ok = bool(
            np.all(np.diff(he[idx]) >= -1e-9) and np.all(np.diff(hr[idx]) >= -1e-9)
        )
    doubling = []
    for i, N in enumerate(Ns):
        j = np.nonzero(Ns == 2 * N)[0]
        if len(j):
            doubling.append(hr[j[0]] / hr[i])
    step = []
    for i, N in enumerate(Ns):
        j = np.nonzero(Ns == N + 1)[0]
        if len(j):
            step.append(he[j[0]] / he[i])
    return {
        "bounds_ok": bounds_ok,
        "monotone_ok": mono_ok,
        "h_r_doubling_constant": max(doubling) if doubling else None,
        "h_ell_step_constant": max(step) if step else None,
    }


# ---------------------------------------------------------------------------
# half-subset stability (the extremizer-family robustness check)
# ---------------------------------------------------------------------------

def default_stable_family(spec, n):
    """The family used for the half-subset check at size 2^n, following the
    extremizer structure of each space."""
    N = 2**n
    if spec.tag == "orlicz":
        return structured_family(spec, N, "level-optimized")
    if spec.tag == "lpq":
        fam = "same-size-disjoint" if spec.p <= spec.q else "different-sizes"
        return structured_family(spec, N, fam)
    if spec.tag == "hyp":
        return structured_family(spec, N, "fixed-size-rects")
    if spec.universe in ("cube", "interval"):
        return structured_family(spec, N, "same-size-disjoint")
    return structured_family(spec, N, "same-size-disjoint")


def property_h_check(spec, n, gamma_set=None, samples=200, rng=None, band=PROPERTY_H_BAND):
    """Evaluate normalized indicator norms over half-subsets of a size-2^n set.

    Passes when the spread max/min over tested half-subsets is within the
    declared band. Also reports the ratio band against the structured
    right-democracy estimate at 2^(n-1).
    """
    rng = rng or np.random.default_rng(0)
    gamma_set = gamma_set if gamma_set is not None else default_stable_family(spec, n)
    size = len(gamma_set)
    if size % 2:
        raise ValueError("the tested set must have even size")
    half = size // 2
    subsets = [gamma_set[:half], gamma_set[half:], gamma_set[::2]]
    total = math.comb(size, half)
    if total <= samples:
        subsets = [list(c) for c in combinations(gamma_set, half)]
    else:
        for _ in range(samples):
            pick = rng.choice(size, size=half, replace=False)
            subsets.append([gamma_set[i] for i in sorted(pick)])
    vals = np.array([normalized_indicator_norm(spec, s) for s in subsets])
    href = max(
        _structured_or_none(spec, half, fam) or 0.0 for fam in family_catalog(spec)
    )
    spread = float(vals.max() / vals.min())
    return {
        "n": n,
        "set_size": size,
        "tested": len(subsets),
        "min": float(vals.min()),
        "max": float(vals.max()),
        "spread": spread,
        "h_r_reference": href,
        "ratio_to_reference": [float(vals.min() / href), float(vals.max() / href)],
        "passed": spread <= band,
        "values": vals.tolist(),
    }


def _structured_or_none(spec, N, family):
    try:
        return h_structured(spec, N, family)
    except (FeasibilityError, ParseError):
        return None


# ---------------------------------------------------------------------------
# democracy functions of the approximation spaces
# ---------------------------------------------------------------------------

def induced_h(spec, alpha, q, mode, universe: Universe, N, cap=EXHAUSTIVE_CAP):
    """Min/max over |Gamma| = N of the approximation-space quasi-norm of the
    normalized indicator (sigma-built for mode "aspace", gamma-built for
    mode "gclass")."""
    if mode not in ("aspace", "gclass"):
        raise ParseError("mode must be aspace or gclass")
    count = math.comb(len(universe), N)
    if count > cap:
        raise FeasibilityError(f"C({len(universe)},{N}) exceeds the cap")
    kind = "sigma" if mode == "aspace" else "gamma"
    best_min, best_max = math.inf, -math.inf
    for kept in combinations(universe.indices, N):
        seq = indicator(kept, spec.universe)
        val = aspace_norm(seq, alpha, q, spec, error_kind=kind)
        best_min = min(best_min, val)
        best_max = max(best_max, val)
    return best_min, best_max
