"""Vectorized subset-norm evaluators.

A batch evaluator is built once per (space, support) and then maps a boolean
selection matrix (one row per subset of the support) to the corresponding
quasi-norms. The combinatorial engines (exact N-term search, greedy tie
enumeration, exhaustive democracy scans) all run on top of this layer; its
agreement with the scalar evaluators in spaces.py is asserted by tests.

Evaluators work in linear float range and are meant for the moderate supports
reached by exhaustive scans; deep structured families go through the
log-robust scalar path instead.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import NumericError
from .indices import canonical_key
from .sequences import Sequence
from .spaces import LN2, SpaceSpec, square_function


class BatchNorm:
    """Callable mapping subset-selection rows to norms."""

    def __init__(self, indices, fn):
        self.indices = list(indices)
        self.pos = {idx: i for i, idx in enumerate(self.indices)}
        self._fn = fn

    def __len__(self):
        return len(self.indices)

    def norms(self, masks):
        masks = np.asarray(masks)
        if masks.ndim != 2 or masks.shape[1] != len(self.indices):
            raise ValueError("mask matrix shape mismatch")
        return self._fn(masks.astype(float))

    def norm_of(self, subset):
        mask = np.zeros((1, len(self.indices)))
        for idx in subset:
            mask[0, self.pos[idx]] = 1.0
        return float(self.norms(mask)[0])


def _check_finite(*arrays):
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise NumericError(
                "batch evaluator out of linear float range; use the scalar path"
            )


def _cube_incidence(spec, indices, values, inner_r, scale_exp):
    """Atoms of the full-support refinement plus the (atom x index) matrix of
    r-th power weight contributions."""
    seq = Sequence(dict(zip(indices, values)), spec.universe)
    f = square_function(seq, inner_r, scale_exp)
    if f.regions is None:
        raise AssertionError("cube path must carry regions")
    measures = np.exp(f.ln_measures)
    atom_cubes = f.regions
    n = len(indices)
    pos = {idx: i for i, idx in enumerate(indices)}
    ln_w = np.array(
        [scale_exp * idx.log2_measure * LN2 + math.log(abs(values[i]))
         for i, idx in enumerate(indices)]
    )
    with np.errstate(over="ignore"):
        wr = np.exp(inner_r * ln_w)
    im = np.zeros((len(atom_cubes), n))
    levels = sorted({idx.j for idx in indices})
    for a, cube in enumerate(atom_cubes):
        im[a, pos[cube]] = wr[pos[cube]]
        for lev in (l for l in levels if l < cube.j):
            anc = cube.ancestor(lev)
            i = pos.get(anc)
            if i is not None:
                im[a, i] = wr[i]
    _check_finite(measures, im)
    return measures, im


def _rect_incidence(spec, indices, values, inner_r, scale_exp):
    breaks = []
    d = spec.d
    for axis in range(d):
        pts = set()
        for rect in indices:
            lo, hi = rect.intervals[axis].support()[0]
            pts.add(lo)
            pts.add(hi)
        breaks.append(np.array(sorted(pts)))
    shape = tuple(len(b) - 1 for b in breaks)
    cells = int(np.prod(shape))
    n = len(indices)
    if cells * n > 5 * 10**7:
        raise NumericError("rectangle incidence too large for the batch engine")
    im = np.zeros((cells, n))
    meas = np.array([1.0])
    for axis in range(d):
        meas = np.multiply.outer(meas, np.diff(breaks[axis]))
    meas = meas.reshape(-1)
    grid = np.zeros(shape)
    for i, rect in enumerate(indices):
        with np.errstate(over="ignore"):
            wr = float(np.exp(
                inner_r * (scale_exp * rect.log2_measure * LN2 + math.log(abs(values[i])))
            ))
        sl = []
        for axis in range(d):
            lo, hi = rect.intervals[axis].support()[0]
            a = int(np.searchsorted(breaks[axis], lo))
            b = int(np.searchsorted(breaks[axis], hi))
            sl.append(slice(a, b))
        grid[...] = 0.0
        grid[tuple(sl)] = wr
        im[:, i] = grid.reshape(-1)
    _check_finite(meas, im)
    return meas, im


def _lorentz_rows(values, measures, p, q):
    """Row-wise L^{p,q} of step functions sharing one measure vector."""
    order = np.argsort(-values, axis=1, kind="stable")
    v = np.take_along_axis(values, order, axis=1)
    m = np.broadcast_to(measures, values.shape)
    m = np.take_along_axis(m, order, axis=1)
    b = np.cumsum(m, axis=1)
    a = np.concatenate([np.zeros((values.shape[0], 1)), b[:, :-1]], axis=1)
    qp = q / p
    contrib = (p / q) * (b**qp - a**qp) * v**q
    return np.sum(contrib, axis=1) ** (1.0 / q)


def batch_evaluator(spec: SpaceSpec, indices, values) -> BatchNorm:
    """Build a subset-norm evaluator for raw coefficients `values` at `indices`.

    The index order of the selection columns is the canonical order.
    """
    order = sorted(range(len(indices)), key=lambda i: canonical_key(indices[i]))
    indices = [indices[i] for i in order]
    values = np.asarray([abs(values[i]) for i in order], dtype=float)
    if np.any(values == 0.0):
        raise ValueError("batch evaluator needs nonzero coefficients")

    # the additive paths reduce with (masks * w).sum(axis=1) rather than a BLAS
    # matmul: pairwise reduction over a fixed axis length is independent of the
    # batch shape, so the same subset row gives the same float in every call
    if spec.tag == "lp":
        pw = values**spec.p
        _check_finite(pw)

        def fn(masks):
            return (masks * pw).sum(axis=1) ** (1.0 / spec.p)

    elif spec.tag == "lplq":
        comp = np.array([idx.component for idx in indices])
        pwa = np.where(comp == 0, values**spec.p, 0.0)
        pwb = np.where(comp == 1, values**spec.q, 0.0)
        _check_finite(pwa, pwb)

        def fn(masks):
            return (masks * pwa).sum(axis=1) ** (1.0 / spec.p) + (
                masks * pwb
            ).sum(axis=1) ** (1.0 / spec.q)

    elif spec.tag == "fpr":
        meas, im = _cube_incidence(spec, indices, values, spec.r, -spec.s / spec.d - 0.5)
        pr = spec.p / spec.r

        def fn(masks):
            inner = masks @ im.T
            return (inner**pr @ meas) ** (1.0 / spec.p)

    elif spec.tag == "lpq":
        meas, im = _cube_incidence(spec, indices, values, 2.0, -0.5)

        def fn(masks):
            inner = np.sqrt(masks @ im.T)
            return _lorentz_rows(inner, meas, spec.p, spec.q)

    elif spec.tag == "orlicz":
        meas, im = _cube_incidence(spec, indices, values, 2.0, -0.5)
        phi = spec.orlicz
        inv1 = phi.inverse(1.0)

        def fn(masks):
            v = np.sqrt(masks @ im.T)
            lin = v @ meas
            out = np.zeros(len(lin))
            live = lin > 0
            if not np.any(live):
                return out
            vv = v[live]
            hi = lin[live] / inv1
            for _ in range(200):
                over = np.sum(meas * phi(vv / hi[:, None]), axis=1) > 1.0
                if not np.any(over):
                    break
                hi[over] *= 2.0
            else:
                raise NumericError("luxemburg bracket expansion failed")
            lo = hi.copy()
            for _ in range(60):
                lo_next = lo * 0.5
                under = np.sum(meas * phi(vv / lo_next[:, None]), axis=1) <= 1.0
                if not np.any(under):
                    break
                lo = np.where(under, lo_next, lo)
            lo *= 0.5
            # 44 halvings bring the bracket below 1e-13 relative width
            for _ in range(44):
                mid = 0.5 * (lo + hi)
                over = np.sum(meas * phi(vv / mid[:, None]), axis=1) > 1.0
                lo = np.where(over, mid, lo)
                hi = np.where(over, hi, mid)
            out[live] = hi
            return out

    elif spec.tag == "hyp":
        meas, im = _rect_incidence(spec, indices, values, 2.0, -0.5)
        p2 = spec.p / 2.0

        def fn(masks):
            inner = masks @ im.T
            return (inner**p2 @ meas) ** (1.0 / spec.p)

    elif spec.tag == "bmo":
        cands = {}
        root_level = min(iv.j for iv in indices)
        while len({iv.ancestor(root_level) for iv in indices}) > 1:
            root_level -= 1
        rows = []
        for i, iv in enumerate(indices):
            contrib = values[i] ** spec.r * iv.measure
            for lev in range(iv.j, root_level - 1, -1):
                anc = iv.ancestor(lev)
                if anc not in cands:
                    cands[anc] = len(cands)
                    rows.append(np.zeros(len(indices)))
                rows[cands[anc]][i] = contrib / anc.measure
        cmat = np.array(rows)
        _check_finite(cmat)

        def fn(masks):
            return np.max(masks @ cmat.T, axis=1) ** (1.0 / spec.r)

    else:
        raise AssertionError(spec.tag)

    return BatchNorm(indices, fn)
