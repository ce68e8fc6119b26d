"""Extending partial maps to isomorphisms by combinatorial propagation.

A partial map is grown by three rules until it is total:

* a line with two mapped points goes to the join of their images;
* a point on two mapped lines goes to the meet of their images;
* unmapped points are split by a hash of their relation to the mapped part
  (collinearity with mapped points, incidence with mapped lines), refined
  like colour refinement when needed; classes that are singletons on both
  sides are matched.

A mismatch between the two sides proves that no extension exists.  When the
partition is stable and not discrete the search can branch.  Every returned
map is checked flag by flag before it is handed out.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .incidence import Geometry

COLUMN_CAP = 256


class Contradiction(Exception):
    pass


@dataclass
class _State:
    f: np.ndarray
    finv: np.ndarray
    lf: np.ndarray
    lfinv: np.ndarray

    def copy(self) -> "_State":
        return _State(self.f.copy(), self.finv.copy(), self.lf.copy(), self.lfinv.copy())


def _assign(fwd: np.ndarray, bwd: np.ndarray, xs, ys):
    xs = np.asarray(xs, dtype=np.int64)
    ys = np.asarray(ys, dtype=np.int64)
    if len(xs) == 0:
        return 0
    order = np.argsort(xs, kind="stable")
    xs, ys = xs[order], ys[order]
    keep = np.ones(len(xs), dtype=bool)
    keep[1:] = xs[1:] != xs[:-1]
    if np.any(ys[1:][~keep[1:]] != ys[:-1][~keep[1:]]):
        raise Contradiction("one element, two images")
    xs, ys = xs[keep], ys[keep]
    old = fwd[xs]
    if np.any((old >= 0) & (old != ys)):
        raise Contradiction("image changes")
    new = old < 0
    xs, ys = xs[new], ys[new]
    if len(np.unique(ys)) != len(ys):
        raise Contradiction("two elements, one image")
    back = bwd[ys]
    if np.any(back >= 0):
        raise Contradiction("image already taken")
    fwd[xs] = ys
    bwd[ys] = xs
    return len(xs)


def _meet_rows(dst: Geometry, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    lm = dst.line_matrix
    A, B = lm[a], lm[b]
    eq = A[:, :, None] == B[:, None, :]
    hit = eq.any(axis=2)
    ok = hit.any(axis=1) & (a != b)
    pos = np.argmax(hit, axis=1)
    return np.where(ok, A[np.arange(len(a)), pos], -1)


class Propagator:
    """Propagation between two geometries with uniform line sizes and degrees."""

    def __init__(self, src: Geometry, dst: Geometry, seed: int = 0, column_cap: int = COLUMN_CAP):
        if src.line_matrix is None or src.pencil_matrix is None:
            raise ValueError("source geometry must have uniform line sizes and degrees")
        if dst.line_matrix is None or dst.pencil_matrix is None:
            raise ValueError("target geometry must have uniform line sizes and degrees")
        if (src.P, src.L) != (dst.P, dst.L) or src.line_matrix.shape != dst.line_matrix.shape:
            raise ValueError("geometries have different sizes")
        self.src, self.dst = src, dst
        self.rng = np.random.default_rng(seed)
        self.cap = column_cap
        self.nodes = 0

    def new_state(self) -> _State:
        s, d = self.src, self.dst
        return _State(
            np.full(s.P, -1, np.int64),
            np.full(d.P, -1, np.int64),
            np.full(s.L, -1, np.int64),
            np.full(d.L, -1, np.int64),
        )

    # deterministic rules

    def _lines_from_points(self, st: _State) -> int:
        lm = self.src.line_matrix
        open_ = np.flatnonzero(st.lf < 0)
        if len(open_) == 0:
            return 0
        img = st.f[lm[open_]]
        known = img >= 0
        sel = known.sum(axis=1) >= 2
        if not np.any(sel):
            return 0
        rows, kn = img[sel], known[sel]
        first = np.argsort(~kn, axis=1, kind="stable")[:, :2]
        a = np.take_along_axis(rows, first[:, :1], axis=1)[:, 0]
        b = np.take_along_axis(rows, first[:, 1:2], axis=1)[:, 0]
        lines = self.dst.join_many(a, b)
        if np.any(lines < 0):
            raise Contradiction("collinear points map to noncollinear points")
        return _assign(st.lf, st.lfinv, open_[sel], lines)

    def _points_from_lines(self, st: _State) -> int:
        pm = self.src.pencil_matrix
        open_ = np.flatnonzero(st.f < 0)
        if len(open_) == 0:
            return 0
        img = st.lf[pm[open_]]
        known = img >= 0
        sel = known.sum(axis=1) >= 2
        if not np.any(sel):
            return 0
        rows, kn = img[sel], known[sel]
        first = np.argsort(~kn, axis=1, kind="stable")[:, :2]
        a = np.take_along_axis(rows, first[:, :1], axis=1)[:, 0]
        b = np.take_along_axis(rows, first[:, 1:2], axis=1)[:, 0]
        pts = _meet_rows(self.dst, a, b)
        if np.any(pts < 0):
            raise Contradiction("concurrent lines map to disjoint lines")
        return _assign(st.f, st.finv, open_[sel], pts)

    def _check_flags(self, st: _State):
        lm = self.src.line_matrix
        kl = np.flatnonzero(st.lf >= 0)
        if len(kl) == 0:
            return
        img = st.f[lm[kl]]
        known = img >= 0
        rows = np.broadcast_to(st.lf[kl][:, None], img.shape)
        if not np.all(self.dst.incident_many(img[known], rows[known])):
            raise Contradiction("a flag maps to a non-flag")

    # signatures

    def _signatures(self, st: _State, full: bool):
        s, d = self.src, self.dst
        U = np.flatnonzero(st.f < 0)
        V = np.flatnonzero(st.finv < 0)
        if len(U) != len(V):
            raise Contradiction("unmapped parts differ in size")
        K = np.flatnonzero(st.f >= 0)
        if len(K) > self.cap and not full:
            K = np.sort(self.rng.choice(K, size=self.cap, replace=False))
        w = self.rng.integers(1, 2**63, size=len(K), dtype=np.int64).astype(np.uint64)
        with np.errstate(over="ignore"):
            ks = s.col[np.ix_(U, K)].astype(np.uint64) @ w if len(K) else np.zeros(len(U), np.uint64)
            kd = d.col[np.ix_(V, st.f[K])].astype(np.uint64) @ w if len(K) else np.zeros(len(V), np.uint64)
            wl = self.rng.integers(1, 2**63, size=s.L, dtype=np.int64).astype(np.uint64)
            wl[st.lf < 0] = 0
            wd = np.zeros(d.L, dtype=np.uint64)
            known = st.lf >= 0
            wd[st.lf[known]] = wl[known]
            ls = wl[s.pencil_matrix[U]].sum(axis=1, dtype=np.uint64)
            ld = wd[d.pencil_matrix[V]].sum(axis=1, dtype=np.uint64)
            mix = np.uint64(0x9E3779B97F4A7C15)
            return U, V, ks * mix + ls, kd * mix + ld

    def _refine(self, st: _State, U, V, ks, kd):
        """One colour-refinement step on the unmapped parts."""
        s, d = self.src, self.dst
        both = np.concatenate([ks, kd])
        _, cls = np.unique(both, return_inverse=True)
        cw = self.rng.integers(1, 2**63, size=cls.max() + 1, dtype=np.int64).astype(np.uint64)
        cs, cd = cw[cls[: len(U)]], cw[cls[len(U) :]]
        with np.errstate(over="ignore"):
            ns = s.col[np.ix_(U, U)].astype(np.uint64) @ cs
            nd = d.col[np.ix_(V, V)].astype(np.uint64) @ cd
            mix = np.uint64(0xBF58476D1CE4E5B9)
            return ks * mix + ns, kd * mix + nd

    def _match(self, st: _State, U, V, ks, kd) -> int:
        if not np.array_equal(np.sort(ks), np.sort(kd)):
            raise Contradiction("signature multisets differ")
        uk, counts = np.unique(ks, return_counts=True)
        single = uk[counts == 1]
        if len(single) == 0:
            return 0
        src_pos = np.flatnonzero(np.isin(ks, single))
        order_d = np.argsort(kd)
        dst_pos = order_d[np.searchsorted(kd[order_d], ks[src_pos])]
        return _assign(st.f, st.finv, U[src_pos], V[dst_pos])

    # driver

    def propagate(self, st: _State, refine_rounds: int = 3):
        """Run the rules to a fixed point.  Returns None when the map is total,
        else the stable (U, V, ks, kd) partition data for branching."""
        while True:
            progress = 1
            while progress:
                progress = self._lines_from_points(st) + self._points_from_lines(st)
            self._check_flags(st)
            if np.all(st.f >= 0):
                return None
            U, V, ks, kd = self._signatures(st, full=False)
            if self._match(st, U, V, ks, kd):
                continue
            U, V, ks, kd = self._signatures(st, full=True)
            if self._match(st, U, V, ks, kd):
                continue
            done = False
            for _ in range(refine_rounds):
                ks, kd = self._refine(st, U, V, ks, kd)
                if self._match(st, U, V, ks, kd):
                    done = True
                    break
            if not done:
                return U, V, ks, kd

    def finish(self, st: _State):
        s, d = self.src, self.dst
        lm = s.line_matrix
        lines = d.join_many(st.f[lm[:, 0]], st.f[lm[:, 1]])
        if np.any(lines < 0):
            raise Contradiction("final map does not preserve lines")
        if np.any((st.lf >= 0) & (st.lf != lines)):
            raise Contradiction("final line map disagrees")
        if len(np.unique(lines)) != d.L or len(np.unique(st.f)) != d.P:
            raise Contradiction("final map is not bijective")
        owners = np.repeat(np.arange(s.L, dtype=np.int64), s.line_sizes)
        keys = np.sort(lines[owners] * d.P + st.f[s.line_pts])
        if not np.array_equal(keys, d.flag_keys):
            raise Contradiction("final map is not an isomorphism")
        return st.f.copy(), lines

    def search(self, st: _State, branch: bool, max_nodes: int):
        self.nodes += 1
        if self.nodes > max_nodes:
            raise RuntimeError("search node limit reached")
        try:
            stable = self.propagate(st)
            if stable is None:
                return self.finish(st)
        except Contradiction:
            return None
        if not branch:
            raise RuntimeError("propagation stalled; branching disabled")
        U, V, ks, kd = stable
        # branch on points collinear with the mapped part but off every mapped
        # line: each choice then fixes a new line, and the positions of points
        # on a known line (a cross-ratio question) are left to propagation
        on_known = (st.lf[self.src.pencil_matrix[U]] >= 0).any(axis=1)
        near = self.src.col[np.ix_(U, np.flatnonzero(st.f >= 0))].any(axis=1)
        fresh = near & ~on_known
        pool = fresh if fresh.any() else (near if near.any() else np.ones(len(U), bool))
        uk, counts = np.unique(ks, return_counts=True)
        cand = np.unique(ks[pool])
        csize = counts[np.searchsorted(uk, cand)]
        best = cand[np.argmin(csize)]
        x = int(U[np.flatnonzero(ks == best)[0]])
        for y in V[kd == best]:
            child = st.copy()
            try:
                _assign(child.f, child.finv, [x], [int(y)])
            except Contradiction:
                continue
            out = self.search(child, branch, max_nodes)
            if out is not None:
                return out
        return None


def extend_map(
    src: Geometry,
    dst: Geometry,
    points=(),
    lines=(),
    branch: bool = False,
    max_nodes: int = 5000,
    seed: int = 0,
):
    """Extend a partial isomorphism ``src -> dst``.

    ``points`` and ``lines`` are (source, image) pairs.  Returns
    ``(point_map, line_map)`` or None when no extension exists.  Without
    ``branch`` a stalled propagation raises RuntimeError instead of guessing.
    """
    pr = Propagator(src, dst, seed=seed)
    st = pr.new_state()
    try:
        pts = np.asarray(list(points), dtype=np.int64).reshape(-1, 2)
        lns = np.asarray(list(lines), dtype=np.int64).reshape(-1, 2)
        _assign(st.f, st.finv, pts[:, 0], pts[:, 1])
        _assign(st.lf, st.lfinv, lns[:, 0], lns[:, 1])
    except Contradiction:
        return None
    return pr.search(st, branch, max_nodes)


def extend_automorphism(g: Geometry, points=(), lines=(), branch: bool = False, max_nodes: int = 5000, seed: int = 0):
    return extend_map(g, g, points, lines, branch=branch, max_nodes=max_nodes, seed=seed)


def find_isomorphism(src: Geometry, dst: Geometry, max_nodes: int = 5000, seed: int = 0):
    """Some isomorphism ``src -> dst`` or None (branching search)."""
    return extend_map(src, dst, branch=True, max_nodes=max_nodes, seed=seed)
