"""Point-line incidence structures and their validators.

A :class:`Geometry` is stored twice: as compressed line->points and
point->lines lists, and as a dense boolean collinearity matrix.  The dense
matrix is what makes the counting checks cheap; for the largest structure
handled here (7300 points) it costs about 53 MB.
"""

from __future__ import annotations

import enum
import io
import os
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

WITNESS_CAP = 16
EXHAUSTIVE_PAIR_LIMIT = 5 * 10**8


class GeometryError(ValueError):
    pass


def _csr(groups, n_groups, values):
    """Group ``values`` by ``groups`` (both 1-d), returning (ptr, sorted values)."""
    order = np.lexsort((values, groups))
    counts = np.bincount(groups, minlength=n_groups)
    ptr = np.zeros(n_groups + 1, dtype=np.int64)
    np.cumsum(counts, out=ptr[1:])
    return ptr, values[order].astype(np.int64)


class Geometry:
    """Immutable point-line geometry with integer ids.

    ``lines`` is either a sequence of point-id sequences or a 2-d integer
    array with one row per line.  Point lists are stored sorted.
    """

    def __init__(self, lines, n_points: int, model=None, name: str = ""):
        if isinstance(lines, np.ndarray) and lines.ndim == 2:
            rows = np.sort(lines.astype(np.int64), axis=1)
            sizes = np.full(len(rows), rows.shape[1], dtype=np.int64)
            flat = rows.reshape(-1)
        else:
            rows = [np.sort(np.asarray(list(l), dtype=np.int64)) for l in lines]
            sizes = np.array([len(r) for r in rows], dtype=np.int64)
            flat = np.concatenate(rows) if rows else np.zeros(0, dtype=np.int64)
        self.n_points = int(n_points)
        self.n_lines = len(sizes)
        if len(flat) and (flat.min() < 0 or flat.max() >= self.n_points):
            raise GeometryError("point id out of range")
        self.line_ptr = np.zeros(self.n_lines + 1, dtype=np.int64)
        np.cumsum(sizes, out=self.line_ptr[1:])
        self.line_pts = flat
        owner = np.repeat(np.arange(self.n_lines), sizes)
        if len(flat) and np.any((flat[1:] == flat[:-1]) & (owner[1:] == owner[:-1])):
            raise GeometryError("a line repeats a point")
        self.point_ptr, self.point_lines_flat = _csr(flat, self.n_points, owner)
        self.model = model
        self.name = name
        for arr in (self.line_ptr, self.line_pts, self.point_ptr, self.point_lines_flat):
            arr.setflags(write=False)
        self._check_pairs()

    # basic access

    @property
    def P(self) -> int:
        return self.n_points

    @property
    def L(self) -> int:
        return self.n_lines

    def line(self, i: int) -> np.ndarray:
        return self.line_pts[self.line_ptr[i] : self.line_ptr[i + 1]]

    def pencil(self, x: int) -> np.ndarray:
        return self.point_lines_flat[self.point_ptr[x] : self.point_ptr[x + 1]]

    @cached_property
    def line_sizes(self) -> np.ndarray:
        return np.diff(self.line_ptr)

    @cached_property
    def point_degrees(self) -> np.ndarray:
        return np.diff(self.point_ptr)

    @cached_property
    def line_matrix(self) -> np.ndarray | None:
        """Lines as a 2-d array when all lines have the same size, else None."""
        if self.n_lines == 0 or not np.all(self.line_sizes == self.line_sizes[0]):
            return None
        m = self.line_pts.reshape(self.n_lines, int(self.line_sizes[0]))
        return m

    @cached_property
    def pencil_matrix(self) -> np.ndarray | None:
        if self.n_points == 0 or not np.all(self.point_degrees == self.point_degrees[0]):
            return None
        return self.point_lines_flat.reshape(self.n_points, int(self.point_degrees[0]))

    def lines_as_lists(self) -> list[list[int]]:
        return [self.line(i).tolist() for i in range(self.n_lines)]

    # pair and flag tables

    def _pairs(self):
        a, b, owner = [], [], []
        for k in np.unique(self.line_sizes):
            sel = np.flatnonzero(self.line_sizes == k)
            if k < 2 or len(sel) == 0:
                continue
            rows = self.line_pts[self.line_ptr[sel][:, None] + np.arange(k)]
            i, j = np.triu_indices(k, 1)
            a.append(rows[:, i].reshape(-1))
            b.append(rows[:, j].reshape(-1))
            owner.append(np.repeat(sel, len(i)))
        if not a:
            z = np.zeros(0, dtype=np.int64)
            return z, z, z
        return np.concatenate(a), np.concatenate(b), np.concatenate(owner)

    def _check_pairs(self):
        a, b, owner = self._pairs()
        keys = a * self.n_points + b
        order = np.argsort(keys, kind="stable")
        keys = keys[order]
        dup = np.flatnonzero(keys[1:] == keys[:-1])
        if len(dup):
            k = int(keys[dup[0]])
            raise GeometryError(
                f"points {k // self.n_points} and {k % self.n_points} share two lines"
            )
        self._pair_keys = keys
        self._pair_lines = owner[order]

    def join(self, x: int, y: int) -> int:
        """Line through two distinct points, or -1."""
        return int(self.join_many(np.array([x]), np.array([y]))[0])

    def join_many(self, xs, ys) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.int64)
        ys = np.asarray(ys, dtype=np.int64)
        lo, hi = np.minimum(xs, ys), np.maximum(xs, ys)
        keys = lo * self.n_points + hi
        if len(self._pair_keys) == 0:
            return np.full(len(keys), -1, dtype=np.int64)
        # sorted queries keep the binary searches cache friendly
        order = np.argsort(keys)
        pos = np.empty(len(keys), dtype=np.int64)
        pos[order] = np.searchsorted(self._pair_keys, keys[order])
        pos = np.minimum(pos, len(self._pair_keys) - 1)
        hit = (self._pair_keys[pos] == keys) & (lo != hi)
        return np.where(hit, self._pair_lines[pos], -1)

    @cached_property
    def flag_keys(self) -> np.ndarray:
        owner = np.repeat(np.arange(self.n_lines, dtype=np.int64), self.line_sizes)
        return np.sort(owner * self.n_points + self.line_pts)

    def incident_many(self, pts, lines) -> np.ndarray:
        keys = np.asarray(lines, dtype=np.int64) * self.n_points + np.asarray(pts, dtype=np.int64)
        fk = self.flag_keys
        if len(fk) == 0:
            return np.zeros(len(keys), dtype=bool)
        pos = np.minimum(np.searchsorted(fk, keys), len(fk) - 1)
        return fk[pos] == keys

    def incident(self, x: int, line: int) -> bool:
        return bool(self.incident_many([x], [line])[0])

    def meet(self, a: int, b: int) -> int:
        """Common point of two distinct lines, or -1."""
        common = np.intersect1d(self.line(a), self.line(b), assume_unique=True)
        if a == b or len(common) == 0:
            return -1
        return int(common[0])

    # collinearity

    @cached_property
    def col(self) -> np.ndarray:
        """Dense collinearity matrix; every point is collinear with itself."""
        c = np.zeros((self.n_points, self.n_points), dtype=bool)
        a = self._pair_keys // self.n_points
        b = self._pair_keys % self.n_points
        c[a, b] = True
        c[b, a] = True
        np.fill_diagonal(c, True)
        c.setflags(write=False)
        return c

    @cached_property
    def col_words(self) -> np.ndarray:
        """Collinearity rows packed into 64-bit words for popcount scans."""
        packed = np.packbits(self.col, axis=1, bitorder="little")
        pad = (-packed.shape[1]) % 8
        if pad:
            packed = np.concatenate([packed, np.zeros((self.n_points, pad), np.uint8)], axis=1)
        return np.ascontiguousarray(packed).view(np.uint64)

    def collinear(self, x: int, y: int) -> bool:
        return bool(self.col[x, y])

    def lines_meeting(self, pts) -> np.ndarray:
        """Sorted ids of the lines through at least one of ``pts``."""
        pts = np.asarray(pts, dtype=np.int64)
        if len(pts) == 0:
            return np.zeros(0, dtype=np.int64)
        parts = [self.pencil(int(x)) for x in pts]
        return np.unique(np.concatenate(parts))

    def line_mask_of(self, pts) -> np.ndarray:
        m = np.zeros(self.n_lines, dtype=bool)
        m[self.lines_meeting(pts)] = True
        return m

    def dual(self, name: str = "") -> "Geometry":
        """Swap the roles of points and lines (ids are kept)."""
        if self.pencil_matrix is not None:
            return Geometry(self.pencil_matrix, self.n_lines, name=name)
        return Geometry([self.pencil(x) for x in range(self.n_points)], self.n_lines, name=name)

    def same_as(self, other: "Geometry") -> bool:
        return (
            self.n_points == other.n_points
            and self.n_lines == other.n_lines
            and np.array_equal(self.line_ptr, other.line_ptr)
            and np.array_equal(self.line_pts, other.line_pts)
        )

    def __repr__(self):
        tag = f" {self.name}" if self.name else ""
        return f"<Geometry{tag}: {self.n_points} points, {self.n_lines} lines>"


def build_geometry(line_point_lists, point_count: int, model=None, name: str = "") -> Geometry:
    return Geometry(line_point_lists, point_count, model=model, name=name)


# Subgeometries


@dataclass(frozen=True, eq=False)
class Subgeometry:
    parent: Geometry
    points: np.ndarray
    lines: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "points", np.unique(np.asarray(self.points, dtype=np.int64)))
        object.__setattr__(self, "lines", np.unique(np.asarray(self.lines, dtype=np.int64)))

    @cached_property
    def point_mask(self) -> np.ndarray:
        m = np.zeros(self.parent.n_points, dtype=bool)
        m[self.points] = True
        return m

    @cached_property
    def line_mask(self) -> np.ndarray:
        m = np.zeros(self.parent.n_lines, dtype=bool)
        m[self.lines] = True
        return m

    @property
    def is_closed(self) -> bool:
        # every listed line keeps at least one point and only known points count
        return all(self.point_mask[self.parent.line(int(l))].any() for l in self.lines)

    @property
    def is_full(self) -> bool:
        g = self.parent
        return all(self.point_mask[g.line(int(l))].all() for l in self.lines)

    def as_geometry(self, name: str = "") -> Geometry:
        """Relabel as a standalone geometry; ids follow ``points`` and ``lines`` order."""
        index = np.full(self.parent.n_points, -1, dtype=np.int64)
        index[self.points] = np.arange(len(self.points))
        rows = []
        for l in self.lines:
            pts = self.parent.line(int(l))
            rows.append(index[pts[self.point_mask[pts]]])
        return Geometry(rows, len(self.points), name=name)

    def key(self) -> bytes:
        return self.points.tobytes()

    def __eq__(self, other):
        return (
            isinstance(other, Subgeometry)
            and other.parent is self.parent
            and np.array_equal(self.points, other.points)
            and np.array_equal(self.lines, other.lines)
        )

    def __hash__(self):
        return hash((id(self.parent), self.points.tobytes(), self.lines.tobytes()))

    def __len__(self):
        return len(self.points)


def full_lines_inside(g: Geometry, point_mask: np.ndarray) -> np.ndarray:
    """Ids of the lines all of whose points lie in ``point_mask``."""
    inside = np.add.reduceat(point_mask[g.line_pts].astype(np.int64), g.line_ptr[:-1])
    inside[g.line_sizes == 0] = 0
    return np.flatnonzero(inside == g.line_sizes)


def points_on_lines(g: Geometry, point_mask: np.ndarray) -> np.ndarray:
    """Number of ``point_mask`` points on each line."""
    if g.line_matrix is not None:
        return point_mask[g.line_matrix].sum(axis=1)
    counts = np.add.reduceat(point_mask[g.line_pts].astype(np.int64), g.line_ptr[:-1])
    counts[g.line_sizes == 0] = 0
    return counts


def hull(g: Geometry, seed) -> Subgeometry:
    """Closure of ``seed`` under joining collinear members, with the lines inside it."""
    seed = np.asarray(list(seed) if not isinstance(seed, np.ndarray) else seed, dtype=np.int64)
    if len(seed) == 0:
        raise GeometryError("hull needs a nonempty seed")
    mask = np.zeros(g.n_points, dtype=bool)
    mask[seed] = True
    while True:
        counts = points_on_lines(g, mask)
        grow = np.flatnonzero((counts >= 2) & (counts < g.line_sizes))
        if len(grow) == 0:
            break
        if g.line_matrix is not None:
            mask[g.line_matrix[grow].reshape(-1)] = True
        else:
            for l in grow:
                mask[g.line(int(l))] = True
    pts = np.flatnonzero(mask)
    return Subgeometry(g, pts, full_lines_inside(g, mask))


def subgeometry_from_points(g: Geometry, pts) -> Subgeometry:
    mask = np.zeros(g.n_points, dtype=bool)
    mask[np.asarray(pts, dtype=np.int64)] = True
    return Subgeometry(g, np.flatnonzero(mask), full_lines_inside(g, mask))


# perp operators


class PerpMode(enum.Enum):
    PERP = "perp"
    DOUBLE_PERP = "double_perp"
    CL = "cl"


def _perp_mask(g: Geometry, pts) -> np.ndarray:
    pts = np.asarray(pts, dtype=np.int64)
    return np.logical_and.reduce(g.col[pts], axis=0)


def perp(g: Geometry, S, mode: PerpMode = PerpMode.PERP) -> np.ndarray:
    """Y-perp, Y-perp-perp, or cl(u, v) as a sorted array of point ids."""
    S = np.unique(np.asarray(list(S), dtype=np.int64))
    if len(S) == 0:
        raise GeometryError("perp of an empty set")
    mode = PerpMode(mode)
    if mode is PerpMode.PERP:
        return np.flatnonzero(_perp_mask(g, S))
    single = np.flatnonzero(_perp_mask(g, S))
    if len(single) == 0:
        # the perp of the empty set is everything
        double = np.arange(g.n_points)
    else:
        double = np.flatnonzero(_perp_mask(g, single))
    if mode is PerpMode.DOUBLE_PERP:
        return double
    if len(S) != 2:
        raise GeometryError("cl is defined for exactly two distinct points")
    return np.flatnonzero(g.col[:, double].any(axis=1))


def line_regulus(g: Geometry, U: int, V: int) -> tuple[np.ndarray, np.ndarray]:
    """The line sets {U,V}-perp and {U,V}-perp-perp for non-concurrent U, V."""
    if U == V:
        raise GeometryError("line_regulus needs two distinct lines")
    if g.meet(U, V) >= 0:
        raise GeometryError("lines are concurrent")
    single = np.flatnonzero(g.line_mask_of(g.line(U)) & g.line_mask_of(g.line(V)))
    mask = np.ones(g.n_lines, dtype=bool)
    for M in single:
        mask &= g.line_mask_of(g.line(int(M)))
    return single, np.flatnonzero(mask)


# GQ validation


@dataclass
class OrderReport:
    is_gq: bool
    s: int | str
    t: int | str
    exhaustive: bool
    checked_pairs: int
    violations: list = field(default_factory=list)
    seed: int | None = None

    @property
    def order(self):
        return (self.s, self.t)

    def to_dict(self):
        return {
            "is_gq": self.is_gq,
            "s": self.s,
            "t": self.t,
            "exhaustive": self.exhaustive,
            "checked_pairs": self.checked_pairs,
            "violations": self.violations,
            "seed": self.seed,
        }


def _add_witness(bucket: list, item):
    if len(bucket) < WITNESS_CAP:
        bucket.append(item)


def _line_chunks(g: Geometry, lines: np.ndarray, budget: int = 40_000_000):
    """Yield (line ids, padded point matrix, valid mask) in memory-bounded chunks."""
    kmax = int(g.line_sizes.max()) if g.n_lines else 0
    step = max(1, budget // max(1, kmax * g.n_points))
    for start in range(0, len(lines), step):
        sel = lines[start : start + step]
        sizes = g.line_sizes[sel]
        idx = g.line_ptr[sel][:, None] + np.arange(kmax)
        valid = np.arange(kmax) < sizes[:, None]
        pts = g.line_pts[np.where(valid, idx, 0)]
        yield sel, pts, valid


def collinear_counts(g: Geometry, sel, pts, valid) -> np.ndarray:
    """For each line of a chunk, the number of its points collinear with every point."""
    rows = g.col[pts]  # (chunk, k, P)
    rows &= valid[:, :, None]
    return rows.sum(axis=1, dtype=np.int32)


def validate_gq(g: Geometry, exhaustive: bool | None = None, sample_lines: int = 2000, seed: int = 0) -> OrderReport:
    """Check the GQ axioms and read off the order (s, t).

    Axiom (b) is checked for every non-incident point-line pair when
    ``P * L`` is at most EXHAUSTIVE_PAIR_LIMIT or ``exhaustive`` is True;
    otherwise a seeded random sample of lines is used.
    """
    violations: list = []
    sizes = np.unique(g.line_sizes)
    degs = np.unique(g.point_degrees)
    s = int(sizes[0]) - 1 if len(sizes) == 1 else "irregular"
    t = int(degs[0]) - 1 if len(degs) == 1 else "irregular"
    if s == "irregular":
        _add_witness(violations, {"axiom": "a", "line_sizes": sizes[:WITNESS_CAP].tolist()})
    if t == "irregular":
        _add_witness(violations, {"axiom": "a", "point_degrees": degs[:WITNESS_CAP].tolist()})
    # axiom (c) is enforced when the geometry is built
    if exhaustive is None:
        exhaustive = g.n_points * g.n_lines <= EXHAUSTIVE_PAIR_LIMIT
    if exhaustive:
        lines = np.arange(g.n_lines)
        used_seed = None
    else:
        rng = np.random.default_rng(seed)
        lines = np.sort(rng.choice(g.n_lines, size=min(sample_lines, g.n_lines), replace=False))
        used_seed = seed
    checked = 0
    bad_b = False
    for sel, pts, valid in _line_chunks(g, lines):
        counts = collinear_counts(g, sel, pts, valid)
        on = np.zeros_like(counts, dtype=bool)
        r = np.repeat(np.arange(len(sel)), valid.sum(1))
        on[r, pts[valid]] = True
        bad = (~on) & (counts != 1)
        checked += int((~on).sum())
        if bad.any():
            bad_b = True
            for i, x in zip(*np.nonzero(bad)):
                if len(violations) >= WITNESS_CAP:
                    break
                violations.append({"axiom": "b", "point": int(x), "line": int(sel[i]), "count": int(counts[i, x])})
    is_gq = s != "irregular" and t != "irregular" and not bad_b and g.n_points > 0
    return OrderReport(is_gq, s, t, bool(exhaustive), checked, violations, used_seed)


# Hyperplanes


class HyperplaneType(enum.Enum):
    A = "ovoid"
    B = "point-perp"
    C = "subquadrangle"
    NOT_HYPERPLANE = "not a hyperplane"


def classify_hyperplane(g: Geometry, h: Subgeometry) -> HyperplaneType:
    counts = points_on_lines(g, h.point_mask)
    if not np.all((counts == 1) | (counts == g.line_sizes)):
        return HyperplaneType.NOT_HYPERPLANE
    lines = full_lines_inside(g, h.point_mask)
    if len(lines) == 0:
        return HyperplaneType.A
    common = g.line(int(lines[0]))
    for l in lines[1:]:
        common = np.intersect1d(common, g.line(int(l)), assume_unique=True)
        if len(common) == 0:
            break
    if len(common) == 1:
        x = int(common[0])
        if np.array_equal(np.flatnonzero(g.col[x]), h.points):
            return HyperplaneType.B
    return HyperplaneType.C


# Morphisms


@dataclass(frozen=True, eq=False)
class Morphism:
    source: Geometry
    target: Geometry
    point_map: np.ndarray
    line_map: np.ndarray

    def __post_init__(self):
        pm = np.asarray(self.point_map, dtype=np.int64)
        lm = np.asarray(self.line_map, dtype=np.int64)
        if pm.shape != (self.source.n_points,) or lm.shape != (self.source.n_lines,):
            raise GeometryError("morphism maps must be total")
        object.__setattr__(self, "point_map", pm)
        object.__setattr__(self, "line_map", lm)

    def compose(self, after: "Morphism") -> "Morphism":
        """``after`` applied after ``self``."""
        return Morphism(self.source, after.target, after.point_map[self.point_map], after.line_map[self.line_map])


@dataclass
class MorphismReport:
    is_morphism: bool
    is_cover: bool
    theta: int | str
    point_surjective: bool
    line_surjective: bool
    violations: list = field(default_factory=list)

    def to_dict(self):
        return dict(self.__dict__)


def validate_morphism(m: Morphism) -> MorphismReport:
    src, tgt = m.source, m.target
    violations: list = []
    owner = np.repeat(np.arange(src.n_lines), src.line_sizes)
    img_ok = tgt.incident_many(m.point_map[src.line_pts], m.line_map[owner])
    is_morphism = bool(img_ok.all()) and m.point_map.min(initial=0) >= 0 and m.line_map.min(initial=0) >= 0
    for k in np.flatnonzero(~img_ok)[:WITNESS_CAP]:
        violations.append({"kind": "incidence", "point": int(src.line_pts[k]), "line": int(owner[k])})
    is_cover = is_morphism
    if is_morphism:
        # local bijectivity on pencils
        for x in range(src.n_points):
            imgs = m.line_map[src.pencil(x)]
            if len(np.unique(imgs)) != len(imgs) or len(imgs) != tgt.point_degrees[m.point_map[x]]:
                is_cover = False
                _add_witness(violations, {"kind": "pencil", "point": x})
                break
        if is_cover:
            for l in range(src.n_lines):
                imgs = m.point_map[src.line(l)]
                if len(np.unique(imgs)) != len(imgs) or len(imgs) != tgt.line_sizes[m.line_map[l]]:
                    is_cover = False
                    _add_witness(violations, {"kind": "row", "line": l})
                    break
    pf = np.bincount(m.point_map, minlength=tgt.n_points)
    lf = np.bincount(m.line_map, minlength=tgt.n_lines)
    fibers = np.concatenate([pf, lf])
    theta: int | str = int(fibers[0]) if len(fibers) and np.all(fibers == fibers[0]) else "non-constant fibers"
    return MorphismReport(is_morphism, is_cover, theta, bool(np.all(pf > 0)), bool(np.all(lf > 0)), violations)


def morphism_image(m: Morphism) -> Subgeometry:
    return Subgeometry(m.target, np.unique(m.point_map), np.unique(m.line_map))


# Semi partial geometries


@dataclass
class SpgReport:
    is_spg: bool
    s: int | None
    t: int | None
    alpha: int | None
    mu: int | None
    is_partial_quadrangle: bool
    is_partial_geometry: bool
    is_gq: bool
    mu_status: str  # "constant", "zero" (axiom iv fails with mu = 0), "non-constant", "vacuous"
    alpha_values: list
    mu_values: list
    violations: list = field(default_factory=list)

    @property
    def parameters(self):
        return (self.s, self.t, self.alpha, self.mu)

    def to_dict(self):
        return dict(self.__dict__)


def common_neighbour_counts(g: Geometry, rows: np.ndarray) -> np.ndarray:
    """|x-perp & y-perp| for x in ``rows`` and every y, by popcount over packed rows."""
    w = g.col_words
    return np.bitwise_count(w[rows][:, None, :] & w[None, :, :]).sum(axis=2, dtype=np.int64)


def common_neighbour_matrix(g: Geometry) -> np.ndarray:
    """The same counts via a dense matrix product (independent route)."""
    c = g.col.astype(np.float32)
    return np.rint(c @ c).astype(np.int64)


def validate_spg(g: Geometry, rows_per_chunk: int | None = None) -> SpgReport:
    """Check the semi-partial-geometry axioms exhaustively.

    Point pairs are scanned by popcount of packed collinearity rows; the
    0-or-alpha condition is scanned over every non-incident point-line pair.
    """
    violations: list = []
    sizes = np.unique(g.line_sizes)
    degs = np.unique(g.point_degrees)
    s = int(sizes[0]) - 1 if len(sizes) == 1 else None
    t = int(degs[0]) - 1 if len(degs) == 1 else None
    ok = True
    if s is None or s < 1:
        ok = False
        _add_witness(violations, {"axiom": "ii", "line_sizes": sizes[:WITNESS_CAP].tolist()})
    if t is None or t < 1:
        ok = False
        _add_witness(violations, {"axiom": "i", "point_degrees": degs[:WITNESS_CAP].tolist()})

    # (iii): 0 or alpha collinear points on each non-incident line
    alpha_vals: set[int] = set()
    for sel, pts, valid in _line_chunks(g, np.arange(g.n_lines)):
        counts = collinear_counts(g, sel, pts, valid)
        on = np.zeros_like(counts, dtype=bool)
        r = np.repeat(np.arange(len(sel)), valid.sum(1))
        on[r, pts[valid]] = True
        alpha_vals.update(np.unique(counts[~on]).tolist())
    nonzero = sorted(v for v in alpha_vals if v)
    alpha = nonzero[0] if len(nonzero) == 1 else None
    if len(nonzero) != 1:
        ok = False
        _add_witness(violations, {"axiom": "iii", "values": nonzero[:WITNESS_CAP]})

    # (iv): common neighbours of non-collinear pairs
    mu_vals: set[int] = set()
    if rows_per_chunk is None:
        rows_per_chunk = max(1, 20_000_000 // max(1, g.n_points * g.col_words.shape[1]))
    for start in range(0, g.n_points, rows_per_chunk):
        rows = np.arange(start, min(g.n_points, start + rows_per_chunk))
        cnt = common_neighbour_counts(g, rows)
        mu_vals.update(np.unique(cnt[~g.col[rows]]).tolist())
    mu_list = sorted(mu_vals)
    if not mu_list:
        mu, mu_status = None, "vacuous"
    elif len(mu_list) > 1:
        mu, mu_status = None, "non-constant"
        ok = False
        _add_witness(violations, {"axiom": "iv", "values": mu_list[:WITNESS_CAP]})
    elif mu_list[0] == 0:
        mu, mu_status = 0, "zero"
        ok = False
        _add_witness(violations, {"axiom": "iv", "values": [0]})
    else:
        mu, mu_status = mu_list[0], "constant"
    is_pg = ok and mu is not None and t is not None and alpha is not None and mu == (t + 1) * alpha
    return SpgReport(
        is_spg=ok,
        s=s,
        t=t,
        alpha=alpha,
        mu=mu,
        is_partial_quadrangle=ok and alpha == 1,
        is_partial_geometry=bool(is_pg),
        is_gq=bool(is_pg and alpha == 1),
        mu_status=mu_status,
        alpha_values=sorted(alpha_vals),
        mu_values=mu_list,
        violations=violations,
    )


# Text format


def dumps_geometry(g: Geometry) -> str:
    out = io.StringIO()
    out.write(f"geometry v1\npoints {g.n_points}\nlines {g.n_lines}\n")
    for i in range(g.n_lines):
        out.write(" ".join(map(str, g.line(i).tolist())))
        out.write("\n")
    return out.getvalue()


def loads_geometry(text: str, name: str = "") -> Geometry:
    # whole-line comments are dropped; every other line after the header is a record
    body = [raw.split("#", 1)[0].strip() for raw in text.splitlines() if not raw.lstrip().startswith("#")]
    if len(body) < 3 or body[0] != "geometry v1":
        raise GeometryError("missing 'geometry v1' header")
    try:
        key_p, p = body[1].split()
        key_l, n = body[2].split()
        P, L = int(p), int(n)
    except ValueError as exc:
        raise GeometryError("malformed header") from exc
    if (key_p, key_l) != ("points", "lines"):
        raise GeometryError("malformed header")
    records = body[3:]
    if len(records) != L:
        raise GeometryError(f"expected {L} line records, found {len(records)}")
    rows = []
    for rec in records:
        try:
            ids = [int(v) for v in rec.split()]
        except ValueError as exc:
            raise GeometryError(f"bad point id in record {rec!r}") from exc
        if len(set(ids)) != len(ids):
            raise GeometryError(f"record {rec!r} repeats a point")
        rows.append(ids)
    return Geometry(rows, P, name=name)


def export_geometry(g: Geometry, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(dumps_geometry(g))


def import_geometry(path: str | os.PathLike) -> Geometry:
    with open(path, encoding="ascii") as fh:
        return loads_geometry(fh.read(), name=os.path.basename(str(path)))


def dumps_model(values: dict) -> str:
    """Sidecar key-value format: one ``key = value`` per line, values JSON-free."""
    lines = ["model v1"]
    for k, v in values.items():
        if isinstance(v, (list, tuple)):
            v = " ".join(map(str, v))
        lines.append(f"{k} = {v}")
    return "\n".join(lines) + "\n"


def loads_model(text: str) -> dict:
    lines = [l.split("#", 1)[0].strip() for l in text.splitlines()]
    lines = [l for l in lines if l]
    if not lines or lines[0] != "model v1":
        raise GeometryError("missing 'model v1' header")
    out = {}
    for l in lines[1:]:
        if "=" not in l:
            raise GeometryError(f"malformed model entry {l!r}")
        k, v = l.split("=", 1)
        out[k.strip()] = v.strip()
    return out
