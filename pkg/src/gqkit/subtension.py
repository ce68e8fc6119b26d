"""Subquadrangles of order q, subtended ovoids, rosettes and their groups.

Ids: a subquadrangle is a :class:`Subgeometry` of the parent quadrangle and
ovoids are stored with parent point ids.  Group computations inside a
subquadrangle run on a copy of the parabolic quadric model, reached through
an explicit isomorphism (:class:`Embedding`).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .autom import Propagator
from .constructions.quadrics import QuadricModel, build_parabolic
from .incidence import Geometry, GeometryError, Subgeometry, hull, line_regulus
from .permgroups import (
    Action,
    GenSet,
    GroupElement,
    GroupError,
    induced_action,
    orbit,
    pointwise_stabilizer,
    symmetry_generators,
    translation_group,
)


class OmegaClass(enum.Enum):
    OMEGA1 = "omega1"
    OMEGA2 = "omega2"
    UNKNOWN = "unknown"


class SubtensionError(ValueError):
    pass


def _sub(Q) -> Subgeometry:
    return Q.sub if isinstance(Q, SubGQHandle) else Q


@dataclass(eq=False)
class SubGQHandle:
    parent: Geometry
    sub: Subgeometry
    order: tuple[int, int]
    omega: OmegaClass = OmegaClass.UNKNOWN
    contains_infinity: bool = False
    multiplicity: int | None = None
    index: int = -1

    @property
    def points(self) -> np.ndarray:
        return self.sub.points

    @property
    def lines(self) -> np.ndarray:
        return self.sub.lines

    @cached_property
    def geometry(self) -> Geometry:
        return self.sub.as_geometry(name=f"subGQ {self.index}")

    def key(self) -> bytes:
        return self.sub.key()


@dataclass(eq=False)
class Ovoid:
    points: np.ndarray  # parent ids, sorted
    subtenders: tuple[int, ...] = ()
    special_point: int | None = None

    def __post_init__(self):
        self.points = np.unique(np.asarray(self.points, dtype=np.int64))

    def __len__(self):
        return len(self.points)

    def key(self) -> bytes:
        return self.points.tobytes()

    def __eq__(self, other):
        return isinstance(other, Ovoid) and np.array_equal(self.points, other.points)

    def __hash__(self):
        return hash(self.key())


@dataclass(eq=False)
class Rosette:
    base_line: int
    meet_point: int
    ovoids: list[Ovoid]

    def __len__(self):
        return len(self.ovoids)


@dataclass(eq=False)
class TranslationCert:
    ovoid: Ovoid
    omega: int
    group: GenSet  # acting on the subquadrangle (local ids)
    order: int
    fixes_linewise: bool
    sharp: bool
    orbit_size: int

    @property
    def valid(self) -> bool:
        return self.fixes_linewise and self.sharp


@dataclass
class SpecialLineReport:
    special_point: int
    orbit_sizes: dict[int, int]  # line (model id) -> |O^{L_U}|
    classes: dict[int, list[int]]  # orbit size -> lines
    u1: list[int]
    u2: list[int]
    infinity_line: int | None = None

    @property
    def disjoint(self) -> bool:
        return not set(self.u1) & set(self.u2)

    def to_dict(self) -> dict:
        return {
            "special_point": self.special_point,
            "special_line_classes": {str(k): len(v) for k, v in sorted(self.classes.items())},
            "u1_size": len(self.u1),
            "u1_parity": len(self.u1) % 2,
            "u2_size": len(self.u2),
        }


# ovoids


def exterior_points(g: Geometry, Q) -> np.ndarray:
    return np.flatnonzero(~_sub(Q).point_mask)


def is_ovoid(g: Geometry, Q, pts) -> bool:
    """Every line of Q carries exactly one point of ``pts``."""
    S = _sub(Q)
    mask = np.zeros(g.P, dtype=bool)
    mask[np.asarray(pts, dtype=np.int64)] = True
    counts = mask[g.line_matrix[S.lines]].sum(axis=1)
    return bool(np.all(counts == 1)) and bool(np.all(S.point_mask[np.asarray(pts, dtype=np.int64)]))


def subtended_ovoid(g: Geometry, Q, x: int) -> Ovoid:
    S = _sub(Q)
    if S.point_mask[x]:
        raise SubtensionError(f"point {x} lies in the subquadrangle")
    pts = S.points[g.col[x, S.points]]
    if not is_ovoid(g, S, pts):
        raise SubtensionError("x-perp does not meet the subquadrangle in an ovoid")
    return Ovoid(pts, subtenders=(int(x),))


def subtension_multiplicity(g: Geometry, Q, O: Ovoid) -> tuple[int, list[int]]:
    """All exterior points whose perp meets Q exactly in O."""
    S = _sub(Q)
    cand = np.flatnonzero(g.col[:, O.points].all(axis=1) & ~S.point_mask)
    out = []
    for y in cand:
        if np.count_nonzero(g.col[y, S.points]) == len(O.points):
            out.append(int(y))
    return len(out), out


def all_subtended_ovoids(g: Geometry, Q) -> tuple[np.ndarray, np.ndarray]:
    """(ovoids as sorted rows of parent ids, ovoid index of each exterior point)."""
    S = _sub(Q)
    ext = exterior_points(g, S)
    rows = g.col[np.ix_(ext, S.points)]
    packed = np.packbits(rows, axis=1)
    uniq, idx = np.unique(packed, axis=0, return_inverse=True)
    unpacked = np.unpackbits(uniq, axis=1, count=len(S.points)).astype(bool)
    size = int(unpacked[0].sum())
    ovoids = np.stack([S.points[r] for r in unpacked]).reshape(len(uniq), size)
    return ovoids, idx.reshape(-1)


def rosette(g: Geometry, Q, L: int) -> Rosette:
    S = _sub(Q)
    inside = S.point_mask[g.line(L)]
    if inside.all() or not inside.any():
        raise SubtensionError("the line must meet the subquadrangle in exactly one point")
    if inside.sum() != 1:
        raise SubtensionError("the line meets the subquadrangle in more than one point")
    l = int(g.line(L)[inside][0])
    ovs = [subtended_ovoid(g, S, int(x)) for x in g.line(L)[~inside]]
    return Rosette(int(L), l, ovs)


# census


def grids_on_line(g: Geometry, I: int) -> list[np.ndarray]:
    """All grids (as sorted line sets) containing the line ``I``.

    Each grid has exactly one further line through each point of I; pairing
    the lines through two fixed points of I reaches every grid once.
    """
    p = g.line(I)
    Ms = [int(l) for l in g.pencil(int(p[0])) if l != I]
    Ns = [int(l) for l in g.pencil(int(p[1])) if l != I]
    k = len(p)
    out = []
    for M in Ms:
        for N in Ns:
            single, double = line_regulus(g, M, N)
            if len(single) == k and len(double) == k:
                out.append(np.union1d(single, double))
    keys = {r.tobytes() for r in out}
    if len(keys) != len(out):
        raise SubtensionError("a grid was produced twice")
    return out


@dataclass
class SubGQCensus:
    handles: list[SubGQHandle]
    n_grids: int
    escaped: int
    omega_counts: dict[str, int]


def classify_subgq(g: Geometry, h: SubGQHandle, sample: int = 1, seed: int = 0) -> SubGQHandle:
    ext = exterior_points(g, h.sub)
    rng = np.random.default_rng(seed + max(h.index, 0))
    xs = [int(ext[0])] + ([int(x) for x in rng.choice(ext, size=sample - 1, replace=False)] if sample > 1 else [])
    thetas = {subtension_multiplicity(g, h.sub, subtended_ovoid(g, h.sub, x))[0] for x in xs}
    if len(thetas) != 1:
        raise SubtensionError(f"subquadrangle {h.index} has non-constant multiplicity {sorted(thetas)}")
    theta = thetas.pop()
    h.multiplicity = theta
    h.omega = {2: OmegaClass.OMEGA1, 1: OmegaClass.OMEGA2}.get(theta, OmegaClass.UNKNOWN)
    return h


def enumerate_order_q_subgqs(g: Geometry, infinity_line: int, sample: int = 1, seed: int = 0) -> SubGQCensus:
    """All subquadrangles of order (s, s) containing ``infinity_line``.

    For every grid Y on the line, exterior points not yet covered by a known
    subquadrangle through Y are closed up with Y.  Each closure is required
    to be a full subquadrangle of order (s, s); since the closure lies in
    every subquadrangle containing its seed, this reaches each of them once.
    """
    s = len(g.line(infinity_line)) - 1
    n_sub = (s + 1) * (s * s + 1)
    grids = grids_on_line(g, infinity_line)
    masks = np.zeros((64, g.P), dtype=bool)
    n_found = 0
    subs: list[Subgeometry] = []
    escaped = 0
    lm = g.line_matrix
    for Y in grids:
        ypts = np.unique(lm[Y])
        inside = masks[:n_found, ypts].all(axis=1)
        covered = masks[:n_found][inside].any(axis=0) if inside.any() else np.zeros(g.P, bool)
        covered[ypts] = True
        cand = np.flatnonzero(g.col[:, ypts].any(axis=1) & ~covered)
        while len(cand):
            x = int(cand[0])
            h = hull(g, np.append(ypts, x))
            if len(h.points) != n_sub or len(h.lines) != n_sub:
                escaped += 1
                covered[h.points] = True
            else:
                subs.append(h)
                if n_found == len(masks):
                    masks = np.vstack([masks, np.zeros_like(masks)])
                masks[n_found] = h.point_mask
                n_found += 1
                covered |= h.point_mask
            cand = cand[~covered[cand]]
    handles = []
    for i, sub in enumerate(subs):
        h = SubGQHandle(g, sub, (s, s), contains_infinity=bool(sub.line_mask[infinity_line]), index=i)
        classify_subgq(g, h, sample=sample, seed=seed)
        handles.append(h)
    counts: dict[str, int] = {}
    for h in handles:
        counts[h.omega.value] = counts.get(h.omega.value, 0) + 1
    return SubGQCensus(handles, len(grids), escaped, counts)


def find_subgq(g: Geometry, infinity_line: int, omega: OmegaClass, start: int = 0) -> SubGQHandle:
    """The first subquadrangle of the given class met while scanning grids on the line.

    A shortcut for analyses that need one representative per class.
    """
    s = len(g.line(infinity_line)) - 1
    n_sub = (s + 1) * (s * s + 1)
    p = g.line(infinity_line)
    lm = g.line_matrix
    M = [int(l) for l in g.pencil(int(p[0])) if l != infinity_line][start % s**2]
    for N in (int(l) for l in g.pencil(int(p[1])) if l != infinity_line):
        single, double = line_regulus(g, M, N)
        if len(double) != s + 1:
            continue
        ypts = np.unique(lm[np.union1d(single, double)])
        covered = np.zeros(g.P, bool)
        covered[ypts] = True
        cand = np.flatnonzero(g.col[:, ypts].any(axis=1))
        for x in cand:
            if covered[x]:
                continue
            h = hull(g, np.append(ypts, int(x)))
            covered[h.points] = True
            if len(h.points) != n_sub:
                continue
            handle = SubGQHandle(g, h, (s, s), contains_infinity=True)
            classify_subgq(g, handle)
            if handle.omega is omega:
                return handle
    raise SubtensionError(f"no subquadrangle of class {omega.value} found")


# embedding into the quadric model


@dataclass(eq=False)
class Embedding:
    """An isomorphism from a subquadrangle onto the parabolic quadric model."""

    handle: SubGQHandle
    model_geometry: Geometry
    model: QuadricModel
    point_map: np.ndarray  # parent point id -> model id (-1 outside)
    line_map: np.ndarray  # parent line id -> model id (-1 outside)

    def to_model_points(self, pts) -> np.ndarray:
        out = self.point_map[np.asarray(pts, dtype=np.int64)]
        if np.any(out < 0):
            raise SubtensionError("point outside the subquadrangle")
        return out

    def to_model_line(self, L: int) -> int:
        out = int(self.line_map[L])
        if out < 0:
            raise SubtensionError("line outside the subquadrangle")
        return out

    @cached_property
    def from_model_points(self) -> np.ndarray:
        inv = np.empty(self.model_geometry.P, dtype=np.int64)
        sel = np.flatnonzero(self.point_map >= 0)
        inv[self.point_map[sel]] = sel
        return inv

    def element_to_model(self, e: GroupElement) -> GroupElement:
        """Transport an automorphism of the parent that stabilizes the subquadrangle."""
        pm = self.point_map
        inv = self.from_model_points
        img = pm[e.points[inv]]
        if np.any(img < 0):
            raise GroupError("element moves the subquadrangle")
        return GroupElement(self.model_geometry, img)


def embed_subgq(h: SubGQHandle, field, seed: int = 0) -> Embedding:
    g4, qm = build_parabolic(field)
    local = h.geometry
    pr = Propagator(local, g4, seed=seed)
    res = pr.search(pr.new_state(), True, 20000)
    if res is None:
        raise SubtensionError("subquadrangle is not isomorphic to the parabolic quadric")
    pmap = np.full(h.parent.P, -1, dtype=np.int64)
    pmap[h.points] = res[0]
    lmap = np.full(h.parent.L, -1, dtype=np.int64)
    lmap[h.lines] = res[1]
    return Embedding(h, g4, qm, pmap, lmap)


# groups inside the subquadrangle


def lu_generators(g: Geometry, U: int, model=None) -> GenSet:
    """Generators of L_U: symmetries about every line concurrent with U (U included)."""
    lines = g.lines_meeting(g.line(U))
    gens: list[GroupElement] = []
    for W in lines:
        gens.extend(symmetry_generators(g, int(W), model))
    return GenSet(g, gens, name=f"L_{U}")


def lu_orbit(g: Geometry, U: int, O, model=None, gens: GenSet | None = None) -> np.ndarray:
    """The orbit of the ovoid O under L_U, as sorted rows of point ids."""
    pts = O.points if isinstance(O, Ovoid) else np.asarray(O, dtype=np.int64)
    if not np.any(np.isin(g.line(U), pts)):
        raise SubtensionError("U carries no point of the ovoid")
    gs = gens if gens is not None else lu_generators(g, U, model)
    return orbit(gs, pts, Action.POINTSET).members


def translation_ovoid_certificate(g: Geometry, Q, e: int, infinity_line: int, T: GenSet | None = None) -> TranslationCert:
    """Certify that the ovoid subtended by ``e`` is a translation ovoid.

    The centre is the point of the special line collinear with e; ``T`` may
    pass a precomputed translation group about it.  The certifying group is
    the part of that translation group which fixes e and stabilizes Q,
    restricted to Q.
    """
    S = _sub(Q)
    O = subtended_ovoid(g, S, e)
    on_inf = g.line(infinity_line)
    omega = int(on_inf[g.col[e, on_inf]][0])
    O.special_point = omega
    if T is None:
        T = translation_group(g, omega)
    Te = pointwise_stabilizer(T, [e])
    keep = [GroupElement(g, p, check=False) for p in Te.bsgs.elements(limit=10**5) if np.all(S.point_mask[p[S.points]])]
    group = induced_action(GenSet(g, keep), S)
    local = np.searchsorted(S.points, O.points)
    local_omega = int(np.searchsorted(S.points, omega))
    host = group.geometry
    fixes = all(el.fixes_lines(host.pencil(local_omega)) for el in group.gens)
    rest = local[local != local_omega]
    orb = orbit(group, int(rest[0]))
    order = group.order()
    stab_ovoid = all(np.array_equal(np.sort(el.points[local]), np.sort(local)) for el in group.gens)
    sharp = stab_ovoid and orb.size == len(rest) and order == len(rest) and set(orb.members.tolist()) == set(rest.tolist())
    return TranslationCert(O, omega, group, order, fixes, sharp, orb.size)


def special_line_analysis(emb: Embedding, O: Ovoid, u: int, infinity_line: int | None = None) -> SpecialLineReport:
    """Orbit sizes |O^{L_U}| for every line U of Q through the special point u (parent ids in, model ids inside)."""
    g4, qm = emb.model_geometry, emb.model
    mu = int(emb.to_model_points([u])[0])
    mo = emb.to_model_points(O.points)
    sizes = {}
    for U in g4.pencil(mu):
        sizes[int(U)] = len(lu_orbit(g4, int(U), mo, qm))
    classes: dict[int, list[int]] = {}
    for U, s in sizes.items():
        classes.setdefault(s, []).append(U)
    small = min(classes) if classes else 0
    large = max(classes) if classes else 0
    u1 = classes.get(small, [])
    u2 = classes.get(large, []) if large != small else []
    inf = emb.to_model_line(infinity_line) if infinity_line is not None else None
    return SpecialLineReport(mu, sizes, classes, u1, u2, inf)


def epsilon_classes(g: Geometry, pairs, model=None) -> list[list[int]]:
    """Partition (ovoid, line) pairs by: same line and same L_U-orbit."""
    by_line: dict[int, list[int]] = {}
    for i, (_, U) in enumerate(pairs):
        by_line.setdefault(int(U), []).append(i)
    out: list[list[int]] = []
    w = np.random.default_rng(7).integers(1, 2**63, size=g.P, dtype=np.int64).astype(np.uint64)
    for U, idx in by_line.items():
        gs = lu_generators(g, U, model)
        assigned: dict[int, int] = {}
        for i in idx:
            if i in assigned:
                continue
            pts = _pts(pairs[i][0])
            orb = orbit(gs, pts, Action.POINTSET).members
            with np.errstate(over="ignore"):
                keys = set(w[orb].sum(axis=1, dtype=np.uint64).tolist())
                cls = []
                for j in idx:
                    if j not in assigned and int(w[_pts(pairs[j][0])].sum(dtype=np.uint64)) in keys:
                        assigned[j] = len(out)
                        cls.append(j)
            out.append(cls)
    return out


def epsilon_related(g: Geometry, a, b, model=None) -> bool:
    (Oa, Ua), (Ob, Ub) = a, b
    if int(Ua) != int(Ub):
        return False
    orb = lu_orbit(g, int(Ub), _pts(Ob), model)
    target = np.sort(_pts(Oa))
    return bool(np.any(np.all(orb == target, axis=1)))


def _pts(O) -> np.ndarray:
    return O.points if isinstance(O, Ovoid) else np.unique(np.asarray(O, dtype=np.int64))


def _linewise_frame(g: Geometry, u: int, v: int) -> np.ndarray:
    """u, v and the points of {u, v}-perp: fixing these fixes u and v linewise."""
    if g.col[u, v]:
        raise SubtensionError("u and v must be noncollinear")
    both = np.flatnonzero(g.col[u] & g.col[v])
    return np.concatenate([[u, v], both])


def ovoid_kernel(aut: GenSet, O, u: int, v: int) -> list[GroupElement]:
    """H(u,v): the elements of Aut(Q)_O fixing u and v linewise."""
    g = aut.geometry
    pts = _pts(O)
    if u not in pts or v not in pts or u == v:
        raise SubtensionError("u and v must be distinct points of the ovoid")
    frame = _linewise_frame(g, u, v)
    sub = pointwise_stabilizer(aut, frame)
    out = []
    for el in sub.elements(limit=10**5) if len(sub) else [GroupElement.identity(g)]:
        if np.array_equal(np.sort(el.points[pts]), pts):
            out.append(el)
    return out


def hl_kernel(g: Geometry, U: int, v: int | None = None, model=None, gens: GenSet | None = None) -> GenSet:
    """H(L_U): the elements of L_U fixing a point u of U and a point v opposite u linewise."""
    u = int(g.line(U)[0])
    if v is None:
        v = int(np.flatnonzero(~g.col[u])[0])
    gs = gens if gens is not None else lu_generators(g, U, model)
    return pointwise_stabilizer(gs, _linewise_frame(g, u, v))
