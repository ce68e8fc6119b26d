"""The Tits quadrangle T2(O) of an oval in PG(3,q), and the q = 3 morphism
onto a thin subquadrangle."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .. import linalg as la
from ..galois import Field, make_field
from ..incidence import Geometry, Morphism, Subgeometry


class OvalError(ValueError):
    pass


@dataclass(eq=False)
class TitsModel:
    field: Field
    delta: np.ndarray  # plane vector of the oval's plane
    oval: np.ndarray  # (q+1, 4) normalized
    tangents: list  # per oval point: (2, 4) basis of the tangent line
    affine: np.ndarray  # (q^3, 4) coordinates, id order
    planes: np.ndarray  # (q(q+1), 4) plane vectors, id order
    plane_tangent: np.ndarray  # oval index of each plane's tangent
    line_oval: np.ndarray  # oval index of each type (a) line
    line_through: np.ndarray = field(repr=False)  # (q+1, q^3): type (a) line through a_i and m
    aff_lookup: np.ndarray = field(repr=False)
    plane_lookup: dict = field(repr=False, default_factory=dict)

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def n_affine(self) -> int:
        return len(self.affine)

    def plane_point(self, j: int) -> int:
        return self.n_affine + j

    @property
    def infinity_point(self) -> int:
        return self.n_affine + len(self.planes)

    def oval_line(self, i: int) -> int:
        return len(self.line_oval) + i

    def affine_id(self, v) -> int:
        code = la.encode(self.field, la.normalize(self.field, np.asarray(v, dtype=np.int64)))
        return int(self.aff_lookup[code])

    def plane_id(self, v) -> int:
        code = int(la.encode(self.field, la.normalize(self.field, np.asarray(v, dtype=np.int64))))
        return self.plane_point(self.plane_lookup[code])

    def sidecar(self) -> dict:
        f = self.field
        return {
            "model": "tits",
            "p": f.p,
            "h": f.h,
            "modulus": list(f.modulus),
            "oval": [int(x) for x in self.oval.reshape(-1)],
            "delta": [int(x) for x in self.delta],
        }


def build_tits_t2(f: Field, oval) -> tuple[Geometry, TitsModel]:
    q = f.q
    O = la.normalize(f, np.asarray(oval, dtype=np.int64))
    if O.shape != (q + 1, 4) or len(np.unique(la.encode(f, O))) != q + 1:
        raise OvalError("an oval needs q+1 distinct points of PG(3,q)")
    if la.rank(f, O) != 3:
        raise OvalError("oval points are not coplanar")
    for tri in itertools.combinations(range(q + 1), 3):
        if la.rank(f, O[list(tri)]) < 3:
            raise OvalError(f"oval points {tri} are collinear")
    delta = la.normalize(f, la.nullspace(f, O)[0])
    pts = la.projective_points(f, 4)
    in_delta = la.dot(f, pts, delta[None, :]) == 0
    affine = pts[~in_delta]
    dpts = pts[in_delta]
    ocodes = set(la.encode(f, O).tolist())

    tangents = []
    for a in O:
        found = None
        for b in dpts:
            if np.array_equal(b, a):
                continue
            line = la.span_points(f, np.stack([a, b]))
            if len(ocodes & set(la.encode(f, line).tolist())) == 1:
                found = np.stack([a, b])
                break
        if found is None:
            raise OvalError("no tangent line found")
        tangents.append(found)

    planes, plane_tangent = [], []
    dcode = int(la.encode(f, delta))
    for i, tb in enumerate(tangents):
        pencil = la.span_points(f, la.nullspace(f, tb))
        for v in pencil:
            if int(la.encode(f, v)) != dcode:
                planes.append(v)
                plane_tangent.append(i)
    planes = np.array(planes, dtype=np.int64)
    plane_tangent = np.array(plane_tangent, dtype=np.int64)

    aff_lookup = np.full(q**4, -1, dtype=np.int64)
    aff_lookup[la.encode(f, affine)] = np.arange(len(affine))
    n_aff = len(affine)

    # type (a) lines: through an oval point, not in delta
    rows, line_oval = [], []
    line_through = np.full((q + 1, n_aff), -1, dtype=np.int64)
    for i, a in enumerate(O):
        for mid in range(n_aff):
            if line_through[i, mid] >= 0:
                continue
            line = la.span_points(f, np.stack([a, affine[mid]]))
            ids = aff_lookup[la.encode(f, line)]
            ids = np.sort(ids[ids >= 0])
            lid = len(rows)
            line_through[i, ids] = lid
            # tangent planes through the line
            inc = np.flatnonzero(
                (plane_tangent == i)
                & (la.dot(f, planes, affine[mid][None, :]) == 0)
            )
            rows.append(list(ids) + [n_aff + int(j) for j in inc])
            line_oval.append(i)
    n_planes = len(planes)
    inf = n_aff + n_planes
    for i in range(q + 1):
        rows.append([n_aff + int(j) for j in np.flatnonzero(plane_tangent == i)] + [inf])
    plane_lookup = {int(c): j for j, c in enumerate(la.encode(f, planes))}
    model = TitsModel(
        f, delta, O, tangents, affine, planes, plane_tangent, np.array(line_oval),
        line_through, aff_lookup, plane_lookup,
    )
    g = Geometry(rows, inf + 1, model=model, name=f"T2(O),q={q}")
    return g, model


# the q = 3 morphism


@dataclass(eq=False)
class Counterexample:
    delta_geometry: Geometry
    model: TitsModel
    subgeometry: Subgeometry  # the thin subquadrangle G
    morphism: Morphism
    zeta: np.ndarray
    r: np.ndarray
    notes: list


CONIC_Q3 = [(0, 0, 0, 1), (0, 0, 1, 0), (0, 1, 1, 1), (0, 1, 2, 2)]  # x0 = 0, x1^2 = x2 x3
ZETA_Q3 = (0, 1, 0, 0)  # the plane x1 = 0 through a1 and a2


def _meet_lines(f, l1, l2):
    """Common point of two coplanar lines given by 2-point bases."""
    for v in la.span_points(f, l1):
        if la.rank(f, np.vstack([l2, v[None, :]])) == 2:
            return v
    raise ValueError("lines do not meet")


def counterexample_data() -> Counterexample:
    f = make_field(3, 1)
    g, tm = build_tits_t2(f, CONIC_Q3)
    O = tm.oval
    zeta = np.array(ZETA_Q3, dtype=np.int64)
    if np.any(la.dot(f, O[:2], zeta[None, :]) != 0):
        raise OvalError("zeta must contain a1 and a2")
    r = la.normalize(f, _meet_lines(f, O[[0, 2]], O[[1, 3]]))
    notes = []

    def proj(m):
        # the point of the line r m lying in zeta
        lam, mu = int(la.dot(f, m, zeta)), int(f.neg[la.dot(f, r, zeta)])
        return f.add[f.mul[lam, r], f.mul[mu, m]]

    n_aff = tm.n_affine
    in_zeta = la.dot(f, tm.affine, zeta[None, :]) == 0
    pm = np.arange(g.n_points, dtype=np.int64)
    for mid in np.flatnonzero(~in_zeta):
        pm[mid] = tm.affine_id(proj(tm.affine[mid]))

    def line_in_zeta_through(i, pt_vec):
        return int(tm.line_through[i, tm.affine_id(pt_vec)])

    for j, v in enumerate(tm.planes):
        i = int(tm.plane_tangent[j])
        if i in (0, 1):
            continue
        # the smallest affine point of the plane stands in for the point l
        ell = int(np.flatnonzero(la.dot(f, tm.affine, v[None, :]) == 0)[0])
        target_tangent = tm.tangents[0 if i == 2 else 1]
        img = la.nullspace(f, np.vstack([target_tangent, tm.affine[pm[ell]][None, :]]))[0]
        pm[tm.plane_point(j)] = tm.plane_id(img)

    lm = np.arange(g.n_lines, dtype=np.int64)
    lm[tm.oval_line(2)] = tm.oval_line(0)
    lm[tm.oval_line(3)] = tm.oval_line(1)
    for lid in range(len(tm.line_oval)):
        i = int(tm.line_oval[lid])
        aff = g.line(lid)
        aff = aff[aff < n_aff]
        if i in (0, 1) and in_zeta[aff[0]]:
            continue  # a line of G
        # image line: the plane <r, R> meets zeta in a line through a1 or a2
        target = 0 if i in (0, 2) else 1
        lm[lid] = int(tm.line_through[target, pm[aff[0]]])
    notes.append(
        "lines through a1 or a2 outside zeta are not covered by the case list; "
        "they are sent by the same rule as lines through a3 and a4"
    )

    G_points = list(np.flatnonzero(in_zeta)) + [
        tm.plane_point(j) for j in range(len(tm.planes)) if tm.plane_tangent[j] in (0, 1)
    ] + [tm.infinity_point]
    G_lines = [lid for lid in range(len(tm.line_oval)) if tm.line_oval[lid] in (0, 1)
               and in_zeta[g.line(lid)[0]]] + [tm.oval_line(0), tm.oval_line(1)]
    G = Subgeometry(g, G_points, G_lines)
    return Counterexample(g, tm, G, Morphism(g, g, pm, lm), zeta, r, notes)


def build_counterexample_morphism() -> Morphism:
    return counterexample_data().morphism
