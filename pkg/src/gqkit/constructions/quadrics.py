"""Parabolic and elliptic quadrics Q(4,q) and Q(5,q).

The forms are pinned so that ids are reproducible:

* parabolic  x0^2 + x1 x2 + x3 x4
* elliptic   x0^2 - nu x1^2 + x2 x3 + x4 x5, with nu the smallest nonsquare

Points are the singular points in increasing coordinate-code order; lines
are the totally singular lines, sorted by their point-id tuples.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .. import linalg as la
from ..galois import Field, FieldError, find_nonsquare
from ..incidence import Geometry, Subgeometry, full_lines_inside


@dataclass(eq=False)
class QuadricModel:
    field: Field
    kind: str  # "parabolic" or "elliptic"
    form: np.ndarray  # upper triangular: Q(x) = sum_{i<=j} form[i, j] x_i x_j
    coords: np.ndarray  # (P, n) normalized coordinates
    lines: np.ndarray = field(repr=False)  # (L, q+1) point ids
    _index: dict = field(default_factory=dict, repr=False)

    @property
    def n(self) -> int:
        return self.form.shape[0]

    @property
    def dimension(self) -> int:
        return self.n - 1

    @cached_property
    def gram(self) -> np.ndarray:
        f = self.field
        return f.add[self.form, self.form.T]

    @cached_property
    def code_lookup(self) -> np.ndarray:
        size = self.field.q**self.n
        table = np.full(size, -1, dtype=np.int64)
        table[la.encode(self.field, self.coords)] = np.arange(len(self.coords))
        return table

    def quadratic(self, v: np.ndarray) -> np.ndarray:
        f = self.field
        v = np.asarray(v, dtype=np.int64)
        acc = np.zeros(v.shape[:-1], dtype=np.int64)
        for i in range(self.n):
            for j in range(i, self.n):
                c = int(self.form[i, j])
                if c:
                    acc = f.add[acc, f.mul[c, f.mul[v[..., i], v[..., j]]]]
        return acc

    def bilinear(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        f = self.field
        return la.dot(f, la.matvec(f, self.gram, np.asarray(u, dtype=np.int64)), np.asarray(v, dtype=np.int64))

    def point_ids(self, vecs: np.ndarray) -> np.ndarray:
        """Ids of the projective points given by nonzero rows (-1 if not on the quadric)."""
        norm = la.normalize(self.field, vecs)
        return self.code_lookup[la.encode(self.field, norm)]

    def sidecar(self) -> dict:
        f = self.field
        return {
            "model": "quadric",
            "kind": self.kind,
            "p": f.p,
            "h": f.h,
            "modulus": list(f.modulus),
            "form": [int(x) for x in self.form.reshape(-1)],
        }


def _totally_singular_lines(qm: QuadricModel) -> np.ndarray:
    f = qm.field
    P = len(qm.coords)
    B = qm.bilinear(qm.coords[:, None, :], qm.coords[None, :, :])
    iu, ju = np.nonzero(np.triu(B == 0, 1))
    # line through x and y: x together with a*x + y for all a
    x, y = qm.coords[iu], qm.coords[ju]
    pts = [iu[:, None]]
    a = np.arange(f.q)
    comb = f.add[f.mul[a[None, :, None], x[:, None, :]], y[:, None, :]]
    ids = qm.point_ids(comb.reshape(-1, qm.n)).reshape(len(iu), f.q)
    if np.any(ids < 0):
        raise FieldError("a line through two perpendicular singular points left the quadric")
    rows = np.sort(np.concatenate([iu[:, None], ids], axis=1), axis=1)
    rows = np.unique(rows, axis=0)
    assert rows.shape[1] == f.q + 1 and rows.max() < P
    return rows


def _build(f: Field, kind: str, form: np.ndarray) -> tuple[Geometry, QuadricModel]:
    if f.p == 2:
        raise FieldError("quadric models are implemented for odd q only")
    n = form.shape[0]
    allpts = la.projective_points(f, n)
    tmp = QuadricModel(f, kind, form, allpts, np.zeros((0, 0), dtype=np.int64))
    coords = allpts[tmp.quadratic(allpts) == 0]
    qm = QuadricModel(f, kind, form, coords, np.zeros((0, 0), dtype=np.int64))
    qm.lines = _totally_singular_lines(qm)
    name = f"Q({n - 1},{f.q})"
    g = Geometry(qm.lines, len(coords), model=qm, name=name)
    return g, qm


def parabolic_form(f: Field) -> np.ndarray:
    F = np.zeros((5, 5), dtype=np.int64)
    F[0, 0] = 1
    F[1, 2] = 1
    F[3, 4] = 1
    return F


def elliptic_form(f: Field) -> np.ndarray:
    nu = find_nonsquare(f).value
    F = np.zeros((6, 6), dtype=np.int64)
    F[0, 0] = 1
    F[1, 1] = int(f.neg[nu])
    F[2, 3] = 1
    F[4, 5] = 1
    return F


def build_parabolic(f: Field) -> tuple[Geometry, QuadricModel]:
    return _build(f, "parabolic", parabolic_form(f))


def build_elliptic(f: Field) -> tuple[Geometry, QuadricModel]:
    return _build(f, "elliptic", elliptic_form(f))


def hyperplane_section(g: Geometry, qm: QuadricModel, a) -> Subgeometry:
    """Points of the quadric in the hyperplane a-perp, with the lines inside it."""
    a = np.asarray(a, dtype=np.int64)
    mask = qm.bilinear(qm.coords, a[None, :]) == 0
    return Subgeometry(g, np.flatnonzero(mask), full_lines_inside(g, mask))


def nonsingular_vectors(qm: QuadricModel) -> np.ndarray:
    pts = la.projective_points(qm.field, qm.n)
    return pts[qm.quadratic(pts) != 0]


# collineations


def collineation_point_perm(qm: QuadricModel, M: np.ndarray, k: int = 0) -> np.ndarray:
    """Point permutation of v -> (v M)^(p^k); raises if the quadric is not preserved."""
    f = qm.field
    img = la.matvec(f, np.asarray(M, dtype=np.int64), qm.coords)
    if k:
        img = _frob(f, k)[img]
    ids = qm.point_ids(img)
    if np.any(ids < 0) or len(np.unique(ids)) != len(ids):
        raise ValueError("map does not preserve the quadric")
    return ids


def _frob(f: Field, k: int) -> np.ndarray:
    e = f.p**k
    return np.array([f.pow(a, e) for a in range(f.q)], dtype=np.int64)


def frobenius_point_perm(qm: QuadricModel, k: int = 1) -> np.ndarray:
    f = qm.field
    return collineation_point_perm(qm, np.eye(qm.n, dtype=np.int64), k)


def reflection_matrix(qm: QuadricModel, v) -> np.ndarray:
    """Matrix of x -> x - B(x,v) Q(v)^-1 v acting on row vectors."""
    f = qm.field
    v = np.asarray(v, dtype=np.int64)
    qv = int(qm.quadratic(v))
    if qv == 0:
        raise ValueError("reflection needs a nonsingular vector")
    col = la.matvec(f, qm.gram.T, v)  # B(e_i, v) for each basis vector e_i
    scale = f.mul[col, f.inv[qv]]
    outer = f.mul[scale[:, None], v[None, :]]
    return f.sub[np.eye(qm.n, dtype=np.int64), outer]


def siegel_matrix(qm: QuadricModel, u, v, c: int) -> np.ndarray:
    """x -> x + c (B(x,v) u - B(x,u) v) for a totally singular line <u, v>."""
    f = qm.field
    u = np.asarray(u, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    bv = la.matvec(f, qm.gram.T, v)
    bu = la.matvec(f, qm.gram.T, u)
    term = f.sub[f.mul[bv[:, None], u[None, :]], f.mul[bu[:, None], v[None, :]]]
    return f.add[np.eye(qm.n, dtype=np.int64), f.mul[c, term]]
