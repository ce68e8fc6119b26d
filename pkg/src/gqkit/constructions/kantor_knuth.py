"""The Kantor-Knuth quadrangle from a 4-gonal family.

The group is G = {(alpha, c, beta) : alpha, beta in F_q^2, c in F_q} with

    (a, c, b)(a', c', b') = (a + a', c + c' + b.a', b + b')

and the q-clan A_t = diag(t, -m t^sigma).  Kantor's coset construction over
this family yields a quadrangle of order (q^2, q); the quadrangle of order
(q, q^2) wanted here is its dual.  Concretely, in the returned geometry

* points are the cosets g A(t) followed by the symbols [A(t)];
* lines are the elements of G, then the cosets g A*(t), then the symbol (inf).

Element ids are lexicographic in (alpha, c, beta).  Within each t, cosets are
ordered by their smallest element; t runs over F_q in element order and then
infinity.  The line (inf) carries the points [A(t)]; this is the line of
translation points.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from ..galois import Field, FieldAut, FieldError
from ..incidence import Geometry


@dataclass(eq=False)
class CosetModel:
    field: Field
    sigma: FieldAut
    m: int
    coset_point: np.ndarray | None = field(default=None, repr=False)  # (q+1, q^5)
    star_line: np.ndarray | None = field(default=None, repr=False)  # (q+1, q^5)

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def order(self) -> int:
        return self.q**5

    @property
    def params(self) -> range:
        """Parameter indices; index q stands for infinity."""
        return range(self.q + 1)

    # element encoding

    def encode(self, a1, a2, c, b1, b2) -> np.ndarray:
        q = self.q
        return (((np.asarray(a1) * q + a2) * q + c) * q + b1) * q + b2

    def decode(self, g):
        q = self.q
        g = np.asarray(g, dtype=np.int64)
        b2 = g % q
        g = g // q
        b1 = g % q
        g = g // q
        c = g % q
        g = g // q
        a2 = g % q
        a1 = g // q
        return a1, a2, c, b1, b2

    def mul(self, g, h) -> np.ndarray:
        f = self.field
        a1, a2, c, b1, b2 = self.decode(g)
        x1, x2, d, y1, y2 = self.decode(h)
        cross = f.add[f.mul[b1, x1], f.mul[b2, x2]]
        return self.encode(f.add[a1, x1], f.add[a2, x2], f.add[f.add[c, d], cross], f.add[b1, y1], f.add[b2, y2])

    def inv(self, g) -> np.ndarray:
        f = self.field
        a1, a2, c, b1, b2 = self.decode(g)
        dotp = f.add[f.mul[b1, a1], f.mul[b2, a2]]
        return self.encode(f.neg[a1], f.neg[a2], f.add[f.neg[c], dotp], f.neg[b1], f.neg[b2])

    # the family

    def clan(self, t: int) -> tuple[int, int]:
        """Diagonal entries of A_t."""
        f = self.field
        return t, int(f.neg[f.mul[self.m, self.sigma.table[t]]])

    def family(self, t: int) -> np.ndarray:
        """Sorted element ids of A(t)."""
        f, q = self.field, self.q
        a1, a2 = np.divmod(np.arange(q * q), q)
        zero = np.zeros_like(a1)
        if t == q:
            return np.sort(self.encode(zero, zero, zero, a1, a2))
        d1, d2 = self.clan(t)
        c = f.add[f.mul[d1, f.mul[a1, a1]], f.mul[d2, f.mul[a2, a2]]]
        two = int(f.add[1, 1])
        b1 = f.mul[f.mul[two, d1], a1]
        b2 = f.mul[f.mul[two, d2], a2]
        return np.sort(self.encode(a1, a2, c, b1, b2))

    def centre(self) -> np.ndarray:
        z = np.zeros(self.q, dtype=np.int64)
        return self.encode(z, z, np.arange(self.q), z, z)

    def star_family(self, t: int) -> np.ndarray:
        A = self.family(t)
        C = self.centre()
        return np.unique(self.mul(A[:, None], C[None, :]))

    # ids in the dual geometry

    @property
    def n_cosets(self) -> int:
        return self.q**3

    @property
    def n_points(self) -> int:
        return (self.q + 1) * (self.n_cosets + 1)

    @property
    def n_lines(self) -> int:
        return self.order + (self.q + 1) * self.q**2 + 1

    def symbol_point(self, t: int) -> int:
        """Point id of [A(t)]."""
        return (self.q + 1) * self.n_cosets + t

    @property
    def infinity_line(self) -> int:
        return self.n_lines - 1

    @property
    def translation_points(self) -> np.ndarray:
        return np.array([self.symbol_point(t) for t in self.params], dtype=np.int64)

    def element_line(self, g) -> np.ndarray:
        return np.asarray(g, dtype=np.int64)

    def is_element_line(self, line) -> np.ndarray:
        return np.asarray(line) < self.order

    def point_kind(self, x: int) -> tuple[str, int]:
        """('coset', t) or ('symbol', t)."""
        if x >= (self.q + 1) * self.n_cosets:
            return "symbol", x - (self.q + 1) * self.n_cosets
        return "coset", x // self.n_cosets

    def left_mult_point_perm(self, h: int) -> np.ndarray:
        """Point permutation of x -> h x (left multiplication)."""
        q = self.q
        perm = np.arange(self.n_points, dtype=np.int64)
        reps = self.coset_reps
        for t in self.params:
            ids = t * self.n_cosets + np.arange(self.n_cosets)
            perm[ids] = self.coset_point[t, self.mul(h, reps[t])]
        return perm

    @cached_property
    def coset_reps(self) -> np.ndarray:
        """(q+1, q^3): smallest element of each coset g A(t), in id order."""
        out = np.empty((self.q + 1, self.n_cosets), dtype=np.int64)
        for t in self.params:
            ids = self.coset_point[t]
            order = np.argsort(ids, kind="stable")
            first = np.ones(len(ids), dtype=bool)
            first[1:] = ids[order][1:] != ids[order][:-1]
            out[t] = order[first]
        return out

    def sidecar(self) -> dict:
        f = self.field
        return {
            "model": "coset",
            "p": f.p,
            "h": f.h,
            "modulus": list(f.modulus),
            "sigma_k": self.sigma.k,
            "m": self.m,
            "clan": "diag(t, -m t^sigma)",
            "infinity_line": self.infinity_line,
        }


def kantor_knuth_family(f: Field, sigma: FieldAut, m: int) -> CosetModel:
    if f.p == 2:
        raise FieldError("the Kantor-Knuth family needs q odd")
    if sigma.field != f:
        raise FieldError("sigma belongs to another field")
    return CosetModel(f, sigma, int(m))


def verify_4gonal_family(cm: CosetModel) -> tuple[bool, dict | None]:
    """Check both Kantor conditions exhaustively; return (ok, first witness)."""
    N = cm.order
    fam = [cm.family(t) for t in cm.params]
    star = [cm.star_family(t) for t in cm.params]
    for t, A in enumerate(fam):
        if len(A) != cm.q**2 or len(star[t]) != cm.q**3:
            return False, {"condition": "size", "t": t}
    for s in cm.params:
        for t in cm.params:
            if s == t:
                continue
            prod = np.zeros(N, dtype=bool)
            prod[cm.mul(fam[s][:, None], fam[t][None, :]).reshape(-1)] = True
            for r in cm.params:
                if r in (s, t):
                    continue
                hits = fam[r][prod[fam[r]]]
                if np.any(hits != 0):
                    return False, {"condition": "K1", "s": s, "t": t, "r": r, "element": int(hits[hits != 0][0])}
            smask = np.zeros(N, dtype=bool)
            smask[star[s]] = True
            hits = fam[t][smask[fam[t]]]
            if np.any(hits != 0):
                return False, {"condition": "K2", "s": s, "t": t, "element": int(hits[hits != 0][0])}
    return True, None


def _coset_labels(cm: CosetModel, t: int, chunk: int = 4096) -> np.ndarray:
    """Smallest element of g A(t) for every g."""
    A = cm.family(t)
    out = np.empty(cm.order, dtype=np.int64)
    for start in range(0, cm.order, chunk):
        g = np.arange(start, min(cm.order, start + chunk))
        out[g] = cm.mul(g[:, None], A[None, :]).min(axis=1)
    return out


def build_kantor_knuth(f: Field, sigma: FieldAut, m) -> tuple[Geometry, CosetModel]:
    m = int(m)
    if m in set(f.squares.tolist()):
        raise FieldError(f"m = {m} is a square")
    cm = kantor_knuth_family(f, sigma, m)
    ok, witness = verify_4gonal_family(cm)
    if not ok:
        raise FieldError(f"Kantor conditions fail: {witness}")
    q, N = cm.q, cm.order
    nc = cm.n_cosets
    coset_point = np.empty((q + 1, N), dtype=np.int64)
    star_line = np.empty((q + 1, N), dtype=np.int64)
    a1, a2, c, b1, b2 = cm.decode(np.arange(N))
    star_rows = []
    for t in cm.params:
        lab = _coset_labels(cm, t)
        uniq, idx = np.unique(lab, return_inverse=True)
        if len(uniq) != nc:
            raise FieldError("unexpected number of cosets")
        coset_point[t] = t * nc + idx
        # g A*(t) = g C A(t): smallest label over the centre translates
        shifted = np.stack([lab[cm.encode(a1, a2, f.add[c, d], b1, b2)] for d in range(q)])
        slab = shifted.min(axis=0)
        suniq, sidx = np.unique(slab, return_inverse=True)
        if len(suniq) != q * q:
            raise FieldError("unexpected number of starred cosets")
        star_line[t] = N + t * q * q + sidx
        pairs = np.unique(np.stack([sidx, idx], axis=1), axis=0)
        members = pairs[:, 1].reshape(q * q, q) + t * nc
        star_rows.append(np.concatenate([members, np.full((q * q, 1), cm.symbol_point(t))], axis=1))
    cm.coset_point = coset_point
    cm.star_line = star_line
    element_rows = coset_point.T
    inf_row = cm.translation_points[None, :]
    rows = np.concatenate([element_rows] + star_rows + [inf_row], axis=0)
    name = f"KK({q},{sigma})"
    g = Geometry(rows, cm.n_points, model=cm, name=name)
    return g, cm
