"""Permutation groups acting on the points and lines of a geometry.

Conventions: a permutation is an integer array ``perm`` with ``x -> perm[x]``.
Products act left to right, so ``(a * b)`` first applies ``a`` and then ``b``.

The stabilizer chain is built over the point domain only.  For a thick
quadrangle an automorphism is determined by its action on points, so the
line permutation is carried along but never needed for group arithmetic.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .incidence import Geometry, Subgeometry


class GroupError(ValueError):
    pass


def _owners(g: Geometry) -> np.ndarray:
    return np.repeat(np.arange(g.L, dtype=np.int64), g.line_sizes)


def induced_line_perm(g: Geometry, points: np.ndarray) -> np.ndarray | None:
    """Line permutation induced by a point permutation, or None if lines are not preserved."""
    lm = g.line_matrix
    if lm is not None and lm.shape[1] >= 2:
        lines = g.join_many(points[lm[:, 0]], points[lm[:, 1]])
    else:
        lines = np.full(g.L, -1, dtype=np.int64)
        for i in range(g.L):
            pts = points[g.line(i)]
            if len(pts) >= 2:
                lines[i] = g.join(int(pts[0]), int(pts[1]))
    if np.any(lines < 0):
        return None
    return lines


def is_automorphism(g: Geometry, points: np.ndarray, lines: np.ndarray) -> bool:
    """Both maps are bijections and flags go to flags."""
    if len(points) != g.P or len(lines) != g.L:
        return False
    for perm, n in ((points, g.P), (lines, g.L)):
        if np.any(perm < 0) or np.any(perm >= n):
            return False
        if len(np.unique(perm)) != n:
            return False
    keys = lines[_owners(g)] * g.P + points[g.line_pts]
    return np.array_equal(np.sort(keys), g.flag_keys)


class GroupElement:
    """An automorphism of a geometry, stored as a point and a line permutation."""

    __slots__ = ("geometry", "points", "lines")

    def __init__(self, g: Geometry, points, lines=None, check: bool = True):
        points = np.asarray(points, dtype=np.int64)
        if lines is None:
            lines = induced_line_perm(g, points)
            if lines is None:
                raise GroupError("point map does not preserve lines")
        lines = np.asarray(lines, dtype=np.int64)
        if check and not is_automorphism(g, points, lines):
            raise GroupError("not an automorphism")
        points.setflags(write=False)
        lines.setflags(write=False)
        self.geometry = g
        self.points = points
        self.lines = lines

    @classmethod
    def identity(cls, g: Geometry) -> "GroupElement":
        return cls(g, np.arange(g.P), np.arange(g.L), check=False)

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(self.geometry, other.points[self.points], other.lines[self.lines], check=False)

    def inverse(self) -> "GroupElement":
        return GroupElement(self.geometry, np.argsort(self.points), np.argsort(self.lines), check=False)

    def __pow__(self, n: int) -> "GroupElement":
        if n < 0:
            return self.inverse() ** (-n)
        out, base = GroupElement.identity(self.geometry), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        return (
            isinstance(other, GroupElement)
            and np.array_equal(self.points, other.points)
            and np.array_equal(self.lines, other.lines)
        )

    def __hash__(self):
        return hash(self.points.tobytes())

    @property
    def is_identity(self) -> bool:
        return bool(np.all(self.points == np.arange(len(self.points))))

    def order(self) -> int:
        from math import lcm

        seen = np.zeros(len(self.points), dtype=bool)
        out = 1
        for x in range(len(self.points)):
            if seen[x]:
                continue
            n, y = 0, x
            while not seen[y]:
                seen[y] = True
                y = int(self.points[y])
                n += 1
            out = lcm(out, n)
        return out

    def fixes_points(self, pts) -> bool:
        pts = np.asarray(pts, dtype=np.int64)
        return bool(np.all(self.points[pts] == pts))

    def fixes_lines(self, lines) -> bool:
        lines = np.asarray(lines, dtype=np.int64)
        return bool(np.all(self.lines[lines] == lines))

    def __repr__(self):
        moved = int(np.count_nonzero(self.points != np.arange(len(self.points))))
        return f"<GroupElement moving {moved} points>"


# stabilizer chains


class BSGS:
    """Base and strong generating set over ``range(n)``.

    Built by random Schreier-Sims, then verified deterministically by sifting
    every Schreier generator, so the resulting order is exact.
    """

    def __init__(self, n: int, gens, base_prefix=(), seed: int = 0, verify: bool = True):
        self.n = n
        self.base: list[int] = []
        self.strong: list[np.ndarray] = []
        self.strong_inv: list[np.ndarray] = []
        self.level_gens: list[list[int]] = []
        self.sv: list[np.ndarray] = []
        self.orbits: list[list[int]] = []
        self._rng = np.random.default_rng(seed)
        gens = [np.asarray(p, dtype=np.int64) for p in gens]
        gens = [p for p in gens if np.any(p != np.arange(n))]
        for b in base_prefix:
            if int(b) not in self.base:
                self._new_level(int(b))
        if not gens:
            return
        for p in gens:
            self._add_if_new(p)
        self._random_phase(gens)
        if verify:
            self._verify()

    # levels

    def _new_level(self, b: int):
        self.base.append(b)
        self.level_gens.append([])
        sv = np.full(self.n, -1, dtype=np.int64)
        sv[b] = -2
        self.sv.append(sv)
        self.orbits.append([b])

    def _extend_orbit(self, i: int, new_k: int | None):
        sv = self.sv[i]
        orbit = self.orbits[i]
        gens = self.level_gens[i]
        if new_k is not None:
            frontier = np.array(orbit, dtype=np.int64)
            img = self.strong[new_k][frontier]
            fresh = np.unique(img[sv[img] == -1])
            if len(fresh) == 0:
                return
            sv[fresh] = new_k
            orbit.extend(fresh.tolist())
            frontier = fresh
        else:
            frontier = np.array(orbit, dtype=np.int64)
        while len(frontier):
            nxt = []
            for k in gens:
                img = self.strong[k][frontier]
                fresh = np.unique(img[sv[img] == -1])
                if len(fresh):
                    sv[fresh] = k
                    orbit.extend(fresh.tolist())
                    nxt.append(fresh)
            frontier = np.concatenate(nxt) if nxt else np.zeros(0, dtype=np.int64)

    def _add_strong(self, h: np.ndarray, level: int):
        if level == len(self.base):
            moved = np.flatnonzero(h != np.arange(self.n))
            self._new_level(int(moved[0]))
        k = len(self.strong)
        self.strong.append(h)
        self.strong_inv.append(np.argsort(h))
        for i in range(level + 1):
            self.level_gens[i].append(k)
            self._extend_orbit(i, k)

    def sift(self, h: np.ndarray, start: int = 0) -> tuple[np.ndarray, int]:
        """Return the residue and the level at which sifting stopped."""
        for i in range(start, len(self.base)):
            b = self.base[i]
            x = int(h[b])
            sv = self.sv[i]
            if sv[x] == -1:
                return h, i
            while x != b:
                k = int(sv[x])
                inv = self.strong_inv[k]
                h = inv[h]
                x = int(inv[x])
        return h, len(self.base)

    def _add_if_new(self, h: np.ndarray) -> bool:
        res, lvl = self.sift(h)
        if lvl == len(self.base) and np.all(res == np.arange(self.n)):
            return False
        self._add_strong(res, lvl)
        return True

    def _random_phase(self, gens, stop_after: int = 40):
        slots = [g.copy() for g in gens]
        while len(slots) < 10:
            slots.append(gens[len(slots) % len(gens)].copy())
        acc = np.arange(self.n)
        rng = self._rng

        def step():
            nonlocal acc
            i, j = rng.choice(len(slots), size=2, replace=False)
            if rng.random() < 0.5:
                slots[i] = slots[j][slots[i]]
            else:
                slots[i] = slots[i][slots[j]]
            acc = slots[i][acc]
            return acc

        for _ in range(50):
            step()
        quiet = 0
        while quiet < stop_after:
            quiet = 0 if self._add_if_new(step()) else quiet + 1

    def transversal(self, i: int, x: int) -> np.ndarray:
        """An element mapping base[i] to x, built from the Schreier vector."""
        word = []
        b = self.base[i]
        sv = self.sv[i]
        while x != b:
            k = int(sv[x])
            word.append(k)
            x = int(self.strong_inv[k][x])
        u = np.arange(self.n)
        for k in reversed(word):
            u = self.strong[k][u]
        return u

    def _verify(self):
        i = len(self.base) - 1
        while i >= 0:
            restart = False
            sv = self.sv[i]
            for x in list(self.orbits[i]):
                u = self.transversal(i, x)
                for k in list(self.level_gens[i]):
                    y = int(self.strong[k][x])
                    if sv[y] == k and int(self.strong_inv[k][y]) == x:
                        continue  # tree edge: Schreier generator is trivial
                    h = self.strong[k][u]
                    res, lvl = self.sift(h, i)
                    if lvl < len(self.base) or np.any(res != np.arange(self.n)):
                        self._add_strong(res, lvl)
                        restart = True
                        break
                if restart:
                    break
            if restart:
                i = len(self.base) - 1
            else:
                i -= 1

    @property
    def orbit_sizes(self) -> list[int]:
        return [len(o) for o in self.orbits]

    @property
    def order(self) -> int:
        out = 1
        for s in self.orbit_sizes:
            out *= s
        return out

    def contains(self, h) -> bool:
        res, lvl = self.sift(np.asarray(h, dtype=np.int64))
        return lvl == len(self.base) and bool(np.all(res == np.arange(self.n)))

    def elements(self, limit: int = 100_000):
        """All group elements as point permutations (small groups only)."""
        if self.order > limit:
            raise GroupError(f"group of order {self.order} is too large to list")
        out = [np.arange(self.n)]
        for i in reversed(range(len(self.base))):
            reps = [self.transversal(i, x) for x in self.orbits[i]]
            out = [u[e] for e in out for u in reps]
        return out


# actions and orbits


class Action(enum.Enum):
    POINT = "point"
    LINE = "line"
    POINTSET = "pointset"
    LINESET = "lineset"
    SUBGEO = "subgeo"


def _set_weights(n: int, salt: int) -> np.ndarray:
    rng = np.random.default_rng(0x5EED + salt)
    return rng.integers(0, 2**63, size=n, dtype=np.int64).astype(np.uint64) * np.uint64(2) + np.uint64(1)


@dataclass
class OrbitResult:
    size: int
    members: np.ndarray | None  # ids (POINT/LINE) or a 2-d array of sorted sets
    transversal: list | None = None


class GenSet:
    """Generators of an automorphism group of one geometry."""

    def __init__(self, g: Geometry, gens=(), name: str = ""):
        self.geometry = g
        self.gens: list[GroupElement] = []
        self.name = name
        for e in gens:
            if not isinstance(e, GroupElement):
                e = GroupElement(g, e)
            if e.geometry is not g and not e.geometry.same_as(g):
                raise GroupError("generator acts on another geometry")
            self.gens.append(e)

    def __len__(self):
        return len(self.gens)

    def __iter__(self):
        return iter(self.gens)

    def extended(self, more, name: str = "") -> "GenSet":
        return GenSet(self.geometry, list(self.gens) + list(more), name=name or self.name)

    @cached_property
    def bsgs(self) -> BSGS:
        return BSGS(self.geometry.P, [e.points for e in self.gens])

    def bsgs_with_base(self, prefix) -> BSGS:
        gens = [e.points for e in self.gens]
        known = self.__dict__.get("bsgs")
        if known is None:
            return BSGS(self.geometry.P, gens, base_prefix=list(prefix))
        # random Schreier-Sims only finds group elements, so reaching the
        # verified order proves the new chain complete
        chain = BSGS(self.geometry.P, gens, base_prefix=list(prefix), verify=False)
        if chain.order != known.order:
            chain._verify()
        return chain

    def order(self) -> int:
        return self.bsgs.order

    def contains(self, e: GroupElement) -> bool:
        return self.bsgs.contains(e.points)

    def elements(self, limit: int = 100_000) -> list[GroupElement]:
        g = self.geometry
        return [GroupElement(g, p, check=False) for p in self.bsgs.elements(limit)]

    def perms(self, action: Action) -> list[np.ndarray]:
        if action in (Action.LINE, Action.LINESET):
            return [e.lines for e in self.gens]
        return [e.points for e in self.gens]


def group_order(gs: GenSet) -> int:
    return gs.order()


def _seed_set(seed, action: Action) -> np.ndarray:
    if action is Action.SUBGEO:
        if isinstance(seed, Subgeometry):
            return np.asarray(seed.points, dtype=np.int64)
    return np.unique(np.asarray(seed, dtype=np.int64))


def orbit(gs: GenSet, seed, action: Action = Action.POINT, store: bool = True, limit: int | None = None) -> OrbitResult:
    """Breadth-first orbit.

    Sets are deduplicated by a 64-bit additive hash of their members (random
    odd weights per id), so no sorting is needed while exploring.  Members
    are returned as sorted rows when ``store`` is set.
    """
    perms = gs.perms(action)
    if action in (Action.POINT, Action.LINE):
        n = gs.geometry.P if action is Action.POINT else gs.geometry.L
        seen = np.zeros(n, dtype=bool)
        seen[int(seed)] = True
        members = [int(seed)]
        frontier = np.array([int(seed)], dtype=np.int64)
        while len(frontier):
            nxt = []
            for p in perms:
                img = p[frontier]
                fresh = np.unique(img[~seen[img]])
                if len(fresh):
                    seen[fresh] = True
                    nxt.append(fresh)
                    members.extend(fresh.tolist())
            frontier = np.concatenate(nxt) if nxt else np.zeros(0, dtype=np.int64)
        return OrbitResult(len(members), np.array(members, dtype=np.int64))
    start = _seed_set(seed, action)
    n = gs.geometry.L if action is Action.LINESET else gs.geometry.P
    return _set_orbit(perms, n, start[None, :], store=store, limit=limit)


def _set_orbit(perms, n, start: np.ndarray, store=True, limit=None, weights=None, chunk: int = 65536) -> OrbitResult:
    w = _set_weights(n, 0) if weights is None else weights
    perms = [np.asarray(p, dtype=np.int32) for p in perms]
    start = np.asarray(start, dtype=np.int32)
    with np.errstate(over="ignore"):
        key = lambda rows: w[rows].sum(axis=1, dtype=np.uint64)
        seen = np.unique(key(start))
        frontier = start
        kept = [np.sort(start, axis=1)] if store else None
        total = 1
        while len(frontier):
            new_rows, new_keys = [], []
            for lo in range(0, len(frontier), chunk):
                block = frontier[lo : lo + chunk]
                for p in perms:
                    rows = p[block]
                    keys = key(rows)
                    uniq, idx = np.unique(keys, return_index=True)
                    pos = np.minimum(np.searchsorted(seen, uniq), len(seen) - 1)
                    fresh = seen[pos] != uniq
                    new_rows.append(rows[idx[fresh]])
                    new_keys.append(uniq[fresh])
            if new_keys:
                allk = np.concatenate(new_keys)
                uniq, idx = np.unique(allk, return_index=True)
                frontier = np.concatenate(new_rows)[idx]
                seen = np.union1d(seen, uniq)
            else:
                frontier = start[:0]
            total += len(frontier)
            if store and len(frontier):
                kept.append(np.sort(frontier, axis=1))
            if limit is not None and total > limit:
                raise GroupError(f"orbit exceeds {limit}")
    members = np.concatenate(kept).astype(np.int64) if store else None
    return OrbitResult(int(total), members)


def joint_orbit_size(gs: GenSet, parts) -> int:
    """Orbit length of a tuple of objects, each given as (action, seed).

    Every part is encoded as a set in a disjoint slice of one combined domain,
    so the tuple orbit is a set orbit there.
    """
    g = gs.geometry
    offset = 0
    rows, perms = [], [[] for _ in gs.gens]
    for action, seed in parts:
        n = g.L if action in (Action.LINE, Action.LINESET) else g.P
        arr = np.atleast_1d(_seed_set(seed, action) if action not in (Action.POINT, Action.LINE) else np.asarray([seed]))
        rows.append(arr + offset)
        for j, p in enumerate(gs.perms(action)):
            perms[j].append(p + offset)
        offset += n
    full = [np.concatenate(ps) for ps in perms]
    start = np.concatenate(rows)[None, :]
    return _set_orbit(full, offset, start, store=False).size


def stabilizer_order(gs: GenSet, obj, action: Action = Action.POINT) -> int:
    """|G_obj| = |G| / |obj^G|."""
    size = orbit(gs, obj, action, store=False).size
    order = gs.order()
    if order % size:
        raise GroupError("orbit length does not divide the group order")
    return order // size


def pointwise_stabilizer_order(gs: GenSet, pts) -> int:
    """Order of the subgroup fixing every point of ``pts``."""
    pts = [int(x) for x in dict.fromkeys(np.asarray(pts, dtype=np.int64).tolist())]
    chain = gs.bsgs_with_base(pts)
    out = 1
    for s in chain.orbit_sizes[len(pts):]:
        out *= s
    return out


def pointwise_stabilizer(gs: GenSet, pts) -> GenSet:
    """Generators of the subgroup fixing every point of ``pts``."""
    pts = [int(x) for x in dict.fromkeys(np.asarray(pts, dtype=np.int64).tolist())]
    chain = gs.bsgs_with_base(pts)
    g = gs.geometry
    lvl = len(pts)
    idx = chain.level_gens[lvl] if lvl < len(chain.base) else []
    return GenSet(g, [GroupElement(g, chain.strong[k], check=False) for k in idx])


def set_stabilizer_sample(gs: GenSet, pts, n: int, seed: int = 0, orbit_limit: int = 10_000, word_length: int = 24) -> list[GroupElement]:
    """Up to ``n`` distinct elements of the stabilizer of the point set ``pts``.

    The orbit of the set is walked with a transversal; a random word g is
    then corrected by the inverse transversal element of its image.
    """
    g = gs.geometry
    pts = np.sort(np.asarray(pts, dtype=np.int64))
    trans = {pts.tobytes(): GroupElement.identity(g)}
    queue = [pts]
    while queue:
        cur = queue.pop()
        t = trans[cur.tobytes()]
        for gen in gs.gens:
            img = np.sort(gen.points[cur])
            k = img.tobytes()
            if k not in trans:
                trans[k] = t * gen
                queue.append(img)
                if len(trans) > orbit_limit:
                    raise GroupError(f"set orbit exceeds {orbit_limit}")
    rng = np.random.default_rng(seed)
    gens = list(gs.gens) + [e.inverse() for e in gs.gens]
    out: dict[bytes, GroupElement] = {}
    tries = 0
    while len(out) < n and tries < 50 * n:
        tries += 1
        w = GroupElement.identity(g)
        for i in rng.integers(len(gens), size=word_length):
            w = w * gens[int(i)]
        k = np.sort(w.points[pts]).tobytes()
        s = w * trans[k].inverse()
        if not s.is_identity:
            out.setdefault(s.points.tobytes(), s)
    return list(out.values())


def closure_elements(gs: GenSet, limit: int = 1_000_000) -> int:
    """Group order by brute-force closure over point permutations (cross-check)."""
    g = gs.geometry
    gens = [e.points for e in gs.gens]
    ident = np.arange(g.P)
    seen = {ident.tobytes()}
    frontier = [ident]
    while frontier:
        nxt = []
        for a in frontier:
            for p in gens:
                b = p[a]
                key = b.tobytes()
                if key not in seen:
                    seen.add(key)
                    nxt.append(b)
                    if len(seen) > limit:
                        raise GroupError("closure exceeds limit")
        frontier = nxt
    return len(seen)


def induced_action(gs: GenSet, sub: Subgeometry) -> GenSet:
    """Restriction of every generator to a stabilized subgeometry.

    The result acts on ``sub.as_geometry()``, whose ids are the positions in
    ``sub.points`` and ``sub.lines``.
    """
    pts = np.asarray(sub.points, dtype=np.int64)
    lines = np.asarray(sub.lines, dtype=np.int64)
    g = gs.geometry
    pinv = np.full(g.P, -1, dtype=np.int64)
    pinv[pts] = np.arange(len(pts))
    linv = np.full(g.L, -1, dtype=np.int64)
    linv[lines] = np.arange(len(lines))
    host = sub.as_geometry()
    out = []
    for e in gs.gens:
        pp = pinv[e.points[pts]]
        lp = linv[e.lines[lines]]
        if np.any(pp < 0) or np.any(lp < 0):
            raise GroupError("a generator moves the subgeometry")
        out.append(GroupElement(host, pp, lp))
    return GenSet(host, out, name=f"{gs.name}|sub")


# generator factories


def _symmetry_setup(g: Geometry, W: int):
    Wp = g.line(W)
    fixed_lines = g.lines_meeting(Wp)
    x0 = int(Wp[0])
    N = next(int(l) for l in g.pencil(x0) if l != W)
    ys = [int(y) for y in g.line(N) if y != x0]
    return fixed_lines, ys


def _symmetry_by_propagation(g: Geometry, fixed_lines, y: int, y2: int):
    from .autom import extend_automorphism

    out = extend_automorphism(g, [(y, y2)], [(int(l), int(l)) for l in fixed_lines])
    if out is None:
        return None
    return GroupElement(g, out[0], out[1])


def _siegel_symmetries(g: Geometry, qm, W: int) -> list[GroupElement]:
    from .constructions.quadrics import collineation_point_perm, siegel_matrix

    a, b = (int(x) for x in g.line(W)[:2])
    u, v = qm.coords[a], qm.coords[b]
    out = []
    for c in range(qm.field.q):
        pp = collineation_point_perm(qm, siegel_matrix(qm, u, v, c))
        out.append(GroupElement(g, pp))
    return out


def line_symmetries(g: Geometry, W: int, model=None) -> GenSet:
    """All symmetries about the line ``W`` (the identity included).

    In a quadric model they are Siegel transformations; otherwise every
    candidate image of one point is tried by propagation from the fixed
    lines of W-perp.
    """
    from .constructions.quadrics import QuadricModel

    fixed_lines, ys = _symmetry_setup(g, W)
    if isinstance(model, QuadricModel):
        elems = _siegel_symmetries(g, model, W)
    else:
        elems = [GroupElement.identity(g)]
        for y2 in ys[1:]:
            e = _symmetry_by_propagation(g, fixed_lines, ys[0], y2)
            if e is not None:
                elems.append(e)
    for e in elems:
        if not e.fixes_lines(fixed_lines):
            raise GroupError("computed map does not fix W-perp")
    if len(elems) < 2:
        raise GroupError(f"line {W} is not an axis of symmetry")
    return GenSet(g, elems, name=f"sym({W})")


def symmetry_generators(g: Geometry, W: int, model=None) -> list[GroupElement]:
    """A small generating set of the symmetry group about ``W``."""
    from .constructions.quadrics import QuadricModel

    if isinstance(model, QuadricModel):
        return _independent(_siegel_symmetries(g, model, W))
    fixed_lines, ys = _symmetry_setup(g, W)
    found: list[GroupElement] = []
    reached = {ys[0]}
    for y2 in ys[1:]:
        if y2 in reached:
            continue
        e = _symmetry_by_propagation(g, fixed_lines, ys[0], y2)
        if e is None:
            continue
        found.append(e)
        orb = orbit(GenSet(g, found), ys[0])
        reached = set(orb.members.tolist())
        if len(reached) == len(ys):
            break
    if not found:
        raise GroupError(f"line {W} is not an axis of symmetry")
    return found


def _independent(elems: list[GroupElement]) -> list[GroupElement]:
    out: list[GroupElement] = []
    for e in elems:
        if e.is_identity:
            continue
        if out and GenSet(e.geometry, out).contains(e):
            continue
        out.append(e)
    return out


def translation_group(g: Geometry, e: int, axis_lines=None) -> GenSet:
    """Group generated by the symmetries about the lines through ``e``.

    For a translation point this is the translation group; it is checked to
    fix every line on ``e`` and to act sharply transitively on the points
    not collinear with ``e``.
    """
    lines = list(g.pencil(e)) if axis_lines is None else list(axis_lines)
    gens: list[GroupElement] = []
    far = int(np.flatnonzero(~g.col[e])[0])
    target = int(np.count_nonzero(~g.col[e]))
    for W in lines:
        try:
            new = symmetry_generators(g, int(W))
        except GroupError:
            raise GroupError(f"line {W} through {e} is not an axis of symmetry")
        gens.extend(new)
        gs = GenSet(g, gens, name=f"T({e})")
        if orbit(gs, far).size == target and _regular_order(gs, target):
            break
    for el in gs.gens:
        if not el.fixes_lines(g.pencil(e)):
            raise GroupError("a translation moves a line through its centre")
    return gs


def _commute(gens: list[GroupElement]) -> bool:
    for i, a in enumerate(gens):
        for b in gens[i + 1 :]:
            if not np.array_equal(a.points[b.points], b.points[a.points]):
                return False
    return True


def _regular_order(gs: GenSet, target: int) -> bool:
    """True when ``gs`` has order ``target``, given a transitive orbit of that size.

    An abelian transitive group acts regularly, so its order is the orbit
    size; a random Schreier-Sims chain reaching that order is then complete
    and the deterministic verification is skipped.
    """
    if _commute(gs.gens):
        chain = BSGS(gs.geometry.P, [e.points for e in gs.gens], verify=False)
        if chain.order != target:
            chain._verify()
        gs.__dict__["bsgs"] = chain
    return gs.order() == target


def kernel_homologies(g: Geometry, u: int, v: int) -> GenSet:
    """All automorphisms fixing every line on ``u`` and every line on ``v``."""
    if g.col[u, v]:
        raise GroupError("u and v must be noncollinear")
    fixed = np.union1d(g.pencil(u), g.pencil(v))
    U0 = int(g.pencil(u)[0])
    ys = [int(y) for y in g.line(U0) if y != u and not g.col[y, v]]
    elems = [GroupElement.identity(g)]
    for y2 in ys[1:]:
        out = _symmetry_by_propagation(g, fixed, ys[0], y2)
        if out is not None:
            elems.append(out)
    return GenSet(g, elems, name=f"G({u},{v})")


def orthogonal_generators(g: Geometry, qm, n_reflections: int = 6, seed: int = 1) -> GenSet:
    """Reflections in a seeded sample of nonsingular vectors plus the Frobenius map.

    The sample is enlarged until further reflections add nothing and the
    group is transitive on flags.
    """
    from .constructions.quadrics import collineation_point_perm, frobenius_point_perm, nonsingular_vectors, reflection_matrix

    if qm.kind != "parabolic":
        raise GroupError("orthogonal_generators expects the parabolic model")
    vs = nonsingular_vectors(qm)
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(vs))
    refl = lambda v: GroupElement(g, collineation_point_perm(qm, reflection_matrix(qm, v)))
    gens = [refl(vs[i]) for i in order[:n_reflections]]
    if qm.field.h > 1:
        gens.append(GroupElement(g, frobenius_point_perm(qm, 1)))
    pos = n_reflections
    while True:
        gs = GenSet(g, gens, name="Aut(Q)")
        extra = [refl(vs[i]) for i in order[pos : pos + 3]]
        pos += 3
        missing = [e for e in extra if not gs.contains(e)]
        flags_ok = orbit(gs, 0).size == g.P and _line_stab_transitive(gs, g)
        if not missing and flags_ok:
            return gs
        gens.extend(missing)


def _line_stab_transitive(gs: GenSet, g: Geometry) -> bool:
    # transitive on flags iff point-transitive and the point stabilizer is
    # transitive on the lines through that point
    chain = gs.bsgs_with_base([0])
    stab = [GroupElement(g, chain.strong[k], check=False) for k in chain.level_gens[1]] if len(chain.base) > 1 else []
    if not stab:
        return len(g.pencil(0)) == 1
    orb = orbit(GenSet(g, stab), int(g.pencil(0)[0]), Action.LINE)
    return set(orb.members.tolist()) >= set(g.pencil(0).tolist())


def field_automorphism_lift(g: Geometry, cm) -> GroupElement:
    """The collineation induced by (a1, a2, c, b1, b2) -> (a1^p, l a2^p, c^p, b1^p, b2^p / l)
    with l^2 = m^(p-1); it maps A(t) to A(t^p)."""
    f = cm.field
    fr = np.array([f.pow(a, f.p) for a in range(f.q)], dtype=np.int64)
    lam = None
    target = f.pow(cm.m, f.p - 1)
    for x in range(1, f.q):
        if f.mul[x, x] == target:
            lam = x
            break
    if lam is None:
        raise GroupError("no scaling for the field automorphism lift")
    lam_inv = int(f.inv[lam])
    a1, a2, c, b1, b2 = cm.decode(np.arange(cm.order))
    phi = cm.encode(fr[a1], f.mul[lam, fr[a2]], fr[c], fr[b1], f.mul[lam_inv, fr[b2]])
    return _group_automorphism_perm(g, cm, phi, lambda t: int(fr[t]) if t < cm.q else t)


def scalar_automorphisms(g: Geometry, cm) -> list[GroupElement]:
    """(alpha, c, beta) -> (l alpha, l^2 c, l beta): these normalize every A(t)."""
    f = cm.field
    a1, a2, c, b1, b2 = cm.decode(np.arange(cm.order))
    lam = f.primitive
    l2 = int(f.mul[lam, lam])
    phi = cm.encode(f.mul[lam, a1], f.mul[lam, a2], f.mul[l2, c], f.mul[lam, b1], f.mul[lam, b2])
    return [_group_automorphism_perm(g, cm, phi, lambda t: t)]


def _group_automorphism_perm(g: Geometry, cm, phi: np.ndarray, tmap) -> GroupElement:
    pts = np.empty(g.P, dtype=np.int64)
    reps = cm.coset_reps
    nc = cm.n_cosets
    for t in cm.params:
        t2 = tmap(t)
        pts[t * nc + np.arange(nc)] = cm.coset_point[t2, phi[reps[t]]]
        pts[cm.symbol_point(t)] = cm.symbol_point(t2)
    return GroupElement(g, pts)
