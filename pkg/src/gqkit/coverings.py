"""The affine part A of a quadrangle minus a hyperplane subquadrangle Q, the
geometry E of subtended ovoids and rosettes, and the projection A -> E.

Covers A -> E are factored both ways: below through the projection (an
automorphism of E after it) and above through an automorphism of the whole
quadrangle that stabilizes Q.

Ids: A and E are independent :class:`Geometry` objects.  A keeps
back-references to parent ids (``point_ids``, ``line_ids``) and the inverse
lookups ``point_index``/``line_index`` (-1 for objects of Q).  A base
automorphism of Q is a :class:`GroupElement` on ``Q.as_geometry()``, whose ids
are positions in the sorted point and line arrays of Q.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .autom import extend_automorphism
from .incidence import (
    Geometry,
    HyperplaneType,
    Morphism,
    MorphismReport,
    SpgReport,
    Subgeometry,
    classify_hyperplane,
    validate_morphism,
    validate_spg,
)
from .permgroups import GroupElement, GroupError, induced_line_perm, stabilizer_order, Action
from .subtension import all_subtended_ovoids, exterior_points


class CoverError(ValueError):
    pass


def _sub(Q) -> Subgeometry:
    return Q.sub if hasattr(Q, "sub") else Q


# A


@dataclass(eq=False)
class AffineGeometry:
    geometry: Geometry
    parent: Geometry
    Q: Subgeometry
    point_ids: np.ndarray  # A point -> parent point
    line_ids: np.ndarray  # A line -> parent line
    point_index: np.ndarray  # parent point -> A point or -1
    line_index: np.ndarray  # parent line -> A line or -1
    line_base: np.ndarray  # A line -> the parent point where it meets Q

    @property
    def P(self) -> int:
        return self.geometry.P

    @property
    def L(self) -> int:
        return self.geometry.L


def build_affine(g: Geometry, Q) -> AffineGeometry:
    """Remove the hyperplane subquadrangle Q: points off Q, lines not in Q
    with their points off Q."""
    S = _sub(Q)
    if classify_hyperplane(g, S) is not HyperplaneType.C:
        raise CoverError("Q is not a subquadrangle hyperplane")
    pts = exterior_points(g, S)
    lines = np.flatnonzero(~S.line_mask)
    pidx = np.full(g.P, -1, dtype=np.int64)
    pidx[pts] = np.arange(len(pts))
    lidx = np.full(g.L, -1, dtype=np.int64)
    lidx[lines] = np.arange(len(lines))
    rows = g.line_matrix[lines]
    inside = S.point_mask[rows]
    if not np.all(inside.sum(axis=1) == 1):
        raise CoverError("a line outside Q does not meet Q exactly once")
    base = rows[inside]
    k = rows.shape[1] - 1
    local = pidx[rows[~inside].reshape(len(lines), k)]
    A = Geometry(local, len(pts), name="A")
    if len(np.unique(A.point_degrees)) != 1 or int(A.point_degrees[0]) != len(g.pencil(int(pts[0]))):
        raise CoverError("A-points do not all have full degree")
    return AffineGeometry(A, g, S, pts, lines, pidx, lidx, base)


# E and the projection


@dataclass(eq=False)
class OvoidGeometry:
    geometry: Geometry
    affine: AffineGeometry
    ovoids: np.ndarray  # E point -> sorted parent ids of the ovoid
    rosettes: np.ndarray  # E line -> sorted E points
    rosette_base: np.ndarray  # E line -> common parent point of its ovoids
    pi: Morphism
    report: MorphismReport

    @property
    def parent(self) -> Geometry:
        return self.affine.parent

    @property
    def Q(self) -> Subgeometry:
        return self.affine.Q

    @property
    def theta(self):
        return self.report.theta

    @cached_property
    def ovoid_lookup(self) -> dict[bytes, int]:
        return {r.tobytes(): i for i, r in enumerate(self.ovoids)}

    @cached_property
    def fibers(self) -> np.ndarray:
        """E point -> the A points above it (rows of length theta)."""
        order = np.argsort(self.pi.point_map, kind="stable")
        return order.reshape(self.geometry.P, -1)

    @cached_property
    def q_geometry(self) -> Geometry:
        return self.Q.as_geometry(name="Q")

    def ovoid_index(self, pts) -> int:
        k = np.sort(np.asarray(pts, dtype=np.int64)).tobytes()
        if k not in self.ovoid_lookup:
            raise CoverError("not a subtended ovoid")
        return self.ovoid_lookup[k]


def build_ovoid_geometry(g: Geometry, Q, A: AffineGeometry | None = None) -> tuple[OvoidGeometry, Morphism]:
    """E: subtended ovoids as points, rosettes as lines; pi maps an A-point to
    the ovoid it subtends and an A-line to its rosette."""
    A = build_affine(g, Q) if A is None else A
    ovoids, idx = all_subtended_ovoids(g, A.Q)
    ros = np.sort(idx[A.geometry.line_matrix], axis=1)
    rows, line_map = np.unique(ros, axis=0, return_inverse=True)
    line_map = line_map.reshape(-1)
    if np.any(rows[:, 1:] == rows[:, :-1]):
        raise CoverError("two points of an A-line subtend the same ovoid")
    E = Geometry(rows, len(ovoids), name="E")
    # common point of the ovoids of each rosette, read from the ovoids alone
    mask = np.zeros((len(ovoids), g.P), dtype=bool)
    np.put_along_axis(mask, ovoids, True, axis=1)
    common = mask[rows].all(axis=1)
    if not np.all(common.sum(axis=1) == 1):
        raise CoverError("the ovoids of a rosette do not share exactly one point")
    base = np.argmax(common, axis=1)
    if not np.array_equal(base[line_map], A.line_base):
        raise CoverError("rosette base point disagrees with the A-line's point on Q")
    pi = Morphism(A.geometry, E, idx, line_map)
    rep = validate_morphism(pi)
    if not (rep.is_morphism and rep.is_cover and isinstance(rep.theta, int)):
        raise CoverError(f"the projection is not a cover: {rep.violations[:3]}")
    out = OvoidGeometry(E, A, ovoids, rows, base, pi, rep)
    return out, pi


# SPG parameters


@dataclass
class T3Report:
    hypotheses_hold: bool
    failed_hypotheses: list
    expected: tuple | None
    measured: tuple | None
    spg: SpgReport | None

    @property
    def matches(self) -> bool:
        return self.hypotheses_hold and self.spg is not None and self.spg.is_spg and self.expected == self.measured

    def to_dict(self) -> dict:
        return {
            "hypotheses_hold": self.hypotheses_hold,
            "failed_hypotheses": self.failed_hypotheses,
            "expected": self.expected,
            "measured": self.measured,
            "matches": self.matches,
            "mu_status": self.spg.mu_status if self.spg else None,
        }


def check_t3_parameters(E, s: int, t: int, t_sub: int, theta: int, force: bool = False) -> T3Report:
    """Compare the SPG parameters of E with (s - 1, t, theta, theta (t - t_sub)).

    The prediction needs t = s t_sub, (theta - 1) t = s^2 and theta > 1; when
    these fail no SPG claim is made unless ``force`` is set.
    """
    geo = E.geometry if isinstance(E, OvoidGeometry) else E
    failed = []
    if t != s * t_sub:
        failed.append("t = s t'")
    if (theta - 1) * t != s * s:
        failed.append("(theta - 1) t = s^2")
    if theta <= 1:
        failed.append("theta > 1")
    ok = not failed
    expected = (s - 1, t, theta, theta * (t - t_sub)) if ok else None
    if not ok and not force:
        return T3Report(False, failed, None, None, None)
    rep = validate_spg(geo)
    return T3Report(ok, failed, expected, rep.parameters, rep)


# covers


def cover_from_automorphism(E: OvoidGeometry, g_elem: GroupElement) -> Morphism:
    """pi after the restriction of a Q-stabilizing automorphism to A."""
    A = E.affine
    pts = A.point_index[g_elem.points[A.point_ids]]
    lines = A.line_index[g_elem.lines[A.line_ids]]
    if np.any(pts < 0) or np.any(lines < 0):
        raise CoverError("the automorphism does not stabilize Q")
    return Morphism(A.geometry, E.geometry, E.pi.point_map[pts], E.pi.line_map[lines])


def induced_e_automorphism(E: OvoidGeometry, g_elem: GroupElement) -> GroupElement:
    """The automorphism of E induced by a Q-stabilizing automorphism, read off
    the ovoid and rosette sets directly."""
    img = np.sort(g_elem.points[E.ovoids], axis=1)
    pts = np.array([E.ovoid_index(r) for r in img], dtype=np.int64)
    return GroupElement(E.geometry, pts)


def lower_decompose(E: OvoidGeometry, gamma: Morphism) -> GroupElement:
    """The automorphism alpha of E with gamma = alpha o pi."""
    pi = E.pi
    if gamma.source is not pi.source or gamma.target is not pi.target:
        raise CoverError("gamma must map A to E")
    ap = np.full(E.geometry.P, -1, dtype=np.int64)
    ap[pi.point_map] = gamma.point_map
    al = np.full(E.geometry.L, -1, dtype=np.int64)
    al[pi.line_map] = gamma.line_map
    if not np.array_equal(ap[pi.point_map], gamma.point_map) or not np.array_equal(al[pi.line_map], gamma.line_map):
        raise CoverError("gamma is not constant on the fibers of pi")
    try:
        alpha = GroupElement(E.geometry, ap, al)
    except GroupError as exc:
        raise CoverError(f"the induced map is not an automorphism of E: {exc}") from exc
    if not (np.array_equal(alpha.points[pi.point_map], gamma.point_map) and np.array_equal(alpha.lines[pi.line_map], gamma.line_map)):
        raise CoverError("gamma differs from alpha o pi")
    return alpha


def derive_base_automorphism(E: OvoidGeometry, gamma: Morphism, infinity_line: int | None = None) -> GroupElement:
    """The automorphism of Q read from a cover: a point u of Q goes to the
    common point of the rosettes that gamma assigns to the A-lines on u."""
    g, S, A = E.parent, E.Q, E.affine
    Qg = E.q_geometry
    img = np.empty(len(S.points), dtype=np.int64)
    for k, u in enumerate(S.points):
        al = A.line_index[g.pencil(int(u))]
        al = al[al >= 0]
        vals = np.unique(E.rosette_base[gamma.line_map[al]])
        if len(vals) != 1:
            raise CoverError(f"the rosettes over the lines on {int(u)} share no single point")
        img[k] = vals[0]
    pos = np.searchsorted(S.points, img)
    if np.any(pos >= len(S.points)) or not np.array_equal(S.points[np.minimum(pos, len(S.points) - 1)], img):
        raise CoverError("a derived image lies outside Q")
    lines = induced_line_perm(Qg, pos)
    if lines is None:
        raise CoverError("the derived point map is not an automorphism of Q")
    abar = GroupElement(Qg, pos, lines)
    if infinity_line is not None:
        L = local_line(E, infinity_line)
        if int(abar.lines[L]) != L:
            raise CoverError("the derived automorphism moves the special line")
    return abar


def local_line(E: OvoidGeometry, L: int) -> int:
    k = int(np.searchsorted(E.Q.lines, L))
    if k >= len(E.Q.lines) or E.Q.lines[k] != L:
        raise CoverError("line is not in Q")
    return k


def restrict_to_q(E: OvoidGeometry, g_elem: GroupElement) -> GroupElement:
    S = E.Q
    img = g_elem.points[S.points]
    pos = np.searchsorted(S.points, img)
    if np.any(pos >= len(S.points)) or not np.array_equal(S.points[np.minimum(pos, len(S.points) - 1)], img):
        raise CoverError("the automorphism does not stabilize Q")
    return GroupElement(E.q_geometry, pos)


# extensions


class Choice(enum.Enum):
    FIRST = 0
    SECOND = 1


def _require_double(E: OvoidGeometry):
    if E.theta != 2:
        raise CoverError("extension and swap need every ovoid subtended exactly twice")


def _seed_pairs(E: OvoidGeometry, abar: GroupElement):
    S = E.Q
    pts = np.stack([S.points, S.points[abar.points]], axis=1)
    lines = np.stack([S.lines, S.lines[abar.lines]], axis=1)
    return pts, lines


def _ovoid_images(E: OvoidGeometry, abar: GroupElement) -> np.ndarray:
    """E point -> E point under abar acting on ovoids."""
    S = E.Q
    local = np.searchsorted(S.points, E.ovoids)
    img = np.sort(S.points[abar.points[local]], axis=1)
    return np.array([E.ovoid_index(r) for r in img], dtype=np.int64)


def extend_base_automorphism(
    E: OvoidGeometry, abar: GroupElement, choice: Choice = Choice.FIRST, infinity_line: int | None = None
) -> GroupElement:
    """One of the two automorphisms of the quadrangle that restrict to ``abar`` on Q.

    The first exterior point z is sent to the smaller (FIRST) or larger
    (SECOND) subtender of abar(O_z); the rest is forced by propagation.  The
    result is checked to send each exterior y to a subtender of abar(O_y).
    """
    _require_double(E)
    g, A = E.parent, E.affine
    if infinity_line is not None:
        L = local_line(E, infinity_line)
        if int(abar.lines[L]) != L:
            raise CoverError("the base automorphism moves the special line")
    ov_img = _ovoid_images(E, abar)
    z = int(A.point_ids[0])
    pair = np.sort(A.point_ids[E.fibers[ov_img[E.pi.point_map[0]]]])
    z2 = int(pair[choice.value])
    pts, lines = _seed_pairs(E, abar)
    pts = np.vstack([pts, [[z, z2]]])
    try:
        res = extend_automorphism(g, pts, lines, branch=False)
    except RuntimeError as exc:
        raise CoverError("propagation stalled before completing the extension") from exc
    if res is None:
        raise CoverError("propagation reached a contradiction")
    try:
        out = GroupElement(g, res[0], res[1])
    except GroupError as exc:
        raise CoverError(f"extension is not an automorphism: {exc}") from exc
    if restrict_to_q(E, out) != abar:
        raise CoverError("extension does not restrict to the base automorphism")
    ext_img = A.point_index[out.points[A.point_ids]]
    if np.any(ext_img < 0) or not np.array_equal(E.pi.point_map[ext_img], ov_img[E.pi.point_map]):
        raise CoverError("extension breaks the subtension correspondence")
    return out


def swap_involution(E: OvoidGeometry) -> GroupElement:
    """Fix Q pointwise and exchange the two subtenders of every ovoid."""
    _require_double(E)
    g, A = E.parent, E.affine
    pts = np.arange(g.P)
    a, b = A.point_ids[E.fibers[:, 0]], A.point_ids[E.fibers[:, 1]]
    pts[a], pts[b] = b, a
    try:
        out = GroupElement(g, pts)
    except GroupError as exc:
        raise CoverError(f"swap is not an automorphism: {exc}") from exc
    if out.order() != 2:
        raise CoverError("swap is not an involution")
    return out


@dataclass
class RigidityReport:
    completed: bool
    is_identity: bool
    fixed_point: int

    @property
    def certified(self) -> bool:
        return self.completed and self.is_identity


def rigidity_check(E: OvoidGeometry, x: int | None = None) -> RigidityReport:
    """Fix Q pointwise and one exterior point; forced propagation alone must
    reach the identity."""
    g, S, A = E.parent, E.Q, E.affine
    x = int(A.point_ids[0]) if x is None else int(x)
    pts = np.vstack([np.stack([S.points, S.points], axis=1), [[x, x]]])
    lines = np.stack([S.lines, S.lines], axis=1)
    try:
        res = extend_automorphism(g, pts, lines, branch=False)
    except RuntimeError:
        return RigidityReport(False, False, x)
    if res is None:
        return RigidityReport(False, False, x)
    ident = bool(np.all(res[0] == np.arange(g.P)) and np.all(res[1] == np.arange(g.L)))
    return RigidityReport(True, ident, x)


# full factorization


@dataclass
class DecompositionResult:
    gamma: Morphism
    alpha: GroupElement
    abar: GroupElement
    extensions: tuple[GroupElement, GroupElement] | None
    checks: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        d = {
            "alpha_points": self.alpha.points.tolist(),
            "alpha_moves": int(np.count_nonzero(self.alpha.points != np.arange(len(self.alpha.points)))),
            "abar_points": self.abar.points.tolist(),
            "checks": dict(self.checks),
            "ok": self.ok,
        }
        if self.extensions is not None:
            d["extension_orders"] = [e.order() for e in self.extensions]
        return d


def pi_after(E: OvoidGeometry, g_elem: GroupElement) -> Morphism:
    return cover_from_automorphism(E, g_elem)


def decompose(E: OvoidGeometry, gamma: Morphism, infinity_line: int | None = None) -> DecompositionResult:
    """Lower factor, base automorphism and (for double subtension) both
    extensions, with every equality checked pointwise."""
    alpha = lower_decompose(E, gamma)
    abar = derive_base_automorphism(E, gamma, infinity_line)
    checks = {"lower": True}
    if infinity_line is not None:
        checks["base_fixes_special_line"] = True
    exts = None
    if E.theta == 2:
        e1 = extend_base_automorphism(E, abar, Choice.FIRST, infinity_line)
        e2 = extend_base_automorphism(E, abar, Choice.SECOND, infinity_line)
        swap = swap_involution(E)
        for i, e in enumerate((e1, e2), 1):
            c = pi_after(E, e)
            checks[f"gamma_eq_pi_ext{i}"] = bool(
                np.array_equal(c.point_map, gamma.point_map) and np.array_equal(c.line_map, gamma.line_map)
            )
        checks["ext2_eq_ext1_swap"] = e2 == e1 * swap
        checks["distinct"] = e1 != e2
        exts = (e1, e2)
    return DecompositionResult(gamma, alpha, abar, exts, checks)


# order audit


@dataclass
class T8Report:
    q: int
    h: int
    delta: int
    line_stabilizer: int | None
    values: dict
    identities: dict
    predicted: str

    @property
    def predicted_holds(self) -> bool:
        return bool(self.identities[self.predicted])

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "h": self.h,
            "delta": self.delta,
            "line_stabilizer": self.line_stabilizer,
            "values": self.values,
            "identities": self.identities,
            "predicted": self.predicted,
            "predicted_holds": self.predicted_holds,
        }


def t8_closed_forms(q: int, h: int, delta: int) -> dict:
    s = q
    aut_a = (s - 1) ** 2 * (s + 1) * s**4 * h * delta // 2
    return {"line_stabilizer": h * s**4 * (s - 1) * (s * s - 1), "aut_A": aut_a, "aut_E": aut_a // 2}


def t8_order_audit(q: int, h: int, delta: int, model_group=None, line: int | None = None) -> T8Report:
    """Closed-form order identities, plus the line stabilizer in the full
    orthogonal group when a generating set is supplied.

    With delta = 4 (sigma an involution) the prediction is |Aut(E)| equal to
    the line stabilizer; with delta = 2 it is twice |Aut(E)|.
    """
    vals = t8_closed_forms(q, h, delta)
    measured = None
    if model_group is not None and line is not None:
        measured = stabilizer_order(model_group, line, Action.LINE)
    ids = {
        "aut_A = 2 aut_E": vals["aut_A"] == 2 * vals["aut_E"],
        "aut_E = line_stabilizer": vals["aut_E"] == vals["line_stabilizer"],
        "2 aut_E = line_stabilizer": 2 * vals["aut_E"] == vals["line_stabilizer"],
    }
    if measured is not None:
        ids["line_stabilizer measured"] = measured == vals["line_stabilizer"]
    predicted = "aut_E = line_stabilizer" if delta == 4 else "2 aut_E = line_stabilizer"
    return T8Report(q, h, delta, measured, vals, ids, predicted)


def delta_for(sigma_order: int) -> int:
    """4 when sigma is a nontrivial involution, 2 otherwise."""
    return 4 if sigma_order == 2 else 2
