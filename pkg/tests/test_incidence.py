import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gqkit.constructions.quadrics import hyperplane_section, nonsingular_vectors
from gqkit.incidence import (
    Geometry,
    GeometryError,
    HyperplaneType,
    Morphism,
    PerpMode,
    Subgeometry,
    classify_hyperplane,
    common_neighbour_counts,
    common_neighbour_matrix,
    dumps_geometry,
    export_geometry,
    hull,
    import_geometry,
    line_regulus,
    loads_geometry,
    perp,
    validate_gq,
    validate_morphism,
    validate_spg,
)

from conftest import grid_geometry


def brute_col(g):
    c = np.zeros((g.P, g.P), dtype=bool)
    for l in range(g.L):
        pts = g.line(l)
        c[np.ix_(pts, pts)] = True
    return c


def test_grid_is_thin_gq():
    g = grid_geometry(3)
    r = validate_gq(g)
    assert r.is_gq and r.order == (2, 1)
    r = validate_gq(grid_geometry(4))
    assert r.is_gq and r.order == (3, 1)


def test_two_lines_sharing_two_points_rejected():
    with pytest.raises(GeometryError):
        Geometry([[0, 1, 2], [0, 1, 3]], 4)


def test_q43_counts_and_order(q43):
    g, _ = q43
    assert (g.P, g.L) == (40, 40)
    r = validate_gq(g, exhaustive=True)
    assert r.is_gq and r.order == (3, 3)


def test_triangle_is_not_gq():
    g = Geometry([[0, 1], [1, 2], [0, 2]], 3)
    assert not validate_gq(g).is_gq


def test_collinearity_matches_brute_force(q43):
    g, _ = q43
    assert np.array_equal(g.col, brute_col(g))


def test_perp_counts(q43):
    g, _ = q43
    assert len(perp(g, [0])) == 1 + 3 * 4
    u = 0
    v = int(np.flatnonzero(~g.col[u])[0])
    single = perp(g, [u, v])
    assert len(single) == 4
    # brute force double perp
    col = brute_col(g)
    double = [w for w in range(g.P) if all(col[w, y] for y in single)]
    assert list(perp(g, [u, v], PerpMode.DOUBLE_PERP)) == double
    # q odd: points are antiregular, so the pair is its own double perp
    assert double == sorted([u, v])


def test_line_regulus_q43(q43):
    g, _ = q43
    U = 0
    V = next(l for l in range(g.L) if g.meet(U, l) < 0 and l != U)
    single, double = line_regulus(g, U, V)
    assert len(single) == 4 and len(double) == 4
    assert U in double and V in double


def test_line_regulus_grid():
    g = grid_geometry(4)
    single, double = line_regulus(g, 0, 1)
    assert len(single) == 4 and len(double) == 4
    assert sorted(np.union1d(single, double)) == list(range(8))


def test_hull_basics(q43):
    g, _ = q43
    a, b = g.line(0)[:2]
    h = hull(g, [a, b])
    assert sorted(h.points) == sorted(g.line(0)) and list(h.lines) == [0]
    assert len(hull(g, np.arange(g.P)).points) == g.P


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(0, 39), min_size=1, max_size=5), st.lists(st.integers(0, 39), max_size=3))
def test_hull_idempotent_and_monotone(S, extra):
    from gqkit.constructions.quadrics import build_parabolic
    from gqkit.galois import make_field

    g, _ = _Q43.get() if _Q43.get() else _Q43.set(build_parabolic(make_field(3, 1)))
    h = hull(g, S)
    assert hull(g, h.points) == h
    h2 = hull(g, list(S) + list(extra))
    assert np.all(h2.point_mask[h.points])


class _Cache:
    def __init__(self):
        self.v = None

    def get(self):
        return self.v

    def set(self, v):
        self.v = v
        return v


_Q43 = _Cache()


def test_classify_hyperplanes(q43):
    g, qm = q43
    types = set()
    for a in nonsingular_vectors(qm):
        S = hyperplane_section(g, qm, a)
        if len(S.points) == 10 and len(S.lines) == 0:
            assert classify_hyperplane(g, S) is HyperplaneType.A
            types.add("A")
    assert "A" in types
    x = 0
    B = Subgeometry(g, np.flatnonzero(g.col[x]), g.pencil(x))
    assert classify_hyperplane(g, B) is HyperplaneType.B
    bad = Subgeometry(g, [0, 1], [])
    assert classify_hyperplane(g, bad) is HyperplaneType.NOT_HYPERPLANE


def test_classify_subgq_in_q53(q53):
    g, qm = q53
    for a in nonsingular_vectors(qm):
        S = hyperplane_section(g, qm, a)
        if len(S.points) == 40:
            break
    assert classify_hyperplane(g, S) is HyperplaneType.C
    assert validate_gq(S.as_geometry()).order == (3, 3)
    # maximality: a hull with any exterior point is everything
    for x in np.flatnonzero(~S.point_mask)[:5]:
        assert len(hull(g, np.append(S.points, x)).points) == g.P


def test_identity_morphism_is_1_cover(q43):
    g, _ = q43
    r = validate_morphism(Morphism(g, g, np.arange(g.P), np.arange(g.L)))
    assert r.is_morphism and r.is_cover and r.theta == 1


def test_grid_2_cover():
    # the 2x... cover of a 3x3 grid by a 6x3 grid folding rows
    big = grid_geometry(3)
    pm = np.arange(9)
    m = Morphism(big, big, pm, np.arange(6))
    assert validate_morphism(m).is_cover
    # collapse two points on a line: not a morphism
    bad = pm.copy()
    bad[0] = 4
    assert not validate_morphism(Morphism(big, big, bad, np.arange(6))).is_morphism


def test_composition_is_morphism(q43):
    g, _ = q43
    ident = Morphism(g, g, np.arange(g.P), np.arange(g.L))
    assert validate_morphism(ident.compose(ident)).is_morphism


def test_spg_of_a_gq(q43):
    g, _ = q43
    r = validate_spg(g)
    assert r.is_spg and r.parameters == (3, 3, 1, 4) and r.is_gq


def test_spg_rejects_zero_mu():
    g = Geometry([[0, 1], [2, 3]], 4)
    r = validate_spg(g)
    assert not r.is_spg and r.mu_status == "zero"


def test_mu_two_routes(q43):
    g, _ = q43
    a = common_neighbour_counts(g, np.arange(g.P))
    assert np.array_equal(a, common_neighbour_matrix(g))


def test_round_trip(q43, tmp_path):
    g, _ = q43
    text = dumps_geometry(g)
    g2 = loads_geometry(text)
    assert g2.same_as(g) and dumps_geometry(g2) == text
    p = tmp_path / "q43.txt"
    export_geometry(g, p)
    assert import_geometry(p).same_as(g)


def test_malformed_files():
    with pytest.raises(GeometryError):
        loads_geometry("geometry v1\npoints 3\nlines 1\n0 0 1\n")
    with pytest.raises(GeometryError):
        loads_geometry("geometry v2\npoints 3\nlines 0\n")
    with pytest.raises(GeometryError):
        loads_geometry("geometry v1\npoints 3\nlines 2\n0 1\n")
    g = loads_geometry("# comment\ngeometry v1\npoints 3\nlines 1\n0 1 2\n")
    assert g.L == 1
