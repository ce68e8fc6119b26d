import numpy as np
import pytest

from gqkit.permgroups import (
    Action,
    GenSet,
    GroupElement,
    closure_elements,
    group_order,
    is_automorphism,
    kernel_homologies,
    line_symmetries,
    orbit,
    orthogonal_generators,
    pointwise_stabilizer_order,
    stabilizer_order,
    translation_group,
)


@pytest.fixture(scope="module")
def aut43(q43):
    g, qm = q43
    return orthogonal_generators(g, qm)


def test_q43_group_order(aut43):
    # |PGO(5,3)| = |PSp(4,3)| * 2
    assert group_order(aut43) == 51840


def test_closure_matches_bsgs(q43):
    g, qm = q43
    gs = line_symmetries(g, 0, qm)
    small = GenSet(g, gs.gens[1:3])
    assert closure_elements(small) == group_order(small)


def test_orbit_stabilizer(aut43):
    g = aut43.geometry
    o = orbit(aut43, 0)
    assert o.size * stabilizer_order(aut43, 0) == 51840
    lo = orbit(aut43, 0, Action.LINE)
    assert lo.size == g.L


def test_three_symmetries_per_line(q43):
    g, qm = q43
    for W in range(3):
        assert len(line_symmetries(g, W, qm).gens) == 3
        assert len(line_symmetries(g, W).gens) == 3


def test_set_orbit_vs_brute_force(aut43):
    g = aut43.geometry
    pair = [0, int(np.flatnonzero(~g.col[0])[0])]
    o = orbit(aut43, pair, Action.POINTSET)
    noncol = int(np.count_nonzero(~g.col)) // 2
    assert o.size == noncol


def test_group_element_algebra(aut43):
    a, b = aut43.gens[:2]
    ab = a * b
    assert (ab * ab.inverse()).is_identity
    assert is_automorphism(aut43.geometry, ab.points, ab.lines)
    # a first, then b
    assert ab.points[0] == b.points[a.points[0]]


def test_pointwise_stabilizer_of_a_line(aut43):
    g = aut43.geometry
    o = pointwise_stabilizer_order(aut43, g.line(0))
    assert 51840 % o == 0 and o > 1


def test_kk9_translations(kk9):
    e = int(kk9.G.line(kk9.I)[0])
    T = kk9.translation(e)
    assert T.order() == 9**4
    far = int(np.flatnonzero(~kk9.G.col[e])[0])
    assert orbit(T, far).size == 9**4


def test_kk9_kernel(kk9):
    G = kk9.G
    on = G.line(kk9.I)
    u = int(on[0])
    v = int(np.flatnonzero(~G.col[u])[0])
    assert group_order(kernel_homologies(G, u, v)) == 2


def test_kk9_known_group(kk9):
    n = kk9.gamma_group.order()
    assert n == 209952 and 2_720_977_920 % n == 0
    for e in kk9.gamma_group.gens:
        assert e.fixes_lines([kk9.I])
