import numpy as np
import pytest

from gqkit.subtension import (
    OmegaClass,
    SubtensionError,
    all_subtended_ovoids,
    exterior_points,
    is_ovoid,
    rosette,
    subtended_ovoid,
    subtension_multiplicity,
    translation_ovoid_certificate,
)


@pytest.fixture(scope="module")
def pair(kk9):
    g, _, S = kk9.classical_pair
    return g, S


def test_classical_subtended_ovoid(pair):
    g, S = pair
    ext = exterior_points(g, S)
    assert len(ext) == 112 - 40
    O = subtended_ovoid(g, S, int(ext[0]))
    assert len(O) == 10 and is_ovoid(g, S, O.points)
    theta, subs = subtension_multiplicity(g, S, O)
    assert theta == 2 and int(ext[0]) in subs


def test_classical_all_ovoids(pair):
    g, S = pair
    ovoids, idx = all_subtended_ovoids(g, S)
    assert ovoids.shape == (36, 10)
    assert np.all(np.bincount(idx) == 2)


def test_point_inside_rejected(pair):
    g, S = pair
    with pytest.raises(SubtensionError):
        subtended_ovoid(g, S, int(S.points[0]))


def test_classical_rosette(pair):
    g, S = pair
    L = next(l for l in range(g.L) if S.point_mask[g.line(l)].sum() == 1)
    r = rosette(g, S, L)
    assert len(r) == 3
    for O in r.ovoids:
        assert r.meet_point in O.points
    # the ovoids of a rosette pairwise meet only in the meet point
    for a in range(3):
        for b in range(a + 1, 3):
            assert list(np.intersect1d(r.ovoids[a].points, r.ovoids[b].points)) == [r.meet_point]


def test_kk9_ovoid_and_multiplicities(kk9):
    G = kk9.G
    for h, theta in ((kk9.h1, 2), (kk9.h2, 1)):
        assert h.order == (9, 9)
        x = int(exterior_points(G, h.sub)[5])
        O = subtended_ovoid(G, h.sub, x)
        assert len(O) == 82
        assert subtension_multiplicity(G, h.sub, O)[0] == theta
    assert kk9.h1.omega is OmegaClass.OMEGA1 and kk9.h2.omega is OmegaClass.OMEGA2


def test_kk9_rosette(kk9):
    G, S = kk9.G, kk9.h1.sub
    L = next(l for l in range(G.L) if S.point_mask[G.line(l)].sum() == 1)
    assert len(rosette(G, S, L)) == 9


def test_kk9_translation_certificate(kk9):
    G, h = kk9.G, kk9.h1
    x = int(exterior_points(G, h.sub)[0])
    on = G.line(kk9.I)
    e = int(on[G.col[x, on]][0])
    c = translation_ovoid_certificate(G, h.sub, x, kk9.I, T=kk9.translation(e))
    assert c.valid and c.order == 81 and c.orbit_size == 81
