import numpy as np
import pytest

from gqkit.constructions.kantor_knuth import build_kantor_knuth, kantor_knuth_family, verify_4gonal_family
from gqkit.constructions.quadrics import build_elliptic, build_parabolic, hyperplane_section, nonsingular_vectors
from gqkit.constructions.tits import CONIC_Q3, OvalError, build_tits_t2, counterexample_data
from gqkit.galois import FieldError, find_nonsquare, frobenius_power, make_field
from gqkit.incidence import HyperplaneType, classify_hyperplane, validate_gq


def counts(s, t):
    return (s + 1) * (s * t + 1), (t + 1) * (s * t + 1)


@pytest.mark.parametrize("p,h", [(3, 1), (5, 1)])
def test_parabolic_counts(p, h):
    g, _ = build_parabolic(make_field(p, h))
    q = p**h
    assert (g.P, g.L) == counts(q, q)
    assert validate_gq(g).order == (q, q)


@pytest.mark.parametrize("p", [3, 5])
def test_elliptic_counts(p):
    g, _ = build_elliptic(make_field(p, 1))
    assert (g.P, g.L) == counts(p, p * p)
    assert validate_gq(g).order == (p, p * p)


def test_q55_has_756_points():
    g, _ = build_elliptic(make_field(5, 1))
    assert (g.P, g.L) == (756, 3276)


def test_every_nonsingular_section_of_q53_is_a_q43(q53):
    g, qm = q53
    vs = nonsingular_vectors(qm)
    sizes = {len(hyperplane_section(g, qm, a).points) for a in vs[:20]}
    assert 40 in sizes


def test_kk_classical_q3():
    f = make_field(3, 1)
    g, cm = build_kantor_knuth(f, frobenius_power(f, 0), find_nonsquare(f).value)
    assert (g.P, g.L) == counts(3, 9)
    r = validate_gq(g)
    assert r.is_gq and r.order == (3, 9)
    assert len(cm.translation_points) == 4


def test_kk_square_m_rejected():
    f = make_field(3, 2)
    sq = int(f.squares[f.squares != 0][0])
    with pytest.raises(FieldError):
        build_kantor_knuth(f, frobenius_power(f, 1), sq)


def test_kk_conditions_fail_for_square_m():
    f = make_field(3, 2)
    sq = int(f.squares[f.squares != 0][0])
    ok, witness = verify_4gonal_family(kantor_knuth_family(f, frobenius_power(f, 1), sq))
    assert not ok and witness["condition"] in ("K1", "K2")


def test_kk_needs_odd_q():
    f = make_field(2, 2)
    with pytest.raises(FieldError):
        kantor_knuth_family(f, frobenius_power(f, 1), 2)


def test_kk9_counts(kk9):
    assert (kk9.G.P, kk9.G.L) == (7300, 59860)
    assert len(kk9.G.line(kk9.I)) == 10


def test_tits_q3():
    g, tm = build_tits_t2(make_field(3, 1), CONIC_Q3)
    assert (g.P, g.L) == (40, 40)
    assert validate_gq(g).order == (3, 3)


def test_tits_rejects_non_oval():
    bad = [(0, 0, 0, 1), (0, 0, 1, 0), (0, 0, 1, 1), (0, 1, 2, 2)]
    with pytest.raises(OvalError):
        build_tits_t2(make_field(3, 1), bad)


def test_counterexample_grid():
    ce = counterexample_data()
    G = ce.subgeometry
    assert (len(G.points), len(G.lines)) == (16, 8)
    assert validate_gq(G.as_geometry()).order == (3, 1)
    # a (3,1) subquadrangle of a (3,3) quadrangle meets every line
    assert classify_hyperplane(ce.delta_geometry, G) is HyperplaneType.C
