import numpy as np
import pytest

from gqkit import coverings as cov
from gqkit.incidence import validate_morphism
from gqkit.permgroups import GroupElement


@pytest.fixture(scope="module")
def E3(kk9):
    g, _, S = kk9.classical_pair
    return cov.build_ovoid_geometry(g, S)[0]


def test_classical_cover(E3):
    assert (E3.affine.P, E3.geometry.P) == (72, 36)
    assert E3.theta == 2 and E3.report.is_cover
    assert validate_morphism(E3.pi).is_cover


def test_classical_spg(E3):
    r = cov.check_t3_parameters(E3, 3, 9, 3, 2)
    assert r.hypotheses_hold and r.matches and r.measured == (2, 9, 2, 12)


def test_gate_without_double_cover(E3):
    r = cov.check_t3_parameters(E3, 3, 9, 3, 1)
    assert not r.hypotheses_hold and r.measured is None


def test_affine_requires_subquadrangle(kk9):
    g, _, S = kk9.classical_pair
    from gqkit.incidence import Subgeometry

    with pytest.raises(cov.CoverError):
        cov.build_affine(g, Subgeometry(g, S.points[:5], []))


def test_swap_and_rigidity(E3):
    swap = cov.swap_involution(E3)
    assert swap.order() == 2 and swap.fixes_points(E3.Q.points)
    rig = cov.rigidity_check(E3)
    assert rig.certified


def test_identity_extensions(E3):
    Id = GroupElement.identity(E3.q_geometry)
    e1 = cov.extend_base_automorphism(E3, Id, cov.Choice.FIRST)
    e2 = cov.extend_base_automorphism(E3, Id, cov.Choice.SECOND)
    assert e1.is_identity and e2 == cov.swap_involution(E3)


def test_decompose_the_swap_cover(E3):
    swap = cov.swap_involution(E3)
    gam = cov.cover_from_automorphism(E3, swap)
    res = cov.decompose(E3, gam, None)
    assert res.ok and res.alpha.is_identity and res.abar.is_identity


def test_kk9_decomposition(kk9):
    E = kk9.E1
    for el in kk9.q1_stabilizer_sample[:4]:
        gam = cov.cover_from_automorphism(E, el)
        assert cov.lower_decompose(E, gam) == cov.induced_e_automorphism(E, el)
        assert cov.derive_base_automorphism(E, gam, kk9.I) == cov.restrict_to_q(E, el)
        assert cov.decompose(E, gam, kk9.I).ok


def test_order_closed_forms():
    v = cov.t8_closed_forms(9, 2, 4)
    assert v["line_stabilizer"] == 8_398_080
    assert v["aut_A"] == 2 * v["aut_E"]
    assert cov.delta_for(2) == 4 and cov.delta_for(4) == 2
    assert cov.t8_order_audit(9, 2, 4).predicted_holds
