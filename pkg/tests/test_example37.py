from dglinf import example37
from dglinf.dglparse import parse_expression
from dglinf.retract import verify_retract
from dglinf.whitehead import build_fat_wedge


def test_extension_is_a_chain_map():
    L = example37.load()
    ext = example37.extension(L)
    assert ext.check_chain_map() == []


def test_corrected_element_is_recomputed_element_up_to_sign():
    L = example37.load()
    model = build_fat_wedge(example37.SPHERES)
    phi_omega = example37.extension(L, model).apply(model.omega)
    corrected = parse_expression(example37.CORRECTED_PHI, L)
    assert corrected == phi_omega or corrected == -phi_omega
    assert L.apply_differential(corrected).is_zero()


def test_printed_element_differs_only_in_signs():
    L = example37.load()
    model = build_fat_wedge(example37.SPHERES)
    rep = example37.compare_printed(L, example37.extension(L, model).apply(model.omega))
    assert rep["agreement"] == "different"
    assert rep["termwise_up_to_sign"]
    assert not rep["printed_is_cycle"]
    assert len(rep["difference_terms"]) == 4


def test_a5_retract_is_a_retract():
    L = example37.load()
    assert verify_retract(example37.a5_retract(L))["pass"]
