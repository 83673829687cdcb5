import numpy as np
import pytest

from diracgraph.diagnostics import (
    DiagnosticsRecord,
    boundary_form,
    energy,
    extrapolate_chi,
    field_norm,
    make_record,
    max_relative_drift,
    partial_norm,
    reflection_coefficient,
    transmitted_fractions,
)
from diracgraph.graph import build_star_graph
from diracgraph.solver import SimParams, SpinorField

from conftest import SUM_RULE_ALPHAS


def _record(norms, bond_ids=None):
    bond_ids = bond_ids or tuple(range(1, len(norms) + 1))
    total = sum(norms)
    return DiagnosticsRecord(0.0, 0, bond_ids, tuple(norms), total, 0.0, norms[0] / total if total else 0.0)


def test_norms_of_zero_field():
    graph = build_star_graph([(a, 1.0, 0.1) for a in SUM_RULE_ALPHAS])
    f = SpinorField.zeros(graph)
    params = SimParams(0.01, 0.05, 0.1, 0)
    assert field_norm(f) == 0.0
    assert energy(f, params) == 0.0
    record = make_record(f, params)
    assert record.total_norm == 0.0 and record.reflection == 0.0


def test_partial_norm_weights():
    graph = build_star_graph([(1.0, 0.3, 0.1), (1.0, 0.3, 0.1)])
    f = SpinorField.zeros(graph)
    f.phi[0][:] = [2.0, 1.0, 1.0, 2.0]  # trapezoid: half weight at both ends
    f.chi[0][:] = [1.0, 1j, 1.0]
    assert partial_norm(f, 1) == pytest.approx(0.1 * ((4 + 1 + 1 + 4) - 0.5 * 8 + 3))
    assert partial_norm(f, 2) == 0.0


def test_energy_without_chi_is_the_phi_norm():
    rng = np.random.default_rng(21)
    graph = build_star_graph([(a, 1.0, 0.1) for a in SUM_RULE_ALPHAS])
    f = SpinorField.zeros(graph)
    for p in f.phi:
        p[:] = rng.normal(size=p.shape) + 1j * rng.normal(size=p.shape)
    assert energy(f, SimParams(0.3, 0.07, 0.1, 0)) == pytest.approx(field_norm(f), rel=1e-15)


def test_reflection_coefficient():
    assert reflection_coefficient(_record((0.2, 0.5, 0.3))) == pytest.approx(0.2)
    with pytest.raises(ValueError):
        reflection_coefficient(_record((0.0, 0.0, 0.0)))


def test_transmitted_fractions():
    fractions = transmitted_fractions(_record((0.001, 0.6, 0.399)))
    assert fractions == pytest.approx((0.6 / 0.999, 0.399 / 0.999))
    assert sum(fractions) == pytest.approx(1.0, abs=1e-15)

    assert transmitted_fractions(_record((0.0, 0.5, 0.5))) == (0.5, 0.5)
    with pytest.raises(ValueError, match="not fully transmitted"):
        transmitted_fractions(_record((0.1, 0.5, 0.4)))


def test_max_relative_drift():
    assert max_relative_drift([]) == 0.0
    assert max_relative_drift([0.0, 1.0]) == 0.0
    assert max_relative_drift([2.0, 2.1, 1.7]) == pytest.approx(0.15)


def test_extrapolation_is_exact_for_linear_data():
    chi = 0.5 + 2.0 * (np.arange(6) + 0.5)
    assert extrapolate_chi(chi, True) == pytest.approx(0.5)
    assert extrapolate_chi(chi, False) == pytest.approx(0.5 + 2.0 * 6)


# =========================
# Boundary form
# =========================

def _vertex_field(graph, rng, weights, chi_at_vertex):
    """
    Field with phi_j(0) = c / w_j and linear chi_j taking chi_at_vertex[j] at the vertex;
    phi and chi vanish at the far ends so only the vertex contributes.
    """
    c = complex(rng.normal(), rng.normal())
    f = SpinorField.zeros(graph)
    for i, bond in enumerate(graph.bonds):
        length = bond.length
        x_phi, x_chi = bond.phi_nodes(), bond.chi_nodes()
        shape = complex(rng.normal(), rng.normal())
        f.phi[i][:] = (c / weights[i]) * (1 - (x_phi / length) ** 2) + shape * (x_phi / length) * (1 - (x_phi / length) ** 2)
        # linear chi; value at the far end is removed by the u-factor of the other field
        f.chi[i][:] = chi_at_vertex[i] * (1 - np.abs(x_chi) / length)
    return f


def _balanced(rng, weights):
    chi = rng.normal(size=len(weights)) + 1j * rng.normal(size=len(weights))
    # chi_1 / w_1 = sum_{j>=2} chi_j / w_j
    chi[0] = weights[0] * np.sum(chi[1:] / weights[1:])
    return chi


@pytest.mark.parametrize("weighted", [False, True])
def test_boundary_form_vanishes_under_vertex_conditions(weighted):
    rng = np.random.default_rng(22)
    alphas = SUM_RULE_ALPHAS if weighted else (1.0, 1.0, 1.0)
    graph = build_star_graph([(a, 2.0, 0.05) for a in alphas])
    w = np.array(alphas)

    psi = _vertex_field(graph, rng, w, _balanced(rng, w))
    other = _vertex_field(graph, rng, w, _balanced(rng, w))
    scale = np.sqrt(field_norm(psi) * field_norm(other))
    assert abs(boundary_form(psi, other, graph)) < 1e-10 * scale


def test_boundary_form_of_random_fields_is_nonzero():
    rng = np.random.default_rng(23)
    graph = build_star_graph([(a, 1.0, 0.05) for a in SUM_RULE_ALPHAS])
    fields = []
    for _ in range(2):
        f = SpinorField.zeros(graph)
        for p, c in zip(f.phi, f.chi):
            p[:] = rng.normal(size=p.shape) + 1j * rng.normal(size=p.shape)
            c[:] = rng.normal(size=c.shape) + 1j * rng.normal(size=c.shape)
        fields.append(f)
    assert abs(boundary_form(fields[0], fields[1], graph)) > 1e-3
