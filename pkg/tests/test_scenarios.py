import pytest

from gainscore.config import ScenarioConfig
from gainscore.scenarios import (
    Association,
    CycleError,
    Edge,
    Scenario,
    StructuralModel,
    build_scenario,
    topological_order,
    validate,
)

BASE = ScenarioConfig(
    delta=3.0, chi=1.0, gamma=2.0, psi=5.0, eta=0.3, pi=0.5, phi=0.9,
    tau=0.7, nu=1.5, lambda_=2.5, omega=2.8, theta=1.2, kappa=0.6,
)


def edge_names(model):
    return {(e.src, e.dst) for e in model.directed_edges}


CORE = {
    ("U", "T1"), ("U", "T2"), ("U", "Y1"), ("U", "Y2"),
    ("T1", "Y1"), ("T2", "Y2"), ("Y1", "D"), ("Y2", "D"),
}

EXPECTED_ADDITIONS = {
    Scenario.FIG1A: set(),
    Scenario.FIG1B: {("Y1", "Y2")},
    Scenario.FIG1C: set(),
    Scenario.FIG1D: {("Y1", "Y2")},
    Scenario.FIG2A: {("Y1", "Y2"), ("T1", "T2")},
    Scenario.FIG2B: {("Y1", "Y2"), ("C", "T1"), ("C", "T2")},
    Scenario.FIG2C: {("Y1", "Y2"), ("C", "Y1"), ("C", "Y2")},
    Scenario.FIG2D: {("Y1", "Y2"), ("T1", "Y2"), ("T2", "Y1")},
    Scenario.FIG2E: {("Y1", "Y2"), ("C", "Y1"), ("C", "Y2")},
    Scenario.FIG2F: {("Y1", "Y2"), ("Y1", "T2")},
    Scenario.POSTHOC_NU_ONLY: {("Y1", "Y2"), ("C", "T2")},
    Scenario.POSTHOC_TAU_ONLY: {("Y1", "Y2"), ("C", "T1")},
}


@pytest.mark.parametrize("scenario", list(Scenario))
def test_edge_sets_are_core_plus_documented_additions(scenario):
    model = build_scenario(scenario, BASE)
    assert edge_names(model) == CORE | EXPECTED_ADDITIONS[scenario]


def test_fig1a_exact_edges_and_coefficients():
    model = build_scenario(Scenario.FIG1A, BASE)
    assert set(model.directed_edges) == {
        Edge("U", "T1", 1.0), Edge("U", "T2", 2.0),
        Edge("U", "Y1", 5.0), Edge("U", "Y2", 5.0),
        Edge("T1", "Y1", 3.0), Edge("T2", "Y2", 3.0),
        Edge("Y1", "D", -1.0), Edge("Y2", "D", 1.0),
    }
    assert model.bidirected_edges == ()
    assert "C" not in model.variables


def test_observed_fe_presence_and_bridge():
    for scenario in Scenario:
        model = build_scenario(scenario, BASE)
        if scenario in (Scenario.FIG1A, Scenario.FIG1B):
            assert not scenario.has_observed_fe
            assert "C" not in model.variables
        else:
            assert scenario.has_observed_fe
            assert model.bidirected_edges == (Association("U", "C", 0.5),)


def test_grid_variants_differ_from_fig1d_only_by_additions():
    fig1d = edge_names(build_scenario(Scenario.FIG1D, BASE))
    for scenario in (Scenario.FIG2A, Scenario.FIG2B, Scenario.FIG2C,
                     Scenario.FIG2D, Scenario.FIG2E, Scenario.FIG2F,
                     Scenario.POSTHOC_NU_ONLY, Scenario.POSTHOC_TAU_ONLY):
        got = edge_names(build_scenario(scenario, BASE))
        assert got - fig1d == EXPECTED_ADDITIONS[scenario] - {("Y1", "Y2")}
        assert fig1d - got == set()


def test_alpha_is_lambda_for_2c_and_omega_for_2e():
    m2c = build_scenario(Scenario.FIG2C, BASE)
    assert m2c.coefficient("C", "Y1") == 2.5
    assert m2c.coefficient("C", "Y2") == 2.5
    m2e = build_scenario(Scenario.FIG2E, BASE)
    assert m2e.coefficient("C", "Y1") == 2.5
    assert m2e.coefficient("C", "Y2") == 2.8


def test_zero_config_keeps_topology():
    model = build_scenario(Scenario.FIG1B, ScenarioConfig())
    assert edge_names(model) == CORE | {("Y1", "Y2")}
    non_d = [e for e in model.directed_edges if e.dst != "D"]
    assert all(e.coef == 0.0 for e in non_d)


def test_exogenous_variances_default():
    model = build_scenario(Scenario.FIG1D, BASE)
    assert model.exogenous_variance["D"] == 0.0
    assert all(model.exogenous_variance[v] == 1.0 for v in model.variables if v != "D")


@pytest.mark.parametrize("scenario", list(Scenario))
def test_every_scenario_validates(scenario):
    assert validate(build_scenario(scenario, BASE)).ok


def test_validate_cycle():
    model = StructuralModel(
        variables=("U", "T2", "Y1", "Y2", "D"),
        directed_edges=(
            Edge("Y1", "T2", 0.4), Edge("T2", "Y1", 0.6),
            Edge("Y1", "D", -1.0), Edge("Y2", "D", 1.0),
        ),
        bidirected_edges=(),
    )
    report = validate(model)
    assert not report.ok
    assert any("cycle" in v for v in report.violations)


def test_validate_d_wiring():
    model = StructuralModel(
        variables=("U", "Y1", "Y2", "D"),
        directed_edges=(Edge("Y1", "D", -1.0),),
        bidirected_edges=(),
    )
    report = validate(model)
    assert not report.ok
    assert any("D wiring" in v for v in report.violations)


def test_validate_dangling_and_duplicate_bidirected():
    model = StructuralModel(
        variables=("U", "C", "Y1", "Y2", "D"),
        directed_edges=(
            Edge("Y1", "D", -1.0), Edge("Y2", "D", 1.0), Edge("Q", "Y1", 1.0),
        ),
        bidirected_edges=(Association("U", "C", 0.5), Association("C", "U", 0.2)),
    )
    report = validate(model)
    assert any("dangling" in v for v in report.violations)
    assert any("bidirected" in v for v in report.violations)


@pytest.mark.parametrize("scenario", list(Scenario))
def test_topological_order_has_no_back_edges(scenario):
    model = build_scenario(scenario, BASE)
    order = topological_order(model)
    assert set(order) == set(model.variables)
    position = {v: i for i, v in enumerate(order)}
    for e in model.directed_edges:
        assert position[e.src] < position[e.dst], f"back edge {e.src}->{e.dst}"
    assert order[-1] == "D"


def test_topological_order_respects_feedback_direction():
    order_2f = topological_order(build_scenario(Scenario.FIG2F, BASE))
    assert order_2f.index("Y1") < order_2f.index("T2")
    order_2d = topological_order(build_scenario(Scenario.FIG2D, BASE))
    assert order_2d.index("T2") < order_2d.index("Y1")


def test_cycle_error_names_variables():
    model = StructuralModel(
        variables=("T2", "Y1"),
        directed_edges=(Edge("Y1", "T2", 0.4), Edge("T2", "Y1", 0.6)),
        bidirected_edges=(),
    )
    with pytest.raises(CycleError) as err:
        topological_order(model)
    assert {"T2", "Y1"} <= set(err.value.cycle)


def test_unknown_scenario_rejected():
    with pytest.raises(ValueError):
        build_scenario("fig9z", BASE)
