import json

import numpy as np
import pytest

from latticebench import (
    PETG,
    ConfigError,
    build_model,
    build_network,
    build_sizing_spec,
    demo_config_text,
    load_config,
    size_thickness,
    solve_static,
)

MINIMAL = {
    "cell": {"height": 100.0, "width": 100.0, "depth": 100.0, "thickness": 4.0},
    "constraints": [{"nodes": {"ids": [1, 2, 3, 4, 5, 6, 7, 8]}, "fix": "all"}],
    "loads": [{"nodes": {"ids": [13]}, "force": [0.0, 0.0, -100.0]}],
}


def test_minimal_config_builds_the_demo_scenario():
    config = load_config(json.dumps(MINIMAL))
    assert config.material == PETG  # defaults apply
    assert config.tiling == (1, 1, 1)
    model = build_model(config)
    assert sorted(model.constraints) == list(range(1, 9))
    assert all(mask == (True,) * 6 for mask in model.constraints.values())
    assert np.allclose(model.load_cases["default"][13], [0, 0, -100, 0, 0, 0])
    result = solve_static(model, "default")
    assert result.max_displacement_node == 13


def test_demo_config_text_parses():
    config = load_config(demo_config_text())
    model = build_model(config)
    assert solve_static(model, "default").max_displacement_node == 13


def test_empty_text_lists_required_keys():
    with pytest.raises(ConfigError) as excinfo:
        load_config("")
    assert "cell" in str(excinfo.value)
    assert "thickness" in str(excinfo.value)


def test_zero_thickness_names_the_field():
    bad = json.loads(json.dumps(MINIMAL))
    bad["cell"]["thickness"] = 0.0
    with pytest.raises(ConfigError) as excinfo:
        load_config(json.dumps(bad))
    assert "cell.thickness" in str(excinfo.value)


def test_unknown_keys_are_rejected_and_collected():
    bad = json.loads(json.dumps(MINIMAL))
    bad["celll"] = {}
    bad["cell"]["hieght"] = 4.0
    bad["material"] = {"elastic_modulus": -5.0, "poisson_ratio": 0.9}
    with pytest.raises(ConfigError) as excinfo:
        load_config(json.dumps(bad))
    message = str(excinfo.value)
    # all problems reported at once, each naming its key
    assert "celll" in message
    assert "cell.hieght" in message
    assert "material.elastic_modulus" in message
    assert "material.poisson_ratio" in message


def test_invalid_json_is_a_config_error():
    with pytest.raises(ConfigError):
        load_config("{not json")


def test_coordinate_selectors_resolve():
    by_plane = json.loads(json.dumps(MINIMAL))
    by_plane["constraints"] = [{"nodes": {"where": {"z": 100.0}}, "fix": "all"}]
    by_plane["loads"] = [{"nodes": {"where": {"z": "min"}},
                          "force": [0.0, 0.0, -100.0]}]
    config = load_config(json.dumps(by_plane))
    model = build_model(config)
    assert sorted(model.constraints) == list(range(1, 9))
    assert list(model.load_cases["default"]) == [13]


def test_unresolved_selector_names_the_node():
    bad = json.loads(json.dumps(MINIMAL))
    bad["loads"] = [{"nodes": {"ids": [99]}, "force": [0.0, 0.0, -1.0]}]
    config = load_config(json.dumps(bad))
    with pytest.raises(ConfigError) as excinfo:
        build_model(config)
    assert "99" in str(excinfo.value)


def test_selector_matching_nothing_is_an_error():
    bad = json.loads(json.dumps(MINIMAL))
    bad["constraints"] = [{"nodes": {"where": {"z": 55.5}}, "fix": "all"}]
    config = load_config(json.dumps(bad))
    with pytest.raises(ConfigError) as excinfo:
        build_model(config)
    assert "55.5" in str(excinfo.value)


def test_partial_dof_constraints():
    partial = json.loads(json.dumps(MINIMAL))
    partial["constraints"].append(
        {"nodes": {"ids": [9]}, "fix": ["ux", "uy"]})
    config = load_config(json.dumps(partial))
    model = build_model(config)
    assert model.constraints[9] == (True, True, False, False, False, False)


def test_tiling_block():
    tiled = json.loads(json.dumps(MINIMAL))
    tiled["tiling"] = {"nx": 2, "ny": 1, "nz": 1}
    config = load_config(json.dumps(tiled))
    network = build_network(config)
    assert len(network.nodes) == 23
    bad = json.loads(json.dumps(tiled))
    bad["tiling"] = {"nx": 0}
    with pytest.raises(ConfigError) as excinfo:
        load_config(json.dumps(bad))
    assert "tiling.nx" in str(excinfo.value)


def test_sizing_block_round_trip():
    sized = json.loads(json.dumps(MINIMAL))
    sized["sizing"] = {"max_displacement": 0.05, "bounds": [2.0, 20.0],
                       "tolerance": 0.01}
    config = load_config(json.dumps(sized))
    result = size_thickness(build_sizing_spec(config))
    assert 2.0 <= result.thickness <= 20.0
    # the returned thickness was evaluated and really meets the limit
    evaluated = dict(result.trace)
    assert evaluated[result.thickness] <= 0.05


def test_sizing_block_requires_valid_bounds():
    bad = json.loads(json.dumps(MINIMAL))
    bad["sizing"] = {"max_displacement": 0.05, "bounds": [20.0, 2.0]}
    with pytest.raises(ConfigError) as excinfo:
        load_config(json.dumps(bad))
    assert "sizing.bounds" in str(excinfo.value)


def test_size_command_requires_sizing_block():
    config = load_config(json.dumps(MINIMAL))
    with pytest.raises(ConfigError):
        build_sizing_spec(config)


def test_compare_block_parses():
    cfg = json.loads(json.dumps(MINIMAL))
    cfg["cell"] = {"height": 10.0, "width": 10.0, "depth": 10.0, "thickness": 1.0}
    cfg["compare"] = {
        "region": {"width": 30.0, "depth": 30.0},
        "height": 10.0,
        "force": 50.0,
        "directions": ["Z"],
        "patterns": [
            {"type": "lattice", "name": "pyramidal"},
            {"type": "cross", "pitch": 10.0, "wall": 0.5},
            {"type": "hexagonal", "cell_size": 5.0, "wall": 0.5},
        ],
    }
    config = load_config(json.dumps(cfg))
    assert config.compare is not None
    assert [p.kind for p in config.compare.patterns] == ["lattice", "cross",
                                                         "hexagonal"]
    from latticebench import build_comparison_patterns

    patterns = build_comparison_patterns(config)
    assert [name for name, _ in patterns] == ["pyramidal", "cross", "hexagonal"]
    for _, network in patterns:
        assert len(network.struts) > 0


def test_compare_block_validates_pattern_options():
    cfg = json.loads(json.dumps(MINIMAL))
    cfg["compare"] = {
        "region": {"width": 30.0, "depth": 30.0},
        "height": 10.0,
        "patterns": [{"type": "cross", "wall": 0.5}],  # pitch missing
    }
    with pytest.raises(ConfigError) as excinfo:
        load_config(json.dumps(cfg))
    assert "pitch" in str(excinfo.value)
