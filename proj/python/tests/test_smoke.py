import math

import pytest

import treepca

V0 = "((2:1,3:1):1,(4:1,5:1):1,(0:1,1:1):2);"
V1 = "((3:1,(4:1,5:1):1):2,2:1,(0:1,1:1):1);"
V2 = "(((2:1,3:1):1,4:1):2,5:1,(0:1,1:1):1);"


def fixture():
    v0 = treepca.Tree(V0)
    return [v0, treepca.parse_newick(V1, leaves=v0.leaves), treepca.parse_newick(V2, leaves=v0.leaves)]


def test_fixture_distances():
    v0, v1, v2 = fixture()
    assert treepca.distance(v0, v1) == pytest.approx(math.sqrt(10), abs=1e-9)
    assert treepca.distance(v0, v2) == pytest.approx(math.sqrt(10), abs=1e-9)
    assert treepca.distance(v1, v2) == pytest.approx(2 * math.sqrt(5), abs=1e-9)


def test_newick_round_trip():
    v0 = treepca.Tree(V0)
    again = treepca.Tree(v0.newick())
    assert again.equals(v0)
    assert len(v0.splits()) == 3


def test_equal_weight_mean_is_the_cone_point():
    result = treepca.frechet_mean(fixture(), method="refined")
    splits = result["tree"].splits()
    assert len(splits) == 1
    assert splits[0][1] == pytest.approx(4 / 3, abs=1e-9)


def test_projection_of_a_vertex():
    vertices = fixture()
    r = treepca.project(vertices[2], vertices, method="exhaustive", resolution=10)
    assert r["distance"] == pytest.approx(0.0, abs=1e-12)
    assert r["weights"] == [0.0, 0.0, 1.0]


def test_small_fit_runs():
    data = treepca.surface_dataset(n_taxa=5, n_points=8, seed=2, truth_resolution=6)
    fit = treepca.fit_component(data["data"], order=1, restarts=1, seed=3, conv_window=2, max_sweeps=3)
    sums = [d for _, d in fit["trace"]]
    assert sums == sorted(sums, reverse=True)
    assert len(fit["vertices"]) == 2
    assert 0.0 <= fit["r_squared"] <= 1.0


def test_errors_are_python_exceptions():
    with pytest.raises(treepca.DataError):
        treepca.Tree("((2:1,3:1):1,(4:1")
    with pytest.raises(treepca.TreeSpaceError):
        treepca.surface_point(fixture(), [0.5, 0.6, -0.1])
