import pytest

from src.belief.grid import BeliefMap

pytestmark = pytest.mark.contract

DESK = {
    "extend_distance": 200.0,
    "near_radius": 200.0,
    "prune_radius": 80.0,
    "iterations": 20,
    "mcts": {"primitive_length": 150.0, "iterations": 20},
}


def _plan_body(planner="tree", start=None, budget=600.0, prob=0.5, config=None):
    belief = BeliefMap.uniform(600.0, 600.0, 20.0, prob)
    return {
        "planner": planner,
        "request": {
            "start": start or {"x": 300.0, "y": 60.0, "z": 50.0, "psi": 1.5708},
            "budget": budget,
            "belief": belief.to_document().model_dump(),
            "config": config or DESK,
        },
    }


def test_list_planners(client):
    resp = client.get("/api/v1/planners")
    assert resp.status_code == 200
    assert sorted(resp.json()["planners"]) == ["coverage", "greedy", "mcts", "random", "tree"]


@pytest.mark.parametrize("planner", ["tree", "mcts", "greedy", "random", "coverage"])
def test_plan_returns_waypoints_within_budget(client, planner):
    resp = client.post("/api/v1/plan", json=_plan_body(planner))
    assert resp.status_code == 200
    data = resp.json()
    assert data["planner"] == planner
    assert data["waypoints"][0]["cost"] == 0.0
    assert data["waypoints"][-1]["cost"] <= 600.0 + 1e-6
    costs = [w["cost"] for w in data["waypoints"]]
    assert costs == sorted(costs)


def test_plan_on_certain_map_stays_put(client):
    resp = client.post("/api/v1/plan", json=_plan_body(prob=0.0))
    assert resp.status_code == 200
    data = resp.json()
    assert len(data["waypoints"]) == 1
    assert data["total_info"] == 0.0


def test_unknown_planner_is_404(client):
    resp = client.post("/api/v1/plan", json=_plan_body("astar"))
    assert resp.status_code == 404
    assert "astar" in resp.json()["detail"]


def test_start_outside_map_is_400(client):
    body = _plan_body(start={"x": -50.0, "y": 60.0, "z": 50.0, "psi": 0.0})
    resp = client.post("/api/v1/plan", json=body)
    assert resp.status_code == 400
    assert "outside" in resp.json()["detail"]


def test_malformed_belief_is_422(client):
    body = _plan_body()
    body["request"]["belief"]["prob"] = [1.5] * len(body["request"]["belief"]["prob"])
    resp = client.post("/api/v1/plan", json=body)
    assert resp.status_code == 422


def test_generate_environment_is_seeded(client):
    payload = {"width": 600.0, "height": 600.0, "cell_size": 20.0, "seed": 4, "count": 3}
    first = client.post("/api/v1/environments", json=payload)
    second = client.post("/api/v1/environments", json=payload)
    assert first.status_code == 200
    data = first.json()
    assert len(data["spec"]["priors"]) == 3
    assert data["belief"]["n_rows"] == 30
    assert max(data["belief"]["prob"]) <= 0.5
    assert data == second.json()


def test_generated_environment_plans(client):
    env = client.post("/api/v1/environments", json={"width": 600.0, "height": 600.0, "cell_size": 20.0, "seed": 1}).json()
    body = {
        "planner": "tree",
        "request": {
            "start": {"x": 300.0, "y": 100.0, "z": 50.0, "psi": 1.5708},
            "budget": 600.0,
            "belief": env["belief"],
            "config": DESK,
        },
    }
    resp = client.post("/api/v1/plan", json=body)
    assert resp.status_code == 200
    assert resp.json()["total_info"] >= 0.0
