"""Smoke test for the pyrfimp extension module.

Build and install it first:

    pip install maturin
    maturin build --release -m crates/python/Cargo.toml -o dist
    pip install dist/pyrfimp-*.whl
"""

import math
import os
import tempfile

import pyrfimp


def main():
    data = pyrfimp.Dataset.discrete_grid(n=400, p=20, n_relevant=5, seed=3)
    assert (data.n, data.p) == (400, 20)
    relevant = data.relevant_set
    assert len(relevant) == 5

    forest = pyrfimp.Forest(data, n_trees=30, mtry=4, seed=1)
    assert forest.n_trees == 30
    probs = forest.predict(data.rows()[0])
    assert math.isclose(sum(probs), 1.0)

    scores = {m: forest.importance(data, m) for m in pyrfimp.methods()}
    for a, b in zip(scores["mdi"], scores["mdi-covariance-inbag"]):
        assert math.isclose(a, b, rel_tol=1e-9, abs_tol=1e-12)
    for method, s in scores.items():
        print(f"{method:22s} auc={pyrfimp.auc_relevant(s, relevant):.3f}")

    again = pyrfimp.Forest.from_json(forest.to_json())
    assert again.importance(data, "mdi-oob") == scores["mdi-oob"]

    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "grid.csv")
        data.save(path)
        loaded = pyrfimp.Dataset.load(path)
        assert loaded.rows() == data.rows() and loaded.y() == data.y()

    assert pyrfimp.auc([0.1, 0.9, 0.5], [False, True, False]) == 1.0

    base = {"n_trees": 5, "tree": {"min_leaf": 1, "max_depth": None, "mtry": 2}, "seed": 0}
    table = pyrfimp.sweep({
        "generator": {"generator": "pure-noise", "n": 300, "p": 5},
        "axis": "min_leaf",
        "grid": [2, 5, 20],
        "base": base,
        "replicates": 2,
        "method": "mdi",
        "seed": 11,
    })
    g0 = [row["g0_mean"] for row in table["rows"]]
    slope, _, r = pyrfimp.inverse_leaf_fit(table)
    print("g0 by leaf size:", [round(v, 4) for v in g0], f"slope={slope:.3f} r={r:.3f}")

    results = pyrfimp.run_experiment({
        "generator": {"generator": "strobl", "n": 150},
        "forest": base,
        "methods": ["mdi", "mdi-oob"],
        "replicates": 2,
        "seed": 5,
    })
    for s in results["summary"]:
        print(f"experiment {s['method']}: mean auc {s['mean_auc']:.3f}")

    try:
        forest.importance(data, "bogus")
    except ValueError as e:
        print("rejected:", e)
    else:
        raise AssertionError("unknown method accepted")

    print("ok")


if __name__ == "__main__":
    main()
