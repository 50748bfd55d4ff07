use std::ffi::CString;

use pyo3::prelude::*;

fn run(code: &str) -> PyResult<()> {
    Python::attach(|py| {
        let module = PyModule::new(py, "pyrfimp")?;
        pyrfimp::pyrfimp(&module)?;
        py.import("sys")?
            .getattr("modules")?
            .set_item("pyrfimp", &module)?;
        py.run(&CString::new(code).unwrap(), None, None)
    })
}

#[test]
fn train_and_score_from_python() {
    run(r#"
import pyrfimp
d = pyrfimp.Dataset.strobl(n=120, seed=2)
assert (d.n, d.p) == (120, 5) and d.relevant_set == [1]
f = pyrfimp.Forest(d, n_trees=10, mtry=2, seed=4)
a = f.importance(d, "mdi")
b = f.importance(d, "mdi-covariance-inbag")
assert all(abs(x - y) <= 1e-10 * (1 + abs(x)) for x, y in zip(a, b))
assert pyrfimp.Forest.from_json(f.to_json()).importance(d, "mdi-oob") == f.importance(d, "mdi-oob")
assert abs(sum(f.predict(d.rows()[0])) - 1) < 1e-12
"#)
    .unwrap();
}

#[test]
fn arrays_and_errors() {
    run(r#"
import pyrfimp
d = pyrfimp.Dataset([[0.0, 1.0], [1.0, 0.0], [0.5, 0.5], [1.0, 1.0]], [0.0, 1.0, 0.5, 2.0])
assert not d.is_classification and d.feature_names == ["X1", "X2"]
f = pyrfimp.Forest(d, n_trees=3, sampling="subsample:1")
for bad, exc in [(lambda: f.importance(d, "mdi-oob"), RuntimeError),
                 (lambda: f.importance(d, "nope"), ValueError),
                 (lambda: pyrfimp.Forest(d, n_trees=0), ValueError),
                 (lambda: pyrfimp.Dataset([[0.0], [1.0, 2.0]], [0.0, 1.0]), ValueError),
                 (lambda: pyrfimp.Dataset.load("/nonexistent/x.csv"), OSError)]:
    try:
        bad()
    except exc:
        pass
    else:
        raise AssertionError("expected " + exc.__name__)
assert pyrfimp.auc([0.2, 0.2], [True, False]) == 0.5
assert pyrfimp.noise_mass([0.1, 0.2, 0.7], [2]) == 0.1 + 0.2
"#)
    .unwrap();
}

#[test]
fn experiment_dicts_round_trip() {
    run(r#"
import pyrfimp
base = {"n_trees": 4, "tree": {"min_leaf": 5, "max_depth": None, "mtry": 2}, "seed": 0}
r = pyrfimp.run_experiment({"generator": {"generator": "strobl", "n": 80}, "forest": base,
                            "methods": ["mdi", "split-count"], "replicates": 3, "seed": 1})
assert [s["method"] for s in r["summary"]] == ["mdi", "split-count"]
assert len(r["replicates"]) == 3
t = pyrfimp.sweep({"generator": {"generator": "strobl", "n": 80}, "axis": "max_depth",
                   "grid": [1, 3], "base": base, "replicates": 1, "method": "mdi", "seed": 2})
assert [row["value"] for row in t["rows"]] == [1, 3]
try:
    pyrfimp.inverse_leaf_fit(t)
except ValueError:
    pass
else:
    raise AssertionError("depth table accepted")
"#)
    .unwrap();
}
