//! Random corpora and from-scratch oracles shared by the integration tests.
#![allow(dead_code)]

use rand::Rng as _;
use rfimp::data::{draw_sample, SampleSplit, Sampling};
use rfimp::tree::{grow_tree, TieBreak, Tree, TreeParams};
use rfimp::{Dataset, FeatureKind, Response, Rng};

/// A random dataset mixing continuous and small-integer features.
pub fn random_dataset(rng: &mut Rng, n: usize, p: usize, classification: bool) -> Dataset {
    let columns: Vec<Vec<f64>> = (0..p)
        .map(|k| {
            if k % 2 == 0 {
                (0..n).map(|_| rng.random::<f64>() * 10.0 - 5.0).collect()
            } else {
                let levels = rng.random_range(2..8);
                (0..n).map(|_| rng.random_range(0..levels) as f64).collect()
            }
        })
        .collect();
    let signal: Vec<f64> = (0..n)
        .map(|i| columns[0][i] + if p > 1 { columns[1][i] } else { 0.0 })
        .collect();
    let response = if classification {
        let n_classes = rng.random_range(2..5);
        let labels = signal
            .iter()
            .map(|s| {
                if rng.random::<f64>() < 0.6 {
                    ((s.abs() * 3.0) as usize) % n_classes
                } else {
                    rng.random_range(0..n_classes)
                }
            })
            .collect();
        Response::Classes { labels, n_classes }
    } else {
        Response::Numeric(
            signal
                .iter()
                .map(|s| s + rng.random::<f64>() * 4.0)
                .collect(),
        )
    };
    let kinds = vec![FeatureKind::Numeric; p];
    Dataset::new(columns, response, kinds, None).unwrap()
}

pub struct Case {
    pub data: Dataset,
    pub sample: SampleSplit,
    pub tree: Tree,
}

/// `count` random trees on random data, n <= 300, p <= 15, cycling through
/// both tasks and both sampling modes.
pub fn tree_corpus(count: usize, seed: u64) -> Vec<Case> {
    let root = Rng::new(seed);
    (0..count)
        .map(|c| {
            let mut rng = root.split(c as u64);
            let n = rng.random_range(20..=300);
            let p = rng.random_range(1..=15);
            let data = random_dataset(&mut rng, n, p, c % 2 == 0);
            let sampling = if c % 4 < 2 {
                Sampling::Bootstrap
            } else {
                Sampling::Subsample(rng.random_range(0.3..0.9))
            };
            let sample = draw_sample(n, sampling, &mut rng).unwrap();
            let params = TreeParams {
                min_leaf: rng.random_range(1..6),
                max_depth: if rng.random_bool(0.3) {
                    Some(rng.random_range(1..8))
                } else {
                    None
                },
                mtry: rng.random_range(1..=p),
                allow_zero_gain_splits: false,
                tie_break: if c % 3 == 0 {
                    TieBreak::LowestIndex
                } else {
                    TieBreak::DrawOrder
                },
            };
            let tree = grow_tree(&data, &sample, &params, &mut rng).unwrap();
            Case { data, sample, tree }
        })
        .collect()
}

/// Response of row i as a vector: the value itself, or a one-hot row.
pub fn target(data: &Dataset, i: usize) -> Vec<f64> {
    match data.response() {
        Response::Numeric(v) => vec![v[i]],
        Response::Classes { labels, n_classes } => {
            let mut t = vec![0.0; *n_classes];
            t[labels[i]] = 1.0;
            t
        }
    }
}

/// Weighted within-sample variance summed over target coordinates.
pub fn weighted_variance(data: &Dataset, rows: &[(usize, u32)]) -> f64 {
    let total: f64 = rows.iter().map(|&(_, w)| w as f64).sum();
    let dim = target(data, rows[0].0).len();
    let mut mean = vec![0.0; dim];
    for &(i, w) in rows {
        for (m, v) in mean.iter_mut().zip(target(data, i)) {
            *m += w as f64 * v / total;
        }
    }
    rows.iter()
        .map(|&(i, w)| {
            let y = target(data, i);
            w as f64
                * y.iter()
                    .zip(&mean)
                    .map(|(a, b)| (a - b).powi(2))
                    .sum::<f64>()
        })
        .sum::<f64>()
        / total
}

/// MDI recomputed from raw rows: route the in-bag rows through the split
/// structure and evaluate parent-minus-children impurity at every node.
/// Ignores every statistic stored in the nodes.
pub fn oracle_mdi(tree: &Tree, data: &Dataset, sample: &SampleSplit) -> Vec<f64> {
    let rows = sample.weighted_rows();
    let total: f64 = rows.iter().map(|&(_, w)| w as f64).sum();
    let mut scores = vec![0.0; data.p()];
    let mut stack = vec![(0usize, rows)];
    while let Some((id, rows)) = stack.pop() {
        let Some(s) = tree.node(id).split else {
            continue;
        };
        let (left, right): (Vec<_>, Vec<_>) = rows
            .iter()
            .partition(|&&(i, _)| data.value(i, s.feature) <= s.threshold);
        let w = |r: &[(usize, u32)]| r.iter().map(|&(_, w)| w as f64).sum::<f64>();
        let (wp, wl, wr) = (w(&rows), w(&left), w(&right));
        let decrease = weighted_variance(data, &rows)
            - wl / wp * weighted_variance(data, &left)
            - wr / wp * weighted_variance(data, &right);
        scores[s.feature] += wp / total * decrease;
        stack.push((s.left, left));
        stack.push((s.right, right));
    }
    scores
}

/// Contribution of feature k along x's path, recomputed from the split
/// structure and raw in-bag rows (node means from the data, not the tree).
pub fn oracle_contribution(
    tree: &Tree,
    data: &Dataset,
    sample: &SampleSplit,
    x: &[f64],
    k: usize,
) -> Vec<f64> {
    let mut rows = sample.weighted_rows();
    let mean = |rows: &[(usize, u32)]| {
        let total: f64 = rows.iter().map(|&(_, w)| w as f64).sum();
        let dim = target(data, rows[0].0).len();
        let mut m = vec![0.0; dim];
        for &(i, w) in rows {
            for (a, v) in m.iter_mut().zip(target(data, i)) {
                *a += w as f64 * v / total;
            }
        }
        m
    };
    let mut out = vec![0.0; tree.output_dim()];
    let mut id = 0;
    while let Some(s) = tree.node(id).split {
        let go_left = x[s.feature] <= s.threshold;
        let child: Vec<_> = rows
            .iter()
            .copied()
            .filter(|&(i, _)| (data.value(i, s.feature) <= s.threshold) == go_left)
            .collect();
        if s.feature == k {
            for ((o, c), p) in out.iter_mut().zip(mean(&child)).zip(mean(&rows)) {
                *o += c - p;
            }
        }
        rows = child;
        id = if go_left { s.left } else { s.right };
    }
    out
}

/// All-pairs AUC count: (2 * wins + ties, 2 * positives * negatives).
pub fn brute_auc(scores: &[f64], labels: &[bool]) -> (u64, u64) {
    let (mut num, mut pairs) = (0u64, 0u64);
    for (i, &li) in labels.iter().enumerate() {
        for (j, &lj) in labels.iter().enumerate() {
            if li && !lj {
                pairs += 1;
                if scores[i] > scores[j] {
                    num += 2;
                } else if scores[i] == scores[j] {
                    num += 1;
                }
            }
        }
    }
    (num, 2 * pairs)
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}
