//! Node impurity and exhaustive threshold search.

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Targets};
use crate::error::{Error, Result};

/// A dataset row together with its in-bag multiplicity.
pub type WeightedRow = (usize, u32);

/// Weighted count and per-coordinate sums of a set of target rows.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Moments {
    pub weight: u64,
    pub sum: Vec<f64>,
}

impl Moments {
    pub fn new(dim: usize) -> Self {
        Moments {
            weight: 0,
            sum: vec![0.0; dim],
        }
    }

    pub fn of(targets: &Targets, rows: &[WeightedRow]) -> Self {
        let mut m = Moments::new(targets.dim());
        for &(i, w) in rows {
            m.add(targets.row(i), w);
        }
        m
    }

    #[inline]
    pub fn add(&mut self, y: &[f64], w: u32) {
        self.weight += w as u64;
        let w = w as f64;
        for (s, v) in self.sum.iter_mut().zip(y) {
            *s += w * v;
        }
    }

    pub fn mean(&self) -> Vec<f64> {
        let w = self.weight as f64;
        self.sum.iter().map(|s| s / w).collect()
    }
}

/// Weighted mean squared distance of the rows to their weighted mean; the
/// variance for scalar responses and the Gini index for one-hot rows.
pub fn impurity(targets: &Targets, rows: &[WeightedRow]) -> Result<f64> {
    let m = Moments::of(targets, rows);
    if m.weight == 0 {
        return Err(Error::Contract("impurity of an empty sample".into()));
    }
    Ok(spread(targets, rows, &m.mean()) / m.weight as f64)
}

/// Weighted sum of squared distances to `center`.
pub(crate) fn spread(targets: &Targets, rows: &[WeightedRow], center: &[f64]) -> f64 {
    rows.iter()
        .map(|&(i, w)| {
            let d2: f64 = targets
                .row(i)
                .iter()
                .zip(center)
                .map(|(y, c)| (y - c) * (y - c))
                .sum();
            w as f64 * d2
        })
        .sum()
}

/// Parent impurity minus count-weighted child impurities.
pub fn impurity_decrease(
    targets: &Targets,
    parent: &[WeightedRow],
    left: &[WeightedRow],
    right: &[WeightedRow],
) -> Result<f64> {
    let (wp, wl, wr) = (total(parent), total(left), total(right));
    if wl == 0 || wr == 0 {
        return Err(Error::Contract(
            "impurity decrease with an empty child".into(),
        ));
    }
    if wl + wr != wp {
        return Err(Error::Contract(
            "children do not partition the parent sample".into(),
        ));
    }
    let wp = wp as f64;
    Ok(impurity(targets, parent)?
        - wl as f64 / wp * impurity(targets, left)?
        - wr as f64 / wp * impurity(targets, right)?)
}

/// The same decrease in product form, p_left * p_right * |mu_left - mu_right|^2.
pub fn impurity_decrease_product(
    targets: &Targets,
    left: &[WeightedRow],
    right: &[WeightedRow],
) -> Result<f64> {
    let (l, r) = (Moments::of(targets, left), Moments::of(targets, right));
    if l.weight == 0 || r.weight == 0 {
        return Err(Error::Contract(
            "impurity decrease with an empty child".into(),
        ));
    }
    Ok(product_gain(&l, &r))
}

#[inline]
fn product_gain(l: &Moments, r: &Moments) -> f64 {
    let (wl, wr) = (l.weight as f64, r.weight as f64);
    let w = wl + wr;
    let dist2: f64 = l
        .sum
        .iter()
        .zip(&r.sum)
        .map(|(a, b)| {
            let d = a / wl - b / wr;
            d * d
        })
        .sum();
    (wl / w) * (wr / w) * dist2
}

fn total(rows: &[WeightedRow]) -> u64 {
    rows.iter().map(|&(_, w)| w as u64).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitCandidate {
    pub feature: usize,
    pub threshold: f64,
    pub decrease: f64,
}

// Gains below this fraction of E|y|^2 are rounding noise, not signal.
const ZERO_GAIN_RTOL: f64 = 1e-13;
// Gains closer than this fraction of E|y|^2 count as tied.
const TIE_RTOL: f64 = 1e-12;

/// Best `(feature, threshold)` over `candidates` by impurity decrease.
///
/// Thresholds are midpoints between consecutive distinct values of the
/// feature within the node; rows with `x <= threshold` go left. Both
/// children must carry weight `>= min_leaf`. Ties, up to rounding, keep
/// the earliest candidate in `candidates` order, then the smallest
/// threshold. Returns
/// `None` when no valid split exists or, unless `allow_zero_gain`, when the
/// best decrease is zero.
pub fn best_split(
    data: &Dataset,
    targets: &Targets,
    rows: &[WeightedRow],
    candidates: &[usize],
    min_leaf: usize,
    allow_zero_gain: bool,
) -> Option<SplitCandidate> {
    let node = Moments::of(targets, rows);
    let min_leaf = min_leaf.max(1) as u64;
    if node.weight < 2 * min_leaf {
        return None;
    }
    let scale = rows
        .iter()
        .map(|&(i, w)| w as f64 * targets.row(i).iter().map(|v| v * v).sum::<f64>())
        .sum::<f64>()
        / node.weight as f64;
    let floor = if allow_zero_gain {
        -1.0
    } else {
        ZERO_GAIN_RTOL * scale
    };

    let tie = TIE_RTOL * scale;

    let mut best: Option<SplitCandidate> = None;
    let mut sorted: Vec<(f64, usize, u32)> = Vec::with_capacity(rows.len());
    for &k in candidates {
        sorted.clear();
        sorted.extend(rows.iter().map(|&(i, w)| (data.value(i, k), i, w)));
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        if sorted[0].0 == sorted[sorted.len() - 1].0 {
            continue;
        }
        let mut left = Moments::new(targets.dim());
        let mut right = node.clone();
        for pair in sorted.windows(2) {
            let (x, i, w) = pair[0];
            let y = targets.row(i);
            left.add(y, w);
            right.weight -= w as u64;
            for (s, v) in right.sum.iter_mut().zip(y) {
                *s -= w as f64 * v;
            }
            let next = pair[1].0;
            if x == next || left.weight < min_leaf || right.weight < min_leaf {
                continue;
            }
            let gain = product_gain(&left, &right).max(0.0);
            let beats = match best {
                None => gain > floor,
                Some(b) => gain > b.decrease + tie,
            };
            if beats {
                let mid = 0.5 * (x + next);
                best = Some(SplitCandidate {
                    feature: k,
                    threshold: if mid < next { mid } else { x },
                    decrease: gain,
                });
            }
        }
    }
    best.filter(|b| b.decrease > floor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{FeatureKind, Response};

    fn vals(v: &[f64]) -> Targets {
        Targets::from_values(v.to_vec())
    }

    fn unit(idx: std::ops::Range<usize>) -> Vec<WeightedRow> {
        idx.map(|i| (i, 1)).collect()
    }

    #[test]
    fn impurity_examples() {
        assert_eq!(impurity(&vals(&[1.0, 1.0, 1.0]), &unit(0..3)).unwrap(), 0.0);
        assert_eq!(impurity(&vals(&[0.0, 1.0]), &unit(0..2)).unwrap(), 0.25);
        let onehot = Targets::from_rows(&crate::data::one_hot(&[0, 0, 1, 1], 2).unwrap());
        // Gini: 2 * 0.5 * 0.5.
        assert_eq!(impurity(&onehot, &unit(0..4)).unwrap(), 0.5);
        assert!(impurity(&vals(&[1.0]), &[]).is_err());
    }

    #[test]
    fn weights_act_as_multiplicities() {
        let t = vals(&[0.0, 1.0]);
        let dup = vals(&[0.0, 0.0, 0.0, 1.0]);
        let a = impurity(&t, &[(0, 3), (1, 1)]).unwrap();
        let b = impurity(&dup, &unit(0..4)).unwrap();
        assert!((a - b).abs() < 1e-15);
        assert!((a - 0.1875).abs() < 1e-15);
    }

    #[test]
    fn decrease_examples() {
        let t = vals(&[0.0, 0.0, 1.0, 1.0]);
        let d = impurity_decrease(&t, &unit(0..4), &unit(0..2), &unit(2..4)).unwrap();
        assert_eq!(d, 0.25);
        assert_eq!(
            impurity_decrease_product(&t, &unit(0..2), &unit(2..4)).unwrap(),
            0.25
        );

        let c = vals(&[3.0; 4]);
        assert_eq!(
            impurity_decrease(&c, &unit(0..4), &unit(0..1), &unit(1..4)).unwrap(),
            0.0
        );

        let alt = vals(&[0.0, 1.0, 0.0, 1.0]);
        assert_eq!(
            impurity_decrease(&alt, &unit(0..4), &unit(0..2), &unit(2..4)).unwrap(),
            0.0
        );
        assert!(impurity_decrease(&t, &unit(0..4), &unit(0..4), &[]).is_err());
        assert!(impurity_decrease(&t, &unit(0..4), &unit(0..1), &unit(2..4)).is_err());
    }

    fn dataset(cols: Vec<Vec<f64>>, y: Vec<f64>) -> Dataset {
        let p = cols.len();
        Dataset::new(
            cols,
            Response::Numeric(y),
            vec![FeatureKind::Numeric; p],
            None,
        )
        .unwrap()
    }

    #[test]
    fn perfect_split_found() {
        let d = dataset(
            vec![vec![5.0, 5.0, 5.0, 5.0], vec![0.1, 0.2, 0.8, 0.9]],
            vec![0.0, 0.0, 1.0, 1.0],
        );
        let t = d.targets();
        let s = best_split(&d, &t, &unit(0..4), &[0, 1], 1, false).unwrap();
        assert_eq!(s.feature, 1);
        assert!((s.threshold - 0.5).abs() < 1e-15);
        assert_eq!(s.decrease, impurity(&t, &unit(0..4)).unwrap());
    }

    #[test]
    fn constant_features_give_no_split() {
        let d = dataset(vec![vec![1.0; 4], vec![2.0; 4]], vec![0.0, 1.0, 0.0, 1.0]);
        assert!(best_split(&d, &d.targets(), &unit(0..4), &[0, 1], 1, false).is_none());
    }

    #[test]
    fn min_leaf_respects_weights() {
        let d = dataset(vec![vec![0.0, 1.0, 2.0]], vec![0.0, 5.0, 5.0]);
        let t = d.targets();
        // Row 0 carries weight 3 so it can stand alone with min_leaf 3.
        let s = best_split(&d, &t, &[(0, 3), (1, 2), (2, 1)], &[0], 3, false).unwrap();
        assert_eq!(s.threshold, 0.5);
        assert!(best_split(&d, &t, &[(0, 1), (1, 2), (2, 1)], &[0], 3, false).is_none());
    }

    #[test]
    fn zero_gain_only_when_allowed() {
        let d = dataset(vec![vec![0.0, 1.0, 2.0, 3.0]], vec![0.0, 1.0, 1.0, 0.0]);
        let t = d.targets();
        // Split at 1.5 leaves equal child means.
        let rows = unit(0..4);
        let s = best_split(&d, &t, &rows, &[0], 2, false);
        assert!(s.is_none());
        let z = best_split(&d, &t, &rows, &[0], 2, true).unwrap();
        assert_eq!((z.threshold, z.decrease), (1.5, 0.0));
    }

    #[test]
    fn ties_prefer_lowest_feature_then_threshold() {
        let d = dataset(
            vec![vec![0.0, 1.0, 2.0, 3.0], vec![0.0, 1.0, 2.0, 3.0]],
            vec![0.0, 0.0, 1.0, 1.0],
        );
        let s = best_split(&d, &d.targets(), &unit(0..4), &[0, 1], 1, false).unwrap();
        assert_eq!((s.feature, s.threshold), (0, 1.5));
    }
}
