//! Independent reference implementations and fixtures shared by the
//! integration tests. Nothing here calls into the split search or the tree
//! growers it is used to check.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stream_forest::data_io::{load_csv, CsvOptions};
use stream_forest::tree::NodeId;
use stream_forest::{Dataset, DecisionTree};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gini(counts: &[usize]) -> f64 {
    let n: usize = counts.iter().sum();
    1.0 - counts.iter().map(|&c| (c as f64 / n as f64).powi(2)).sum::<f64>()
}

/// Exhaustive search over every feature and every midpoint between
/// consecutive distinct values. Decreases are computed directly from the
/// Gini definition in floating point; candidates within `1e-12` of the best
/// count as tied and the first one in (feature, threshold) order wins.
pub fn brute_force_split(data: &Dataset, indices: &[usize], features: &[usize]) -> Option<(usize, f64, f64)> {
    let k = data.n_classes();
    let mut parent = vec![0usize; k];
    for &i in indices {
        parent[data.label(i)] += 1;
    }
    let parent_gini = gini(&parent);
    let n = indices.len() as f64;

    let mut features = features.to_vec();
    features.sort_unstable();
    let mut best: Option<(usize, f64, f64)> = None;
    for &f in &features {
        let mut values: Vec<f64> = indices.iter().map(|&i| data.value(i, f)).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        for w in values.windows(2) {
            let threshold = (w[0] + w[1]) / 2.0;
            let mut left = vec![0usize; k];
            let mut right = vec![0usize; k];
            for &i in indices {
                if data.value(i, f) <= threshold {
                    left[data.label(i)] += 1;
                } else {
                    right[data.label(i)] += 1;
                }
            }
            let nl: usize = left.iter().sum();
            let nr: usize = right.iter().sum();
            let decrease = parent_gini - (nl as f64 / n) * gini(&left) - (nr as f64 / n) * gini(&right);
            let better = match best {
                None => true,
                Some((_, _, d)) => decrease > d + 1e-12,
            };
            if better {
                best = Some((f, threshold, decrease));
            }
        }
    }
    best.filter(|&(_, _, d)| d > 1e-12)
}

/// Random dataset with `n <= 200`, `p <= 5`, `K <= 3`. Half the draws use a
/// coarse value grid so that ties and repeated values are common.
pub fn random_small_dataset(seed: u64) -> Dataset {
    let mut r = rng(seed);
    let n = r.random_range(2..=200);
    let p = r.random_range(1..=5);
    let k = r.random_range(2..=3);
    let coarse = r.random_bool(0.5);
    let features: Vec<f64> = (0..n * p)
        .map(|_| {
            if coarse {
                r.random_range(0..6) as f64 * 0.5
            } else {
                r.random_range(-10.0..10.0)
            }
        })
        .collect();
    // labels loosely tied to the first feature so splits are informative
    let labels: Vec<usize> = (0..n)
        .map(|i| {
            if r.random_bool(0.6) {
                ((features[i * p] + 10.0) as usize) % k
            } else {
                r.random_range(0..k)
            }
        })
        .collect();
    Dataset::new(features, labels, p, k).unwrap()
}

/// Random dense dataset for property tests.
pub fn random_dataset(seed: u64, n: usize, p: usize, k: usize) -> Dataset {
    let mut r = rng(seed);
    let features: Vec<f64> = (0..n * p).map(|_| r.random_range(0.0..1.0)).collect();
    let labels: Vec<usize> = (0..n)
        .map(|i| {
            let s: f64 = features[i * p..(i + 1) * p].iter().sum();
            if r.random_bool(0.8) {
                ((s * k as f64 * 2.0) as usize) % k
            } else {
                r.random_range(0..k)
            }
        })
        .collect();
    Dataset::new(features, labels, p, k).unwrap()
}

/// Axis-aligned box of a node: per-feature `(lower, upper]` bounds.
pub type Region = Vec<(f64, f64)>;

/// Region of every leaf, found by walking the tree from the root.
pub fn leaf_regions(tree: &DecisionTree) -> Vec<(NodeId, Region)> {
    let p = tree.n_features();
    let mut out = Vec::new();
    let mut stack = vec![(DecisionTree::ROOT, vec![(f64::NEG_INFINITY, f64::INFINITY); p])];
    while let Some((id, region)) = stack.pop() {
        match tree.node(id).rule() {
            None => out.push((id, region)),
            Some(rule) => {
                let mut left = region.clone();
                left[rule.feature].1 = left[rule.feature].1.min(rule.threshold);
                let mut right = region;
                right[rule.feature].0 = right[rule.feature].0.max(rule.threshold);
                stack.push((rule.left, left));
                stack.push((rule.right, right));
            }
        }
    }
    out
}

pub fn region_contains(outer: &Region, inner: &Region) -> bool {
    outer.iter().zip(inner).all(|(o, i)| o.0 <= i.0 && i.1 <= o.1)
}

/// Node ids on the path from the root to the leaf reached by `x`.
pub fn path(tree: &DecisionTree, x: &[f64]) -> Vec<NodeId> {
    let mut id = DecisionTree::ROOT;
    let mut out = vec![id];
    while let Some(rule) = tree.node(id).rule() {
        id = if x[rule.feature] <= rule.threshold {
            rule.left
        } else {
            rule.right
        };
        out.push(id);
    }
    out
}

/// A regular grid of about `n` probe points spanning the bounding box of
/// `data`, padded by 10% on each side.
pub fn probe_grid(data: &Dataset, n: usize) -> Vec<Vec<f64>> {
    let p = data.n_features();
    let per_axis = ((n as f64).powf(1.0 / p as f64).ceil() as usize).max(2);
    let bounds: Vec<(f64, f64)> = (0..p)
        .map(|f| {
            let (lo, hi) = data.rows().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
                (lo.min(x[f]), hi.max(x[f]))
            });
            let pad = (hi - lo).max(1e-9) * 0.1;
            (lo - pad, hi + pad)
        })
        .collect();
    let mut out = Vec::with_capacity(n);
    let mut counter = vec![0usize; p];
    while out.len() < n {
        out.push(
            counter
                .iter()
                .zip(&bounds)
                .map(|(&c, &(lo, hi))| lo + (hi - lo) * c as f64 / (per_axis - 1) as f64)
                .collect(),
        );
        let mut axis = 0;
        loop {
            if axis == p {
                return out;
            }
            counter[axis] += 1;
            if counter[axis] < per_axis {
                break;
            }
            counter[axis] = 0;
            axis += 1;
        }
    }
    out
}

pub fn iris() -> Dataset {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/iris.csv");
    load_csv(
        path,
        &CsvOptions {
            n_classes: Some(3),
            ..Default::default()
        },
    )
    .unwrap()
    .dataset
}

/// Rows `range` of `data`.
pub fn rows(data: &Dataset, range: std::ops::Range<usize>) -> Dataset {
    data.select(&range.collect::<Vec<_>>())
}

pub fn range_indices(range: std::ops::Range<usize>) -> Vec<usize> {
    range.collect()
}

/// One blobs pool split into a train prefix and a test suffix. Cluster
/// centres depend on the generator seed, so both halves must come from the
/// same call.
pub fn blobs_split(n_train: usize, n_test: usize, p: usize, k: usize, noise: f64, seed: u64) -> (Dataset, Dataset) {
    use stream_forest::data_io::{gen_synthetic, SyntheticSpec};
    let all = gen_synthetic(&SyntheticSpec::blobs(n_train + n_test, p, k, noise, seed)).unwrap();
    (rows(&all, 0..n_train), rows(&all, n_train..n_train + n_test))
}

/// Streams `train` into a forest in the order of a seeded batch plan and
/// returns the forest with its test accuracy after every batch.
pub fn stream_forest(
    train: &Dataset,
    test: &Dataset,
    batch_size: usize,
    params: stream_forest::ForestParams,
    plan_seed: u64,
    model_seed: u64,
) -> (stream_forest::StreamForest, Vec<f64>) {
    use stream_forest::data_io::BatchPlan;
    use stream_forest::{accuracy, StreamForest};
    let plan = BatchPlan::new(train.n_samples(), batch_size, plan_seed).unwrap();
    let mut forest: Option<StreamForest> = None;
    let mut accs = Vec::new();
    for b in plan.batches() {
        let batch = train.select(b);
        match &mut forest {
            None => forest = Some(StreamForest::init(&batch, train.n_classes(), params.clone(), model_seed).unwrap()),
            Some(f) => f.update(&batch).unwrap(),
        }
        let f = forest.as_ref().unwrap();
        accs.push(accuracy(&f.predict_dataset(test).unwrap(), test.labels()));
    }
    (forest.unwrap(), accs)
}

/// Checks class-count conservation on a tree grown from `batches`, given the
/// tree after each of them (`history[j]` follows `batches[j]`).
///
/// The root must hold exactly the label counts of every batch. For each
/// internal node, the samples routed through it in batches at or after the
/// one in which it was split are counted from scratch, and both the node's
/// gain since that point and the sum of its children must equal that count.
pub fn check_conservation(history: &[DecisionTree], batches: &[Dataset]) -> Result<(), String> {
    let last = history.last().unwrap();
    let k = last.n_classes();
    let mut root = vec![0u64; k];
    for b in batches {
        for &y in b.labels() {
            root[y] += 1;
        }
    }
    if last.root().class_counts() != root.as_slice() {
        return Err(format!("root counts {:?} != {:?}", last.root().class_counts(), root));
    }

    for (id, node) in last.nodes().iter().enumerate() {
        let Some(rule) = node.rule() else { continue };
        let split_at = history
            .iter()
            .position(|t| id < t.node_count() && t.node(id).rule().is_some())
            .unwrap();
        let before = match split_at {
            0 => vec![0u64; k],
            j if id < history[j - 1].node_count() => history[j - 1].node(id).class_counts().to_vec(),
            _ => vec![0u64; k],
        };
        let mut routed = vec![0u64; k];
        for b in &batches[split_at..] {
            for (x, &y) in b.rows().zip(b.labels()) {
                if path(last, x).contains(&id) {
                    routed[y] += 1;
                }
            }
        }
        let gained: Vec<u64> = node.class_counts().iter().zip(&before).map(|(a, b)| a - b).collect();
        let children: Vec<u64> = last
            .node(rule.left)
            .class_counts()
            .iter()
            .zip(last.node(rule.right).class_counts())
            .map(|(a, b)| a + b)
            .collect();
        if gained != routed || children != routed {
            return Err(format!(
                "node {id}: gained {gained:?}, children {children:?}, routed {routed:?}"
            ));
        }
    }
    Ok(())
}

/// Checks that every internal node of `before` is unchanged in `after` and
/// that the leaf regions of `after` refine those of `before`.
pub fn check_refinement(before: &DecisionTree, after: &DecisionTree) -> Result<(), String> {
    for (id, node) in before.nodes().iter().enumerate() {
        if let Some(rule) = node.rule() {
            let new = after.node(id).rule().ok_or(format!("node {id} lost its split"))?;
            if new.feature != rule.feature || new.threshold.to_bits() != rule.threshold.to_bits() {
                return Err(format!("node {id} changed its split"));
            }
        }
    }
    let mut pre = before.internal_splits();
    let mut post = after.internal_splits();
    for s in pre.drain(..) {
        let pos = post
            .iter()
            .position(|t| t.0 == s.0 && t.1.to_bits() == s.1.to_bits())
            .ok_or(format!("split {s:?} missing after update"))?;
        post.swap_remove(pos);
    }
    let old = leaf_regions(before);
    for (id, region) in leaf_regions(after) {
        let parents = old.iter().filter(|(_, o)| region_contains(o, &region)).count();
        if parents != 1 {
            return Err(format!("leaf {id} lies in {parents} old leaf regions"));
        }
    }
    Ok(())
}
