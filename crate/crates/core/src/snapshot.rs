//! JSON snapshots of trees and forests.
//!
//! A snapshot holds the hyperparameters, seeds, batch counters, generator
//! states, and a flat node array per tree. Internal nodes reference their
//! children by index into that array. Loading a snapshot restores a model that
//! predicts identically and continues to update exactly as the original would.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ensemble::{ForestParams, Member, StreamForest};
use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::stream_tree::StreamTree;
use crate::tree::{DecisionTree, Node, SplitCriteria, SplitRule};

pub const FORMAT: &str = "stream-forest-snapshot/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Leaf,
    Internal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub kind: NodeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feature: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right: Option<usize>,
    pub class_counts: Vec<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TreeSnapshot {
    pub seed: u64,
    pub batches_seen: u64,
    pub criteria: SplitCriteria,
    pub rng: Rng,
    pub nodes: Vec<NodeRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ForestTreeSnapshot {
    pub tree: TreeSnapshot,
    pub sampler: Rng,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ForestSnapshot {
    pub format: String,
    pub n_classes: usize,
    pub n_features: usize,
    pub params: ForestParams,
    pub master_seed: u64,
    pub batches_seen: u64,
    pub rng: Rng,
    pub trees: Vec<ForestTreeSnapshot>,
}

fn node_records(tree: &DecisionTree) -> Vec<NodeRecord> {
    tree.nodes
        .iter()
        .map(|n| match n.rule {
            Some(r) => NodeRecord {
                kind: NodeKind::Internal,
                feature: Some(r.feature),
                threshold: Some(r.threshold),
                left: Some(r.left),
                right: Some(r.right),
                class_counts: n.class_counts.clone(),
            },
            None => NodeRecord {
                kind: NodeKind::Leaf,
                feature: None,
                threshold: None,
                left: None,
                right: None,
                class_counts: n.class_counts.clone(),
            },
        })
        .collect()
}

/// Rebuilds the node arena, checking that children come after their parent
/// (which rules out cycles), that every node but the root has exactly one
/// parent, and that features and counts fit the declared shape.
fn nodes_from_records(records: &[NodeRecord], n_features: usize, n_classes: usize) -> Result<Vec<Node>> {
    if records.is_empty() {
        return Err(Error::Format("tree has no nodes".into()));
    }
    let bad = |i: usize, what: &str| Error::Format(format!("node {i}: {what}"));
    let mut nodes: Vec<Node> = Vec::with_capacity(records.len());
    let mut parents = vec![0usize; records.len()];
    let mut depth = vec![0usize; records.len()];
    for (i, r) in records.iter().enumerate() {
        if r.class_counts.len() != n_classes {
            return Err(bad(i, "class count length mismatch"));
        }
        let rule = match r.kind {
            NodeKind::Leaf => None,
            NodeKind::Internal => {
                let (Some(feature), Some(threshold), Some(left), Some(right)) =
                    (r.feature, r.threshold, r.left, r.right)
                else {
                    return Err(bad(i, "internal node is missing fields"));
                };
                if feature >= n_features || !threshold.is_finite() {
                    return Err(bad(i, "invalid split"));
                }
                if left <= i || right <= i || left == right || left >= records.len() || right >= records.len() {
                    return Err(bad(i, "invalid child offsets"));
                }
                parents[left] += 1;
                parents[right] += 1;
                depth[left] = depth[i] + 1;
                depth[right] = depth[i] + 1;
                Some(SplitRule {
                    feature,
                    threshold,
                    left,
                    right,
                })
            }
        };
        nodes.push(Node {
            rule,
            class_counts: r.class_counts.clone(),
            depth: depth[i],
        });
    }
    if parents[0] != 0 || parents[1..].iter().any(|&p| p != 1) {
        return Err(Error::Format("node array is not a single tree".into()));
    }
    Ok(nodes)
}

impl StreamTree {
    pub fn to_snapshot(&self) -> TreeSnapshot {
        TreeSnapshot {
            seed: self.tree.seed,
            batches_seen: self.batches_seen,
            criteria: self.tree.criteria.clone(),
            rng: self.rng.clone(),
            nodes: node_records(&self.tree),
        }
    }

    pub fn from_snapshot(s: TreeSnapshot, n_features: usize, n_classes: usize) -> Result<Self> {
        s.criteria.validate(n_features)?;
        let nodes = nodes_from_records(&s.nodes, n_features, n_classes)?;
        Ok(StreamTree {
            tree: DecisionTree {
                nodes,
                n_classes,
                n_features,
                criteria: s.criteria,
                seed: s.seed,
            },
            rng: s.rng,
            batches_seen: s.batches_seen,
        })
    }
}

impl StreamForest {
    pub fn to_snapshot(&self) -> ForestSnapshot {
        ForestSnapshot {
            format: FORMAT.to_string(),
            n_classes: self.n_classes,
            n_features: self.n_features,
            params: self.params.clone(),
            master_seed: self.master_seed,
            batches_seen: self.batches_seen,
            rng: self.rng.clone(),
            trees: self
                .members
                .iter()
                .map(|m| ForestTreeSnapshot {
                    tree: m.tree.to_snapshot(),
                    sampler: m.sampler.clone(),
                })
                .collect(),
        }
    }

    pub fn from_snapshot(s: ForestSnapshot) -> Result<Self> {
        if s.format != FORMAT {
            return Err(Error::Format(format!("unsupported snapshot format {:?}", s.format)));
        }
        if s.trees.len() != s.params.n_trees || s.params.replace_count > s.params.n_trees {
            return Err(Error::Format("tree count does not match parameters".into()));
        }
        let members = s
            .trees
            .into_iter()
            .map(|t| {
                Ok(Member {
                    tree: StreamTree::from_snapshot(t.tree, s.n_features, s.n_classes)?,
                    sampler: t.sampler,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(StreamForest {
            members,
            params: s.params,
            n_classes: s.n_classes,
            n_features: s.n_features,
            master_seed: s.master_seed,
            batches_seen: s.batches_seen,
            rng: s.rng,
            replacement_override: None,
            last_replacement: None,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_snapshot()).expect("snapshot serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_snapshot(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
