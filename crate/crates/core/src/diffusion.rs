//! Tweet transmission over layered networks.
//!
//! The transmission factor of an edge `u → v` (v follows u) is
//! `tcr(v) / tcr(u) × rt(v)`. A path from the root through one node of each
//! layer to the sink scores the product of its account-to-account factors;
//! the sink edge carries none. A network's total tweet transmission is the
//! sum over all such paths.

use chrono::{DateTime, Utc};
use rayon::prelude::*;
use serde::Serialize;

use crate::account::AccountId;
use crate::error::{Error, Result};
use crate::network::{build_network, BuildParams, Layer, LayeredNetwork, NetworkNode, NodeId, RankingCategory};
use crate::num::{pairwise_sum, Scalar};
use crate::store::SnapshotDataset;

/// Differences smaller than this count as a tie.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Transmission factor from `upstream` to its follower `downstream`.
/// An upstream that never tweets transmits nothing.
pub fn tweet_transmission<F: Scalar>(upstream: &NetworkNode<F>, downstream: &NetworkNode<F>) -> Result<F> {
    if upstream.is_sink() || downstream.is_sink() {
        return Err(Error::SinkOperand);
    }
    if upstream.tcr <= F::zero() {
        return Ok(F::zero());
    }
    Ok(downstream.tcr / upstream.tcr * downstream.retweet_prob)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionPath<F> {
    /// Root, one node per layer, then the sink.
    pub nodes: Vec<NodeId>,
    /// One factor per account-to-account edge.
    pub edge_tt: Vec<F>,
    pub path_tt: F,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionReport<F> {
    pub category: RankingCategory,
    pub path_count: usize,
    pub total_tt: F,
    pub per_path: Vec<TransmissionPath<F>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Winner {
    ByInfluence,
    ByFollowers,
    Tie,
}

impl Winner {
    pub fn as_str(self) -> &'static str {
        match self {
            Winner::ByInfluence => "by_influence",
            Winner::ByFollowers => "by_followers",
            Winner::Tie => "tie",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonResult<F> {
    pub by_influence_ttt: F,
    pub by_followers_ttt: F,
    /// `by_influence_ttt - by_followers_ttt`.
    pub difference: F,
    pub winner: Winner,
}

impl<F: Scalar> ComparisonResult<F> {
    pub fn from_totals(by_influence_ttt: F, by_followers_ttt: F) -> Self {
        let difference = by_influence_ttt - by_followers_ttt;
        let tolerance = F::from(TIE_TOLERANCE).expect("tolerance representable");
        let winner = if difference.abs() < tolerance {
            Winner::Tie
        } else if difference > F::zero() {
            Winner::ByInfluence
        } else {
            Winner::ByFollowers
        };
        ComparisonResult {
            by_influence_ttt,
            by_followers_ttt,
            difference,
            winner,
        }
    }
}

/// Both category networks of one root with their diffusion reports.
#[derive(Debug, Clone)]
pub struct NetworkComparison<F> {
    pub params: BuildParams,
    pub by_influence: LayeredNetwork<F>,
    pub by_followers: LayeredNetwork<F>,
    pub influence_report: DiffusionReport<F>,
    pub followers_report: DiffusionReport<F>,
    pub result: ComparisonResult<F>,
}

/// Every root → layer 1 → … → layer ttl → sink path, in lexicographic
/// node-id order. Edges that stay within a layer or skip one are ignored.
pub fn enumerate_paths<F: Scalar>(network: &LayeredNetwork<F>) -> Result<Vec<TransmissionPath<F>>> {
    let root_id = network.root_id();
    let root = network
        .node(&root_id)
        .ok_or_else(|| Error::InvalidNetwork("root node missing".into()))?;
    let firsts: Vec<&NodeId> = network
        .successors(&root_id)
        .filter(|id| layer_of(network, id) == Some(Layer::Depth(1)))
        .collect();

    let per_branch = firsts
        .par_iter()
        .map(|first| {
            let mut out = Vec::new();
            let mut nodes = vec![root_id.clone()];
            let mut factors = Vec::with_capacity(network.ttl() as usize);
            extend(network, root, first, 1, &mut nodes, &mut factors, &mut out)?;
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_branch.into_iter().flatten().collect())
}

fn layer_of<F: Scalar>(network: &LayeredNetwork<F>, id: &NodeId) -> Option<Layer> {
    network.node(id).map(|n| n.layer)
}

fn extend<F: Scalar>(
    network: &LayeredNetwork<F>,
    upstream: &NetworkNode<F>,
    id: &NodeId,
    depth: u32,
    nodes: &mut Vec<NodeId>,
    factors: &mut Vec<F>,
    out: &mut Vec<TransmissionPath<F>>,
) -> Result<()> {
    let node = network
        .node(id)
        .ok_or_else(|| Error::InvalidNetwork(format!("edge target {id} missing")))?;
    factors.push(tweet_transmission(upstream, node)?);
    nodes.push(id.clone());
    if depth == network.ttl() {
        if network.has_edge(id, &NodeId::Sink) {
            let mut path_nodes = nodes.clone();
            path_nodes.push(NodeId::Sink);
            let path_tt = factors.iter().fold(F::one(), |acc, &f| acc * f);
            out.push(TransmissionPath {
                nodes: path_nodes,
                edge_tt: factors.clone(),
                path_tt,
            });
        }
    } else {
        for next in network.successors(id) {
            if layer_of(network, next) == Some(Layer::Depth(depth + 1)) {
                extend(network, node, next, depth + 1, nodes, factors, out)?;
            }
        }
    }
    nodes.pop();
    factors.pop();
    Ok(())
}

/// Sum of path products, reduced pairwise in path order.
pub fn total_tweet_transmission<F: Scalar>(paths: &[TransmissionPath<F>]) -> F {
    let values: Vec<F> = paths.iter().map(|p| p.path_tt).collect();
    pairwise_sum(&values)
}

pub fn diffusion_report<F: Scalar>(network: &LayeredNetwork<F>) -> Result<DiffusionReport<F>> {
    let per_path = enumerate_paths(network)?;
    Ok(DiffusionReport {
        category: network.category(),
        path_count: per_path.len(),
        total_tt: total_tweet_transmission(&per_path),
        per_path,
    })
}

/// Builds the by-influence and by-followers networks of `root` with the
/// same budget and compares their total transmission.
pub fn compare_networks<F: Scalar>(
    dataset: &SnapshotDataset,
    root: &AccountId,
    params: BuildParams,
    as_of: DateTime<Utc>,
) -> Result<NetworkComparison<F>> {
    let by_influence = build_network(dataset, root, params, RankingCategory::ByInfluence, as_of)?;
    let by_followers = build_network(dataset, root, params, RankingCategory::ByFollowers, as_of)?;
    let influence_report = diffusion_report(&by_influence)?;
    let followers_report = diffusion_report(&by_followers)?;
    let result = ComparisonResult::from_totals(influence_report.total_tt, followers_report.total_tt);
    Ok(NetworkComparison {
        params,
        by_influence,
        by_followers,
        influence_report,
        followers_report,
        result,
    })
}
