//! Layered follower networks.
//!
//! Starting from a root account, each layer is formed by fetching up to
//! `n_f` followers of every node in the previous layer, ranking them under a
//! [`RankingCategory`] and keeping the top `k`. Expansion stops after `ttl`
//! layers and every node of the last layer is wired to a shared sink.
//!
//! A node keeps the first (shallowest) layer it is discovered at; later
//! selections only add edges. Selections of the root are dropped, so no edge
//! ever points back into layer 0.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Write;

use chrono::{DateTime, Utc};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::account::{AccountId, AccountSnapshot, TweetWindow};
use crate::error::{Error, Result};
use crate::metrics::{compute_tcr, influence_from_parts, retweet_probability};
use crate::num::Scalar;
use crate::store::SnapshotDataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RankingCategory {
    ByInfluence,
    ByFollowers,
}

impl RankingCategory {
    pub const ALL: [RankingCategory; 2] = [RankingCategory::ByInfluence, RankingCategory::ByFollowers];

    pub fn label(self) -> &'static str {
        match self {
            RankingCategory::ByInfluence => "By Influence",
            RankingCategory::ByFollowers => "By Followers",
        }
    }
}

impl fmt::Display for RankingCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RankingCategory::ByInfluence => "by_influence",
            RankingCategory::ByFollowers => "by_followers",
        })
    }
}

/// Identifier of a network node. The sink is its own variant and can never
/// collide with an account; it orders after every account.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeId {
    Account(AccountId),
    Sink,
}

impl NodeId {
    pub fn account(&self) -> Option<&AccountId> {
        match self {
            NodeId::Account(id) => Some(id),
            NodeId::Sink => None,
        }
    }

    fn to_json(&self) -> Value {
        match self {
            NodeId::Account(id) => Value::String(id.to_string()),
            NodeId::Sink => Value::Null,
        }
    }
}

impl From<AccountId> for NodeId {
    fn from(id: AccountId) -> Self {
        NodeId::Account(id)
    }
}

impl From<&str> for NodeId {
    fn from(id: &str) -> Self {
        NodeId::Account(id.into())
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeId::Account(id) => id.fmt(f),
            NodeId::Sink => f.write_str("<sink>"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Layer {
    Depth(u32),
    Sink,
}

impl Layer {
    fn to_json(self) -> Value {
        match self {
            Layer::Depth(d) => json!(d),
            Layer::Sink => json!("sink"),
        }
    }
}

/// Per-account quantities the builder and the diffusion engine need.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeMeasures<F> {
    pub tcr: F,
    pub retweet_prob: F,
    pub influence: F,
    pub followers_count: u64,
}

impl<F: Scalar> NodeMeasures<F> {
    /// Stub accounts (no window) and empty windows get zero activity.
    pub fn of(snapshot: &AccountSnapshot, window: Option<&TweetWindow>, as_of: DateTime<Utc>) -> Result<Self> {
        let (tcr, retweet_prob) = match window.filter(|w| !w.is_empty()) {
            Some(w) => (compute_tcr(w, as_of)?, retweet_probability(w)?),
            None => (F::zero(), F::zero()),
        };
        let influence = influence_from_parts(tcr, snapshot.followers_count, snapshot.following_count).value;
        Ok(NodeMeasures {
            tcr,
            retweet_prob,
            influence,
            followers_count: snapshot.followers_count,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkNode<F> {
    pub id: NodeId,
    pub layer: Layer,
    pub tcr: F,
    pub retweet_prob: F,
    pub influence: F,
    pub followers_count: u64,
}

impl<F: Scalar> NetworkNode<F> {
    pub fn account(id: AccountId, depth: u32, m: NodeMeasures<F>) -> Self {
        NetworkNode {
            id: NodeId::Account(id),
            layer: Layer::Depth(depth),
            tcr: m.tcr,
            retweet_prob: m.retweet_prob,
            influence: m.influence,
            followers_count: m.followers_count,
        }
    }

    pub fn sink() -> Self {
        NetworkNode {
            id: NodeId::Sink,
            layer: Layer::Sink,
            tcr: F::zero(),
            retweet_prob: F::zero(),
            influence: F::zero(),
            followers_count: 0,
        }
    }

    pub fn is_sink(&self) -> bool {
        self.id == NodeId::Sink
    }

    pub fn depth(&self) -> Option<u32> {
        match self.layer {
            Layer::Depth(d) => Some(d),
            Layer::Sink => None,
        }
    }
}

/// Directed edge; tweets flow from `from` to `to` (`to` follows `from`).
/// Edges into the sink are structural only.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NetworkEdge {
    pub from: NodeId,
    pub to: NodeId,
}

/// Budget for one network build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildParams {
    /// Followers fetched per expanded node.
    pub n_f: usize,
    /// Followers kept per expanded node after ranking.
    pub k: usize,
    /// Number of layers below the root.
    pub ttl: u32,
}

impl Default for BuildParams {
    fn default() -> Self {
        BuildParams { n_f: 50, k: 3, ttl: 3 }
    }
}

impl BuildParams {
    pub fn new(n_f: usize, k: usize, ttl: u32) -> Self {
        BuildParams { n_f, k, ttl }
    }

    /// Largest number of non-sink nodes a build can produce:
    /// `1 + k + k² + … + k^ttl`, saturating.
    pub fn node_budget(&self) -> usize {
        let mut total: usize = 1;
        let mut level: usize = 1;
        for _ in 0..self.ttl {
            level = level.saturating_mul(self.k);
            total = total.saturating_add(level);
        }
        total
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayeredNetwork<F> {
    root: AccountId,
    category: RankingCategory,
    ttl: u32,
    nodes: BTreeMap<NodeId, NetworkNode<F>>,
    out_edges: BTreeMap<NodeId, BTreeSet<NodeId>>,
}

impl<F: Scalar> LayeredNetwork<F> {
    /// Starts a network holding only `root`, which must sit at layer 0.
    pub fn new(root: NetworkNode<F>, category: RankingCategory, ttl: u32) -> Result<Self> {
        if ttl == 0 {
            return Err(Error::InvalidNetwork("ttl must be at least 1".into()));
        }
        let root_id = match (&root.id, root.layer) {
            (NodeId::Account(id), Layer::Depth(0)) => id.clone(),
            _ => return Err(Error::InvalidNetwork("root must be an account at layer 0".into())),
        };
        let mut nodes = BTreeMap::new();
        nodes.insert(root.id.clone(), root);
        Ok(LayeredNetwork {
            root: root_id,
            category,
            ttl,
            nodes,
            out_edges: BTreeMap::new(),
        })
    }

    pub fn root(&self) -> &AccountId {
        &self.root
    }

    pub fn root_id(&self) -> NodeId {
        NodeId::Account(self.root.clone())
    }

    pub fn category(&self) -> RankingCategory {
        self.category
    }

    pub fn ttl(&self) -> u32 {
        self.ttl
    }

    pub fn node(&self, id: &NodeId) -> Option<&NetworkNode<F>> {
        self.nodes.get(id)
    }

    pub fn contains(&self, id: &NodeId) -> bool {
        self.nodes.contains_key(id)
    }

    /// Nodes ordered by (layer, id), sink last.
    pub fn nodes(&self) -> Vec<&NetworkNode<F>> {
        let mut nodes: Vec<_> = self.nodes.values().collect();
        nodes.sort_by(|a, b| (a.layer, &a.id).cmp(&(b.layer, &b.id)));
        nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Number of nodes other than the sink.
    pub fn account_node_count(&self) -> usize {
        self.nodes.len() - usize::from(self.nodes.contains_key(&NodeId::Sink))
    }

    /// Edges ordered by (from, to).
    pub fn edges(&self) -> impl Iterator<Item = NetworkEdge> + '_ {
        self.out_edges.iter().flat_map(|(from, tos)| {
            tos.iter().map(move |to| NetworkEdge {
                from: from.clone(),
                to: to.clone(),
            })
        })
    }

    pub fn edge_count(&self) -> usize {
        self.out_edges.values().map(BTreeSet::len).sum()
    }

    pub fn successors(&self, id: &NodeId) -> impl Iterator<Item = &NodeId> + '_ {
        self.out_edges.get(id).into_iter().flatten()
    }

    pub fn has_edge(&self, from: &NodeId, to: &NodeId) -> bool {
        self.out_edges.get(from).is_some_and(|s| s.contains(to))
    }

    /// True when nothing beyond the root was selected.
    pub fn is_empty(&self) -> bool {
        self.account_node_count() <= 1
    }

    /// Adds an account node at a layer in `1..=ttl`.
    pub fn insert_node(&mut self, node: NetworkNode<F>) -> Result<()> {
        match (&node.id, node.depth()) {
            (NodeId::Account(_), Some(d)) if (1..=self.ttl).contains(&d) => {}
            _ => {
                return Err(Error::InvalidNetwork(format!(
                    "node {} needs a layer in 1..={}",
                    node.id, self.ttl
                )))
            }
        }
        if self.nodes.contains_key(&node.id) {
            return Err(Error::InvalidNetwork(format!("node {} already present", node.id)));
        }
        self.nodes.insert(node.id.clone(), node);
        Ok(())
    }

    /// Adds an account-to-account edge. Returns false if it already existed.
    pub fn insert_edge(&mut self, from: &NodeId, to: &NodeId) -> Result<bool> {
        for id in [from, to] {
            if *id == NodeId::Sink {
                return Err(Error::InvalidNetwork("sink edges come from attach_sink".into()));
            }
            if !self.nodes.contains_key(id) {
                return Err(Error::InvalidNetwork(format!("edge endpoint {id} is not a node")));
            }
        }
        if from == to {
            return Err(Error::InvalidNetwork(format!("self edge on {from}")));
        }
        if to.account() == Some(&self.root) {
            return Err(Error::InvalidNetwork("edges may not enter the root".into()));
        }
        Ok(self.out_edges.entry(from.clone()).or_default().insert(to.clone()))
    }

    /// Adds the sink and an edge to it from every node of layer `ttl`.
    pub fn attach_sink(&mut self) {
        self.nodes.entry(NodeId::Sink).or_insert_with(NetworkNode::sink);
        let last: Vec<NodeId> = self
            .nodes
            .values()
            .filter(|n| n.layer == Layer::Depth(self.ttl))
            .map(|n| n.id.clone())
            .collect();
        for id in last {
            self.out_edges.entry(id).or_default().insert(NodeId::Sink);
        }
    }

    /// Checks layer soundness and sink completeness.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidNetwork(msg));
        let sink_present = self.nodes.contains_key(&NodeId::Sink);
        for node in self.nodes.values() {
            match node.layer {
                Layer::Depth(0) | Layer::Sink => {}
                Layer::Depth(d) => {
                    let fed = self
                        .out_edges
                        .iter()
                        .any(|(from, tos)| tos.contains(&node.id) && self.nodes[from].depth().is_some_and(|fd| fd < d));
                    if !fed {
                        return bad(format!("{} has no parent in a shallower layer", node.id));
                    }
                    if d == self.ttl && sink_present && !self.has_edge(&node.id, &NodeId::Sink) {
                        return bad(format!("{} is in the last layer but not wired to the sink", node.id));
                    }
                }
            }
            if !(F::zero()..=F::one()).contains(&node.retweet_prob) {
                return bad(format!("{} has retweet probability outside [0, 1]", node.id));
            }
        }
        if self.successors(&NodeId::Sink).next().is_some() {
            return bad("the sink has outgoing edges".into());
        }
        Ok(())
    }

    /// Dump records: a header, nodes by (layer, id), then edges by
    /// (from, to). The sink's id is `null`.
    pub fn dump_records(&self) -> Vec<Value> {
        let mut records = vec![json!({
            "kind": "network",
            "root": self.root.as_str(),
            "category": self.category.to_string(),
            "ttl": self.ttl,
            "nodes": self.node_count(),
            "edges": self.edge_count(),
        })];
        for n in self.nodes() {
            records.push(json!({
                "kind": "node",
                "id": n.id.to_json(),
                "layer": n.layer.to_json(),
                "tcr": n.tcr.to_f64(),
                "retweet_prob": n.retweet_prob.to_f64(),
                "influence": n.influence.to_f64(),
                "followers_count": n.followers_count,
            }));
        }
        for e in self.edges() {
            records.push(json!({
                "kind": "edge",
                "from": e.from.to_json(),
                "to": e.to.to_json(),
            }));
        }
        records
    }

    pub fn write_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for record in self.dump_records() {
            serde_json::to_writer(&mut out, &record)?;
            out.write_all(b"\n")?;
        }
        out.flush()
    }
}

/// A follower offered to the ranking step.
#[derive(Debug, Clone, Copy)]
pub struct Candidate<'a> {
    pub snapshot: &'a AccountSnapshot,
    pub window: Option<&'a TweetWindow>,
}

/// The ids of the top `k` candidates, best first. Ties go to the smaller id.
pub fn rank_followers<F: Scalar>(
    candidates: &[Candidate<'_>],
    category: RankingCategory,
    k: usize,
    as_of: DateTime<Utc>,
) -> Result<Vec<AccountId>> {
    let scored = candidates
        .iter()
        .map(|c| Ok((c.snapshot, NodeMeasures::<F>::of(c.snapshot, c.window, as_of)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(top_k(scored, category, k)
        .into_iter()
        .map(|(s, _)| s.account_id.clone())
        .collect())
}

type Scored<'a, F> = (&'a AccountSnapshot, NodeMeasures<F>);

fn top_k<F: Scalar>(mut scored: Vec<Scored<'_, F>>, category: RankingCategory, k: usize) -> Vec<Scored<'_, F>> {
    scored.sort_by(|(sa, ma), (sb, mb)| {
        let primary = match category {
            RankingCategory::ByInfluence => mb.influence.partial_cmp(&ma.influence).expect("influence is never NaN"),
            RankingCategory::ByFollowers => mb.followers_count.cmp(&ma.followers_count),
        };
        primary.then_with(|| sa.account_id.cmp(&sb.account_id))
    });
    scored.truncate(k);
    scored
}

/// Builds the layered network of `root` under `category`.
///
/// A root without resolvable followers yields a network holding only the
/// root and the sink; check [`LayeredNetwork::is_empty`].
pub fn build_network<F: Scalar>(
    dataset: &SnapshotDataset,
    root: &AccountId,
    params: BuildParams,
    category: RankingCategory,
    as_of: DateTime<Utc>,
) -> Result<LayeredNetwork<F>> {
    let root_snapshot = dataset
        .account(root)
        .ok_or_else(|| Error::UnknownAccount(root.to_string()))?;
    let root_measures = NodeMeasures::of(root_snapshot, dataset.window(root), as_of)?;
    let mut network = LayeredNetwork::new(
        NetworkNode::account(root.clone(), 0, root_measures),
        category,
        params.ttl,
    )?;

    let mut frontier = vec![root.clone()];
    for depth in 0..params.ttl {
        let selections = frontier
            .par_iter()
            .map(|parent| {
                let scored = dataset
                    .followers_of(parent, params.n_f)?
                    .into_iter()
                    .map(|s| Ok((s, NodeMeasures::<F>::of(s, dataset.window(&s.account_id), as_of)?)))
                    .collect::<Result<Vec<_>>>()?;
                Ok(top_k(scored, category, params.k))
            })
            .collect::<Result<Vec<_>>>()?;

        let mut next = Vec::new();
        for (parent, selected) in frontier.iter().zip(selections) {
            let parent_id = NodeId::Account(parent.clone());
            for (snapshot, measures) in selected {
                let child = &snapshot.account_id;
                if child == root {
                    continue;
                }
                let child_id = NodeId::Account(child.clone());
                if !network.contains(&child_id) {
                    network.insert_node(NetworkNode::account(child.clone(), depth + 1, measures))?;
                    next.push(child.clone());
                }
                network.insert_edge(&parent_id, &child_id)?;
            }
        }
        next.sort();
        frontier = next;
    }
    network.attach_sink();
    Ok(network)
}
