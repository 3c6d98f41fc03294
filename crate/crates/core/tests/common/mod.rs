//! Brute-force reference implementations and fixtures shared by the
//! integration tests. Nothing here calls the code paths it is used to check.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, Duration, Utc};
use influence_tracker::network::NetworkNode;
use influence_tracker::store::synthetic_epoch;
use influence_tracker::{
    AccountId, AccountSnapshot, BuildParams, LayeredNetwork, NodeId, NodeMeasures, RankingCategory, SnapshotDataset,
    TweetRecord,
};

/// Largest h with at least h entries ≥ h, by scanning every candidate h.
pub fn brute_h_index(counts: &[u64]) -> usize {
    let mut best = 0;
    for h in 0..=counts.len() {
        if counts.iter().filter(|&&c| c >= h as u64).count() >= h {
            best = h;
        }
    }
    best
}

/// Node of a network as the oracle sees it.
#[derive(Debug, Clone, Copy)]
pub struct Attrs {
    pub tcr: f64,
    pub rt: f64,
}

/// Transmission factor recomputed straight from node attributes.
pub fn oracle_tt(up: Attrs, down: Attrs) -> f64 {
    if up.tcr == 0.0 {
        0.0
    } else {
        down.tcr / up.tcr * down.rt
    }
}

/// Every walk of exactly `ttl + 1` edges from the root, over all stored
/// edges, kept when its layers read 0, 1, …, ttl, sink. Returns each
/// qualifying walk with its transmission product.
pub fn brute_paths(net: &LayeredNetwork) -> Vec<(Vec<NodeId>, f64)> {
    let mut adjacency: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    for e in net.edges() {
        adjacency.entry(e.from).or_default().push(e.to);
    }
    let steps = net.ttl() as usize + 1;
    let mut walks = vec![vec![net.root_id()]];
    for _ in 0..steps {
        let mut next = Vec::new();
        for w in &walks {
            for to in adjacency.get(w.last().unwrap()).into_iter().flatten() {
                let mut w2 = w.clone();
                w2.push(to.clone());
                next.push(w2);
            }
        }
        walks = next;
    }
    let attrs = |id: &NodeId| {
        let n = net.node(id).unwrap();
        Attrs {
            tcr: n.tcr,
            rt: n.retweet_prob,
        }
    };
    walks
        .into_iter()
        .filter(|w| {
            w.iter().enumerate().all(|(i, id)| {
                let layer = net.node(id).unwrap().layer;
                if i == steps {
                    *id == NodeId::Sink
                } else {
                    layer == influence_tracker::Layer::Depth(i as u32)
                }
            })
        })
        .map(|w| {
            let product = w[..steps]
                .windows(2)
                .map(|p| oracle_tt(attrs(&p[0]), attrs(&p[1])))
                .product();
            (w, product)
        })
        .collect()
}

/// Plain left-to-right sum, used as the reference total.
pub fn brute_total(paths: &[(Vec<NodeId>, f64)]) -> f64 {
    paths.iter().map(|(_, v)| v).sum()
}

/// Reference ranking: full sort by the category key, ties by id.
pub fn brute_rank(
    dataset: &SnapshotDataset,
    candidates: &[AccountId],
    category: RankingCategory,
    as_of: DateTime<Utc>,
) -> Vec<AccountId> {
    let mut keyed: Vec<(f64, u64, AccountId)> = candidates
        .iter()
        .map(|id| {
            let s = dataset.account(id).unwrap();
            let influence = reference_influence(dataset, id, as_of);
            (influence, s.followers_count, id.clone())
        })
        .collect();
    keyed.sort_by(|a, b| {
        let primary = match category {
            RankingCategory::ByInfluence => b.0.partial_cmp(&a.0).unwrap(),
            RankingCategory::ByFollowers => b.1.cmp(&a.1),
        };
        primary.then(a.2.cmp(&b.2))
    });
    keyed.into_iter().map(|k| k.2).collect()
}

/// Influence computed from first principles: tweets per day over the window
/// span, decade of the follower count found by string length, log-dampened
/// follower ratio.
pub fn reference_influence(dataset: &SnapshotDataset, id: &AccountId, as_of: DateTime<Utc>) -> f64 {
    let s = dataset.account(id).unwrap();
    let tcr = reference_tcr(dataset, id, as_of);
    let oom = if s.followers_count == 0 {
        0.0
    } else {
        10f64.powi(s.followers_count.to_string().len() as i32 - 1)
    };
    let ratio = s.followers_count as f64 / s.following_count.max(1) as f64;
    tcr * oom * (ratio + 1.0).log10()
}

pub fn reference_tcr(dataset: &SnapshotDataset, id: &AccountId, as_of: DateTime<Utc>) -> f64 {
    match dataset.window(id) {
        Some(w) if !w.is_empty() => {
            let oldest = w.tweets().iter().map(|t| t.created_at).min().unwrap();
            let secs = (as_of - oldest).num_milliseconds() as f64 / 1000.0;
            w.tweets().len() as f64 / (secs.max(1.0) / 86_400.0)
        }
        _ => 0.0,
    }
}

pub fn reference_rt(dataset: &SnapshotDataset, id: &AccountId) -> f64 {
    match dataset.window(id) {
        Some(w) if !w.is_empty() => w.tweets().iter().filter(|t| t.is_retweet).count() as f64 / w.tweets().len() as f64,
        _ => 0.0,
    }
}

/// Layer sets and edge set computed set-wise:
/// `L(n+1) = ⋃ topk(u ∈ L(n)) − root − L(0..=n)`, edges `u → v` for every
/// selection with `v ≠ root`, plus `L(ttl) → sink`.
pub struct ReferenceNetwork {
    pub layers: BTreeMap<AccountId, u32>,
    pub edges: BTreeSet<(NodeId, NodeId)>,
}

pub fn reference_build(
    dataset: &SnapshotDataset,
    root: &AccountId,
    params: BuildParams,
    category: RankingCategory,
    as_of: DateTime<Utc>,
) -> ReferenceNetwork {
    let mut layers = BTreeMap::from([(root.clone(), 0u32)]);
    let mut edges = BTreeSet::new();
    let mut current: BTreeSet<AccountId> = BTreeSet::from([root.clone()]);
    for depth in 0..params.ttl {
        let mut discovered = BTreeSet::new();
        for u in &current {
            let mut pool: Vec<AccountId> = dataset
                .account(u)
                .unwrap()
                .follower_ids
                .iter()
                .filter(|id| dataset.account(id).is_some())
                .cloned()
                .collect();
            pool.sort();
            pool.truncate(params.n_f);
            let selected: Vec<AccountId> = brute_rank(dataset, &pool, category, as_of)
                .into_iter()
                .take(params.k)
                .collect();
            for v in selected {
                if &v == root {
                    continue;
                }
                edges.insert((NodeId::Account(u.clone()), NodeId::Account(v.clone())));
                discovered.insert(v);
            }
        }
        let fresh: BTreeSet<AccountId> = discovered.into_iter().filter(|v| !layers.contains_key(v)).collect();
        for v in &fresh {
            layers.insert(v.clone(), depth + 1);
        }
        current = fresh;
    }
    for (id, &d) in &layers {
        if d == params.ttl {
            edges.insert((NodeId::Account(id.clone()), NodeId::Sink));
        }
    }
    ReferenceNetwork { layers, edges }
}

fn account(id: &str, followers: u64, follower_ids: &[String]) -> AccountSnapshot {
    AccountSnapshot::new(
        id.into(),
        format!("@{id}"),
        followers,
        50,
        follower_ids.iter().map(|f| AccountId::from(f.as_str())).collect(),
        synthetic_epoch(),
    )
    .unwrap()
}

fn active_tweets(author: &str, count: usize, span_days: i64, retweets: usize) -> Vec<TweetRecord> {
    // Oldest tweet sits exactly `span_days` before capture.
    let span = span_days * 86_400;
    (0..count)
        .map(|i| TweetRecord {
            tweet_id: format!("{author}-{i:03}"),
            author_id: author.into(),
            created_at: synthetic_epoch() - Duration::seconds(span * i as i64 / (count as i64 - 1).max(1)),
            retweet_count: i as u64,
            favorite_count: 1,
            is_retweet: i < retweets,
        })
        .collect()
}

/// A root followed by three heavily followed but silent accounts and three
/// modestly followed active ones. Every layer-1 account has its own three
/// active followers, each with three more.
///
/// Ranked by followers the silent accounts win layer 1 and every path
/// through them transmits nothing; ranked by influence the active ones win.
pub fn divergence_fixture() -> SnapshotDataset {
    let mut accounts = Vec::new();
    let mut tweets = Vec::new();
    let silent: Vec<String> = (0..3).map(|i| format!("silent{i}")).collect();
    let active: Vec<String> = (0..3).map(|i| format!("active{i}")).collect();
    let mut level1 = silent.clone();
    level1.extend(active.iter().cloned());
    accounts.push(account("root", 6, &level1));
    tweets.extend(active_tweets("root", 20, 2, 5));

    for (i, parent) in level1.iter().enumerate() {
        let children: Vec<String> = (0..3).map(|c| format!("{parent}.{c}")).collect();
        let followers = if i < 3 { 5_000_000 } else { 2_000 };
        accounts.push(account(parent, followers, &children));
        if i >= 3 {
            tweets.extend(active_tweets(parent, 40, 2, 20));
        }
        for child in &children {
            let grandchildren: Vec<String> = (0..3).map(|g| format!("{child}.{g}")).collect();
            accounts.push(account(child, 300, &grandchildren));
            tweets.extend(active_tweets(child, 30, 3, 15));
            for g in &grandchildren {
                accounts.push(account(g, 10, &[]));
                tweets.extend(active_tweets(g, 10, 5, 5));
            }
        }
    }
    SnapshotDataset::from_parts("divergence", accounts, tweets).unwrap()
}

/// Complete `branching`-ary tree of depth 3 with identical active nodes, so
/// every transmission factor is `rt`.
pub fn complete_tree(branching: usize, rt: f64) -> LayeredNetwork {
    let m = NodeMeasures {
        tcr: 4.0,
        retweet_prob: rt,
        influence: 1.0,
        followers_count: 1,
    };
    let mut net = LayeredNetwork::new(NetworkNode::account("r".into(), 0, m), RankingCategory::ByInfluence, 3).unwrap();
    let mut frontier = vec!["r".to_string()];
    for depth in 1..=3 {
        let mut next = Vec::new();
        for parent in &frontier {
            for c in 0..branching {
                let id = format!("{parent}.{c}");
                net.insert_node(NetworkNode::account(id.as_str().into(), depth, m))
                    .unwrap();
                net.insert_edge(&parent.as_str().into(), &id.as_str().into()).unwrap();
                next.push(id);
            }
        }
        frontier = next;
    }
    net.attach_sink();
    net
}
