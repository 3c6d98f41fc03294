//! Score and comparison tables rendered as text, CSV or JSON.
//!
//! Text and CSV print reals with three decimals; JSON keeps full precision.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::Serialize;
use serde_json::{json, Value};

use crate::account::AccountSnapshot;
use crate::diffusion::{compare_networks, Winner};
use crate::error::{Error, Result};
use crate::metrics::{h_index_report, influence_metric, window_span};
use crate::network::BuildParams;
use crate::store::SnapshotDataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Text,
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "text" => Ok(OutputFormat::Text),
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown output format {other:?} (expected text, csv or json)")),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Text => "text",
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreRow {
    pub handle: String,
    pub account_id: String,
    pub influence: f64,
    pub tcr: f64,
    pub followers: u64,
    pub following: u64,
    pub retweet_h_last100: usize,
    pub favorite_h_last100: usize,
    pub retweet_h_daily: f64,
    pub favorite_h_daily: f64,
    /// Tweets in the window the scores were computed over.
    pub window_size: usize,
    /// The window spanned less than one second and was clamped up to it.
    pub span_clamped: bool,
}

fn score_account(dataset: &SnapshotDataset, account: &AccountSnapshot, as_of: DateTime<Utc>) -> Result<ScoreRow> {
    let window = dataset.window(&account.account_id).filter(|w| !w.is_empty());
    let score = influence_metric::<f64>(account, window, as_of)?;
    let (h, clamped) = match window {
        Some(w) => (
            Some(h_index_report::<f64>(w, as_of)?),
            window_span::<f64>(w, as_of)?.clamped,
        ),
        None => (None, false),
    };
    Ok(ScoreRow {
        handle: account.handle.clone(),
        account_id: account.account_id.to_string(),
        influence: score.value,
        tcr: score.tcr,
        followers: account.followers_count,
        following: account.following_count,
        retweet_h_last100: h.map_or(0, |h| h.retweet_h_last100),
        favorite_h_last100: h.map_or(0, |h| h.favorite_h_last100),
        retweet_h_daily: h.map_or(0.0, |h| h.retweet_h_daily),
        favorite_h_daily: h.map_or(0.0, |h| h.favorite_h_daily),
        window_size: window.map_or(0, |w| w.window_size()),
        span_clamped: clamped,
    })
}

/// Scores every queried account, highest influence first, ties by handle.
/// Every query must resolve; the first failure names the query.
pub fn score_rows(dataset: &SnapshotDataset, queries: &[String], as_of: DateTime<Utc>) -> Result<Vec<ScoreRow>> {
    let mut rows = queries
        .iter()
        .map(|q| {
            let account = dataset.resolve(q).ok_or_else(|| Error::UnknownAccount(q.clone()))?;
            score_account(dataset, account, as_of)
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| {
        b.influence
            .total_cmp(&a.influence)
            .then_with(|| a.handle.cmp(&b.handle))
            .then_with(|| a.account_id.cmp(&b.account_id))
    });
    Ok(rows)
}

/// One comparison block: a root evaluated under one budget.
#[derive(Debug, Clone)]
pub struct CompareBlock {
    pub user: String,
    pub root_id: String,
    pub params: BuildParams,
    pub by_influence: f64,
    pub by_followers: f64,
    pub difference: f64,
    pub winner: Winner,
    pub paths_by_influence: usize,
    pub paths_by_followers: usize,
    /// Both networks were empty (the root has no resolvable followers).
    pub empty: bool,
    pub networks: Option<(Vec<Value>, Vec<Value>)>,
}

pub fn compare_block(
    dataset: &SnapshotDataset,
    root_query: &str,
    params: BuildParams,
    as_of: DateTime<Utc>,
    with_networks: bool,
) -> Result<CompareBlock> {
    let root = dataset
        .resolve(root_query)
        .ok_or_else(|| Error::UnknownAccount(root_query.to_owned()))?;
    let cmp = compare_networks::<f64>(dataset, &root.account_id, params, as_of)?;
    Ok(CompareBlock {
        user: root.handle.clone(),
        root_id: root.account_id.to_string(),
        params,
        by_influence: cmp.result.by_influence_ttt,
        by_followers: cmp.result.by_followers_ttt,
        difference: cmp.result.difference,
        winner: cmp.result.winner,
        paths_by_influence: cmp.influence_report.path_count,
        paths_by_followers: cmp.followers_report.path_count,
        empty: cmp.by_influence.is_empty() && cmp.by_followers.is_empty(),
        networks: with_networks.then(|| (cmp.by_influence.dump_records(), cmp.by_followers.dump_records())),
    })
}

fn fixed(x: f64) -> String {
    format!("{x:.3}")
}

fn timestamp(t: DateTime<Utc>) -> String {
    t.to_rfc3339_opts(SecondsFormat::AutoSi, true)
}

const SCORE_HEADER: [&str; 9] = [
    "handle",
    "influence",
    "tcr",
    "followers",
    "following",
    "retweet_h_last100",
    "favorite_h_last100",
    "retweet_h_daily",
    "favorite_h_daily",
];

fn score_fields(r: &ScoreRow) -> [String; 9] {
    [
        r.handle.clone(),
        fixed(r.influence),
        fixed(r.tcr),
        r.followers.to_string(),
        r.following.to_string(),
        r.retweet_h_last100.to_string(),
        r.favorite_h_last100.to_string(),
        fixed(r.retweet_h_daily),
        fixed(r.favorite_h_daily),
    ]
}

pub fn write_scores<W: Write>(
    out: &mut W,
    format: OutputFormat,
    dataset: &SnapshotDataset,
    as_of: DateTime<Utc>,
    rows: &[ScoreRow],
) -> io::Result<()> {
    match format {
        OutputFormat::Text => {
            writeln!(
                out,
                "Handle\tInfluence\tTCR\tFollowers\tFollowing\tRT h-index (last 100)\tFav h-index (last 100)\tRT h-index (daily)\tFav h-index (daily)"
            )?;
            for r in rows {
                writeln!(out, "{}", score_fields(r).join("\t"))?;
            }
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(SCORE_HEADER)?;
            for r in rows {
                w.write_record(score_fields(r))?;
            }
            w.flush()?;
        }
        OutputFormat::Json => {
            let doc = json!({
                "dataset": dataset.dataset_id,
                "as_of": timestamp(as_of),
                "rows": rows,
            });
            serde_json::to_writer_pretty(&mut *out, &doc)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

const COMPARE_HEADER: [&str; 10] = [
    "followers",
    "top_k",
    "ttl",
    "user",
    "by_influence",
    "by_followers",
    "difference",
    "winner",
    "paths_by_influence",
    "paths_by_followers",
];

pub fn write_comparisons<W: Write>(
    out: &mut W,
    format: OutputFormat,
    dataset: &SnapshotDataset,
    as_of: DateTime<Utc>,
    blocks: &[CompareBlock],
) -> io::Result<()> {
    match format {
        OutputFormat::Text => {
            for (i, b) in blocks.iter().enumerate() {
                if i > 0 {
                    writeln!(out)?;
                }
                writeln!(
                    out,
                    "Followers = {}, top-k users = {}, TTL = {}",
                    b.params.n_f, b.params.k, b.params.ttl
                )?;
                writeln!(
                    out,
                    "User\tBy Influence\tBy Followers\tDifference\tWinner\tPaths (By Influence)\tPaths (By Followers)"
                )?;
                writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                    b.user,
                    fixed(b.by_influence),
                    fixed(b.by_followers),
                    fixed(b.difference),
                    b.winner.as_str(),
                    b.paths_by_influence,
                    b.paths_by_followers
                )?;
            }
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(COMPARE_HEADER)?;
            for b in blocks {
                w.write_record([
                    b.params.n_f.to_string(),
                    b.params.k.to_string(),
                    b.params.ttl.to_string(),
                    b.user.clone(),
                    fixed(b.by_influence),
                    fixed(b.by_followers),
                    fixed(b.difference),
                    b.winner.as_str().to_owned(),
                    b.paths_by_influence.to_string(),
                    b.paths_by_followers.to_string(),
                ])?;
            }
            w.flush()?;
        }
        OutputFormat::Json => {
            let blocks: Vec<Value> = blocks
                .iter()
                .map(|b| {
                    let mut v = json!({
                        "followers": b.params.n_f,
                        "top_k": b.params.k,
                        "ttl": b.params.ttl,
                        "user": b.user,
                        "root_id": b.root_id,
                        "by_influence": b.by_influence,
                        "by_followers": b.by_followers,
                        "difference": b.difference,
                        "winner": b.winner,
                        "paths_by_influence": b.paths_by_influence,
                        "paths_by_followers": b.paths_by_followers,
                    });
                    if let Some((inf, fol)) = &b.networks {
                        v["networks"] = json!({ "by_influence": inf, "by_followers": fol });
                    }
                    v
                })
                .collect();
            let doc = json!({
                "dataset": dataset.dataset_id,
                "as_of": timestamp(as_of),
                "blocks": blocks,
            });
            serde_json::to_writer_pretty(&mut *out, &doc)?;
            writeln!(out)?;
        }
    }
    Ok(())
}
