//! Snapshot datasets: JSONL loading and saving, follower lookup and a
//! seeded synthetic generator.
//!
//! File format, one JSON object per line:
//!
//! ```text
//! # comment
//! {"kind":"account","id":"u1","handle":"@someone","followers_count":10,"following_count":3,"follower_ids":["u2"],"captured_at":"2014-01-01T00:00:00Z"}
//! {"kind":"tweet","id":"t1","author_id":"u1","created_at":"2013-12-31T10:00:00Z","retweet_count":4,"favorite_count":1,"is_retweet":false}
//! ```
//!
//! An account must be declared before any of its tweets. Accounts without
//! tweets are stubs: their counters are known but their activity is not.

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use chrono::{DateTime, Duration, TimeZone, Utc};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::account::{normalize_handle, AccountId, AccountSnapshot, TweetRecord, TweetWindow};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotDataset {
    pub dataset_id: String,
    /// Latest capture instant across all accounts.
    pub captured_at: DateTime<Utc>,
    accounts: BTreeMap<AccountId, AccountSnapshot>,
    windows: BTreeMap<AccountId, TweetWindow>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum Record {
    Account {
        id: AccountId,
        handle: String,
        followers_count: u64,
        following_count: u64,
        follower_ids: Vec<AccountId>,
        captured_at: DateTime<Utc>,
    },
    Tweet {
        id: String,
        author_id: AccountId,
        created_at: DateTime<Utc>,
        retweet_count: u64,
        favorite_count: u64,
        is_retweet: bool,
    },
}

impl SnapshotDataset {
    /// Assembles a dataset from in-memory parts, applying the same checks
    /// as the file loader.
    pub fn from_parts(
        dataset_id: impl Into<String>,
        accounts: Vec<AccountSnapshot>,
        tweets: Vec<TweetRecord>,
    ) -> Result<Self> {
        let mut builder = DatasetBuilder::default();
        for (i, account) in accounts.into_iter().enumerate() {
            builder.add_account(i + 1, account)?;
        }
        for (i, tweet) in tweets.into_iter().enumerate() {
            builder.add_tweet(i + 1, tweet)?;
        }
        builder.finish(dataset_id.into())
    }

    pub fn accounts(&self) -> impl Iterator<Item = &AccountSnapshot> {
        self.accounts.values()
    }

    pub fn account_count(&self) -> usize {
        self.accounts.len()
    }

    pub fn tweet_count(&self) -> usize {
        self.windows.values().map(TweetWindow::window_size).sum()
    }

    pub fn account(&self, id: &AccountId) -> Option<&AccountSnapshot> {
        self.accounts.get(id)
    }

    /// Tweet window of `id`; `None` for stub accounts.
    pub fn window(&self, id: &AccountId) -> Option<&TweetWindow> {
        self.windows.get(id)
    }

    pub fn is_stub(&self, id: &AccountId) -> bool {
        self.accounts.contains_key(id) && !self.windows.contains_key(id)
    }

    /// Resolves an exact account id first, then a handle (case-insensitive,
    /// optional leading `@`). Ambiguous handles resolve to the smallest id.
    pub fn resolve(&self, query: &str) -> Option<&AccountSnapshot> {
        if let Some(a) = self.accounts.get(&AccountId::from(query)) {
            return Some(a);
        }
        let wanted = normalize_handle(query);
        self.accounts.values().find(|a| normalize_handle(&a.handle) == wanted)
    }

    /// Up to `limit` follower snapshots of `account`, by ascending id.
    /// Follower ids with no account record are skipped.
    pub fn followers_of(&self, account: &AccountId, limit: usize) -> Result<Vec<&AccountSnapshot>> {
        let snapshot = self
            .accounts
            .get(account)
            .ok_or_else(|| Error::UnknownAccount(account.to_string()))?;
        // follower_ids is kept sorted, so the first hits are the smallest ids.
        Ok(snapshot
            .follower_ids
            .iter()
            .filter_map(|id| self.accounts.get(id))
            .take(limit)
            .collect())
    }

    /// Number of follower ids that point at no account record.
    pub fn unresolved_follower_count(&self) -> usize {
        self.accounts
            .values()
            .flat_map(|a| &a.follower_ids)
            .filter(|id| !self.accounts.contains_key(*id))
            .count()
    }

    /// Writes the canonical JSONL form: accounts by id, then each account's
    /// tweets newest first.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for a in self.accounts.values() {
            let record = Record::Account {
                id: a.account_id.clone(),
                handle: a.handle.clone(),
                followers_count: a.followers_count,
                following_count: a.following_count,
                follower_ids: a.follower_ids.clone(),
                captured_at: a.captured_at,
            };
            write_record(&mut out, &record)?;
        }
        for w in self.windows.values() {
            for t in w.tweets() {
                let record = Record::Tweet {
                    id: t.tweet_id.clone(),
                    author_id: t.author_id.clone(),
                    created_at: t.created_at,
                    retweet_count: t.retweet_count,
                    favorite_count: t.favorite_count,
                    is_retweet: t.is_retweet,
                };
                write_record(&mut out, &record)?;
            }
        }
        out.flush()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let io_err = |source| Error::Io {
            path: path.to_owned(),
            source,
        };
        let file = File::create(path).map_err(io_err)?;
        self.write_jsonl(BufWriter::new(file)).map_err(io_err)
    }
}

fn write_record<W: Write>(out: &mut W, record: &Record) -> std::io::Result<()> {
    serde_json::to_writer(&mut *out, record)?;
    out.write_all(b"\n")
}

#[derive(Default)]
struct DatasetBuilder {
    accounts: BTreeMap<AccountId, AccountSnapshot>,
    tweets: BTreeMap<AccountId, Vec<TweetRecord>>,
    tweet_ids: HashSet<String>,
}

impl DatasetBuilder {
    fn add_account(&mut self, line: usize, account: AccountSnapshot) -> Result<()> {
        if self.accounts.contains_key(&account.account_id) {
            return Err(Error::DuplicateAccount {
                line,
                id: account.account_id,
            });
        }
        self.accounts.insert(account.account_id.clone(), account);
        Ok(())
    }

    fn add_tweet(&mut self, line: usize, tweet: TweetRecord) -> Result<()> {
        let Some(author) = self.accounts.get(&tweet.author_id) else {
            return Err(Error::DanglingReference {
                line,
                tweet_id: tweet.tweet_id,
                author_id: tweet.author_id,
            });
        };
        if tweet.created_at > author.captured_at {
            return Err(Error::Parse {
                line,
                reason: format!(
                    "tweet {} is newer than the capture of account {}",
                    tweet.tweet_id, tweet.author_id
                ),
            });
        }
        if !self.tweet_ids.insert(tweet.tweet_id.clone()) {
            return Err(Error::Parse {
                line,
                reason: format!("tweet {} appears more than once", tweet.tweet_id),
            });
        }
        self.tweets.entry(tweet.author_id.clone()).or_default().push(tweet);
        Ok(())
    }

    fn finish(self, dataset_id: String) -> Result<SnapshotDataset> {
        let captured_at = self
            .accounts
            .values()
            .map(|a| a.captured_at)
            .max()
            .unwrap_or(DateTime::<Utc>::UNIX_EPOCH);
        let mut windows = BTreeMap::new();
        for (author, tweets) in self.tweets {
            windows.insert(author.clone(), TweetWindow::new(author, tweets)?);
        }
        Ok(SnapshotDataset {
            dataset_id,
            captured_at,
            accounts: self.accounts,
            windows,
        })
    }
}

/// Parses a JSONL dataset. Blank lines and lines starting with `#` are
/// skipped; everything else must be a well-formed record.
pub fn parse_dataset<R: BufRead>(reader: R, dataset_id: impl Into<String>) -> Result<SnapshotDataset> {
    let mut builder = DatasetBuilder::default();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::Parse {
            line: line_no,
            reason: e.to_string(),
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let record: Record = serde_json::from_str(trimmed).map_err(|e| Error::Parse {
            line: line_no,
            reason: e.to_string(),
        })?;
        match record {
            Record::Account {
                id,
                handle,
                followers_count,
                following_count,
                follower_ids,
                captured_at,
            } => {
                let account =
                    AccountSnapshot::new(id, handle, followers_count, following_count, follower_ids, captured_at)
                        .map_err(|reason| Error::Parse { line: line_no, reason })?;
                builder.add_account(line_no, account)?;
            }
            Record::Tweet {
                id,
                author_id,
                created_at,
                retweet_count,
                favorite_count,
                is_retweet,
            } => builder.add_tweet(
                line_no,
                TweetRecord {
                    tweet_id: id,
                    author_id,
                    created_at,
                    retweet_count,
                    favorite_count,
                    is_retweet,
                },
            )?,
        }
    }
    builder.finish(dataset_id.into())
}

/// Loads a dataset file; the dataset id is the file stem.
pub fn load_dataset(path: impl AsRef<Path>) -> Result<SnapshotDataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    let id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_dataset(BufReader::new(file), id)
}

/// Capture instant of every synthetic dataset.
pub fn synthetic_epoch() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2014, 1, 1, 0, 0, 0).unwrap()
}

/// Deterministic pseudo-random dataset of `accounts` accounts, each listing at
/// most `max_followers` follower ids. Roughly one account in six is a stub
/// with no tweets.
pub fn generate_synthetic(seed: u64, accounts: usize, max_followers: usize) -> SnapshotDataset {
    assert!(accounts >= 2, "a synthetic dataset needs at least two accounts");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = accounts.saturating_sub(1).to_string().len().max(5);
    let ids: Vec<AccountId> = (0..accounts).map(|i| AccountId::new(format!("u{i:0width$}"))).collect();
    let captured_at = synthetic_epoch();
    let sample_cap = max_followers.min(accounts - 1);

    let mut snapshots = Vec::with_capacity(accounts);
    let mut tweets = Vec::new();
    for (i, id) in ids.iter().enumerate() {
        let sampled = rng.gen_range(0..=sample_cap);
        let follower_ids: Vec<AccountId> = index::sample(&mut rng, accounts - 1, sampled)
            .into_iter()
            .map(|j| ids[if j >= i { j + 1 } else { j }].clone())
            .collect();
        let magnitude = rng.gen_range(0..=6u32);
        let followers_count = sampled as u64 + rng.gen_range(0..10u64.pow(magnitude));
        let following_count = rng.gen_range(0..=5_000u64);
        let snapshot = AccountSnapshot::new(
            id.clone(),
            format!("@user{i}"),
            followers_count,
            following_count,
            follower_ids,
            captured_at,
        )
        .expect("generated snapshot is valid");
        snapshots.push(snapshot);

        if rng.gen_ratio(1, 6) {
            continue;
        }
        let count = rng.gen_range(1..=100usize);
        let span_secs = rng.gen_range(3_600..=60 * 86_400i64);
        let retweet_rate: f64 = rng.gen();
        let engagement = rng.gen_range(1..=500u64);
        for j in 0..count {
            let back = rng.gen_range(0..=span_secs);
            tweets.push(TweetRecord {
                tweet_id: format!("{id}-t{j:03}"),
                author_id: id.clone(),
                created_at: captured_at - Duration::seconds(back),
                retweet_count: rng.gen_range(0..=engagement),
                favorite_count: rng.gen_range(0..=engagement),
                is_retweet: rng.gen_bool(retweet_rate),
            });
        }
    }
    SnapshotDataset::from_parts(format!("synthetic-{seed}"), snapshots, tweets)
        .expect("generated dataset is consistent")
}
