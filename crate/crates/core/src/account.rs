//! Account profiles and recent-tweet windows as captured in a snapshot.

use std::collections::HashSet;
use std::fmt;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Maximum number of recent tweets kept per account.
pub const WINDOW_CAPACITY: usize = 100;

/// Opaque account identifier. Ordering is plain string ordering.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AccountId(String);

impl AccountId {
    pub fn new(id: impl Into<String>) -> Self {
        AccountId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for AccountId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for AccountId {
    fn from(s: &str) -> Self {
        AccountId(s.to_owned())
    }
}

/// Profile counters of one account plus the follower ids seen at capture.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AccountSnapshot {
    pub account_id: AccountId,
    pub handle: String,
    pub followers_count: u64,
    pub following_count: u64,
    /// Possibly truncated sample of follower ids, sorted ascending.
    pub follower_ids: Vec<AccountId>,
    pub captured_at: DateTime<Utc>,
}

impl AccountSnapshot {
    /// Builds a snapshot, sorting `follower_ids` and checking that the sample
    /// has no duplicates, no self reference and does not exceed the counter.
    pub fn new(
        account_id: AccountId,
        handle: impl Into<String>,
        followers_count: u64,
        following_count: u64,
        mut follower_ids: Vec<AccountId>,
        captured_at: DateTime<Utc>,
    ) -> Result<Self, String> {
        follower_ids.sort();
        if follower_ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(format!("account {account_id} lists a follower twice"));
        }
        if follower_ids.binary_search(&account_id).is_ok() {
            return Err(format!("account {account_id} lists itself as a follower"));
        }
        if follower_ids.len() as u64 > followers_count {
            return Err(format!(
                "account {account_id} lists {} follower ids but followers_count is {followers_count}",
                follower_ids.len()
            ));
        }
        Ok(AccountSnapshot {
            account_id,
            handle: handle.into(),
            followers_count,
            following_count,
            follower_ids,
            captured_at,
        })
    }

    /// Case-insensitive handle match, ignoring a leading `@` on either side.
    pub fn handle_matches(&self, query: &str) -> bool {
        normalize_handle(&self.handle) == normalize_handle(query)
    }
}

pub(crate) fn normalize_handle(handle: &str) -> String {
    handle.trim().trim_start_matches('@').to_lowercase()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TweetRecord {
    pub tweet_id: String,
    pub author_id: AccountId,
    pub created_at: DateTime<Utc>,
    pub retweet_count: u64,
    pub favorite_count: u64,
    /// Set when the tweet reposts another account's tweet.
    pub is_retweet: bool,
}

/// The latest tweets of one account, newest first, at most
/// [`WINDOW_CAPACITY`] of them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TweetWindow {
    author_id: AccountId,
    tweets: Vec<TweetRecord>,
}

impl TweetWindow {
    /// Orders `tweets` newest first (ties by ascending tweet id) and keeps
    /// the newest hundred.
    pub fn new(author_id: AccountId, mut tweets: Vec<TweetRecord>) -> Result<Self> {
        if let Some(t) = tweets.iter().find(|t| t.author_id != author_id) {
            return Err(Error::InvalidWindow(format!(
                "tweet {} is authored by {}, not {author_id}",
                t.tweet_id, t.author_id
            )));
        }
        let mut seen = HashSet::with_capacity(tweets.len());
        if let Some(t) = tweets.iter().find(|t| !seen.insert(t.tweet_id.as_str())) {
            return Err(Error::InvalidWindow(format!(
                "tweet {} appears more than once",
                t.tweet_id
            )));
        }
        tweets.sort_by(|a, b| {
            b.created_at
                .cmp(&a.created_at)
                .then_with(|| a.tweet_id.cmp(&b.tweet_id))
        });
        tweets.truncate(WINDOW_CAPACITY);
        Ok(TweetWindow { author_id, tweets })
    }

    pub fn author_id(&self) -> &AccountId {
        &self.author_id
    }

    pub fn tweets(&self) -> &[TweetRecord] {
        &self.tweets
    }

    pub fn window_size(&self) -> usize {
        self.tweets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tweets.is_empty()
    }

    pub fn oldest(&self) -> Option<&TweetRecord> {
        self.tweets.last()
    }

    pub fn newest(&self) -> Option<&TweetRecord> {
        self.tweets.first()
    }
}
