//! Per-account scoring: tweet creation rate, the influence metric and the
//! retweet/favorite h-index family.
//!
//! The influence metric is
//!
//! ```text
//! influence = tcr × oom(followers) × log10(followers / max(following, 1) + 1)
//! ```
//!
//! where `tcr` is tweets per day over the latest (up to 100) tweets and
//! `oom(n) = 10^floor(log10 n)`, with `oom(0) = 0`.
//!
//! The "daily" h-indexes divide by the time span covered by the tweet window
//! rather than by the account's age: only the window is ever ingested. An
//! account-lifespan denominator would need the creation date of the account,
//! which snapshots do not carry.

use chrono::{DateTime, Utc};
use serde::Serialize;

use crate::account::{AccountSnapshot, TweetWindow};
use crate::error::{Error, Result};
use crate::num::{cast, Scalar, SECONDS_PER_DAY};

/// The time covered by a tweet window, in fractional days.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowSpan<F> {
    pub days: F,
    /// The raw span was shorter than one second and was clamped up to it.
    pub clamped: bool,
}

/// Influence metric value with its three factors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InfluenceScore<F> {
    pub tcr: F,
    pub oom_followers: F,
    pub ftf_factor: F,
    pub value: F,
}

impl<F: Scalar> InfluenceScore<F> {
    fn from_factors(tcr: F, oom_followers: F, ftf_factor: F) -> Self {
        InfluenceScore {
            tcr,
            oom_followers,
            ftf_factor,
            value: tcr * oom_followers * ftf_factor,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HIndexReport<F> {
    pub retweet_h_last100: usize,
    pub favorite_h_last100: usize,
    pub retweet_h_daily: F,
    pub favorite_h_daily: F,
    pub span_days: F,
}

/// Span from the oldest tweet in `window` to `as_of`, clamped below at one
/// second.
pub fn window_span<F: Scalar>(window: &TweetWindow, as_of: DateTime<Utc>) -> Result<WindowSpan<F>> {
    let newest = window.newest().ok_or(Error::EmptyWindow)?;
    if newest.created_at > as_of {
        return Err(Error::ClockSkew {
            tweet_id: newest.tweet_id.clone(),
            as_of: as_of.to_rfc3339(),
        });
    }
    let oldest = window.oldest().ok_or(Error::EmptyWindow)?;
    let elapsed = as_of - oldest.created_at;
    let seconds = cast::<F, _>(elapsed.num_seconds()) + cast::<F, _>(elapsed.subsec_nanos()) / cast(1_000_000_000u32);
    let days = seconds / cast(SECONDS_PER_DAY);
    let floor = F::one_second_in_days();
    Ok(if days < floor {
        WindowSpan {
            days: floor,
            clamped: true,
        }
    } else {
        WindowSpan { days, clamped: false }
    })
}

/// Tweets per day over the window. Retweets count like original tweets.
pub fn compute_tcr<F: Scalar>(window: &TweetWindow, as_of: DateTime<Utc>) -> Result<F> {
    let span = window_span::<F>(window, as_of)?;
    Ok(cast::<F, _>(window.window_size()) / span.days)
}

/// `10^floor(log10 n)` for `n ≥ 1`, and 0 for `n = 0`.
///
/// Computed on integers so exact powers of ten never fall a decade short.
pub fn order_of_magnitude<F: Scalar>(n: u64) -> F {
    if n == 0 {
        return F::zero();
    }
    let mut power: u64 = 1;
    while let Some(next) = power.checked_mul(10) {
        if next > n {
            break;
        }
        power = next;
    }
    cast(power)
}

/// `log10(followers / max(following, 1) + 1)`.
pub fn ftf_factor<F: Scalar>(followers: u64, following: u64) -> F {
    let ratio = cast::<F, _>(followers) / cast::<F, _>(following.max(1));
    (ratio + F::one()).log10()
}

/// Influence metric from already-known counters and creation rate.
pub fn influence_from_parts<F: Scalar>(tcr: F, followers: u64, following: u64) -> InfluenceScore<F> {
    InfluenceScore::from_factors(tcr, order_of_magnitude(followers), ftf_factor(followers, following))
}

/// Influence metric of an account. A missing or empty window gives
/// `tcr = 0` and therefore a zero score.
pub fn influence_metric<F: Scalar>(
    snapshot: &AccountSnapshot,
    window: Option<&TweetWindow>,
    as_of: DateTime<Utc>,
) -> Result<InfluenceScore<F>> {
    let tcr = match window {
        Some(w) if w.author_id() != &snapshot.account_id => {
            return Err(Error::AccountMismatch {
                snapshot: snapshot.account_id.clone(),
                window: w.author_id().clone(),
            })
        }
        Some(w) if !w.is_empty() => compute_tcr(w, as_of)?,
        _ => F::zero(),
    };
    Ok(influence_from_parts(
        tcr,
        snapshot.followers_count,
        snapshot.following_count,
    ))
}

/// Largest `h` such that at least `h` of `counts` are `≥ h`.
pub fn h_index(counts: &[u64]) -> usize {
    let mut sorted = counts.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    // sorted[i] > i holds exactly on a prefix of the descending list.
    sorted.iter().enumerate().take_while(|&(i, &c)| c > i as u64).count()
}

pub fn h_index_report<F: Scalar>(window: &TweetWindow, as_of: DateTime<Utc>) -> Result<HIndexReport<F>> {
    let span = window_span::<F>(window, as_of)?;
    let retweets: Vec<u64> = window.tweets().iter().map(|t| t.retweet_count).collect();
    let favorites: Vec<u64> = window.tweets().iter().map(|t| t.favorite_count).collect();
    let retweet_h = h_index(&retweets);
    let favorite_h = h_index(&favorites);
    Ok(HIndexReport {
        retweet_h_last100: retweet_h,
        favorite_h_last100: favorite_h,
        retweet_h_daily: cast::<F, _>(retweet_h) / span.days,
        favorite_h_daily: cast::<F, _>(favorite_h) / span.days,
        span_days: span.days,
    })
}

/// Fraction of the window made of retweets; the per-account retweet
/// probability used by tweet transmission.
pub fn retweet_probability<F: Scalar>(window: &TweetWindow) -> Result<F> {
    if window.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let retweets = window.tweets().iter().filter(|t| t.is_retweet).count();
    Ok(cast::<F, _>(retweets) / cast::<F, _>(window.window_size()))
}
