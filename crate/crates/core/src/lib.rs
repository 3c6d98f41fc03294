//! Influence scoring and tweet-transmission diffusion analysis for
//! microblogging follower graphs captured as offline snapshots.
//!
//! The math is generic over [`Scalar`] (`f32` or `f64`); the aliases at the
//! crate root fix it to `f64`.

pub mod account;
pub mod diffusion;
pub mod error;
pub mod metrics;
pub mod network;
pub mod num;
pub mod report;
pub mod store;

pub use account::{AccountId, AccountSnapshot, TweetRecord, TweetWindow, WINDOW_CAPACITY};
pub use diffusion::{
    compare_networks, diffusion_report, enumerate_paths, total_tweet_transmission, tweet_transmission, Winner,
};
pub use error::{Error, Result};
pub use metrics::{compute_tcr, h_index, h_index_report, influence_metric, order_of_magnitude, retweet_probability};
pub use network::{build_network, rank_followers, BuildParams, Candidate, Layer, NetworkEdge, NodeId, RankingCategory};
pub use num::Scalar;
pub use store::{generate_synthetic, load_dataset, parse_dataset, SnapshotDataset};

pub type InfluenceScore = metrics::InfluenceScore<f64>;
pub type HIndexReport = metrics::HIndexReport<f64>;
pub type WindowSpan = metrics::WindowSpan<f64>;
pub type NetworkNode = network::NetworkNode<f64>;
pub type NodeMeasures = network::NodeMeasures<f64>;
pub type LayeredNetwork = network::LayeredNetwork<f64>;
pub type TransmissionPath = diffusion::TransmissionPath<f64>;
pub type DiffusionReport = diffusion::DiffusionReport<f64>;
pub type ComparisonResult = diffusion::ComparisonResult<f64>;
pub type NetworkComparison = diffusion::NetworkComparison<f64>;
