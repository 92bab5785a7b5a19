//! Comparison algorithms and exact oracles.

mod claim1;
mod exact;
mod fit;
mod reverse;

pub use claim1::claim1_instance;
pub use exact::{exact_bruteforce, ExactLimits, ExactResult};
pub use fit::{average_fit, largest_fit};
pub use reverse::reverse;
