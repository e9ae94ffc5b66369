//! Vertex budget shared by every explicit builder.

pub const DEFAULT_BUDGET: u64 = 1 << 22;
pub const BUDGET_ENV: &str = "MAKERFORGE_BUDGET";

/// The explicit vertex budget: `MAKERFORGE_BUDGET` when it parses as a
/// positive integer, otherwise [`DEFAULT_BUDGET`].
pub fn explicit_budget() -> u64 {
    std::env::var(BUDGET_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<u64>().ok())
        .filter(|&b| b > 0)
        .unwrap_or(DEFAULT_BUDGET)
}
