//! Opt-in expensive self-checks, enabled by `MANYMATCH_DEBUG=1`.

use std::sync::OnceLock;

pub const ENV_VAR: &str = "MANYMATCH_DEBUG";

pub fn enabled() -> bool {
    static FLAG: OnceLock<bool> = OnceLock::new();
    *FLAG.get_or_init(|| {
        std::env::var(ENV_VAR)
            .map(|v| !v.is_empty() && v != "0")
            .unwrap_or(false)
    })
}
