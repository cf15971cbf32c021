//! File formats and shared helpers for the `doall` binary.

pub mod format;

use anyhow::bail;
use doall_core::scheduling::{PolicyKind, SchedulerPolicy};

/// Maps the `--policy` flag values `mrs`, `rs`, `det`.
pub fn parse_policy(s: &str) -> anyhow::Result<SchedulerPolicy> {
    Ok(match s {
        "mrs" => SchedulerPolicy::modified_rs(),
        "rs" => SchedulerPolicy::eligible_rs(),
        "det" => SchedulerPolicy::lowest_label_det(),
        other => bail!("unknown policy {other:?} (expected mrs, rs, or det)"),
    })
}

pub fn policy_name(kind: PolicyKind) -> &'static str {
    match kind {
        PolicyKind::ModifiedRs => "mrs",
        PolicyKind::EligibleRs => "rs",
        PolicyKind::LowestLabelDet => "det",
    }
}
