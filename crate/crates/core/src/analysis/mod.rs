//! Histograms, coincidence filtering, visibility, fringe fitting and node
//! finding.

pub mod coincidence;
pub mod fit;
pub mod nodes;
pub mod visibility;

pub use coincidence::{
    coincidence_filter, coincidence_filter_with_delay, match_coincidences, CoincidenceWindow,
};
pub use fit::{fit_fringe, fringe_model, FringeFit};
pub use nodes::{find_nodes, find_nodes_with_threshold, DEFAULT_NODE_THRESHOLD};
pub use visibility::{central_region, fringe_visibility, visibility};

use crate::detection::ClickEvent;

/// Counts clicks per bin; clicks with `bin >= n_bins` are ignored.
pub fn histogram(clicks: &[ClickEvent], n_bins: usize) -> Vec<u64> {
    let mut counts = vec![0u64; n_bins];
    for c in clicks {
        if let Some(slot) = counts.get_mut(c.bin) {
            *slot += 1;
        }
    }
    counts
}
