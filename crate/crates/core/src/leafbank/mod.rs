//! Leaf extraction, filtering and canonical alignment.
//!
//! A leaf bank is built once from annotated source images and then shared
//! read-only by both generators.

mod align;
mod annotated;
mod bank;
mod cutout;
mod filter;

pub use align::{align_canonical, prescale_longest, principal_axis};
pub use annotated::{AnnotatedImage, SubsetTag};
pub use bank::{build_naive_bank, build_structured_bank, BankBuild, LeafBank, BANK_INDEX_FILE, BANK_INDEX_HEADER};
pub use cutout::{extract_leaves, LeafCutout, SourceStats};
pub use filter::{filter_leaves, first_failure, DiscardReason, FilterReport, FilterThresholds};
