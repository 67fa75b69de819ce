//! Exact group arithmetic, wreath-product embeddings, block hat actions and
//! twist-label ledgers.

pub mod blocks;
pub mod certificate;
pub mod group;
pub mod hom;
pub mod ledger;
pub mod omega;
pub mod pipeline;
pub mod wreath;
