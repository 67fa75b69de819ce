//! Blocks as rooted slot-trees with hat actions on their leaves.

mod action;
mod constructions;
mod tree;

use thiserror::Error;

use crate::group::GroupError;

pub use action::{check_p1_p2, ActElem, ActionGroup, CheckOptions, Mode, P1P2Report, ShadowAction, ACTION_LAW_PAIRS, DEFAULT_WINDOW};
pub use constructions::*;
pub use tree::{glue_block, Block, Cell, Count, LeafAddr, Slots, LEAF_ENUM_CAP};

#[derive(Debug, Error)]
pub enum BlockError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("slot {0} is already glued")]
    SlotNotOpen(String),
    #[error("{0} is not a leaf address")]
    NotALeaf(String),
    #[error("too many leaves to enumerate ({0})")]
    TooManyLeaves(String),
    #[error("invalid action: {0}")]
    InvalidAction(String),
    #[error("the top action has no certified (P2) witness")]
    MissingP2,
    #[error("(P1) fails: {0}")]
    P1NotCertified(String),
    #[error("orbit map of {0} cannot be inverted")]
    NonInvertibleOrbit(String),
    #[error("no element range for {0}; supply elements explicitly")]
    RangeUnavailable(String),
    #[error("block document: {0}")]
    Document(String),
    #[error("internal error: {0}")]
    Internal(String),
}
