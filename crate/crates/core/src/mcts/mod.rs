//! Progressive-widening Monte-Carlo tree search over bids.
//!
//! A fresh tree is grown for every decision. Own moves are uniform bids that
//! survive pruning, opponent moves are uniform bids, and rollouts play the
//! opponent through its learned strategy and acceptance models. Every node
//! keeps cumulative utilities for both players; selection maximises the
//! score of the player to move.

mod config;
mod search;
mod tree;

pub use config::{prune_check, should_expand, MctsConfig, Pruning, PruningState};
pub use search::{expand, mcts_search, simulate, BidSampler, SearchContext, SearchModels, SearchResult};
pub use tree::{backpropagate, choose_bid, select_child, selection_value, Side, Tree, TreeNode, ROOT};
