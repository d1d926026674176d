use serde::Serialize;

use crate::error::{Error, Result};
use crate::negotiation::{Bid, UtilityFunction};

/// Player identity relative to the searching agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Side {
    Own,
    Opponent,
}

impl Side {
    pub fn other(self) -> Self {
        match self {
            Side::Own => Side::Opponent,
            Side::Opponent => Side::Own,
        }
    }

    /// Index into per-player score arrays.
    pub fn index(self) -> usize {
        match self {
            Side::Own => 0,
            Side::Opponent => 1,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TreeNode {
    /// Move leading here; `None` only at the root.
    pub bid: Option<Bid>,
    pub mover: Side,
    pub visits: u64,
    /// Cumulative utilities, indexed by [`Side::index`].
    pub score: [f64; 2],
    pub children: Vec<usize>,
    pub depth: usize,
}

impl TreeNode {
    /// Mean score for `side` with the `+1` prior visit used by selection.
    pub fn mean_score(&self, side: Side) -> f64 {
        self.score[side.index()] / (self.visits as f64 + 1.0)
    }
}

/// Arena-allocated search tree; node 0 is the root.
#[derive(Debug, Clone, Serialize)]
pub struct Tree {
    nodes: Vec<TreeNode>,
}

pub const ROOT: usize = 0;

impl Tree {
    /// Root standing for the current position; `last_mover` moved into it.
    pub fn new(last_mover: Side) -> Self {
        Self {
            nodes: vec![TreeNode { bid: None, mover: last_mover, visits: 0, score: [0.0; 2], children: Vec::new(), depth: 0 }],
        }
    }

    pub fn node(&self, id: usize) -> &TreeNode {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn root(&self) -> &TreeNode {
        &self.nodes[ROOT]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Attach a fresh child holding `bid`, moved by the side to play at `parent`.
    pub fn add_child(&mut self, parent: usize, bid: Bid) -> usize {
        let id = self.nodes.len();
        let (mover, depth) = (self.nodes[parent].mover.other(), self.nodes[parent].depth + 1);
        self.nodes.push(TreeNode { bid: Some(bid), mover, visits: 0, score: [0.0; 2], children: Vec::new(), depth });
        self.nodes[parent].children.push(id);
        id
    }

    pub fn record_visit(&mut self, path: &[usize]) {
        for id in path {
            self.nodes[*id].visits += 1;
        }
    }

    pub fn record_scores(&mut self, path: &[usize], u_self: f64, u_opp: f64) {
        for id in path {
            let s = &mut self.nodes[*id].score;
            s[Side::Own.index()] += u_self;
            s[Side::Opponent.index()] += u_opp;
        }
    }
}

/// Add one simulation's result to every node of a root-to-leaf path.
pub fn backpropagate(tree: &mut Tree, path: &[usize], u_self: f64, u_opp: f64) {
    tree.record_visit(path);
    tree.record_scores(path, u_self, u_opp);
}

/// Selection value of a child: `s/(n_i+1) + C n^alpha sqrt(ln n / (n_i+1))`,
/// with `s` the score of the child's mover.
pub fn selection_value(child: &TreeNode, n: u64, c: f64, alpha: f64) -> f64 {
    let n = n.max(1) as f64;
    let ni = child.visits as f64 + 1.0;
    child.mean_score(child.mover) + c * n.powf(alpha) * (n.ln() / ni).sqrt()
}

/// Child of `node` maximising [`selection_value`]; ties go to the lowest index.
pub fn select_child(tree: &Tree, node: usize, n: u64, c: f64, alpha: f64) -> Result<usize> {
    let children = &tree.node(node).children;
    let mut best: Option<(usize, f64)> = None;
    for &child in children {
        let w = selection_value(tree.node(child), n, c, alpha);
        if best.is_none_or(|(_, bw)| w > bw) {
            best = Some((child, w));
        }
    }
    best.map(|(id, _)| id).ok_or_else(|| Error::Search("cannot select among zero children".into()))
}

/// Root child maximising `(u(b) + s_b/(n_b+1)) / 2`; ties go to the lowest index.
pub fn choose_bid(tree: &Tree, own_ufun: &UtilityFunction) -> Result<Bid> {
    let mut best: Option<(&Bid, f64)> = None;
    for &child in &tree.root().children {
        let node = tree.node(child);
        let bid = node.bid.as_ref().expect("non-root nodes carry a bid");
        let value = (own_ufun.utility(bid)? + node.mean_score(Side::Own)) / 2.0;
        if best.is_none_or(|(_, bv)| value > bv) {
            best = Some((bid, value));
        }
    }
    best.map(|(b, _)| b.clone()).ok_or_else(|| Error::Search("search produced no candidate bid".into()))
}
