//! Exact bounded-Lipschitz distance by a slope-trick dynamic program.
//!
//! The supremum over 1-Lipschitz `f` with `|f| <= 1` is attained by a
//! piecewise-linear `f` with kinks at the atoms, so it is the linear program
//!
//! ```text
//! max Σ d_i f_i   s.t.  |f_{i+1} - f_i| <= x_{i+1} - x_i,   |f_i| <= 1.
//! ```
//!
//! Sweeping left to right, the best value as a function of the last `f_i`
//! is concave and piecewise linear on `[-1, 1]`. Each step dilates it by the
//! gap to the next atom and adds a linear term. Both operations are cheap
//! when the breakpoints left and right of the maximum sit in two heaps with
//! lazy offsets.

use super::{signed_difference, EmpiricalMeasure};
use crate::summation::NeumaierSum;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

#[derive(Debug, Clone, Copy)]
struct Node {
    key: f64,
    weight: f64,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.key.total_cmp(&other.key) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key.total_cmp(&other.key)
    }
}

fn clamp(x: f64) -> f64 {
    x.clamp(-1.0, 1.0)
}

/// Concave piecewise-linear value function on `[-1, 1]`.
///
/// `left` holds breakpoints where the slope drops while still positive
/// (max-heap on position, stored as `pos - off_left`); `right` holds those
/// past the maximum (max-heap on `-(pos - off_right)`).
struct ValueFunction {
    left: BinaryHeap<Node>,
    right: BinaryHeap<Node>,
    off_left: f64,
    off_right: f64,
    max: f64,
}

impl ValueFunction {
    fn new() -> Self {
        Self {
            left: BinaryHeap::new(),
            right: BinaryHeap::new(),
            off_left: 0.0,
            off_right: 0.0,
            max: 0.0,
        }
    }

    fn left_pos(&self, n: &Node) -> f64 {
        clamp(n.key + self.off_left)
    }

    fn right_pos(&self, n: &Node) -> f64 {
        clamp(-n.key + self.off_right)
    }

    fn push_left(&mut self, pos: f64, weight: f64) {
        self.left.push(Node {
            key: pos - self.off_left,
            weight,
        });
    }

    fn push_right(&mut self, pos: f64, weight: f64) {
        self.right.push(Node {
            key: -(pos - self.off_right),
            weight,
        });
    }

    /// `V(y) <- max_{|z-y|<=g} V(z)`.
    fn dilate(&mut self, g: f64) {
        self.off_left -= g;
        self.off_right += g;
    }

    /// `V(y) <- V(y) + d y`, walking the maximum to its new location.
    fn add_linear(&mut self, d: f64) {
        if d > 0.0 {
            let mut c = self.right.peek().map_or(1.0, |n| self.right_pos(n));
            let mut val = self.max + d * c;
            let mut slope = d;
            while slope > 0.0 {
                let Some(node) = self.right.pop() else {
                    val += slope * (1.0 - c);
                    self.push_left(1.0, slope);
                    break;
                };
                let r = self.right_pos(&node);
                val += slope * (r - c);
                c = r;
                if node.weight <= slope {
                    slope -= node.weight;
                    self.push_left(r, node.weight);
                } else {
                    self.push_left(r, slope);
                    self.right.push(Node {
                        key: node.key,
                        weight: node.weight - slope,
                    });
                    slope = 0.0;
                }
            }
            self.max = val;
        } else if d < 0.0 {
            let mut c = self.left.peek().map_or(-1.0, |n| self.left_pos(n));
            let mut val = self.max + d * c;
            let mut slope = -d;
            while slope > 0.0 {
                let Some(node) = self.left.pop() else {
                    val += slope * (c + 1.0);
                    self.push_right(-1.0, slope);
                    break;
                };
                let l = self.left_pos(&node);
                val += slope * (c - l);
                c = l;
                if node.weight <= slope {
                    slope -= node.weight;
                    self.push_right(l, node.weight);
                } else {
                    self.push_right(l, slope);
                    self.left.push(Node {
                        key: node.key,
                        weight: node.weight - slope,
                    });
                    slope = 0.0;
                }
            }
            self.max = val;
        }
    }
}

/// Solves the chain LP for sorted `pos` and signed masses `diff`.
pub(crate) fn bl_chain(pos: &[f64], diff: &[f64]) -> f64 {
    let mut v = ValueFunction::new();
    for i in 0..pos.len() {
        if i > 0 {
            v.dilate(pos[i] - pos[i - 1]);
        }
        v.add_linear(diff[i]);
    }
    v.max.max(0.0)
}

/// `sup |∫f dμ - ∫f dν|` over `f` with `|f| <= 1` and Lipschitz constant 1.
pub fn bl_distance(mu: &EmpiricalMeasure, nu: &EmpiricalMeasure) -> f64 {
    let (pos, diff) = signed_difference(mu, nu);
    bl_chain(&pos, &diff)
}

/// `W₁(μ, ν) = ∫ |F_μ - F_ν|`; the same LP without the box constraint.
pub fn w1_distance(mu: &EmpiricalMeasure, nu: &EmpiricalMeasure) -> f64 {
    let (pos, diff) = signed_difference(mu, nu);
    let mut cum = NeumaierSum::new();
    let mut total = NeumaierSum::new();
    for i in 0..pos.len().saturating_sub(1) {
        cum.add(diff[i]);
        total.add(cum.value().abs() * (pos[i + 1] - pos[i]));
    }
    total.value()
}
