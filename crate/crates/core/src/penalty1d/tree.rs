//! Implicit treap keyed by position, augmented with subtree size and sum.

use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};

use crate::scalar::Scalar;

const NIL: usize = usize::MAX;

#[derive(Clone, Debug)]
struct Node<S> {
    val: S,
    sum: S,
    size: usize,
    prio: u64,
    left: usize,
    right: usize,
}

/// Sequence of scalars kept in caller-defined (sorted) order.
#[derive(Clone, Debug)]
pub struct OrderStatTree<S> {
    nodes: Vec<Node<S>>,
    root: usize,
    rng: SmallRng,
}

impl<S: Scalar> Default for OrderStatTree<S> {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: Scalar> OrderStatTree<S> {
    pub fn new() -> Self {
        Self::with_seed(0x5eed_7ea9)
    }

    pub fn with_seed(seed: u64) -> Self {
        OrderStatTree { nodes: Vec::new(), root: NIL, rng: SmallRng::seed_from_u64(seed) }
    }

    pub fn len(&self) -> usize {
        self.size(self.root)
    }

    pub fn is_empty(&self) -> bool {
        self.root == NIL
    }

    fn size(&self, t: usize) -> usize {
        if t == NIL {
            0
        } else {
            self.nodes[t].size
        }
    }

    fn sum_of(&self, t: usize) -> S {
        if t == NIL {
            S::zero()
        } else {
            self.nodes[t].sum.clone()
        }
    }

    fn pull(&mut self, t: usize) {
        let (l, r) = (self.nodes[t].left, self.nodes[t].right);
        let size = self.size(l) + self.size(r) + 1;
        let sum = self.sum_of(l) + self.nodes[t].val.clone() + self.sum_of(r);
        let node = &mut self.nodes[t];
        node.size = size;
        node.sum = sum;
    }

    /// First `k` elements go left.
    fn split(&mut self, t: usize, k: usize) -> (usize, usize) {
        if t == NIL {
            return (NIL, NIL);
        }
        let ls = self.size(self.nodes[t].left);
        if k <= ls {
            let (a, b) = self.split(self.nodes[t].left, k);
            self.nodes[t].left = b;
            self.pull(t);
            (a, t)
        } else {
            let (a, b) = self.split(self.nodes[t].right, k - ls - 1);
            self.nodes[t].right = a;
            self.pull(t);
            (t, b)
        }
    }

    fn merge(&mut self, a: usize, b: usize) -> usize {
        if a == NIL {
            return b;
        }
        if b == NIL {
            return a;
        }
        if self.nodes[a].prio > self.nodes[b].prio {
            let r = self.merge(self.nodes[a].right, b);
            self.nodes[a].right = r;
            self.pull(a);
            a
        } else {
            let l = self.merge(a, self.nodes[b].left);
            self.nodes[b].left = l;
            self.pull(b);
            b
        }
    }

    fn alloc(&mut self, val: S) -> usize {
        let prio = self.rng.random();
        self.nodes.push(Node { sum: val.clone(), val, size: 1, prio, left: NIL, right: NIL });
        self.nodes.len() - 1
    }

    /// Inserts so that `val` ends up at rank `k` (0-based).
    pub fn insert_at(&mut self, k: usize, val: S) {
        assert!(k <= self.len(), "insert rank out of range");
        let n = self.alloc(val);
        let (a, b) = self.split(self.root, k);
        let ab = self.merge(a, n);
        self.root = self.merge(ab, b);
    }

    pub fn push_front(&mut self, val: S) {
        self.insert_at(0, val);
    }

    pub fn push_back(&mut self, val: S) {
        let k = self.len();
        self.insert_at(k, val);
    }

    pub fn pop_first(&mut self) -> Option<S> {
        if self.root == NIL {
            return None;
        }
        let (a, b) = self.split(self.root, 1);
        self.root = b;
        Some(self.nodes[a].val.clone())
    }

    pub fn pop_last(&mut self) -> Option<S> {
        if self.root == NIL {
            return None;
        }
        let k = self.len() - 1;
        let (a, b) = self.split(self.root, k);
        self.root = a;
        Some(self.nodes[b].val.clone())
    }

    pub fn first(&self) -> Option<S> {
        let mut t = self.root;
        if t == NIL {
            return None;
        }
        while self.nodes[t].left != NIL {
            t = self.nodes[t].left;
        }
        Some(self.nodes[t].val.clone())
    }

    pub fn last(&self) -> Option<S> {
        let mut t = self.root;
        if t == NIL {
            return None;
        }
        while self.nodes[t].right != NIL {
            t = self.nodes[t].right;
        }
        Some(self.nodes[t].val.clone())
    }

    /// Number of elements `<= v`; the sequence must be sorted.
    pub fn count_le(&self, v: &S) -> usize {
        let mut t = self.root;
        let mut c = 0;
        while t != NIL {
            let node = &self.nodes[t];
            if node.val <= *v {
                c += self.size(node.left) + 1;
                t = node.right;
            } else {
                t = node.left;
            }
        }
        c
    }

    /// Number of elements `< v`; the sequence must be sorted.
    pub fn count_lt(&self, v: &S) -> usize {
        let mut t = self.root;
        let mut c = 0;
        while t != NIL {
            let node = &self.nodes[t];
            if node.val < *v {
                c += self.size(node.left) + 1;
                t = node.right;
            } else {
                t = node.left;
            }
        }
        c
    }

    /// Sum of the first `k` elements.
    pub fn prefix_sum(&self, k: usize) -> S {
        assert!(k <= self.len(), "prefix length out of range");
        let mut t = self.root;
        let mut k = k;
        let mut acc = S::zero();
        while t != NIL && k > 0 {
            let node = &self.nodes[t];
            let ls = self.size(node.left);
            if k <= ls {
                t = node.left;
            } else {
                acc = acc + self.sum_of(node.left) + node.val.clone();
                k -= ls + 1;
                t = node.right;
            }
        }
        acc
    }

    /// Sum of the last `k` elements.
    pub fn suffix_sum(&self, k: usize) -> S {
        let n = self.len();
        self.sum_of(self.root) - self.prefix_sum(n - k)
    }

    pub fn total(&self) -> S {
        self.sum_of(self.root)
    }

    pub fn get(&self, k: usize) -> Option<S> {
        let mut t = self.root;
        let mut k = k;
        while t != NIL {
            let node = &self.nodes[t];
            let ls = self.size(node.left);
            if k < ls {
                t = node.left;
            } else if k == ls {
                return Some(node.val.clone());
            } else {
                k -= ls + 1;
                t = node.right;
            }
        }
        None
    }

    pub fn to_vec(&self) -> Vec<S> {
        let mut out = Vec::with_capacity(self.len());
        let mut stack = Vec::new();
        let mut t = self.root;
        while t != NIL || !stack.is_empty() {
            while t != NIL {
                stack.push(t);
                t = self.nodes[t].left;
            }
            let u = stack.pop().unwrap();
            out.push(self.nodes[u].val.clone());
            t = self.nodes[u].right;
        }
        out
    }
}
