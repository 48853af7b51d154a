//! Dinic's maximum flow over an exact capacity type.

use std::collections::VecDeque;
use std::ops::{Add, Sub};

use num_traits::Zero;

#[derive(Clone, Debug)]
struct Edge<C> {
    to: usize,
    cap: C,
    /// Index of the reverse edge in `edges`.
    rev: usize,
}

#[derive(Clone, Debug)]
pub struct FlowNetwork<C> {
    adj: Vec<Vec<usize>>,
    edges: Vec<Edge<C>>,
    original: Vec<C>,
}

/// Handle to a forward edge, for reading back its flow.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeId(usize);

impl<C> FlowNetwork<C>
where
    C: Clone + Ord + Zero + Add<Output = C> + Sub<Output = C>,
{
    pub fn new(nodes: usize) -> Self {
        FlowNetwork {
            adj: vec![Vec::new(); nodes],
            edges: Vec::new(),
            original: Vec::new(),
        }
    }

    pub fn add_edge(&mut self, from: usize, to: usize, cap: C) -> EdgeId {
        let id = self.edges.len();
        self.edges.push(Edge {
            to,
            cap: cap.clone(),
            rev: id + 1,
        });
        self.edges.push(Edge {
            to: from,
            cap: C::zero(),
            rev: id,
        });
        self.original.push(cap);
        self.original.push(C::zero());
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
        EdgeId(id)
    }

    /// Flow currently routed through a forward edge.
    pub fn flow(&self, e: EdgeId) -> C {
        self.original[e.0].clone() - self.edges[e.0].cap.clone()
    }

    fn levels(&self, s: usize) -> Vec<Option<usize>> {
        let mut level = vec![None; self.adj.len()];
        level[s] = Some(0);
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            let lu = level[u].expect("queued nodes are levelled");
            for &id in &self.adj[u] {
                let e = &self.edges[id];
                if e.cap > C::zero() && level[e.to].is_none() {
                    level[e.to] = Some(lu + 1);
                    queue.push_back(e.to);
                }
            }
        }
        level
    }

    fn augment(&mut self, u: usize, t: usize, limit: C, level: &[Option<usize>], next: &mut [usize]) -> C {
        if u == t {
            return limit;
        }
        while next[u] < self.adj[u].len() {
            let id = self.adj[u][next[u]];
            let (to, cap) = (self.edges[id].to, self.edges[id].cap.clone());
            let forward = matches!((level[u], level[to]), (Some(a), Some(b)) if b == a + 1);
            if cap > C::zero() && forward {
                let pushed = self.augment(to, t, limit.clone().min(cap), level, next);
                if pushed > C::zero() {
                    let rev = self.edges[id].rev;
                    self.edges[id].cap = self.edges[id].cap.clone() - pushed.clone();
                    self.edges[rev].cap = self.edges[rev].cap.clone() + pushed.clone();
                    return pushed;
                }
            }
            next[u] += 1;
        }
        C::zero()
    }

    /// Value of a maximum `s`-`t` flow. `limit` bounds every augmenting
    /// push and must be at least the total source capacity.
    pub fn max_flow(&mut self, s: usize, t: usize, limit: C) -> C {
        let mut total = C::zero();
        loop {
            let level = self.levels(s);
            if level[t].is_none() {
                return total;
            }
            let mut next = vec![0; self.adj.len()];
            loop {
                let pushed = self.augment(s, t, limit.clone(), &level, &mut next);
                if pushed.is_zero() {
                    break;
                }
                total = total + pushed;
            }
        }
    }
}
