//! Dinic's algorithm with real capacities.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

pub(crate) struct FlowGraph {
    head: Vec<usize>,
    to: Vec<usize>,
    cap: Vec<f64>,
    next: Vec<usize>,
    level: Vec<usize>,
    iter: Vec<usize>,
}

const NONE: usize = usize::MAX;
const EPS: f64 = 1e-15;

impl FlowGraph {
    pub fn new(n: usize) -> Self {
        FlowGraph {
            head: vec![NONE; n],
            to: Vec::new(),
            cap: Vec::new(),
            next: Vec::new(),
            level: vec![0; n],
            iter: vec![0; n],
        }
    }

    /// Adds an arc and returns its index; the reverse arc is `index ^ 1`.
    pub fn add_arc(&mut self, a: usize, b: usize, cap: f64) -> usize {
        let i = self.to.len();
        self.to.push(b);
        self.cap.push(cap);
        self.next.push(self.head[a]);
        self.head[a] = i;
        self.to.push(a);
        self.cap.push(0.0);
        self.next.push(self.head[b]);
        self.head[b] = i + 1;
        i
    }

    /// Flow currently on arc `i`.
    pub fn flow(&self, i: usize) -> f64 {
        self.cap[i ^ 1]
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = NONE);
        self.level[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(x) = q.pop_front() {
            let mut i = self.head[x];
            while i != NONE {
                if self.cap[i] > EPS && self.level[self.to[i]] == NONE {
                    self.level[self.to[i]] = self.level[x] + 1;
                    q.push_back(self.to[i]);
                }
                i = self.next[i];
            }
        }
        self.level[t] != NONE
    }

    fn dfs(&mut self, x: usize, t: usize, pushed: f64) -> f64 {
        if x == t {
            return pushed;
        }
        while self.iter[x] != NONE {
            let i = self.iter[x];
            let y = self.to[i];
            if self.cap[i] > EPS && self.level[y] == self.level[x] + 1 {
                let got = self.dfs(y, t, pushed.min(self.cap[i]));
                if got > 0.0 {
                    self.cap[i] -= got;
                    self.cap[i ^ 1] += got;
                    return got;
                }
            }
            self.iter[x] = self.next[i];
        }
        0.0
    }

    pub fn max_flow(&mut self, s: usize, t: usize) -> f64 {
        let mut total = 0.0;
        while self.bfs(s, t) {
            self.iter.copy_from_slice(&self.head);
            loop {
                let f = self.dfs(s, t, f64::INFINITY);
                if f <= 0.0 {
                    break;
                }
                total += f;
            }
        }
        total
    }
}
