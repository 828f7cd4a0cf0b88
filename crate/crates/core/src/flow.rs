//! Integral max-flow (Dinic). Augmenting paths follow edge insertion order,
//! so the resulting flow is deterministic.

use std::collections::VecDeque;

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    cap: i64,
}

#[derive(Debug, Clone)]
pub(crate) struct FlowNetwork {
    arcs: Vec<Arc>,
    out: Vec<Vec<usize>>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        Self {
            arcs: Vec::new(),
            out: vec![Vec::new(); nodes],
        }
    }

    /// Adds `from -> to` with capacity `cap`; returns the arc id.
    pub fn add_arc(&mut self, from: usize, to: usize, cap: i64) -> usize {
        let id = self.arcs.len();
        self.arcs.push(Arc { to, cap });
        self.arcs.push(Arc { to: from, cap: 0 });
        self.out[from].push(id);
        self.out[to].push(id + 1);
        id
    }

    /// Flow currently carried by arc `id`.
    pub fn flow(&self, id: usize) -> i64 {
        self.arcs[id ^ 1].cap
    }

    pub fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let n = self.out.len();
        let mut total = 0;
        loop {
            let mut level = vec![usize::MAX; n];
            level[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for &a in &self.out[v] {
                    let w = self.arcs[a].to;
                    if self.arcs[a].cap > 0 && level[w] == usize::MAX {
                        level[w] = level[v] + 1;
                        queue.push_back(w);
                    }
                }
            }
            if level[t] == usize::MAX {
                return total;
            }
            let mut next = vec![0usize; n];
            loop {
                let pushed = self.push(s, t, i64::MAX, &level, &mut next);
                if pushed == 0 {
                    break;
                }
                total += pushed;
            }
        }
    }

    fn push(&mut self, v: usize, t: usize, limit: i64, level: &[usize], next: &mut [usize]) -> i64 {
        if v == t {
            return limit;
        }
        while next[v] < self.out[v].len() {
            let a = self.out[v][next[v]];
            let w = self.arcs[a].to;
            if self.arcs[a].cap > 0 && level[w] == level[v] + 1 {
                let got = self.push(w, t, limit.min(self.arcs[a].cap), level, next);
                if got > 0 {
                    self.arcs[a].cap -= got;
                    self.arcs[a ^ 1].cap += got;
                    return got;
                }
            }
            next[v] += 1;
        }
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classic_network() {
        // CLRS figure: max flow 23
        let mut f = FlowNetwork::new(6);
        f.add_arc(0, 1, 16);
        f.add_arc(0, 2, 13);
        f.add_arc(1, 3, 12);
        f.add_arc(2, 1, 4);
        f.add_arc(2, 4, 14);
        f.add_arc(3, 2, 9);
        f.add_arc(3, 5, 20);
        f.add_arc(4, 3, 7);
        f.add_arc(4, 5, 4);
        assert_eq!(f.max_flow(0, 5), 23);
    }

    #[test]
    fn reports_arc_flows() {
        let mut f = FlowNetwork::new(3);
        let a = f.add_arc(0, 1, 5);
        let b = f.add_arc(1, 2, 3);
        assert_eq!(f.max_flow(0, 2), 3);
        assert_eq!(f.flow(a), 3);
        assert_eq!(f.flow(b), 3);
    }
}
