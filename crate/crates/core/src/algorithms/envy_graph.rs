use crate::model::{Instance, Kind};
use crate::numeric::Scalar;

/// Directed graph with an edge `i -> j` when `i` has weighted envy towards `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnvyGraph {
    adj: Vec<Vec<bool>>,
}

/// Builds the envy graph of a possibly partial owner map; `None` items are
/// ignored.
pub fn envy_graph<S: Scalar>(inst: &Instance<S>, owners: &[Option<usize>]) -> EnvyGraph {
    let mut bundles = vec![Vec::new(); inst.n()];
    for (g, o) in owners.iter().enumerate() {
        if let Some(a) = o {
            bundles[*a].push(g);
        }
    }
    EnvyGraph::of_bundles(inst, &bundles)
}

impl EnvyGraph {
    pub(crate) fn of_bundles<S: Scalar>(inst: &Instance<S>, bundles: &[Vec<usize>]) -> Self {
        let n = inst.n();
        let mut adj = vec![vec![false; n]; n];
        for i in 0..n {
            let own = inst.value_of(i, &bundles[i]);
            for j in (0..n).filter(|&j| j != i) {
                let other = inst.value_of(i, &bundles[j]);
                // own / w_i  vs  other / w_j, cross-multiplied (weights > 0)
                let lhs = own.clone() * inst.weight(j).clone();
                let rhs = other * inst.weight(i).clone();
                adj[i][j] = match inst.kind() {
                    Kind::Goods => lhs < rhs,
                    Kind::Chores => lhs > rhs,
                };
            }
        }
        EnvyGraph { adj }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.adj[from][to]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| self.adj[i][j]).collect()
    }

    /// Agents nobody envies, in index order.
    pub fn sources(&self) -> Vec<usize> {
        (0..self.n()).filter(|&j| (0..self.n()).all(|i| !self.adj[i][j])).collect()
    }

    /// Some directed cycle `c0 -> c1 -> ... -> c0`, found by depth-first
    /// search from the lowest index.
    pub fn find_cycle(&self) -> Option<Vec<usize>> {
        let n = self.n();
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut state = vec![0u8; n];
        let mut stack: Vec<(usize, usize)> = Vec::new();
        for root in 0..n {
            if state[root] != 0 {
                continue;
            }
            state[root] = 1;
            stack.push((root, 0));
            while let Some(&mut (v, ref mut next)) = stack.last_mut() {
                if let Some(w) = (*next..n).find(|&w| self.adj[v][w]) {
                    *next = w + 1;
                    match state[w] {
                        0 => {
                            state[w] = 1;
                            stack.push((w, 0));
                        }
                        1 => {
                            let start = stack.iter().position(|&(u, _)| u == w).expect("on stack");
                            return Some(stack[start..].iter().map(|&(u, _)| u).collect());
                        }
                        _ => {}
                    }
                } else {
                    state[v] = 2;
                    stack.pop();
                }
            }
        }
        None
    }

    pub fn is_acyclic(&self) -> bool {
        self.find_cycle().is_none()
    }
}
