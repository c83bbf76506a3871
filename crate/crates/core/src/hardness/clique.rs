//! Maximum clique by branch and bound with a greedy-coloring bound, on bitsets.

#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn empty(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn clear(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    fn first(&self) -> Option<usize> {
        self.0
            .iter()
            .position(|&w| w != 0)
            .map(|wi| wi * 64 + self.0[wi].trailing_zeros() as usize)
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }
}

struct Search {
    adj: Vec<Bits>,
    best: Vec<usize>,
    nodes: u64,
    node_budget: u64,
}

impl Search {
    /// Greedy coloring of `p`: vertices in color order with their color numbers.
    fn color(&self, p: &Bits) -> (Vec<usize>, Vec<usize>) {
        let mut order = Vec::new();
        let mut colors = Vec::new();
        let mut uncolored = p.clone();
        let mut k = 0;
        while !uncolored.is_empty() {
            k += 1;
            let mut q = uncolored.clone();
            while let Some(v) = q.first() {
                q.clear(v);
                uncolored.clear(v);
                order.push(v);
                colors.push(k);
                for (wi, w) in q.0.iter_mut().enumerate() {
                    *w &= !self.adj[v].0[wi];
                }
            }
        }
        (order, colors)
    }

    /// Returns false when the node budget ran out.
    fn expand(&mut self, current: &mut Vec<usize>, mut p: Bits) -> bool {
        self.nodes += 1;
        if self.nodes > self.node_budget {
            return false;
        }
        let (order, colors) = self.color(&p);
        for idx in (0..order.len()).rev() {
            if current.len() + colors[idx] <= self.best.len() {
                return true;
            }
            let v = order[idx];
            current.push(v);
            let np = p.and(&self.adj[v]);
            if np.is_empty() {
                if current.len() > self.best.len() {
                    self.best = current.clone();
                }
            } else if !self.expand(current, np) {
                return false;
            }
            current.pop();
            p.clear(v);
        }
        true
    }
}

/// Maximum clique of the graph on `0..n` with adjacency `adj`, seeded with the
/// known clique `initial`. `None` when more than `node_budget` search nodes are needed.
pub fn maximum_clique(
    n: usize,
    adj: impl Fn(usize, usize) -> bool,
    initial: Vec<usize>,
    node_budget: u64,
) -> Option<Vec<usize>> {
    if n == 0 {
        return Some(Vec::new());
    }
    let mut rows = vec![Bits::empty(n); n];
    for u in 0..n {
        for v in u + 1..n {
            if adj(u, v) {
                rows[u].set(v);
                rows[v].set(u);
            }
        }
    }
    let mut all = Bits::empty(n);
    for v in 0..n {
        all.set(v);
    }
    let mut search = Search {
        adj: rows,
        best: if initial.is_empty() { vec![0] } else { initial },
        nodes: 0,
        node_budget,
    };
    let mut current = Vec::new();
    if search.expand(&mut current, all) {
        let mut best = search.best;
        best.sort_unstable();
        Some(best)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_and_complete_graphs() {
        // C5 has clique number 2, K4 has 4
        let c5 = |u: usize, v: usize| (u + 1) % 5 == v || (v + 1) % 5 == u;
        assert_eq!(maximum_clique(5, c5, vec![], 1000).unwrap().len(), 2);
        assert_eq!(maximum_clique(4, |u, v| u != v, vec![], 1000).unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(maximum_clique(3, |_, _| false, vec![], 1000).unwrap().len(), 1);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        assert!(maximum_clique(40, |u, v| (u ^ v) % 3 != 0, vec![], 1).is_none());
    }
}
