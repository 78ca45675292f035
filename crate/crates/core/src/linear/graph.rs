use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Disjoint sets with path halving and union by size.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already connected.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}

/// Kruskal over edges visited in the given order; returns the chosen edge
/// indices or `None` when the graph is disconnected.
pub fn kruskal(vertices: usize, edges: &[(usize, usize)], order: &[usize]) -> Option<Vec<usize>> {
    let mut uf = UnionFind::new(vertices);
    let mut tree = Vec::with_capacity(vertices.saturating_sub(1));
    for &e in order {
        let (a, b) = edges[e];
        if uf.union(a, b) {
            tree.push(e);
            if tree.len() + 1 == vertices {
                break;
            }
        }
    }
    (tree.len() + 1 == vertices || vertices == 0).then_some(tree)
}

#[derive(Clone, Copy, PartialEq)]
struct HeapItem {
    dist: f64,
    vertex: usize,
}

impl Eq for HeapItem {}

impl Ord for HeapItem {
    // min-heap on (dist, vertex)
    fn cmp(&self, other: &Self) -> Ordering {
        other.dist.total_cmp(&self.dist).then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Label-setting shortest path on nonnegative arc weights. Returns the arc
/// indices of the path in travel order, or `None` if `target` is unreachable.
pub fn dijkstra(vertices: usize, arcs: &[(usize, usize)], weights: &[f64], source: usize, target: usize) -> Option<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); vertices];
    for (a, &(u, _)) in arcs.iter().enumerate() {
        out[u].push(a);
    }
    let mut dist = vec![f64::INFINITY; vertices];
    let mut pred_arc = vec![usize::MAX; vertices];
    let mut done = vec![false; vertices];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(HeapItem { dist: 0.0, vertex: source });
    while let Some(HeapItem { dist: d, vertex: u }) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        if u == target {
            break;
        }
        for &a in &out[u] {
            let v = arcs[a].1;
            let nd = d + weights[a];
            if !done[v] && nd < dist[v] {
                dist[v] = nd;
                pred_arc[v] = a;
                heap.push(HeapItem { dist: nd, vertex: v });
            }
        }
    }
    if !done[target] {
        return None;
    }
    let mut path = Vec::new();
    let mut v = target;
    while v != source {
        let a = pred_arc[v];
        path.push(a);
        v = arcs[a].0;
    }
    path.reverse();
    Some(path)
}

/// Size of a maximum matching (Kuhn's augmenting paths).
pub fn maximum_matching_size(left: usize, right: usize, edges: &[(usize, usize)]) -> usize {
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); left];
    for &(l, r) in edges {
        adj[l].push(r);
    }
    let mut match_right = vec![usize::MAX; right];
    fn augment(l: usize, adj: &[Vec<usize>], seen: &mut [bool], match_right: &mut [usize]) -> bool {
        for &r in &adj[l] {
            if !seen[r] {
                seen[r] = true;
                if match_right[r] == usize::MAX || augment(match_right[r], adj, seen, match_right) {
                    match_right[r] = l;
                    return true;
                }
            }
        }
        false
    }
    let mut size = 0;
    for l in 0..left {
        let mut seen = vec![false; right];
        if augment(l, &adj, &mut seen, &mut match_right) {
            size += 1;
        }
    }
    size
}
