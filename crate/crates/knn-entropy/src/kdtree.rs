//! A static kd-tree for exact k-nearest-neighbor queries.
//!
//! Built once over a whole dataset, immutable afterwards, safe to query from
//! many threads. Candidate distances are always evaluated with
//! [`Metric::reduced_distance`], the same function the brute-force path uses,
//! so the two report identical distance values. Subtree pruning is slightly
//! conservative (a relative slack of 1e-12 on the bounding-box bound), which
//! can only admit extra candidates, never drop a true neighbor.

use crate::dataset::Dataset;
use crate::metric::Metric;

const LEAF_SIZE: usize = 16;
const PRUNE_SLACK: f64 = 1.0 + 1e-12;

#[derive(Debug)]
enum Node {
    Split { dim: u32, value: f64, right: u32 },
    Leaf { start: u32, len: u32 },
}

#[derive(Debug)]
pub struct KdTree<'a> {
    data: &'a Dataset,
    metric: Metric,
    nodes: Vec<Node>,
    // Point ids permuted so each leaf owns a contiguous range.
    order: Vec<u32>,
    // Per node: dim lower bounds then dim upper bounds.
    boxes: Vec<f64>,
}

impl<'a> KdTree<'a> {
    pub fn build(data: &'a Dataset, metric: Metric) -> Self {
        let n = data.n_points();
        let mut order: Vec<u32> = (0..n as u32).collect();
        let mut builder = Builder {
            data,
            nodes: Vec::with_capacity(2 * n / LEAF_SIZE + 1),
            boxes: Vec::new(),
        };
        builder.build(&mut order, 0);
        KdTree {
            data,
            metric,
            nodes: builder.nodes,
            order,
            boxes: builder.boxes,
        }
    }

    /// The `k` smallest reduced distances from `query` to points of the
    /// dataset (self-matches included if `query` is a dataset point), as
    /// `(reduced_distance, point_id)` pairs sorted ascending.
    pub fn knn(&self, query: &[f64], k: usize) -> Vec<(f64, u32)> {
        assert!(k >= 1 && k <= self.data.n_points());
        let mut heap = BoundedMaxHeap::new(k);
        self.visit(0, query, &mut heap);
        heap.into_sorted_vec()
    }

    fn visit(&self, node: u32, query: &[f64], heap: &mut BoundedMaxHeap) {
        if heap.is_full() && self.box_bound(node, query) > heap.worst() * PRUNE_SLACK {
            return;
        }
        match self.nodes[node as usize] {
            Node::Leaf { start, len } => {
                for &id in &self.order[start as usize..(start + len) as usize] {
                    let rd = self
                        .metric
                        .reduced_distance(query, self.data.point(id as usize));
                    heap.push(rd, id);
                }
            }
            Node::Split { dim, value, right } => {
                let (near, far) = if query[dim as usize] <= value {
                    (node + 1, right)
                } else {
                    (right, node + 1)
                };
                self.visit(near, query, heap);
                self.visit(far, query, heap);
            }
        }
    }

    /// Reduced distance from `query` to the node's bounding box (zero if the
    /// query lies inside it).
    fn box_bound(&self, node: u32, query: &[f64]) -> f64 {
        let d = self.data.dim();
        let base = node as usize * 2 * d;
        let lo = &self.boxes[base..base + d];
        let hi = &self.boxes[base + d..base + 2 * d];
        match self.metric {
            Metric::Euclidean => {
                let mut acc = 0.0;
                for j in 0..d {
                    let off = (lo[j] - query[j]).max(query[j] - hi[j]).max(0.0);
                    acc += off * off;
                }
                acc
            }
            Metric::Chebyshev => {
                let mut acc = 0.0;
                for j in 0..d {
                    let off = (lo[j] - query[j]).max(query[j] - hi[j]).max(0.0);
                    if off > acc {
                        acc = off;
                    }
                }
                acc
            }
        }
    }
}

struct Builder<'a> {
    data: &'a Dataset,
    nodes: Vec<Node>,
    boxes: Vec<f64>,
}

impl<'a> Builder<'a> {
    fn build(&mut self, ids: &mut [u32], offset: usize) -> u32 {
        let d = self.data.dim();
        let index = self.nodes.len() as u32;

        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for &id in ids.iter() {
            let p = self.data.point(id as usize);
            for j in 0..d {
                lo[j] = lo[j].min(p[j]);
                hi[j] = hi[j].max(p[j]);
            }
        }

        let (split_dim, extent) = (0..d)
            .map(|j| (j, hi[j] - lo[j]))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("dimension >= 1");

        self.boxes.extend_from_slice(&lo);
        self.boxes.extend_from_slice(&hi);

        // extent == 0 means all remaining points coincide; keep them in one
        // leaf so the recursion terminates.
        if ids.len() <= LEAF_SIZE || extent == 0.0 {
            self.nodes.push(Node::Leaf {
                start: offset as u32,
                len: ids.len() as u32,
            });
            return index;
        }

        let mid = ids.len() / 2;
        let coord = |id: u32| self.data.point(id as usize)[split_dim];
        ids.select_nth_unstable_by(mid, |&a, &b| coord(a).total_cmp(&coord(b)));
        let value = coord(ids[mid]);

        self.nodes.push(Node::Split {
            dim: split_dim as u32,
            value,
            right: 0,
        });
        let (left_ids, right_ids) = ids.split_at_mut(mid);
        self.build(left_ids, offset);
        let right = self.build(right_ids, offset + mid);
        match &mut self.nodes[index as usize] {
            Node::Split { right: slot, .. } => *slot = right,
            Node::Leaf { .. } => unreachable!(),
        }
        index
    }
}

/// Fixed-capacity max-heap keeping the `k` smallest (reduced distance, id)
/// pairs seen so far.
struct BoundedMaxHeap {
    k: usize,
    items: Vec<(f64, u32)>,
}

impl BoundedMaxHeap {
    fn new(k: usize) -> Self {
        Self {
            k,
            items: Vec::with_capacity(k),
        }
    }

    fn is_full(&self) -> bool {
        self.items.len() == self.k
    }

    fn worst(&self) -> f64 {
        if self.is_full() {
            self.items[0].0
        } else {
            f64::INFINITY
        }
    }

    fn push(&mut self, rd: f64, id: u32) {
        if self.items.len() < self.k {
            self.items.push((rd, id));
            let mut i = self.items.len() - 1;
            while i > 0 {
                let parent = (i - 1) / 2;
                if self.items[parent].0 < self.items[i].0 {
                    self.items.swap(parent, i);
                    i = parent;
                } else {
                    break;
                }
            }
        } else if rd < self.items[0].0 {
            self.items[0] = (rd, id);
            let mut i = 0;
            loop {
                let (l, r) = (2 * i + 1, 2 * i + 2);
                let mut largest = i;
                if l < self.items.len() && self.items[l].0 > self.items[largest].0 {
                    largest = l;
                }
                if r < self.items.len() && self.items[r].0 > self.items[largest].0 {
                    largest = r;
                }
                if largest == i {
                    break;
                }
                self.items.swap(i, largest);
                i = largest;
            }
        }
    }

    fn into_sorted_vec(self) -> Vec<(f64, u32)> {
        let mut v = self.items;
        v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        v
    }
}
