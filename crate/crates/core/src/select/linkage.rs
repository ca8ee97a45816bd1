//! Average-linkage (UPGMA) agglomerative clustering.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::SelectionError;
use crate::math::SquareMatrix;

/// One agglomeration step. Cluster ids follow the usual convention: leaves
/// are `0..n`, the cluster created by merge `s` is `n + s`.
#[derive(Clone, Debug, PartialEq)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    /// Mean leaf-to-leaf distance between the two merged clusters.
    pub height: f64,
    pub size: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dendrogram {
    pub leaves: Vec<String>,
    pub merges: Vec<Merge>,
}

impl Dendrogram {
    pub fn n_leaves(&self) -> usize {
        self.leaves.len()
    }

    pub fn heights(&self) -> Vec<f64> {
        self.merges.iter().map(|m| m.height).collect()
    }

    /// Leaf indices in dendrogram drawing order.
    pub fn leaf_order(&self) -> Vec<usize> {
        let n = self.n_leaves();
        if n == 0 {
            return Vec::new();
        }
        if self.merges.is_empty() {
            return (0..n).collect();
        }
        let mut out = Vec::with_capacity(n);
        let mut stack = vec![n + self.merges.len() - 1];
        while let Some(id) = stack.pop() {
            if id < n {
                out.push(id);
            } else {
                let m = &self.merges[id - n];
                stack.push(m.right);
                stack.push(m.left);
            }
        }
        out
    }
}

struct Active {
    id: usize,
    size: usize,
}

/// Merges, at each step, the pair of clusters with the smallest mean
/// inter-cluster distance. Ties go to the pair with the lexicographically
/// smallest `(min id, max id)`. Inter-cluster distance sums are carried
/// forward by addition, so heights are exact sums divided by size products.
pub fn average_linkage<S: AsRef<str>>(
    dist: &SquareMatrix,
    names: &[S],
) -> Result<Dendrogram, SelectionError> {
    let n = dist.dim();
    if names.len() != n {
        return Err(SelectionError::InvalidDistances);
    }
    if dist.as_slice().iter().any(|d| !d.is_finite() || *d < 0.0) {
        return Err(SelectionError::InvalidDistances);
    }
    let mut sums = dist.clone();
    let mut slots: Vec<Option<Active>> = (0..n).map(|i| Some(Active { id: i, size: 1 })).collect();
    let mut merges = Vec::with_capacity(n.saturating_sub(1));
    for step in 0..n.saturating_sub(1) {
        let mut best: Option<(f64, (usize, usize), usize, usize)> = None;
        for i in 0..n {
            let Some(a) = &slots[i] else { continue };
            for j in i + 1..n {
                let Some(b) = &slots[j] else { continue };
                let avg = sums.get(i, j) / (a.size * b.size) as f64;
                let key = (a.id.min(b.id), a.id.max(b.id));
                let better = match best {
                    None => true,
                    Some((h, k, _, _)) => avg < h || (avg == h && key < k),
                };
                if better {
                    best = Some((avg, key, i, j));
                }
            }
        }
        let (height, (lo, hi), i, j) = best.expect("at least two active clusters");
        let size = slots[i].as_ref().unwrap().size + slots[j].as_ref().unwrap().size;
        for k in 0..n {
            if k != i && k != j && slots[k].is_some() {
                let s = sums.get(i, k) + sums.get(j, k);
                sums.set(i, k, s);
                sums.set(k, i, s);
            }
        }
        slots[i] = Some(Active { id: n + step, size });
        slots[j] = None;
        merges.push(Merge {
            left: lo,
            right: hi,
            height,
            size,
        });
    }
    Ok(Dendrogram {
        leaves: names.iter().map(|s| String::from(s.as_ref())).collect(),
        merges,
    })
}

/// Cluster label per leaf after applying the first `n - k` merges. Labels
/// are numbered by each cluster's smallest leaf index.
pub fn cut_tree(d: &Dendrogram, k: usize) -> Result<Vec<usize>, SelectionError> {
    let n = d.n_leaves();
    if k < 1 || k > n {
        return Err(SelectionError::InvalidCut { k, leaves: n });
    }
    // Representative leaf per cluster id, via union-find over leaves.
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut leaf_of_id: Vec<usize> = (0..n).collect();
    for m in d.merges.iter().take(n - k) {
        let a = root(&mut parent, leaf_of_id[m.left]);
        let b = root(&mut parent, leaf_of_id[m.right]);
        let (lo, hi) = (a.min(b), a.max(b));
        parent[hi] = lo;
        leaf_of_id.push(lo);
    }
    let mut label_of_root = vec![usize::MAX; n];
    let mut next = 0;
    let mut labels = vec![0; n];
    for leaf in 0..n {
        let r = root(&mut parent, leaf);
        if label_of_root[r] == usize::MAX {
            label_of_root[r] = next;
            next += 1;
        }
        labels[leaf] = label_of_root[r];
    }
    Ok(labels)
}

/// Groups leaf indices by label.
pub fn clusters_from_labels(labels: &[usize]) -> Vec<Vec<usize>> {
    let k = labels.iter().copied().max().map_or(0, |m| m + 1);
    let mut out = vec![Vec::new(); k];
    for (leaf, &l) in labels.iter().enumerate() {
        out[l].push(leaf);
    }
    out
}
