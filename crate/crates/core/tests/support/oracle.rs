//! Straightforward reference implementations used to check the optimised
//! library code. Shared by the core integration tests and the acceptance
//! runner.

#![allow(dead_code)]

use std::collections::BTreeSet;

fn sd(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0)).sqrt()
}

fn templates(xs: &[f64], len: usize, count: usize) -> Vec<&[f64]> {
    (0..count).map(|i| &xs[i..i + len]).collect()
}

fn chebyshev(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Pincus ApEn with explicit template vectors; self-matches included.
pub fn apen(xs: &[f64], m: usize, r_frac: f64) -> f64 {
    let r = r_frac * sd(xs);
    let n = xs.len();
    let phi = |len: usize| {
        let t = templates(xs, len, n - len + 1);
        let total = t.len() as f64;
        t.iter()
            .map(|a| {
                let c = t.iter().filter(|b| chebyshev(a, b) <= r).count();
                (c as f64 / total).ln()
            })
            .sum::<f64>()
            / total
    };
    phi(m) - phi(m + 1)
}

/// Richman–Moorman SampEn over the first `n - m` templates of each length;
/// `None` when either count is zero.
pub fn sampen(xs: &[f64], m: usize, r_frac: f64) -> Option<f64> {
    let r = r_frac * sd(xs);
    let n = xs.len();
    let count = |len: usize| {
        let t = templates(xs, len, n - m);
        let mut c = 0u64;
        for i in 0..t.len() {
            for j in 0..t.len() {
                if i != j && chebyshev(t[i], t[j]) <= r {
                    c += 1;
                }
            }
        }
        c / 2
    };
    let (b, a) = (count(m), count(m + 1));
    (a > 0 && b > 0).then(|| -(a as f64 / b as f64).ln())
}

/// Average linkage by recomputing every inter-cluster mean from the leaf
/// distances at each step. Returns `(left id, right id, height)` per merge
/// with the same id and tie conventions as the library.
pub fn upgma(d: &[Vec<f64>]) -> Vec<(usize, usize, f64)> {
    let n = d.len();
    let mut clusters: Vec<(usize, Vec<usize>)> = (0..n).map(|i| (i, vec![i])).collect();
    let mut out = Vec::new();
    for step in 0..n.saturating_sub(1) {
        let mut best: Option<(f64, usize, usize, usize, usize)> = None;
        for a in 0..clusters.len() {
            for b in a + 1..clusters.len() {
                let (ia, ma) = &clusters[a];
                let (ib, mb) = &clusters[b];
                let mut sum = 0.0;
                for &x in ma {
                    for &y in mb {
                        sum += d[x][y];
                    }
                }
                let h = sum / (ma.len() * mb.len()) as f64;
                let key = ((*ia).min(*ib), (*ia).max(*ib));
                let better = match best {
                    None => true,
                    Some((bh, lo, hi, _, _)) => h < bh || (h == bh && key < (lo, hi)),
                };
                if better {
                    best = Some((h, key.0, key.1, a, b));
                }
            }
        }
        let (h, lo, hi, a, b) = best.unwrap();
        let mut members = clusters[a].1.clone();
        members.extend(clusters[b].1.iter().copied());
        members.sort_unstable();
        clusters.remove(b);
        clusters.remove(a);
        clusters.push((n + step, members));
        out.push((lo, hi, h));
    }
    out
}

/// Benjamini–Hochberg via adjusted p-values `min_{j >= i} m p_(j) / j`.
pub fn bh(pvalues: &[(String, f64)], q: f64) -> BTreeSet<String> {
    let m = pvalues.len();
    let mut sorted: Vec<&(String, f64)> = pvalues.iter().collect();
    sorted.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    let mut adjusted = vec![0.0; m];
    let mut running = f64::INFINITY;
    for i in (0..m).rev() {
        running = running.min(sorted[i].1 * m as f64 / (i + 1) as f64);
        adjusted[i] = running;
    }
    sorted
        .iter()
        .zip(&adjusted)
        .filter(|(_, &a)| a <= q)
        .map(|(p, _)| p.0.clone())
        .collect()
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Convex hull area by gift wrapping plus the trapezoid rule.
pub fn hull_area(points: &[(f64, f64)]) -> f64 {
    let mut pts: Vec<(f64, f64)> = points.to_vec();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    if pts.len() < 3 {
        return 0.0;
    }
    let start = 0;
    let mut hull = vec![start];
    let mut current = start;
    loop {
        let mut candidate = (current + 1) % pts.len();
        for i in 0..pts.len() {
            let c = cross(pts[current], pts[candidate], pts[i]);
            let dist = |p: (f64, f64)| {
                (p.0 - pts[current].0).powi(2) + (p.1 - pts[current].1).powi(2)
            };
            if c < 0.0 || (c == 0.0 && dist(pts[i]) > dist(pts[candidate])) {
                candidate = i;
            }
        }
        if candidate == start {
            break;
        }
        hull.push(candidate);
        current = candidate;
        if hull.len() > pts.len() {
            break;
        }
    }
    let mut area = 0.0;
    for k in 0..hull.len() {
        let (x0, y0) = pts[hull[k]];
        let (x1, y1) = pts[hull[(k + 1) % hull.len()]];
        area += (x1 - x0) * (y1 + y0);
    }
    area.abs() / 2.0
}

/// Event rates per equally populated group, computed by assigning each
/// patient's rank to a group through the cumulative group sizes.
pub fn group_rates(values: &[f64], events: &[bool], n_group: usize) -> (Vec<usize>, Vec<f64>) {
    let n = values.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap().then(a.cmp(&b)));
    let sizes: Vec<usize> = (0..n_group)
        .map(|g| (n * (g + 1)).div_ceil(n_group).min(n) - (n * g).div_ceil(n_group).min(n))
        .collect();
    let mut sizes = sizes;
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    let mut counts = vec![0usize; n_group];
    let mut g = 0;
    let mut filled = 0;
    for &i in &idx {
        if filled == sizes[g] {
            g += 1;
            filled = 0;
        }
        filled += 1;
        if events[i] {
            counts[g] += 1;
        }
    }
    let rates = counts.iter().zip(&sizes).map(|(&c, &s)| c as f64 / s as f64).collect();
    (sizes, rates)
}
