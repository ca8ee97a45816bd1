use alloc::string::String;
use alloc::vec::Vec;

/// Benjamini–Hochberg step-up selection at level `q`: with p-values sorted
/// ascending, keeps the `k` smallest where `k` is the largest rank with
/// `p_(k) <= k q / m`. Selected names are returned in input order.
pub fn bh_fdr_select<S: AsRef<str>>(pvalues: &[(S, f64)], q: f64) -> Vec<String> {
    let m = pvalues.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| pvalues[a].1.total_cmp(&pvalues[b].1).then(a.cmp(&b)));
    let cutoff = (1..=m)
        .rev()
        .find(|&k| pvalues[order[k - 1]].1 <= k as f64 * q / m as f64)
        .unwrap_or(0);
    let mut keep: Vec<usize> = order[..cutoff].to_vec();
    keep.sort_unstable();
    keep.into_iter().map(|i| String::from(pvalues[i].0.as_ref())).collect()
}
