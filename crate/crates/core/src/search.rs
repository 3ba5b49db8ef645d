//! Lexicographic depth-first search over product spaces of per-edge choices.
//!
//! Both arrows backends reduce to "find the first assignments, in
//! lexicographic order, that no constraint rejects". Constraints are checked
//! as soon as the edge completing them is assigned, so rejected prefixes are
//! skipped wholesale. Parallel runs split the space into prefixes, search each
//! independently and merge in prefix order, so the output does not depend on
//! the worker count.

use rayon::prelude::*;

/// `viable(e, prefix)` is called right after `prefix[e]` is assigned
/// (`prefix.len() == e + 1`) and returns `false` to prune.
pub(crate) fn lex_search<T, F>(choices: &[Vec<T>], viable: &F, limit: usize, workers: usize) -> Vec<Vec<T>>
where
    T: Copy + Send + Sync,
    F: Fn(usize, &[T]) -> bool + Sync,
{
    if limit == 0 || choices.iter().any(|c| c.is_empty()) {
        return Vec::new();
    }
    if workers <= 1 {
        let mut out = Vec::new();
        dfs(choices, viable, &mut Vec::with_capacity(choices.len()), &mut out, limit);
        return out;
    }

    // Split depth: enough prefixes to keep every worker busy.
    let target = (workers * 8) as u128;
    let mut depth = 0;
    let mut width = 1u128;
    while depth < choices.len() && width < target {
        width = width.saturating_mul(choices[depth].len() as u128);
        depth += 1;
    }
    let mut prefixes = Vec::new();
    collect_prefixes(choices, viable, depth, &mut Vec::new(), &mut prefixes);

    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build().expect("thread pool");
    pool.install(|| {
        if limit == 1 {
            prefixes
                .par_iter()
                .find_map_first(|p| {
                    let mut out = Vec::new();
                    dfs(choices, viable, &mut p.clone(), &mut out, 1);
                    out.pop()
                })
                .into_iter()
                .collect()
        } else {
            let parts: Vec<Vec<Vec<T>>> = prefixes
                .par_iter()
                .map(|p| {
                    let mut out = Vec::new();
                    dfs(choices, viable, &mut p.clone(), &mut out, limit);
                    out
                })
                .collect();
            parts.into_iter().flatten().take(limit).collect()
        }
    })
}

fn dfs<T, F>(choices: &[Vec<T>], viable: &F, prefix: &mut Vec<T>, out: &mut Vec<Vec<T>>, limit: usize)
where
    T: Copy,
    F: Fn(usize, &[T]) -> bool,
{
    let e = prefix.len();
    if e == choices.len() {
        out.push(prefix.clone());
        return;
    }
    for &c in &choices[e] {
        prefix.push(c);
        if viable(e, prefix) {
            dfs(choices, viable, prefix, out, limit);
        }
        prefix.pop();
        if out.len() >= limit {
            return;
        }
    }
}

fn collect_prefixes<T, F>(choices: &[Vec<T>], viable: &F, depth: usize, prefix: &mut Vec<T>, out: &mut Vec<Vec<T>>)
where
    T: Copy,
    F: Fn(usize, &[T]) -> bool,
{
    let e = prefix.len();
    if e == depth {
        out.push(prefix.clone());
        return;
    }
    for &c in &choices[e] {
        prefix.push(c);
        if viable(e, prefix) {
            collect_prefixes(choices, viable, depth, prefix, out);
        }
        prefix.pop();
    }
}

/// Number of points in a product space, saturating.
pub(crate) fn product_size<T>(choices: &[Vec<T>]) -> u128 {
    choices.iter().fold(1u128, |acc, c| acc.saturating_mul(c.len() as u128))
}
