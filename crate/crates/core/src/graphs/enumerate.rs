use std::collections::HashMap;

use super::trivalent::TrivalentGraph;
use super::GraphError;

type Matrix = Vec<Vec<u8>>;

/// All graphs of rank `n` up to isomorphism, `2 <= n <= 5`, sorted by
/// canonical code and each returned in its canonical labelling.
///
/// Every labelled multiplicity matrix on `2(n-1)` vertices is generated;
/// connected ones are bucketed by an isomorphism invariant and compared
/// against the bucket's representatives with a backtracking test.
pub fn enumerate_n_graphs(n: usize) -> Result<Vec<TrivalentGraph>, GraphError> {
    if !(2..=5).contains(&n) {
        return Err(GraphError::Rank { n, min: 2, max: 5 });
    }
    let v = 2 * (n - 1);
    let mut buckets: HashMap<Vec<u64>, Vec<(Matrix, Vec<u64>)>> = HashMap::new();
    let mut m = vec![vec![0u8; v]; v];
    let mut deg = vec![0u8; v];
    fill(&mut m, &mut deg, 0, 0, &mut |m| {
        if !connected(m) {
            return;
        }
        let sig: Vec<u64> = (0..m.len()).map(|x| vertex_signature(m, x)).collect();
        let mut key = sig.clone();
        key.sort_unstable();
        let reps = buckets.entry(key).or_default();
        if !reps.iter().any(|(r, rs)| isomorphic(r, rs, m, &sig)) {
            reps.push((m.clone(), sig));
        }
    });
    let mut out: Vec<(String, Matrix)> = buckets
        .into_values()
        .flatten()
        .map(|(r, _)| canonical_form(&r))
        .collect();
    out.sort();
    out.into_iter()
        .map(|(_, m)| TrivalentGraph::from_matrix(&m))
        .collect()
}

/// Minimum, over vertex orderings, of the upper triangle of the
/// multiplicity matrix read column by column.
pub fn canonical_code(g: &TrivalentGraph) -> String {
    canonical_form(&g.multiplicity_matrix()).0
}

/// Text catalog: one canonical code per line.
pub fn catalog(graphs: &[TrivalentGraph]) -> String {
    graphs.iter().map(|g| canonical_code(g) + "\n").collect()
}

// Fills entries (i, j), j >= i, row by row so every vertex ends at degree 3.
fn fill(m: &mut Matrix, deg: &mut [u8], i: usize, j: usize, emit: &mut dyn FnMut(&Matrix)) {
    let v = m.len();
    if i == v {
        emit(m);
        return;
    }
    if j == v {
        if deg[i] == 3 {
            fill(m, deg, i + 1, i + 1, emit);
        }
        return;
    }
    let cost = if i == j { 2 } else { 1 };
    let room = if i == j {
        (3 - deg[i]) / 2
    } else {
        (3 - deg[i]).min(3 - deg[j])
    };
    for k in (0..=room).rev() {
        m[i][j] = k;
        m[j][i] = k;
        deg[i] += k * cost;
        if i != j {
            deg[j] += k;
        }
        fill(m, deg, i, j + 1, emit);
        deg[i] -= k * cost;
        if i != j {
            deg[j] -= k;
        }
    }
    m[i][j] = 0;
    m[j][i] = 0;
}

fn connected(m: &Matrix) -> bool {
    let v = m.len();
    let mut seen = vec![false; v];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(x) = stack.pop() {
        for y in 0..v {
            if m[x][y] > 0 && !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

fn vertex_signature(m: &Matrix, x: usize) -> u64 {
    let v = m.len();
    let mut mult: Vec<u8> = (0..v).filter(|&y| y != x && m[x][y] > 0).map(|y| m[x][y]).collect();
    mult.sort();
    // BFS layer sizes from x.
    let mut dist = vec![usize::MAX; v];
    dist[x] = 0;
    let mut queue = std::collections::VecDeque::from([x]);
    while let Some(a) = queue.pop_front() {
        for b in 0..v {
            if m[a][b] > 0 && dist[b] == usize::MAX {
                dist[b] = dist[a] + 1;
                queue.push_back(b);
            }
        }
    }
    let mut layers = [0u64; 8];
    for d in dist {
        layers[d.min(7)] += 1;
    }
    let mut h = m[x][x] as u64;
    for k in mult {
        h = h * 5 + k as u64;
    }
    for l in layers {
        h = h * 11 + l;
    }
    h
}

fn isomorphic(a: &Matrix, sa: &[u64], b: &Matrix, sb: &[u64]) -> bool {
    let v = a.len();
    let mut perm = vec![usize::MAX; v];
    let mut used = vec![false; v];
    extend_iso(a, b, sa, sb, 0, &mut perm, &mut used)
}

fn extend_iso(
    a: &Matrix,
    b: &Matrix,
    sa: &[u64],
    sb: &[u64],
    k: usize,
    perm: &mut [usize],
    used: &mut [bool],
) -> bool {
    let v = a.len();
    if k == v {
        return true;
    }
    for y in 0..v {
        if used[y] || sa[k] != sb[y] {
            continue;
        }
        if (0..=k).all(|i| {
            let pi = if i == k { y } else { perm[i] };
            a[k][i] == b[y][pi]
        }) {
            perm[k] = y;
            used[y] = true;
            if extend_iso(a, b, sa, sb, k + 1, perm, used) {
                return true;
            }
            used[y] = false;
        }
    }
    false
}

fn canonical_form(m: &Matrix) -> (String, Matrix) {
    let v = m.len();
    let mut best: Option<Vec<u8>> = None;
    let mut best_perm = Vec::new();
    let mut perm = Vec::with_capacity(v);
    let mut used = vec![false; v];
    let mut code = Vec::with_capacity(v * (v + 1) / 2);
    search_canonical(m, &mut perm, &mut used, &mut code, &mut best, &mut best_perm);
    let code = best.unwrap();
    let relabelled: Matrix = (0..v)
        .map(|i| (0..v).map(|j| m[best_perm[i]][best_perm[j]]).collect())
        .collect();
    let s = code.iter().map(|d| char::from(b'0' + d)).collect();
    (s, relabelled)
}

// Position k receives original vertex perm[k]; column k of the code is
// (0,k), (1,k), …, (k,k), so it is fixed once k positions are placed.
fn search_canonical(
    m: &Matrix,
    perm: &mut Vec<usize>,
    used: &mut [bool],
    code: &mut Vec<u8>,
    best: &mut Option<Vec<u8>>,
    best_perm: &mut Vec<usize>,
) {
    let v = m.len();
    let k = perm.len();
    if k == v {
        if best.as_ref().map_or(true, |b| code.as_slice() < b.as_slice()) {
            *best = Some(code.clone());
            *best_perm = perm.clone();
        }
        return;
    }
    for x in 0..v {
        if used[x] {
            continue;
        }
        let mark = code.len();
        perm.push(x);
        for i in 0..=k {
            code.push(m[perm[i]][x]);
        }
        let prune = best.as_ref().is_some_and(|b| code.as_slice() > &b[..code.len()]);
        if !prune {
            used[x] = true;
            search_canonical(m, perm, used, code, best, best_perm);
            used[x] = false;
        }
        code.truncate(mark);
        perm.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn rank_two_has_theta_and_dumbbell() {
        let gs = enumerate_n_graphs(2).unwrap();
        let codes: Vec<String> = gs.iter().map(canonical_code).collect();
        assert_eq!(codes, ["030", "111"]);
        assert_eq!(canonical_code(&TrivalentGraph::theta()), "030");
        assert_eq!(canonical_code(&TrivalentGraph::dumbbell()), "111");
    }

    #[test]
    fn class_counts() {
        assert_eq!(enumerate_n_graphs(3).unwrap().len(), 5);
        assert_eq!(enumerate_n_graphs(4).unwrap().len(), 17);
    }

    #[test]
    fn rank_five_class_count() {
        let gs = enumerate_n_graphs(5).unwrap();
        assert_eq!(gs.len(), 71);
        let codes: BTreeSet<String> = gs.iter().map(canonical_code).collect();
        assert_eq!(codes.len(), 71);
    }

    #[test]
    fn rank_three_graphs_have_four_vertices_and_six_edges() {
        for g in enumerate_n_graphs(3).unwrap() {
            assert_eq!(g.vertex_count(), 4);
            assert_eq!(g.edge_count(), 6);
            assert_eq!(2 * g.edge_count(), 3 * g.vertex_count());
            assert_eq!(g.euler_characteristic(), 1 - 3);
        }
    }

    #[test]
    fn out_of_range() {
        assert!(enumerate_n_graphs(1).is_err());
        assert!(enumerate_n_graphs(6).is_err());
    }

    #[test]
    fn relabelling_preserves_the_canonical_set() {
        let gs = enumerate_n_graphs(4).unwrap();
        let codes: BTreeSet<String> = gs.iter().map(canonical_code).collect();
        let v = 6;
        let shuffled: BTreeSet<String> = gs
            .iter()
            .map(|g| {
                let m = g.multiplicity_matrix();
                let p: Vec<usize> = (0..v).map(|i| (i * 5 + 3) % v).collect();
                let pm: Matrix = (0..v).map(|i| (0..v).map(|j| m[p[i]][p[j]]).collect()).collect();
                canonical_code(&TrivalentGraph::from_matrix(&pm).unwrap())
            })
            .collect();
        assert_eq!(codes, shuffled);
    }

    #[test]
    fn catalog_lines() {
        let gs = enumerate_n_graphs(2).unwrap();
        assert_eq!(catalog(&gs), "030\n111\n");
    }
}
