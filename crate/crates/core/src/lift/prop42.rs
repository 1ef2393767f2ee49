use rand::Rng;
use serde::{Deserialize, Serialize};

use super::LiftError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    X,
    Y,
}

/// Outcome of the sequence selection.
///
/// `Case1 { r, s }` names two terms `x_r`, `y_s` (with `r, s ≥ 1`) that
/// dominate everything before them, exceed `L(q)` for `q = r + s`, and whose
/// prefixes sum to at most `q·L(q-1)`. `Case2` records which initial term
/// exceeds `L(0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum Prop42Case {
    Case1 { r: usize, s: usize },
    Case2 { side: Side },
}

fn check_hypotheses(x: &[f64], y: &[f64], l: &[f64]) -> Result<(), LiftError> {
    let bad = |m: String| Err(LiftError::Hypothesis(m));
    if x.is_empty() || y.is_empty() {
        return bad("both sequences need at least one term".into());
    }
    if x.iter().chain(y).chain(l).any(|v| !(v.is_finite() && *v > 0.0)) {
        return bad("all terms must be positive and finite".into());
    }
    let (n, m) = (x.len() - 1, y.len() - 1);
    let k = n + m;
    if l.len() <= k {
        return bad(format!("schedule has {} entries, need L({k})", l.len()));
    }
    if l.windows(2).any(|w| w[0] >= w[1]) {
        return bad("schedule must be strictly increasing".into());
    }
    let others = x[..n].iter().chain(&y[..m]).fold(0.0f64, |a, &b| a.max(b));
    if !(x[n] > others && y[m] > others) {
        return bad("last terms must exceed every other term".into());
    }
    if !(x[n] > l[k] && y[m] > l[k]) {
        return bad(format!("last terms must exceed L({k}) = {}", l[k]));
    }
    Ok(())
}

fn prefix(v: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut sum = vec![0.0];
    let mut max = vec![0.0f64];
    for &a in v {
        sum.push(sum.last().unwrap() + a);
        max.push(max.last().unwrap().max(a));
    }
    (sum, max)
}

/// Picks the case of the sequence proposition, preferring the first case.
/// Among valid pairs the one with the smallest `q = r + s`, then smallest
/// `r`, is returned.
pub fn prop42_select(x: &[f64], y: &[f64], l: &[f64]) -> Result<Prop42Case, LiftError> {
    check_hypotheses(x, y, l)?;
    let (n, m) = (x.len() - 1, y.len() - 1);
    let (sx, mx) = prefix(x);
    let (sy, my) = prefix(y);
    for q in 2..=n + m {
        for r in q.saturating_sub(m).max(1)..=q.min(n) {
            let s = q - r;
            if s == 0 {
                continue;
            }
            let before = mx[r].max(my[s]);
            if x[r] > before
                && y[s] > before
                && x[r] > l[q]
                && y[s] > l[q]
                && sx[r] + sy[s] <= q as f64 * l[q - 1]
            {
                return Ok(Prop42Case::Case1 { r, s });
            }
        }
    }
    if x[0] > l[0] {
        Ok(Prop42Case::Case2 { side: Side::X })
    } else if y[0] > l[0] {
        Ok(Prop42Case::Case2 { side: Side::Y })
    } else {
        Err(LiftError::Internal(format!(
            "no case holds for x = {x:?}, y = {y:?}, L = {l:?}"
        )))
    }
}

/// Re-evaluates the inequalities claimed by `case` directly from the terms.
pub fn prop42_check(x: &[f64], y: &[f64], l: &[f64], case: &Prop42Case) -> Result<(), String> {
    match *case {
        Prop42Case::Case1 { r, s } => {
            if r == 0 || s == 0 || r >= x.len() || s >= y.len() {
                return Err(format!("indices ({r}, {s}) out of range"));
            }
            let q = r + s;
            if q >= l.len() {
                return Err(format!("L({q}) not available"));
            }
            for &e in x[..r].iter().chain(&y[..s]) {
                if !(x[r] > e && y[s] > e) {
                    return Err(format!("x_{r} or y_{s} does not dominate earlier term {e}"));
                }
            }
            if !(x[r] > l[q] && y[s] > l[q]) {
                return Err(format!("x_{r} = {} or y_{s} = {} not above L({q}) = {}", x[r], y[s], l[q]));
            }
            let sum: f64 = x[..r].iter().sum::<f64>() + y[..s].iter().sum::<f64>();
            if sum > q as f64 * l[q - 1] {
                return Err(format!("prefix sum {sum} exceeds {q}·L({}) = {}", q - 1, q as f64 * l[q - 1]));
            }
            Ok(())
        }
        Prop42Case::Case2 { side } => {
            let v = match side {
                Side::X => x[0],
                Side::Y => y[0],
            };
            if v > l[0] {
                Ok(())
            } else {
                Err(format!("initial term {v} not above L(0) = {}", l[0]))
            }
        }
    }
}

/// Every valid first-case pair, by direct evaluation, ordered by `q` then `r`.
pub fn prop42_oracle(x: &[f64], y: &[f64], l: &[f64]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for q in 2..l.len() {
        for r in 1..x.len() {
            if r >= q || q - r >= y.len() {
                continue;
            }
            let s = q - r;
            if prop42_check(x, y, l, &Prop42Case::Case1 { r, s }).is_ok() {
                out.push((r, s));
            }
        }
    }
    out
}

/// Random instance satisfying the hypotheses: `n + m ≤ kmax`, terms and
/// schedule gaps log-uniform over several decades.
pub fn random_prop42_instance<R: Rng + ?Sized>(rng: &mut R, kmax: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let k = rng.gen_range(0..=kmax);
    let n = rng.gen_range(0..=k);
    let m = k - n;
    let mut l = Vec::with_capacity(k + 1);
    let mut cur = 10f64.powf(rng.gen_range(-1.0..1.0));
    for _ in 0..=k {
        l.push(cur);
        cur *= 1.0 + 10f64.powf(rng.gen_range(-2.0..1.0));
    }
    let term = |rng: &mut R| 10f64.powf(rng.gen_range(-2.0..1.0)) * l[rng.gen_range(0..=k)];
    let mut x: Vec<f64> = (0..n).map(|_| term(rng)).collect();
    let mut y: Vec<f64> = (0..m).map(|_| term(rng)).collect();
    let top = x.iter().chain(&y).fold(l[k], |a, &b| a.max(b));
    x.push(top * (1.0 + rng.gen_range(0.001..1.0)));
    y.push(top * (1.0 + rng.gen_range(0.001..1.0)));
    (x, y, l)
}

/// Indices of two distinct terms of at least `l`, if there are two.
pub fn two_long_edges(seq: &[f64], l: f64) -> Option<(usize, usize)> {
    let mut it = seq.iter().enumerate().filter(|(_, &v)| v >= l).map(|(i, _)| i);
    Some((it.next()?, it.next()?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_terms_give_case_two() {
        let c = prop42_select(&[5.0], &[4.0], &[1.0]).unwrap();
        assert_eq!(c, Prop42Case::Case2 { side: Side::X });
        prop42_check(&[5.0], &[4.0], &[1.0], &c).unwrap();
    }

    #[test]
    fn small_example_matches_oracle() {
        let (x, y, l) = ([0.1, 9.0], [0.1, 9.0], [1.0, 2.0, 3.0, 4.0]);
        let c = prop42_select(&x, &y, &l).unwrap();
        assert_eq!(c, Prop42Case::Case1 { r: 1, s: 1 });
        assert_eq!(prop42_oracle(&x, &y, &l), vec![(1, 1)]);
        prop42_check(&x, &y, &l, &c).unwrap();
    }

    #[test]
    fn large_prefix_forces_case_two() {
        // x₀ is too large for the prefix bound but above L(0).
        let (x, y, l) = ([3.5, 9.0], [0.1, 9.0], [1.0, 1.5, 3.0]);
        assert!(prop42_oracle(&x, &y, &l).is_empty());
        assert_eq!(prop42_select(&x, &y, &l).unwrap(), Prop42Case::Case2 { side: Side::X });
    }

    #[test]
    fn hypothesis_violations_are_errors() {
        let l = [1.0, 2.0, 3.0];
        assert!(matches!(prop42_select(&[1.0, 2.5], &[0.1, 9.0], &l), Err(LiftError::Hypothesis(_))));
        assert!(matches!(prop42_select(&[9.0, 5.0], &[0.1, 9.0], &l), Err(LiftError::Hypothesis(_))));
        assert!(matches!(prop42_select(&[0.1, 9.0], &[0.1, 9.0], &[1.0, 3.0, 2.0]), Err(LiftError::Hypothesis(_))));
        assert!(matches!(prop42_select(&[0.1, 9.0], &[0.1, 9.0], &[1.0, 2.0]), Err(LiftError::Hypothesis(_))));
        assert!(prop42_select(&[], &[1.0], &l).is_err());
    }

    #[test]
    fn random_instances_agree_with_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut case1 = 0;
        for _ in 0..3000 {
            let (x, y, l) = random_prop42_instance(&mut rng, 12);
            let c = prop42_select(&x, &y, &l).unwrap();
            prop42_check(&x, &y, &l, &c).unwrap();
            let oracle = prop42_oracle(&x, &y, &l);
            match c {
                Prop42Case::Case1 { r, s } => {
                    case1 += 1;
                    assert_eq!(oracle.first(), Some(&(r, s)));
                }
                Prop42Case::Case2 { .. } => assert!(oracle.is_empty()),
            }
        }
        assert!(case1 > 100, "only {case1} first-case instances");
    }

    #[test]
    fn two_long_edges_finds_pairs() {
        assert_eq!(two_long_edges(&[1.0, 5.0, 0.2, 6.0], 4.0), Some((1, 3)));
        assert_eq!(two_long_edges(&[1.0, 5.0], 4.0), None);
    }

    #[test]
    fn case_serialises_with_tag() {
        let v = serde_json::to_value(Prop42Case::Case1 { r: 2, s: 1 }).unwrap();
        assert_eq!(v, serde_json::json!({"case": "case1", "r": 2, "s": 1}));
    }
}
