//! Enumeration of realizable orbit configurations for batch verification.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::exactmath::rational::{int, rat, Rational};
use crate::noether::NoetherianMap;

/// A parameter is singular when `1 − a = 1/N` for a positive integer `N`.
pub fn is_singular_parameter(a: &Rational) -> bool {
    let t = int(1) - a;
    t > Rational::zero() && t.numer().is_one()
}

#[derive(Clone, Debug, Serialize)]
pub struct GridConfig {
    pub d: usize,
    /// Orbit lengths, ascending; orbit `i` has parameter `(N_i − 1)/N_i`.
    pub lengths: Vec<usize>,
    pub l: usize,
    #[serde(with = "crate::exactmath::rational::serde_rational_vec")]
    pub a: Vec<Rational>,
}

impl GridConfig {
    pub fn map(&self) -> NoetherianMap {
        NoetherianMap::new(self.a.clone()).expect("grid parameters sum to 2")
    }

    pub fn label(&self) -> String {
        let a: Vec<String> = self.a.iter().map(|r| r.to_string()).collect();
        format!("d={} N={:?} a=({})", self.d, self.lengths, a.join(","))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SkippedConfig {
    pub d: usize,
    pub lengths: Vec<usize>,
    pub reason: String,
}

/// Free parameters used to fill the non-singular slots, in order of use.
fn filler_candidates() -> Vec<Rational> {
    let mut out = Vec::new();
    for (p, q) in [(1, 3), (1, 5), (2, 5), (2, 7), (3, 7), (1, 7), (3, 5), (4, 7), (1, 9), (2, 9)] {
        out.push(rat(p, q));
    }
    out
}

fn multisets(n_max: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n_max: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for n in start..=n_max {
            cur.push(n);
            rec(n, n_max, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, n_max, size, &mut Vec::new(), &mut out);
    out
}

/// Fill the free slots so the parameters sum to 2 and none of them is
/// singular. `None` if that is impossible with the given free count.
fn fill(singular_sum: &Rational, free: usize) -> Option<Vec<Rational>> {
    let rest = int(2) - singular_sum;
    match free {
        0 => rest.is_zero().then(Vec::new),
        1 => (!is_singular_parameter(&rest)).then(|| vec![rest]),
        _ => {
            let cands = filler_candidates();
            let mut chosen: Vec<Rational> = (0..free - 2).map(|k| cands[k % cands.len()].clone()).collect();
            let base: Rational = chosen.iter().sum();
            for c in &cands {
                let last = &rest - &base - c;
                if !is_singular_parameter(&last) {
                    chosen.push(c.clone());
                    chosen.push(last);
                    return Some(chosen);
                }
            }
            None
        }
    }
}

/// All configurations with `3 ≤ d ≤ d_max` and orbit lengths in
/// `1..=n_max`, split into realizable ones and those skipped.
pub fn enumerate(d_max: usize, n_max: usize) -> (Vec<GridConfig>, Vec<SkippedConfig>) {
    let mut configs = Vec::new();
    let mut skipped = Vec::new();
    for d in 3..=d_max {
        for size in 0..=d + 1 {
            for lengths in multisets(n_max, size) {
                let l = lengths.iter().filter(|&&n| n == 1).count();
                if d < l + 3 {
                    skipped
                        .push(SkippedConfig { d, lengths, reason: format!("d − l = {} < 3", d as i64 - l as i64) });
                    continue;
                }
                let mut a: Vec<Rational> = lengths.iter().map(|&n| rat(n as i64 - 1, n as i64)).collect();
                let sum: Rational = a.iter().sum();
                match fill(&sum, d + 1 - size) {
                    Some(rest) => {
                        a.extend(rest);
                        configs.push(GridConfig { d, lengths, l, a });
                    }
                    None => skipped.push(SkippedConfig {
                        d,
                        lengths,
                        reason: "no non-singular completion summing to 2".into(),
                    }),
                }
            }
        }
    }
    (configs, skipped)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singular_parameters() {
        assert!(is_singular_parameter(&rat(1, 2)));
        assert!(is_singular_parameter(&int(0)));
        assert!(is_singular_parameter(&rat(3, 4)));
        assert!(!is_singular_parameter(&rat(1, 3)));
        assert!(!is_singular_parameter(&int(1)));
        assert!(!is_singular_parameter(&rat(-1, 4)));
    }

    #[test]
    fn grid_is_realizable() {
        let (configs, skipped) = enumerate(6, 4);
        assert!(configs.len() >= 50);
        assert!(skipped.iter().any(|s| s.reason.contains("< 3")));
        for c in &configs {
            let f = c.map();
            let cls = f.classify();
            assert_eq!(cls.lengths(), c.lengths, "{}", c.label());
            assert_eq!(cls.l, c.l);
        }
    }
}
