//! Reduced schemata as index maps, and a brute-force marking oracle.

use std::collections::{BTreeMap, BTreeSet};

use laminations::circle::Angle;
use laminations::schema::MappingSchema;
use num_integer::Integer;

/// A schema on vertices `0..n` stored as index maps.
#[derive(Clone, Debug)]
pub struct Raw {
    pub sigma: Vec<usize>,
    pub delta: Vec<u32>,
}

impl Raw {
    pub fn schema(&self, names: &[String]) -> MappingSchema {
        MappingSchema::new(
            names.to_vec(),
            (0..self.sigma.len()).map(|i| (names[i].clone(), names[self.sigma[i]].clone())).collect(),
            (0..self.sigma.len()).map(|i| (names[i].clone(), self.delta[i])).collect(),
        )
        .unwrap()
    }

    pub fn labels(&self) -> Vec<String> {
        (0..self.sigma.len()).map(|i| format!("t{i}")).collect()
    }

    pub fn periodic(&self) -> Vec<bool> {
        let n = self.sigma.len();
        (0..n)
            .map(|v| {
                let mut x = self.sigma[v];
                for _ in 0..n {
                    if x == v {
                        return true;
                    }
                    x = self.sigma[x];
                }
                false
            })
            .collect()
    }

    /// A common denominator for every solution: each cycle with degree
    /// product `P` contributes `P - 1`, each preperiodic vertex its degree.
    pub fn denominator(&self) -> u64 {
        let periodic = self.periodic();
        let mut n = 1u64;
        let mut seen = vec![false; self.sigma.len()];
        for v in 0..self.sigma.len() {
            if periodic[v] && !seen[v] {
                let mut product = 1u64;
                let mut x = v;
                loop {
                    seen[x] = true;
                    product *= u64::from(self.delta[x]);
                    x = self.sigma[x];
                    if x == v {
                        break;
                    }
                }
                n = n.lcm(&(product - 1));
            }
        }
        for (&d, p) in self.delta.iter().zip(&periodic) {
            if !p {
                n *= u64::from(d);
            }
        }
        n
    }

    /// Every assignment `v -> j/N` with `δ(v) j_v ≡ j_σ(v) (mod N)`, by backtracking.
    pub fn scan(&self) -> BTreeSet<Vec<(u64, u64)>> {
        let n = self.denominator();
        let mut out = BTreeSet::new();
        let mut partial = vec![0u64; self.sigma.len()];
        fn go(raw: &Raw, n: u64, k: usize, partial: &mut Vec<u64>, out: &mut BTreeSet<Vec<(u64, u64)>>) {
            if k == partial.len() {
                out.insert(partial.iter().map(|&j| reduce(j, n)).collect());
                return;
            }
            for j in 0..n {
                partial[k] = j;
                let fine = (0..=k).all(|v| {
                    let s = raw.sigma[v];
                    s > k || (u64::from(raw.delta[v]) * partial[v]) % n == partial[s]
                });
                if fine {
                    go(raw, n, k + 1, partial, out);
                }
            }
        }
        go(self, n, 0, &mut partial, &mut out);
        out
    }

    /// The lexicographically least relabeling.
    pub fn canonical_key(&self) -> Vec<(usize, u32)> {
        let n = self.sigma.len();
        let mut best: Option<Vec<(usize, u32)>> = None;
        let mut perm: Vec<usize> = (0..n).collect();
        permute(&mut perm, 0, &mut |p| {
            // p[old] = new
            let mut key = vec![(0, 0); n];
            for old in 0..n {
                key[p[old]] = (p[self.sigma[old]], self.delta[old]);
            }
            if best.as_ref().is_none_or(|b| key < *b) {
                best = Some(key);
            }
        });
        best.unwrap()
    }
}

fn reduce(j: u64, n: u64) -> (u64, u64) {
    let g = j.gcd(&n);
    if j == 0 {
        (0, 1)
    } else {
        (j / g, n / g)
    }
}

fn permute(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, f);
        p.swap(k, i);
    }
}

/// Degree vectors of length `n`, entries at least 2, product at most `cap`.
fn degree_vectors(n: usize, cap: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for d in 2..=cap {
        if d * 2u32.pow(n as u32 - 1) > cap {
            break;
        }
        for mut rest in degree_vectors(n - 1, cap / d) {
            rest.insert(0, d);
            out.push(rest);
        }
    }
    out
}

fn self_maps(n: usize) -> Vec<Vec<usize>> {
    (0..n.pow(n as u32))
        .map(|mut code| {
            (0..n)
                .map(|_| {
                    let x = code % n;
                    code /= n;
                    x
                })
                .collect()
        })
        .collect()
}

/// Reduced schemata with degree product at most `cap`, one per isomorphism class.
pub fn all_schemata(cap: u32) -> Vec<Raw> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for n in 1..=6 {
        let maps = self_maps(n);
        for delta in degree_vectors(n, cap) {
            for sigma in &maps {
                let raw = Raw { sigma: sigma.clone(), delta: delta.clone() };
                if seen.insert(raw.canonical_key()) {
                    out.push(raw);
                }
            }
        }
    }
    out
}

pub fn as_pairs(m: &BTreeMap<String, Angle>, labels: &[String]) -> Vec<(u64, u64)> {
    labels
        .iter()
        .map(|v| {
            let a = &m[v];
            (u64::try_from(a.numer()).unwrap(), u64::try_from(a.denom()).unwrap())
        })
        .collect()
}
