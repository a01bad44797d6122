//! Dense, loop-by-loop recomputation of every audit scalar, used as an oracle
//! for the sparse implementation. Nothing here calls into the library.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const FLOOR: f64 = 1e-10;

/// A small audit instance held as dense boolean tables.
#[derive(Debug, Clone)]
pub struct Instance {
    pub n_users: usize,
    pub n_bundles: usize,
    pub n_items: usize,
    pub k: usize,
    pub gamma: f64,
    pub z: Vec<Vec<bool>>,
    pub y: Vec<Vec<bool>>,
    pub train: Vec<Vec<bool>>,
    pub test: Vec<Vec<bool>>,
    pub lists: Vec<Vec<usize>>,
}

fn pick(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Vec<bool> {
    (0..n).map(|_| rng.random_bool(p)).collect()
}

impl Instance {
    /// Random instance with at most 10 users, 8 bundles, 12 items and K <= 5.
    /// Guarantees non-empty bundles, some training interaction, some item
    /// interaction and at least one user with test bundles.
    pub fn random(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n_users = rng.random_range(1..=10);
        let n_bundles = rng.random_range(2..=8);
        let n_items = rng.random_range(1..=12);
        let k = rng.random_range(1..=5);
        let gamma = [0.5, 0.3, 0.8][rng.random_range(0..3)];

        let mut z: Vec<Vec<bool>> = (0..n_bundles).map(|_| pick(&mut rng, n_items, 0.3)).collect();
        for row in &mut z {
            if !row.iter().any(|&x| x) {
                let i = rng.random_range(0..n_items);
                row[i] = true;
            }
        }
        let y: Vec<Vec<bool>> = (0..n_users).map(|_| pick(&mut rng, n_items, 0.25)).collect();
        let mut train = vec![vec![false; n_bundles]; n_users];
        let mut test = vec![vec![false; n_bundles]; n_users];
        for u in 0..n_users {
            for b in 0..n_bundles {
                let r: f64 = rng.random();
                if r < 0.25 {
                    train[u][b] = true;
                } else if r < 0.4 {
                    test[u][b] = true;
                }
            }
        }
        let u0 = rng.random_range(0..n_users);
        let b0 = rng.random_range(0..n_bundles);
        train[u0][b0] = true;
        test[u0][b0] = false;
        let u1 = rng.random_range(0..n_users);
        if !test[u1].iter().any(|&x| x) {
            let free: Vec<usize> = (0..n_bundles).filter(|&b| !train[u1][b]).collect();
            let b = if free.is_empty() {
                // move one training bundle into test
                let b = rng.random_range(0..n_bundles);
                train[u1][b] = false;
                b
            } else {
                free[rng.random_range(0..free.len())]
            };
            test[u1][b] = true;
        }
        if !train.iter().flatten().any(|&x| x) {
            let b = (0..n_bundles).find(|&b| !test[u0][b]).unwrap_or(0);
            test[u0][b] = false;
            train[u0][b] = true;
        }

        let mut lists: Vec<Vec<usize>> = (0..n_users)
            .map(|_| {
                let len = rng.random_range(0..=k.min(n_bundles));
                let mut pool: Vec<usize> = (0..n_bundles).collect();
                let mut list = Vec::with_capacity(len);
                for _ in 0..len {
                    let j = rng.random_range(0..pool.len());
                    list.push(pool.swap_remove(j));
                }
                list
            })
            .collect();
        if lists[u1].is_empty() {
            lists[u1].push(rng.random_range(0..n_bundles));
        }

        Instance {
            n_users,
            n_bundles,
            n_items,
            k,
            gamma,
            z,
            y,
            train,
            test,
            lists,
        }
    }

    pub fn pairs(table: &[Vec<bool>]) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (r, row) in table.iter().enumerate() {
            for (c, &x) in row.iter().enumerate() {
                if x {
                    out.push((r, c));
                }
            }
        }
        out
    }

    fn size(&self, b: usize) -> f64 {
        self.z[b].iter().filter(|&&x| x).count() as f64
    }

    fn w(&self, rank: usize) -> f64 {
        self.gamma * (1.0 - self.gamma).powi(rank as i32 - 1)
    }

    pub fn included(&self) -> Vec<usize> {
        (0..self.n_users).filter(|&u| self.test[u].iter().any(|&x| x)).collect()
    }

    pub fn bundle_freq(&self) -> Vec<f64> {
        (0..self.n_bundles)
            .map(|b| (0..self.n_users).filter(|&u| self.train[u][b]).count() as f64)
            .collect()
    }

    /// Column sums of train * Z + Y.
    pub fn item_freq(&self) -> Vec<f64> {
        let mut f = vec![0.0; self.n_items];
        for u in 0..self.n_users {
            for (i, fi) in f.iter_mut().enumerate() {
                let mut m = 0.0;
                for b in 0..self.n_bundles {
                    if self.train[u][b] && self.z[b][i] {
                        m += 1.0;
                    }
                }
                if self.y[u][i] {
                    m += 1.0;
                }
                *fi += m;
            }
        }
        f
    }

    pub fn bundle_exposure(&self, u: usize) -> Vec<f64> {
        let mut a = vec![0.0; self.n_bundles];
        for (pos, &b) in self.lists[u].iter().enumerate() {
            a[b] = self.w(pos + 1);
        }
        a
    }

    pub fn item_exposure(&self, u: usize) -> Vec<f64> {
        let a = self.bundle_exposure(u);
        (0..self.n_items)
            .map(|i| {
                (0..self.n_bundles)
                    .filter(|&b| self.z[b][i])
                    .map(|b| a[b] / self.size(b))
                    .sum()
            })
            .collect()
    }

    /// Ideal-policy exposure of each bundle for user `u`: relevant bundles
    /// share the first min(m, K) ranks, the rest share ranks m+1..min(K, n).
    pub fn bundle_target(&self, u: usize) -> Vec<f64> {
        let n = self.n_bundles;
        let m = self.test[u].iter().filter(|&&x| x).count();
        let depth = self.k.min(n);
        let mut rel = 0.0;
        for rank in 1..=m.min(depth) {
            rel += self.w(rank);
        }
        if m > 0 {
            rel /= m as f64;
        }
        let mut non = 0.0;
        if m < depth {
            for rank in m + 1..=depth {
                non += self.w(rank);
            }
            non /= (n - m) as f64;
        }
        (0..n).map(|b| if self.test[u][b] { rel } else { non }).collect()
    }

    pub fn item_target(&self, u: usize) -> Vec<f64> {
        let t = self.bundle_target(u);
        (0..self.n_items)
            .map(|i| {
                (0..self.n_bundles)
                    .filter(|&b| self.z[b][i])
                    .map(|b| t[b] / self.size(b))
                    .sum()
            })
            .collect()
    }

    pub fn bundle_relevance(&self, u: usize) -> Vec<f64> {
        self.test[u].iter().map(|&x| if x { 1.0 } else { 0.0 }).collect()
    }

    pub fn item_relevance(&self, u: usize) -> Vec<f64> {
        (0..self.n_items)
            .map(|i| {
                (0..self.n_bundles)
                    .filter(|&b| self.test[u][b] && self.z[b][i])
                    .map(|b| 1.0 / self.size(b))
                    .sum()
            })
            .collect()
    }
}

/// Minimal prefix of the (freq desc, id asc) order reaching `share` of the mass.
pub fn popular_prefix(freq: &[f64], share: f64) -> Vec<bool> {
    let mut order: Vec<usize> = (0..freq.len()).collect();
    // insertion sort keeps this obviously independent of the library
    for i in 1..order.len() {
        let mut j = i;
        while j > 0 {
            let (a, b) = (order[j - 1], order[j]);
            if freq[b] > freq[a] || (freq[b] == freq[a] && b < a) {
                order.swap(j - 1, j);
                j -= 1;
            } else {
                break;
            }
        }
    }
    let total: f64 = freq.iter().sum();
    let mut popular = vec![false; freq.len()];
    let mut cum = 0.0;
    for &e in &order {
        if cum >= share * total {
            break;
        }
        popular[e] = true;
        cum += freq[e];
    }
    popular
}

#[derive(Debug, Clone, Copy)]
pub struct RefLevel {
    pub eps: [f64; 2],
    pub target: [f64; 2],
    pub utility: [f64; 2],
    pub ctr: [f64; 2],
    /// logEUR, logRUR, EEL, EER, EED, logDP
    pub metrics: [f64; 6],
}

fn split(values: &[f64], popular: &[bool]) -> [f64; 2] {
    let mut out = [0.0, 0.0];
    for (v, &p) in values.iter().zip(popular) {
        if p {
            out[0] += v;
        } else {
            out[1] += v;
        }
    }
    out
}

fn normalized(x: [f64; 2]) -> [f64; 2] {
    let s = x[0] + x[1];
    [x[0] / s, x[1] / s]
}

fn fl(x: f64) -> f64 {
    if x < FLOOR {
        FLOOR
    } else {
        x
    }
}

pub fn reference_level(inst: &Instance, popular: &[bool], item_level: bool, users: &[usize]) -> RefLevel {
    let n_users = users.len() as f64;
    let mut eps = [0.0; 2];
    let mut target = [0.0; 2];
    let mut utility = [0.0; 2];
    let mut ctr = [0.0; 2];
    for &u in users {
        let (a, t, rel) = if item_level {
            (inst.item_exposure(u), inst.item_target(u), inst.item_relevance(u))
        } else {
            (inst.bundle_exposure(u), inst.bundle_target(u), inst.bundle_relevance(u))
        };
        let clicks: Vec<f64> = a.iter().zip(&rel).map(|(x, r)| x * r).collect();
        for (acc, part) in [
            (&mut eps, split(&a, popular)),
            (&mut target, split(&t, popular)),
            (&mut utility, split(&rel, popular)),
            (&mut ctr, split(&clicks, popular)),
        ] {
            acc[0] += part[0];
            acc[1] += part[1];
        }
    }
    for acc in [&mut eps, &mut target, &mut ctr] {
        acc[0] /= n_users;
        acc[1] /= n_users;
    }
    let e = normalized(eps);
    let t = normalized(target);
    let eur = (fl(e[0]) / fl(utility[0])) / (fl(e[1]) / fl(utility[1]));
    let rur = (fl(ctr[0]) / fl(utility[0])) / (fl(ctr[1]) / fl(utility[1]));
    let dp = fl(e[0]) / fl(e[1]);
    let eel = (e[0] - t[0]) * (e[0] - t[0]) + (e[1] - t[1]) * (e[1] - t[1]);
    let eer = 2.0 * (e[0] * t[0] + e[1] * t[1]);
    let eed = e[0] * e[0] + e[1] * e[1];
    RefLevel {
        eps: e,
        target: t,
        utility,
        ctr,
        metrics: [eur.ln(), rur.ln(), eel, eer, eed, dp.ln()],
    }
}

pub struct RefReport {
    pub recall: f64,
    pub ndcg: f64,
    pub bundle_popular: Vec<bool>,
    pub item_popular: Vec<bool>,
    pub bundle: RefLevel,
    pub item: RefLevel,
}

impl RefReport {
    /// Same order as the library's headline: R, N, bundle x6, item x6.
    pub fn headline(&self) -> Vec<f64> {
        let mut out = vec![self.recall, self.ndcg];
        out.extend(self.bundle.metrics);
        out.extend(self.item.metrics);
        out
    }
}

pub fn reference_report(inst: &Instance, share: f64) -> RefReport {
    let users = inst.included();
    let mut recall = 0.0;
    let mut ndcg = 0.0;
    for &u in &users {
        let relevant = inst.test[u].iter().filter(|&&x| x).count();
        let mut hits = 0.0;
        let mut dcg = 0.0;
        for (pos, &b) in inst.lists[u].iter().enumerate().take(inst.k) {
            if inst.test[u][b] {
                hits += 1.0;
                dcg += 1.0 / ((pos + 2) as f64).log2();
            }
        }
        let mut idcg = 0.0;
        for p in 1..=relevant.min(inst.k) {
            idcg += 1.0 / ((p + 1) as f64).log2();
        }
        recall += hits / relevant as f64;
        ndcg += dcg / idcg;
    }
    recall /= users.len() as f64;
    ndcg /= users.len() as f64;

    let bundle_popular = popular_prefix(&inst.bundle_freq(), share);
    let item_popular = popular_prefix(&inst.item_freq(), share);
    let bundle = reference_level(inst, &bundle_popular, false, &users);
    let item = reference_level(inst, &item_popular, true, &users);
    RefReport {
        recall,
        ndcg,
        bundle_popular,
        item_popular,
        bundle,
        item,
    }
}

/// Direct evaluation of the sorted-proportion Gini formula.
pub fn gini_reference(values: &[f64]) -> f64 {
    let n = values.len();
    let total: f64 = values.iter().sum();
    let mut p: Vec<f64> = values.iter().map(|v| v / total).collect();
    p.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut g = 0.0;
    for (idx, pk) in p.iter().enumerate() {
        let k = (idx + 1) as f64;
        g += (2.0 * k - n as f64 - 1.0) / (n as f64 - 1.0) * pk;
    }
    g
}
