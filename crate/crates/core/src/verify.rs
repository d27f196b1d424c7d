//! Randomized property suites. Every trial draws from its own ChaCha8
//! stream derived from `(master seed, suite, trial)`, so reports do not depend
//! on thread scheduling.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::control::{hum_control, observability_constant, ControlProblem};
use crate::error::{Error, Result};
use crate::gram::gram_matrix;
use crate::hermite::{
    apply_ladder, eval_hermite_1d, harmonic_oscillator, Basis, HermiteExpansion, LadderKind, LadderMap, MultiIndex,
};
use crate::linalg::{adaptive_scalar, gauss_hermite_function_form, gauss_legendre, sym_extremes};
use crate::poly::chebyshev::chebyshev_first_explicit;
use crate::poly::{
    bernstein_check, chebyshev_value, hermite_tail_bound, kovrijkine_interval_bound, remez_ball_bound, remez_bound,
    tail_constant_cn, weighted_check, ChebyshevKind, Verdict,
};
use crate::quadratic::{
    evolve, hamilton_map, singular_space, weyl_quantize, QuadraticSymbol, DEFAULT_RANK_TOL,
};
use crate::regions::{explicit, full_space, integrate_pair, interval_block_f64, Cuboid, Region};
use crate::scalar::{with_precision, Mp, Real};

/// Verdict record of one suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub trials: usize,
    pub failures: usize,
    /// Smallest `ln(allowed/observed)` over conclusive trials; negative on failure.
    pub worst_margin: Option<f64>,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub inconclusive: usize,
}

fn is_zero(v: &usize) -> bool {
    *v == 0
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.inconclusive == 0
    }
}

/// Outcome of one trial.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Trial {
    pub margin: Option<f64>,
    pub pass: bool,
    pub inconclusive: bool,
}

impl Trial {
    /// Passes when `margin ≥ −1e−12` (a relative rounding allowance).
    pub fn margin(m: f64) -> Self {
        Trial { margin: Some(m), pass: m >= -1e-12, inconclusive: false }
    }

    /// `ln(allowed/observed)`, infinite when nothing was observed.
    pub fn ratio(allowed: f64, observed: f64) -> Self {
        if observed <= 0.0 {
            return Trial { margin: None, pass: allowed >= 0.0, inconclusive: false };
        }
        Trial::margin((allowed / observed).ln())
    }

    pub fn check(pass: bool) -> Self {
        Trial { margin: None, pass, inconclusive: false }
    }

    pub fn inconclusive() -> Self {
        Trial { margin: None, pass: false, inconclusive: true }
    }

    /// Worst of several sub-checks.
    pub fn all(parts: &[Trial]) -> Self {
        let inconclusive = parts.iter().any(|t| t.inconclusive);
        let pass = parts.iter().all(|t| t.pass || t.inconclusive);
        let margin = parts.iter().filter_map(|t| t.margin).fold(None, |acc: Option<f64>, m| Some(acc.map_or(m, |a| a.min(m))));
        Trial { margin, pass: pass && !inconclusive, inconclusive: inconclusive && pass }
    }
}

struct Suite {
    name: &'static str,
    default_trials: usize,
    run: fn(&mut ChaCha8Rng) -> Result<Trial>,
}

const SUITES: &[Suite] = &[
    Suite { name: "bernstein", default_trials: 500, run: bernstein_trial },
    Suite { name: "weighted", default_trials: 500, run: weighted_trial },
    Suite { name: "tail", default_trials: 500, run: tail_trial },
    Suite { name: "remez", default_trials: 500, run: remez_trial },
    Suite { name: "kovrijkine", default_trials: 500, run: kovrijkine_trial },
    Suite { name: "ball_remez", default_trials: 500, run: ball_remez_trial },
    Suite { name: "chebyshev", default_trials: 50, run: chebyshev_trial },
    Suite { name: "hermite_parseval", default_trials: 50, run: parseval_trial },
    Suite { name: "hermite_ladder", default_trials: 100, run: ladder_trial },
    Suite { name: "hermite_recurrence", default_trials: 200, run: recurrence_trial },
    Suite { name: "region_integrals", default_trials: 100, run: region_trial },
    Suite { name: "gram_monotonicity", default_trials: 50, run: gram_monotone_trial },
    Suite { name: "gram_rayleigh", default_trials: 50, run: gram_rayleigh_trial },
    Suite { name: "hamilton", default_trials: 100, run: hamilton_trial },
    Suite { name: "singular_space_scaling", default_trials: 100, run: singular_scaling_trial },
    Suite { name: "weyl_algebra", default_trials: 50, run: weyl_trial },
    Suite { name: "semigroup", default_trials: 50, run: semigroup_trial },
    Suite { name: "control_duality", default_trials: 20, run: duality_trial },
    Suite { name: "control_monotonicity", default_trials: 20, run: control_monotone_trial },
];

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|s| s.name).collect()
}

/// Names of the suites behind the randomized estimate checks.
pub const ESTIMATE_SUITES: [&str; 6] = ["bernstein", "weighted", "tail", "remez", "kovrijkine", "ball_remez"];

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
}

/// Generator of trial `i` of `suite` under `master`.
pub fn trial_rng(master: u64, suite: &str, trial: usize) -> ChaCha8Rng {
    let mut seed = [0u8; 32];
    seed[..8].copy_from_slice(&master.to_le_bytes());
    seed[8..16].copy_from_slice(&(trial as u64).to_le_bytes());
    seed[16..24].copy_from_slice(&fnv1a(suite).to_le_bytes());
    ChaCha8Rng::from_seed(seed)
}

pub fn run_suite(name: &str, master: u64, trials: Option<usize>) -> Result<SuiteReport> {
    let suite = SUITES
        .iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::domain(format!("unknown suite `{name}`; known: {}", suite_names().join(", "))))?;
    let count = trials.unwrap_or(suite.default_trials);
    let outcomes: Vec<Trial> = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(master, name, i);
            (suite.run)(&mut rng).unwrap_or(Trial { margin: None, pass: false, inconclusive: false })
        })
        .collect();
    let failures = outcomes.iter().filter(|t| !t.pass && !t.inconclusive).count();
    let inconclusive = outcomes.iter().filter(|t| t.inconclusive).count();
    let worst_margin = outcomes
        .iter()
        .filter_map(|t| t.margin)
        .filter(|m| m.is_finite())
        .fold(None, |acc: Option<f64>, m| Some(acc.map_or(m, |a| a.min(m))));
    Ok(SuiteReport { suite: name.to_string(), trials: count, failures, worst_margin, seed: master, inconclusive })
}

/// Runs `all` or a single named suite.
pub fn run_suites(which: &str, master: u64, trials: Option<usize>) -> Result<Vec<SuiteReport>> {
    if which == "all" {
        SUITES.iter().map(|s| run_suite(s.name, master, trials)).collect()
    } else {
        Ok(vec![run_suite(which, master, trials)?])
    }
}

fn random_coeffs(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Complex64> {
    (0..dim).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

fn random_expansion(rng: &mut ChaCha8Rng, n: usize, cutoff: usize) -> Result<HermiteExpansion<f64>> {
    let dim = Basis::get(n, cutoff).len();
    HermiteExpansion::new(n, cutoff, random_coeffs(rng, dim))
}

fn random_multiindex(rng: &mut ChaCha8Rng, n: usize, max_order: usize) -> MultiIndex {
    let total = rng.gen_range(0..=max_order);
    let mut a = vec![0u32; n];
    for _ in 0..total {
        a[rng.gen_range(0..n)] += 1;
    }
    MultiIndex(a)
}

/// Disjoint sorted intervals inside `[lo, hi]`, 1 to `max_parts` of them.
fn random_intervals(rng: &mut ChaCha8Rng, lo: f64, hi: f64, max_parts: usize) -> Vec<(f64, f64)> {
    let parts = rng.gen_range(1..=max_parts);
    let mut cuts: Vec<f64> = (0..2 * parts).map(|_| rng.gen_range(lo..hi)).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.chunks(2).filter(|c| c[1] > c[0]).map(|c| (c[0], c[1])).collect()
}

fn region_from(intervals: &[(f64, f64)]) -> Result<Region> {
    let boxes = intervals.iter().map(|&(a, b)| Cuboid::new(vec![a], vec![b])).collect::<Result<Vec<_>>>()?;
    explicit(1, boxes)
}

fn bernstein_trial(rng: &mut ChaCha8Rng) -> Result<Trial> {
    let n = rng.gen_range(1..=2);
    let cutoff = rng.gen_range(0..=20);
    let f = random_expansion(rng, n, cutoff)?;
    let beta = random_multiindex(rng, n, 3);
    let delta = [0.25, 0.5, 1.0][rng.gen_range(0..3)];
    let c = bernstein_check(&f, delta, &beta)?;
    Ok(Trial::ratio(c.rhs, c.lhs))
}

fn weighted_trial(rng: &mut ChaCha8Rng) -> Result<Trial> {
    let n = rng.gen_range(1..=2);
    let cutoff = rng.gen_range(0..=10);
    let f = random_expansion(rng, n, cutoff)?;
    let beta = random_multiindex(rng, n, 2);
    let delta = rng.gen_range(0.05..0.95) / (32.0 * n as f64);
    let c = weighted_check(&f, delta, &beta)?;
    Ok(match c.verdict {
        Verdict::Inconclusive => Trial::inconclusive(),
        _ => Trial::ratio(c.rhs, c.lhs_x.upper() + c.lhs_xi.upper()),
    })
}

/// Even trials: single Hermite function tails. Odd trials: mass of a random
/// `f ∈ E_N` outside `[−c₁√(N+1), c₁√(N+1)]` against `¼‖f‖²`.
fn tail_trial(rng: &mut ChaCha8Rng) -> Result<Trial> {
    if rng.gen_bool(0.5) {
        let k = rng.gen_range(0..=20);
        let a = ((2 * k + 1) as f64).sqrt() + rng.gen_range(0.0..6.0);
        let t = hermite_tail_bound(k, a)?;
        Ok(Trial::ratio(t.bound, t.exact))
    } else {
        let cutoff = rng.gen_range(0..=30);
        let c = random_coeffs(rng, cutoff + 1);
        let a = tail_constant_cn(1)?.c_n * ((cutoff + 1) as f64).sqrt();
        let right = interval_block_f64(a, a + 60.0, cutoff);
        let mut mass = 0.0;
        for j in 0..=cutoff {
            for k in 0..=cutoff {
                // The left tail mirrors the right one with sign (−1)^{j+k}.
                let both = if (j + k) % 2 == 0 { 2.0 * right.values[(j, k)] } else { 0.0 };
                mass += (c[j].conj() * c[k]).re * both;
            }
        }
        let norm: f64 = c.iter().map(|z| z.norm_sqr()).sum();
        Ok(Trial::ratio(0.25 * norm, mass))
    }
}

fn sample_union(intervals: &[(f64, f64)], points: usize) -> Vec<f64> {
    let total: f64 = intervals.iter().map(|(a, b)| b - a).sum();
    let mut out = Vec::with_capacity(points + 2 * intervals.len());
    for &(a, b) in intervals {
        let m = (((b - a) / total) * points as f64).ceil().max(2.0) as usize;
        out.extend((0..m).map(|i| a + (b - a) * i as f64 / (m - 1) as f64));
    }
    out
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, v| acc * x + v)
}

fn remez_trial(rng: &mut ChaCha8Rng) -> Result<Trial> {
    let d = rng.gen_range(0..=8);
    let c: Vec<f64> = (0..=d).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let e = loop {
        let e = random_intervals(rng, -1.0, 1.0, 4);
        if e.iter().map(|(a, b)| b - a).sum::<f64>() >= 0.2 {
            break e;
        }
    };
    let measure: f64 = e.iter().map(|(a, b)| b - a).sum();
    let grid = 10_000;
    let sup_k = (0..grid).map(|i| horner(&c, -1.0 + 2.0 * i as f64 / (grid - 1) as f64).abs()).fold(0.0, f64::max);
    let sup_e = sample_union(&e, grid).into_iter().map(|x| horner(&c, x).abs()).fold(0.0, f64::max);
    if measure >= 2.0 {
        return Ok(Trial::ratio(sup_e, sup_k));
    }
    let bound = remez_bound(1, d, measure / 2.0)?.real;
    Ok(Trial::ratio(bound * sup_e, sup_k))
}

/// Analytic test functions with `Φ(0) = 1` on `I = [0, 1]`, `E` a union of
/// dyadic cells.
fn kovrijkine_trial(rng: &mut ChaCha8Rng) -> Result<Trial> {
    let level = rng.gen_range(2..=6);
    let cells = 1usize << level;
    let mut chosen: Vec<usize> = (0..cells).filter(|_| rng.gen_bool(0.4)).collect();
    if chosen.is_empty() {
        chosen.push(rng.gen_range(0..cells));
    }
    let h = 1.0 / cells as f64;
    let e: Vec<(f64, f64)> = chosen.iter().map(|&i| (i as f64 * h, (i + 1) as f64 * h)).collect();
    let measure = chosen.len() as f64 * h;
    let phi: Box<dyn Fn(Complex64) -> Complex64> = if rng.gen_bool(0.5) {
        let a = rng.gen_range(0.0..=1.0);
        Box::new(move |z: Complex64| (z * a).cos())
    } else {
        let terms: Vec<(Complex64, f64)> = (0..3)
            .map(|_| (Complex64::new(rng.gen_range(0.1..1.0), rng.gen_range(-0.5..0.5)), rng.gen_range(-1.0..1.0)))
            .collect();
        let total: Complex64 = terms.iter().map(|t| t.0).sum();
        Box::new(move |z: Complex64| {
            terms.iter().map(|(c, b)| c * (Complex64::i() * z * *b).exp()).sum::<Complex64>() / total
        })
    };
    let m = (0..4096)
        .map(|i| {
            let th = 2.0 * std::f64::consts::PI * i as f64 / 4096.0;
            phi(Complex64::from_polar(4.0, th)).norm()
        })
        .fold(1.0, f64::max);
    let grid = 10_000;
    let sup_i = (0..grid).map(|i| phi(Complex64::new(i as f64 / (grid - 1) as f64, 0.0)).norm()).fold(0.0, f64::max);
    let sup_e = sample_union(&e, grid).into_iter().map(|x| phi(Complex64::new(x, 0.0)).norm()).fold(0.0, f64::max);
    let bound = kovrijkine_interval_bound(crate::gram::DEFAULT_C_KOV, measure, m)?;
    Ok(Trial::ratio(bound * sup_e, sup_i))
}

/// `‖P‖²` over a union of intervals with a rule exact for degree ≤ 31.
fn poly_norm_sqr(c: &[Complex64], intervals: &[(f64, f64)]) -> f64 {
    let (x, w) = gauss_legendre::<f64>(16);
    intervals
        .iter()
        .map(|&(a, b)| {
            let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
            x.iter()
                .zip(&w)
                .map(|(xi, wi)| {
                    let t = mid + half * xi;
                    let v = c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, ci| acc * t + ci);
                    wi * half * v.norm_sqr()
                })
                .sum::<f64>()
        })
        .sum()
}

fn ball_remez_trial(rng: &mut ChaCha8Rng) -> Result<Trial> {
    let d = rng.gen_range(0..=6);
    let r = rng.gen_range(0.5..3.0);
    let c = random_coeffs(rng, d + 1);
    let omega = random_intervals(rng, -r, r, 3);
    let rho = omega.iter().map(|(a, b)| b - a).sum::<f64>() / (2.0 * r);
    if rho <= 0.0 {
        return Ok(Trial::check(true));
    }
    let bound = remez_ball_bound(1, d, rho.min(1.0))?;
    let whole = poly_norm_sqr(&c, &[(-r, r)]).sqrt();
    let part = poly_norm_sqr(&c, &omega).sqrt();
    Ok(Trial::ratio(bound * part, whole))
}

fn chebyshev_trial(rng: &mut ChaCha8Rng) -> Result<Trial> {
    let d = rng.gen_range(0..=30);
    let mut parts = Vec::new();
    for _ in 0..20 {
        let x: f64 = rng.gen_range(-1.0..=1.0);
        let t = chebyshev_value(ChebyshevKind::First, d, &x);
        let et = (t - chebyshev_first_explicit(d, x)).abs();
        parts.push(Trial::ratio(1e-9 * t.abs().max(1.0), et));
    }
    Ok(Trial::all(&parts))
}

fn parseval_trial(rng: &mut ChaCha8Rng) -> Result<Trial> {
    let n = rng.gen_range(1..=3);
    let cutoff = rng.gen_range(0..=if n == 3 { 10 } else { 15 });
    let f = random_expansion(rng, n, cutoff)?;
    let k = cutoff + 2;
    let (x, w) = gauss_hermite_function_form::<f64>(k);
    let mut total = 0.0;
    let mut idx = vec![0usize; n];
    loop {
        let pt: Vec<f64> = idx.iter().map(|&i| x[i]).collect();
        let wt: f64 = idx.iter().map(|&i| w[i]).product();
        total += wt * f.eval(&pt)?.norm_sqr();
        let mut axis = 0;
        while axis < n {
            idx[axis] += 1;
            if idx[axis] < k {
                break;
            }
            idx[axis] = 0;
            axis += 1;
        }
        if axis == n {
            break;
        }
    }
    let ns = f.norm_sqr();
    Ok(Trial::ratio(1e-10 * ns.max(1.0), (total - ns).abs()))
}

fn ladder_trial(rng: &mut ChaCha8Rng) -> Result<Trial> {
    let n = rng.gen_range(1..=3);
    let cutoff = rng.gen_range(1..=8);
    let j = rng.gen_range(0..n);
    let f = random_expansion(rng, n, cutoff)?;
    let g = random_expansion(rng, n, cutoff + 1)?;
    let raised = apply_ladder(&LadderMap::new(LadderKind::Raise(j), cutoff), &f)?;
    let lowered = apply_ladder(&LadderMap::new(LadderKind::Lower(j), cutoff + 1), &g)?;
    let lhs = raised.inner(&g);
    let rhs = f.inner(&lowered);
    let scale = f.norm() * g.norm();
    let adj = Trial::ratio(1e-12 * scale, (lhs - rhs).norm());
    // [a₋, a₊] = Id on E_N.
    let lr = apply_ladder(&LadderMap::with_target(LadderKind::Lower(j), cutoff + 1, cutoff)?, &raised)?;
    let down = apply_ladder(&LadderMap::new(LadderKind::Lower(j), cutoff), &f)?;
    let rl = apply_ladder(&LadderMap::with_target(LadderKind::Raise(j), down.cutoff(), cutoff)?, &down)?;
    let comm = lr.sub(&rl)?.sub(&f)?.norm();
    let com = Trial::ratio(1e-12 * f.norm(), comm);
    let h = harmonic_oscillator(&f)?;
    let basis = f.basis();
    let mut defect = 0.0f64;
    for (p, alpha) in basis.indices.iter().enumerate() {
        let want = f.coeffs()[p] * (2 * alpha.order() + n) as f64;
        defect = defect.max((h.coeffs()[p] - want).norm());
    }
    let harm = Trial::ratio(1e-12 * f.norm() * (2 * cutoff + n) as f64, defect);
    Ok(Trial::all(&[adj, com, harm]))
}

fn recurrence_trial(rng: &mut ChaCha8Rng) -> Result<Trial> {
    let k = rng.gen_range(0..=60);
    let x: f64 = rng.gen_range(-12.0..12.0);
    let fast = eval_hermite_1d(k, &x);
    let (exact, envelope) = with_precision(256, || {
        let xm = Mp::from_f64(x);
        let a = eval_hermite_1d(k, &xm);
        let b = eval_hermite_1d(k + 1, &xm);
        let env = (a.clone() * a.clone() + b.clone() * b).sqrt();
        (a.to_f64(), env.to_f64())
    });
    Ok(Trial::ratio(1e-12 * envelope, (fast - exact).abs()))
}

fn region_trial(rng: &mut ChaCha8Rng) -> Result<Trial> {
    let iv = random_intervals(rng, -8.0, 8.0, 3);
    if iv.is_empty() {
        return Ok(Trial::check(true));
    }
    let region = region_from(&iv)?;
    let j = rng.gen_range(0..=20);
    let mut k = rng.gen_range(0..=20);
    if k == j {
        k = (j + 1) % 21;
    }
    let exact = integrate_pair(&region, j, k)?.value;
    let quad: f64 = iv
        .iter()
        .map(|&(a, b)| adaptive_scalar(|x| eval_hermite_1d(j, &x) * eval_hermite_1d(k, &x), a, b, 1e-14).0)
        .sum();
    let exactness = Trial::ratio(1e-11, (exact - quad).abs());
    // Split the first interval in two and compare the pieces with the whole.
    let (a, b) = iv[0];
    let mid = rng.gen_range(a..b);
    let mut left: Vec<(f64, f64)> = vec![(a, mid)];
    let mut right: Vec<(f64, f64)> = vec![(mid, b)];
    left.extend_from_slice(&iv[1..]);
    right.truncate(1);
    let diag = rng.gen_range(0..=20);
    let whole = integrate_pair(&region, diag, diag)?.value;
    let parts = integrate_pair(&region_from(&left)?, diag, diag)?.value + integrate_pair(&region_from(&right)?, diag, diag)?.value;
    let additivity = Trial::ratio(1e-12, (whole - parts).abs());
    Ok(Trial::all(&[exactness, additivity]))
}

fn lambda_min(region: &Region, cutoff: usize) -> Result<(f64, f64)> {
    let g = gram_matrix(region, 1, cutoff)?;
    let slack = 10.0 * g.dim() as f64 * g.entry_error + 1e-15;
    Ok((sym_extremes(&g.matrix).0, slack))
}

fn gram_monotone_trial(rng: &mut ChaCha8Rng) -> Result<Trial> {
    let small = random_intervals(rng, -6.0, 4.0, 3);
    if small.is_empty() {
        return Ok(Trial::check(true));
    }
    let mut big = small.clone();
    big.push((4.5, rng.gen_range(5.0..8.0)));
    let cutoff = rng.gen_range(1..=16);
    let (l1, s1) = lambda_min(&region_from(&small)?, cutoff)?;
    let (l2, s2) = lambda_min(&region_from(&big)?, cutoff)?;
    let omega = Trial::ratio(l2 + s1 + s2, l1);
    let (l3, s3) = lambda_min(&region_from(&small)?, cutoff + 1)?;
    let in_n = Trial::ratio(l1 + s1 + s3, l3);
    Ok(Trial::all(&[omega, in_n]))
}

fn gram_rayleigh_trial(rng: &mut ChaCha8Rng) -> Result<Trial> {
    let cutoff = rng.gen_range(1..=12);
    let region = region_from(&[(rng.gen_range(-3.0..-0.5), 8.0)])?;
    let g = gram_matrix(&region, 1, cutoff)?;
    let (lo, _) = sym_extremes(&g.matrix);
    let c = random_coeffs(rng, cutoff + 1);
    let form: f64 = (0..=cutoff)
        .flat_map(|i| (0..=cutoff).map(move |j| (i, j)))
        .map(|(i, j)| (c[i].conj() * c[j]).re * g.matrix[(i, j)])
        .sum();
    let norm: f64 = c.iter().map(|z| z.norm_sqr()).sum();
    Ok(Trial::ratio((1.0 + 1e-9) / lo, norm / form))
}

fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> crate::linalg::Mat<Complex64> {
    let m = 2 * n;
    let mut q = crate::linalg::Mat::<Complex64>::zeros(m, m);
    for i in 0..m {
        for j in 0..=i {
            let v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            q[(i, j)] = v;
            q[(j, i)] = v;
        }
    }
    q
}

fn hamilton_trial(rng: &mut ChaCha8Rng) -> Result<Trial> {
    let n = rng.gen_range(1..=3);
    let q = QuadraticSymbol::new(n, random_symmetric(rng, n), "random")?;
    let h = hamilton_map(&q)?;
    Ok(Trial::ratio(1e-12 * q.q.max_abs().max(1.0), h.identity_defect))
}

fn span_distance(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let m = a.first().or(b.first()).map_or(0, |v| v.len());
    let proj = |basis: &[Vec<f64>], i: usize, j: usize| basis.iter().map(|v| v[i] * v[j]).sum::<f64>();
    let mut worst = 0.0f64;
    for i in 0..m {
        for j in 0..m {
            worst = worst.max((proj(a, i, j) - proj(b, i, j)).abs());
        }
    }
    worst
}

fn singular_scaling_trial(rng: &mut ChaCha8Rng) -> Result<Trial> {
    let q = match rng.gen_range(0..4) {
        0 => QuadraticSymbol::kramers_fokker_planck(rng.gen_range(0.2..3.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 })?,
        1 => QuadraticSymbol::free_laplacian(rng.gen_range(1..=3))?,
        2 => QuadraticSymbol::harmonic(rng.gen_range(1..=3))?,
        _ => {
            let n = rng.gen_range(1..=2);
            QuadraticSymbol::harmonic(n)?.add(&QuadraticSymbol::free_laplacian(n)?.scaled(rng.gen_range(0.1..2.0)))?
        }
    };
    let c = rng.gen_range(0.1..10.0);
    let s = singular_space(&hamilton_map(&q)?, DEFAULT_RANK_TOL)?;
    let t = singular_space(&hamilton_map(&q.scaled(c))?, DEFAULT_RANK_TOL)?;
    let same = s.dim() == t.dim() && s.k0 == t.k0 && span_distance(&s.basis, &t.basis) < 1e-8;
    Ok(Trial::check(same))
}

fn weyl_trial(rng: &mut ChaCha8Rng) -> Result<Trial> {
    let n = rng.gen_range(1..=2);
    let cutoff = rng.gen_range(0..=6);
    let q1 = QuadraticSymbol::new(n, random_symmetric(rng, n), "q1")?;
    let q2 = QuadraticSymbol::new(n, random_symmetric(rng, n), "q2")?;
    let a1 = weyl_quantize::<f64>(&q1, cutoff)?.matrix;
    let a2 = weyl_quantize::<f64>(&q2, cutoff)?.matrix;
    let sum = weyl_quantize::<f64>(&q1.add(&q2)?, cutoff)?.matrix;
    let scale = (2 * cutoff + 2 * n) as f64 * 4.0;
    let lin = Trial::ratio(1e-12 * scale, sum.sub(&a1.add(&a2)).max_abs());
    let conj = weyl_quantize::<f64>(&q1.conjugate(), cutoff)?.matrix;
    let adj = Trial::ratio(1e-12 * scale, conj.sub(&a1.adjoint()).max_abs());
    Ok(Trial::all(&[lin, adj]))
}

fn semigroup_trial(rng: &mut ChaCha8Rng) -> Result<Trial> {
    let q = if rng.gen_bool(0.5) {
        QuadraticSymbol::harmonic(rng.gen_range(1..=2))?
    } else {
        QuadraticSymbol::kramers_fokker_planck(rng.gen_range(0.3..2.0))?
    }
    .scaled(rng.gen_range(0.2..2.0));
    let cutoff = rng.gen_range(1..=8);
    let a = weyl_quantize::<f64>(&q, cutoff)?;
    let f = random_expansion(rng, q.n, cutoff)?;
    let (s, t) = (rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
    let whole = evolve(&a, &f, s + t)?.state;
    let steps = evolve(&a, &evolve(&a, &f, t)?.state, s)?.state;
    Ok(Trial::ratio(1e-9 * f.norm(), whole.sub(&steps)?.norm()))
}

fn duality_trial(rng: &mut ChaCha8Rng) -> Result<Trial> {
    let cutoff = rng.gen_range(1..=8);
    let horizon = rng.gen_range(0.5..2.0);
    let p = ControlProblem::new(QuadraticSymbol::harmonic(1)?, full_space(1, 40.0)?, cutoff, horizon)?;
    let f0 = random_expansion(rng, 1, cutoff)?;
    let r = hum_control(&p, &f0)?;
    let want: f64 = f0
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let l = (2 * k + 1) as f64;
            let e = (-2.0 * l * horizon).exp();
            c.norm_sqr() * 2.0 * l * e / (1.0 - e)
        })
        .sum();
    Ok(Trial::ratio(1e-6 * want, (r.cost - want).abs()))
}

/// Nested control sets and nested horizons on small harmonic problems.
fn control_monotone_trial(rng: &mut ChaCha8Rng) -> Result<Trial> {
    let cutoff = rng.gen_range(1..=6);
    let small = {
        let a = rng.gen_range(-2.0..-0.5);
        vec![(a, a + rng.gen_range(0.8..2.0))]
    };
    let mut big = small.clone();
    big.push((small[0].1 + 0.2, small[0].1 + rng.gen_range(0.5..2.0)));
    let horizon = rng.gen_range(0.5..1.5);
    let h = QuadraticSymbol::harmonic(1)?;
    let p1 = ControlProblem::new(h.clone(), region_from(&small)?, cutoff, horizon)?;
    let p2 = ControlProblem::new(h, region_from(&big)?, cutoff, horizon)?;
    let f0 = random_expansion(rng, 1, cutoff)?;
    let c1 = hum_control(&p1, &f0)?.cost;
    let c2 = hum_control(&p2, &f0)?.cost;
    let o1 = observability_constant(&p1)?.c_t;
    let o2 = observability_constant(&p2)?.c_t;
    let o_long = observability_constant(&p1.with_horizon(horizon * 1.5))?.c_t;
    Ok(Trial::all(&[
        Trial::ratio(c1 * (1.0 + 1e-6), c2),
        Trial::ratio(o1 * (1.0 + 1e-6), o2),
        Trial::ratio(o1 * (1.0 + 1e-6), o_long),
    ]))
}
