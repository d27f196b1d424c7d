//! Acceptance checks AC1–AC10. Runs as a plain binary so that every line is
//! printed; exits nonzero when any criterion fails.

use std::process::Command;
use std::time::Instant;

use hermite_obs_core::control::{cost_blowup_study, hum_control, lr_staircase, ControlProblem, StaircaseOptions};
use hermite_obs_core::gram::{gram_matrix, scaling_study, spectral_constant, BoundParams, GrowthModel, PrecisionPolicy};
use hermite_obs_core::hermite::{
    apply_ladder, harmonic_oscillator, hermite_column, Basis, HermiteExpansion, LadderKind, LadderMap,
};
use hermite_obs_core::linalg::gauss_hermite_function_form;
use hermite_obs_core::quadratic::{
    dissipation_check, galerkin_convergence, hamilton_map, singular_space, singular_space_exact, weyl_quantize,
    QuadraticSymbol, DEFAULT_RANK_TOL,
};
use hermite_obs_core::regions::{ball_1d, full_space, half_space, make_periodic_thick, truncate_radius, Region};
use hermite_obs_core::verify::{run_suite, ESTIMATE_SUITES};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(cond: bool, ok: String, bad: String) -> Outcome {
    if cond {
        Ok(ok)
    } else {
        Err(bad)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn random_expansion(rng: &mut ChaCha8Rng, n: usize, cutoff: usize) -> HermiteExpansion<f64> {
    let dim = Basis::get(n, cutoff).len();
    let c = (0..dim).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    HermiteExpansion::new(n, cutoff, c).unwrap()
}

/// Gauss-Hermite Gram matrix of `{Φ_α : |α| ≤ N}` in dimension `n`.
fn quadrature_gram_defect(n: usize, cutoff: usize) -> f64 {
    let k = cutoff + 2;
    let (x, w) = gauss_hermite_function_form::<f64>(k);
    let cols: Vec<Vec<f64>> = x.iter().map(|xi| hermite_column(cutoff, xi)).collect();
    let basis = Basis::get(n, cutoff);
    let dim = basis.len();
    let mut g = vec![0.0; dim * dim];
    let mut idx = vec![0usize; n];
    loop {
        let wt: f64 = idx.iter().map(|&i| w[i]).product();
        let vals: Vec<f64> = basis
            .indices
            .iter()
            .map(|a| a.0.iter().zip(&idx).map(|(&d, &i)| cols[i][d as usize]).product())
            .collect();
        for p in 0..dim {
            for q in 0..dim {
                g[p * dim + q] += wt * vals[p] * vals[q];
            }
        }
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
    let mut worst = 0.0f64;
    for p in 0..dim {
        for q in 0..dim {
            worst = worst.max((g[p * dim + q] - if p == q { 1.0 } else { 0.0 }).abs());
        }
    }
    worst
}

fn ac1() -> Outcome {
    let mut ortho = 0.0f64;
    for n in 1..=3 {
        ortho = ortho.max(quadrature_gram_defect(n, 10));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut comm = 0.0f64;
    let mut harm = 0.0f64;
    for n in 1..=3 {
        for cutoff in [1usize, 5, 10] {
            let f = random_expansion(&mut rng, n, cutoff);
            for j in 0..n {
                let up = apply_ladder(&LadderMap::new(LadderKind::Raise(j), cutoff), &f).map_err(err)?;
                let lr = apply_ladder(&LadderMap::with_target(LadderKind::Lower(j), cutoff + 1, cutoff).map_err(err)?, &up)
                    .map_err(err)?;
                let down = apply_ladder(&LadderMap::new(LadderKind::Lower(j), cutoff), &f).map_err(err)?;
                let rl = apply_ladder(&LadderMap::with_target(LadderKind::Raise(j), down.cutoff(), cutoff).map_err(err)?, &down)
                    .map_err(err)?;
                let d = lr.sub(&rl).map_err(err)?.sub(&f).map_err(err)?;
                comm = comm.max(d.coeffs().iter().map(|z| z.norm()).fold(0.0, f64::max));
            }
            let h = harmonic_oscillator(&f).map_err(err)?;
            for (p, a) in f.basis().indices.iter().enumerate() {
                let want = f.coeffs()[p] * (2 * a.order() + n) as f64;
                harm = harm.max((h.coeffs()[p] - want).norm() / want.norm().max(1.0));
            }
        }
    }
    check(
        ortho <= 1e-10 && comm <= 1e-12 && harm <= 1e-12,
        format!("orthonormality defect {ortho:.2e}, commutator {comm:.2e}, eigen-relation {harm:.2e}"),
        format!("orthonormality defect {ortho:.2e} (≤1e-10), commutator {comm:.2e}, eigen-relation {harm:.2e} (≤1e-12)"),
    )
}

fn ac2() -> Outcome {
    let g = gram_matrix(&half_space(1, 0, 0.0, 40.0).map_err(err)?, 1, 1).map_err(err)?;
    let off = (2.0 * std::f64::consts::PI).powf(-0.5);
    let want = [[0.5, off], [off, 0.5]];
    let mut worst = 0.0f64;
    for i in 0..2 {
        for j in 0..2 {
            worst = worst.max((g.matrix[(i, j)] - want[i][j]).abs());
        }
    }
    let s = spectral_constant(&g, &PrecisionPolicy::default()).map_err(err)?;
    let c1 = (0.5 - off).powf(-0.5);
    let dc = (s.c_n - c1).abs();
    check(
        worst <= 1e-10 && dc <= 1e-8,
        format!("entries within {worst:.2e}, C_1 = {:.12} (closed form {c1:.12})", s.c_n),
        format!("entry error {worst:.2e}, C_1 = {} vs {c1}", s.c_n),
    )
}

fn radius(cut: usize) -> hermite_obs_core::Result<f64> {
    truncate_radius(cut, 1, 2.0)
}

fn ac3() -> Outcome {
    let cutoffs: Vec<usize> = (4..=64).collect();
    let policy = PrecisionPolicy::default();
    type Maker = Box<dyn Fn(usize) -> hermite_obs_core::Result<Region> + Sync>;
    let mut cases: Vec<(String, Maker)> = vec![
        ("ball B(0,1)".into(), Box::new(|_| ball_1d(0.0, 1.0))),
        ("half-line".into(), Box::new(|c| half_space(1, 0, 0.0, radius(c)?))),
    ];
    for gamma in [0.3, 0.5, 0.8] {
        cases.push((format!("thick γ={gamma}"), Box::new(move |c| make_periodic_thick(1, 1.0, gamma, radius(c)?))));
    }
    let mut notes = Vec::new();
    let mut fail = Vec::new();
    for (name, make) in &cases {
        let params = BoundParams::for_region(&make(64).map_err(err)?).ok_or("no bound for region")?.map_err(err)?;
        let r = scaling_study(make.as_ref(), 1, &cutoffs, &policy, Some(&params)).map_err(err)?;
        let unchecked = r.rows.iter().filter(|row| row.dominated.is_none()).count();
        notes.push(format!("{name}: {} violations, {} unresolved", r.bound_violations.len(), r.singular.len()));
        if !r.bound_violations.is_empty() || unchecked > 0 {
            fail.push(format!("{name}: violations {:?}, {unchecked} rows without a bound", r.bound_violations));
        }
    }
    if fail.is_empty() {
        Ok(notes.join("; "))
    } else {
        Err(fail.join("; "))
    }
}

fn ac4() -> Outcome {
    let cutoffs = [9usize, 16, 25, 36, 49, 64];
    let policy = PrecisionPolicy::default();
    let mut notes = Vec::new();
    let mut fail = Vec::new();
    for gamma in [0.3, 0.5, 0.8] {
        let make = move |c: usize| make_periodic_thick(1, 1.0, gamma, radius(c)?);
        let r = scaling_study(&make, 1, &cutoffs, &policy, None).map_err(err)?;
        notes.push(format!("γ={gamma}: {}", r.best_model.map_or("none".into(), |m| format!("{m:?}"))));
        if r.best_model != Some(GrowthModel::SqrtN) || !r.singular.is_empty() {
            fail.push(format!("γ={gamma}: best {:?}, unresolved {:?}", r.best_model, r.singular));
        }
    }
    let make = |c: usize| half_space(1, 0, 0.0, radius(c)?);
    let r = scaling_study(&make, 1, &cutoffs, &policy, None).map_err(err)?;
    let p = r.exponent().unwrap_or(f64::NAN);
    notes.push(format!("half-line exponent p = {p:.3}"));
    if !(p >= 0.7) || !r.singular.is_empty() {
        fail.push(format!("half-line exponent {p}, unresolved {:?}", r.singular));
    }
    if fail.is_empty() {
        Ok(notes.join("; "))
    } else {
        Err(fail.join("; "))
    }
}

fn ac5() -> Outcome {
    let mut notes = Vec::new();
    let mut fail = Vec::new();
    for name in ESTIMATE_SUITES {
        let r = run_suite(name, 20240601, Some(500)).map_err(err)?;
        notes.push(format!("{name} {}/{}", r.trials - r.failures - r.inconclusive, r.trials));
        if !r.passed() || r.trials < 500 {
            fail.push(format!("{name}: {} failures, {} inconclusive", r.failures, r.inconclusive));
        }
    }
    if fail.is_empty() {
        Ok(notes.join(", "))
    } else {
        Err(fail.join("; "))
    }
}

fn ac6() -> Outcome {
    let harmonic = singular_space(&hamilton_map(&QuadraticSymbol::harmonic(1).map_err(err)?).map_err(err)?, DEFAULT_RANK_TOL)
        .map_err(err)?;
    let kfp = QuadraticSymbol::kramers_fokker_planck(1.0).map_err(err)?;
    let kfp_exact = singular_space_exact(&hamilton_map(&kfp).map_err(err)?);
    let kfp_float = singular_space(&hamilton_map(&kfp).map_err(err)?, DEFAULT_RANK_TOL).map_err(err)?;
    let lap = singular_space(&hamilton_map(&QuadraticSymbol::free_laplacian(1).map_err(err)?).map_err(err)?, DEFAULT_RANK_TOL)
        .map_err(err)?;
    let mut scaling_ok = true;
    for q in [QuadraticSymbol::harmonic(2).map_err(err)?, kfp.clone(), QuadraticSymbol::free_laplacian(2).map_err(err)?] {
        let base = singular_space(&hamilton_map(&q).map_err(err)?, DEFAULT_RANK_TOL).map_err(err)?;
        for c in [0.1, 3.0, 250.0] {
            let s = singular_space(&hamilton_map(&q.scaled(c)).map_err(err)?, DEFAULT_RANK_TOL).map_err(err)?;
            scaling_ok &= s.dim() == base.dim() && s.k0 == base.k0;
        }
    }
    let ok = harmonic.is_trivial()
        && harmonic.k0 == Some(0)
        && kfp_exact.is_trivial()
        && kfp_exact.k0 == Some(1)
        && kfp_float.k0 == Some(1)
        && !lap.is_trivial()
        && scaling_ok;
    check(
        ok,
        format!("harmonic k0=0, KFP k0=1 (exact), Laplacian dim S={}, scaling invariant", lap.dim()),
        format!(
            "harmonic {:?}/{:?}, KFP exact {:?}/{:?}, Laplacian dim {}, scaling {scaling_ok}",
            harmonic.dim(),
            harmonic.k0,
            kfp_exact.dim(),
            kfp_exact.k0,
            lap.dim()
        ),
    )
}

fn ac7() -> Outcome {
    let mut dev = 0.0f64;
    for n in 1..=2 {
        let a = weyl_quantize::<f64>(&QuadraticSymbol::harmonic(n).map_err(err)?, 12).map_err(err)?;
        let r = dissipation_check(&a, 0, 1.0, 1.0, &[0.1, 0.5, 1.0, 2.0], &[1, 2, 4, 8, 11]).map_err(err)?;
        dev = dev.max(r.harmonic_deviation.unwrap_or(f64::INFINITY));
    }
    let kfp = QuadraticSymbol::kramers_fokker_planck(1.0).map_err(err)?;
    let cutoff = 18;
    let ks: Vec<usize> = (1..=6).collect();
    let times = [0.5, 1.0, 2.0];
    let a = weyl_quantize::<f64>(&kfp, cutoff).map_err(err)?;
    let r = dissipation_check(&a, 1, 1.0, 1.0, &times, &ks).map_err(err)?;
    let worst_r2 = r.fits.iter().map(|f| f.fit.r_squared).fold(f64::INFINITY, f64::min);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let f0 = random_expansion(&mut rng, 2, 6);
    let gap = times.iter().map(|&t| galerkin_convergence(&kfp, &f0, t)).collect::<Result<Vec<_>, _>>().map_err(err)?;
    let gap = gap.into_iter().fold(0.0, f64::max);
    let ok = dev <= 1e-9 && worst_r2 >= 0.9 && r.fits.len() == times.len() && cutoff >= 3 * ks[ks.len() - 1];
    check(
        ok,
        format!("harmonic deviation {dev:.2e}; KFP worst R² {worst_r2:.4} (N={cutoff}); Galerkin gap {gap:.2e}"),
        format!("harmonic deviation {dev:.2e} (≤1e-9), KFP worst R² {worst_r2:.4} (≥0.9)"),
    )
}

fn ac8() -> Outcome {
    let h = QuadraticSymbol::harmonic(1).map_err(err)?;
    let mut notes = Vec::new();
    let mut fail = Vec::new();
    // ω = ℝ: per-mode closed form.
    let p = ControlProblem::new(h.clone(), full_space(1, 40.0).map_err(err)?, 8, 1.0).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let f0 = random_expansion(&mut rng, 1, 8);
    let r = hum_control(&p, &f0).map_err(err)?;
    let want: f64 = f0
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let l = (2 * k + 1) as f64;
            let e = (-2.0 * l).exp();
            c.norm_sqr() * 2.0 * l * e / (1.0 - e)
        })
        .sum();
    let rel = (r.cost - want).abs() / want;
    notes.push(format!("ω=ℝ cost rel. error {rel:.2e}"));
    if rel > 1e-6 {
        fail.push(format!("ω=ℝ cost {} vs {want}", r.cost));
    }
    // Thick ω, 256-bit Gramian solve.
    let thick = make_periodic_thick(1, 1.0, 0.6, radius(20).map_err(err)?).map_err(err)?;
    let p = ControlProblem::new(h.clone(), thick.clone(), 20, 1.0).map_err(err)?.with_precision_bits(Some(256));
    let f0 = random_expansion(&mut rng, 1, 20);
    let r = hum_control(&p, &f0).map_err(err)?;
    notes.push(format!("thick HUM residual {:.2e}", r.residual));
    if !(r.residual <= 1e-6) || r.partial {
        fail.push(format!("thick HUM residual {} (partial {})", r.residual, r.partial));
    }
    // Staircase.
    let thick16 = make_periodic_thick(1, 1.0, 0.6, radius(16).map_err(err)?).map_err(err)?;
    let p = ControlProblem::new(h, thick16, 16, 1.0).map_err(err)?;
    let f0 = random_expansion(&mut rng, 1, 16);
    let s = lr_staircase(&p, &f0, &StaircaseOptions::default()).map_err(err)?;
    let energies: Vec<f64> = s.stages.iter().map(|st| st.energy_after).collect();
    let decreasing = energies.windows(2).all(|w| w[1] < w[0]);
    // Geometric: every stage removes at least half of the remaining energy.
    let ratios: Vec<f64> = energies.windows(2).map(|w| w[1] / w[0]).collect();
    let geometric = decreasing && !ratios.is_empty() && ratios.iter().all(|q| *q < 0.5);
    notes.push(format!("staircase residual {:.2e}, {} stages", s.residual, s.stages.len()));
    if !(s.residual <= 1e-4) || !geometric {
        fail.push(format!("staircase residual {}, stage energies {energies:?}", s.residual));
    }
    if fail.is_empty() {
        Ok(notes.join("; "))
    } else {
        Err(fail.join("; "))
    }
}

fn ac9() -> Outcome {
    let horizons = [1.0, 0.5, 0.25, 0.125];
    let h = QuadraticSymbol::harmonic(1).map_err(err)?;
    let region = make_periodic_thick(1, 1.0, 0.3, radius(16).map_err(err)?).map_err(err)?;
    let p = ControlProblem::new(h, region, 16, 1.0).map_err(err)?;
    let study = cost_blowup_study(&p, &horizons, 0).map_err(err)?;
    let r2 = study.fit_for(1).map_or(f64::NAN, |f| f.r_squared);
    let kfp = QuadraticSymbol::kramers_fokker_planck(1.0).map_err(err)?;
    let region2 = make_periodic_thick(2, 1.0, 0.5, truncate_radius(6, 2, 2.0).map_err(err)?).map_err(err)?;
    let p2 = ControlProblem::new(kfp, region2, 6, 1.0).map_err(err)?;
    let k = cost_blowup_study(&p2, &horizons, 1).map_err(err)?;
    let r2_1 = k.fit_for(1).map_or(f64::NAN, |f| f.rss);
    let r2_3 = k.fit_for(3).map_or(f64::NAN, |f| f.rss);
    let harmonic_ok = r2 >= 0.9 && study.excluded.is_empty();
    let kfp_ok = k.preferred_exponent == Some(3);
    check(
        harmonic_ok && kfp_ok,
        format!("harmonic R² {r2:.4}; KFP prefers T^-3 (rss {r2_3:.3e} vs {r2_1:.3e})"),
        format!(
            "harmonic R² {r2:.4} (≥0.9{}); KFP preferred exponent {} (rss T^-1 {r2_1:.3e}, T^-3 {r2_3:.3e})",
            if study.excluded.is_empty() { "" } else { ", with excluded rows" },
            k.preferred_exponent.map_or("none".into(), |e| e.to_string())
        ),
    )
}

fn ac10() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_hermite-obs");
    let dir = tempfile::tempdir().map_err(err)?;
    let run = |sub: &str| -> Result<(Vec<u8>, Vec<u8>, i32), String> {
        let out_dir = dir.path().join(sub);
        let o = Command::new(bin)
            .args(["verify", "--seed", "7", "--out"])
            .arg(&out_dir)
            .arg("--mkdirs")
            .output()
            .map_err(err)?;
        let csv = std::fs::read(out_dir.join("verify_verify.csv")).map_err(err)?;
        Ok((o.stdout, csv, o.status.code().unwrap_or(-1)))
    };
    let a = run("a")?;
    let b = run("b")?;
    check(
        a.0 == b.0 && a.1 == b.1 && !a.0.is_empty(),
        format!("identical JSON ({} bytes) and CSV ({} bytes); exit {}", a.0.len(), a.1.len(), a.2),
        "reports differ between runs".into(),
    )
}

fn main() {
    let criteria: [(&str, &str, fn() -> Outcome); 10] = [
        ("AC1", "orthonormality and ladder algebra", ac1),
        ("AC2", "half-line Gram exactness", ac2),
        ("AC3", "measured C_N below theoretical bounds", ac3),
        ("AC4", "thick-set scaling shape", ac4),
        ("AC5", "randomized estimate suites", ac5),
        ("AC6", "singular spaces", ac6),
        ("AC7", "dissipation", ac7),
        ("AC8", "control synthesis", ac8),
        ("AC9", "cost blowup", ac9),
        ("AC10", "determinism of verify", ac10),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| a.starts_with("AC")).collect();
    let mut failed = 0;
    for (id, title, f) in criteria {
        if !filter.is_empty() && !filter.iter().any(|x| x == id) {
            continue;
        }
        let t = Instant::now();
        let out = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match out {
            Ok(detail) => println!("{id} PASS {title} [{secs:.1}s]: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("{id} FAIL {title} [{secs:.1}s]: {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
