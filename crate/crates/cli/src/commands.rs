use hermite_obs_core::control::{
    cost_blowup_study, hum_control, lr_staircase, observability_constant, ControlProblem, ObservabilityStatus,
    StaircaseOptions,
};
use hermite_obs_core::gram::{
    gram_matrix, scaling_study, spectral_constant, theoretical_bound, BoundParams, SpectralStatus, DEFAULT_C_KOV,
    DEFAULT_C_SOBOLEV,
};
use hermite_obs_core::hermite::{eval_expansion, Basis, HermiteExpansion, MultiIndex};
use hermite_obs_core::poly::{
    bernstein_check, hermite_tail_bound, remez_ball_bound, remez_bound, remez_f, tail_constant_cn, weighted_check,
};
use hermite_obs_core::quadratic::{
    dissipation_check, evolve, galerkin_convergence, hamilton_map, parse_symbol_spec, singular_space,
    singular_space_exact, weyl_quantize, QuadraticSymbol, SymbolFile, DEFAULT_RANK_TOL,
};
use hermite_obs_core::regions::{parse_region_spec, truncate_radius, Region, RegionFile};
use hermite_obs_core::verify::run_suites;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::{parse_usize_list, Resolved};
use crate::emit::{Bundle, Cell, Outcome, Table};
use crate::CliError;

/// Safety factor on `c_n√(N+1)` for default truncation radii.
pub const DEFAULT_RADIUS_SAFETY: f64 = 2.0;

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn or_none<T: std::fmt::Debug>(v: Option<T>) -> String {
    v.map_or_else(|| "none".to_string(), |x| format!("{x:?}"))
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

impl Resolved {
    fn radius(&self, cutoff: usize) -> Result<f64, CliError> {
        match self.config.radius {
            Some(r) => Ok(r),
            None => Ok(truncate_radius(cutoff, self.n, DEFAULT_RADIUS_SAFETY)?),
        }
    }

    /// Region for cutoff `N`; spec errors are configuration errors.
    fn region(&self, cutoff: usize) -> Result<Region, CliError> {
        match (&self.config.region, &self.config.region_file) {
            (Some(_), Some(_)) => Err(usage("give either --region or --region-file")),
            (Some(spec), None) => parse_region_spec(spec, self.n, self.radius(cutoff)?).map_err(|e| usage(e.to_string())),
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                let f: RegionFile = serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
                if f.n != self.n {
                    return Err(usage(format!("region file is {}-dimensional but n = {}", f.n, self.n)));
                }
                Region::from_file(&f).map_err(|e| usage(e.to_string()))
            }
            (None, None) => Err(usage("missing --region")),
        }
    }

    fn symbol(&self) -> Result<QuadraticSymbol, CliError> {
        match (&self.config.symbol, &self.config.symbol_file) {
            (Some(_), Some(_)) => Err(usage("give either --symbol or --symbol-file")),
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                let f: SymbolFile = serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
                QuadraticSymbol::from_file(&f).map_err(|e| usage(e.to_string()))
            }
            (spec, None) => {
                let spec = spec.as_deref().unwrap_or("harmonic");
                let s = parse_symbol_spec(spec, self.n).map_err(|e| usage(e.to_string()))?;
                if self.config.n.is_some() && s.n != self.n {
                    return Err(usage(format!("symbol `{spec}` acts on ℝ^{} but n = {}", s.n, self.n)));
                }
                Ok(s)
            }
        }
    }

    fn bound_params(&self, region: &Region) -> Result<Option<BoundParams>, CliError> {
        match BoundParams::for_region(region) {
            None => Ok(None),
            Some(p) => Ok(Some(p?.with_constants(
                self.config.c_sobolev.unwrap_or(DEFAULT_C_SOBOLEV),
                self.config.c_kov.unwrap_or(DEFAULT_C_KOV),
            )?)),
        }
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut seed = [0u8; 32];
        seed[..8].copy_from_slice(&self.seed.to_le_bytes());
        seed[8..16].copy_from_slice(&stream.to_le_bytes());
        ChaCha8Rng::from_seed(seed)
    }

    /// Initial datum on `E_N` in dimension `n`.
    fn datum(&self, n: usize, cutoff: usize) -> Result<HermiteExpansion<f64>, CliError> {
        if let Some(path) = &self.config.initial_file {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let rec = serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            let f = HermiteExpansion::from_record(&rec).map_err(|e| usage(e.to_string()))?;
            if f.dim() != n || f.cutoff() != cutoff {
                return Err(usage(format!("initial datum lives on E_{} in dimension {}", f.cutoff(), f.dim())));
            }
            return Ok(f);
        }
        let dim = Basis::get(n, cutoff).len();
        let spec = self.config.initial.as_deref().unwrap_or("random");
        let coeffs: Vec<Complex64> = match spec.split_once(':') {
            Some(("basis", i)) => {
                let i: usize = i.trim().parse().map_err(|_| usage(format!("bad basis index in `{spec}`")))?;
                if i >= dim {
                    return Err(usage(format!("basis index {i} outside E_{cutoff} (dimension {dim})")));
                }
                (0..dim).map(|j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect()
            }
            _ => match spec {
                "ground" => (0..dim).map(|j| Complex64::new(if j == 0 { 1.0 } else { 0.0 }, 0.0)).collect(),
                "ones" => vec![Complex64::new(1.0 / (dim as f64).sqrt(), 0.0); dim],
                "random" => {
                    let mut rng = self.rng(1);
                    let c: Vec<Complex64> =
                        (0..dim).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
                    let norm = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                    c.into_iter().map(|z| z / norm).collect()
                }
                _ => return Err(usage(format!("unknown initial datum `{spec}`"))),
            },
        };
        Ok(HermiteExpansion::new(n, cutoff, coeffs)?)
    }
}

fn alpha_string(a: &MultiIndex) -> String {
    a.0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

fn parse_points(spec: &str, n: usize) -> Result<Vec<Vec<f64>>, CliError> {
    spec.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let x: Vec<f64> = p
                .split(',')
                .map(|v| v.trim().parse::<f64>().map_err(|_| usage(format!("bad point `{p}`"))))
                .collect::<Result<_, _>>()?;
            if x.len() != n {
                return Err(usage(format!("point `{p}` has {} coordinates, expected {n}", x.len())));
            }
            Ok(x)
        })
        .collect()
}

pub fn basis(r: &Resolved) -> Result<Bundle, CliError> {
    let cutoff = r.single_cutoff()?;
    let b = Basis::get(r.n, cutoff);
    let mut table = Table::new("indices", &["index", "alpha", "order"]);
    for (i, a) in b.indices.iter().enumerate() {
        table.push(vec![i.into(), alpha_string(a).into(), a.order().into()]);
    }
    let mut result = json!({
        "n": r.n,
        "N": cutoff,
        "dim": b.len(),
        "order": "grlex",
        "indices": b.indices.iter().map(|a| a.0.clone()).collect::<Vec<_>>(),
    });
    let mut tables = vec![table];
    if let Some(spec) = &r.config.points {
        let pts = parse_points(spec, r.n)?;
        let mut vt = Table::new("values", &["point", "index", "value"]);
        let mut rows = Vec::new();
        for (p, x) in pts.iter().enumerate() {
            let mut vals = Vec::with_capacity(b.len());
            for (i, a) in b.indices.iter().enumerate() {
                let f = HermiteExpansion::basis_vector(r.n, cutoff, a, Complex64::new(1.0, 0.0))?;
                let v = eval_expansion(&f, x)?.re;
                vt.push(vec![p.into(), i.into(), v.into()]);
                vals.push(v);
            }
            rows.push(json!({"x": x, "values": vals}));
        }
        result["values"] = Value::Array(rows);
        tables.push(vt);
    }
    let mut bundle = Bundle::new(result, format!("E_{cutoff} in dimension {} has {} basis functions\n", r.n, b.len()));
    bundle.tables = tables;
    Ok(bundle)
}

pub fn gram(r: &Resolved) -> Result<Bundle, CliError> {
    let cutoff = r.single_cutoff()?;
    let region = r.region(cutoff)?;
    let g = gram_matrix(&region, r.n, cutoff)?;
    let dim = g.dim();
    let mut table = Table::new("matrix", &["i", "j", "value"]);
    for i in 0..dim {
        for j in 0..dim {
            table.push(vec![i.into(), j.into(), g.matrix[(i, j)].into()]);
        }
    }
    let rows: Vec<Vec<f64>> = (0..dim).map(|i| (0..dim).map(|j| g.matrix[(i, j)]).collect()).collect();
    let result = json!({"summary": to_value(&g.summary()), "matrix": rows, "symmetry_defect": g.symmetry_defect()});
    let mut bundle =
        Bundle::new(result, format!("Gram matrix of dimension {dim}, entry error ≤ {:e}\n", g.entry_error));
    bundle.tables.push(table);
    Ok(bundle)
}

fn scaling_row_cells(
    cutoff: usize,
    dim: usize,
    c: f64,
    lambda_min: f64,
    bound: f64,
    variant: &str,
    bits: u32,
) -> Vec<Cell> {
    vec![cutoff.into(), dim.into(), c.into(), lambda_min.into(), bound.into(), variant.into(), bits.into()]
}

const SCALING_COLUMNS: [&str; 7] = ["N", "dim", "C_measured", "lambda_min", "bound", "bound_variant", "precision_bits"];

pub fn constant(r: &Resolved) -> Result<Bundle, CliError> {
    let cutoff = r.single_cutoff()?;
    let region = r.region(cutoff)?;
    let g = gram_matrix(&region, r.n, cutoff)?;
    let s = spectral_constant(&g, &r.policy)?;
    let bound = r.bound_params(&region)?.map(|p| theoretical_bound(&p, cutoff)).transpose()?;
    let mut table = Table::new("constant", &SCALING_COLUMNS);
    let (bv, bname) = bound.as_ref().map_or((f64::NAN, "none".to_string()), |b| (b.value, b.variant.clone()));
    table.push(scaling_row_cells(cutoff, g.dim(), s.c_n, s.lambda_min, bv, &bname, s.precision_bits));
    let result = json!({
        "N": cutoff,
        "n": r.n,
        "dim": g.dim(),
        "C_N": s.c_n,
        "lambda_min": s.lambda_min,
        "spectral": to_value(&s),
        "bound": to_value(&bound),
    });
    let mut bundle = Bundle::new(
        result,
        format!("C_{cutoff} = {:.12e} (λ_min = {:.6e}, {} bits, {:?})\n", s.c_n, s.lambda_min, s.precision_bits, s.status),
    );
    if s.status != SpectralStatus::Resolved {
        bundle.outcome = Outcome::PrecisionCeiling;
    }
    bundle.tables.push(table);
    Ok(bundle)
}

pub fn scaling(r: &Resolved) -> Result<Bundle, CliError> {
    let cutoffs = r.cutoff_list()?.to_vec();
    let top = *cutoffs.iter().max().expect("nonempty");
    let params = r.bound_params(&r.region(top)?)?;
    let make = |cut: usize| -> hermite_obs_core::Result<Region> {
        r.region(cut).map_err(|e| hermite_obs_core::Error::domain(e.to_string()))
    };
    let report = scaling_study(&make, r.n, &cutoffs, &r.policy, params.as_ref())?;
    let mut table = Table::new("scaling", &SCALING_COLUMNS);
    let mut plot = Table::new("plot", &["x", "y"]);
    for row in &report.rows {
        table.push(scaling_row_cells(
            row.cutoff,
            row.dim,
            row.c_measured,
            row.lambda_min,
            row.bound,
            &row.bound_variant,
            row.precision_bits,
        ));
        plot.push(vec![(row.cutoff as f64).sqrt().into(), row.ln_c_measured.into()]);
    }
    let summary = format!(
        "{} cutoffs, best model {}, exponent {}, {} bound violations, {} unresolved\n",
        report.rows.len(),
        or_none(report.best_model),
        report.exponent().map_or_else(|| "none".to_string(), |p| format!("{p:.4}")),
        report.bound_violations.len(),
        report.singular.len()
    );
    let mut bundle = Bundle::new(to_value(&report), summary);
    if !report.singular.is_empty() {
        bundle.outcome = Outcome::PrecisionCeiling;
    }
    bundle.tables.push(table);
    bundle.plots.push(plot);
    Ok(bundle)
}

pub fn bounds(r: &Resolved) -> Result<Bundle, CliError> {
    let cutoffs = r.cutoff_list()?.to_vec();
    let top = *cutoffs.iter().max().expect("nonempty");
    let params = r
        .bound_params(&r.region(top)?)?
        .ok_or_else(|| usage("the region's generator does not match any bound hypothesis"))?;
    let mut table = Table::new("bounds", &["N", "variant", "bound", "ln_bound", "applicable"]);
    let mut values = Vec::new();
    for &c in &cutoffs {
        let b = theoretical_bound(&params, c)?;
        table.push(vec![c.into(), b.variant.clone().into(), b.value.into(), b.ln_value.into(), b.applicable.into()]);
        values.push(b);
    }
    let mut bundle = Bundle::new(json!({"params": to_value(&params), "bounds": to_value(&values)}), format!("{} bounds\n", values.len()));
    bundle.tables.push(table);
    Ok(bundle)
}

pub fn remez(r: &Resolved) -> Result<Bundle, CliError> {
    let d = r.config.degree.ok_or_else(|| usage("missing --degree"))?;
    let t = r.config.ratio.ok_or_else(|| usage("missing --ratio"))?;
    let b = remez_bound(r.n, d, t)?;
    let ball = remez_ball_bound(r.n, d, t)?;
    let result = json!({
        "n": r.n,
        "degree": d,
        "ratio": t,
        "F": remez_f(r.n, t),
        "remez_real": b.real,
        "remez_complex": b.complex,
        "ball_bound": ball,
    });
    let mut table = Table::new("remez", &["n", "degree", "ratio", "remez_real", "remez_complex", "ball_bound"]);
    table.push(vec![r.n.into(), d.into(), t.into(), b.real.into(), b.complex.into(), ball.into()]);
    let mut bundle = Bundle::new(result, format!("T_{d}(F({t})) = {:e}\n", b.real));
    bundle.tables.push(table);
    Ok(bundle)
}

pub fn bernstein(r: &Resolved) -> Result<Bundle, CliError> {
    let cutoff = r.single_cutoff()?;
    let delta = r.config.delta.ok_or_else(|| usage("missing --delta"))?;
    let beta = match &r.config.beta {
        Some(s) => MultiIndex(parse_usize_list(s, "beta")?.into_iter().map(|v| v as u32).collect()),
        None => MultiIndex(vec![1; r.n]),
    };
    if beta.0.len() != r.n {
        return Err(usage(format!("beta has {} entries, expected {}", beta.0.len(), r.n)));
    }
    let f = r.datum(r.n, cutoff)?;
    let b = bernstein_check(&f, delta, &beta)?;
    let weighted = if delta < 1.0 / (32.0 * r.n as f64) { Some(weighted_check(&f, delta, &beta)?) } else { None };
    let mut table = Table::new("bernstein", &["check", "lhs", "rhs", "verdict"]);
    table.push(vec!["bernstein".into(), b.lhs.into(), b.rhs.into(), (if b.pass { "pass" } else { "fail" }).into()]);
    if let Some(w) = &weighted {
        let verdict = serde_json::to_value(w.verdict).expect("verdict").as_str().unwrap_or_default().to_string();
        table.push(vec!["weighted".into(), (w.lhs_x.upper() + w.lhs_xi.upper()).into(), w.rhs.into(), verdict.into()]);
    }
    let result = json!({"f": to_value(&f.to_record()), "beta": beta.0, "delta": delta, "bernstein": to_value(&b), "weighted": to_value(&weighted)});
    let mut bundle = Bundle::new(result, format!("Bernstein: lhs {:e} ≤ rhs {:e}: {}\n", b.lhs, b.rhs, b.pass));
    bundle.tables.push(table);
    Ok(bundle)
}

pub fn tails(r: &Resolved) -> Result<Bundle, CliError> {
    let c = tail_constant_cn(r.n)?;
    let mut table = Table::new("tails", &["k", "a", "exact", "bound"]);
    let mut rows = Vec::new();
    if let Some(ks) = &r.config.k {
        for k in parse_usize_list(ks, "k")? {
            let a = r.config.a.unwrap_or(((2 * k + 1) as f64).sqrt());
            let t = hermite_tail_bound(k, a)?;
            table.push(vec![k.into(), a.into(), t.exact.into(), t.bound.into()]);
            rows.push(t);
        }
    }
    let mut bundle = Bundle::new(json!({"c_n": to_value(&c), "tails": to_value(&rows)}), format!("c_{} = {}\n", r.n, c.c_n));
    bundle.tables.push(table);
    Ok(bundle)
}

fn complex_rows(m: &hermite_obs_core::linalg::Mat<Complex64>) -> Value {
    let rows: Vec<Vec<[f64; 2]>> =
        (0..m.rows()).map(|i| (0..m.cols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect();
    to_value(&rows)
}

pub fn symbol(r: &Resolved) -> Result<Bundle, CliError> {
    let q = r.symbol()?;
    let h = hamilton_map(&q)?;
    let s = singular_space(&h, DEFAULT_RANK_TOL)?;
    let exact = singular_space_exact(&h);
    let mut table = Table::new("kernels", &["j", "kernel_dim", "kernel_dim_exact"]);
    for (j, (a, b)) in s.kernel_dims.iter().zip(&exact.kernel_dims).enumerate() {
        table.push(vec![j.into(), (*a).into(), (*b).into()]);
    }
    let result = json!({
        "symbol": to_value(&q.to_file()),
        "name": q.name,
        "hamilton": {"F": complex_rows(&h.f), "identity_defect": h.identity_defect},
        "singular_space": to_value(&s),
        "singular_space_exact": to_value(&exact),
        "accretive": q.is_accretive(1e-12),
    });
    let summary = format!("dim S = {} (exact {}), k0 = {} (exact {})\n", s.dim(), exact.dim(), or_none(s.k0), or_none(exact.k0));
    let mut bundle = Bundle::new(result, summary);
    bundle.tables.push(table);
    Ok(bundle)
}

pub fn quantize(r: &Resolved) -> Result<Bundle, CliError> {
    let q = r.symbol()?;
    let cutoff = r.single_cutoff()?;
    let a = weyl_quantize::<f64>(&q, cutoff)?;
    let mut table = Table::new("matrix", &["i", "j", "re", "im"]);
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            let z = a.matrix[(i, j)];
            table.push(vec![i.into(), j.into(), z.re.into(), z.im.into()]);
        }
    }
    let margin = a.accretivity_margin();
    let result = json!({"n": q.n, "N": cutoff, "dim": a.dim(), "matrix": complex_rows(&a.matrix), "accretivity_margin": margin});
    let mut bundle = Bundle::new(result, format!("q^w on E_{cutoff}: dimension {}, accretivity margin {margin:e}\n", a.dim()));
    bundle.tables.push(table);
    Ok(bundle)
}

pub fn evolve_cmd(r: &Resolved) -> Result<Bundle, CliError> {
    let q = r.symbol()?;
    let cutoff = r.single_cutoff()?;
    let times = r.horizon_list()?.to_vec();
    let a = weyl_quantize::<f64>(&q, cutoff)?;
    let f0 = r.datum(q.n, cutoff)?;
    let mut table = Table::new("evolution", &["t", "norm_ratio", "galerkin_gap"]);
    let mut states = Vec::new();
    for &t in &times {
        let e = evolve(&a, &f0, t)?;
        let gap = galerkin_convergence(&q, &f0, t)?;
        table.push(vec![t.into(), e.norm_ratio.into(), gap.into()]);
        states.push(json!({"t": t, "norm_ratio": e.norm_ratio, "galerkin_gap": gap, "state": to_value(&e.state.to_record())}));
    }
    let mut result = json!({"f0": to_value(&f0.to_record()), "states": states});
    let mut tables = vec![table];
    if let Some(ks) = &r.config.k {
        let k_grid = parse_usize_list(ks, "k")?;
        let k0 = match r.config.k0 {
            Some(k) => k,
            None => singular_space(&hamilton_map(&q)?, DEFAULT_RANK_TOL)?.k0.unwrap_or(0),
        };
        let d = dissipation_check(&a, k0, 1.0, 1.0, &times, &k_grid)?;
        let mut dt = Table::new("dissipation", &["t", "k", "ratio", "ln_ratio", "predicted"]);
        for row in &d.rows {
            dt.push(vec![row.t.into(), row.k.into(), row.ratio.into(), row.ln_ratio.into(), row.predicted.into()]);
        }
        result["dissipation"] = to_value(&d);
        tables.push(dt);
    }
    let mut bundle = Bundle::new(result, format!("evolved E_{cutoff} datum to {} times\n", times.len()));
    bundle.tables = tables;
    Ok(bundle)
}

fn control_problem(r: &Resolved) -> Result<ControlProblem, CliError> {
    let q = r.symbol()?;
    let cutoff = r.single_cutoff()?;
    if r.n != q.n {
        return Err(usage(format!("symbol acts on ℝ^{} but n = {}", q.n, r.n)));
    }
    let region = r.region(cutoff)?;
    let horizon = r.horizon_list()?[0];
    let mut p = ControlProblem::new(q, region, cutoff, horizon)?;
    p.policy = r.policy;
    if r.flag(r.config.fixed_precision) {
        p.precision_bits = Some(r.policy.start_bits);
    }
    if let Some(t) = r.config.quad_tol {
        p.quad_tol = t;
        p.validate()?;
    }
    Ok(p)
}

const OBSERVABILITY_COLUMNS: [&str; 4] = ["T", "C_T", "precision_bits", "method"];

pub fn observability(r: &Resolved) -> Result<Bundle, CliError> {
    let p = control_problem(r)?;
    let horizons = r.horizon_list()?.to_vec();
    let mut table = Table::new("observability", &OBSERVABILITY_COLUMNS);
    if horizons.len() == 1 {
        let o = observability_constant(&p)?;
        table.push(vec![o.horizon.into(), o.c_t.into(), o.precision_bits.into(), o.method.clone().into()]);
        let mut bundle = Bundle::new(
            to_value(&o),
            format!("C_T = {:.12e} at T = {} ({}, {} bits)\n", o.c_t, o.horizon, o.method, o.precision_bits),
        );
        if o.status == ObservabilityStatus::LowerBound {
            bundle.outcome = Outcome::PrecisionCeiling;
        }
        bundle.tables.push(table);
        return Ok(bundle);
    }
    let k0 = match r.config.k0 {
        Some(k) => k,
        None => singular_space(&hamilton_map(&p.symbol)?, DEFAULT_RANK_TOL)?.k0.unwrap_or(0),
    };
    let study = cost_blowup_study(&p, &horizons, k0)?;
    let mut plot = Table::new("plot", &["x", "y"]);
    for row in &study.rows {
        table.push(vec![row.horizon.into(), row.c_t.into(), row.precision_bits.into(), row.method.clone().into()]);
        plot.push(vec![(1.0 / row.horizon).into(), row.ln_c_t.into()]);
    }
    let summary = format!(
        "{} horizons, preferred exponent {:?}, {} excluded\n",
        study.rows.len(),
        study.preferred_exponent,
        study.excluded.len()
    );
    let mut bundle = Bundle::new(to_value(&study), summary);
    if !study.excluded.is_empty() {
        bundle.outcome = Outcome::PrecisionCeiling;
    }
    bundle.tables.push(table);
    bundle.plots.push(plot);
    Ok(bundle)
}

pub fn control(r: &Resolved) -> Result<Bundle, CliError> {
    let p = control_problem(r)?;
    let f0 = r.datum(p.n(), p.cutoff)?;
    let method = r.config.method.as_deref().unwrap_or("hum");
    let res = match method {
        "hum" => hum_control(&p, &f0)?,
        "staircase" => {
            let d = StaircaseOptions::default();
            let opts = StaircaseOptions {
                k_base: r.config.k_base.unwrap_or(d.k_base),
                target: r.config.target.unwrap_or(d.target),
                max_stages: r.config.max_stages.unwrap_or(d.max_stages),
            };
            lr_staircase(&p, &f0, &opts)?
        }
        other => return Err(usage(format!("unknown control method `{other}` (hum, staircase)"))),
    };
    let report = res.report(r.flag(r.config.trajectory));
    let mut stages = Table::new("stages", &["stage", "k_j", "stage_cost", "energy_after"]);
    for s in &res.stages {
        stages.push(vec![s.stage.into(), s.k_j.into(), s.stage_cost.into(), s.energy_after.into()]);
    }
    let result = json!({"f0": to_value(&f0.to_record()), "report": to_value(&report), "final_state": to_value(&res.final_state.to_record())});
    let summary = format!("{}: cost {:.12e}, residual {:.3e}, partial {}\n", res.method, res.cost, res.residual, res.partial);
    let mut bundle = Bundle::new(result, summary);
    if res.partial {
        bundle.outcome = Outcome::PrecisionCeiling;
    }
    bundle.tables.push(stages);
    Ok(bundle)
}

pub fn verify(r: &Resolved) -> Result<Bundle, CliError> {
    let suite = r.config.suite.as_deref().unwrap_or("all");
    let reports = run_suites(suite, r.seed, r.config.trials).map_err(|e| usage(e.to_string()))?;
    let mut table = Table::new("verify", &["suite", "trials", "failures", "inconclusive", "worst_margin", "seed"]);
    let mut summary = String::new();
    for s in &reports {
        table.push(vec![
            s.suite.clone().into(),
            s.trials.into(),
            s.failures.into(),
            s.inconclusive.into(),
            s.worst_margin.unwrap_or(f64::NAN).into(),
            s.seed.into(),
        ]);
        summary.push_str(&format!(
            "{:<24} {} trials, {} failures{}\n",
            s.suite,
            s.trials,
            s.failures,
            if s.inconclusive > 0 { format!(", {} inconclusive", s.inconclusive) } else { String::new() }
        ));
    }
    let failed = reports.iter().any(|s| !s.passed());
    let mut bundle = Bundle::new(json!({"suites": to_value(&reports), "all_passed": !failed}), summary);
    if failed {
        bundle.outcome = Outcome::Failed;
    }
    bundle.tables.push(table);
    Ok(bundle)
}
