use super::{Cuboid, Region};
use crate::error::{Error, Result};
use crate::linalg::adaptive_scalar;

/// `min_x |ω ∩ (x + [0, L]ⁿ)| / Lⁿ` over translates on the lattice `(L/m)ℤⁿ`
/// whose cube fits inside the truncation ball (or the bounding cube of an
/// untruncated region). Intersections are exact box clipping.
pub fn thickness_check(region: &Region, l: f64, m: usize) -> Result<f64> {
    if !(l > 0.0) || m == 0 {
        return Err(Error::domain("thickness check needs L > 0 and m ≥ 1"));
    }
    let n = region.n;
    let (radius, in_ball) = match region.truncation {
        Some(r) => (r, true),
        None => (region.extent(), false),
    };
    let pitch = l / m as f64;
    let kmin = (-radius / pitch).floor() as i64;
    let kmax = (radius / pitch).ceil() as i64;
    let volume = l.powi(n as i32);
    let mut best: Option<f64> = None;
    let mut idx = vec![kmin; n];
    'outer: loop {
        let lo: Vec<f64> = idx.iter().map(|&k| k as f64 * pitch).collect();
        let hi: Vec<f64> = lo.iter().map(|a| a + l).collect();
        let fits = if in_ball {
            let far: f64 = lo.iter().zip(&hi).map(|(a, b)| a.abs().max(b.abs()).powi(2)).sum();
            far <= radius * radius * (1.0 + 1e-12)
        } else {
            lo.iter().zip(&hi).all(|(a, b)| *a >= -radius - 1e-12 && *b <= radius + 1e-12)
        };
        if fits {
            let cube = Cuboid { lo, hi };
            let covered: f64 = region.boxes.iter().filter_map(|b| b.intersect(&cube)).map(|c| c.volume()).sum();
            let ratio = (covered / volume).min(1.0);
            best = Some(best.map_or(ratio, |v: f64| v.min(ratio)));
        }
        let mut i = 0;
        loop {
            if i == n {
                break 'outer;
            }
            idx[i] += 1;
            if idx[i] <= kmax {
                break;
            }
            idx[i] = kmin;
            i += 1;
        }
    }
    best.ok_or_else(|| Error::domain(format!("no cube of side {l} fits inside radius {radius}")))
}

/// `|B(0, R)|` in dimension `n`.
pub fn ball_volume(n: usize, r: f64) -> f64 {
    let pi = std::f64::consts::PI;
    match n {
        1 => 2.0 * r,
        2 => pi * r * r,
        3 => 4.0 / 3.0 * pi * r.powi(3),
        _ => pi.powf(n as f64 / 2.0) / libm::tgamma(n as f64 / 2.0 + 1.0) * r.powi(n as i32),
    }
}

/// Area of `{x² + y² < R²} ∩ [x0, x1] × [y0, y1]`, in closed form.
pub fn disk_rect_area(r: f64, x0: f64, x1: f64, y0: f64, y1: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    let a = x0.max(-r);
    let b = x1.min(r);
    if a >= b || y0 >= y1 {
        return 0.0;
    }
    let s = |x: f64| (r * r - x * x).max(0.0).sqrt();
    // ∫ s = (x s(x) + R² asin(x/R)) / 2
    let prim = |x: f64| 0.5 * (x * s(x) + r * r * (x / r).clamp(-1.0, 1.0).asin());
    let mut cuts = vec![a, b];
    for y in [y0, y1] {
        if y.abs() < r {
            let c = (r * r - y * y).sqrt();
            cuts.extend([-c, c]);
        }
    }
    cuts.retain(|&c| c >= a && c <= b);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut area = 0.0;
    for w in cuts.windows(2) {
        let (p, q) = (w[0], w[1]);
        if q <= p {
            continue;
        }
        let sm = s(0.5 * (p + q));
        // On each piece the chord length is y1−y0, y1+s, s−y0, 2s, or empty.
        let upper_is_s = sm <= y1;
        let lower_is_s = -sm >= y0;
        let top = if upper_is_s { sm } else { y1 };
        let bottom = if lower_is_s { -sm } else { y0 };
        if top <= bottom {
            continue;
        }
        let width = q - p;
        let arc = prim(q) - prim(p);
        area += match (upper_is_s, lower_is_s) {
            (true, true) => 2.0 * arc,
            (true, false) => arc - y0 * width,
            (false, true) => y1 * width + arc,
            (false, false) => (y1 - y0) * width,
        };
    }
    area
}

/// `|ω ∩ B(0, R)| / |B(0, R)|`: exact in one and two dimensions; in three
/// dimensions the exact disk-rectangle areas are integrated over `z` slices.
pub fn density_ratio(region: &Region, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::domain(format!("radius {r} must be positive")));
    }
    if let Some(t) = region.truncation {
        if r > t * (1.0 + 1e-12) {
            return Err(Error::domain(format!("radius {r} exceeds the truncation radius {t}")));
        }
    }
    let inside: f64 = match region.n {
        1 => region.boxes.iter().map(|b| (b.hi[0].min(r) - b.lo[0].max(-r)).max(0.0)).sum(),
        2 => region.boxes.iter().map(|b| disk_rect_area(r, b.lo[0], b.hi[0], b.lo[1], b.hi[1])).sum(),
        3 => region
            .boxes
            .iter()
            .map(|b| {
                let (z0, z1) = (b.lo[2].max(-r), b.hi[2].min(r));
                if z0 >= z1 {
                    return 0.0;
                }
                let slice = |z: f64| disk_rect_area((r * r - z * z).max(0.0).sqrt(), b.lo[0], b.hi[0], b.lo[1], b.hi[1]);
                let mut cuts = vec![z0, z1];
                // Slice areas have kinks where the disk passes a box corner or edge.
                for x in [b.lo[0], b.hi[0], 0.0] {
                    for y in [b.lo[1], b.hi[1], 0.0] {
                        let d = r * r - x * x - y * y;
                        if d > 0.0 {
                            cuts.extend([-d.sqrt(), d.sqrt()]);
                        }
                    }
                }
                cuts.retain(|&c| c >= z0 && c <= z1);
                cuts.sort_by(f64::total_cmp);
                cuts.dedup();
                cuts.windows(2).map(|w| adaptive_scalar(slice, w[0], w[1], 1e-12 * r.powi(3)).0).sum()
            })
            .sum(),
        n => return Err(Error::domain(format!("density ratio is implemented for n ≤ 3, got {n}"))),
    };
    Ok(inside / ball_volume(region.n, r))
}
