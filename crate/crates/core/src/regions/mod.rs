//! Control sets `ω ⊂ ℝⁿ` as finite unions of axis-aligned boxes.

mod integrate;
mod measure;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use integrate::{
    entry_truncation_error, integrate_pair, interval_block, interval_block_f64, truncate_radius, IntervalBlock,
    QuadMethod, QuadratureAccount,
};
pub use measure::{ball_volume, density_ratio, disk_rect_area, thickness_check};

/// Closed box `∏ [lo_i, hi_i]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cuboid {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Cuboid {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::domain("box corners must have the same positive dimension"));
        }
        if lo.iter().chain(&hi).any(|v| !v.is_finite()) {
            return Err(Error::domain("box bounds must be finite"));
        }
        if lo.iter().zip(&hi).any(|(a, b)| a > b) {
            return Err(Error::domain(format!("box with lo {lo:?} above hi {hi:?}")));
        }
        Ok(Cuboid { lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).product()
    }

    pub fn intersect(&self, other: &Cuboid) -> Option<Cuboid> {
        let mut lo = Vec::with_capacity(self.dim());
        let mut hi = Vec::with_capacity(self.dim());
        for i in 0..self.dim() {
            let a = self.lo[i].max(other.lo[i]);
            let b = self.hi[i].min(other.hi[i]);
            if a >= b {
                return None;
            }
            lo.push(a);
            hi.push(b);
        }
        Some(Cuboid { lo, hi })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    Explicit,
    Full,
    PeriodicThick { l: f64, gamma: f64 },
    HalfSpace { axis: usize, c: f64 },
    /// `{|x| ≥ r0}`; box-representable only on the line.
    BallComplement { r0: f64 },
    /// Open ball `B(x0, r)`; box-representable only on the line.
    Ball { x0: f64, r: f64 },
    Custom { name: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub n: usize,
    pub boxes: Vec<Cuboid>,
    pub generator: Generator,
    /// Radius of the ball outside of which the generated set was cut off.
    /// `None` when the boxes are the whole set.
    pub truncation: Option<f64>,
}

impl Region {
    pub fn new(n: usize, boxes: Vec<Cuboid>, generator: Generator, truncation: Option<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("dimension must be at least 1"));
        }
        if let Some(b) = boxes.iter().find(|b| b.dim() != n) {
            return Err(Error::domain(format!("box of dimension {} in a region of dimension {n}", b.dim())));
        }
        let boxes: Vec<Cuboid> = boxes.into_iter().filter(|b| b.volume() > 0.0).collect();
        let region = Region { n, boxes: if n == 1 { merge_intervals(boxes) } else { boxes }, generator, truncation };
        region.check_disjoint()?;
        Ok(region)
    }

    fn check_disjoint(&self) -> Result<()> {
        if self.n == 1 {
            return Ok(());
        }
        let smallest = self.boxes.iter().map(Cuboid::volume).fold(f64::INFINITY, f64::min);
        for (i, a) in self.boxes.iter().enumerate() {
            for b in &self.boxes[i + 1..] {
                if let Some(c) = a.intersect(b) {
                    if c.volume() >= 1e-12 * smallest {
                        return Err(Error::domain(format!("overlapping boxes {a:?} and {b:?}")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn empty(n: usize) -> Self {
        Region { n, boxes: Vec::new(), generator: Generator::Explicit, truncation: None }
    }

    pub fn measure(&self) -> f64 {
        self.boxes.iter().map(Cuboid::volume).sum()
    }

    /// Sorted disjoint intervals of a one-dimensional region.
    pub fn intervals(&self) -> Result<Vec<(f64, f64)>> {
        if self.n != 1 {
            return Err(Error::contract("interval view requires a one-dimensional region"));
        }
        Ok(self.boxes.iter().map(|b| (b.lo[0], b.hi[0])).collect())
    }

    /// Smallest `R` with every box inside `[−R, R]ⁿ`.
    pub fn extent(&self) -> f64 {
        self.boxes
            .iter()
            .flat_map(|b| b.lo.iter().chain(&b.hi))
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// `true` if `self ⊆ other` up to null sets (checked by clipping).
    pub fn is_subset_of(&self, other: &Region) -> bool {
        self.boxes.iter().all(|b| {
            let covered: f64 = other.boxes.iter().filter_map(|o| b.intersect(o)).map(|c| c.volume()).sum();
            covered >= b.volume() * (1.0 - 1e-12)
        })
    }

    pub fn to_file(&self) -> RegionFile {
        RegionFile {
            n: self.n,
            generator: self.generator.clone(),
            truncation: self.truncation,
            boxes: self.boxes.iter().map(|b| [b.lo.clone(), b.hi.clone()]).collect(),
        }
    }

    pub fn from_file(f: &RegionFile) -> Result<Self> {
        let boxes = f.boxes.iter().map(|[lo, hi]| Cuboid::new(lo.clone(), hi.clone())).collect::<Result<Vec<_>>>()?;
        Region::new(f.n, boxes, f.generator.clone(), f.truncation)
    }
}

/// On-disk form: `{n, generator, boxes: [[lo…],[hi…]], truncation}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionFile {
    pub n: usize,
    #[serde(default = "default_generator")]
    pub generator: Generator,
    pub boxes: Vec<[Vec<f64>; 2]>,
    #[serde(default)]
    pub truncation: Option<f64>,
}

fn default_generator() -> Generator {
    Generator::Explicit
}

fn merge_intervals(mut boxes: Vec<Cuboid>) -> Vec<Cuboid> {
    boxes.sort_by(|a, b| a.lo[0].total_cmp(&b.lo[0]));
    let mut out: Vec<Cuboid> = Vec::with_capacity(boxes.len());
    for b in boxes {
        match out.last_mut() {
            Some(last) if b.lo[0] <= last.hi[0] => last.hi[0] = last.hi[0].max(b.hi[0]),
            _ => out.push(b),
        }
    }
    out
}

fn check_radius(r: f64) -> Result<()> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::domain(format!("truncation radius {r} must be positive")));
    }
    Ok(())
}

/// In every cell `Lα + [0, L]ⁿ` meeting the open ball `B(0, R)`, the corner
/// sub-box of side `γ^{1/n} L`.
pub fn make_periodic_thick(n: usize, l: f64, gamma: f64, r: f64) -> Result<Region> {
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::domain(format!("scale L = {l} must be positive")));
    }
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::domain(format!("γ = {gamma} must lie in (0, 1]")));
    }
    check_radius(r)?;
    if n == 0 {
        return Err(Error::domain("dimension must be at least 1"));
    }
    let side = gamma.powf(1.0 / n as f64) * l;
    let kmin = (-r / l).floor() as i64 - 1;
    let kmax = (r / l).ceil() as i64;
    let mut boxes = Vec::new();
    let mut idx = vec![kmin; n];
    loop {
        // Squared distance from the origin to the cell.
        let d2: f64 = idx
            .iter()
            .map(|&k| {
                let (a, b) = (k as f64 * l, (k + 1) as f64 * l);
                let d = if a > 0.0 { a } else if b < 0.0 { -b } else { 0.0 };
                d * d
            })
            .sum();
        if d2 < r * r {
            let lo: Vec<f64> = idx.iter().map(|&k| k as f64 * l).collect();
            let hi: Vec<f64> = lo.iter().map(|a| a + side).collect();
            boxes.push(Cuboid { lo, hi });
        }
        let mut i = 0;
        loop {
            if i == n {
                return Region::new(n, boxes, Generator::PeriodicThick { l, gamma }, Some(r));
            }
            idx[i] += 1;
            if idx[i] <= kmax {
                break;
            }
            idx[i] = kmin;
            i += 1;
        }
    }
}

/// `{x_axis > c}` cut to `[−R, R]ⁿ`.
pub fn half_space(n: usize, axis: usize, c: f64, r: f64) -> Result<Region> {
    check_radius(r)?;
    if axis >= n {
        return Err(Error::domain(format!("axis {axis} out of range for dimension {n}")));
    }
    let mut lo = vec![-r; n];
    let hi = vec![r; n];
    lo[axis] = c.max(-r);
    let boxes = if c < r { vec![Cuboid { lo, hi }] } else { Vec::new() };
    Region::new(n, boxes, Generator::HalfSpace { axis, c }, Some(r))
}

/// `ℝⁿ` cut to `[−R, R]ⁿ`.
pub fn full_space(n: usize, r: f64) -> Result<Region> {
    check_radius(r)?;
    Region::new(n, vec![Cuboid { lo: vec![-r; n], hi: vec![r; n] }], Generator::Full, Some(r))
}

/// `{|x| ≥ r0}` on the line, cut to `[−R, R]`.
pub fn ball_complement(n: usize, r0: f64, r: f64) -> Result<Region> {
    check_radius(r)?;
    if n != 1 {
        return Err(Error::domain("ball complements are box-representable only for n = 1"));
    }
    if !(r0 >= 0.0) {
        return Err(Error::domain(format!("inner radius {r0} must be nonnegative")));
    }
    let boxes = if r0 < r {
        vec![Cuboid { lo: vec![-r], hi: vec![-r0] }, Cuboid { lo: vec![r0], hi: vec![r] }]
    } else {
        Vec::new()
    };
    Region::new(1, boxes, Generator::BallComplement { r0 }, Some(r))
}

/// The interval `(x0 − r, x0 + r)`.
pub fn ball_1d(x0: f64, r: f64) -> Result<Region> {
    if !(r > 0.0) {
        return Err(Error::domain(format!("ball radius {r} must be positive")));
    }
    Region::new(1, vec![Cuboid::new(vec![x0 - r], vec![x0 + r])?], Generator::Ball { x0, r }, None)
}

pub fn explicit(n: usize, boxes: Vec<Cuboid>) -> Result<Region> {
    Region::new(n, boxes, Generator::Explicit, None)
}

/// Parses generator shorthand such as `periodic:L=1,gamma=0.5`, `halfline`,
/// `halfspace:axis=1,c=0`, `full`, `ballcomplement:r0=2`, `ball:x0=0,r=1`
/// or `interval:a=-1,b=2`. `radius` is the truncation radius for unbounded sets.
pub fn parse_region_spec(spec: &str, n: usize, radius: f64) -> Result<Region> {
    let (name, args) = match spec.split_once(':') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (spec.trim(), ""),
    };
    let mut kv = BTreeMap::new();
    for part in args.split(',').filter(|p| !p.trim().is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::domain(format!("expected key=value in region spec, got `{part}`")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::domain(format!("region parameter `{}` is not a number", k.trim())))?;
        kv.insert(k.trim().to_ascii_lowercase(), v);
    }
    let take = |kv: &BTreeMap<String, f64>, key: &str, default: Option<f64>| -> Result<f64> {
        kv.get(key)
            .copied()
            .or(default)
            .ok_or_else(|| Error::domain(format!("region `{name}` requires `{key}`")))
    };
    let known: &[&str] = match name {
        "periodic" | "thick" => &["l", "gamma"],
        "halfline" => &[],
        "halfspace" => &["axis", "c"],
        "full" | "r" | "rn" => &[],
        "ballcomplement" => &["r0"],
        "ball" => &["x0", "r"],
        "interval" => &["a", "b"],
        "empty" => &[],
        _ => return Err(Error::domain(format!("unknown region generator `{name}`"))),
    };
    if let Some(k) = kv.keys().find(|k| !known.contains(&k.as_str())) {
        return Err(Error::domain(format!("region `{name}` does not take `{k}`")));
    }
    match name {
        "periodic" | "thick" => make_periodic_thick(n, take(&kv, "l", None)?, take(&kv, "gamma", None)?, radius),
        "halfline" => half_space(n, 0, 0.0, radius),
        "halfspace" => half_space(n, take(&kv, "axis", Some(0.0))? as usize, take(&kv, "c", Some(0.0))?, radius),
        "full" | "r" | "rn" => full_space(n, radius),
        "ballcomplement" => ball_complement(n, take(&kv, "r0", None)?, radius),
        "ball" => {
            if n != 1 {
                return Err(Error::domain("balls are box-representable only for n = 1"));
            }
            ball_1d(take(&kv, "x0", Some(0.0))?, take(&kv, "r", None)?)
        }
        "interval" => {
            if n != 1 {
                return Err(Error::domain("`interval` is one-dimensional"));
            }
            explicit(1, vec![Cuboid::new(vec![take(&kv, "a", None)?], vec![take(&kv, "b", None)?])?])
        }
        _ => Ok(Region::empty(n)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periodic_examples() {
        let r = make_periodic_thick(1, 1.0, 0.5, 3.0).unwrap();
        let iv = r.intervals().unwrap();
        assert_eq!(iv.len(), 6);
        for (j, (a, b)) in iv.iter().enumerate() {
            assert_eq!(*a, j as f64 - 3.0);
            assert_eq!(*b, j as f64 - 2.5);
        }
        let r = make_periodic_thick(1, 2.0, 1.0, 4.0).unwrap();
        assert_eq!(r.intervals().unwrap(), vec![(-4.0, 4.0)]);
        let r = make_periodic_thick(2, 1.0, 0.25, 2.0).unwrap();
        assert!(r.boxes.iter().all(|b| (b.hi[0] - b.lo[0] - 0.5).abs() < 1e-15 && (b.hi[1] - b.lo[1] - 0.5).abs() < 1e-15));
        // cells at per-axis distance 0 or 1 meet the open disk of radius 2
        assert_eq!(r.boxes.len(), 16);
        assert!(make_periodic_thick(1, 1.0, 1.5, 3.0).is_err());
        assert!(make_periodic_thick(1, 0.0, 0.5, 3.0).is_err());
    }

    #[test]
    fn shorthand_and_file_round_trip() {
        let r = parse_region_spec("periodic:L=1,gamma=0.5", 1, 3.0).unwrap();
        assert_eq!(r.boxes.len(), 6);
        let h = parse_region_spec("halfline", 1, 40.0).unwrap();
        assert_eq!(h.intervals().unwrap(), vec![(0.0, 40.0)]);
        assert!(parse_region_spec("periodic:L=1", 1, 3.0).is_err());
        assert!(parse_region_spec("periodic:L=1,gamma=0.5,foo=2", 1, 3.0).is_err());
        assert!(parse_region_spec("nonsense", 1, 3.0).is_err());
        let text = serde_json::to_string(&r.to_file()).unwrap();
        let back = Region::from_file(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, r);
        let raw = r#"{"n":2,"boxes":[[[0,0],[1,1]],[[1,0],[2,1]]]}"#;
        let f: RegionFile = serde_json::from_str(raw).unwrap();
        assert_eq!(Region::from_file(&f).unwrap().measure(), 2.0);
    }

    #[test]
    fn overlap_rejected() {
        let a = Cuboid::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let b = Cuboid::new(vec![0.5, 0.5], vec![1.5, 1.5]).unwrap();
        assert!(explicit(2, vec![a, b]).is_err());
    }
}
