//! Synthetic symbol libraries and the train/test protocol built on them.
//!
//! Models are random linear drawings on a small integer grid, accepted only
//! when every measured quantity sits clear of the signature's decision
//! boundaries (interval edges, junction end zones, the connectivity
//! tolerance). That margin is what makes rotated and scaled copies produce
//! the exact same signature as the model.
//!
//! Training data per class is the model plus 36 rotations (10 degree steps)
//! and 12 scalings (0.25 to 3.25 in steps of 0.25, skipping 1.0). Test conditions are clean
//! rotated/scaled queries, three levels of hand-drawn style deformation, and
//! a vector-level degradation that splits strokes and adds spurious ones.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arg::{build_arg, ArgConfig};
use crate::error::{Error, Result};
use crate::geometry::{closest_points, relative_angle, Point, Primitive, VectorSymbol};
use crate::signature::{compute_signature, Signature, ANGLE_EDGES, LENGTH_EDGES};

/// Endpoint displacement bound per deformation level, as a fraction of the
/// bounding-box diagonal.
pub const DEFORM_AMPLITUDES: [f64; 3] = [0.01, 0.02, 0.04];

/// Rotation angles used to expand a model into training examples.
pub fn training_rotations() -> impl Iterator<Item = f64> {
    (1..=36).map(|k| 10.0 * k as f64)
}

/// Scale factors used to expand a model into training examples: multiples
/// of 0.25 up to 3.25, skipping 1.0.
pub fn training_scales() -> impl Iterator<Item = f64> {
    (1..=12).map(|k| 0.25 * k as f64).map(|f| if f >= 1.0 { f + 0.25 } else { f })
}

/// Mixes a base seed with item coordinates (splitmix64 finalizer), so every
/// generated item has its own schedule-independent stream.
pub fn derive_seed(seed: u64, parts: &[u64]) -> u64 {
    let mut h = seed ^ 0x9E37_79B9_7F4A_7C15;
    for &p in parts {
        h = h.wrapping_add(p).wrapping_add(0x9E37_79B9_7F4A_7C15);
        h = (h ^ (h >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        h = (h ^ (h >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        h ^= h >> 31;
    }
    h
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymbolModel {
    pub label: String,
    pub symbol: VectorSymbol,
}

/// Shape generator knobs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LibraryConfig {
    /// Coordinates are integers in `0..=grid`.
    pub grid: i32,
    pub min_segments: usize,
    pub max_segments: usize,
    /// Minimum distance (degrees) of any arc's relative angle from 30, 60 and
    /// the parallel threshold.
    pub angle_margin: f64,
    /// Minimum distance of any relative length from an interval edge.
    pub length_margin: f64,
    /// Minimum distance of a contact parameter from the end-zone boundary.
    pub contact_margin: f64,
    /// Minimum gap between non-touching primitives, as a fraction of the diagonal.
    pub clearance: f64,
    /// Attempts per class before giving up.
    pub max_attempts: usize,
}

impl Default for LibraryConfig {
    fn default() -> Self {
        LibraryConfig {
            grid: 8,
            min_segments: 3,
            max_segments: 10,
            angle_margin: 3.0,
            length_margin: 0.03,
            contact_margin: 0.08,
            clearance: 0.05,
            max_attempts: 5_000,
        }
    }
}

/// True when no measurement of `symbol` lies near a boundary that a rotation
/// or scaling could push it across.
pub fn is_boundary_safe(symbol: &VectorSymbol, arg_cfg: &ArgConfig, lib: &LibraryConfig) -> bool {
    let diag = symbol.bbox_diagonal();
    for p in symbol.primitives() {
        let r = symbol.relative_length(p);
        if LENGTH_EDGES.iter().any(|e| (r - e).abs() < lib.length_margin) {
            return false;
        }
    }
    let prims = symbol.primitives();
    for (i, a) in prims.iter().enumerate() {
        for b in &prims[i + 1..] {
            let c = closest_points(a, b);
            if c.distance > 1e-9 * diag {
                if c.distance < lib.clearance * diag {
                    return false;
                }
                continue;
            }
            let angle = relative_angle(a, b);
            let near = |x: f64, e: f64| (x - e).abs() < lib.angle_margin;
            if ANGLE_EDGES.iter().any(|&e| near(angle, e)) || near(angle, arg_cfg.angle_eps) {
                return false;
            }
            // touching near-parallel strokes only as exact end-to-end continuations
            if angle < arg_cfg.angle_eps && !(angle < 1e-9 && is_end(c.t) && is_end(c.s)) {
                return false;
            }
            for t in [c.t, c.s] {
                let lo = arg_cfg.end_zone;
                let hi = 1.0 - arg_cfg.end_zone;
                if (t - lo).abs() < lib.contact_margin || (t - hi).abs() < lib.contact_margin {
                    return false;
                }
            }
        }
    }
    true
}

fn is_end(t: f64) -> bool {
    t <= 1e-9 || t >= 1.0 - 1e-9
}

type GridPoint = (i32, i32);

fn on_segment(p: GridPoint, a: GridPoint, b: GridPoint) -> bool {
    let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
    cross == 0 && p.0 >= a.0.min(b.0) && p.0 <= a.0.max(b.0) && p.1 >= a.1.min(b.1) && p.1 <= a.1.max(b.1)
}

/// Collinear segments sharing more than a point.
fn overlaps(a: (GridPoint, GridPoint), b: (GridPoint, GridPoint)) -> bool {
    let d = (a.1 .0 - a.0 .0, a.1 .1 - a.0 .1);
    let collinear = |p: GridPoint| d.0 * (p.1 - a.0 .1) - d.1 * (p.0 - a.0 .0) == 0;
    if !(collinear(b.0) && collinear(b.1)) {
        return false;
    }
    let proj = |p: GridPoint| d.0 * (p.0 - a.0 .0) + d.1 * (p.1 - a.0 .1);
    let len2 = d.0 * d.0 + d.1 * d.1;
    let (lo, hi) = (proj(b.0).min(proj(b.1)), proj(b.0).max(proj(b.1)));
    hi.min(len2) - lo.max(0) > 0
}

fn random_drawing(rng: &mut ChaCha8Rng, lib: &LibraryConfig) -> Vec<(GridPoint, GridPoint)> {
    let n = rng.gen_range(lib.min_segments..=lib.max_segments);
    let g = lib.grid;
    let mut segs: Vec<(GridPoint, GridPoint)> = Vec::with_capacity(n);
    let mut anchors: Vec<GridPoint> = Vec::new();
    for _ in 0..n {
        for _ in 0..50 {
            let a = if !anchors.is_empty() && rng.gen_bool(0.85) {
                anchors[rng.gen_range(0..anchors.len())]
            } else {
                (rng.gen_range(0..=g), rng.gen_range(0..=g))
            };
            let b = (rng.gen_range(0..=g), rng.gen_range(0..=g));
            if a == b || segs.iter().any(|&s| overlaps(s, (a, b))) {
                continue;
            }
            segs.push((a, b));
            for x in 0..=g {
                for y in 0..=g {
                    if on_segment((x, y), a, b) && !anchors.contains(&(x, y)) {
                        anchors.push((x, y));
                    }
                }
            }
            break;
        }
    }
    segs
}

fn drawing_to_symbol(segs: &[(GridPoint, GridPoint)], label: &str) -> Result<VectorSymbol> {
    let prims = segs
        .iter()
        .enumerate()
        .map(|(i, &(a, b))| {
            Primitive::new(i as u32, Point::new(a.0 as f64, a.1 as f64), Point::new(b.0 as f64, b.1 as f64), 0.1)
        })
        .collect::<Result<Vec<_>>>()?;
    VectorSymbol::new(prims, Some(label.to_string()))
}

/// Class labels `001`, `002`, ... (at least three digits).
pub fn class_label(index: usize) -> String {
    format!("{:03}", index + 1)
}

/// `n_classes` boundary-safe models with pairwise distinct signatures.
pub fn make_library(n_classes: usize, seed: u64) -> Result<Vec<SymbolModel>> {
    make_library_with(n_classes, seed, &LibraryConfig::default(), &ArgConfig::default())
}

pub fn make_library_with(
    n_classes: usize,
    seed: u64,
    lib: &LibraryConfig,
    arg_cfg: &ArgConfig,
) -> Result<Vec<SymbolModel>> {
    if n_classes < 2 {
        return Err(Error::invalid(format!("a library needs at least 2 classes, got {n_classes}")));
    }
    if lib.min_segments == 0 || lib.min_segments > lib.max_segments || lib.grid < 2 {
        return Err(Error::invalid("library shape bounds are inconsistent"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[0x11b]));
    let mut seen: HashSet<Signature> = HashSet::new();
    let mut models = Vec::with_capacity(n_classes);
    for c in 0..n_classes {
        let label = class_label(c);
        let mut accepted = None;
        for _ in 0..lib.max_attempts {
            let segs = random_drawing(&mut rng, lib);
            if segs.len() < lib.min_segments {
                continue;
            }
            let symbol = drawing_to_symbol(&segs, &label)?;
            if !is_boundary_safe(&symbol, arg_cfg, lib) {
                continue;
            }
            let sig = compute_signature(&build_arg(&symbol, arg_cfg));
            if seen.insert(sig) {
                accepted = Some(symbol);
                break;
            }
        }
        let symbol = accepted.ok_or_else(|| {
            Error::invalid(format!("could not generate a distinct model for class {label}"))
        })?;
        models.push(SymbolModel { label, symbol });
    }
    Ok(models)
}

/// The model itself, its 36 rotations and its 12 scalings (49 symbols).
pub fn expand_training(model: &SymbolModel) -> Vec<VectorSymbol> {
    let base = model.symbol.clone().with_label(model.label.clone());
    let mut out = Vec::with_capacity(49);
    out.push(base.clone());
    out.extend(training_rotations().map(|a| base.rotate(a)));
    out.extend(training_scales().map(|k| base.scale(k).expect("positive factor")));
    out
}

fn disk_sample(rng: &mut ChaCha8Rng, radius: f64) -> Point {
    let r = radius * rng.gen::<f64>().sqrt();
    let phi = rng.gen::<f64>() * std::f64::consts::TAU;
    Point::new(r * phi.cos(), r * phi.sin())
}

/// Moves every endpoint by a random vector of length at most
/// `amplitude * diagonal`. Coinciding endpoints move together, and an
/// endpoint lying on another stroke's interior stays on that stroke.
pub fn deform_with_amplitude(symbol: &VectorSymbol, amplitude: f64, seed: u64) -> VectorSymbol {
    if amplitude <= 0.0 {
        return symbol.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let diag = symbol.bbox_diagonal();
    let eps = 1e-9 * diag;
    let prims = symbol.primitives();

    // group coinciding endpoints; group g has representative position reps[g]
    let mut reps: Vec<Point> = Vec::new();
    let mut group_of = Vec::with_capacity(prims.len() * 2);
    for p in prims {
        for q in [p.p0, p.p1] {
            let g = match reps.iter().position(|r| r.distance(q) <= eps) {
                Some(g) => g,
                None => {
                    reps.push(q);
                    reps.len() - 1
                }
            };
            group_of.push(g);
        }
    }
    let mut moved: Vec<Point> = reps.iter().map(|&r| r.add(disk_sample(&mut rng, amplitude * diag))).collect();

    // endpoints resting on the interior of another stroke
    let mut attached: Vec<(usize, usize, f64)> = Vec::new();
    for (g, &r) in reps.iter().enumerate() {
        for (h, host) in prims.iter().enumerate() {
            let d = host.direction();
            let t = r.sub(host.p0).dot(d) / d.dot(d);
            if t > 1e-6 && t < 1.0 - 1e-6 && host.point_at(t).distance(r) <= eps {
                attached.push((g, h, t));
                break;
            }
        }
    }
    for _ in 0..3 {
        for &(g, h, t) in &attached {
            let a = moved[group_of[2 * h]];
            let b = moved[group_of[2 * h + 1]];
            moved[g] = a.add(b.sub(a).mul(t));
        }
    }

    let out = prims
        .iter()
        .enumerate()
        .map(|(i, p)| {
            Primitive::new(p.id, moved[group_of[2 * i]], moved[group_of[2 * i + 1]], p.width)
                .unwrap_or_else(|_| p.clone())
        })
        .collect();
    VectorSymbol::new(out, symbol.label.clone()).expect("ids unchanged")
}

/// Hand-drawn style deformation at level 1, 2 or 3.
pub fn deform(symbol: &VectorSymbol, level: u8, seed: u64) -> Result<VectorSymbol> {
    let amplitude = match level {
        1..=3 => DEFORM_AMPLITUDES[level as usize - 1],
        _ => return Err(Error::invalid(format!("deformation level must be 1, 2 or 3, got {level}"))),
    };
    Ok(deform_with_amplitude(symbol, amplitude, seed))
}

/// Vector-level degradation: stroke splitting, short spurious strokes and
/// endpoint jitter, mimicking what a vectorizer makes of a noisy scan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NoiseConfig {
    /// Endpoint jitter bound, as a fraction of the bounding-box diagonal.
    pub jitter: f64,
    /// Probability of splitting each stroke once.
    pub split_prob: f64,
    /// Probability of adding a spurious stroke near each original stroke.
    pub spurious_prob: f64,
    pub seed: u64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig {
            jitter: 0.01,
            split_prob: 0.1,
            spurious_prob: 0.1,
            seed: 0,
        }
    }
}

impl NoiseConfig {
    pub fn validate(&self) -> Result<()> {
        let prob = |p: f64| (0.0..=1.0).contains(&p);
        if !prob(self.split_prob) || !prob(self.spurious_prob) || !(self.jitter >= 0.0) {
            return Err(Error::invalid("noise probabilities must be in [0, 1] and jitter >= 0"));
        }
        Ok(())
    }
}

pub fn degrade_vector(symbol: &VectorSymbol, cfg: &NoiseConfig) -> Result<VectorSymbol> {
    cfg.validate()?;
    if cfg.jitter == 0.0 && cfg.split_prob == 0.0 && cfg.spurious_prob == 0.0 {
        return Ok(symbol.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let diag = symbol.bbox_diagonal();
    let mut segs: Vec<(Point, Point, f64)> = Vec::new();
    for p in symbol.primitives() {
        if rng.gen_bool(cfg.split_prob) {
            let m = p.point_at(rng.gen_range(0.3..0.7));
            segs.push((p.p0, m, p.width));
            segs.push((m, p.p1, p.width));
        } else {
            segs.push((p.p0, p.p1, p.width));
        }
    }
    for p in symbol.primitives() {
        if rng.gen_bool(cfg.spurious_prob) {
            let base = p.point_at(rng.gen::<f64>()).add(disk_sample(&mut rng, 0.02 * diag));
            let len = rng.gen_range(0.01..=0.05) * diag;
            let phi = rng.gen::<f64>() * std::f64::consts::TAU;
            segs.push((base, base.add(Point::new(len * phi.cos(), len * phi.sin())), p.width));
        }
    }
    let prims = segs
        .into_iter()
        .enumerate()
        .map(|(i, (a, b, w))| Primitive::new(i as u32, a, b, w))
        .collect::<Result<Vec<_>>>()?;
    let split = VectorSymbol::new(prims, symbol.label.clone())?;
    Ok(deform_with_amplitude(&split, cfg.jitter, rng.gen()))
}

/// Test condition of the evaluation protocol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Condition {
    Clean,
    Deform(u8),
    Degrade,
}

impl Condition {
    pub const ALL: [Condition; 5] = [
        Condition::Clean,
        Condition::Deform(1),
        Condition::Deform(2),
        Condition::Deform(3),
        Condition::Degrade,
    ];

    pub fn name(&self) -> String {
        match self {
            Condition::Clean => "clean".into(),
            Condition::Deform(l) => format!("deform{l}"),
            Condition::Degrade => "degrade".into(),
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Condition::ALL.into_iter().find(|c| c.name() == s)
    }

    fn code(&self) -> u64 {
        match self {
            Condition::Clean => 0,
            Condition::Deform(l) => *l as u64,
            Condition::Degrade => 9,
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// A randomly rotated and scaled copy of a model.
pub fn clean_query(model: &SymbolModel, seed: u64) -> VectorSymbol {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let angle = rng.gen_range(0.0..360.0);
    let factor = rng.gen_range(0.5..2.0);
    model
        .symbol
        .clone()
        .with_label(model.label.clone())
        .rotate(angle)
        .scale(factor)
        .expect("positive factor")
}

/// One query of `condition` for `model`.
pub fn make_query(model: &SymbolModel, condition: Condition, degrade: &NoiseConfig, seed: u64) -> Result<VectorSymbol> {
    let clean = clean_query(model, derive_seed(seed, &[1]));
    match condition {
        Condition::Clean => Ok(clean),
        Condition::Deform(level) => deform(&clean, level, derive_seed(seed, &[2])),
        Condition::Degrade => degrade_vector(&clean, &NoiseConfig { seed: derive_seed(seed, &[3]), ..*degrade }),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolConfig {
    pub n_classes: usize,
    pub seed: u64,
    pub queries_per_class: usize,
    pub conditions: Vec<Condition>,
    pub degrade: NoiseConfig,
    pub library: LibraryConfig,
    pub arg: ArgConfig,
}

impl ProtocolConfig {
    pub fn new(n_classes: usize, seed: u64) -> Self {
        ProtocolConfig {
            n_classes,
            seed,
            queries_per_class: 10,
            conditions: Condition::ALL.to_vec(),
            degrade: NoiseConfig::default(),
            library: LibraryConfig::default(),
            arg: ArgConfig::default(),
        }
    }
}

/// Library, labelled training symbols and labelled queries per condition.
#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolData {
    pub library: Vec<SymbolModel>,
    pub train: Vec<VectorSymbol>,
    pub tests: Vec<(Condition, Vec<VectorSymbol>)>,
}

pub fn generate_protocol(cfg: &ProtocolConfig) -> Result<ProtocolData> {
    let library = make_library_with(cfg.n_classes, cfg.seed, &cfg.library, &cfg.arg)?;
    let train = library.iter().flat_map(expand_training).collect();
    let mut tests = Vec::with_capacity(cfg.conditions.len());
    for &cond in &cfg.conditions {
        let mut queries = Vec::with_capacity(library.len() * cfg.queries_per_class);
        for (c, model) in library.iter().enumerate() {
            for q in 0..cfg.queries_per_class {
                let seed = derive_seed(cfg.seed, &[cond.code(), c as u64, q as u64]);
                queries.push(make_query(model, cond, &cfg.degrade, seed)?);
            }
        }
        tests.push((cond, queries));
    }
    Ok(ProtocolData { library, train, tests })
}

/// Writes `<root>/<class>/<split>/<name>.vec`, with split `train` or a
/// condition name. Files carry a `label` header.
pub fn write_dataset(root: &Path, data: &ProtocolData) -> Result<()> {
    let write = |label: &str, split: &str, name: String, s: &VectorSymbol| -> Result<()> {
        let dir = root.join(label).join(split);
        std::fs::create_dir_all(&dir)?;
        std::fs::write(dir.join(format!("{name}.vec")), s.to_text())?;
        Ok(())
    };
    let per_class = data.train.len() / data.library.len().max(1);
    for (i, s) in data.train.iter().enumerate() {
        let label = s.label.as_deref().unwrap_or("unlabelled");
        write(label, "train", format!("t{:03}", i % per_class.max(1)), s)?;
    }
    for (cond, queries) in &data.tests {
        let per_class = queries.len() / data.library.len().max(1);
        for (i, s) in queries.iter().enumerate() {
            let label = s.label.as_deref().unwrap_or("unlabelled");
            write(label, &cond.name(), format!("q{:03}", i % per_class.max(1)), s)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(s: &VectorSymbol) -> Signature {
        compute_signature(&build_arg(s, &ArgConfig::default()))
    }

    #[test]
    fn training_grid() {
        let scales: Vec<f64> = training_scales().collect();
        assert_eq!(scales.len(), 12);
        assert!(!scales.contains(&1.0));
        assert_eq!(scales.first(), Some(&0.25));
        assert_eq!(scales.last(), Some(&3.25));
        assert_eq!(training_rotations().count(), 36);
    }

    #[test]
    fn library_is_distinct_and_reproducible() {
        let a = make_library(2, 5).unwrap();
        assert_ne!(sig(&a[0].symbol), sig(&a[1].symbol));
        assert_eq!(a, make_library(2, 5).unwrap());
        assert!(make_library(1, 5).is_err());
    }

    #[test]
    fn expansion_keeps_the_signature() {
        for model in make_library(4, 21).unwrap() {
            let train = expand_training(&model);
            assert_eq!(train.len(), 49);
            let want = sig(&model.symbol);
            for s in &train {
                assert_eq!(sig(s), want);
                assert_eq!(s.label.as_deref(), Some(model.label.as_str()));
            }
            // the 360 degree rotation is the identity
            let full = &train[36];
            for (a, b) in full.primitives().iter().zip(model.symbol.primitives()) {
                assert!(a.p0.distance(b.p0) < 1e-9 && a.p1.distance(b.p1) < 1e-9);
            }
        }
    }

    #[test]
    fn deformation_rules() {
        let model = &make_library(2, 3).unwrap()[0];
        let s = &model.symbol;
        assert_eq!(deform_with_amplitude(s, 0.0, 1), *s);
        assert_eq!(deform(s, 2, 7).unwrap(), deform(s, 2, 7).unwrap());
        assert!(deform(s, 4, 7).is_err());
        let d = deform(s, 3, 7).unwrap();
        assert_eq!(d.len(), s.len());
        let bound = DEFORM_AMPLITUDES[2] * s.bbox_diagonal();
        for (a, b) in s.primitives().iter().zip(d.primitives()) {
            // attached endpoints can travel further along their host, but not wildly
            assert!(a.p0.distance(b.p0) <= 3.0 * bound && a.p1.distance(b.p1) <= 3.0 * bound);
        }
    }

    #[test]
    fn shared_endpoints_stay_shared() {
        let s = VectorSymbol::from_segments(&[
            ((0.0, 0.0), (4.0, 0.0)),
            ((4.0, 0.0), (4.0, 3.0)),
            ((2.0, 0.0), (2.0, 2.0)),
        ])
        .unwrap();
        let d = deform_with_amplitude(&s, 0.04, 99);
        let p = d.primitives();
        assert_eq!(p[0].p1, p[1].p0);
        let c = closest_points(&p[0], &p[2]);
        assert!(c.distance < 1e-9);
        assert!(p[0].p0 != s.primitives()[0].p0);
    }

    #[test]
    fn degradation_rules() {
        let model = &make_library(2, 3).unwrap()[1];
        let s = &model.symbol;
        let off = NoiseConfig { jitter: 0.0, split_prob: 0.0, spurious_prob: 0.0, seed: 1 };
        assert_eq!(degrade_vector(s, &off).unwrap(), *s);
        let split = NoiseConfig { split_prob: 1.0, ..off };
        assert_eq!(degrade_vector(s, &split).unwrap().len(), 2 * s.len());
        let noisy = NoiseConfig { jitter: 0.02, split_prob: 0.3, spurious_prob: 0.3, seed: 4 };
        assert!(degrade_vector(s, &noisy).unwrap().len() >= s.len());
        assert!(degrade_vector(s, &NoiseConfig { split_prob: 1.5, ..off }).is_err());
    }

    #[test]
    fn protocol_counts() {
        let mut cfg = ProtocolConfig::new(3, 8);
        cfg.queries_per_class = 4;
        let data = generate_protocol(&cfg).unwrap();
        assert_eq!(data.train.len(), 3 * 49);
        assert_eq!(data.tests.len(), 5);
        for (_, q) in &data.tests {
            assert_eq!(q.len(), 12);
        }
        let clean = &data.tests[0].1;
        for (i, q) in clean.iter().enumerate() {
            let model = &data.library[i / 4];
            assert_eq!(sig(q), sig(&model.symbol));
        }
    }
}
