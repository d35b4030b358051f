//! Line primitives of a vectorized symbol and the affine / relative measures
//! the signature is built from.
//!
//! A symbol is a list of thin straight strokes. Each stroke is a
//! [`Primitive`]: a segment `p0 -> p1` with a stroke width. Curved strokes are
//! expected to arrive already polygonized.

use std::fmt::Write as _;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub(crate) fn sub(self, other: Point) -> Point {
        Point::new(self.x - other.x, self.y - other.y)
    }

    pub(crate) fn add(self, other: Point) -> Point {
        Point::new(self.x + other.x, self.y + other.y)
    }

    pub(crate) fn mul(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }

    pub(crate) fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub(crate) fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    fn rotated_about(self, center: Point, cos: f64, sin: f64) -> Point {
        let d = self.sub(center);
        Point::new(
            center.x + d.x * cos - d.y * sin,
            center.y + d.x * sin + d.y * cos,
        )
    }

    fn scaled_about(self, center: Point, k: f64) -> Point {
        center.add(self.sub(center).mul(k))
    }
}

/// A thin stroke, the segment equivalent of a vectorized quadrilateral.
#[derive(Clone, Debug, PartialEq)]
pub struct Primitive {
    pub id: u32,
    pub p0: Point,
    pub p1: Point,
    pub width: f64,
}

impl Primitive {
    /// Builds a primitive, rejecting non-finite coordinates, negative widths
    /// and zero-length segments.
    pub fn new(id: u32, p0: Point, p1: Point, width: f64) -> Result<Self> {
        if !p0.is_finite() || !p1.is_finite() {
            return Err(Error::invalid(format!("primitive {id}: non-finite coordinate")));
        }
        if !(width >= 0.0 && width.is_finite()) {
            return Err(Error::invalid(format!("primitive {id}: width must be finite and >= 0")));
        }
        if p0.distance(p1) <= 0.0 {
            return Err(Error::invalid(format!("primitive {id}: zero length")));
        }
        Ok(Primitive { id, p0, p1, width })
    }

    pub fn length(&self) -> f64 {
        self.p0.distance(self.p1)
    }

    pub(crate) fn direction(&self) -> Point {
        self.p1.sub(self.p0)
    }

    /// Orientation of the stroke axis in degrees, in (-180, 180].
    pub fn axis_angle_deg(&self) -> f64 {
        let d = self.direction();
        d.y.atan2(d.x).to_degrees()
    }

    /// Point at parameter `t` along the segment (`t = 0` is `p0`).
    pub fn point_at(&self, t: f64) -> Point {
        self.p0.add(self.direction().mul(t))
    }
}

/// Acute angle between the axes of two primitives, in degrees within [0, 90].
///
/// Symmetric in its arguments and invariant under a common rotation.
pub fn relative_angle(a: &Primitive, b: &Primitive) -> f64 {
    let theta = (a.axis_angle_deg() - b.axis_angle_deg()).abs() % 180.0;
    if theta > 90.0 {
        180.0 - theta
    } else {
        theta
    }
}

/// Closest-approach data between two segments.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Closest {
    pub distance: f64,
    /// Parameter of the closest point on the first segment, in [0, 1].
    pub t: f64,
    /// Parameter of the closest point on the second segment, in [0, 1].
    pub s: f64,
}

fn project_param(p: Point, seg: &Primitive) -> f64 {
    let d = seg.direction();
    (p.sub(seg.p0).dot(d) / d.dot(d)).clamp(0.0, 1.0)
}

/// Minimum distance between two segments together with the parameters of a
/// closest pair. Crossing segments report their intersection.
pub fn closest_points(a: &Primitive, b: &Primitive) -> Closest {
    let da = a.direction();
    let db = b.direction();
    let denom = da.cross(db);
    if denom.abs() > 1e-12 * a.length() * b.length() {
        let w = b.p0.sub(a.p0);
        let t = w.cross(db) / denom;
        let s = w.cross(da) / denom;
        if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&s) {
            return Closest { distance: 0.0, t, s };
        }
    }

    // Otherwise the minimum is attained at an endpoint of one of the two.
    let candidates = [
        (0.0, project_param(a.p0, b), true),
        (1.0, project_param(a.p1, b), true),
        (0.0, project_param(b.p0, a), false),
        (1.0, project_param(b.p1, a), false),
    ];
    let mut best: Option<Closest> = None;
    for (end, proj, from_a) in candidates {
        let (t, s) = if from_a { (end, proj) } else { (proj, end) };
        let distance = a.point_at(t).distance(b.point_at(s));
        if best.map_or(true, |c| distance < c.distance) {
            best = Some(Closest { distance, t, s });
        }
    }
    best.expect("four candidates")
}

/// A vectorized linear symbol: a non-empty list of primitives with unique ids.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorSymbol {
    primitives: Vec<Primitive>,
    pub label: Option<String>,
}

impl VectorSymbol {
    pub fn new(primitives: Vec<Primitive>, label: Option<String>) -> Result<Self> {
        if primitives.is_empty() {
            return Err(Error::invalid("a symbol needs at least one primitive"));
        }
        let mut ids: Vec<u32> = primitives.iter().map(|p| p.id).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("duplicate primitive id"));
        }
        Ok(VectorSymbol { primitives, label })
    }

    /// Convenience constructor from bare segments; ids follow list order and widths are 1.
    pub fn from_segments(segments: &[((f64, f64), (f64, f64))]) -> Result<Self> {
        let prims = segments
            .iter()
            .enumerate()
            .map(|(i, &((x0, y0), (x1, y1)))| {
                Primitive::new(i as u32, Point::new(x0, y0), Point::new(x1, y1), 1.0)
            })
            .collect::<Result<Vec<_>>>()?;
        VectorSymbol::new(prims, None)
    }

    pub fn primitives(&self) -> &[Primitive] {
        &self.primitives
    }

    pub fn len(&self) -> usize {
        self.primitives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primitives.is_empty()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    /// Axis-aligned bounding box as `(min, max)` corners.
    pub fn bbox(&self) -> (Point, Point) {
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in self.primitives.iter().flat_map(|p| [p.p0, p.p1]) {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        (lo, hi)
    }

    pub fn bbox_center(&self) -> Point {
        let (lo, hi) = self.bbox();
        Point::new((lo.x + hi.x) / 2.0, (lo.y + hi.y) / 2.0)
    }

    /// Diagonal of the bounding box; positive because primitives are non-degenerate.
    pub fn bbox_diagonal(&self) -> f64 {
        let (lo, hi) = self.bbox();
        lo.distance(hi)
    }

    pub fn max_length(&self) -> f64 {
        self.primitives.iter().map(Primitive::length).fold(0.0, f64::max)
    }

    /// Length of `prim` over the longest primitive of this symbol.
    pub fn relative_length(&self, prim: &Primitive) -> f64 {
        let max = self.max_length();
        let len = prim.length();
        if len >= max {
            1.0
        } else {
            len / max
        }
    }

    pub(crate) fn map_points(&self, f: impl Fn(Point) -> Point, width_factor: f64) -> Self {
        let primitives = self
            .primitives
            .iter()
            .map(|p| Primitive {
                id: p.id,
                p0: f(p.p0),
                p1: f(p.p1),
                width: p.width * width_factor,
            })
            .collect();
        VectorSymbol {
            primitives,
            label: self.label.clone(),
        }
    }

    /// Mean of all primitive endpoints. Unlike the bounding-box center it
    /// commutes with rotation, so rotating back undoes a rotation exactly.
    pub fn endpoint_centroid(&self) -> Point {
        let n = 2.0 * self.primitives.len() as f64;
        let sum = self
            .primitives
            .iter()
            .fold(Point::new(0.0, 0.0), |acc, p| acc.add(p.p0).add(p.p1));
        sum.mul(1.0 / n)
    }

    /// Rotates counter-clockwise by `angle_deg` about the endpoint centroid.
    pub fn rotate(&self, angle_deg: f64) -> Self {
        if angle_deg % 360.0 == 0.0 {
            return self.clone();
        }
        let center = self.endpoint_centroid();
        let (sin, cos) = angle_deg.to_radians().sin_cos();
        self.map_points(|p| p.rotated_about(center, cos, sin), 1.0)
    }

    /// Scales coordinates and widths by `factor` about the bounding-box center.
    pub fn scale(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::invalid(format!("scale factor must be positive, got {factor}")));
        }
        if factor == 1.0 {
            return Ok(self.clone());
        }
        let center = self.bbox_center();
        Ok(self.map_points(|p| p.scaled_about(center, factor), factor))
    }

    /// Parses the line-oriented vector format: one `x0 y0 x1 y1 width` per
    /// line, `#` comments, and an optional `label <token>` header.
    pub fn parse(text: &str) -> Result<Self> {
        let mut label = None;
        let mut prims = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("label") {
                if rest.starts_with(char::is_whitespace) {
                    if !prims.is_empty() || label.is_some() {
                        return Err(Error::parse(line_no, "label header must precede primitives"));
                    }
                    label = Some(rest.trim().to_string());
                    continue;
                }
            }
            let nums = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<f64>()
                        .map_err(|_| Error::parse(line_no, format!("not a number: {tok:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            if nums.len() != 5 {
                return Err(Error::parse(
                    line_no,
                    format!("expected `x0 y0 x1 y1 width`, found {} values", nums.len()),
                ));
            }
            let prim = Primitive::new(
                prims.len() as u32,
                Point::new(nums[0], nums[1]),
                Point::new(nums[2], nums[3]),
                nums[4],
            )
            .map_err(|e| Error::parse(line_no, e.to_string()))?;
            prims.push(prim);
        }
        if prims.is_empty() {
            return Err(Error::parse(text.lines().count().max(1), "no primitives"));
        }
        VectorSymbol::new(prims, label)
    }

    /// Inverse of [`VectorSymbol::parse`] up to primitive ids, which are
    /// reassigned in line order on reading.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(label) = &self.label {
            let _ = writeln!(out, "label {label}");
        }
        for p in &self.primitives {
            let _ = writeln!(out, "{} {} {} {} {}", p.p0.x, p.p0.y, p.p1.x, p.p1.y, p.width);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg(id: u32, a: (f64, f64), b: (f64, f64)) -> Primitive {
        Primitive::new(id, Point::new(a.0, a.1), Point::new(b.0, b.1), 1.0).unwrap()
    }

    fn close(a: Point, b: Point, eps: f64) -> bool {
        (a.x - b.x).abs() <= eps && (a.y - b.y).abs() <= eps
    }

    #[test]
    fn rotate_segment_about_its_center() {
        let s = VectorSymbol::from_segments(&[((0.0, 0.0), (1.0, 0.0))]).unwrap();
        let r = s.rotate(90.0);
        let p = &r.primitives()[0];
        assert!(close(p.p0, Point::new(0.5, -0.5), 1e-12));
        assert!(close(p.p1, Point::new(0.5, 0.5), 1e-12));
    }

    #[test]
    fn rotate_identity_and_inverse() {
        let s = VectorSymbol::from_segments(&[((0.0, 0.0), (3.0, 1.0)), ((1.0, 2.0), (4.0, -1.0))])
            .unwrap();
        assert_eq!(s.rotate(0.0), s);
        let back = s.rotate(37.0).rotate(-37.0);
        for (a, b) in s.primitives().iter().zip(back.primitives()) {
            assert!(close(a.p0, b.p0, 1e-9) && close(a.p1, b.p1, 1e-9));
        }
    }

    #[test]
    fn scale_rules() {
        let s = VectorSymbol::from_segments(&[((0.0, 0.0), (3.0, 1.0)), ((1.0, 2.0), (4.0, -1.0))])
            .unwrap();
        assert_eq!(s.scale(1.0).unwrap(), s);
        let back = s.scale(2.0).unwrap().scale(0.5).unwrap();
        for (a, b) in s.primitives().iter().zip(back.primitives()) {
            assert!(close(a.p0, b.p0, 1e-9) && close(a.p1, b.p1, 1e-9));
        }
        let tripled = s.scale(3.0).unwrap();
        for (a, b) in s.primitives().iter().zip(tripled.primitives()) {
            assert!((b.length() - 3.0 * a.length()).abs() < 1e-9);
            assert_eq!(b.width, 3.0 * a.width);
        }
        assert!(matches!(s.scale(0.0), Err(Error::InvalidArgument(_))));
        assert!(matches!(s.scale(-2.0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn relative_length_normalizes_by_longest() {
        let s = VectorSymbol::from_segments(&[((0.0, 0.0), (1.0, 0.0)), ((0.0, 1.0), (2.0, 1.0))])
            .unwrap();
        assert_eq!(s.relative_length(&s.primitives()[0]), 0.5);
        assert_eq!(s.relative_length(&s.primitives()[1]), 1.0);

        let equal = VectorSymbol::from_segments(&[((0.0, 0.0), (1.0, 0.0)), ((0.0, 0.0), (0.0, 1.0))])
            .unwrap();
        for p in equal.primitives() {
            assert_eq!(equal.relative_length(p), 1.0);
        }
    }

    #[test]
    fn relative_angle_cases() {
        let h = seg(0, (0.0, 0.0), (1.0, 0.0));
        let h2 = seg(1, (5.0, 3.0), (2.0, 3.0));
        let v = seg(2, (0.0, 0.0), (0.0, 1.0));
        let d120 = seg(3, (0.0, 0.0), (-0.5, 3f64.sqrt() / 2.0));
        assert_eq!(relative_angle(&h, &h2), 0.0);
        assert_eq!(relative_angle(&h, &v), 90.0);
        assert!((relative_angle(&h, &d120) - 60.0).abs() < 1e-12);
        assert_eq!(relative_angle(&h, &d120), relative_angle(&d120, &h));
    }

    #[test]
    fn rejects_degenerate_primitives() {
        assert!(Primitive::new(0, Point::new(1.0, 1.0), Point::new(1.0, 1.0), 1.0).is_err());
        assert!(Primitive::new(0, Point::new(f64::NAN, 1.0), Point::new(1.0, 1.0), 1.0).is_err());
        assert!(Primitive::new(0, Point::new(0.0, 0.0), Point::new(1.0, 1.0), -1.0).is_err());
        let p = seg(0, (0.0, 0.0), (1.0, 0.0));
        assert!(VectorSymbol::new(vec![p.clone(), p], None).is_err());
        assert!(VectorSymbol::new(vec![], None).is_err());
    }

    #[test]
    fn closest_points_cases() {
        let a = seg(0, (0.0, 0.0), (2.0, 0.0));
        let cross = seg(1, (1.0, -1.0), (1.0, 1.0));
        let c = closest_points(&a, &cross);
        assert_eq!(c.distance, 0.0);
        assert!((c.t - 0.5).abs() < 1e-12 && (c.s - 0.5).abs() < 1e-12);

        let far = seg(2, (0.0, 3.0), (2.0, 5.0));
        let c = closest_points(&a, &far);
        assert!((c.distance - 3.0).abs() < 1e-12);
        assert_eq!((c.t, c.s), (0.0, 0.0));

        let tee = seg(3, (1.5, 0.5), (1.5, 2.0));
        let c = closest_points(&a, &tee);
        assert!((c.distance - 0.5).abs() < 1e-12);
        assert!((c.t - 0.75).abs() < 1e-12 && c.s == 0.0);
    }

    #[test]
    fn parse_and_print() {
        let text = "# demo\nlabel 016\n0 0 1 0 0.5\n1 0 1 1 0.5 # right edge\n\n";
        let s = VectorSymbol::parse(text).unwrap();
        assert_eq!(s.label.as_deref(), Some("016"));
        assert_eq!(s.len(), 2);
        assert_eq!(s.primitives()[1].id, 1);
        assert_eq!(VectorSymbol::parse(&s.to_text()).unwrap(), s);

        match VectorSymbol::parse("0 0 1 0 1\n0 0 1\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(VectorSymbol::parse("0 0 0 0 1\n").is_err());
        assert!(VectorSymbol::parse("# nothing\n").is_err());
    }
}
