//! Regions on S² built from spherical caps, and the geometric control
//! conditions for the classical geodesic flow and for flows on `G(S²)`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;

use nalgebra::Vector3;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geom::{fibonacci_sphere, gauss_legendre, great_circle_point, UnitVector3};
use crate::radon::{integrate_flow, GeodesicFunction};

/// Samples per circle for boolean combinations other than unions.
pub const CIRCLE_SAMPLES: usize = 512;
/// Default depth margin (radians) a circle must reach for an "empty" verdict.
pub const DEFAULT_TOLERANCE: f64 = 1e-3;

/// Open cap `{x : angle(x, center) < radius}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cap {
    pub center: UnitVector3,
    pub radius: f64,
}

impl Cap {
    pub fn new(center: UnitVector3, radius: f64) -> Self {
        Cap { center, radius }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    Full,
    Empty,
    Cap(Cap),
    Union(Vec<Region>),
    Intersection(Vec<Region>),
    Complement(Box<Region>),
}

impl Region {
    pub fn cap(center: UnitVector3, radius: f64) -> Self {
        Region::Cap(Cap::new(center, radius))
    }

    /// Exact membership; caps are open.
    pub fn contains(&self, x: &Vector3<f64>) -> bool {
        match self {
            Region::Full => true,
            Region::Empty => false,
            Region::Cap(c) => c.radius > 0.0 && (c.radius > PI || x.dot(&c.center) > c.radius.cos()),
            Region::Union(rs) => rs.iter().any(|r| r.contains(x)),
            Region::Intersection(rs) => rs.iter().all(|r| r.contains(x)),
            Region::Complement(r) => !r.contains(x),
        }
    }

    /// Signed angular depth of `x` inside the region (positive inside).
    pub fn signed_depth(&self, x: &Vector3<f64>) -> f64 {
        match self {
            Region::Full => PI,
            Region::Empty => -PI,
            Region::Cap(c) => c.radius - angle_between(x, &c.center),
            Region::Union(rs) => rs.iter().map(|r| r.signed_depth(x)).fold(-PI, f64::max),
            Region::Intersection(rs) => rs.iter().map(|r| r.signed_depth(x)).fold(PI, f64::min),
            Region::Complement(r) => -r.signed_depth(x),
        }
    }

    pub fn area(&self) -> f64 {
        match self {
            Region::Full => 4.0 * PI,
            Region::Empty => 0.0,
            Region::Cap(c) => TAU * (1.0 - c.radius.clamp(0.0, PI).cos()),
            Region::Complement(r) => 4.0 * PI - r.area(),
            _ => self
                .latitude_rule(48)
                .into_iter()
                .map(|(t, w)| w * self.latitude_arcs(t).iter().map(|(a, b)| b - a).sum::<f64>())
                .sum(),
        }
    }

    fn caps(&self, out: &mut Vec<Cap>) {
        match self {
            Region::Cap(c) => out.push(c.clone()),
            Region::Union(rs) | Region::Intersection(rs) => rs.iter().for_each(|r| r.caps(out)),
            Region::Complement(r) => r.caps(out),
            Region::Full | Region::Empty => {}
        }
    }

    /// Azimuth intervals `[φ₀, φ₁] ⊂ [0, 2π]` of the region on the latitude `z = t`.
    pub fn latitude_arcs(&self, t: f64) -> Vec<(f64, f64)> {
        match self {
            Region::Full => vec![(0.0, TAU)],
            Region::Empty => Vec::new(),
            Region::Cap(c) => cap_arcs(c, t),
            Region::Union(rs) => rs
                .iter()
                .fold(Vec::new(), |acc, r| interval_union(&acc, &r.latitude_arcs(t))),
            Region::Intersection(rs) => rs
                .iter()
                .fold(vec![(0.0, TAU)], |acc, r| interval_intersection(&acc, &r.latitude_arcs(t))),
            Region::Complement(r) => interval_complement(&r.latitude_arcs(t)),
        }
    }

    /// Latitudes where the arc structure changes: cap extremes and pairwise boundary crossings.
    pub fn latitude_breakpoints(&self) -> Vec<f64> {
        let mut caps = Vec::new();
        self.caps(&mut caps);
        let mut points = vec![-1.0, 1.0];
        for c in &caps {
            let theta = c.center.z().clamp(-1.0, 1.0).acos();
            for edge in [theta - c.radius, theta + c.radius] {
                let z = edge.cos();
                points.push(z);
            }
        }
        for (i, a) in caps.iter().enumerate() {
            for b in &caps[i + 1..] {
                for p in boundary_crossings(a, b) {
                    points.push(p.z);
                }
            }
        }
        let mut points: Vec<f64> = points.into_iter().map(|z| z.clamp(-1.0, 1.0)).collect();
        points.sort_by(f64::total_cmp);
        points.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        points
    }

    /// Latitude nodes and weights: Gauss–Legendre on each segment between
    /// breakpoints after the substitution `t = m − h·cos u`, which absorbs the
    /// square-root behaviour of arc endpoints at segment ends.
    pub fn latitude_rule(&self, per_segment: usize) -> Vec<(f64, f64)> {
        let breaks = self.latitude_breakpoints();
        let (gx, gw) = gauss_legendre(per_segment);
        let mut rule = Vec::with_capacity(per_segment * breaks.len());
        for pair in breaks.windows(2) {
            let (lo, hi) = (pair[0], pair[1]);
            let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
            for (x, w) in gx.iter().zip(&gw) {
                let u = 0.5 * PI * (x + 1.0);
                rule.push((mid - half * u.cos(), w * 0.5 * PI * half * u.sin()));
            }
        }
        rule
    }

    /// Parses the region mini-grammar:
    /// `cap(cx,cy,cz,alpha) | union(r, ...) | inter(r, ...) | compl(r) | full | empty`.
    pub fn parse(text: &str) -> Result<Region> {
        let mut p = Parser { text, pos: 0 };
        let region = p.region()?;
        p.skip_ws();
        if p.pos != text.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(region)
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, name: &str, rs: &[Region]| {
            write!(f, "{name}(")?;
            for (i, r) in rs.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{r}")?;
            }
            write!(f, ")")
        };
        match self {
            Region::Full => write!(f, "full"),
            Region::Empty => write!(f, "empty"),
            Region::Cap(c) => write!(f, "cap({},{},{},{})", c.center.x(), c.center.y(), c.center.z(), c.radius),
            Region::Union(rs) => list(f, "union", rs),
            Region::Intersection(rs) => list(f, "inter", rs),
            Region::Complement(r) => write!(f, "compl({r})"),
        }
    }
}

impl Serialize for Region {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

fn angle_between(a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}

fn cap_arcs(c: &Cap, t: f64) -> Vec<(f64, f64)> {
    if c.radius <= 0.0 {
        return Vec::new();
    }
    if c.radius >= PI {
        return vec![(0.0, TAU)];
    }
    let s = (1.0 - t * t).max(0.0).sqrt();
    let rho = c.center.x().hypot(c.center.y());
    let rhs = c.radius.cos() - t * c.center.z();
    let sr = s * rho;
    if sr <= 0.0 {
        return if rhs < 0.0 { vec![(0.0, TAU)] } else { Vec::new() };
    }
    let q = rhs / sr;
    if q >= 1.0 {
        return Vec::new();
    }
    if q <= -1.0 {
        return vec![(0.0, TAU)];
    }
    let half = q.acos();
    let phi_c = c.center.y().atan2(c.center.x()).rem_euclid(TAU);
    let lo = phi_c - half;
    let hi = phi_c + half;
    let mut arcs = Vec::new();
    if lo < 0.0 {
        arcs.push((0.0, hi));
        arcs.push((lo + TAU, TAU));
    } else if hi > TAU {
        arcs.push((0.0, hi - TAU));
        arcs.push((lo, TAU));
    } else {
        arcs.push((lo, hi));
    }
    interval_union(&[], &arcs)
}

fn interval_union(a: &[(f64, f64)], b: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut all: Vec<(f64, f64)> = a.iter().chain(b).cloned().filter(|(l, h)| h > l).collect();
    all.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(all.len());
    for (l, h) in all {
        match out.last_mut() {
            Some(last) if l <= last.1 => last.1 = last.1.max(h),
            _ => out.push((l, h)),
        }
    }
    out
}

fn interval_intersection(a: &[(f64, f64)], b: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for &(al, ah) in a {
        for &(bl, bh) in b {
            let (l, h) = (al.max(bl), ah.min(bh));
            if h > l {
                out.push((l, h));
            }
        }
    }
    interval_union(&[], &out)
}

fn interval_complement(a: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut cursor = 0.0;
    for &(l, h) in a {
        if l > cursor {
            out.push((cursor, l));
        }
        cursor = cursor.max(h);
    }
    if cursor < TAU {
        out.push((cursor, TAU));
    }
    out
}

/// Points where the boundary circles of two caps cross.
fn boundary_crossings(a: &Cap, b: &Cap) -> Vec<Vector3<f64>> {
    let d = a.center.dot(&b.center);
    let normal = a.center.cross(&b.center);
    let nn = normal.norm_squared();
    if nn < 1e-24 {
        return Vec::new();
    }
    let (ca, cb) = (a.radius.cos(), b.radius.cos());
    let u = (ca - d * cb) / (1.0 - d * d);
    let v = (cb - d * ca) / (1.0 - d * d);
    let base = *a.center.vector() * u + *b.center.vector() * v;
    let rem = 1.0 - base.norm_squared();
    if rem < 0.0 {
        return Vec::new();
    }
    let w = (rem / nn).sqrt();
    vec![base + normal * w, base - normal * w]
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::RegionParse {
            column: self.pos + 1,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.text[self.pos..].starts_with(char::is_whitespace) {
            self.pos += self.text[self.pos..].chars().next().map_or(1, char::len_utf8);
        }
    }

    fn ident(&mut self) -> &str {
        self.skip_ws();
        let start = self.pos;
        let len = self.text[start..]
            .find(|c: char| !c.is_ascii_alphabetic())
            .unwrap_or(self.text.len() - start);
        self.pos += len;
        &self.text[start..start + len]
    }

    fn expect(&mut self, ch: char) -> Result<()> {
        self.skip_ws();
        if self.text[self.pos..].starts_with(ch) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected '{ch}'")))
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.text[self.pos..].chars().next()
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        let len = self.text[start..]
            .find(|c: char| !(c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E')))
            .unwrap_or(self.text.len() - start);
        let token = &self.text[start..start + len];
        let value: f64 = token
            .parse()
            .map_err(|_| self.error(&format!("invalid number '{token}'")))?;
        if !value.is_finite() {
            return Err(self.error("number must be finite"));
        }
        self.pos += len;
        Ok(value)
    }

    fn region(&mut self) -> Result<Region> {
        let start = self.pos;
        let name = self.ident().to_ascii_lowercase();
        match name.as_str() {
            "full" => Ok(Region::Full),
            "empty" => Ok(Region::Empty),
            "cap" => {
                self.expect('(')?;
                let mut v = [0.0; 4];
                for (i, slot) in v.iter_mut().enumerate() {
                    if i > 0 {
                        self.expect(',')?;
                    }
                    *slot = self.number()?;
                }
                self.expect(')')?;
                let center = UnitVector3::try_new(Vector3::new(v[0], v[1], v[2])).map_err(|_| Error::RegionParse {
                    column: start + 1,
                    message: "cap center must be a nonzero vector".into(),
                })?;
                if v[3] < 0.0 {
                    return Err(Error::RegionParse {
                        column: start + 1,
                        message: "cap radius must be nonnegative".into(),
                    });
                }
                Ok(Region::cap(center, v[3]))
            }
            "union" | "inter" => {
                self.expect('(')?;
                let mut parts = vec![self.region()?];
                while self.peek() == Some(',') {
                    self.pos += 1;
                    parts.push(self.region()?);
                }
                self.expect(')')?;
                Ok(if name == "union" {
                    Region::Union(parts)
                } else {
                    Region::Intersection(parts)
                })
            }
            "compl" => {
                self.expect('(')?;
                let inner = self.region()?;
                self.expect(')')?;
                Ok(Region::Complement(Box::new(inner)))
            }
            "" => Err(self.error("expected a region (cap, union, inter, compl, full, empty)")),
            other => {
                self.pos = start;
                self.skip_ws();
                Err(self.error(&format!("unknown region '{other}'")))
            }
        }
    }
}

/// Whether the great circle with normal `n` meets the region, and how deeply.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CircleTest {
    pub meets: bool,
    pub depth: f64,
}

/// Maximum over the great circle with normal `n` of the signed depth in `ω`.
pub fn circle_depth(n: &UnitVector3, region: &Region) -> f64 {
    match region {
        Region::Full => PI,
        Region::Empty => -PI,
        Region::Cap(c) => c.radius - (FRAC_PI_2 - n.angle_to(&c.center)).abs(),
        Region::Union(rs) => rs.iter().map(|r| circle_depth(n, r)).fold(-PI, f64::max),
        Region::Complement(inner) if matches!(inner.as_ref(), Region::Cap(_)) => {
            let Region::Cap(c) = inner.as_ref() else { unreachable!() };
            PI - (FRAC_PI_2 - n.angle_to(&c.center)).abs() - c.radius
        }
        _ => (0..CIRCLE_SAMPLES)
            .map(|j| region.signed_depth(&great_circle_point(n, TAU * j as f64 / CIRCLE_SAMPLES as f64)))
            .fold(f64::NEG_INFINITY, f64::max),
    }
}

pub fn circle_meets_region(n: &UnitVector3, region: &Region) -> CircleTest {
    let depth = circle_depth(n, region);
    CircleTest {
        meets: depth > 0.0,
        depth,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Empty,
    Nonempty,
    Undecided,
}

#[derive(Debug, Clone, Serialize)]
pub struct ControlReport {
    pub verdict: Verdict,
    pub margin: f64,
    #[serde(rename = "T")]
    pub horizon: Option<f64>,
    pub grid: usize,
    pub dt: Option<f64>,
    pub tolerance: f64,
    pub closed: bool,
    pub witnesses: Vec<UnitVector3>,
    pub undecided: Vec<UnitVector3>,
}

impl ControlReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ControlOptions {
    pub tolerance: f64,
    /// Treat ω as closed: a circle touching the boundary counts as meeting it.
    pub closed: bool,
}

impl Default for ControlOptions {
    fn default() -> Self {
        ControlOptions {
            tolerance: DEFAULT_TOLERANCE,
            closed: false,
        }
    }
}

impl ControlOptions {
    fn meets(&self, depth: f64) -> bool {
        if self.closed {
            depth >= 0.0
        } else {
            depth > 0.0
        }
    }

    fn certified(&self, depth: f64) -> bool {
        if self.closed {
            depth >= 0.0
        } else {
            depth > self.tolerance
        }
    }
}

enum Outcome {
    Depth(f64),
    Failed,
}

fn report(
    normals: &[UnitVector3],
    outcomes: &[Outcome],
    options: &ControlOptions,
    horizon: Option<f64>,
    dt: Option<f64>,
) -> ControlReport {
    let mut witnesses = Vec::new();
    let mut undecided = Vec::new();
    let mut margin = f64::INFINITY;
    for (n, o) in normals.iter().zip(outcomes) {
        match o {
            Outcome::Depth(d) => {
                margin = margin.min(*d);
                if !options.meets(*d) {
                    witnesses.push(*n);
                } else if !options.certified(*d) {
                    undecided.push(*n);
                }
            }
            Outcome::Failed => undecided.push(*n),
        }
    }
    let verdict = if !witnesses.is_empty() {
        Verdict::Nonempty
    } else if undecided.is_empty() {
        Verdict::Empty
    } else {
        Verdict::Undecided
    };
    ControlReport {
        verdict,
        margin,
        horizon,
        grid: normals.len(),
        dt,
        tolerance: options.tolerance,
        closed: options.closed,
        witnesses,
        undecided,
    }
}

/// Sweeps a Fibonacci grid of great-circle normals for circles missing ω.
pub fn gcc_classical(region: &Region, grid_size: usize) -> ControlReport {
    gcc_classical_with(region, grid_size, ControlOptions::default())
}

pub fn gcc_classical_with(region: &Region, grid_size: usize, options: ControlOptions) -> ControlReport {
    let normals = fibonacci_sphere(grid_size);
    let outcomes: Vec<Outcome> = normals
        .par_iter()
        .map(|n| Outcome::Depth(circle_depth(n, region)))
        .collect();
    report(&normals, &outcomes, &options, None, None)
}

#[derive(Debug, Clone, Copy)]
pub struct FlowControlOptions {
    pub control: ControlOptions,
    pub dt: f64,
    /// Orbits stop once their depth exceeds this; margins below it are exact.
    pub saturation: f64,
}

impl Default for FlowControlOptions {
    fn default() -> Self {
        FlowControlOptions {
            control: ControlOptions::default(),
            dt: 0.02,
            saturation: 0.05,
        }
    }
}

/// Largest circle depth in ω along the orbit of `n0` over `[−T, T]`, stopping
/// early once `saturation` is exceeded.
pub fn orbit_depth(
    region: &Region,
    h: &GeodesicFunction,
    n0: &UnitVector3,
    horizon: f64,
    dt: f64,
    saturation: f64,
) -> Result<f64> {
    let mut best = circle_depth(n0, region);
    if best > saturation || h.hamiltonian_field(n0).norm() < 1e-14 {
        return Ok(best);
    }
    for direction in [1.0, -1.0] {
        integrate_flow(h, n0, direction * horizon, dt, |_, n| {
            best = best.max(circle_depth(n, region));
            best <= saturation
        })?;
        if best > saturation {
            break;
        }
    }
    Ok(best)
}

/// Control condition along the Hamiltonian flow of `h` on the geodesic sphere.
pub fn gcc_flow(region: &Region, h: &GeodesicFunction, horizon: f64, grid_size: usize) -> ControlReport {
    gcc_flow_with(region, h, horizon, grid_size, FlowControlOptions::default())
}

pub fn gcc_flow_with(
    region: &Region,
    h: &GeodesicFunction,
    horizon: f64,
    grid_size: usize,
    options: FlowControlOptions,
) -> ControlReport {
    let normals = fibonacci_sphere(grid_size);
    let outcomes: Vec<Outcome> = normals
        .par_iter()
        .map(|n| match orbit_depth(region, h, n, horizon, options.dt, options.saturation) {
            Ok(d) => Outcome::Depth(d),
            Err(_) => Outcome::Failed,
        })
        .collect();
    report(&normals, &outcomes, &options.control, Some(horizon), Some(options.dt))
}
