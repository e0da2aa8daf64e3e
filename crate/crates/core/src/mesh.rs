//! Synthetic triangulations: Bowyer–Watson Delaunay meshes of points in the
//! unit square, grayscale grids (PGM or analytic), and grid-to-simplex
//! signal interpolation.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::{SimplexSpec, SimplicialComplex};
use crate::error::{invalid, Error, Result};

pub type Point = [f64; 2];

/// Orientation tolerance used for collinearity.
pub const ORIENT_EPS: f64 = 1e-12;

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

/// Positive when `d` lies strictly inside the circumcircle of the
/// counter-clockwise triangle `abc`.
fn in_circle(a: Point, b: Point, c: Point, d: Point) -> f64 {
    let (adx, ady) = (a[0] - d[0], a[1] - d[1]);
    let (bdx, bdy) = (b[0] - d[0], b[1] - d[1]);
    let (cdx, cdy) = (c[0] - d[0], c[1] - d[1]);
    let ad = adx * adx + ady * ady;
    let bd = bdx * bdx + bdy * bdy;
    let cd = cdx * cdx + cdy * cdy;
    adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx)
}

/// Delaunay triangles of `points` as counter-clockwise index triples.
/// Insertion follows input order, so the result is deterministic.
pub fn delaunay_triangles(points: &[Point]) -> Result<Vec<[usize; 3]>> {
    if points.len() < 3 {
        return invalid(format!("Delaunay triangulation needs at least 3 points, got {}", points.len()));
    }
    let (a, b) = (points[0], points[1]);
    if !points.iter().any(|&c| orient(a, b, c).abs() > ORIENT_EPS)
        || points.iter().all(|&p| p == a)
    {
        return invalid("all points are collinear");
    }
    let n = points.len();
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in points {
        for d in 0..2 {
            lo[d] = lo[d].min(p[d]);
            hi[d] = hi[d].max(p[d]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1.0);
    let mid = [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0];
    let big = 100.0 * span;
    let mut pts: Vec<Point> = points.to_vec();
    pts.push([mid[0] - big, mid[1] - big]);
    pts.push([mid[0] + big, mid[1] - big]);
    pts.push([mid[0], mid[1] + big]);
    let mut tris: Vec<[usize; 3]> = vec![[n, n + 1, n + 2]];

    for i in 0..n {
        let p = pts[i];
        let (bad, keep): (Vec<[usize; 3]>, Vec<[usize; 3]>) =
            tris.into_iter().partition(|t| in_circle(pts[t[0]], pts[t[1]], pts[t[2]], p) > 0.0);
        tris = keep;
        let mut edges: Vec<(usize, usize)> = Vec::new();
        for t in &bad {
            for e in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                let shared = bad.iter().any(|u| {
                    u != t && [(u[0], u[1]), (u[1], u[2]), (u[2], u[0])].iter().any(|&(x, y)| (x, y) == (e.1, e.0))
                });
                if !shared {
                    edges.push(e);
                }
            }
        }
        for (x, y) in edges {
            if orient(pts[x], pts[y], p).abs() > ORIENT_EPS {
                tris.push([x, y, i]);
            }
        }
    }
    tris.retain(|t| t.iter().all(|&v| v < n));
    tris.sort_unstable();
    Ok(tris)
}

/// Face-closed complex of the Delaunay triangulation; vertex `i` is point
/// `i`.
pub fn delaunay_sample(points: &[Point]) -> Result<SimplicialComplex> {
    let tris = delaunay_triangles(points)?;
    let specs: Vec<SimplexSpec> = tris.iter().map(|t| SimplexSpec::natural(t.to_vec())).collect();
    SimplicialComplex::from_specs(Some(points.len()), &specs)
}

/// `count` points drawn uniformly from the unit square.
pub fn random_points(count: usize, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| [rng.random::<f64>(), rng.random::<f64>()]).collect()
}

/// Row-major grayscale grid; row 0 is `y = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Synthetic {
    Ramp,
    Bumps,
    Checker,
}

impl FromStr for Synthetic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ramp" => Ok(Synthetic::Ramp),
            "bumps" => Ok(Synthetic::Bumps),
            "checker" => Ok(Synthetic::Checker),
            other => Err(Error::Invalid(format!("unknown synthetic image {other:?}"))),
        }
    }
}

impl fmt::Display for Synthetic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Synthetic::Ramp => "ramp",
            Synthetic::Bumps => "bumps",
            Synthetic::Checker => "checker",
        })
    }
}

const BUMPS: [(f64, f64, f64, f64); 5] = [
    (0.25, 0.30, 0.08, 1.0),
    (0.70, 0.25, 0.12, 0.8),
    (0.50, 0.65, 0.10, -0.6),
    (0.20, 0.80, 0.06, 0.9),
    (0.80, 0.75, 0.09, 0.7),
];

impl Synthetic {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            Synthetic::Ramp => x,
            Synthetic::Bumps => BUMPS
                .iter()
                .map(|&(cx, cy, s, h)| h * (-((x - cx).powi(2) + (y - cy).powi(2)) / (2.0 * s * s)).exp())
                .sum(),
            Synthetic::Checker => {
                let (i, j) = ((x * 8.0).floor() as i64, (y * 8.0).floor() as i64);
                ((i + j).rem_euclid(2)) as f64
            }
        }
    }
}

impl Grid {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width < 1 || height < 1 || data.len() != width * height {
            return invalid(format!("grid {width}x{height} with {} values", data.len()));
        }
        Ok(Self { width, height, data })
    }

    /// Samples an analytic image at the pixel lattice `(i/(w−1), r/(h−1))`.
    pub fn synthetic(kind: Synthetic, width: usize, height: usize) -> Self {
        let coord = |i: usize, len: usize| if len > 1 { i as f64 / (len - 1) as f64 } else { 0.0 };
        let data = (0..height)
            .flat_map(|r| (0..width).map(move |i| kind.eval(coord(i, width), coord(r, height))))
            .collect();
        Self { width, height, data }
    }

    pub fn at(&self, col: usize, row: usize) -> f64 {
        self.data[row * self.width + col]
    }

    /// Bilinear interpolation on the pixel cell containing `p`; coordinates
    /// outside the unit square are clamped with a warning.
    pub fn sample(&self, p: Point) -> f64 {
        let mut q = p;
        if !(0.0..=1.0).contains(&p[0]) || !(0.0..=1.0).contains(&p[1]) {
            log::warn!("coordinate ({}, {}) outside the unit square; clamped", p[0], p[1]);
            q = [p[0].clamp(0.0, 1.0), p[1].clamp(0.0, 1.0)];
        }
        let u = q[0] * (self.width - 1) as f64;
        let v = q[1] * (self.height - 1) as f64;
        let (c0, r0) = ((u.floor() as usize).min(self.width - 1), (v.floor() as usize).min(self.height - 1));
        let (c1, r1) = ((c0 + 1).min(self.width - 1), (r0 + 1).min(self.height - 1));
        let (s, t) = (u - c0 as f64, v - r0 as f64);
        let top = self.at(c0, r0) * (1.0 - s) + self.at(c1, r0) * s;
        let bottom = self.at(c0, r1) * (1.0 - s) + self.at(c1, r1) * s;
        top * (1.0 - t) + bottom * t
    }

    /// Reads ASCII (P2) or binary (P5) PGM, scaling samples to `[0, 1]`.
    pub fn read_pgm(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path)?;
        let name = path.display().to_string();
        parse_pgm(&bytes).map_err(|message| Error::Parse { path: name, message })
    }

    /// Writes binary 8-bit PGM, mapping `[min, max]` to `0..=255`.
    pub fn write_pgm(&self, path: &Path) -> Result<()> {
        let lo = self.data.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let scale = if hi > lo { 255.0 / (hi - lo) } else { 0.0 };
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend(self.data.iter().map(|v| ((v - lo) * scale).round() as u8));
        std::fs::write(path, out)?;
        Ok(())
    }
}

fn parse_pgm(bytes: &[u8]) -> std::result::Result<Grid, String> {
    let mut pos = 0;
    let mut line = 1;
    let mut token = |pos: &mut usize| -> std::result::Result<(String, usize), String> {
        loop {
            while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
                if bytes[*pos] == b'\n' {
                    line += 1;
                }
                *pos += 1;
            }
            if *pos < bytes.len() && bytes[*pos] == b'#' {
                while *pos < bytes.len() && bytes[*pos] != b'\n' {
                    *pos += 1;
                }
                continue;
            }
            break;
        }
        let start = *pos;
        while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if start == *pos {
            return Err(format!("line {line}: unexpected end of file"));
        }
        Ok((String::from_utf8_lossy(&bytes[start..*pos]).into_owned(), line))
    };
    let num = |t: (String, usize)| t.0.parse::<usize>().map_err(|_| format!("line {}: expected an integer, got {:?}", t.1, t.0));
    let (magic, _) = token(&mut pos)?;
    if magic != "P2" && magic != "P5" {
        return Err(format!("line 1: not a PGM file (magic {magic:?})"));
    }
    let width = num(token(&mut pos)?)?;
    let height = num(token(&mut pos)?)?;
    let maxval = num(token(&mut pos)?)?;
    if width == 0 || height == 0 || maxval == 0 || maxval > 65535 {
        return Err(format!("line {line}: bad PGM header {width}x{height} max {maxval}"));
    }
    let count = width * height;
    let mut data = Vec::with_capacity(count);
    if magic == "P2" {
        for _ in 0..count {
            let v = num(token(&mut pos)?)?;
            data.push(v as f64 / maxval as f64);
        }
    } else {
        pos += 1;
        let wide = maxval > 255;
        let need = count * if wide { 2 } else { 1 };
        if bytes.len() < pos + need {
            return Err(format!("line {line}: raster truncated ({} of {need} bytes)", bytes.len().saturating_sub(pos)));
        }
        for i in 0..count {
            let v = if wide {
                u16::from_be_bytes([bytes[pos + 2 * i], bytes[pos + 2 * i + 1]]) as f64
            } else {
                bytes[pos + i] as f64
            };
            data.push(v / maxval as f64);
        }
    }
    Ok(Grid { width, height, data })
}

/// Vertex values by bilinear sampling at `coords`; every higher simplex gets
/// the mean of its vertices' values. Returns one signal per stratum.
pub fn interpolate_image(c: &SimplicialComplex, grid: &Grid, coords: &[Point]) -> Result<Vec<Vec<f64>>> {
    if coords.len() != c.vertex_count() {
        return Err(Error::Dimension { expected: c.vertex_count(), got: coords.len() });
    }
    let vertex: Vec<f64> = coords.iter().map(|&p| grid.sample(p)).collect();
    Ok((0..=c.kappa_max())
        .map(|k| {
            c.stratum(k)
                .iter()
                .map(|s| s.vertices().iter().map(|&v| vertex[v]).sum::<f64>() / s.vertices().len() as f64)
                .collect()
        })
        .collect())
}
