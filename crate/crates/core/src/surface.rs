//! Construction of the invariant surfaces: the snake curve, quadrant-pruned
//! planes, orbit-cylinder bridges, membership tests, cross-sections and
//! meshes.
//!
//! The snake is the graph x = g(z) with one smooth exponential bump per
//! bridge interval, flat at the integer heights, so turns sit at
//! half-integer heights with |x| equal to the amplitude.  Bridge j between
//! the planes z = j-1 and z = j bulges to the side (-1)^(l-j); quadrant
//! removal follows: interior planes keep only the two quadrants containing
//! (0, +/-1), the extreme planes lose exactly the quadrant their bridge
//! replaces.  Open quadrants are removed, so the cone lines y = +/-x stay on
//! the surface.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::polynomials::{turn_product, VAR_Z};

/// Smooth bump on (0, 1): exp(4 - 1/(t(1-t))), flat at both ends, peak value
/// 1 at t = 1/2.
fn bump(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        return 0.0;
    }
    let w = t * (1.0 - t);
    (4.0 - 1.0 / w).exp()
}

fn bump_prime(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        return 0.0;
    }
    let w = t * (1.0 - t);
    let b = (4.0 - 1.0 / w).exp();
    if b == 0.0 {
        return 0.0;
    }
    b * (1.0 - 2.0 * t) / (w * w)
}

/// The snake curve x = g(z) through the equilibria (0, 0, k).
#[derive(Debug, Clone, Serialize)]
pub struct SnakeCurve {
    l: usize,
    amplitude: f64,
    /// bulge[j-1] is the side sign of bridge j, (-1)^(l-j).
    bulge: Vec<f64>,
}

impl SnakeCurve {
    pub fn l(&self) -> usize {
        self.l
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    /// Side sign of bridge j, 1-based.
    pub fn bulge_dir(&self, j: usize) -> f64 {
        self.bulge[j - 1]
    }

    fn bridge_of(&self, z: f64) -> Option<usize> {
        if z <= 0.0 || z >= (self.l - 1) as f64 {
            return None;
        }
        Some((z.floor() as usize + 1).min(self.l - 1))
    }

    /// x-displacement at height z.
    pub fn g(&self, z: f64) -> f64 {
        match self.bridge_of(z) {
            Some(j) => self.bulge[j - 1] * self.amplitude * bump(z - (j - 1) as f64),
            None => 0.0,
        }
    }

    /// Exact derivative dg/dz.
    pub fn g_prime(&self, z: f64) -> f64 {
        match self.bridge_of(z) {
            Some(j) => self.bulge[j - 1] * self.amplitude * bump_prime(z - (j - 1) as f64),
            None => 0.0,
        }
    }
}

pub fn build_snake(l: usize, a: f64) -> Result<SnakeCurve> {
    if l < 2 {
        return Err(Error::InvalidParameter(format!("snake requires l >= 2, got {l}")));
    }
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "snake amplitude must lie in (0, 1), got {a}"
        )));
    }
    let bulge = (1..l)
        .map(|j| if (l - j) % 2 == 0 { 1.0 } else { -1.0 })
        .collect();
    Ok(SnakeCurve { l, amplitude: a, bulge })
}

/// Identifier of a surface piece.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum PieceId {
    /// Plane z = k with quadrants removed, k in 0..l.
    Plane(usize),
    /// Orbit-cylinder bridge j between the planes z = j-1 and z = j.
    Bridge(usize),
}

/// Full description of the surface with l isolated equilibria.
#[derive(Debug, Clone, Serialize)]
pub struct SurfaceSpec {
    l: usize,
    amplitude: f64,
    snake: SnakeCurve,
    removed_bottom: f64,
    removed_top: f64,
}

impl SurfaceSpec {
    pub fn l(&self) -> usize {
        self.l
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn snake(&self) -> &SnakeCurve {
        &self.snake
    }

    /// Side sign of the quadrant removed from the bottom plane.
    pub fn removed_bottom(&self) -> f64 {
        self.removed_bottom
    }

    /// Side sign of the quadrant removed from the top plane.
    pub fn removed_top(&self) -> f64 {
        self.removed_top
    }

    pub fn bulge_dir(&self, j: usize) -> f64 {
        self.snake.bulge_dir(j)
    }

    /// Is (x, y) inside the kept (closed) region of plane k?
    pub fn in_kept_quadrant(&self, k: usize, x: f64, y: f64) -> bool {
        if k == 0 {
            self.removed_bottom * x <= y.abs()
        } else if k == self.l - 1 {
            self.removed_top * x <= y.abs()
        } else {
            y.abs() >= x.abs()
        }
    }
}

pub fn build_surface(l: usize, a: f64) -> Result<SurfaceSpec> {
    let snake = build_snake(l, a)?;
    let removed_bottom = snake.bulge_dir(1);
    let removed_top = snake.bulge_dir(l - 1);
    Ok(SurfaceSpec { l, amplitude: a, snake, removed_bottom, removed_top })
}

/// The l equilibria (0, 0, k) carried by the surface.
pub fn equilibria(spec: &SurfaceSpec) -> Vec<[f64; 3]> {
    (0..spec.l).map(|k| [0.0, 0.0, k as f64]).collect()
}

/// Classifies an ambient point as a surface piece, or `None` when it is not
/// on the surface at the given tolerance.  The z test is absolute; the
/// orbit-invariant test is relative in x^2 + y^2, since hyperbolic growth
/// makes absolute ambient tolerances meaningless far from the axis.
pub fn membership(spec: &SurfaceSpec, p: [f64; 3], tol: f64) -> Option<PieceId> {
    assert!(tol > 0.0, "membership tolerance must be positive");
    let [x, y, z] = p;
    let top = (spec.l - 1) as f64;

    let k = z.round();
    if (z - k).abs() <= tol && k >= 0.0 && k <= top {
        let k = k as usize;
        return spec.in_kept_quadrant(k, x, y).then_some(PieceId::Plane(k));
    }
    if z <= 0.0 || z >= top {
        return None;
    }
    let j = (z.floor() as usize + 1).min(spec.l - 1);
    let g = spec.snake.g(z);
    let invariant_gap = (x * x - y * y - g * g).abs();
    if invariant_gap > tol * (1.0 + x * x + y * y) {
        return None;
    }
    let sigma = spec.bulge_dir(j);
    if x.signum() == sigma || (g == 0.0 && x.abs() <= tol) {
        Some(PieceId::Bridge(j))
    } else {
        None
    }
}

/// Default half-length of the cross-section rays.
pub const DEFAULT_RAY_EXTENT: f64 = 10.0;

/// One arc of a cross-section traversal, parametrized over s in [0, 1].
#[derive(Debug, Clone, Serialize)]
pub enum SectionArc {
    /// Straight piece at constant height (rays and plane segments).
    Line { kind: LineKind, z: f64, x_from: f64, x_to: f64 },
    /// Bridge piece x = sigma sqrt(g(z)^2 + c^2), z from j-1 to j.
    Bridge { j: usize, sigma: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LineKind {
    BottomRay,
    Segment(usize),
    TopRay,
}

/// The intersection of the surface with a plane y = constant, as an ordered,
/// connected, height-monotone arc traversal.
#[derive(Debug, Clone, Serialize)]
pub struct CrossSection {
    y_value: f64,
    snake: SnakeCurve,
    arcs: Vec<SectionArc>,
}

impl CrossSection {
    pub fn y_value(&self) -> f64 {
        self.y_value
    }

    pub fn arcs(&self) -> &[SectionArc] {
        &self.arcs
    }

    /// Ambient point of arc `i` at parameter `s`.
    pub fn point(&self, i: usize, s: f64) -> [f64; 3] {
        let c = self.y_value;
        match &self.arcs[i] {
            SectionArc::Line { z, x_from, x_to, .. } => [x_from + s * (x_to - x_from), c, *z],
            SectionArc::Bridge { j, sigma } => {
                let z = (*j - 1) as f64 + s;
                let g = self.snake.g(z);
                let x = if c == 0.0 { g } else { sigma * (g * g + c * c).sqrt() };
                [x, c, z]
            }
        }
    }

    /// (dx/ds, dz/ds) of arc `i` at parameter `s`.
    pub fn velocity(&self, i: usize, s: f64) -> (f64, f64) {
        match &self.arcs[i] {
            SectionArc::Line { x_from, x_to, .. } => (x_to - x_from, 0.0),
            SectionArc::Bridge { j, sigma } => {
                let c = self.y_value;
                let z = (*j - 1) as f64 + s;
                let g = self.snake.g(z);
                let gp = self.snake.g_prime(z);
                if c == 0.0 {
                    (gp, 1.0)
                } else {
                    (sigma * g * gp / (g * g + c * c).sqrt(), 1.0)
                }
            }
        }
    }

    /// Panics if `i` is out of range; zero-length arcs are never emitted.
    pub fn arc_len_bound(&self, i: usize) -> f64 {
        let (x0, _, z0) = into_xz(self.point(i, 0.0));
        let (x1, _, z1) = into_xz(self.point(i, 1.0));
        ((x1 - x0).powi(2) + (z1 - z0).powi(2)).sqrt()
    }
}

fn into_xz(p: [f64; 3]) -> (f64, f64, f64) {
    (p[0], p[1], p[2])
}

pub fn cross_section(spec: &SurfaceSpec, c: f64) -> CrossSection {
    cross_section_with_extent(spec, c, DEFAULT_RAY_EXTENT)
}

/// Cross-section with an explicit ray cap (the rays are unbounded on the
/// surface; `extent` only bounds the emitted parametrization).
pub fn cross_section_with_extent(spec: &SurfaceSpec, c: f64, extent: f64) -> CrossSection {
    let l = spec.l;
    let ac = c.abs();
    let attach = |j: usize| spec.bulge_dir(j) * ac;
    let kept_bottom = -spec.removed_bottom;
    let kept_top = -spec.removed_top;

    let mut arcs = Vec::with_capacity(2 * l + 1);
    arcs.push(SectionArc::Line {
        kind: LineKind::BottomRay,
        z: 0.0,
        x_from: kept_bottom * extent,
        x_to: kept_bottom * ac,
    });
    let push_segment = |arcs: &mut Vec<SectionArc>, k: usize, from: f64, to: f64| {
        if from != to {
            arcs.push(SectionArc::Line { kind: LineKind::Segment(k), z: k as f64, x_from: from, x_to: to });
        }
    };
    push_segment(&mut arcs, 0, kept_bottom * ac, attach(1));
    for j in 1..l {
        arcs.push(SectionArc::Bridge { j, sigma: spec.bulge_dir(j) });
        if j < l - 1 {
            push_segment(&mut arcs, j, attach(j), attach(j + 1));
        }
    }
    push_segment(&mut arcs, l - 1, attach(l - 1), kept_top * ac);
    arcs.push(SectionArc::Line {
        kind: LineKind::TopRay,
        z: (l - 1) as f64,
        x_from: kept_top * ac,
        x_to: kept_top * extent,
    });

    CrossSection { y_value: c, snake: spec.snake.clone(), arcs }
}

/// One sampled point of the surface with its piece tag and local
/// parametrization coordinates: (x, y) on planes, (z, y) on bridges.
#[derive(Debug, Clone, Serialize)]
pub struct SurfacePoint {
    pub piece: PieceId,
    pub ambient: [f64; 3],
    pub local: [f64; 2],
}

/// Deterministic sampling of the surface with quad connectivity.
#[derive(Debug, Clone, Serialize)]
pub struct SurfaceMesh {
    pub points: Vec<SurfacePoint>,
    pub quads: Vec<[usize; 4]>,
    /// Indices of the vertices sitting at the equilibria (0, 0, k).
    pub equilibrium_vertices: Vec<usize>,
}

impl SurfaceMesh {
    pub fn piece_census(&self) -> Vec<PieceId> {
        let mut pieces: Vec<PieceId> = self.points.iter().map(|p| p.piece).collect();
        pieces.sort();
        pieces.dedup();
        pieces
    }
}

/// Unit vector at an exact multiple of pi/4; boundary directions come out
/// bit-exact so cone-line samples satisfy |x| == |y|.
fn eighth_turn_unit(idx: i32) -> (f64, f64) {
    const R: f64 = std::f64::consts::FRAC_1_SQRT_2;
    match idx.rem_euclid(8) {
        0 => (1.0, 0.0),
        1 => (R, R),
        2 => (0.0, 1.0),
        3 => (-R, R),
        4 => (-1.0, 0.0),
        5 => (-R, -R),
        6 => (0.0, -1.0),
        7 => (R, -R),
        _ => unreachable!(),
    }
}

fn sector_unit(start_eighth: i32, end_eighth: i32, t: usize, n: usize) -> (f64, f64) {
    if t == 0 {
        return eighth_turn_unit(start_eighth);
    }
    if t == n {
        return eighth_turn_unit(end_eighth);
    }
    let theta = std::f64::consts::FRAC_PI_4
        * (start_eighth as f64 + (end_eighth - start_eighth) as f64 * t as f64 / n as f64);
    (theta.cos(), theta.sin())
}

/// Angular sectors (in eighth turns) kept by plane k.
fn kept_sectors(spec: &SurfaceSpec, k: usize) -> Vec<(i32, i32)> {
    if k == 0 || k == spec.l() - 1 {
        let removed = if k == 0 { spec.removed_bottom() } else { spec.removed_top() };
        if removed < 0.0 {
            vec![(-3, 3)]
        } else {
            vec![(1, 7)]
        }
    } else {
        vec![(1, 3), (5, 7)]
    }
}

/// Samples the surface on deterministic grids: polar grids on the kept
/// plane quadrants (radius capped at `radius`), (z, y) grids on the bridges.
pub fn sample_surface(spec: &SurfaceSpec, density: f64, radius: f64) -> Result<SurfaceMesh> {
    if !(density > 0.0) {
        return Err(Error::InvalidParameter(format!("density must be positive, got {density}")));
    }
    if !(radius > 0.0) {
        return Err(Error::InvalidParameter(format!("radius must be positive, got {radius}")));
    }
    let mut mesh = SurfaceMesh { points: Vec::new(), quads: Vec::new(), equilibrium_vertices: Vec::new() };

    for k in 0..spec.l() {
        let apex = mesh.points.len();
        mesh.points.push(SurfacePoint {
            piece: PieceId::Plane(k),
            ambient: [0.0, 0.0, k as f64],
            local: [0.0, 0.0],
        });
        mesh.equilibrium_vertices.push(apex);

        for (s0, s1) in kept_sectors(spec, k) {
            let sweep = std::f64::consts::FRAC_PI_4 * (s1 - s0) as f64;
            let n_r = (radius * density).ceil().max(1.0) as usize;
            let n_t = (sweep * radius * density).ceil().max(2.0) as usize;
            let mut rings: Vec<Vec<usize>> = Vec::with_capacity(n_r);
            for i in 1..=n_r {
                let r = radius * i as f64 / n_r as f64;
                let mut ring = Vec::with_capacity(n_t + 1);
                for t in 0..=n_t {
                    let (cx, cy) = sector_unit(s0, s1, t, n_t);
                    let idx = mesh.points.len();
                    mesh.points.push(SurfacePoint {
                        piece: PieceId::Plane(k),
                        ambient: [r * cx, r * cy, k as f64],
                        local: [r * cx, r * cy],
                    });
                    ring.push(idx);
                }
                rings.push(ring);
            }
            for t in 0..n_t {
                mesh.quads.push([apex, rings[0][t], rings[0][t + 1], apex]);
            }
            for i in 0..n_r - 1 {
                for t in 0..n_t {
                    mesh.quads.push([
                        rings[i][t],
                        rings[i + 1][t],
                        rings[i + 1][t + 1],
                        rings[i][t + 1],
                    ]);
                }
            }
        }
    }

    for j in 1..spec.l() {
        let sigma = spec.bulge_dir(j);
        let n_z = density.ceil().max(2.0) as usize;
        let n_y = (2.0 * radius * density).ceil().max(2.0) as usize;
        let mut rows: Vec<Vec<usize>> = Vec::with_capacity(n_z + 1);
        for iz in 0..=n_z {
            let z = (j - 1) as f64 + iz as f64 / n_z as f64;
            let g = spec.snake().g(z);
            let mut row = Vec::with_capacity(n_y + 1);
            for iy in 0..=n_y {
                let y = -radius + 2.0 * radius * iy as f64 / n_y as f64;
                let x = if y == 0.0 { g } else { sigma * (g * g + y * y).sqrt() };
                let idx = mesh.points.len();
                mesh.points.push(SurfacePoint {
                    piece: PieceId::Bridge(j),
                    ambient: [x, y, z],
                    local: [z, y],
                });
                row.push(idx);
            }
            rows.push(row);
        }
        for iz in 0..n_z {
            for iy in 0..n_y {
                mesh.quads.push([
                    rows[iz][iy],
                    rows[iz + 1][iy],
                    rows[iz + 1][iy + 1],
                    rows[iz][iy + 1],
                ]);
            }
        }
    }

    Ok(mesh)
}

/// Draws one random point of the surface: piece uniform over the l planes
/// and l-1 bridges, then uniform in that piece's local parameters.
pub fn sample_random_point<R: Rng>(
    spec: &SurfaceSpec,
    rng: &mut R,
    radius: f64,
) -> ([f64; 3], PieceId) {
    let l = spec.l();
    let pick = rng.random_range(0..(2 * l - 1));
    if pick < l {
        let k = pick;
        let sectors = kept_sectors(spec, k);
        let (s0, s1) = sectors[rng.random_range(0..sectors.len())];
        let theta = std::f64::consts::FRAC_PI_4
            * rng.random_range(s0 as f64..s1 as f64);
        let r = rng.random_range(0.0..radius);
        ([r * theta.cos(), r * theta.sin(), k as f64], PieceId::Plane(k))
    } else {
        let j = pick - l + 1;
        let z = rng.random_range((j - 1) as f64..j as f64);
        let y: f64 = rng.random_range(-radius..radius);
        let g = spec.snake().g(z);
        let x = if y == 0.0 {
            g
        } else {
            spec.bulge_dir(j) * (g * g + y * y).sqrt()
        };
        ([x, y, z], PieceId::Bridge(j))
    }
}

/// Measured angle between the plane normal and the one-sided bridge normal
/// at a seam sample, both normals from finite differences of the local
/// parametrizations.
#[derive(Debug, Clone, Serialize)]
pub struct SeamFold {
    pub j: usize,
    pub z_seam: f64,
    pub y: f64,
    pub angle_rad: f64,
}

/// One-sided normal comparison across every plane/bridge seam.  For the
/// graph-over-height snake the bridge sheet meets each plane along a cone
/// line in a right-angle fold, and this is what the measurement reports; the
/// interior of every piece is smooth.
pub fn seam_fold_angles(spec: &SurfaceSpec, ys: &[f64], h: f64) -> Vec<SeamFold> {
    let mut out = Vec::new();
    for j in 1..spec.l() {
        let sigma = spec.bulge_dir(j);
        for (z_seam, dir) in [((j - 1) as f64, 1.0), (j as f64, -1.0)] {
            for &y in ys {
                if y == 0.0 {
                    continue;
                }
                let point_at = |z: f64| {
                    let g = spec.snake().g(z);
                    [sigma * (g * g + y * y).sqrt(), y, z]
                };
                let p0 = point_at(z_seam);
                let p1 = point_at(z_seam + dir * h);
                let t_z = [(p1[0] - p0[0]) / (dir * h), 0.0, 1.0];
                let g1 = spec.snake().g(z_seam + dir * h);
                let t_y = [sigma * y / (g1 * g1 + y * y).sqrt(), 1.0, 0.0];
                let n = cross3(t_z, t_y);
                let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
                let cos = (n[2] / norm).abs().min(1.0);
                out.push(SeamFold { j, z_seam, y, angle_rad: cos.acos() });
            }
        }
    }
    out
}

fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Sign agreement between the snake slope and the turn-level product,
/// checked on a dense grid; this is the geometric half of the taming
/// argument.
pub fn snake_sign_agreement(spec: &SurfaceSpec, samples_per_bridge: usize) -> Result<bool> {
    let pi = turn_product(spec.l())?.to_univariate(VAR_Z)?;
    for j in 1..spec.l() {
        for i in 0..samples_per_bridge {
            let z = (j - 1) as f64 + (i as f64 + 0.5) / samples_per_bridge as f64;
            let near_integer = (z - z.round()).abs() < 1e-3;
            let near_half = (z - (z.floor() + 0.5)).abs() < 1e-3;
            if near_integer || near_half {
                continue;
            }
            let gp = spec.snake().g_prime(z);
            let pv = pi.eval(z);
            // gp underflows to exactly 0 in the flat tails near the
            // integers; there is no sign to compare there
            if gp != 0.0 && pv != 0.0 && gp.signum() != pv.signum() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
