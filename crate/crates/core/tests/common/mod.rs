//! Independent reference implementations shared by the integration tests.
//!
//! The oracles reuse only the library's plain data types;
//! `check_against_oracle` is the one place that runs the library tracer.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rtcompare::model::{PathSet, PathTuple, Vec3};
use rtcompare::synthrt::{BoxSpec, SceneSpec};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------- path sets

/// Direction drawn uniformly over the sphere, as (azimuth, elevation) degrees.
pub fn sphere_direction(r: &mut impl Rng) -> (f64, f64) {
    let az = r.random_range(-180.0..180.0);
    let el = r.random_range(-1.0f64..=1.0).asin().to_degrees();
    (az, el)
}

pub fn random_path(r: &mut impl Rng) -> PathTuple {
    PathTuple::new(
        r.random_range(-60.0..=60.0),
        r.random_range(0.0..=3e-6),
        sphere_direction(r),
        sphere_direction(r),
    )
}

pub fn random_set(r: &mut impl Rng, id: &str, n: usize) -> PathSet {
    PathSet::new(id, (0..n).map(|_| random_path(r)).collect())
}

/// Path set with coarsely quantized values, so that exact distance ties
/// between candidates are common.
pub fn quantized_set(r: &mut impl Rng, id: &str, n: usize) -> PathSet {
    let paths = (0..n)
        .map(|_| {
            PathTuple::new(
                -80.0 + 10.0 * r.random_range(0..5) as f64,
                1e-7 * r.random_range(0..4) as f64,
                (90.0 * r.random_range(-2..2) as f64, 45.0 * r.random_range(-1..=1) as f64),
                (90.0 * r.random_range(-2..2) as f64, 0.0),
            )
        })
        .collect();
    PathSet::new(id, paths)
}

// ------------------------------------------------------------ metric oracle

fn unit(az_deg: f64, el_deg: f64) -> [f64; 3] {
    let (az, el) = (az_deg.to_radians(), el_deg.to_radians());
    [el.cos() * az.cos(), el.cos() * az.sin(), el.sin()]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Population mean and standard deviation, with the standard deviation
/// replaced by 1 below 1e-12.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let sd = var.sqrt();
    (mean, if sd < 1e-12 { 1.0 } else { sd })
}

/// Per-pair component distances `[d_tau, d_p, d_dod, d_doa]` after pooled
/// standardization, as an `N x M` matrix.
pub fn component_matrix(x: &PathSet, y: &PathSet) -> Vec<Vec<[f64; 4]>> {
    let powers: Vec<f64> = x.paths.iter().chain(&y.paths).map(|p| p.power_dbm).collect();
    let delays: Vec<f64> = x.paths.iter().chain(&y.paths).map(|p| p.delay_s).collect();
    let (mp, sp) = mean_std(&powers);
    let (mt, st) = mean_std(&delays);
    x.paths
        .iter()
        .map(|a| {
            y.paths
                .iter()
                .map(|b| {
                    [
                        ((a.delay_s - mt) / st - (b.delay_s - mt) / st).abs(),
                        ((a.power_dbm - mp) / sp - (b.power_dbm - mp) / sp).abs(),
                        1.0 - dot(unit(a.dod_az, a.dod_el), unit(b.dod_az, b.dod_el)),
                        1.0 - dot(unit(a.doa_az, a.doa_el), unit(b.doa_az, b.doa_el)),
                    ]
                })
                .collect()
        })
        .collect()
}

pub fn weighted(c: &[f64; 4], w: [f64; 4]) -> f64 {
    c.iter().zip(w).map(|(a, b)| a * b).sum()
}

/// Hausdorff and Chamfer values evaluated straight from the pairwise
/// distance matrix: `½ max_x min_y d + ½ max_y min_x d` and
/// `Σ_x min_y d / 2N + Σ_y min_x d / 2M`.
pub fn hrt_crt_from_matrix(d: &[Vec<f64>]) -> (f64, f64) {
    let n = d.len();
    let m = d[0].len();
    let row_min: Vec<f64> = d.iter().map(|r| r.iter().copied().fold(f64::INFINITY, f64::min)).collect();
    let col_min: Vec<f64> = (0..m)
        .map(|j| (0..n).map(|i| d[i][j]).fold(f64::INFINITY, f64::min))
        .collect();
    let max = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let hrt = 0.5 * max(&row_min) + 0.5 * max(&col_min);
    let crt = row_min.iter().sum::<f64>() / (2.0 * n as f64) + col_min.iter().sum::<f64>() / (2.0 * m as f64);
    (hrt, crt)
}

/// Reference HRT and CRT under pooled standardization and joint assignment.
pub fn reference_hrt_crt(x: &PathSet, y: &PathSet, w: [f64; 4]) -> (f64, f64) {
    let c = component_matrix(x, y);
    let d: Vec<Vec<f64>> = c.iter().map(|r| r.iter().map(|c| weighted(c, w)).collect()).collect();
    hrt_crt_from_matrix(&d)
}

/// Lowest-index argmin of every row of `d` (source i -> target j).
pub fn reference_assignment(d: &[Vec<f64>]) -> Vec<usize> {
    d.iter()
        .map(|row| {
            let mut best = 0;
            for (j, v) in row.iter().enumerate() {
                if *v < row[best] {
                    best = j;
                }
            }
            best
        })
        .collect()
}

// ------------------------------------------------------------ tracer oracle

pub const C: f64 = 299_792_458.0;

type V = [f64; 3];

fn v(p: Vec3) -> V {
    [p.x, p.y, p.z]
}
fn sub(a: V, b: V) -> V {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}
fn add(a: V, b: V) -> V {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}
fn scale(a: V, s: f64) -> V {
    [a[0] * s, a[1] * s, a[2] * s]
}
fn cross(a: V, b: V) -> V {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}
fn norm(a: V) -> f64 {
    dot(a, a).sqrt()
}

/// A planar rectangular reflector in general form.
#[derive(Debug, Clone)]
pub struct OracleFace {
    pub name: String,
    pub center: V,
    pub normal: V,
    pub u: V,
    pub v: V,
    pub half_u: f64,
    pub half_v: f64,
    pub loss_db: f64,
}

impl OracleFace {
    /// Householder reflection of `p` across the face plane.
    fn mirror(&self, p: V) -> V {
        let n = self.normal;
        let h = [
            [1.0 - 2.0 * n[0] * n[0], -2.0 * n[0] * n[1], -2.0 * n[0] * n[2]],
            [-2.0 * n[1] * n[0], 1.0 - 2.0 * n[1] * n[1], -2.0 * n[1] * n[2]],
            [-2.0 * n[2] * n[0], -2.0 * n[2] * n[1], 1.0 - 2.0 * n[2] * n[2]],
        ];
        let q = sub(p, self.center);
        add(self.center, [dot(h[0], q), dot(h[1], q), dot(h[2], q)])
    }

    fn side(&self, p: V) -> f64 {
        dot(self.normal, sub(p, self.center))
    }

    /// Intersection of segment a-b with the plane, strictly inside the segment.
    fn intersect(&self, a: V, b: V) -> Option<V> {
        let d = sub(b, a);
        let den = dot(self.normal, d);
        if den == 0.0 {
            return None;
        }
        let t = dot(self.normal, sub(self.center, a)) / den;
        (t > 0.0 && t < 1.0).then(|| add(a, scale(d, t)))
    }

    fn contains(&self, p: V) -> bool {
        let q = sub(p, self.center);
        dot(q, self.u).abs() <= self.half_u * (1.0 + 1e-12) + 1e-12
            && dot(q, self.v).abs() <= self.half_v * (1.0 + 1e-12) + 1e-12
    }
}

#[derive(Debug, Clone)]
pub struct OracleScene {
    pub faces: Vec<OracleFace>,
    /// Twelve triangles per box.
    pub triangles: Vec<[V; 3]>,
    pub boxes: Vec<(V, V)>,
    pub tx: V,
    pub tx_power: f64,
    pub f_hz: f64,
    pub order: u8,
    pub los: bool,
    pub floor: f64,
}

fn loss_of(scene: &SceneSpec, name: &str) -> f64 {
    scene
        .materials
        .iter()
        .find(|m| m.name == name)
        .map(|m| m.reflection_loss_db)
        .expect("known material")
}

pub fn oracle_scene(scene: &SceneSpec) -> OracleScene {
    let mut faces = vec![OracleFace {
        name: "ground".into(),
        center: [0.0; 3],
        normal: [0.0, 0.0, 1.0],
        u: [1.0, 0.0, 0.0],
        v: [0.0, 1.0, 0.0],
        half_u: f64::INFINITY,
        half_v: f64::INFINITY,
        loss_db: loss_of(scene, &scene.ground),
    }];
    let mut triangles = Vec::new();
    let mut boxes = Vec::new();
    for (i, b) in scene.boxes.iter().enumerate() {
        let (lo, hi) = (v(b.min), v(b.max));
        let c = scale(add(lo, hi), 0.5);
        let half = scale(sub(hi, lo), 0.5);
        let loss = loss_of(scene, &b.material);
        let axes = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        for axis in 0..3 {
            let (a1, a2) = ((axis + 1) % 3, (axis + 2) % 3);
            for sign in [-1.0, 1.0] {
                let normal = scale(axes[axis], sign);
                let center = add(c, scale(normal, half[axis]));
                let (u, w) = (axes[a1], axes[a2]);
                faces.push(OracleFace {
                    name: format!("box{i}:{}{}", if sign > 0.0 { '+' } else { '-' }, ['x', 'y', 'z'][axis]),
                    center,
                    normal,
                    u,
                    v: w,
                    half_u: half[a1],
                    half_v: half[a2],
                    loss_db: loss,
                });
                let du = scale(u, half[a1]);
                let dv = scale(w, half[a2]);
                let p00 = sub(sub(center, du), dv);
                let p10 = sub(add(center, du), dv);
                let p11 = add(add(center, du), dv);
                let p01 = add(sub(center, du), dv);
                triangles.push([p00, p10, p11]);
                triangles.push([p00, p11, p01]);
            }
        }
        boxes.push((lo, hi));
    }
    OracleScene {
        faces,
        triangles,
        boxes,
        tx: v(scene.tx.position),
        tx_power: scene.tx.power_dbm,
        f_hz: scene.carrier_frequency_hz,
        order: scene.max_reflection_order,
        los: scene.los_enabled,
        floor: scene.power_floor_dbm,
    }
}

/// Möller–Trumbore: segment parameter of the hit with triangle `t`, if any.
fn segment_triangle(a: V, b: V, t: &[V; 3]) -> Option<f64> {
    let d = sub(b, a);
    let e1 = sub(t[1], t[0]);
    let e2 = sub(t[2], t[0]);
    let p = cross(d, e2);
    let det = dot(e1, p);
    if det.abs() < 1e-15 {
        return None;
    }
    let inv = 1.0 / det;
    let s = sub(a, t[0]);
    let uu = dot(s, p) * inv;
    if !(0.0..=1.0).contains(&uu) {
        return None;
    }
    let q = cross(s, e1);
    let vv = dot(d, q) * inv;
    if vv < 0.0 || uu + vv > 1.0 {
        return None;
    }
    Some(dot(e2, q) * inv)
}

impl OracleScene {
    fn occluded(&self, a: V, b: V) -> bool {
        // ignore touches at the segment ends (bounce points sit on faces)
        self.triangles
            .iter()
            .filter_map(|t| segment_triangle(a, b, t))
            .any(|t| t > 1e-7 && t < 1.0 - 1e-7)
    }

    pub fn inside_box(&self, p: V) -> bool {
        self.boxes
            .iter()
            .any(|(lo, hi)| (0..3).all(|k| p[k] >= lo[k] && p[k] <= hi[k]))
    }

    fn build(&self, points: Vec<V>, faces: &[&OracleFace]) -> Option<OraclePath> {
        let length: f64 = points.windows(2).map(|w| norm(sub(w[1], w[0]))).sum();
        let fspl = 20.0 * (4.0 * std::f64::consts::PI * length * self.f_hz / C).log10();
        let power = self.tx_power - fspl - faces.iter().map(|f| f.loss_db).sum::<f64>();
        if power < self.floor {
            return None;
        }
        let n = points.len();
        let dod = sub(points[1], points[0]);
        let doa = sub(points[n - 2], points[n - 1]);
        Some(OraclePath {
            faces: faces.iter().map(|f| f.name.clone()).collect(),
            length,
            power_dbm: power,
            delay_s: length / C,
            dod: scale(dod, 1.0 / norm(dod)),
            doa: scale(doa, 1.0 / norm(doa)),
            points,
        })
    }

    fn solve(&self, rx: V, seq: &[&OracleFace]) -> Option<OraclePath> {
        let mut images = vec![self.tx];
        for f in seq {
            images.push(f.mirror(*images.last().unwrap()));
        }
        let k = seq.len();
        let mut pts = vec![rx];
        let mut target = rx;
        for j in (0..k).rev() {
            let p = seq[j].intersect(images[j + 1], target)?;
            if !seq[j].contains(p) {
                return None;
            }
            pts.push(p);
            target = p;
        }
        pts.push(self.tx);
        pts.reverse();
        for (j, f) in seq.iter().enumerate() {
            if !(f.side(pts[j]) > 0.0 && f.side(pts[j + 2]) > 0.0) {
                return None;
            }
        }
        if pts.windows(2).any(|w| self.occluded(w[0], w[1])) {
            return None;
        }
        self.build(pts, seq)
    }

    /// Every path from the transmitter to `rx` with at most `order` bounces.
    /// `None` when `rx` is inside a box or below ground.
    pub fn paths(&self, rx: Vec3) -> Option<Vec<OraclePath>> {
        let rx = v(rx);
        if rx[2] < 0.0 || self.inside_box(rx) {
            return None;
        }
        let mut out = Vec::new();
        if self.los && rx != self.tx && !self.occluded(self.tx, rx) {
            out.extend(self.build(vec![self.tx, rx], &[]));
        }
        let nf = self.faces.len();
        if self.order >= 1 {
            for f in &self.faces {
                out.extend(self.solve(rx, &[f]));
            }
        }
        if self.order >= 2 {
            for i in 0..nf {
                for j in 0..nf {
                    if i != j {
                        out.extend(self.solve(rx, &[&self.faces[i], &self.faces[j]]));
                    }
                }
            }
        }
        Some(out)
    }
}

#[derive(Debug, Clone)]
pub struct OraclePath {
    pub faces: Vec<String>,
    pub points: Vec<V>,
    pub length: f64,
    pub power_dbm: f64,
    pub delay_s: f64,
    pub dod: V,
    pub doa: V,
}

pub fn unit_of(az_deg: f64, el_deg: f64) -> V {
    unit(az_deg, el_deg)
}

pub fn max_abs_diff(a: V, b: V) -> f64 {
    (0..3).map(|k| (a[k] - b[k]).abs()).fold(0.0, f64::max)
}

// ----------------------------------------------------------- random scenes

/// Scene with up to `max_boxes` random boxes (most standing on the ground)
/// and a transmitter outside all of them.
pub fn random_scene(r: &mut impl Rng, max_boxes: usize) -> SceneSpec {
    let materials = ["concrete", "glass", "metal"];
    loop {
        let n = r.random_range(0..=max_boxes);
        let boxes: Vec<BoxSpec> = (0..n)
            .map(|_| {
                let cx = r.random_range(-40.0..40.0);
                let cy = r.random_range(-40.0..40.0);
                let (hx, hy) = (r.random_range(1.0..8.0), r.random_range(1.0..8.0));
                let z0 = if r.random_bool(0.75) { 0.0 } else { r.random_range(0.5..6.0) };
                let h = r.random_range(2.0..25.0);
                BoxSpec::new(
                    Vec3::new(cx - hx, cy - hy, z0),
                    Vec3::new(cx + hx, cy + hy, z0 + h),
                    materials[r.random_range(0..3)],
                )
            })
            .collect();
        let tx = Vec3::new(
            r.random_range(-50.0..50.0),
            r.random_range(-50.0..50.0),
            r.random_range(1.0..30.0),
        );
        let mut scene = SceneSpec::open_ground(tx, 30.0);
        scene.boxes = boxes;
        scene.ground = materials[r.random_range(0..3)].to_string();
        if !oracle_scene(&scene).inside_box(v(tx)) {
            return scene;
        }
    }
}

pub fn random_receiver(r: &mut impl Rng) -> Vec3 {
    Vec3::new(
        r.random_range(-60.0..60.0),
        r.random_range(-60.0..60.0),
        r.random_range(0.5..20.0),
    )
}

// ------------------------------------------------------- tracer comparison

/// Checks the library tracer against the oracle for one receiver. Returns
/// the number of matched paths.
pub fn check_against_oracle(scene: &SceneSpec, rx: Vec3) -> Result<usize, String> {
    let tracer = rtcompare::synthrt::Tracer::new(scene).map_err(|e| e.to_string())?;
    let got = tracer.trace_receiver(scene.tx.position, rx);
    let want = oracle_scene(scene).paths(rx);
    let (got, want) = match (got, want) {
        (None, None) => return Ok(0),
        (Some(g), Some(w)) => (g, w),
        (g, w) => {
            return Err(format!(
                "rx {rx:?}: blocked mismatch (tracer {}, oracle {})",
                g.is_none(),
                w.is_none()
            ))
        }
    };
    let key = |faces: &[String]| faces.join(">");
    let mut got_keys: Vec<String> = got
        .iter()
        .map(|p| key(&p.interactions.iter().map(|f| f.to_string()).collect::<Vec<_>>()))
        .collect();
    let mut want_keys: Vec<String> = want.iter().map(|p| key(&p.faces)).collect();
    got_keys.sort();
    want_keys.sort();
    if got_keys != want_keys {
        return Err(format!("rx {rx:?}: sequences differ\n tracer {got_keys:?}\n oracle {want_keys:?}"));
    }
    for w in &want {
        let g = got
            .iter()
            .find(|p| key(&p.interactions.iter().map(|f| f.to_string()).collect::<Vec<_>>()) == key(&w.faces))
            .expect("matched above");
        let t = &g.tuple;
        let checks = [
            ("length", (g.length_m - w.length).abs(), 1e-9),
            ("power", (t.power_dbm - w.power_dbm).abs(), 1e-9),
            ("delay", (t.delay_s - w.delay_s).abs() / w.delay_s, 1e-12),
            ("dod", max_abs_diff(unit_of(t.dod_az, t.dod_el), w.dod), 1e-9),
            ("doa", max_abs_diff(unit_of(t.doa_az, t.doa_el), w.doa), 1e-9),
        ];
        for (what, err, tol) in checks {
            if !(err <= tol) {
                return Err(format!("rx {rx:?}, path {:?}: {what} off by {err:e}", w.faces));
            }
        }
    }
    Ok(want.len())
}
