//! Spherical geometry: sampling patterns, gnomonic viewports, ERP mapping.
//!
//! Conventions: azimuth in [-pi, pi) increasing eastwards, elevation in
//! [-pi/2, pi/2] increasing towards the north pole, (0, 0) at the ERP
//! frame center. A viewport is the gnomonic projection onto the plane
//! tangent at its center direction; pixel x grows with azimuth, pixel y
//! grows downwards (decreasing elevation).

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::LumaFrame;

/// Viewing direction on the sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    /// Radians in [-pi, pi).
    pub azimuth: f64,
    /// Radians in [-pi/2, pi/2].
    pub elevation: f64,
}

/// Wrap an angle into [-pi, pi).
pub fn wrap_azimuth(a: f64) -> f64 {
    let w = (a + PI).rem_euclid(TAU) - PI;
    // rem_euclid can return exactly TAU after rounding for inputs just
    // below a wrap point; fold that back.
    if w >= PI {
        w - TAU
    } else {
        w
    }
}

impl Direction {
    pub fn new(azimuth: f64, elevation: f64) -> Self {
        Direction {
            azimuth: wrap_azimuth(azimuth),
            elevation: elevation.clamp(-FRAC_PI_2, FRAC_PI_2),
        }
    }

    pub fn from_degrees(az_deg: f64, el_deg: f64) -> Self {
        Self::new(az_deg.to_radians(), el_deg.to_radians())
    }

    /// Unit vector (x towards azimuth 0, y east, z north).
    fn to_unit(self) -> [f64; 3] {
        let (sa, ca) = self.azimuth.sin_cos();
        let (se, ce) = self.elevation.sin_cos();
        [ce * ca, ce * sa, se]
    }

    fn from_unit(v: [f64; 3]) -> Self {
        Direction::new(v[1].atan2(v[0]), v[2].clamp(-1.0, 1.0).asin())
    }
}

/// One gnomonic viewport: tangent point, field of view, output size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViewportSpec {
    pub center: Direction,
    /// Horizontal field of view, radians, strictly inside (0, pi).
    pub fov_h: f64,
    /// Vertical field of view, radians, strictly inside (0, pi).
    pub fov_v: f64,
    pub width: usize,
    pub height: usize,
}

impl ViewportSpec {
    pub fn new(
        center: Direction,
        fov_h: f64,
        fov_v: f64,
        width: usize,
        height: usize,
    ) -> Result<Self> {
        if !(fov_h > 0.0 && fov_h < PI) {
            return Err(Error::InvalidFov(fov_h.to_degrees()));
        }
        if !(fov_v > 0.0 && fov_v < PI) {
            return Err(Error::InvalidFov(fov_v.to_degrees()));
        }
        if width < 2 || height < 2 {
            return Err(Error::InvalidViewportSize(width, height));
        }
        Ok(ViewportSpec {
            center,
            fov_h,
            fov_v,
            width,
            height,
        })
    }

    /// Orthonormal tangent basis at the center: (forward, east, north).
    fn basis(&self) -> ([f64; 3], [f64; 3], [f64; 3]) {
        let f = self.center.to_unit();
        let (sa, ca) = self.center.azimuth.sin_cos();
        let (se, ce) = self.center.elevation.sin_cos();
        let r = [-sa, ca, 0.0];
        let u = [-se * ca, -se * sa, ce];
        (f, r, u)
    }
}

/// Viewport sampling layouts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PatternKind {
    Uniform,
    Tropical,
    Equatorial,
}

impl PatternKind {
    pub fn name(self) -> &'static str {
        match self {
            PatternKind::Uniform => "uniform",
            PatternKind::Tropical => "tropical",
            PatternKind::Equatorial => "equatorial",
        }
    }

    /// Collage tiling shape as (columns, rows).
    pub fn grid(self) -> (usize, usize) {
        match self {
            PatternKind::Uniform => (5, 5),
            PatternKind::Tropical => (8, 2),
            PatternKind::Equatorial => (9, 1),
        }
    }

    /// Sampling directions in row-major order: elevation rings from
    /// north to south, azimuths in listed order within a ring.
    fn directions(self) -> Vec<Direction> {
        let (elevations, azimuths): (&[f64], Vec<f64>) = match self {
            PatternKind::Uniform => (
                &[60.0, 30.0, 0.0, -30.0, -60.0],
                vec![0.0, 72.0, 144.0, 216.0, 288.0],
            ),
            PatternKind::Tropical => (&[30.0, -30.0], (0..8).map(|i| i as f64 * 45.0).collect()),
            PatternKind::Equatorial => (&[0.0], (0..9).map(|i| i as f64 * 40.0).collect()),
        };
        elevations
            .iter()
            .flat_map(|&el| {
                azimuths
                    .iter()
                    .map(move |&az| Direction::from_degrees(az, el))
            })
            .collect()
    }
}

impl std::str::FromStr for PatternKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "uniform" => Ok(PatternKind::Uniform),
            "tropical" => Ok(PatternKind::Tropical),
            "equatorial" => Ok(PatternKind::Equatorial),
            other => Err(format!("unknown pattern `{other}`")),
        }
    }
}

/// A fixed, ordered set of viewports sharing one FoV and resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingPattern {
    pub kind: PatternKind,
    pub specs: Vec<ViewportSpec>,
}

impl SamplingPattern {
    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }
}

/// Build the fixed direction grid for `kind`; all viewports share the
/// (square) FoV and output size.
pub fn make_pattern(
    kind: PatternKind,
    fov_deg: f64,
    vp_width: usize,
    vp_height: usize,
) -> Result<SamplingPattern> {
    if !(fov_deg > 0.0 && fov_deg < 180.0) {
        return Err(Error::InvalidFov(fov_deg));
    }
    let fov = fov_deg.to_radians();
    let specs = kind
        .directions()
        .into_iter()
        .map(|center| ViewportSpec::new(center, fov, fov, vp_width, vp_height))
        .collect::<Result<Vec<_>>>()?;
    Ok(SamplingPattern { kind, specs })
}

/// Viewport width matching the ERP equator's angular sample density,
/// floored at 16 so block-based metrics stay defined on tiny test
/// frames.
pub fn viewport_size_matching_erp(fov_deg: f64, erp_width: usize) -> usize {
    (fov_deg / 360.0 * erp_width as f64).round().max(16.0) as usize
}

/// Map a continuous viewport pixel to its direction on the sphere.
pub fn viewport_pixel_to_direction(spec: &ViewportSpec, px: f64, py: f64) -> Direction {
    let xt = (2.0 * (px + 0.5) / spec.width as f64 - 1.0) * (spec.fov_h / 2.0).tan();
    let yt = (2.0 * (py + 0.5) / spec.height as f64 - 1.0) * (spec.fov_v / 2.0).tan();
    let (f, r, u) = spec.basis();
    let ray = [
        f[0] + xt * r[0] - yt * u[0],
        f[1] + xt * r[1] - yt * u[1],
        f[2] + xt * r[2] - yt * u[2],
    ];
    let norm = (ray[0] * ray[0] + ray[1] * ray[1] + ray[2] * ray[2]).sqrt();
    Direction::from_unit([ray[0] / norm, ray[1] / norm, ray[2] / norm])
}

/// Inverse of [`viewport_pixel_to_direction`]. Returns `None` for
/// directions behind the tangent plane (no gnomonic image).
pub fn direction_to_viewport_pixel(spec: &ViewportSpec, dir: Direction) -> Option<(f64, f64)> {
    let v = dir.to_unit();
    let (f, r, u) = spec.basis();
    let zc = v[0] * f[0] + v[1] * f[1] + v[2] * f[2];
    if zc <= 0.0 {
        return None;
    }
    let xc = v[0] * r[0] + v[1] * r[1] + v[2] * r[2];
    let yc = v[0] * u[0] + v[1] * u[1] + v[2] * u[2];
    let xt = xc / zc;
    let yt = -yc / zc;
    let px = (xt / (spec.fov_h / 2.0).tan() + 1.0) * spec.width as f64 / 2.0 - 0.5;
    let py = (yt / (spec.fov_v / 2.0).tan() + 1.0) * spec.height as f64 / 2.0 - 0.5;
    Some((px, py))
}

/// Continuous ERP pixel coordinates of a direction; `u` wraps
/// periodically (exactly pi lands on column 0).
pub fn direction_to_erp_pixel(dir: Direction, erp_w: usize, erp_h: usize) -> (f64, f64) {
    let u = (dir.azimuth / TAU + 0.5) * erp_w as f64;
    let v = (0.5 - dir.elevation / PI) * erp_h as f64;
    (u.rem_euclid(erp_w as f64), v)
}

/// Bilinear sample of an ERP frame at continuous pixel coordinates,
/// with horizontal wrap and vertical clamp. Pixel centers sit at
/// integer + 0.5.
fn sample_erp_bilinear(erp: &LumaFrame, u: f64, v: f64) -> f64 {
    let w = erp.width() as isize;
    let h = erp.height() as isize;
    let fu = u - 0.5;
    let fv = v - 0.5;
    let x0 = fu.floor();
    let y0 = fv.floor();
    let fx = fu - x0;
    let fy = fv - y0;
    let x0 = x0 as isize;
    let y0 = y0 as isize;
    let xw0 = x0.rem_euclid(w) as usize;
    let xw1 = (x0 + 1).rem_euclid(w) as usize;
    let yc0 = y0.clamp(0, h - 1) as usize;
    let yc1 = (y0 + 1).clamp(0, h - 1) as usize;
    let v00 = erp.get(xw0, yc0) as f64;
    let v01 = erp.get(xw1, yc0) as f64;
    let v10 = erp.get(xw0, yc1) as f64;
    let v11 = erp.get(xw1, yc1) as f64;
    // Incremental form: exact for constant inputs regardless of rounding.
    v00 + fx * (v01 - v00) + fy * (v10 - v00) + fx * fy * (v00 + v11 - v01 - v10)
}

/// Render one gnomonic viewport from an ERP frame.
pub fn render_viewport(erp: &LumaFrame, spec: &ViewportSpec) -> LumaFrame {
    let mut out = Vec::with_capacity(spec.width * spec.height);
    for py in 0..spec.height {
        for px in 0..spec.width {
            let dir = viewport_pixel_to_direction(spec, px as f64, py as f64);
            let (u, v) = direction_to_erp_pixel(dir, erp.width(), erp.height());
            out.push(sample_erp_bilinear(erp, u, v) as f32);
        }
    }
    LumaFrame::new(spec.width, spec.height, erp.bit_depth(), out)
}

/// Render all viewports of a pattern and tile them row-major into one
/// frame using the pattern's grid shape.
pub fn render_collage(erp: &LumaFrame, pattern: &SamplingPattern) -> LumaFrame {
    assert!(!pattern.is_empty(), "pattern must be nonempty");
    let (cols, rows) = pattern.kind.grid();
    debug_assert_eq!(cols * rows, pattern.len());
    let vw = pattern.specs[0].width;
    let vh = pattern.specs[0].height;
    let mut collage = LumaFrame::constant(cols * vw, rows * vh, erp.bit_depth(), 0.0);
    for (i, spec) in pattern.specs.iter().enumerate() {
        let vp = render_viewport(erp, spec);
        let tx = (i % cols) * vw;
        let ty = (i / cols) * vh;
        for y in 0..vh {
            for x in 0..vw {
                collage.set(tx + x, ty + y, vp.get(x, y));
            }
        }
    }
    collage
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spec_deg(az: f64, el: f64, fov: f64, w: usize, h: usize) -> ViewportSpec {
        ViewportSpec::new(
            Direction::from_degrees(az, el),
            fov.to_radians(),
            fov.to_radians(),
            w,
            h,
        )
        .unwrap()
    }

    #[test]
    fn pattern_cardinalities() {
        assert_eq!(
            make_pattern(PatternKind::Uniform, 40.0, 64, 64)
                .unwrap()
                .len(),
            25
        );
        assert_eq!(
            make_pattern(PatternKind::Tropical, 40.0, 64, 64)
                .unwrap()
                .len(),
            16
        );
        assert_eq!(
            make_pattern(PatternKind::Equatorial, 40.0, 64, 64)
                .unwrap()
                .len(),
            9
        );
    }

    #[test]
    fn equatorial_pattern_sits_on_the_equator() {
        let p = make_pattern(PatternKind::Equatorial, 40.0, 64, 64).unwrap();
        assert!(p.specs.iter().all(|s| s.center.elevation == 0.0));
    }

    #[test]
    fn tropical_pattern_splits_between_two_rings() {
        let p = make_pattern(PatternKind::Tropical, 40.0, 64, 64).unwrap();
        let north = p
            .specs
            .iter()
            .filter(|s| (s.center.elevation - 30f64.to_radians()).abs() < 1e-12)
            .count();
        let south = p
            .specs
            .iter()
            .filter(|s| (s.center.elevation + 30f64.to_radians()).abs() < 1e-12)
            .count();
        assert_eq!((north, south), (8, 8));
    }

    #[test]
    fn invalid_fov_rejected() {
        assert!(matches!(
            make_pattern(PatternKind::Uniform, 0.0, 64, 64),
            Err(Error::InvalidFov(_))
        ));
        assert!(matches!(
            make_pattern(PatternKind::Uniform, 180.0, 64, 64),
            Err(Error::InvalidFov(_))
        ));
    }

    #[test]
    fn center_pixel_maps_to_tangent_point() {
        for spec in [
            spec_deg(0.0, 0.0, 90.0, 512, 512),
            spec_deg(72.0, -30.0, 40.0, 128, 128),
            spec_deg(-144.0, 60.0, 40.0, 64, 32),
        ] {
            let dir = viewport_pixel_to_direction(
                &spec,
                spec.width as f64 / 2.0 - 0.5,
                spec.height as f64 / 2.0 - 0.5,
            );
            assert!((dir.azimuth - spec.center.azimuth).abs() < 1e-12);
            assert!((dir.elevation - spec.center.elevation).abs() < 1e-12);
        }
    }

    #[test]
    fn right_edge_midline_hits_half_fov() {
        // Closed form: azimuth = atan(xt) with xt = (2(px+0.5)/w - 1)*tan(45deg).
        let spec = spec_deg(0.0, 0.0, 90.0, 512, 512);
        let px = 511.0;
        let py = 255.5;
        let dir = viewport_pixel_to_direction(&spec, px, py);
        let xt = (2.0 * (px + 0.5) / 512.0 - 1.0) * 45f64.to_radians().tan();
        assert!((dir.azimuth - xt.atan()).abs() < 1e-12);
        assert!(dir.azimuth < 45f64.to_radians());
        assert!(dir.azimuth > 44f64.to_radians());
        assert!(dir.elevation.abs() < 1e-12);
    }

    #[test]
    fn erp_pixel_mapping_reference_points() {
        let d = Direction::new(0.0, 0.0);
        assert_eq!(direction_to_erp_pixel(d, 4096, 2048), (2048.0, 1024.0));
        let north = Direction::new(0.0, FRAC_PI_2);
        assert_eq!(direction_to_erp_pixel(north, 4096, 2048).1, 0.0);
        // Exactly pi wraps to column 0.
        let wrapped = Direction::new(PI, 0.0);
        assert_eq!(direction_to_erp_pixel(wrapped, 4096, 2048).0, 0.0);
        let near = Direction::new(PI - 1e-9, 0.0);
        assert!(direction_to_erp_pixel(near, 4096, 2048).0 > 4095.9);
    }

    #[test]
    fn constant_erp_renders_constant_viewport() {
        let erp = LumaFrame::constant(256, 128, 8, 93.0);
        let pattern = make_pattern(PatternKind::Uniform, 40.0, 32, 32).unwrap();
        for spec in &pattern.specs {
            let vp = render_viewport(&erp, spec);
            assert!(vp.samples().iter().all(|&s| s == 93.0));
        }
    }

    #[test]
    fn rendering_is_deterministic() {
        let erp = LumaFrame::from_fn(128, 64, 8, |x, y| ((x * 7 + y * 13) % 256) as f32);
        let spec = spec_deg(10.0, 20.0, 40.0, 48, 48);
        assert_eq!(render_viewport(&erp, &spec), render_viewport(&erp, &spec));
    }

    #[test]
    fn centered_stripe_stays_centered() {
        // ERP with a bright vertical stripe around azimuth 0; the viewport
        // at (0,0) must see it centered: peak column at width/2.
        let w = 256;
        let h = 128;
        let erp = LumaFrame::from_fn(w, h, 8, |x, _| {
            let az = (x as f64 + 0.5) / w as f64 * TAU - PI;
            (255.0 * (-az * az / 0.02).exp()) as f32
        });
        let spec = spec_deg(0.0, 0.0, 60.0, 63, 63);
        let vp = render_viewport(&erp, &spec);
        let mid_row = 31;
        let best = (0..63)
            .max_by(|&a, &b| vp.get(a, mid_row).partial_cmp(&vp.get(b, mid_row)).unwrap())
            .unwrap();
        assert_eq!(best, 31);
    }

    #[test]
    fn azimuth_seam_is_smooth() {
        // Smooth sinusoidal ERP; a viewport straddling azimuth +-pi must
        // show no discontinuity beyond interpolation error.
        let w = 512;
        let h = 256;
        let erp = LumaFrame::from_fn(w, h, 8, |x, y| {
            let az = (x as f64 + 0.5) / w as f64 * TAU;
            let el = (y as f64 + 0.5) / h as f64 * PI;
            (128.0 + 80.0 * az.sin() * el.sin()) as f32
        });
        let spec = spec_deg(180.0, 0.0, 40.0, 64, 64);
        let vp = render_viewport(&erp, &spec);
        let mut max_step = 0f32;
        for y in 0..64 {
            for x in 1..64 {
                max_step = max_step.max((vp.get(x, y) - vp.get(x - 1, y)).abs());
            }
        }
        assert!(max_step < 1.0, "seam discontinuity {max_step}");
    }

    #[test]
    fn collage_dimensions_and_first_tile() {
        let erp = LumaFrame::from_fn(256, 128, 8, |x, y| ((x + y) % 251) as f32);
        let pattern = make_pattern(PatternKind::Uniform, 40.0, 32, 32).unwrap();
        let collage = render_collage(&erp, &pattern);
        assert_eq!((collage.width(), collage.height()), (160, 160));
        let first = render_viewport(&erp, &pattern.specs[0]);
        for y in 0..32 {
            for x in 0..32 {
                assert_eq!(collage.get(x, y), first.get(x, y));
            }
        }
        let tropical = make_pattern(PatternKind::Tropical, 40.0, 32, 32).unwrap();
        let tc = render_collage(&erp, &tropical);
        assert_eq!((tc.width(), tc.height()), (256, 64));
    }

    proptest! {
        #[test]
        fn gnomonic_round_trip(
            az in -179.0f64..179.0,
            el in -80.0f64..80.0,
            fov in 20.0f64..120.0,
            px in 0.0f64..64.0,
            py in 0.0f64..64.0,
        ) {
            let spec = spec_deg(az, el, fov, 64, 64);
            let px = px.min(63.999);
            let py = py.min(63.999);
            let dir = viewport_pixel_to_direction(&spec, px, py);
            let (qx, qy) = direction_to_viewport_pixel(&spec, dir).unwrap();
            prop_assert!((qx - px).abs() < 1e-9, "x: {px} vs {qx}");
            prop_assert!((qy - py).abs() < 1e-9, "y: {py} vs {qy}");
        }

        #[test]
        fn erp_mapping_stays_in_range(az in -3.1f64..3.1, el in -1.55f64..1.55) {
            let (u, v) = direction_to_erp_pixel(Direction::new(az, el), 512, 256);
            prop_assert!((0.0..512.0).contains(&u));
            prop_assert!((0.0..=256.0).contains(&v));
        }
    }
}
