//! Gaze geometry: ray construction, angular kinematics, hit-testing against
//! spherical colliders, projection onto the virtual screen, and 3×3 zone
//! classification.
//!
//! Conventions: right-handed, `+y` up, `+z` head-forward. On the virtual
//! screen `u` grows with head-local `+x` and `v` grows with `+y`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Directions and quaternions whose norm is off by no more than this are
/// taken as-is.
const NORM_EXACT_TOL: f64 = 1e-12;
/// Beyond [`NORM_EXACT_TOL`] and up to this, inputs are renormalized; past it
/// they are rejected.
pub const NORM_RENORMALIZE_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn distance(self, o: Vec3) -> f64 {
        (self - o).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn lerp(self, o: Vec3, t: f64) -> Vec3 {
        self + (o - self) * t
    }
}

impl From<[f64; 3]> for Vec3 {
    fn from(a: [f64; 3]) -> Self {
        Vec3::new(a[0], a[1], a[2])
    }
}

impl From<Vec3> for [f64; 3] {
    fn from(v: Vec3) -> Self {
        [v.x, v.y, v.z]
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl fmt::Display for Vec3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

/// A unit-length direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct UnitDir(Vec3);

impl UnitDir {
    pub const FORWARD: UnitDir = UnitDir(Vec3 {
        x: 0.0,
        y: 0.0,
        z: 1.0,
    });

    /// Normalizes `v`. Zero-length and non-finite vectors are rejected.
    pub fn new(v: Vec3) -> Result<Self> {
        let n = v.norm();
        if !v.is_finite() || !n.is_finite() || n == 0.0 {
            return Err(Error::Domain(format!("cannot normalize direction {v}")));
        }
        Ok(UnitDir(v * (1.0 / n)))
    }

    /// Accepts a direction that is already unit-length up to
    /// [`NORM_RENORMALIZE_TOL`]; nearly-exact inputs are kept bit-for-bit.
    pub fn from_near_unit(v: Vec3) -> Result<Self> {
        let n = v.norm();
        if !v.is_finite() || !n.is_finite() {
            return Err(Error::Domain(format!("non-finite direction {v}")));
        }
        let dev = (n - 1.0).abs();
        if dev <= NORM_EXACT_TOL {
            Ok(UnitDir(v))
        } else if dev <= NORM_RENORMALIZE_TOL {
            Ok(UnitDir(v * (1.0 / n)))
        } else {
            Err(Error::Domain(format!(
                "direction norm {n} is not within {NORM_RENORMALIZE_TOL} of 1"
            )))
        }
    }

    pub fn vec(self) -> Vec3 {
        self.0
    }

    /// Any unit vector orthogonal to this one.
    pub fn any_perpendicular(self) -> UnitDir {
        let d = self.0;
        let helper = if d.x.abs() < 0.9 {
            Vec3::new(1.0, 0.0, 0.0)
        } else {
            Vec3::new(0.0, 1.0, 0.0)
        };
        UnitDir::new(d.cross(helper)).expect("helper is never parallel")
    }

    /// Rotates this direction by `angle_rad` about `axis` (Rodrigues).
    pub fn rotated(self, axis: UnitDir, angle_rad: f64) -> UnitDir {
        if angle_rad == 0.0 {
            return self;
        }
        let (s, c) = angle_rad.sin_cos();
        let k = axis.0;
        let v = self.0;
        let r = v * c + k.cross(v) * s + k * (k.dot(v) * (1.0 - c));
        UnitDir::new(r).expect("rotation preserves length")
    }
}

impl TryFrom<[f64; 3]> for UnitDir {
    type Error = Error;
    fn try_from(a: [f64; 3]) -> Result<Self> {
        UnitDir::from_near_unit(a.into())
    }
}

impl From<UnitDir> for [f64; 3] {
    fn from(d: UnitDir) -> Self {
        d.0.into()
    }
}

/// Rotation quaternion, serialized as `[w, x, y, z]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct Quat {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Mul for Quat {
    type Output = Quat;

    /// Hamilton product `self * o` (apply `o` first, then `self`).
    fn mul(self, o: Quat) -> Quat {
        Quat {
            w: self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            x: self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            y: self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            z: self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        }
    }
}

impl Quat {
    pub const IDENTITY: Quat = Quat {
        w: 1.0,
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub fn from_axis_angle(axis: UnitDir, angle_rad: f64) -> Quat {
        let (s, c) = (angle_rad / 2.0).sin_cos();
        let a = axis.vec();
        Quat {
            w: c,
            x: a.x * s,
            y: a.y * s,
            z: a.z * s,
        }
    }

    pub fn from_near_unit(w: f64, x: f64, y: f64, z: f64) -> Result<Quat> {
        let q = Quat { w, x, y, z };
        let n = q.norm();
        if !n.is_finite() {
            return Err(Error::Domain("non-finite quaternion".into()));
        }
        let dev = (n - 1.0).abs();
        if dev <= NORM_EXACT_TOL {
            Ok(q)
        } else if dev <= NORM_RENORMALIZE_TOL {
            Ok(q.scaled(1.0 / n))
        } else {
            Err(Error::Domain(format!(
                "quaternion norm {n} is not within {NORM_RENORMALIZE_TOL} of 1"
            )))
        }
    }

    fn scaled(self, s: f64) -> Quat {
        Quat {
            w: self.w * s,
            x: self.x * s,
            y: self.y * s,
            z: self.z * s,
        }
    }

    pub fn norm(self) -> f64 {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn conjugate(self) -> Quat {
        Quat {
            w: self.w,
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }

    pub fn rotate(self, v: Vec3) -> Vec3 {
        // v' = v + 2w(u×v) + 2u×(u×v)
        let u = Vec3::new(self.x, self.y, self.z);
        let t = u.cross(v) * 2.0;
        v + t * self.w + u.cross(t)
    }

    pub fn rotate_dir(self, d: UnitDir) -> UnitDir {
        UnitDir::new(self.rotate(d.vec())).expect("rotation of a unit vector is non-zero")
    }

    /// 3×3 rotation matrix, row-major.
    pub fn to_matrix3(self) -> [[f64; 3]; 3] {
        let Quat { w, x, y, z } = self;
        [
            [
                1.0 - 2.0 * (y * y + z * z),
                2.0 * (x * y - w * z),
                2.0 * (x * z + w * y),
            ],
            [
                2.0 * (x * y + w * z),
                1.0 - 2.0 * (x * x + z * z),
                2.0 * (y * z - w * x),
            ],
            [
                2.0 * (x * z - w * y),
                2.0 * (y * z + w * x),
                1.0 - 2.0 * (x * x + y * y),
            ],
        ]
    }

    /// Inverse of [`Quat::to_matrix3`] for a proper rotation matrix.
    pub fn from_matrix3(m: &[[f64; 3]; 3]) -> Quat {
        let trace = m[0][0] + m[1][1] + m[2][2];
        let q = if trace > 0.0 {
            let s = (trace + 1.0).sqrt() * 2.0;
            Quat {
                w: 0.25 * s,
                x: (m[2][1] - m[1][2]) / s,
                y: (m[0][2] - m[2][0]) / s,
                z: (m[1][0] - m[0][1]) / s,
            }
        } else if m[0][0] > m[1][1] && m[0][0] > m[2][2] {
            let s = (1.0 + m[0][0] - m[1][1] - m[2][2]).sqrt() * 2.0;
            Quat {
                w: (m[2][1] - m[1][2]) / s,
                x: 0.25 * s,
                y: (m[0][1] + m[1][0]) / s,
                z: (m[0][2] + m[2][0]) / s,
            }
        } else if m[1][1] > m[2][2] {
            let s = (1.0 + m[1][1] - m[0][0] - m[2][2]).sqrt() * 2.0;
            Quat {
                w: (m[0][2] - m[2][0]) / s,
                x: (m[0][1] + m[1][0]) / s,
                y: 0.25 * s,
                z: (m[1][2] + m[2][1]) / s,
            }
        } else {
            let s = (1.0 + m[2][2] - m[0][0] - m[1][1]).sqrt() * 2.0;
            Quat {
                w: (m[1][0] - m[0][1]) / s,
                x: (m[0][2] + m[2][0]) / s,
                y: (m[1][2] + m[2][1]) / s,
                z: 0.25 * s,
            }
        };
        q.scaled(1.0 / q.norm())
    }
}

impl TryFrom<[f64; 4]> for Quat {
    type Error = Error;
    fn try_from(a: [f64; 4]) -> Result<Self> {
        Quat::from_near_unit(a[0], a[1], a[2], a[3])
    }
}

impl From<Quat> for [f64; 4] {
    fn from(q: Quat) -> Self {
        [q.w, q.x, q.y, q.z]
    }
}

/// Head position and orientation in world space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeadPose {
    pub position: Vec3,
    pub rotation: Quat,
}

impl Default for HeadPose {
    fn default() -> Self {
        HeadPose {
            position: Vec3::ZERO,
            rotation: Quat::IDENTITY,
        }
    }
}

impl HeadPose {
    pub fn new(position: Vec3, rotation: Quat) -> Self {
        HeadPose { position, rotation }
    }

    /// Rigid 4×4 transform (row-major, column-vector convention).
    pub fn to_matrix(&self) -> [[f64; 4]; 4] {
        let r = self.rotation.to_matrix3();
        let p = self.position;
        [
            [r[0][0], r[0][1], r[0][2], p.x],
            [r[1][0], r[1][1], r[1][2], p.y],
            [r[2][0], r[2][1], r[2][2], p.z],
            [0.0, 0.0, 0.0, 1.0],
        ]
    }

    /// Accepts only rigid transforms: orthonormal rotation block with
    /// determinant +1 and a `[0 0 0 1]` bottom row.
    pub fn from_matrix(m: &[[f64; 4]; 4]) -> Result<HeadPose> {
        const TOL: f64 = 1e-9;
        if m.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Domain("non-finite matrix".into()));
        }
        if m[3][0].abs() > TOL
            || m[3][1].abs() > TOL
            || m[3][2].abs() > TOL
            || (m[3][3] - 1.0).abs() > TOL
        {
            return Err(Error::Domain("bottom row must be [0 0 0 1]".into()));
        }
        let r = [
            [m[0][0], m[0][1], m[0][2]],
            [m[1][0], m[1][1], m[1][2]],
            [m[2][0], m[2][1], m[2][2]],
        ];
        for i in 0..3 {
            for j in 0..3 {
                let d: f64 = (0..3).map(|k| r[k][i] * r[k][j]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                if (d - want).abs() > TOL {
                    return Err(Error::Domain("rotation block has scale or shear".into()));
                }
            }
        }
        let det = r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1])
            - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
            + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
        if (det - 1.0).abs() > TOL {
            return Err(Error::Domain("rotation block is a reflection".into()));
        }
        Ok(HeadPose {
            position: Vec3::new(m[0][3], m[1][3], m[2][3]),
            rotation: Quat::from_matrix3(&r),
        })
    }

    pub fn to_world_point(&self, local: Vec3) -> Vec3 {
        self.position + self.rotation.rotate(local)
    }

    pub fn to_local_point(&self, world: Vec3) -> Vec3 {
        self.rotation.conjugate().rotate(world - self.position)
    }

    pub fn to_local_vec(&self, world: Vec3) -> Vec3 {
        self.rotation.conjugate().rotate(world)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GazeRay {
    pub origin: Vec3,
    pub direction: UnitDir,
}

impl GazeRay {
    pub fn at(&self, t: f64) -> Vec3 {
        self.origin + self.direction.vec() * t
    }
}

/// Normalized screen coordinates. Points that miss the screen keep finite
/// coordinates outside `[0, 1]` pointing the way the gaze went, and are
/// flagged with `in_view = false`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScreenPoint {
    pub u: f64,
    pub v: f64,
    pub in_view: bool,
}

impl ScreenPoint {
    pub fn new(u: f64, v: f64) -> Self {
        let in_view = (0.0..=1.0).contains(&u) && (0.0..=1.0).contains(&v);
        ScreenPoint { u, v, in_view }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ScreenZone {
    Left,
    Right,
    Center,
    TopLeft,
    TopRight,
    Top,
    BottomLeft,
    BottomRight,
    Bottom,
}

impl ScreenZone {
    pub const ALL: [ScreenZone; 9] = [
        ScreenZone::TopLeft,
        ScreenZone::Top,
        ScreenZone::TopRight,
        ScreenZone::Left,
        ScreenZone::Center,
        ScreenZone::Right,
        ScreenZone::BottomLeft,
        ScreenZone::Bottom,
        ScreenZone::BottomRight,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ScreenZone::Left => "Left",
            ScreenZone::Right => "Right",
            ScreenZone::Center => "Center",
            ScreenZone::TopLeft => "TopLeft",
            ScreenZone::TopRight => "TopRight",
            ScreenZone::Top => "Top",
            ScreenZone::BottomLeft => "BottomLeft",
            ScreenZone::BottomRight => "BottomRight",
            ScreenZone::Bottom => "Bottom",
        }
    }

    pub fn from_name(s: &str) -> Option<ScreenZone> {
        ScreenZone::ALL.into_iter().find(|z| z.as_str() == s)
    }

    /// Column (0 left, 1 center, 2 right) and row (0 bottom, 1 middle, 2 top).
    pub fn grid_cell(self) -> (u8, u8) {
        match self {
            ScreenZone::BottomLeft => (0, 0),
            ScreenZone::Bottom => (1, 0),
            ScreenZone::BottomRight => (2, 0),
            ScreenZone::Left => (0, 1),
            ScreenZone::Center => (1, 1),
            ScreenZone::Right => (2, 1),
            ScreenZone::TopLeft => (0, 2),
            ScreenZone::Top => (1, 2),
            ScreenZone::TopRight => (2, 2),
        }
    }

    /// Center of the zone's sub-rectangle in normalized screen coordinates.
    pub fn center(self) -> ScreenPoint {
        let (c, r) = self.grid_cell();
        ScreenPoint::new((2.0 * c as f64 + 1.0) / 6.0, (2.0 * r as f64 + 1.0) / 6.0)
    }
}

impl fmt::Display for ScreenZone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Virtual screen plane at `distance` along head-forward, spanning
/// `±half_width` × `±half_height`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VirtualScreen {
    pub distance: f64,
    pub half_width: f64,
    pub half_height: f64,
}

impl Default for VirtualScreen {
    /// 1 m away, about 60° field of view on both axes.
    fn default() -> Self {
        VirtualScreen {
            distance: 1.0,
            half_width: 0.5774,
            half_height: 0.5774,
        }
    }
}

impl VirtualScreen {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("distance", self.distance),
            ("half_width", self.half_width),
            ("half_height", self.half_height),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(
                    format!("screen.{name}"),
                    format!("must be > 0, got {v}"),
                ));
            }
        }
        Ok(())
    }

    /// Head-local point on the screen plane for normalized coordinates.
    pub fn local_point(&self, p: ScreenPoint) -> Vec3 {
        Vec3::new(
            (2.0 * p.u - 1.0) * self.half_width,
            (2.0 * p.v - 1.0) * self.half_height,
            self.distance,
        )
    }
}

/// World-space gaze ray from a head pose and a head-local gaze direction.
/// The origin is the head position displaced by the rotated eye offset.
pub fn world_gaze_ray(head: &HeadPose, local_gaze: UnitDir, local_eye_offset: Vec3) -> GazeRay {
    GazeRay {
        origin: head.to_world_point(local_eye_offset),
        direction: head.rotation.rotate_dir(local_gaze),
    }
}

/// Angle between two directions in degrees, in `[0, 180]`.
pub fn angular_change(prev: UnitDir, cur: UnitDir) -> f64 {
    // atan2 form is accurate at both small and near-180° angles, unlike acos.
    let (a, b) = (prev.vec(), cur.vec());
    let dot = a.dot(b).clamp(-1.0, 1.0);
    a.cross(b).norm().atan2(dot).to_degrees()
}

/// Angular speed in degrees per second.
pub fn angular_speed(delta_theta_deg: f64, delta_t_s: f64) -> Result<f64> {
    if delta_t_s <= 0.0 || !delta_t_s.is_finite() {
        return Err(Error::InvalidInterval(delta_t_s));
    }
    Ok(delta_theta_deg / delta_t_s)
}

/// Intersects a ray (t ≥ 0) with a sphere. Returns the smallest non-negative
/// hit distance; an origin inside (or on) the sphere hits at 0, and exact
/// tangency counts as a hit.
pub fn ray_sphere_hit(ray: &GazeRay, center: Vec3, radius: f64) -> Option<f64> {
    let oc = ray.origin - center;
    let c = oc.norm_squared() - radius * radius;
    if c <= 0.0 {
        return Some(0.0);
    }
    let b = oc.dot(ray.direction.vec());
    let disc = b * b - c;
    if disc < 0.0 {
        return None;
    }
    let t = -b - disc.sqrt();
    (t >= 0.0).then_some(t)
}

/// Projects a gaze ray onto the head-fixed virtual screen.
pub fn project_to_screen(ray: &GazeRay, head: &HeadPose, screen: &VirtualScreen) -> ScreenPoint {
    let o = head.to_local_point(ray.origin);
    let d = head.to_local_vec(ray.direction.vec());
    let off_screen = |d: Vec3| {
        // Push the point outside the unit square in the gaze's lateral direction.
        let m = d.x.abs().max(d.y.abs());
        if m < 1e-12 {
            ScreenPoint {
                u: 0.5,
                v: -0.5,
                in_view: false,
            }
        } else {
            ScreenPoint {
                u: 0.5 + d.x / m,
                v: 0.5 + d.y / m,
                in_view: false,
            }
        }
    };
    if d.z <= 1e-12 {
        return off_screen(d);
    }
    let t = (screen.distance - o.z) / d.z;
    if t < 0.0 {
        return off_screen(d);
    }
    let x = o.x + t * d.x;
    let y = o.y + t * d.y;
    ScreenPoint::new(
        (x / screen.half_width + 1.0) / 2.0,
        (y / screen.half_height + 1.0) / 2.0,
    )
}

/// Equal-thirds 3×3 partition; boundary values belong to the middle band.
pub fn classify_zone(p: ScreenPoint) -> Result<ScreenZone> {
    if !p.in_view || !(0.0..=1.0).contains(&p.u) || !(0.0..=1.0).contains(&p.v) {
        return Err(Error::OutOfView { u: p.u, v: p.v });
    }
    Ok(zone_of_clamped(p.u, p.v))
}

/// Zone of the nearest in-view point; used for targets that leave the screen.
pub fn classify_zone_clamped(p: ScreenPoint) -> ScreenZone {
    zone_of_clamped(p.u.clamp(0.0, 1.0), p.v.clamp(0.0, 1.0))
}

fn zone_of_clamped(u: f64, v: f64) -> ScreenZone {
    const LO: f64 = 1.0 / 3.0;
    const HI: f64 = 2.0 / 3.0;
    let col = if u < LO {
        0
    } else if u > HI {
        2
    } else {
        1
    };
    let row = if v < LO {
        0
    } else if v > HI {
        2
    } else {
        1
    };
    match (col, row) {
        (0, 0) => ScreenZone::BottomLeft,
        (1, 0) => ScreenZone::Bottom,
        (2, 0) => ScreenZone::BottomRight,
        (0, 1) => ScreenZone::Left,
        (1, 1) => ScreenZone::Center,
        (2, 1) => ScreenZone::Right,
        (0, 2) => ScreenZone::TopLeft,
        (1, 2) => ScreenZone::Top,
        _ => ScreenZone::TopRight,
    }
}

/// Unit direction from `from` towards `to`.
pub fn direction_to(from: Vec3, to: Vec3) -> Result<UnitDir> {
    UnitDir::new(to - from)
}
