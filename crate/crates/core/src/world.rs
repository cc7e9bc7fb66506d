//! Arena geometry, object instantiation, initial placement and light fields.
//!
//! Arena files are header-free CSV rows `x,y` listing the outer boundary.
//! Vertices are scaled uniformly so that the polygon area matches the
//! configured `arena_surface`, then translated so that the centroid sits at
//! the origin. Lengths are millimetres throughout.

use std::f64::consts::PI;
use std::path::Path;

use rand::Rng;

use crate::config::{
    GeometryKind, InitialFormation, LightMode, ObjectKind, ObjectSpec, SimConfig, MAX_LIGHT_LEVEL,
};
use crate::geometry::{
    is_simple_polygon, point_in_polygon, polygon_centroid, polygon_segments, signed_area, Aabb,
    Segment, Vec2,
};

/// Robot id reported for pogowall rows and emissions.
pub const WALL_ID: u16 = 65535;
/// Robot id reported for membrane rows and emissions.
pub const MEMBRANE_ID: u16 = 65534;
/// Radius of one membrane link (mm).
pub const MEMBRANE_LINK_RADIUS: f64 = 5.0;
/// Initial placements may cover at most this fraction of the arena.
pub const MAX_FILL_FRACTION: f64 = 0.7;
/// Rejection-sampling attempts per object before giving up.
pub const MAX_PLACEMENT_ATTEMPTS: usize = 100_000;
/// Sides of the built-in disk arena.
pub const DEFAULT_DISK_SIDES: usize = 64;

#[derive(Debug, thiserror::Error)]
pub enum WorldError {
    #[error("arena needs at least 3 vertices, found {0}")]
    TooFewVertices(usize),
    #[error("arena polygon is self-intersecting")]
    SelfIntersecting,
    #[error("arena polygon has zero area")]
    Degenerate,
    #[error("arena file line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("cannot read arena file `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("objects cover {fill:.1}% of the arena (limit {limit:.0}%); use a larger arena_surface or fewer objects")]
    Overcrowded { fill: f64, limit: f64 },
    #[error("could not place `{category}` after {attempts} attempts; try a larger arena_surface")]
    PlacementFailed { category: String, attempts: usize },
    #[error("invalid object `{category}`: {message}")]
    InvalidObject { category: String, message: String },
}

/// The closed boundary polygon of the experiment area.
#[derive(Debug, Clone, PartialEq)]
pub struct Arena {
    /// Counter-clockwise vertices, centroid at the origin.
    pub boundary: Vec<Vec2>,
    pub surface: f64,
    pub wall_segments: Vec<Segment>,
}

impl Arena {
    /// Builds an arena from raw vertices, rescaled to `target_surface` mm².
    pub fn from_vertices(mut vertices: Vec<Vec2>, target_surface: f64) -> Result<Self, WorldError> {
        if vertices.len() >= 2 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        if vertices.len() < 3 {
            return Err(WorldError::TooFewVertices(vertices.len()));
        }
        if !is_simple_polygon(&vertices) {
            return Err(WorldError::SelfIntersecting);
        }
        let area = signed_area(&vertices);
        if area.abs() < f64::EPSILON {
            return Err(WorldError::Degenerate);
        }
        if area < 0.0 {
            vertices.reverse();
        }
        let scale = (target_surface / area.abs()).sqrt();
        let centroid = polygon_centroid(&vertices);
        let boundary: Vec<Vec2> = vertices.iter().map(|v| (*v - centroid) * scale).collect();
        let wall_segments = polygon_segments(&boundary);
        Ok(Self {
            surface: signed_area(&boundary),
            boundary,
            wall_segments,
        })
    }

    /// Regular `sides`-gon approximating a disk.
    pub fn disk(target_surface: f64, sides: usize) -> Self {
        let vertices = (0..sides)
            .map(|i| Vec2::from_angle(2.0 * PI * i as f64 / sides as f64))
            .collect();
        Self::from_vertices(vertices, target_surface).expect("regular polygon is valid")
    }

    pub fn contains(&self, p: Vec2) -> bool {
        point_in_polygon(p, &self.boundary)
    }

    /// Distance from `p` to the nearest boundary segment.
    pub fn clearance(&self, p: Vec2) -> f64 {
        self.wall_segments
            .iter()
            .map(|s| s.distance_to(p))
            .fold(f64::INFINITY, f64::min)
    }

    /// Signed clearance: negative when `p` lies outside the polygon.
    pub fn signed_clearance(&self, p: Vec2) -> f64 {
        let c = self.clearance(p);
        if self.contains(p) {
            c
        } else {
            -c
        }
    }

    pub fn bounds(&self) -> Aabb {
        Aabb::from_points(&self.boundary)
    }
}

/// Parses a header-free `x,y` CSV polygon and rescales it.
pub fn load_arena(csv_text: &str, target_surface: f64) -> Result<Arena, WorldError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(csv_text.as_bytes());
    let mut vertices = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| WorldError::Format {
            line: i + 1,
            message: e.to_string(),
        })?;
        let line = record.position().map_or(i + 1, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        if record.len() < 2 {
            return Err(WorldError::Format {
                line,
                message: "expected `x,y`".into(),
            });
        }
        let parse = |s: &str| {
            s.parse::<f64>().map_err(|_| WorldError::Format {
                line,
                message: format!("`{s}` is not a number"),
            })
        };
        vertices.push(Vec2::new(parse(&record[0])?, parse(&record[1])?));
    }
    Arena::from_vertices(vertices, target_surface)
}

pub fn load_arena_file(path: &Path, target_surface: f64) -> Result<Arena, WorldError> {
    let text = std::fs::read_to_string(path).map_err(|source| WorldError::Io {
        path: path.display().to_string(),
        source,
    })?;
    load_arena(&text, target_surface)
}

/// Position (mm) and heading (rad). Heading is NaN for unoriented objects.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub position: Vec2,
    pub angle: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ObjectShape {
    Disk { radius: f64 },
    /// Closed chain of equal disks (membrane).
    Chain { link_radius: f64, links: Vec<Vec2> },
    /// Static polygon (pogowall with explicit points).
    Polygon { vertices: Vec<Vec2> },
    /// Static wall following the arena boundary.
    Boundary,
}

/// One instantiated object.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldObject {
    pub id: u16,
    pub category: String,
    pub kind: ObjectKind,
    pub pose: Pose,
    pub shape: ObjectShape,
}

impl WorldObject {
    pub fn radius(&self) -> Option<f64> {
        match self.shape {
            ObjectShape::Disk { radius } => Some(radius),
            _ => None,
        }
    }

    /// Emitting/occluding wall segments for static walls.
    pub fn wall_segments(&self, arena: &Arena) -> Vec<Segment> {
        match &self.shape {
            ObjectShape::Boundary => arena.wall_segments.clone(),
            ObjectShape::Polygon { vertices } => polygon_segments(vertices),
            _ => Vec::new(),
        }
    }
}

/// A light source sampled by the photosensors.
#[derive(Debug, Clone, PartialEq)]
pub struct LightField {
    pub mode: LightMode,
    pub geometry: GeometryKind,
    pub value: f64,
    pub center: Vec2,
    pub radius: f64,
    pub polygon: Vec<Vec2>,
    pub photo_start_at: f64,
    pub photo_start_duration: f64,
    pub photo_start_value: f64,
}

impl LightField {
    pub fn from_spec(spec: &ObjectSpec) -> Self {
        Self {
            mode: spec.light_mode,
            geometry: spec.geometry,
            value: spec.value,
            center: spec.center.map_or(Vec2::ZERO, |[x, y]| Vec2::new(x, y)),
            radius: spec.radius,
            polygon: spec
                .points
                .as_ref()
                .map(|pts| pts.iter().map(|[x, y]| Vec2::new(*x, *y)).collect())
                .unwrap_or_default(),
            photo_start_at: spec.photo_start_at,
            photo_start_duration: spec.photo_start_duration,
            photo_start_value: spec.photo_start_value,
        }
    }

    /// A uniform light over the whole arena.
    pub fn global(value: f64) -> Self {
        let mut spec = ObjectSpec::new(ObjectKind::StaticLight);
        spec.geometry = GeometryKind::Global;
        spec.value = value;
        Self::from_spec(&spec)
    }

    pub fn covers(&self, p: Vec2) -> bool {
        match self.geometry {
            GeometryKind::Global => true,
            GeometryKind::Disk => p.distance(self.center) <= self.radius,
            GeometryKind::Polygon => self.polygon.len() >= 3 && point_in_polygon(p, &self.polygon),
        }
    }

    fn contribution(&self, p: Vec2) -> f64 {
        if !self.covers(p) {
            return 0.0;
        }
        match (self.mode, self.geometry) {
            (LightMode::Gradient, GeometryKind::Disk) => {
                // linear falloff: full value at the center, zero at the rim
                self.value * (1.0 - p.distance(self.center) / self.radius).max(0.0)
            }
            _ => self.value,
        }
    }

    fn flash_active(&self, t: f64) -> bool {
        self.photo_start_at >= 0.0
            && t >= self.photo_start_at
            && t < self.photo_start_at + self.photo_start_duration
    }
}

/// Light level at `position` and time `t`, in `[0, 32767]`.
pub fn sample_light(fields: &[LightField], position: Vec2, t: f64) -> u16 {
    let ambient: f64 = fields.iter().map(|f| f.contribution(position)).sum();
    let mut level = ambient.clamp(0.0, MAX_LIGHT_LEVEL);
    for f in fields {
        if f.flash_active(t) && f.covers(position) {
            level = level.max(f.photo_start_value.clamp(0.0, MAX_LIGHT_LEVEL));
        }
    }
    level.round() as u16
}

/// Everything static about a run plus the initial object list.
#[derive(Debug, Clone)]
pub struct World {
    pub arena: Arena,
    pub objects: Vec<WorldObject>,
    pub lights: Vec<LightField>,
}

impl World {
    /// Loads the arena (relative paths resolve against `arena_dir`), places
    /// every object and collects light fields.
    pub fn build<R: Rng>(config: &SimConfig, arena_dir: &Path, rng: &mut R) -> Result<Self, WorldError> {
        let arena = match &config.arena_file {
            Some(file) if !file.is_empty() => {
                let path = Path::new(file);
                let path = if path.is_absolute() { path.to_path_buf() } else { arena_dir.join(path) };
                load_arena_file(&path, config.arena_surface)?
            }
            _ => Arena::disk(config.arena_surface, DEFAULT_DISK_SIDES),
        };
        let objects = place_initial(config, &arena, rng)?;
        let lights = config
            .objects
            .values()
            .filter(|s| s.kind == ObjectKind::StaticLight)
            .map(LightField::from_spec)
            .collect();
        Ok(Self { arena, objects, lights })
    }
}

struct PlacementRequest {
    object: usize,
    radius: f64,
    membrane: bool,
}

fn membrane_ring(center: Vec2, ring_radius: f64) -> Vec<Vec2> {
    let n = ((PI * ring_radius / MEMBRANE_LINK_RADIUS).round() as usize).max(6);
    (0..n)
        .map(|i| center + Vec2::from_angle(2.0 * PI * i as f64 / n as f64) * ring_radius)
        .collect()
}

/// Instantiates every object category and computes initial poses.
///
/// Robots, pogobjects and passive objects receive ids `0, 1, 2, …` in
/// category order; pogowalls use [`WALL_ID`] and membranes [`MEMBRANE_ID`].
pub fn place_initial<R: Rng>(
    config: &SimConfig,
    arena: &Arena,
    rng: &mut R,
) -> Result<Vec<WorldObject>, WorldError> {
    let mut objects = Vec::new();
    let mut next_id: u32 = 0;
    let mut requests = Vec::new();
    let mut occupied_area = 0.0;

    for (category, spec) in &config.objects {
        match spec.kind {
            ObjectKind::StaticLight => {}
            ObjectKind::Pogowall => {
                let (shape, reference) = match spec.geometry {
                    GeometryKind::Polygon => {
                        let vertices: Vec<Vec2> = spec
                            .points
                            .as_ref()
                            .expect("validated polygon")
                            .iter()
                            .map(|[x, y]| Vec2::new(*x, *y))
                            .collect();
                        let c = polygon_centroid(&vertices);
                        (ObjectShape::Polygon { vertices }, c)
                    }
                    _ => (ObjectShape::Boundary, polygon_centroid(&arena.boundary)),
                };
                objects.push(WorldObject {
                    id: WALL_ID,
                    category: category.clone(),
                    kind: spec.kind,
                    pose: Pose { position: reference, angle: 0.0 },
                    shape,
                });
            }
            ObjectKind::Membrane => {
                for _ in 0..spec.nb {
                    let outer = spec.radius + MEMBRANE_LINK_RADIUS;
                    occupied_area += PI * outer * outer;
                    requests.push(PlacementRequest { object: objects.len(), radius: outer, membrane: true });
                    objects.push(WorldObject {
                        id: MEMBRANE_ID,
                        category: category.clone(),
                        kind: spec.kind,
                        pose: Pose { position: Vec2::ZERO, angle: f64::NAN },
                        shape: ObjectShape::Chain {
                            link_radius: MEMBRANE_LINK_RADIUS,
                            links: Vec::new(),
                        },
                    });
                }
            }
            ObjectKind::Pogobot | ObjectKind::Pogobject | ObjectKind::PassiveObject => {
                if spec.geometry != GeometryKind::Disk {
                    return Err(WorldError::InvalidObject {
                        category: category.clone(),
                        message: "only disk geometry is supported for mobile objects".into(),
                    });
                }
                for _ in 0..spec.nb {
                    if next_id >= MEMBRANE_ID as u32 {
                        return Err(WorldError::InvalidObject {
                            category: category.clone(),
                            message: "too many objects for 16-bit ids".into(),
                        });
                    }
                    occupied_area += PI * spec.radius * spec.radius;
                    requests.push(PlacementRequest { object: objects.len(), radius: spec.radius, membrane: false });
                    objects.push(WorldObject {
                        id: next_id as u16,
                        category: category.clone(),
                        kind: spec.kind,
                        pose: Pose { position: Vec2::ZERO, angle: 0.0 },
                        shape: ObjectShape::Disk { radius: spec.radius },
                    });
                    next_id += 1;
                }
            }
        }
    }

    let fill = occupied_area / arena.surface;
    if fill >= MAX_FILL_FRACTION {
        return Err(WorldError::Overcrowded {
            fill: fill * 100.0,
            limit: MAX_FILL_FRACTION * 100.0,
        });
    }

    let mut placed: Vec<(Vec2, f64)> = Vec::new();

    if config.initial_formation == InitialFormation::Disk {
        let disks: Vec<&PlacementRequest> = requests.iter().filter(|r| !r.membrane).collect();
        let positions = hex_cluster(arena, &disks.iter().map(|r| r.radius).collect::<Vec<_>>())
            .ok_or_else(|| WorldError::PlacementFailed {
                category: disks
                    .first()
                    .map_or_else(String::new, |r| objects[r.object].category.clone()),
                attempts: 1,
            })?;
        let mut updates = Vec::new();
        for (req, pos) in disks.iter().zip(positions) {
            let angle = rng.random_range(-PI..PI);
            placed.push((pos, req.radius));
            updates.push((req.object, pos, angle));
        }
        for (idx, pos, angle) in updates {
            objects[idx].pose = Pose { position: pos, angle };
        }
    }

    // Largest first improves rejection sampling in crowded arenas.
    let mut order: Vec<usize> = (0..requests.len())
        .filter(|&i| config.initial_formation == InitialFormation::Random || requests[i].membrane)
        .collect();
    order.sort_by(|&a, &b| requests[b].radius.total_cmp(&requests[a].radius).then(a.cmp(&b)));

    let bounds = arena.bounds();
    for i in order {
        let req = &requests[i];
        let mut found = None;
        for _ in 0..MAX_PLACEMENT_ATTEMPTS {
            let p = Vec2::new(
                rng.random_range(bounds.min.x..bounds.max.x),
                rng.random_range(bounds.min.y..bounds.max.y),
            );
            if !arena.contains(p) || arena.clearance(p) < req.radius {
                continue;
            }
            if placed.iter().any(|(q, r)| q.distance(p) < r + req.radius) {
                continue;
            }
            found = Some(p);
            break;
        }
        let Some(p) = found else {
            return Err(WorldError::PlacementFailed {
                category: objects[req.object].category.clone(),
                attempts: MAX_PLACEMENT_ATTEMPTS,
            });
        };
        placed.push((p, req.radius));
        let obj = &mut objects[req.object];
        match &mut obj.shape {
            ObjectShape::Chain { links, .. } => {
                *links = membrane_ring(p, req.radius - MEMBRANE_LINK_RADIUS);
                obj.pose = Pose { position: p, angle: f64::NAN };
            }
            _ => {
                let angle = rng.random_range(-PI..PI);
                obj.pose = Pose { position: p, angle };
            }
        }
    }
    Ok(objects)
}

/// Hexagonal packing around the arena centroid, nearest lattice sites first.
/// Sites keep a 1% gap between neighbouring rims.
fn hex_cluster(arena: &Arena, radii: &[f64]) -> Option<Vec<Vec2>> {
    if radii.is_empty() {
        return Some(Vec::new());
    }
    let r_max = radii.iter().cloned().fold(0.0, f64::max);
    let spacing = 2.0 * r_max * 1.01;
    let center = polygon_centroid(&arena.boundary);
    let b = arena.bounds();
    let span = (b.width().max(b.height()) / spacing).ceil() as i64 + 2;
    let row_h = spacing * 3f64.sqrt() / 2.0;
    let mut sites = Vec::new();
    for j in -span..=span {
        for i in -span..=span {
            let p = center + Vec2::new((i as f64 + 0.5 * (j.rem_euclid(2)) as f64) * spacing, j as f64 * row_h);
            if arena.contains(p) && arena.clearance(p) >= r_max {
                sites.push(p);
            }
        }
    }
    if sites.len() < radii.len() {
        return None;
    }
    sites.sort_by(|a, b| {
        let da = a.distance(center);
        let db = b.distance(center);
        da.total_cmp(&db)
            .then((*a - center).angle().total_cmp(&(*b - center).angle()))
    });
    sites.truncate(radii.len());
    Some(sites)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::load_config;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn shoelace(v: &[Vec2]) -> f64 {
        // independent of geometry::signed_area
        let n = v.len();
        let mut s1 = 0.0;
        let mut s2 = 0.0;
        for i in 0..n {
            s1 += v[i].x * v[(i + 1) % n].y;
            s2 += v[i].y * v[(i + 1) % n].x;
        }
        0.5 * (s1 - s2).abs()
    }

    #[test]
    fn unit_square_scales_to_meter() {
        let a = load_arena("0,0\n1,0\n1,1\n0,1\n", 1.0e6).unwrap();
        let xs: Vec<f64> = a.boundary.iter().map(|v| v.x).collect();
        let width = xs.iter().cloned().fold(f64::MIN, f64::max) - xs.iter().cloned().fold(f64::MAX, f64::min);
        assert!((width - 1000.0).abs() < 1e-9);
        assert!((a.surface - 1.0e6).abs() < 1e-6);
    }

    #[test]
    fn disk_64gon_area_within_tolerance() {
        let mut text = String::new();
        for i in 0..64 {
            let th = 2.0 * PI * i as f64 / 64.0;
            text.push_str(&format!("{},{}\n", 3.0 * th.cos(), 3.0 * th.sin()));
        }
        let a = load_arena(&text, 1.0e6).unwrap();
        let area = shoelace(&a.boundary);
        assert!((area - 1.0e6).abs() / 1.0e6 < 1e-3);
    }

    #[test]
    fn too_few_vertices_and_bowtie() {
        assert!(matches!(load_arena("0,0\n1,1\n", 1.0), Err(WorldError::TooFewVertices(2))));
        assert!(matches!(
            load_arena("0,0\n1,1\n1,0\n0,1\n", 1.0),
            Err(WorldError::SelfIntersecting)
        ));
        assert!(matches!(load_arena("0,0\nx,1\n1,1\n", 1.0), Err(WorldError::Format { .. })));
    }

    #[test]
    fn clockwise_input_is_reoriented() {
        let a = load_arena("0,0\n0,1\n1,1\n1,0\n", 4.0).unwrap();
        assert!(signed_area(&a.boundary) > 0.0);
    }

    fn robots_config(nb: u32, formation: &str) -> SimConfig {
        load_config(&format!(
            "initial_formation: {formation}\nobjects:\n  robots:\n    type: pogobot\n    nb: {nb}\n    radius: 26.5\n"
        ))
        .unwrap()
    }

    fn check_valid(objects: &[WorldObject], arena: &Arena) {
        for (i, a) in objects.iter().enumerate() {
            let r = a.radius().unwrap();
            assert!(arena.contains(a.pose.position));
            assert!(arena.clearance(a.pose.position) >= r - 1e-9);
            for b in &objects[i + 1..] {
                let d = a.pose.position.distance(b.pose.position);
                assert!(d >= r + b.radius().unwrap() - 1e-9);
            }
        }
    }

    #[test]
    fn hundred_random_robots_fit() {
        let cfg = robots_config(100, "random");
        let arena = Arena::disk(1.0e6, 64);
        let objs = place_initial(&cfg, &arena, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(objs.len(), 100);
        check_valid(&objs, &arena);
        let ids: Vec<u16> = objs.iter().map(|o| o.id).collect();
        assert_eq!(ids, (0..100).collect::<Vec<u16>>());
    }

    #[test]
    fn disk_formation_is_packed() {
        let cfg = robots_config(37, "disk");
        let arena = Arena::disk(1.0e6, 64);
        let objs = place_initial(&cfg, &arena, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        check_valid(&objs, &arena);
        let max_r = objs.iter().map(|o| o.pose.position.length()).fold(0.0, f64::max);
        // 37 sites fill three hexagonal shells
        assert!(max_r < 3.1 * 53.53, "{max_r}");
    }

    #[test]
    fn single_robot_and_determinism() {
        let arena = Arena::disk(1.0e6, 64);
        let one = place_initial(&robots_config(1, "random"), &arena, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        assert!(arena.contains(one[0].pose.position));
        let cfg = robots_config(50, "random");
        let a = place_initial(&cfg, &arena, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = place_initial(&cfg, &arena, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn overcrowding_guard() {
        let cfg = robots_config(400, "random");
        let arena = Arena::disk(1.0e6, 64);
        let err = place_initial(&cfg, &arena, &mut ChaCha8Rng::seed_from_u64(0)).unwrap_err();
        assert!(matches!(err, WorldError::Overcrowded { .. }));
    }

    #[test]
    fn reserved_ids_for_walls_and_membranes() {
        let cfg = load_config(
            "objects:\n  walls: {type: pogowall, geometry: global}\n  membranes: {type: membrane, radius: 60}\n  robots: {type: pogobot, nb: 3}\n",
        )
        .unwrap();
        let arena = Arena::disk(1.0e6, 64);
        let objs = place_initial(&cfg, &arena, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(objs[0].id, WALL_ID);
        assert_eq!(objs[1].id, MEMBRANE_ID);
        assert!(objs[1].pose.angle.is_nan());
        match &objs[1].shape {
            ObjectShape::Chain { links, .. } => assert!(links.len() >= 6),
            other => panic!("{other:?}"),
        }
        assert_eq!(objs[2].id, 0);
    }

    #[test]
    fn light_sampling() {
        let mut field = LightField::global(200.0);
        assert_eq!(sample_light(&[field.clone()], Vec2::new(12.0, -40.0), 0.5), 200);
        field.photo_start_at = 1.0;
        field.photo_start_duration = 1.0;
        field.photo_start_value = 32767.0;
        assert_eq!(sample_light(&[field.clone()], Vec2::ZERO, 1.5), 32767);
        assert_eq!(sample_light(&[field.clone()], Vec2::ZERO, 2.0), 200);
        assert_eq!(sample_light(&[], Vec2::ZERO, 0.0), 0);
        let saturate = vec![LightField::global(30000.0), LightField::global(30000.0)];
        assert_eq!(sample_light(&saturate, Vec2::ZERO, 0.0), 32767);
    }

    #[test]
    fn gradient_falls_off_linearly() {
        let mut spec = ObjectSpec::new(ObjectKind::StaticLight);
        spec.geometry = GeometryKind::Disk;
        spec.light_mode = LightMode::Gradient;
        spec.radius = 100.0;
        spec.value = 1000.0;
        let f = LightField::from_spec(&spec);
        assert_eq!(sample_light(&[f.clone()], Vec2::ZERO, 0.0), 1000);
        assert_eq!(sample_light(&[f.clone()], Vec2::new(50.0, 0.0), 0.0), 500);
        assert_eq!(sample_light(&[f], Vec2::new(150.0, 0.0), 0.0), 0);
    }
}
