//! Rigid-disk dynamics: differential-drive targets, impulse collisions,
//! positional correction against bodies and walls, membrane chains.
//!
//! Step order:
//! 1. driven bodies take their motor target velocity (plus Gaussian noise)
//! 2. free bodies are damped by `exp(-damping * dt)`
//! 3. contact impulses (restitution `max`, friction `sqrt(fa * fb)`, Coulomb cap)
//! 4. explicit Euler integration
//! 5. positional correction at 80 % with walls at 100 %: at least 8 passes,
//!    more (up to 64) while a contact is still deeper than half the tolerance
//! 6. membrane distance constraints, 8 iterations
//! 7. a last hard wall projection, then speed caps

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::geometry::{point_in_polygon, polygon_segments, wrap_angle, Aabb, Segment, SpatialGrid, Vec2};

/// Full-scale motor duty value.
pub const MOTOR_FULL: i16 = 1023;
pub const CORRECTION_ITERATIONS: usize = 8;
pub const MAX_CORRECTION_ITERATIONS: usize = 64;
/// Overlap still accepted between bodies after a step (mm).
pub const PENETRATION_TOLERANCE: f64 = 0.1;
pub const CORRECTION_FRACTION: f64 = 0.8;
/// Overlap tolerated by positional correction (mm).
pub const CORRECTION_SLOP: f64 = 0.01;
pub const CONSTRAINT_ITERATIONS: usize = 8;

/// Signed motor duties in `[-1023, 1023]`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MotorCommand {
    pub left: i16,
    pub right: i16,
}

/// Differential drive: returns `(linear mm/s, angular rad/s)`.
pub fn motors_to_twist(left: i16, right: i16, max_linear: f64, max_angular: f64) -> (f64, f64) {
    let l = (left as f64 / MOTOR_FULL as f64).clamp(-1.0, 1.0);
    let r = (right as f64 / MOTOR_FULL as f64).clamp(-1.0, 1.0);
    let v = max_linear * (l + r) / 2.0;
    let w = max_angular * (r - l);
    (v.clamp(-max_linear, max_linear), w.clamp(-max_angular, max_angular))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BodyParams {
    pub radius: f64,
    pub density: f64,
    pub friction: f64,
    pub restitution: f64,
    pub linear_damping: f64,
    pub angular_damping: f64,
    /// `Some` for motor-driven bodies.
    pub drive: Option<DriveParams>,
    /// Bodies sharing a group never collide with each other.
    pub group: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveParams {
    pub max_linear_speed: f64,
    pub max_angular_speed: f64,
    pub linear_noise_stddev: f64,
    pub angular_noise_stddev: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Body {
    pub position: Vec2,
    pub angle: f64,
    pub velocity: Vec2,
    pub angular_velocity: f64,
    pub radius: f64,
    pub mass: f64,
    pub inertia: f64,
    pub friction: f64,
    pub restitution: f64,
    pub linear_damping: f64,
    pub angular_damping: f64,
    pub drive: Option<DriveParams>,
    pub group: Option<u32>,
    pub motors: MotorCommand,
}

impl Body {
    pub fn new(position: Vec2, angle: f64, p: &BodyParams) -> Self {
        let mass = p.density * std::f64::consts::PI * p.radius * p.radius;
        Self {
            position,
            angle,
            velocity: Vec2::ZERO,
            angular_velocity: 0.0,
            radius: p.radius,
            mass,
            inertia: 0.5 * mass * p.radius * p.radius,
            friction: p.friction,
            restitution: p.restitution,
            linear_damping: p.linear_damping,
            angular_damping: p.angular_damping,
            drive: p.drive,
            group: p.group,
            motors: MotorCommand::default(),
        }
    }

    fn inv_mass(&self) -> f64 {
        1.0 / self.mass
    }

    fn inv_inertia(&self) -> f64 {
        1.0 / self.inertia
    }
}

/// Static wall polygon. The arena boundary is solid outside; obstacles are
/// solid inside.
#[derive(Debug, Clone)]
pub struct Wall {
    pub vertices: Vec<Vec2>,
    pub segments: Vec<Segment>,
    pub solid_inside: bool,
}

impl Wall {
    pub fn boundary(vertices: Vec<Vec2>) -> Self {
        Self { segments: polygon_segments(&vertices), vertices, solid_inside: false }
    }

    pub fn obstacle(vertices: Vec<Vec2>) -> Self {
        Self { segments: polygon_segments(&vertices), vertices, solid_inside: true }
    }

    /// Pushes a disk out of the solid side. Returns the displacement applied.
    fn project(&self, p: Vec2, r: f64, fraction: f64) -> Vec2 {
        let inside = point_in_polygon(p, &self.vertices);
        let in_solid = inside == self.solid_inside;
        let mut shift = Vec2::ZERO;
        let mut p = p;
        if in_solid {
            // Centre crossed the wall: jump back through the nearest segment.
            let (q, _) = self.nearest(p);
            let Some(n) = (q - p).normalized() else {
                return shift;
            };
            let d = (q - p).length() + r;
            shift += n * d;
            p += n * d;
        }
        for s in &self.segments {
            let q = s.closest_point(p);
            let d = p - q;
            let dist = d.length();
            if dist < r {
                let Some(n) = d.normalized() else { continue };
                let delta = n * ((r - dist) * fraction);
                shift += delta;
                p += delta;
            }
        }
        shift
    }

    fn nearest(&self, p: Vec2) -> (Vec2, f64) {
        self.segments
            .iter()
            .map(|s| {
                let q = s.closest_point(p);
                (q, q.distance(p))
            })
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap_or((p, 0.0))
    }

    /// Overlap depth of a disk with this wall (0 when clear).
    pub fn penetration(&self, p: Vec2, r: f64) -> f64 {
        let inside = point_in_polygon(p, &self.vertices);
        let (_, d) = self.nearest(p);
        if inside == self.solid_inside {
            r + d
        } else {
            (r - d).max(0.0)
        }
    }
}

/// Closed chain of bodies held at a fixed spacing.
#[derive(Debug, Clone)]
pub struct Chain {
    pub links: Vec<usize>,
    pub rest_length: f64,
}

pub struct PhysicsWorld {
    pub bodies: Vec<Body>,
    pub walls: Vec<Wall>,
    pub chains: Vec<Chain>,
    bounds: Aabb,
    grid: SpatialGrid,
    grid_cell: f64,
    pairs: Vec<(usize, usize)>,
    contacts: Vec<(usize, usize)>,
}

impl PhysicsWorld {
    pub fn new(bounds: Aabb) -> Self {
        let bounds = bounds.inflated(1.0);
        Self {
            bodies: Vec::new(),
            walls: Vec::new(),
            chains: Vec::new(),
            grid: SpatialGrid::new(bounds, 1.0),
            grid_cell: 0.0,
            bounds,
            pairs: Vec::new(),
            contacts: Vec::new(),
        }
    }

    pub fn add_body(&mut self, body: Body) -> usize {
        self.bodies.push(body);
        self.bodies.len() - 1
    }

    pub fn add_wall(&mut self, wall: Wall) {
        self.walls.push(wall);
    }

    pub fn add_chain(&mut self, chain: Chain) {
        self.chains.push(chain);
    }

    fn rebuild_contacts(&mut self, margin: f64) {
        let r_max = self.bodies.iter().map(|b| b.radius).fold(0.0, f64::max);
        let needed = 2.0 * r_max + margin;
        if needed > self.grid_cell {
            self.grid_cell = needed.max(2.0 * r_max + 8.0);
            self.grid = SpatialGrid::new(self.bounds, self.grid_cell);
        }
        self.grid.clear();
        for (i, b) in self.bodies.iter().enumerate() {
            self.grid.insert(i, b.position);
        }
        self.grid.candidate_pairs(&mut self.pairs);
        self.pairs.sort_unstable();
        self.contacts.clear();
        for &(i, j) in &self.pairs {
            let (a, b) = (&self.bodies[i], &self.bodies[j]);
            if a.group.is_some() && a.group == b.group {
                continue;
            }
            if a.position.distance(b.position) < a.radius + b.radius + margin {
                self.contacts.push((i, j));
            }
        }
    }

    pub fn step<R: Rng>(&mut self, dt: f64, rng: &mut R) {
        if self.bodies.is_empty() || dt <= 0.0 {
            return;
        }
        // 1-2: targets and damping
        for b in &mut self.bodies {
            if let Some(d) = b.drive {
                let (v, w) = motors_to_twist(b.motors.left, b.motors.right, d.max_linear_speed, d.max_angular_speed);
                let mut v = Vec2::from_angle(b.angle) * v;
                let mut w = w;
                if d.linear_noise_stddev > 0.0 {
                    let n = Normal::new(0.0, d.linear_noise_stddev).expect("finite stddev");
                    v += Vec2::new(n.sample(rng), n.sample(rng));
                }
                if d.angular_noise_stddev > 0.0 {
                    let n = Normal::new(0.0, d.angular_noise_stddev).expect("finite stddev");
                    w += n.sample(rng);
                }
                b.velocity = v;
                b.angular_velocity = w;
            } else {
                b.velocity = b.velocity * (-b.linear_damping * dt).exp();
                b.angular_velocity *= (-b.angular_damping * dt).exp();
            }
        }

        // 3: impulses on current contacts
        self.rebuild_contacts(0.0);
        for k in 0..self.contacts.len() {
            let (i, j) = self.contacts[k];
            self.resolve_impulse(i, j);
        }

        // 4: integrate
        let before: Vec<Vec2> = self.bodies.iter().map(|b| b.position).collect();
        for b in &mut self.bodies {
            b.position += b.velocity * dt;
            b.angle = wrap_angle(b.angle + b.angular_velocity * dt);
        }

        // 5: positional correction
        let max_speed = self
            .bodies
            .iter()
            .map(|b| b.velocity.length())
            .fold(0.0, f64::max);
        self.rebuild_contacts(1.0 + 2.0 * max_speed * dt);
        for pass in 0..MAX_CORRECTION_ITERATIONS {
            let mut deepest = 0.0f64;
            for k in 0..self.contacts.len() {
                let (i, j) = self.contacts[k];
                deepest = deepest.max(self.separate(i, j, CORRECTION_FRACTION));
            }
            self.project_walls(1.0);
            if pass + 1 >= CORRECTION_ITERATIONS && deepest <= 0.5 * PENETRATION_TOLERANCE {
                break;
            }
        }

        // 6: membranes
        if !self.chains.is_empty() {
            for _ in 0..CONSTRAINT_ITERATIONS {
                for c in 0..self.chains.len() {
                    self.enforce_chain(c);
                }
            }
            for chain in &self.chains {
                for &l in &chain.links {
                    let b = &mut self.bodies[l];
                    b.velocity = (b.position - before[l]) / dt;
                }
            }
        }

        // 7: hard walls and speed caps
        self.project_walls(1.0);
        for b in &mut self.bodies {
            if let Some(d) = b.drive {
                let s = b.velocity.length();
                if s > d.max_linear_speed && s > 0.0 {
                    b.velocity = b.velocity * (d.max_linear_speed / s);
                }
                b.angular_velocity = b.angular_velocity.clamp(-d.max_angular_speed, d.max_angular_speed);
            }
        }
    }

    fn resolve_impulse(&mut self, i: usize, j: usize) {
        let (a, b) = (&self.bodies[i], &self.bodies[j]);
        let delta = b.position - a.position;
        let dist = delta.length();
        if dist >= a.radius + b.radius {
            return;
        }
        let Some(n) = delta.normalized() else { return };
        let ra = n * a.radius;
        let rb = n * -b.radius;
        let va = a.velocity + Vec2::new(-a.angular_velocity * ra.y, a.angular_velocity * ra.x);
        let vb = b.velocity + Vec2::new(-b.angular_velocity * rb.y, b.angular_velocity * rb.x);
        let rel = vb - va;
        let vn = rel.dot(n);
        if vn >= 0.0 {
            return;
        }
        let e = a.restitution.max(b.restitution);
        let mu = (a.friction * b.friction).sqrt();
        let jn = -(1.0 + e) * vn / (a.inv_mass() + b.inv_mass());
        let t = n.perp();
        let vt = rel.dot(t);
        let kt = a.inv_mass()
            + b.inv_mass()
            + ra.cross(t).powi(2) * a.inv_inertia()
            + rb.cross(t).powi(2) * b.inv_inertia();
        let jt = (-vt / kt).clamp(-mu * jn, mu * jn);
        let impulse = n * jn + t * jt;
        let (ima, iia, imb, iib) = (a.inv_mass(), a.inv_inertia(), b.inv_mass(), b.inv_inertia());
        let a = &mut self.bodies[i];
        a.velocity -= impulse * ima;
        a.angular_velocity -= ra.cross(impulse) * iia;
        let b = &mut self.bodies[j];
        b.velocity += impulse * imb;
        b.angular_velocity += rb.cross(impulse) * iib;
    }

    /// Returns the overlap found before correcting.
    fn separate(&mut self, i: usize, j: usize, fraction: f64) -> f64 {
        let (a, b) = (&self.bodies[i], &self.bodies[j]);
        let delta = b.position - a.position;
        let dist = delta.length();
        let overlap = a.radius + b.radius - dist;
        if overlap <= CORRECTION_SLOP {
            return overlap.max(0.0);
        }
        // Coincident centres: split along a fixed axis.
        let n = delta.normalized().unwrap_or(Vec2::new(1.0, 0.0));
        let (wa, wb) = (a.inv_mass(), b.inv_mass());
        let push = n * ((overlap - CORRECTION_SLOP) * fraction / (wa + wb));
        self.bodies[i].position -= push * wa;
        self.bodies[j].position += push * wb;
        overlap
    }

    fn project_walls(&mut self, fraction: f64) {
        for b in &mut self.bodies {
            for w in &self.walls {
                let shift = w.project(b.position, b.radius, fraction);
                b.position += shift;
            }
        }
    }

    fn enforce_chain(&mut self, c: usize) {
        let n = self.chains[c].links.len();
        let rest = self.chains[c].rest_length;
        for k in 0..n {
            let i = self.chains[c].links[k];
            let j = self.chains[c].links[(k + 1) % n];
            let (a, b) = (&self.bodies[i], &self.bodies[j]);
            let delta = b.position - a.position;
            let dist = delta.length();
            let Some(dir) = delta.normalized() else { continue };
            let (wa, wb) = (a.inv_mass(), b.inv_mass());
            let corr = dir * ((dist - rest) / (wa + wb));
            self.bodies[i].position += corr * wa;
            self.bodies[j].position -= corr * wb;
        }
    }

    /// Deepest overlap among body pairs (ignoring same-group pairs), mm.
    pub fn max_pair_penetration(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.bodies.len() {
            for j in i + 1..self.bodies.len() {
                let (a, b) = (&self.bodies[i], &self.bodies[j]);
                if a.group.is_some() && a.group == b.group {
                    continue;
                }
                worst = worst.max(a.radius + b.radius - a.position.distance(b.position));
            }
        }
        worst
    }

    /// Deepest overlap between any body and any wall, mm.
    pub fn max_wall_penetration(&self) -> f64 {
        self.bodies
            .iter()
            .flat_map(|b| self.walls.iter().map(move |w| w.penetration(b.position, b.radius)))
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn robot_params() -> BodyParams {
        BodyParams {
            radius: 26.5,
            density: 10.0,
            friction: 0.3,
            restitution: 0.5,
            linear_damping: 0.3,
            angular_damping: 0.3,
            drive: Some(DriveParams {
                max_linear_speed: 100.0,
                max_angular_speed: 2.0,
                linear_noise_stddev: 0.0,
                angular_noise_stddev: 0.0,
            }),
            group: None,
        }
    }

    fn square(half: f64) -> Vec<Vec2> {
        vec![
            Vec2::new(-half, -half),
            Vec2::new(half, -half),
            Vec2::new(half, half),
            Vec2::new(-half, half),
        ]
    }

    #[test]
    fn twist_mapping() {
        assert_eq!(motors_to_twist(1023, 1023, 100.0, 2.0), (100.0, 0.0));
        assert_eq!(motors_to_twist(0, 0, 100.0, 2.0), (0.0, 0.0));
        let (v, w) = motors_to_twist(-1023, 1023, 100.0, 2.0);
        assert_eq!(v, 0.0);
        assert_eq!(w, 2.0);
        let (v, w) = motors_to_twist(512, 512, 100.0, 2.0);
        assert_relative_eq!(v, 100.0 * 512.0 / 1023.0);
        assert_eq!(w, 0.0);
    }

    #[test]
    fn opposite_motors_spin_clockwise_at_cap() {
        assert_eq!(motors_to_twist(1023, -1023, 100.0, 2.0), (0.0, -2.0));
    }

    #[test]
    fn idle_robot_stays_put() {
        let mut world = PhysicsWorld::new(Aabb::from_points(&square(500.0)));
        world.add_body(Body::new(Vec2::new(3.0, 4.0), 0.7, &robot_params()));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..50 {
            world.step(0.01, &mut rng);
        }
        assert_eq!(world.bodies[0].position, Vec2::new(3.0, 4.0));
        assert_eq!(world.bodies[0].angle, 0.7);
    }

    #[test]
    fn restitution_scales_normal_speed() {
        let mut p = robot_params();
        p.drive = None;
        p.linear_damping = 0.0;
        p.angular_damping = 0.0;
        p.friction = 0.0;
        let mut world = PhysicsWorld::new(Aabb::from_points(&square(2000.0)));
        let mut a = Body::new(Vec2::new(-30.0, 0.0), 0.0, &p);
        a.velocity = Vec2::new(50.0, 0.0);
        let mut b = Body::new(Vec2::new(30.0, 0.0), 0.0, &p);
        b.velocity = Vec2::new(-50.0, 0.0);
        world.add_body(a);
        world.add_body(b);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..100 {
            world.step(0.01, &mut rng);
        }
        let rel = world.bodies[1].velocity.x - world.bodies[0].velocity.x;
        assert!((rel - 0.5 * 100.0).abs() <= 0.05 * 50.0, "{rel}");
    }

    #[test]
    fn free_body_energy_never_increases() {
        let mut p = robot_params();
        p.drive = None;
        let mut world = PhysicsWorld::new(Aabb::from_points(&square(5000.0)));
        let mut b = Body::new(Vec2::ZERO, 0.0, &p);
        b.velocity = Vec2::new(30.0, -20.0);
        b.angular_velocity = 1.5;
        world.add_body(b);
        let energy = |w: &PhysicsWorld| {
            let b = &w.bodies[0];
            0.5 * b.mass * b.velocity.length_squared() + 0.5 * b.inertia * b.angular_velocity.powi(2)
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut last = energy(&world);
        for _ in 0..200 {
            world.step(0.01, &mut rng);
            let e = energy(&world);
            assert!(e <= last);
            last = e;
        }
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(24))]
        #[test]
        fn random_commands_stay_finite_and_contained(
            seed in 0u64..1000,
            cmds in proptest::collection::vec((-1023i16..=1023, -1023i16..=1023), 6),
        ) {
            let mut world = PhysicsWorld::new(Aabb::from_points(&square(300.0)));
            world.add_wall(Wall::boundary(square(300.0)));
            let mut p = robot_params();
            if let Some(d) = p.drive.as_mut() {
                d.linear_noise_stddev = 5.0;
                d.angular_noise_stddev = 0.2;
            }
            for (k, (l, r)) in cmds.iter().enumerate() {
                let mut b = Body::new(Vec2::new(-150.0 + 60.0 * k as f64, (k % 2) as f64 * 60.0), k as f64, &p);
                b.motors = MotorCommand { left: *l, right: *r };
                world.add_body(b);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..300 {
                world.step(0.01, &mut rng);
            }
            for b in &world.bodies {
                proptest::prop_assert!(b.position.is_finite() && b.velocity.is_finite());
                proptest::prop_assert!(b.angle.is_finite() && b.angular_velocity.is_finite());
                proptest::prop_assert!(b.velocity.length() <= 100.0 + 1e-9);
            }
            proptest::prop_assert!(world.max_wall_penetration() < 0.1);
        }
    }

    #[test]
    fn straight_drive_covers_expected_distance() {
        let mut world = PhysicsWorld::new(Aabb::from_points(&square(2000.0)));
        let mut b = Body::new(Vec2::ZERO, 0.0, &robot_params());
        b.motors = MotorCommand { left: 1023, right: 1023 };
        world.add_body(b);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..100 {
            world.step(0.01, &mut rng);
        }
        assert_relative_eq!(world.bodies[0].position.x, 100.0, epsilon = 1e-9);
        assert_relative_eq!(world.bodies[0].position.y, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn mass_and_inertia() {
        let b = Body::new(Vec2::ZERO, 0.0, &robot_params());
        let m = 10.0 * std::f64::consts::PI * 26.5 * 26.5;
        assert_relative_eq!(b.mass, m);
        assert_relative_eq!(b.inertia, 0.5 * m * 26.5 * 26.5);
    }

    #[test]
    fn head_on_robots_do_not_interpenetrate() {
        let mut world = PhysicsWorld::new(Aabb::from_points(&square(1000.0)));
        world.add_wall(Wall::boundary(square(1000.0)));
        let mut a = Body::new(Vec2::new(-60.0, 0.0), 0.0, &robot_params());
        a.motors = MotorCommand { left: 1023, right: 1023 };
        let mut b = Body::new(Vec2::new(60.0, 0.0), std::f64::consts::PI, &robot_params());
        b.motors = MotorCommand { left: 1023, right: 1023 };
        world.add_body(a);
        world.add_body(b);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..300 {
            world.step(0.01, &mut rng);
            assert!(world.max_pair_penetration() < 0.1);
        }
    }

    #[test]
    fn wall_contains_robot() {
        let mut world = PhysicsWorld::new(Aabb::from_points(&square(200.0)));
        world.add_wall(Wall::boundary(square(200.0)));
        let mut a = Body::new(Vec2::ZERO, 0.3, &robot_params());
        a.motors = MotorCommand { left: 1023, right: 1023 };
        world.add_body(a);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..1000 {
            world.step(0.01, &mut rng);
            assert!(world.max_wall_penetration() < 0.1);
        }
        let p = world.bodies[0].position;
        assert!(p.x.abs() <= 200.0 - 26.5 + 1e-6 && p.y.abs() <= 200.0 - 26.5 + 1e-6);
    }

    #[test]
    fn obstacle_repels() {
        let mut world = PhysicsWorld::new(Aabb::from_points(&square(500.0)));
        world.add_wall(Wall::boundary(square(500.0)));
        world.add_wall(Wall::obstacle(square(50.0)));
        let mut a = Body::new(Vec2::new(-200.0, 0.0), 0.0, &robot_params());
        a.motors = MotorCommand { left: 1023, right: 1023 };
        world.add_body(a);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..500 {
            world.step(0.01, &mut rng);
        }
        assert!(world.max_wall_penetration() < 0.1);
        assert!(world.bodies[0].position.x <= -50.0 - 26.5 + 0.1);
    }

    #[test]
    fn passive_body_is_damped() {
        let mut p = robot_params();
        p.drive = None;
        let mut world = PhysicsWorld::new(Aabb::from_points(&square(5000.0)));
        let mut b = Body::new(Vec2::ZERO, 0.0, &p);
        b.velocity = Vec2::new(10.0, 0.0);
        world.add_body(b);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..100 {
            world.step(0.01, &mut rng);
        }
        assert_relative_eq!(world.bodies[0].velocity.x, 10.0 * (-0.3f64).exp(), epsilon = 1e-9);
    }

    #[test]
    fn pushed_passive_object_moves() {
        let mut p = robot_params();
        p.drive = None;
        let mut world = PhysicsWorld::new(Aabb::from_points(&square(2000.0)));
        let mut r = Body::new(Vec2::new(-60.0, 0.0), 0.0, &robot_params());
        r.motors = MotorCommand { left: 1023, right: 1023 };
        world.add_body(r);
        world.add_body(Body::new(Vec2::new(0.0, 0.0), 0.0, &p));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..200 {
            world.step(0.01, &mut rng);
        }
        assert!(world.bodies[1].position.x > 50.0);
        assert!(world.max_pair_penetration() < 0.1);
    }

    #[test]
    fn chain_keeps_spacing() {
        let mut world = PhysicsWorld::new(Aabb::from_points(&square(1000.0)));
        let mut p = robot_params();
        p.drive = None;
        p.radius = 5.0;
        p.group = Some(0);
        let n = 12;
        let ring = 40.0;
        let links: Vec<usize> = (0..n)
            .map(|i| {
                let pos = Vec2::from_angle(2.0 * std::f64::consts::PI * i as f64 / n as f64) * ring;
                let mut b = Body::new(pos, 0.0, &p);
                b.velocity = Vec2::new(20.0 * (i as f64).sin(), 5.0);
                world.add_body(b)
            })
            .collect();
        let rest = 2.0 * ring * (std::f64::consts::PI / n as f64).sin();
        world.add_chain(Chain { links: links.clone(), rest_length: rest });
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..100 {
            world.step(0.01, &mut rng);
        }
        for k in 0..n {
            let d = world.bodies[links[k]].position.distance(world.bodies[links[(k + 1) % n]].position);
            assert!((d - rest).abs() < 0.5, "{d} vs {rest}");
        }
    }
}
