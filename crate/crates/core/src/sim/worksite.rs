//! Worksite state: heightfield, blueprint, robots and the soil model.
//!
//! Coordinates are `(x, y)` with `x` growing east and `y` growing south.
//! A robot's anchor is the north-west cell of its 2x2 footprint. Cells around
//! a robot are addressed in its own frame by `(ahead, lateral)`: `ahead = -1`
//! is the rear row, `0` the front row (front wheels), `1` the blade row and
//! `2` the row beyond it; `lateral = 0` is left, `1` right.

use super::blueprint::{Blueprint, CellSpec};
use crate::error::{Error, Result};
use crate::sensors::{BladeState, Compass, Relief, SensorFrame, ZoneReading};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Soil a robot can push without throttling up.
pub const BASE_PUSH_CAPACITY: i64 = 12;
/// Soil a robot can push in high-power mode; also full scale of the load sensor.
pub const MAX_PUSH_CAPACITY: i64 = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Heading {
    North,
    East,
    South,
    West,
}

impl Heading {
    pub const ALL: [Heading; 4] = [Heading::North, Heading::East, Heading::South, Heading::West];

    pub fn forward(self) -> (i32, i32) {
        match self {
            Heading::North => (0, -1),
            Heading::East => (1, 0),
            Heading::South => (0, 1),
            Heading::West => (-1, 0),
        }
    }

    /// Unit vector pointing to the robot's right.
    pub fn right(self) -> (i32, i32) {
        self.turned_right().forward()
    }

    pub fn turned_right(self) -> Heading {
        match self {
            Heading::North => Heading::East,
            Heading::East => Heading::South,
            Heading::South => Heading::West,
            Heading::West => Heading::North,
        }
    }

    pub fn turned_left(self) -> Heading {
        match self {
            Heading::North => Heading::West,
            Heading::West => Heading::South,
            Heading::South => Heading::East,
            Heading::East => Heading::North,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RobotState {
    pub x: i32,
    pub y: i32,
    pub heading: Heading,
    pub blade: BladeState,
    pub memory: bool,
    /// A move was rejected during the robot's last timestep.
    pub stuck: bool,
    /// High-power mode was selected this timestep.
    pub throttle: bool,
    /// Soil volume ahead of the blade after the robot's last timestep.
    pub load: i64,
}

impl RobotState {
    pub fn new(x: i32, y: i32, heading: Heading) -> Self {
        RobotState {
            x,
            y,
            heading,
            blade: BladeState::Home,
            memory: false,
            stuck: false,
            throttle: false,
            load: 0,
        }
    }

    /// Cell at `(ahead, lateral)` in the robot's frame.
    pub fn frame_cell(&self, ahead: i32, lateral: i32) -> (i32, i32) {
        let (fx, fy) = self.heading.forward();
        let (rx, ry) = self.heading.right();
        let (x0, y0) = match self.heading {
            Heading::North => (self.x, self.y),
            Heading::East => (self.x + 1, self.y),
            Heading::South => (self.x + 1, self.y + 1),
            Heading::West => (self.x, self.y + 1),
        };
        (x0 + ahead * fx + lateral * rx, y0 + ahead * fy + lateral * ry)
    }

    pub fn footprint(&self) -> [(i32, i32); 4] {
        [
            (self.x, self.y),
            (self.x + 1, self.y),
            (self.x, self.y + 1),
            (self.x + 1, self.y + 1),
        ]
    }

    pub fn covers(&self, (cx, cy): (i32, i32)) -> bool {
        (self.x..=self.x + 1).contains(&cx) && (self.y..=self.y + 1).contains(&cy)
    }
}

/// Chebyshev gap between two footprints (1 when they share an edge or corner).
pub fn footprint_distance(a: &RobotState, b: &RobotState) -> u32 {
    let gap = |d: i32| d.unsigned_abs().saturating_sub(1);
    gap(a.x - b.x).max(gap(a.y - b.y))
}

fn footprints_overlap(ax: i32, ay: i32, b: &RobotState) -> bool {
    (ax - b.x).abs() <= 1 && (ay - b.y).abs() <= 1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlockReason {
    Boundary,
    Robot,
    Overload,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MoveOutcome {
    Moved,
    Blocked(BlockReason),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Worksite {
    width: usize,
    height: usize,
    heights: Vec<i64>,
    blueprint: Blueprint,
    /// Cell length and width in length units.
    cell_dims: (i64, i64),
    robots: Vec<RobotState>,
    timestep: u64,
}

impl Worksite {
    /// Flat terrain under `blueprint` with the given robots.
    pub fn new(blueprint: Blueprint, robots: Vec<RobotState>) -> Result<Worksite> {
        let width = blueprint.width();
        let height = blueprint.height();
        let site = Worksite {
            width,
            height,
            heights: vec![0; width * height],
            blueprint,
            cell_dims: (1, 1),
            robots: Vec::new(),
            timestep: 0,
        };
        let mut site = site;
        for r in robots {
            if !site.footprint_in_bounds(r.x, r.y) {
                return Err(Error::Scenario(format!("robot at ({}, {}) out of bounds", r.x, r.y)));
            }
            if site.robots.iter().any(|o| footprints_overlap(r.x, r.y, o)) {
                return Err(Error::Scenario(format!("robot at ({}, {}) overlaps another", r.x, r.y)));
            }
            site.robots.push(r);
        }
        Ok(site)
    }

    /// Generated excavation scenario with robots at random non-overlapping poses.
    pub fn generate<R: Rng + ?Sized>(
        area_w: usize,
        area_h: usize,
        depth: u8,
        n_robots: usize,
        rng: &mut R,
    ) -> Result<Worksite> {
        Self::with_random_robots(Blueprint::excavation(area_w, area_h, depth)?, n_robots, rng)
    }

    /// Flat terrain under `blueprint` with robots placed uniformly at random.
    pub fn with_random_robots<R: Rng + ?Sized>(
        blueprint: Blueprint,
        n_robots: usize,
        rng: &mut R,
    ) -> Result<Worksite> {
        let mut site = Worksite::new(blueprint, Vec::new())?;
        let mut free = Vec::new();
        for placed in 0..n_robots {
            free.clear();
            for y in 0..site.height as i32 - 1 {
                for x in 0..site.width as i32 - 1 {
                    if !site.robots.iter().any(|o| footprints_overlap(x, y, o)) {
                        free.push((x, y));
                    }
                }
            }
            if free.is_empty() {
                return Err(Error::Scenario(format!(
                    "no room for robot {} of {n_robots} on a {}x{} site",
                    placed + 1,
                    site.width,
                    site.height
                )));
            }
            let (x, y) = free[rng.gen_range(0..free.len())];
            let heading = Heading::ALL[rng.gen_range(0..4)];
            site.robots.push(RobotState::new(x, y, heading));
        }
        Ok(site)
    }

    pub fn with_cell_dims(mut self, lx: i64, ly: i64) -> Self {
        self.cell_dims = (lx.max(1), ly.max(1));
        self
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn blueprint(&self) -> &Blueprint {
        &self.blueprint
    }

    pub fn heights(&self) -> &[i64] {
        &self.heights
    }

    pub fn robots(&self) -> &[RobotState] {
        &self.robots
    }

    pub fn robots_mut(&mut self) -> &mut [RobotState] {
        &mut self.robots
    }

    pub fn timestep(&self) -> u64 {
        self.timestep
    }

    pub(crate) fn advance_clock(&mut self) {
        self.timestep += 1;
    }

    pub fn cell_area(&self) -> i64 {
        self.cell_dims.0 * self.cell_dims.1
    }

    pub fn in_bounds(&self, (x, y): (i32, i32)) -> bool {
        x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height
    }

    fn footprint_in_bounds(&self, x: i32, y: i32) -> bool {
        self.in_bounds((x, y)) && self.in_bounds((x + 1, y + 1))
    }

    fn idx(&self, (x, y): (i32, i32)) -> usize {
        y as usize * self.width + x as usize
    }

    /// Soil height at an in-bounds cell.
    pub fn height_at(&self, cell: (i32, i32)) -> i64 {
        self.heights[self.idx(cell)]
    }

    pub fn set_height(&mut self, cell: (i32, i32), h: i64) {
        let i = self.idx(cell);
        self.heights[i] = h;
    }

    pub fn spec_at(&self, (x, y): (i32, i32)) -> CellSpec {
        self.blueprint.get(x as usize, y as usize)
    }

    /// Total soil volume `sum(h) * lx * ly`.
    pub fn soil_volume(&self) -> i64 {
        self.heights.iter().sum::<i64>() * self.cell_area()
    }

    /// Blueprint agreement in `(0, 1]`: mean of `exp(-2 |g - z|)` over target
    /// cells, where `z = -h` is the current depth.
    pub fn fitness(&self) -> f64 {
        let mut sum = 0.0;
        let mut count = 0usize;
        for (spec, &h) in self.blueprint.cells().iter().zip(&self.heights) {
            if let CellSpec::Target(g) = spec {
                let err = (i64::from(*g) + h).unsigned_abs() as f64;
                sum += (-2.0 * err).exp();
                count += 1;
            }
        }
        assert!(count > 0, "blueprint has no target cells");
        sum / count as f64
    }

    fn other_robot_covers(&self, me: usize, cell: (i32, i32)) -> bool {
        self.robots
            .iter()
            .enumerate()
            .any(|(k, r)| k != me && r.covers(cell))
    }

    /// Soil volume ahead of the blade at its current setting.
    pub fn blade_volume(&self, robot: usize) -> i64 {
        let r = &self.robots[robot];
        let Some(bh) = r.blade.offset() else { return 0 };
        let mut v = 0;
        for lat in 0..2 {
            let blade = r.frame_cell(1, lat);
            let wheel = r.frame_cell(0, lat);
            if !self.in_bounds(blade) {
                continue;
            }
            v += (self.height_at(blade) - self.height_at(wheel) - bh).max(0);
        }
        v * self.cell_area()
    }

    pub fn push_capacity(&self, robot: usize) -> i64 {
        if self.robots[robot].throttle {
            MAX_PUSH_CAPACITY
        } else {
            BASE_PUSH_CAPACITY
        }
    }

    /// Moves a robot one cell forward, pushing soil with the blade if engaged.
    ///
    /// For each blade cell the soil above the cut level `z_w + b_h * eps` is
    /// carried onto the next cell, leaving the vacated cell at the cut level.
    /// `z_w` is the front-wheel height and `eps` is zero only when the blade has
    /// nothing ahead of it and is not below the wheels.
    pub fn move_forward(&mut self, robot: usize) -> MoveOutcome {
        let r = self.robots[robot];
        let (fx, fy) = r.heading.forward();
        let (nx, ny) = (r.x + fx, r.y + fy);
        if !self.footprint_in_bounds(nx, ny) {
            return MoveOutcome::Blocked(BlockReason::Boundary);
        }
        if self
            .robots
            .iter()
            .enumerate()
            .any(|(k, o)| k != robot && footprints_overlap(nx, ny, o))
        {
            return MoveOutcome::Blocked(BlockReason::Robot);
        }
        if let Some(bh) = r.blade.offset() {
            let dest = [r.frame_cell(2, 0), r.frame_cell(2, 1)];
            if dest.iter().any(|&c| !self.in_bounds(c)) {
                return MoveOutcome::Blocked(BlockReason::Boundary);
            }
            if dest.iter().any(|&c| self.other_robot_covers(robot, c)) {
                return MoveOutcome::Blocked(BlockReason::Robot);
            }
            let volume = self.blade_volume(robot);
            if volume > self.push_capacity(robot) {
                return MoveOutcome::Blocked(BlockReason::Overload);
            }
            let eps = if volume == 0 && bh >= 0 { 0 } else { 1 };
            for lat in 0..2 {
                let old = r.frame_cell(1, lat);
                let wheel = self.height_at(r.frame_cell(0, lat));
                let cut = wheel + bh * eps;
                // The blade only carries soil forward; a cell already below the
                // cut level is passed over unchanged.
                let carried = (self.height_at(old) - cut).max(0);
                let d = self.idx(dest[lat as usize]);
                self.heights[d] += carried;
                self.set_height(old, self.height_at(old) - carried);
            }
        }
        let rm = &mut self.robots[robot];
        rm.x = nx;
        rm.y = ny;
        MoveOutcome::Moved
    }

    /// Moves a robot one cell backward; the blade leaves soil where it is.
    pub fn move_backward(&mut self, robot: usize) -> MoveOutcome {
        let r = self.robots[robot];
        let (fx, fy) = r.heading.forward();
        let (nx, ny) = (r.x - fx, r.y - fy);
        if !self.footprint_in_bounds(nx, ny) {
            return MoveOutcome::Blocked(BlockReason::Boundary);
        }
        if self
            .robots
            .iter()
            .enumerate()
            .any(|(k, o)| k != robot && footprints_overlap(nx, ny, o))
        {
            return MoveOutcome::Blocked(BlockReason::Robot);
        }
        let rm = &mut self.robots[robot];
        rm.x = nx;
        rm.y = ny;
        MoveOutcome::Moved
    }

    fn zone_reading(&self, cell: (i32, i32)) -> ZoneReading {
        if !self.in_bounds(cell) {
            return ZoneReading::DontCare;
        }
        match self.spec_at(cell) {
            CellSpec::Dump => ZoneReading::Dump,
            CellSpec::DontCare => ZoneReading::DontCare,
            CellSpec::Target(g) => {
                let depth = -self.height_at(cell);
                match depth.cmp(&i64::from(g)) {
                    std::cmp::Ordering::Equal => ZoneReading::Level,
                    std::cmp::Ordering::Less => ZoneReading::Above,
                    std::cmp::Ordering::Greater => ZoneReading::Below,
                }
            }
        }
    }

    /// Nearest other robot: (footprint gap, compass direction).
    fn nearest_robot(&self, robot: usize) -> Option<(u32, Compass)> {
        let me = &self.robots[robot];
        let mut best: Option<(u32, u8)> = None;
        for (k, other) in self.robots.iter().enumerate() {
            if k == robot {
                continue;
            }
            let dist = footprint_distance(me, other);
            let rank = compass_rank(other.x - me.x, other.y - me.y);
            best = match best {
                Some((d, r)) if d < dist || (d == dist && r <= rank) => Some((d, r)),
                _ => Some((dist, rank)),
            };
        }
        best.map(|(d, r)| (d, RANKED_COMPASS[r as usize]))
    }

    /// Discretized sensor readings of one robot.
    pub fn sense(&self, robot: usize) -> SensorFrame {
        let r = &self.robots[robot];
        let zones = [
            self.zone_reading(r.frame_cell(2, 0)),
            self.zone_reading(r.frame_cell(1, 0)),
            self.zone_reading(r.frame_cell(1, 1)),
            self.zone_reading(r.frame_cell(2, 1)),
        ];
        let relief = [0, 1].map(|lat| {
            let beyond = r.frame_cell(2, lat);
            if !self.in_bounds(beyond) {
                return Relief::Level;
            }
            let wheel = self.height_at(r.frame_cell(0, lat));
            match self.height_at(beyond).cmp(&wheel) {
                std::cmp::Ordering::Greater => Relief::Above,
                std::cmp::Ordering::Less => Relief::Below,
                std::cmp::Ordering::Equal => Relief::Level,
            }
        });
        let volume = self.blade_volume(robot);
        let load = ((4 * volume + MAX_PUSH_CAPACITY / 2) / MAX_PUSH_CAPACITY).clamp(0, 4) as u8;
        let obstacle = [0, 1].iter().any(|&lat| {
            let c = r.frame_cell(1, lat);
            !self.in_bounds(c) || self.other_robot_covers(robot, c)
        });
        let (distance, nearest) = match self.nearest_robot(robot) {
            Some((gap, dir)) => (gap.saturating_sub(1).min(3) as u8, dir),
            None => (3, Compass::North),
        };
        let tilted = (0..2).any(|lat| {
            self.height_at(r.frame_cell(-1, lat)) - self.height_at(r.frame_cell(0, lat)) >= 1
        });
        SensorFrame {
            zones,
            relief,
            blade: r.blade,
            load,
            obstacle,
            distance,
            nearest,
            tilted,
            stuck: r.stuck,
            memory: r.memory,
        }
    }
}

/// Directions by tie-break priority: N > E > S > W.
const RANKED_COMPASS: [Compass; 4] = [Compass::North, Compass::East, Compass::South, Compass::West];

/// Priority rank of the dominant direction of `(dx, dy)`; ties favour the higher priority.
fn compass_rank(dx: i32, dy: i32) -> u8 {
    let vertical = if dy < 0 { 0 } else { 2 };
    let horizontal = if dx > 0 { 1 } else { 3 };
    match dx.abs().cmp(&dy.abs()) {
        std::cmp::Ordering::Less => vertical,
        std::cmp::Ordering::Greater => horizontal,
        std::cmp::Ordering::Equal if dx == 0 => 0,
        std::cmp::Ordering::Equal => vertical.min(horizontal),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn site(robots: Vec<RobotState>) -> Worksite {
        Worksite::new(Blueprint::excavation(8, 8, 1).unwrap(), robots).unwrap()
    }

    #[test]
    fn frame_cells_follow_heading() {
        let r = RobotState::new(5, 5, Heading::North);
        assert_eq!(r.frame_cell(1, 0), (5, 4));
        assert_eq!(r.frame_cell(1, 1), (6, 4));
        assert_eq!(r.frame_cell(-1, 0), (5, 6));
        let r = RobotState::new(5, 5, Heading::East);
        assert_eq!(r.frame_cell(1, 0), (7, 5));
        assert_eq!(r.frame_cell(1, 1), (7, 6));
        let r = RobotState::new(5, 5, Heading::South);
        assert_eq!(r.frame_cell(1, 0), (6, 7));
        assert_eq!(r.frame_cell(1, 1), (5, 7));
        let r = RobotState::new(5, 5, Heading::West);
        assert_eq!(r.frame_cell(1, 0), (4, 6));
        assert_eq!(r.frame_cell(1, 1), (4, 5));
        for h in Heading::ALL {
            let r = RobotState::new(5, 5, h);
            for lat in 0..2 {
                assert!(r.covers(r.frame_cell(0, lat)));
                assert!(r.covers(r.frame_cell(-1, lat)));
                assert!(!r.covers(r.frame_cell(1, lat)));
            }
        }
    }

    #[test]
    fn fitness_examples() {
        let mut s = site(vec![]);
        assert!((s.fitness() - (-2.0f64).exp()).abs() < 1e-15);
        for y in 3..11 {
            for x in 3..11 {
                s.set_height((x, y), -1);
            }
        }
        assert_eq!(s.fitness(), 1.0);
        let zero = Worksite::new(Blueprint::excavation(8, 8, 0).unwrap(), vec![]).unwrap();
        assert_eq!(zero.fitness(), 1.0);
    }

    #[test]
    fn blade_volume_hand_evaluation() {
        let mut s = site(vec![RobotState::new(5, 6, Heading::North)]);
        s.robots_mut()[0].blade = BladeState::Below;
        s.set_height((5, 5), 2);
        s.set_height((6, 5), 2);
        s.set_height((5, 6), 1);
        s.set_height((6, 6), 1);
        assert_eq!(s.blade_volume(0), 4);
    }

    #[test]
    fn idle_level_blade_changes_nothing() {
        let mut s = site(vec![RobotState::new(5, 6, Heading::North)]);
        s.robots_mut()[0].blade = BladeState::Level;
        let before = s.heights().to_vec();
        assert_eq!(s.move_forward(0), MoveOutcome::Moved);
        assert_eq!(s.heights(), &before[..]);
    }

    #[test]
    fn incision_then_level_cut() {
        let mut s = site(vec![RobotState::new(5, 8, Heading::North)]);
        s.robots_mut()[0].blade = BladeState::Below;
        assert_eq!(s.move_forward(0), MoveOutcome::Moved);
        // Blade row cut one unit below the wheels, soil carried one cell on.
        assert_eq!(s.height_at((5, 7)), -1);
        assert_eq!(s.height_at((5, 6)), 1);
        s.robots_mut()[0].blade = BladeState::Level;
        assert_eq!(s.move_forward(0), MoveOutcome::Moved);
        assert_eq!(s.height_at((5, 6)), -1);
        assert_eq!(s.height_at((5, 5)), 2);
        assert_eq!(s.soil_volume(), 0);
    }

    #[test]
    fn overload_rejects_move() {
        let mut s = site(vec![RobotState::new(5, 8, Heading::North)]);
        s.robots_mut()[0].blade = BladeState::Level;
        s.set_height((5, 7), 7);
        s.set_height((6, 7), 7);
        assert_eq!(s.move_forward(0), MoveOutcome::Blocked(BlockReason::Overload));
        s.robots_mut()[0].throttle = true;
        assert_eq!(s.move_forward(0), MoveOutcome::Moved);
    }

    #[test]
    fn boundary_blocks() {
        let mut s = site(vec![RobotState::new(0, 0, Heading::North)]);
        assert_eq!(s.move_forward(0), MoveOutcome::Blocked(BlockReason::Boundary));
        assert_eq!(s.robots()[0].x, 0);
    }

    #[test]
    fn lone_robot_on_flat_target_cells() {
        let s = site(vec![RobotState::new(5, 7, Heading::North)]);
        let f = s.sense(0);
        assert_eq!(f.zones, [ZoneReading::Above; 4]);
        assert_eq!(f.relief, [Relief::Level; 2]);
        assert!(!f.obstacle);
        assert_eq!(f.load, 0);
        assert_eq!(f.distance, 3);
    }

    #[test]
    fn dump_cells_read_as_dump() {
        let mut s = site(vec![RobotState::new(5, 3, Heading::North)]);
        s.set_height((5, 2), -5);
        let f = s.sense(0);
        assert_eq!(f.zones[1], ZoneReading::Dump);
        assert_eq!(f.zones[2], ZoneReading::Dump);
    }

    #[test]
    fn adjacent_robots_see_each_other() {
        let s = site(vec![
            RobotState::new(5, 7, Heading::North),
            RobotState::new(5, 5, Heading::South),
        ]);
        let f = s.sense(0);
        assert_eq!(f.distance, 0);
        assert!(f.obstacle);
        assert_eq!(f.nearest, Compass::North);
        assert_eq!(s.sense(1).nearest, Compass::South);
    }

    #[test]
    fn compass_ties_prefer_north_then_east() {
        assert_eq!(compass_rank(2, -2), 0);
        assert_eq!(compass_rank(2, 2), 1);
        assert_eq!(compass_rank(-2, 2), 2);
        assert_eq!(compass_rank(-3, 1), 3);
    }

    #[test]
    fn random_placement_is_reproducible() {
        let a = Worksite::generate(8, 8, 1, 4, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        let b = Worksite::generate(8, 8, 1, 4, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        assert_eq!(a.robots(), b.robots());
        for (i, r) in a.robots().iter().enumerate() {
            for o in &a.robots()[i + 1..] {
                assert!(footprint_distance(r, o) >= 1);
            }
        }
    }

    #[test]
    fn crowded_site_is_a_scenario_error() {
        let bp = Blueprint::new(2, 2, vec![CellSpec::Target(1); 4]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(Worksite::with_random_robots(bp.clone(), 1, &mut rng).is_ok());
        assert!(matches!(
            Worksite::with_random_robots(bp, 2, &mut rng),
            Err(Error::Scenario(_))
        ));
    }
}
