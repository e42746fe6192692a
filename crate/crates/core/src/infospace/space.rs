use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid_arg, Error, Result};
use crate::gaitsim::rng;

pub type UserId = String;
pub type DropId = u64;
/// World coordinates (m); `z` is up.
pub type Vec3 = [f64; 3];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Visibility {
    Public,
    Private {
        owner: UserId,
        #[serde(default)]
        shared_with: BTreeSet<UserId>,
    },
}

impl Visibility {
    pub fn private(owner: impl Into<UserId>) -> Self {
        Visibility::Private { owner: owner.into(), shared_with: BTreeSet::new() }
    }

    pub fn allows(&self, user: &str) -> bool {
        match self {
            Visibility::Public => true,
            Visibility::Private { owner, shared_with } => owner == user || shared_with.contains(user),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DropState {
    Falling { speed: f64 },
    Held { by: UserId },
    Pinned,
    Expanded { pinned: bool },
    Discarded,
    Expired,
}

impl DropState {
    pub fn is_terminal(&self) -> bool {
        matches!(self, DropState::Discarded | DropState::Expired)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Drop {
    pub id: DropId,
    pub content_ref: String,
    pub owner: Option<UserId>,
    pub visibility: Visibility,
    pub position: Vec3,
    pub state: DropState,
    pub spawned_at: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct User {
    pub head: Vec3,
    /// Viewing direction; only its horizontal part matters for placement.
    pub gaze: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpaceConfig {
    pub ground_height: f64,
    pub cloud_height: f64,
    pub fall_speed: f64,
    /// Minimum horizontal distance of a new drop from any head-to-head line (m).
    pub sight_clearance: f64,
    /// Minimum angle between a user's gaze and a new drop's bearing (deg).
    pub peripheral_angle: f64,
    /// New drops appear within this horizontal radius of the users' centroid (m).
    pub spawn_radius: f64,
    pub max_spawn_attempts: usize,
}

impl Default for SpaceConfig {
    fn default() -> Self {
        Self {
            ground_height: 0.0,
            cloud_height: 2.2,
            fall_speed: 0.05,
            sight_clearance: 0.5,
            peripheral_angle: 25.0,
            spawn_radius: 2.0,
            max_spawn_attempts: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "to", content = "user", rename_all = "snake_case")]
pub enum ShareTarget {
    User(UserId),
    Public,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Gesture {
    Grab { drop: DropId },
    Move { drop: DropId, pos: Vec3 },
    /// Releasing a held drop pins it where it is.
    Release { drop: DropId },
    /// Throwing discards the drop.
    Throw { drop: DropId },
    Show { drop: DropId },
    Close { drop: DropId },
    Share { drop: DropId, target: ShareTarget },
}

impl Gesture {
    pub fn drop_id(&self) -> DropId {
        match self {
            Gesture::Grab { drop }
            | Gesture::Move { drop, .. }
            | Gesture::Release { drop }
            | Gesture::Throw { drop }
            | Gesture::Show { drop }
            | Gesture::Close { drop }
            | Gesture::Share { drop, .. } => *drop,
        }
    }
}

/// State deltas. Every mutation of a [`Space`] is expressed as events, so
/// replaying the log onto a fresh space reproduces it exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Event {
    UserJoined { user: UserId, head: Vec3, gaze: Vec3 },
    UserMoved { user: UserId, head: Vec3, gaze: Vec3 },
    UserLeft { user: UserId },
    DropSpawned { drop: Drop },
    DropMoved { id: DropId, position: Vec3 },
    StateChanged { id: DropId, state: DropState },
    VisibilityChanged { id: DropId, visibility: Visibility },
    TimeAdvanced { time: f64 },
}

impl Event {
    pub fn drop_id(&self) -> Option<DropId> {
        match self {
            Event::DropSpawned { drop } => Some(drop.id),
            Event::DropMoved { id, .. }
            | Event::StateChanged { id, .. }
            | Event::VisibilityChanged { id, .. } => Some(*id),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VisTag {
    Private,
    Shared,
    Public,
}

/// A drop as one user sees it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DropView {
    pub id: DropId,
    pub content: String,
    pub vis: VisTag,
    pub pos: Vec3,
    pub state: DropState,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Space {
    pub config: SpaceConfig,
    pub drops: BTreeMap<DropId, Drop>,
    pub users: BTreeMap<UserId, User>,
    pub time: f64,
    pub next_id: DropId,
}

fn finite3(v: &Vec3) -> bool {
    v.iter().all(|c| c.is_finite())
}

/// Horizontal distance from `p` to the segment `a`–`b`.
fn dist_to_segment(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let u = if len2 > 0.0 {
        (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (p[0] - a[0] - u * dx).hypot(p[1] - a[1] - u * dy)
}

/// Angle in degrees between the horizontal gaze of `user` and the
/// horizontal bearing from the head to `p`.
pub fn bearing_offset(user: &User, p: [f64; 2]) -> f64 {
    let (bx, by) = (p[0] - user.head[0], p[1] - user.head[1]);
    let (gx, gy) = (user.gaze[0], user.gaze[1]);
    let (nb, ng) = (bx.hypot(by), gx.hypot(gy));
    if nb == 0.0 {
        return 0.0;
    }
    if ng == 0.0 {
        // no horizontal gaze: looking straight up or down, everything is peripheral
        return 90.0;
    }
    ((bx * gx + by * gy) / (nb * ng)).clamp(-1.0, 1.0).acos().to_degrees()
}

impl Space {
    pub fn new(config: SpaceConfig) -> Result<Self> {
        if !(config.cloud_height > config.ground_height
            && config.fall_speed > 0.0
            && config.fall_speed.is_finite()
            && config.spawn_radius > 0.0
            && config.sight_clearance >= 0.0
            && (0.0..180.0).contains(&config.peripheral_angle)
            && config.max_spawn_attempts > 0)
        {
            return Err(invalid_arg("inconsistent space configuration"));
        }
        Ok(Self {
            config,
            drops: BTreeMap::new(),
            users: BTreeMap::new(),
            time: 0.0,
            next_id: 1,
        })
    }

    /// Applies one event. Used both for live updates and for replay.
    pub fn apply(&mut self, event: &Event) {
        match event {
            Event::UserJoined { user, head, gaze } | Event::UserMoved { user, head, gaze } => {
                self.users.insert(user.clone(), User { head: *head, gaze: *gaze });
            }
            Event::UserLeft { user } => {
                self.users.remove(user);
            }
            Event::DropSpawned { drop } => {
                self.next_id = self.next_id.max(drop.id + 1);
                self.drops.insert(drop.id, drop.clone());
            }
            Event::DropMoved { id, position } => {
                if let Some(d) = self.drops.get_mut(id) {
                    d.position = *position;
                }
            }
            Event::StateChanged { id, state } => {
                if let Some(d) = self.drops.get_mut(id) {
                    d.state = state.clone();
                }
            }
            Event::VisibilityChanged { id, visibility } => {
                if let Some(d) = self.drops.get_mut(id) {
                    d.visibility = visibility.clone();
                }
            }
            Event::TimeAdvanced { time } => self.time = *time,
        }
    }

    fn commit(&mut self, events: Vec<Event>) -> Vec<Event> {
        for e in &events {
            self.apply(e);
        }
        events
    }

    /// Rebuilds a space from its event log.
    pub fn replay(config: SpaceConfig, events: &[Event]) -> Result<Self> {
        let mut space = Space::new(config)?;
        for e in events {
            space.apply(e);
        }
        Ok(space)
    }

    /// Registers a user, or updates the pose of a known one.
    pub fn set_pose(&mut self, user: &str, head: Vec3, gaze: Vec3) -> Result<Vec<Event>> {
        if user.is_empty() || !finite3(&head) || !finite3(&gaze) {
            return Err(invalid_arg("user pose needs a name and finite vectors"));
        }
        let (user, head, gaze) = (user.to_string(), head, gaze);
        let event = if self.users.contains_key(&user) {
            Event::UserMoved { user, head, gaze }
        } else {
            Event::UserJoined { user, head, gaze }
        };
        Ok(self.commit(vec![event]))
    }

    pub fn remove_user(&mut self, user: &str) -> Vec<Event> {
        if !self.users.contains_key(user) {
            return Vec::new();
        }
        // drops the user was holding are pinned where they are
        let mut events: Vec<Event> = self
            .drops
            .values()
            .filter(|d| matches!(&d.state, DropState::Held { by } if by == user))
            .map(|d| Event::StateChanged { id: d.id, state: DropState::Pinned })
            .collect();
        events.push(Event::UserLeft { user: user.to_string() });
        self.commit(events)
    }

    fn placement_ok(&self, p: [f64; 2]) -> bool {
        let users: Vec<&User> = self.users.values().collect();
        let peripheral = users
            .iter()
            .all(|u| bearing_offset(u, p) >= self.config.peripheral_angle);
        let clear = users.iter().enumerate().all(|(i, a)| {
            users[i + 1..].iter().all(|b| {
                dist_to_segment(p, [a.head[0], a.head[1]], [b.head[0], b.head[1]])
                    >= self.config.sight_clearance
            })
        });
        peripheral && clear
    }

    /// Places a new falling drop at cloud height outside every user's
    /// central view and away from the lines of sight between users.
    pub fn spawn(
        &mut self,
        content_ref: &str,
        owner: Option<&str>,
        visibility: Visibility,
        seed: u64,
    ) -> Result<(DropId, Vec<Event>)> {
        if self.users.is_empty() {
            return Err(Error::InvalidState("no users registered".into()));
        }
        if let Visibility::Private { owner: vis_owner, .. } = &visibility {
            if owner != Some(vis_owner.as_str()) || !self.users.contains_key(vis_owner) {
                return Err(invalid_arg("a private drop belongs to a registered owner"));
            }
        }
        let n = self.users.len() as f64;
        let cx = self.users.values().map(|u| u.head[0]).sum::<f64>() / n;
        let cy = self.users.values().map(|u| u.head[1]).sum::<f64>() / n;
        let mut r = rng(seed);
        let radius = self.config.spawn_radius;
        let position = (0..self.config.max_spawn_attempts)
            .map(|_| {
                let rho = radius * r.random::<f64>().sqrt();
                let phi = r.random_range(0.0..std::f64::consts::TAU);
                [cx + rho * phi.cos(), cy + rho * phi.sin()]
            })
            .find(|&p| self.placement_ok(p))
            .ok_or(Error::PlacementFailure(self.config.max_spawn_attempts))?;

        let drop = Drop {
            id: self.next_id,
            content_ref: content_ref.to_string(),
            owner: owner.map(str::to_string),
            visibility,
            position: [position[0], position[1], self.config.cloud_height],
            state: DropState::Falling { speed: self.config.fall_speed },
            spawned_at: self.time,
        };
        let id = drop.id;
        Ok((id, self.commit(vec![Event::DropSpawned { drop }])))
    }

    /// Advances time: falling drops descend and expire at the ground.
    pub fn tick(&mut self, dt: f64) -> Result<Vec<Event>> {
        if !(dt >= 0.0 && dt.is_finite()) {
            return Err(invalid_arg("tick needs a finite non-negative dt"));
        }
        let mut events = Vec::new();
        for d in self.drops.values() {
            if let DropState::Falling { speed } = d.state {
                let z = d.position[2] - speed * dt;
                if z <= self.config.ground_height {
                    events.push(Event::DropMoved {
                        id: d.id,
                        position: [d.position[0], d.position[1], self.config.ground_height],
                    });
                    events.push(Event::StateChanged { id: d.id, state: DropState::Expired });
                } else if dt > 0.0 {
                    events.push(Event::DropMoved { id: d.id, position: [d.position[0], d.position[1], z] });
                }
            }
        }
        events.push(Event::TimeAdvanced { time: self.time + dt });
        Ok(self.commit(events))
    }

    /// Validates and applies one gesture. On error nothing changes.
    pub fn apply_gesture(&mut self, actor: &str, gesture: &Gesture) -> Result<Vec<Event>> {
        if !self.users.contains_key(actor) {
            return Err(Error::PermissionDenied(format!("unknown user {actor}")));
        }
        let id = gesture.drop_id();
        let drop = self
            .drops
            .get(&id)
            .ok_or_else(|| invalid_arg(format!("no drop {id}")))?;
        if !drop.visibility.allows(actor) {
            return Err(Error::NotVisible(id));
        }
        if drop.state.is_terminal() {
            return Err(Error::InvalidState(format!("drop {id} is {:?}", drop.state)));
        }
        let held_by_actor = matches!(&drop.state, DropState::Held { by } if by == actor);
        let require_holder = || -> Result<()> {
            match &drop.state {
                DropState::Held { .. } if held_by_actor => Ok(()),
                DropState::Held { by } => {
                    Err(Error::PermissionDenied(format!("drop {id} is held by {by}")))
                }
                other => Err(Error::InvalidState(format!("drop {id} is not held ({other:?})"))),
            }
        };
        let state = |state| Event::StateChanged { id, state };

        let events = match gesture {
            Gesture::Grab { .. } => match &drop.state {
                DropState::Falling { .. } | DropState::Pinned => {
                    vec![state(DropState::Held { by: actor.to_string() })]
                }
                DropState::Held { by } if by != actor => {
                    return Err(Error::PermissionDenied(format!("drop {id} is held by {by}")))
                }
                other => return Err(Error::InvalidState(format!("cannot grab a {other:?} drop"))),
            },
            Gesture::Move { pos, .. } => {
                require_holder()?;
                if !finite3(pos) {
                    return Err(invalid_arg("position must be finite"));
                }
                vec![Event::DropMoved { id, position: *pos }]
            }
            Gesture::Release { .. } => {
                require_holder()?;
                vec![state(DropState::Pinned)]
            }
            Gesture::Throw { .. } => {
                require_holder()?;
                vec![state(DropState::Discarded)]
            }
            Gesture::Show { .. } => match &drop.state {
                DropState::Falling { .. } => vec![state(DropState::Expanded { pinned: false })],
                DropState::Pinned => vec![state(DropState::Expanded { pinned: true })],
                other => return Err(Error::InvalidState(format!("cannot show a {other:?} drop"))),
            },
            Gesture::Close { .. } => match &drop.state {
                DropState::Expanded { pinned: true } => vec![state(DropState::Pinned)],
                DropState::Expanded { pinned: false } => {
                    vec![state(DropState::Falling { speed: self.config.fall_speed })]
                }
                other => return Err(Error::InvalidState(format!("cannot close a {other:?} drop"))),
            },
            Gesture::Share { target, .. } => {
                let Visibility::Private { owner, shared_with } = &drop.visibility else {
                    return Err(Error::InvalidState(format!("drop {id} is already public")));
                };
                if owner != actor {
                    return Err(Error::PermissionDenied(format!("only {owner} may share drop {id}")));
                }
                let visibility = match target {
                    ShareTarget::Public => Visibility::Public,
                    ShareTarget::User(u) => {
                        if !self.users.contains_key(u) {
                            return Err(invalid_arg(format!("unknown user {u}")));
                        }
                        let mut shared_with = shared_with.clone();
                        shared_with.insert(u.clone());
                        Visibility::Private { owner: owner.clone(), shared_with }
                    }
                };
                vec![Event::VisibilityChanged { id, visibility }]
            }
        };
        Ok(self.commit(events))
    }

    pub fn visible_to(&self, user: &str, id: DropId) -> bool {
        self.drops.get(&id).is_some_and(|d| d.visibility.allows(user))
    }

    /// Live drops the user may see, in id order.
    pub fn snapshot_for(&self, user: &str) -> Vec<DropView> {
        self.drops
            .values()
            .filter(|d| !d.state.is_terminal() && d.visibility.allows(user))
            .map(|d| DropView {
                id: d.id,
                content: d.content_ref.clone(),
                vis: match &d.visibility {
                    Visibility::Public => VisTag::Public,
                    Visibility::Private { shared_with, .. } if shared_with.is_empty() => {
                        VisTag::Private
                    }
                    Visibility::Private { .. } => VisTag::Shared,
                },
                pos: d.position,
                state: d.state.clone(),
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space_with(users: &[(&str, Vec3, Vec3)]) -> Space {
        let mut s = Space::new(SpaceConfig::default()).unwrap();
        for (u, h, g) in users {
            s.set_pose(u, *h, *g).unwrap();
        }
        s
    }

    fn two_users() -> Space {
        space_with(&[("a", [0.0, 0.0, 1.7], [1.0, 0.0, 0.0]), ("b", [2.0, 0.0, 1.7], [-1.0, 0.0, 0.0])])
    }

    #[test]
    fn spawn_respects_peripheral_angle() {
        let mut s = space_with(&[("a", [0.0, 0.0, 1.7], [0.0, 1.0, 0.0])]);
        for seed in 0..200 {
            let (id, _) = s.spawn("x", None, Visibility::Public, seed).unwrap();
            let d = &s.drops[&id];
            let bearing = d.position[0].atan2(d.position[1]).to_degrees().abs();
            assert!(bearing >= 25.0);
            assert_eq!(d.position[2], 2.2);
        }
    }

    #[test]
    fn spawn_keeps_line_of_sight_clear() {
        let mut s = two_users();
        for seed in 0..200 {
            let (id, _) = s.spawn("x", None, Visibility::Public, seed).unwrap();
            let p = s.drops[&id].position;
            assert!(dist_to_segment([p[0], p[1]], [0.0, 0.0], [2.0, 0.0]) >= 0.5);
        }
    }

    #[test]
    fn spawn_is_deterministic_and_can_fail() {
        let mut a = two_users();
        let mut b = two_users();
        let (ia, _) = a.spawn("x", None, Visibility::Public, 5).unwrap();
        let (ib, _) = b.spawn("x", None, Visibility::Public, 5).unwrap();
        assert_eq!(a.drops[&ia], b.drops[&ib]);
        let cfg = SpaceConfig { peripheral_angle: 179.9, max_spawn_attempts: 10, ..SpaceConfig::default() };
        let mut tight = Space::new(cfg).unwrap();
        tight.set_pose("a", [0.0; 3], [1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            tight.spawn("x", None, Visibility::Public, 1),
            Err(Error::PlacementFailure(10))
        ));
        let mut empty = Space::new(SpaceConfig::default()).unwrap();
        assert!(empty.spawn("x", None, Visibility::Public, 1).is_err());
    }

    #[test]
    fn falling_and_expiry() {
        let mut s = two_users();
        let (id, _) = s.spawn("x", None, Visibility::Public, 1).unwrap();
        s.drops.get_mut(&id).unwrap().position[2] = 0.10;
        s.tick(1.0).unwrap();
        assert!((s.drops[&id].position[2] - 0.05).abs() < 1e-12);
        s.drops.get_mut(&id).unwrap().position[2] = 0.04;
        let events = s.tick(1.0).unwrap();
        assert!(events.contains(&Event::StateChanged { id, state: DropState::Expired }));
        assert!(s.snapshot_for("a").is_empty());
        assert!(matches!(
            s.apply_gesture("a", &Gesture::Grab { drop: id }),
            Err(Error::InvalidState(_))
        ));
    }

    #[test]
    fn pinned_drop_does_not_fall() {
        let mut s = two_users();
        let (id, _) = s.spawn("x", None, Visibility::Public, 1).unwrap();
        s.apply_gesture("a", &Gesture::Grab { drop: id }).unwrap();
        s.apply_gesture("a", &Gesture::Move { drop: id, pos: [1.0, 0.0, 1.2] }).unwrap();
        s.apply_gesture("a", &Gesture::Release { drop: id }).unwrap();
        assert_eq!(s.drops[&id].state, DropState::Pinned);
        assert_eq!(s.drops[&id].position, [1.0, 0.0, 1.2]);
        s.tick(100.0).unwrap();
        assert_eq!(s.drops[&id].position, [1.0, 0.0, 1.2]);
    }

    #[test]
    fn holder_rules() {
        let mut s = two_users();
        let (id, _) = s.spawn("x", None, Visibility::Public, 1).unwrap();
        s.apply_gesture("a", &Gesture::Grab { drop: id }).unwrap();
        let before = s.clone();
        for g in [
            Gesture::Grab { drop: id },
            Gesture::Move { drop: id, pos: [0.0; 3] },
            Gesture::Release { drop: id },
            Gesture::Throw { drop: id },
        ] {
            assert!(matches!(s.apply_gesture("b", &g), Err(Error::PermissionDenied(_))));
            assert_eq!(s, before);
        }
        s.apply_gesture("a", &Gesture::Throw { drop: id }).unwrap();
        assert_eq!(s.drops[&id].state, DropState::Discarded);
    }

    #[test]
    fn show_and_close() {
        let mut s = two_users();
        let (id, _) = s.spawn("x", None, Visibility::Public, 1).unwrap();
        s.apply_gesture("a", &Gesture::Show { drop: id }).unwrap();
        let z = s.drops[&id].position[2];
        s.tick(1.0).unwrap();
        assert_eq!(s.drops[&id].position[2], z);
        s.apply_gesture("b", &Gesture::Close { drop: id }).unwrap();
        assert!(matches!(s.drops[&id].state, DropState::Falling { .. }));
        assert!(s.apply_gesture("b", &Gesture::Close { drop: id }).is_err());
    }

    #[test]
    fn private_visibility_and_sharing() {
        let mut s = two_users();
        s.spawn("pub", None, Visibility::Public, 1).unwrap();
        let (p, _) = s.spawn("mine", Some("a"), Visibility::private("a"), 2).unwrap();
        assert_eq!(s.snapshot_for("a").len(), 2);
        assert_eq!(s.snapshot_for("b").len(), 1);
        assert!(matches!(
            s.apply_gesture("b", &Gesture::Grab { drop: p }),
            Err(Error::NotVisible(_))
        ));
        let share = Gesture::Share { drop: p, target: ShareTarget::User("b".into()) };
        assert!(s.apply_gesture("b", &share).is_err());
        s.apply_gesture("a", &share).unwrap();
        assert_eq!(s.snapshot_for("b").len(), 2);
        assert_eq!(s.snapshot_for("b")[1].vis, VisTag::Shared);
        // shared, not owned: b still cannot re-share
        let public = Gesture::Share { drop: p, target: ShareTarget::Public };
        assert!(matches!(s.apply_gesture("b", &public), Err(Error::PermissionDenied(_))));
    }

    #[test]
    fn empty_space_snapshot() {
        assert!(two_users().snapshot_for("a").is_empty());
    }

    #[test]
    fn replay_reproduces_space() {
        let mut s = Space::new(SpaceConfig::default()).unwrap();
        let mut log = Vec::new();
        log.extend(s.set_pose("a", [0.0, 0.0, 1.7], [1.0, 0.0, 0.0]).unwrap());
        log.extend(s.spawn("x", Some("a"), Visibility::private("a"), 3).unwrap().1);
        log.extend(s.tick(0.05).unwrap());
        log.extend(s.apply_gesture("a", &Gesture::Grab { drop: 1 }).unwrap());
        log.extend(s.tick(0.05).unwrap());
        log.extend(s.remove_user("a"));
        assert_eq!(Space::replay(SpaceConfig::default(), &log).unwrap(), s);
    }

    #[test]
    fn event_json_shape() {
        let e = Event::StateChanged { id: 3, state: DropState::Held { by: "a".into() } };
        let v = serde_json::to_value(&e).unwrap();
        assert_eq!(v["kind"], "state_changed");
        assert_eq!(v["state"]["kind"], "held");
        let back: Event = serde_json::from_value(v).unwrap();
        assert_eq!(back, e);
    }
}
