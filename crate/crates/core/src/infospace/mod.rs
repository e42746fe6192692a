//! Shared information space: drops fall slowly from a virtual cloud, expire
//! at the ground, and can be grabbed, pinned, thrown, expanded and shared.
//!
//! [`Space`] is the authoritative world state. Every mutation is emitted as
//! an [`Event`], so a log replays to the identical state. [`serve_dropspace`]
//! runs a single authoritative session over line-delimited JSON.

mod protocol;
mod server;
mod space;

pub use protocol::{ClientMsg, GestureKind, ServerMsg};
pub use server::{serve_dropspace, DropServerOptions, FeedItem};
pub use space::{
    bearing_offset, Drop, DropId, DropState, DropView, Event, Gesture, ShareTarget, Space,
    SpaceConfig, User, UserId, Vec3, VisTag, Visibility,
};
