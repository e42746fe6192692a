use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError, Sender};
use std::sync::Arc;
use std::thread;
use std::time::{Duration, Instant};

use log::{debug, info, warn};
use serde::{Deserialize, Serialize};

use super::protocol::{ClientMsg, ServerMsg};
use super::space::{Event, Space, SpaceConfig, Visibility};
use crate::error::Result;
use crate::gaitsim::derive_seed;

/// One scripted content item, standing in for the ambient search feed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeedItem {
    /// Seconds after the first user joined.
    pub at: f64,
    pub content_ref: String,
    /// When set, the drop is private to this user.
    #[serde(default)]
    pub private_to: Option<String>,
}

#[derive(Debug, Clone)]
pub struct DropServerOptions {
    pub space: SpaceConfig,
    pub tick_hz: f64,
    pub seed: u64,
    pub feed: Vec<FeedItem>,
    /// Replays the feed with this period once exhausted (s).
    pub feed_period: Option<f64>,
}

impl Default for DropServerOptions {
    fn default() -> Self {
        let feed = ["weather/today", "calendar/next", "news/headline", "maps/cafe"]
            .iter()
            .enumerate()
            .map(|(i, c)| FeedItem { at: 5.0 * i as f64, content_ref: c.to_string(), private_to: None })
            .collect();
        Self {
            space: SpaceConfig::default(),
            tick_hz: 20.0,
            seed: 0,
            feed,
            feed_period: Some(20.0),
        }
    }
}

enum Command {
    Connect { conn: u64, out: Sender<String> },
    Line { conn: u64, line: String },
    Disconnect { conn: u64 },
}

struct Client {
    out: Sender<String>,
    user: Option<String>,
}

/// The authoritative session: owns the space and serialises every mutation.
struct Authority {
    space: Space,
    clients: BTreeMap<u64, Client>,
    log: Vec<Event>,
    options: DropServerOptions,
    started: Option<f64>,
    feed_cursor: usize,
    feed_round: u64,
    spawned: u64,
}

impl Authority {
    fn send(&self, conn: u64, msg: &ServerMsg) {
        if let Some(c) = self.clients.get(&conn) {
            let _ = c.out.send(msg.to_line());
        }
    }

    /// Sends each event to the clients allowed to see its drop.
    fn publish(&mut self, events: Vec<Event>) {
        for e in &events {
            if matches!(e, Event::TimeAdvanced { .. }) {
                continue;
            }
            for c in self.clients.values() {
                let Some(user) = &c.user else { continue };
                let visible = e.drop_id().is_none_or(|id| self.space.visible_to(user, id));
                if visible {
                    let _ = c.out.send(ServerMsg::Event { event: e.clone() }.to_line());
                }
            }
        }
        self.log.extend(events);
    }

    fn handle(&mut self, conn: u64, line: &str) {
        let msg: ClientMsg = match serde_json::from_str(line) {
            Ok(m) => m,
            Err(e) => return self.send(conn, &ServerMsg::Error { message: e.to_string() }),
        };
        let user = self.clients.get(&conn).and_then(|c| c.user.clone());
        let result = match (msg, user) {
            (ClientMsg::Hello { user, head, gaze }, None) => {
                let taken = self.clients.values().any(|c| c.user.as_deref() == Some(&user));
                if taken {
                    Err(crate::Error::InvalidState(format!("user {user} already connected")))
                } else {
                    let r = self.space.set_pose(
                        &user,
                        head.unwrap_or([0.0, 0.0, 1.7]),
                        gaze.unwrap_or([0.0, 1.0, 0.0]),
                    );
                    if r.is_ok() {
                        self.clients.get_mut(&conn).expect("connected").user = Some(user);
                        self.started.get_or_insert(self.space.time);
                    }
                    r
                }
            }
            (ClientMsg::Hello { .. }, Some(_)) => {
                Err(crate::Error::InvalidState("hello already received".into()))
            }
            (_, None) => Err(crate::Error::InvalidState("send hello first".into())),
            (ClientMsg::Pose { head, gaze }, Some(user)) => self.space.set_pose(&user, head, gaze),
            (ClientMsg::Gesture { kind, drop, pos, to }, Some(user)) => {
                ClientMsg::gesture(kind, drop, pos, to.as_deref())
                    .and_then(|g| self.space.apply_gesture(&user, &g))
            }
        };
        match result {
            Ok(events) => {
                self.publish(events);
                self.send_snapshot(conn);
            }
            Err(e) => self.send(conn, &ServerMsg::Error { message: e.to_string() }),
        }
    }

    fn send_snapshot(&self, conn: u64) {
        if let Some(user) = self.clients.get(&conn).and_then(|c| c.user.as_ref()) {
            let drops = self.space.snapshot_for(user);
            self.send(conn, &ServerMsg::Snapshot { time: self.space.time, drops });
        }
    }

    fn run_feed(&mut self) {
        let Some(start) = self.started else { return };
        let feed = self.options.feed.clone();
        if feed.is_empty() || self.space.users.is_empty() {
            return;
        }
        loop {
            if self.feed_cursor == feed.len() {
                match self.options.feed_period {
                    Some(p) if p > 0.0 => {
                        self.feed_cursor = 0;
                        self.feed_round += 1;
                    }
                    _ => return,
                }
            }
            let item = &feed[self.feed_cursor];
            let period = self.options.feed_period.unwrap_or(0.0);
            let due = start + item.at + period * self.feed_round as f64;
            if self.space.time < due {
                return;
            }
            let item = item.clone();
            self.feed_cursor += 1;
            let (owner, vis) = match &item.private_to {
                Some(u) if self.space.users.contains_key(u) => (Some(u.as_str()), Visibility::private(u)),
                Some(_) => continue,
                None => (None, Visibility::Public),
            };
            let seed = derive_seed(self.options.seed, 0, self.spawned);
            self.spawned += 1;
            match self.space.spawn(&item.content_ref, owner, vis, seed) {
                Ok((_, events)) => self.publish(events),
                Err(e) => warn!("feed item {} not placed: {e}", item.content_ref),
            }
        }
    }

    fn tick(&mut self, dt: f64) {
        match self.space.tick(dt) {
            Ok(events) => self.publish(events),
            Err(e) => warn!("tick failed: {e}"),
        }
        self.run_feed();
        let conns: Vec<u64> = self.clients.keys().copied().collect();
        for conn in conns {
            self.send_snapshot(conn);
        }
    }
}

/// Serves the shared space over line-delimited JSON on `listener` until
/// `shutdown` is set. Returns the final space and its full event log.
pub fn serve_dropspace(
    listener: TcpListener,
    options: DropServerOptions,
    shutdown: Arc<AtomicBool>,
) -> Result<(Space, Vec<Event>)> {
    let (tx, rx) = mpsc::channel::<Command>();
    listener.set_nonblocking(true)?;
    let accept_shutdown = shutdown.clone();
    let acceptor = thread::spawn(move || accept_loop(listener, tx, accept_shutdown));

    let space = Space::new(options.space)?;
    let period = Duration::from_secs_f64(1.0 / options.tick_hz.max(1.0));
    let dt = period.as_secs_f64();
    let mut auth = Authority {
        space,
        clients: BTreeMap::new(),
        log: Vec::new(),
        options,
        started: None,
        feed_cursor: 0,
        feed_round: 0,
        spawned: 0,
    };
    info!("dropspace ticking at {:.0} Hz", 1.0 / dt);
    let mut next_tick = Instant::now() + period;
    while !shutdown.load(Ordering::SeqCst) {
        let wait = next_tick.saturating_duration_since(Instant::now());
        match rx.recv_timeout(wait) {
            Ok(cmd) => dispatch(&mut auth, cmd),
            Err(RecvTimeoutError::Timeout) => {
                auth.tick(dt);
                next_tick += period;
            }
            Err(RecvTimeoutError::Disconnected) => break,
        }
    }
    let _ = acceptor.join();
    Ok((auth.space, auth.log))
}

fn dispatch(auth: &mut Authority, cmd: Command) {
    match cmd {
        Command::Connect { conn, out } => {
            debug!("connection {conn} opened");
            auth.clients.insert(conn, Client { out, user: None });
        }
        Command::Line { conn, line } => auth.handle(conn, &line),
        Command::Disconnect { conn } => {
            debug!("connection {conn} closed");
            if let Some(Client { user: Some(user), .. }) = auth.clients.remove(&conn) {
                let events = auth.space.remove_user(&user);
                auth.publish(events);
            }
        }
    }
}

fn accept_loop(listener: TcpListener, tx: Sender<Command>, shutdown: Arc<AtomicBool>) {
    let mut next_conn = 0u64;
    while !shutdown.load(Ordering::SeqCst) {
        match listener.accept() {
            Ok((stream, peer)) => {
                info!("client {peer} connected");
                let conn = next_conn;
                next_conn += 1;
                if let Err(e) = start_connection(stream, conn, tx.clone()) {
                    warn!("connection setup failed: {e}");
                }
            }
            Err(e) if e.kind() == std::io::ErrorKind::WouldBlock => {
                thread::sleep(Duration::from_millis(10));
            }
            Err(e) => {
                warn!("accept failed: {e}");
                break;
            }
        }
    }
}

fn start_connection(stream: TcpStream, conn: u64, tx: Sender<Command>) -> std::io::Result<()> {
    stream.set_nonblocking(false)?;
    stream.set_nodelay(true)?;
    let (out_tx, out_rx) = mpsc::channel::<String>();
    let writer = stream.try_clone()?;
    if tx.send(Command::Connect { conn, out: out_tx }).is_err() {
        return Ok(());
    }
    thread::spawn(move || write_loop(writer, out_rx));
    thread::spawn(move || {
        for line in BufReader::new(stream).lines() {
            let Ok(line) = line else { break };
            if line.trim().is_empty() {
                continue;
            }
            if tx.send(Command::Line { conn, line }).is_err() {
                return;
            }
        }
        let _ = tx.send(Command::Disconnect { conn });
    });
    Ok(())
}

fn write_loop(mut stream: TcpStream, rx: Receiver<String>) {
    for line in rx {
        if stream.write_all(line.as_bytes()).is_err() {
            break;
        }
    }
    let _ = stream.shutdown(std::net::Shutdown::Both);
}
