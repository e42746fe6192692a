use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread;
use std::time::Duration;

use log::{debug, info, warn};

use super::playground::{PlaygroundReply, PlaygroundSession};
use super::record::Technique;
use crate::error::Result;

/// Serves the playground protocol until `shutdown` is set. Each connection
/// gets its own session, preconfigured with `preset` when given.
pub fn serve_playground(listener: TcpListener, preset: Option<Technique>, shutdown: Arc<AtomicBool>) -> Result<()> {
    listener.set_nonblocking(true)?;
    info!("playground server listening on {}", listener.local_addr()?);
    let mut workers = Vec::new();
    while !shutdown.load(Ordering::SeqCst) {
        match listener.accept() {
            Ok((stream, peer)) => {
                debug!("client {peer} connected");
                workers.push(thread::spawn(move || {
                    if let Err(e) = session_loop(stream, preset) {
                        warn!("session with {peer} ended: {e}");
                    }
                }));
            }
            Err(e) if e.kind() == std::io::ErrorKind::WouldBlock => thread::sleep(Duration::from_millis(10)),
            Err(e) => return Err(e.into()),
        }
        workers.retain(|w| !w.is_finished());
    }
    Ok(())
}

fn session_loop(stream: TcpStream, preset: Option<Technique>) -> Result<()> {
    stream.set_nonblocking(false)?;
    stream.set_nodelay(true)?;
    let mut out = stream.try_clone()?;
    let mut session = match preset {
        Some(t) => PlaygroundSession::preset(t)?,
        None => PlaygroundSession::new(),
    };
    for line in BufReader::new(stream).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let replies: Vec<PlaygroundReply> = session.handle_line(&line);
        for r in replies {
            out.write_all(r.to_line().as_bytes())?;
        }
        out.flush()?;
    }
    Ok(())
}
