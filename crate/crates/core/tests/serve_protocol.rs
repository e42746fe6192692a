use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread::{self, JoinHandle};
use std::time::Duration;

use serde_json::{json, Value};

use abi::harness::{serve_playground, Technique};
use abi::walkline::{build_lanes, score_trial, SelectorConfig, WalkSample};

struct Server {
    addr: std::net::SocketAddr,
    shutdown: Arc<AtomicBool>,
    handle: Option<JoinHandle<abi::Result<()>>>,
}

impl Server {
    fn start(preset: Option<Technique>) -> Self {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let shutdown = Arc::new(AtomicBool::new(false));
        let flag = shutdown.clone();
        let handle = thread::spawn(move || serve_playground(listener, preset, flag));
        Self { addr, shutdown, handle: Some(handle) }
    }
}

impl Drop for Server {
    fn drop(&mut self) {
        self.shutdown.store(true, Ordering::SeqCst);
        if let Some(h) = self.handle.take() {
            h.join().unwrap().unwrap();
        }
    }
}

struct Client {
    out: TcpStream,
    lines: BufReader<TcpStream>,
}

impl Client {
    fn connect(server: &Server) -> Self {
        let out = TcpStream::connect(server.addr).unwrap();
        out.set_read_timeout(Some(Duration::from_secs(10))).unwrap();
        out.set_nodelay(true).unwrap();
        let lines = BufReader::new(out.try_clone().unwrap());
        Self { out, lines }
    }

    fn send(&mut self, msg: Value) {
        writeln!(self.out, "{msg}").unwrap();
    }

    fn recv(&mut self) -> Value {
        let mut line = String::new();
        self.lines.read_line(&mut line).unwrap();
        serde_json::from_str(&line).unwrap()
    }

    /// Replies to one message: a state line, followed by `selected` when the
    /// state reports a selection or confirmation.
    fn exchange(&mut self, msg: Value) -> Vec<Value> {
        self.send(msg);
        let first = self.recv();
        let mut out = vec![first];
        if out[0]["type"] == "state" && out[0]["events"].as_array().unwrap().iter().any(|e| e["kind"] == "selected" || e["kind"] == "confirmed") {
            out.push(self.recv());
        }
        out
    }
}

#[test]
fn walkline_over_tcp_matches_offline_scoring() {
    let server = Server::start(None);
    let mut c = Client::connect(&server);
    let reply = c.exchange(json!({"type": "configure", "technique": "walkline",
        "params": {"lanes": 12, "selection_time": 2.0 / 3.0, "target": -3}}));
    assert_eq!(reply[0]["type"], "state");

    let lane = -3.0 / 13.0;
    let trace: Vec<WalkSample> = (0..=150)
        .map(|k| {
            let t = k as f64 / 60.0;
            let x = if t < 0.6 { lane * t / 0.6 } else { lane + 0.004 * (7.0 * t).sin() };
            WalkSample { t, x, y: 1.3 * t }
        })
        .collect();

    let mut selected = None;
    for s in &trace {
        for r in c.exchange(json!({"type": "input", "t": s.t, "x": s.x, "y": s.y})) {
            match r["type"].as_str().unwrap() {
                "state" => {
                    let f = r["dwell_fraction"].as_f64().unwrap();
                    assert!((0.0..=1.0).contains(&f));
                }
                "selected" => {
                    selected.get_or_insert(r);
                }
                other => panic!("unexpected reply {other}: {r}"),
            }
        }
        if selected.is_some() {
            break;
        }
    }
    let selected = selected.expect("a selection");
    assert_eq!(selected["target"], "-3");

    let layout = build_lanes(12, 1.0, 20.0).unwrap();
    let offline = score_trial(&trace, -3, &SelectorConfig::new(2.0 / 3.0).unwrap(), &layout, 0.0).unwrap();
    let m = &selected["metrics"];
    assert_eq!(m["success"].as_f64(), Some(1.0));
    assert_eq!(m["tct"].as_f64(), Some(offline.tct));
    assert_eq!(m["walked_distance"].as_f64(), Some(offline.walked_distance));
    assert_eq!(m["longitudinal_distance"].as_f64(), Some(offline.longitudinal_distance));
    assert_eq!(m["stabilizing_error"].as_f64(), Some(offline.stabilizing_error as u8 as f64));
}

#[test]
fn preset_foottap_and_proximity_sessions() {
    let server = Server::start(Some(Technique::Foottap));
    let mut c = Client::connect(&server);
    // 1 row, 4 columns: a point straight ahead on row 1 sits between columns 2 and 3
    let r = c.exchange(json!({"type": "tap", "x": -0.05, "y": 0.18}));
    assert_eq!(r[0]["type"], "selected", "{}", r[0]);
    assert_eq!(r[0]["target"], "r1c2");
    let r = c.exchange(json!({"type": "tap", "x": 0.0, "y": 0.05}));
    assert_eq!(r[0]["type"], "state", "a miss selects nothing: {}", r[0]);

    let r = c.exchange(json!({"type": "configure", "technique": "proximity", "params": {"layers": 4, "confirm_time": 0.5}}));
    assert_eq!(r[0]["type"], "state");
    let mut confirmed = None;
    for k in 0..100 {
        let t = k as f64 / 50.0;
        for r in c.exchange(json!({"type": "distance", "t": t, "d": 0.3})) {
            if r["type"] == "selected" {
                confirmed.get_or_insert((t, r));
            }
        }
        if confirmed.is_some() {
            break;
        }
    }
    let (t, r) = confirmed.expect("dwell confirms a layer");
    assert!((0.5 - 1e-9..0.6).contains(&t), "{t}");
    // 4 uniform layers over [0.125, 0.725): 0.3 is in layer 1
    assert_eq!(r["target"], "1");
}

#[test]
fn protocol_errors_keep_the_connection() {
    let server = Server::start(None);
    let mut c = Client::connect(&server);
    for bad in [json!({"type": "input", "t": 0.0, "x": 0.0, "y": 0.0}), json!({"type": "nonsense"}),
                json!({"type": "configure", "technique": "walkline", "params": {"lanes": 7}})] {
        let r = c.exchange(bad);
        assert_eq!(r[0]["type"], "error");
    }
    writeln!(c.out, "not json").unwrap();
    assert_eq!(c.recv()["type"], "error");
    let r = c.exchange(json!({"type": "configure", "technique": "walkline"}));
    assert_eq!(r[0]["type"], "state");

    // a second client has an independent session
    let mut other = Client::connect(&server);
    assert_eq!(other.exchange(json!({"type": "tap", "x": 0.0, "y": 0.2}))[0]["type"], "error");
}
