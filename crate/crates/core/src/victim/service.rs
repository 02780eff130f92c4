//! Line-delimited JSON query service over TCP.
//!
//! Requests: `{"id": <u64>, "features": [<8 floats>], "t_hours": <float>}`.
//! Replies: `{"id", "probs": [p0, p1]}` on success, `{"id"?, "error"}` on
//! failure. One reply per line, in request order per connection. Connections
//! are handled concurrently; a dropped or misbehaving connection never stops
//! the listener.

use std::io::{self, BufRead, BufReader, Write};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread::JoinHandle;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qnn::QnnModel;
use crate::victim::campaign::{query, QueriedDataset, QueryRecord};
use crate::victim::schedule::NoiseSchedule;

/// Shot count and seed the service answers every query with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ServiceConfig {
    pub shots: u32,
    pub seed: u64,
}

#[derive(Serialize, Deserialize)]
struct WireRequest {
    id: u64,
    features: Vec<f64>,
    t_hours: f64,
}

#[derive(Serialize)]
struct WireOk {
    id: u64,
    probs: [f64; 2],
}

#[derive(Serialize)]
struct WireErrReply<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    id: Option<u64>,
    error: &'a str,
}

#[derive(Deserialize)]
struct WireReply {
    id: Option<u64>,
    probs: Option<[f64; 2]>,
    error: Option<String>,
}

struct ServiceState {
    victim: QnnModel,
    schedule: NoiseSchedule,
    cfg: ServiceConfig,
}

/// A running query service; shut down explicitly or by dropping.
pub struct Service {
    local_addr: SocketAddr,
    shutdown: Arc<AtomicBool>,
    acceptor: Option<JoinHandle<()>>,
}

impl Service {
    /// Bind `listen` (e.g. "127.0.0.1:0" for an ephemeral port) and start
    /// accepting connections in background threads.
    pub fn start(
        listen: &str,
        victim: QnnModel,
        schedule: NoiseSchedule,
        cfg: ServiceConfig,
    ) -> Result<Service> {
        schedule.validate()?;
        victim.arch.validate()?;
        let listener = TcpListener::bind(listen)?;
        let local_addr = listener.local_addr()?;
        listener.set_nonblocking(true)?;
        let shutdown = Arc::new(AtomicBool::new(false));
        let flag = Arc::clone(&shutdown);
        let state = Arc::new(ServiceState { victim, schedule, cfg });
        let acceptor = std::thread::spawn(move || {
            let mut workers: Vec<JoinHandle<()>> = Vec::new();
            while !flag.load(Ordering::SeqCst) {
                match listener.accept() {
                    Ok((stream, _peer)) => {
                        let state = Arc::clone(&state);
                        let flag = Arc::clone(&flag);
                        workers.push(std::thread::spawn(move || {
                            handle_connection(stream, &state, &flag);
                        }));
                    }
                    Err(ref e) if e.kind() == io::ErrorKind::WouldBlock => {
                        std::thread::sleep(Duration::from_millis(5));
                    }
                    Err(_) => std::thread::sleep(Duration::from_millis(5)),
                }
            }
            for worker in workers {
                let _ = worker.join();
            }
        });
        Ok(Service { local_addr, shutdown, acceptor: Some(acceptor) })
    }

    pub fn local_addr(&self) -> SocketAddr {
        self.local_addr
    }

    /// Stop accepting, wait for in-flight connections to wind down.
    pub fn shutdown(mut self) {
        self.stop();
    }

    fn stop(&mut self) {
        self.shutdown.store(true, Ordering::SeqCst);
        if let Some(handle) = self.acceptor.take() {
            let _ = handle.join();
        }
    }
}

impl Drop for Service {
    fn drop(&mut self) {
        self.stop();
    }
}

fn handle_connection(stream: TcpStream, state: &ServiceState, shutdown: &AtomicBool) {
    if stream.set_read_timeout(Some(Duration::from_millis(100))).is_err() {
        return;
    }
    let mut writer = match stream.try_clone() {
        Ok(w) => w,
        Err(_) => return,
    };
    let mut reader = BufReader::new(stream);
    let mut line = String::new();
    loop {
        if shutdown.load(Ordering::SeqCst) {
            return;
        }
        match reader.read_line(&mut line) {
            Ok(0) => return,
            Ok(_) => {
                let text = line.trim();
                if !text.is_empty() {
                    let reply = respond(text, state);
                    if writer
                        .write_all(reply.as_bytes())
                        .and_then(|_| writer.write_all(b"\n"))
                        .and_then(|_| writer.flush())
                        .is_err()
                    {
                        return;
                    }
                }
                line.clear();
            }
            Err(ref e)
                if e.kind() == io::ErrorKind::WouldBlock
                    || e.kind() == io::ErrorKind::TimedOut =>
            {
                // Partial input stays buffered in `line`; poll again.
            }
            Err(_) => return,
        }
    }
}

fn respond(text: &str, state: &ServiceState) -> String {
    let request: WireRequest = match serde_json::from_str(text) {
        Ok(r) => r,
        Err(e) => {
            // Salvage the id when the envelope parses far enough.
            let id = serde_json::from_str::<serde_json::Value>(text)
                .ok()
                .and_then(|v| v.get("id").and_then(|x| x.as_u64()));
            let msg = format!("bad request: {e}");
            return serde_json::to_string(&WireErrReply { id, error: &msg })
                .expect("reply serialization cannot fail");
        }
    };
    match query(
        &state.victim,
        &request.features,
        &state.schedule,
        request.t_hours,
        state.cfg.shots,
        state.cfg.seed,
        request.id,
    ) {
        Ok(probs) => serde_json::to_string(&WireOk { id: request.id, probs })
            .expect("reply serialization cannot fail"),
        Err(e) => {
            let msg = e.to_string();
            serde_json::to_string(&WireErrReply { id: Some(request.id), error: &msg })
                .expect("reply serialization cannot fail")
        }
    }
}

/// Run a full query campaign through a remote service, producing a dataset
/// with the same shape (and, for the same service seed, the same bytes) as
/// the in-process campaign runner.
pub fn run_campaign_remote(
    addr: &str,
    features: &[[f64; 8]],
    m_rounds: usize,
    period_hours: f64,
) -> Result<QueriedDataset> {
    if features.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if m_rounds == 0 {
        return Err(Error::NotEnoughRounds(0));
    }
    let stream = TcpStream::connect(addr)?;
    let _ = stream.set_nodelay(true);
    let mut writer = stream.try_clone()?;
    let mut reader = BufReader::new(stream);
    let times: Vec<f64> = (1..=m_rounds)
        .map(|m| m as f64 * period_hours / m_rounds as f64)
        .collect();

    let mut records = Vec::with_capacity(features.len());
    let mut line = String::new();
    for (i, f) in features.iter().enumerate() {
        let sample_id = i as u64;
        let mut probs_by_round = Vec::with_capacity(m_rounds);
        for &t in &times {
            let request = WireRequest { id: sample_id, features: f.to_vec(), t_hours: t };
            let mut payload = serde_json::to_string(&request)?;
            payload.push('\n');
            writer.write_all(payload.as_bytes())?;
            writer.flush()?;

            line.clear();
            if reader.read_line(&mut line)? == 0 {
                return Err(Error::Service("connection closed mid-campaign".into()));
            }
            let reply: WireReply = serde_json::from_str(line.trim())
                .map_err(|e| Error::Service(format!("unparseable reply: {e}")))?;
            if let Some(message) = reply.error {
                return Err(Error::Service(message));
            }
            match (reply.id, reply.probs) {
                (Some(id), Some(probs)) if id == sample_id => probs_by_round.push(probs),
                (Some(id), _) => {
                    return Err(Error::Service(format!(
                        "reply id {id} does not match request {sample_id}"
                    )))
                }
                _ => return Err(Error::Service("reply missing id or probs".into())),
            }
        }
        records.push(QueryRecord {
            sample_id,
            features: *f,
            probs_by_round,
            query_times: times.clone(),
        });
    }
    let data = QueriedDataset { records };
    data.validate()?;
    Ok(data)
}
