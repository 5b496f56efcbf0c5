//! HTTP front end for a registry of D-LITe nodes.
//!
//! | verb | path | effect |
//! |------|------|--------|
//! | GET | `/nodes` | list nodes |
//! | POST | `/nodes` | create `{kind, id?}` |
//! | GET | `/nodes/{id}` | descriptor |
//! | PUT | `/nodes/{id}` | program `{program, subscribers[]}` |
//! | DELETE | `/nodes/{id}` | clear behaviour |
//! | GET | `/nodes/{id}/state` | current state, variables, hardware log |
//! | POST | `/nodes/{id}/messages` | deliver `{word, args[]}` |
//! | POST | `/nodes/{id}/sensors/{word}` | inject a reading `{args[]}` |
//! | GET | `/events?since=n` | server-sent event stream |
//! | GET, PUT | `/clock` | read or set `{running}` |
//! | POST | `/clock/advance` | run `{ticks}` timer ticks now |

mod events;
mod http;
mod registry;

use std::future::Future;
use std::net::SocketAddr;
use std::sync::Arc;
use std::time::Duration;

use tokio::net::TcpListener;
use tokio::sync::oneshot;
use tokio::task::JoinHandle;

pub use events::{EventKind, EventLog, EventRecord};
pub use http::{record_stream, router, ApiError};
pub use registry::{ClockStatus, Created, Fault, NodeSummary, Outcome, Programmed, Registry, TickReport};

#[derive(Debug, Clone, clap::Args)]
pub struct Config {
    /// Address to listen on.
    #[arg(long, env = "DLITE_LISTEN", default_value = "127.0.0.1:8080")]
    pub listen: SocketAddr,
    /// Timer ticks per second.
    #[arg(long, env = "DLITE_TICK_RATE", default_value_t = 10.0)]
    pub tick_rate: f64,
    /// Events kept for replay.
    #[arg(long, env = "DLITE_EVENT_BUFFER", default_value_t = 4096)]
    pub buffer: usize,
    /// Start with the clock stopped.
    #[arg(long, env = "DLITE_PAUSED")]
    pub paused: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            listen: SocketAddr::from(([127, 0, 0, 1], 8080)),
            tick_rate: 10.0,
            buffer: 4096,
            paused: false,
        }
    }
}

impl Config {
    pub fn registry(&self) -> anyhow::Result<Registry> {
        if !(self.tick_rate > 0.0 && self.tick_rate.is_finite()) {
            anyhow::bail!("tick rate must be positive, got {}", self.tick_rate);
        }
        Ok(Registry::new(self.buffer, self.tick_rate, !self.paused))
    }
}

/// Drives the registry clock until shutdown.
fn spawn_clock(registry: Arc<Registry>) -> JoinHandle<()> {
    let mut shutdown = registry.shutdown_signal();
    tokio::spawn(async move {
        let mut interval = tokio::time::interval(Duration::from_secs_f64(1.0 / registry.tick_rate()));
        interval.set_missed_tick_behavior(tokio::time::MissedTickBehavior::Delay);
        loop {
            tokio::select! {
                _ = interval.tick() => {
                    if registry.is_running() {
                        registry.tick(1);
                    }
                }
                _ = shutdown.changed() => return,
            }
        }
    })
}

/// Serves until `signal` resolves, then closes event streams and waits
/// for open requests.
pub async fn serve(
    listener: TcpListener,
    registry: Arc<Registry>,
    signal: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    let clock = spawn_clock(registry.clone());
    let app = router(registry.clone());
    let stop = registry.clone();
    let result = axum::serve(listener, app)
        .with_graceful_shutdown(async move {
            signal.await;
            stop.shutdown();
        })
        .await;
    registry.shutdown();
    let _ = clock.await;
    result
}

/// A server running on a background task.
pub struct RunningGateway {
    pub addr: SocketAddr,
    pub registry: Arc<Registry>,
    stop: Option<oneshot::Sender<()>>,
    task: JoinHandle<std::io::Result<()>>,
}

impl RunningGateway {
    pub fn url(&self, path: &str) -> String {
        format!("http://{}{path}", self.addr)
    }

    pub async fn shutdown(mut self) -> std::io::Result<()> {
        if let Some(stop) = self.stop.take() {
            let _ = stop.send(());
        }
        self.task.await.expect("server task")
    }
}

/// Binds `config.listen` and serves on a background task.
pub async fn spawn(config: &Config) -> anyhow::Result<RunningGateway> {
    let registry = Arc::new(config.registry()?);
    let listener = TcpListener::bind(config.listen).await?;
    let addr = listener.local_addr()?;
    let (stop, stopped) = oneshot::channel::<()>();
    let task = tokio::spawn(serve(listener, registry.clone(), async move {
        let _ = stopped.await;
    }));
    Ok(RunningGateway {
        addr,
        registry,
        stop: Some(stop),
        task,
    })
}
