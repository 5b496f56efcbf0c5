use std::sync::Arc;

use anyhow::Result;
use clap::Parser;
use gateway::{serve, Config};
use tokio::net::TcpListener;
use tracing_subscriber::EnvFilter;

/// HTTP gateway for D-LITe nodes.
#[derive(Parser)]
#[command(name = "dlite-gateway", version)]
struct Cli {
    #[command(flatten)]
    config: Config,
}

#[tokio::main]
async fn main() -> Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("info")))
        .init();
    let config = Cli::parse().config;
    let registry = Arc::new(config.registry()?);
    let listener = TcpListener::bind(config.listen).await?;
    tracing::info!(addr = %listener.local_addr()?, tick_rate = config.tick_rate, "listening");
    serve(listener, registry, async {
        let _ = tokio::signal::ctrl_c().await;
        tracing::info!("shutting down");
    })
    .await?;
    Ok(())
}
