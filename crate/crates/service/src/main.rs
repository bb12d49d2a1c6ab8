use std::path::PathBuf;

use relim_service::{app, Config};
use tracing_subscriber::EnvFilter;

#[tokio::main]
async fn main() {
    tracing_subscriber::fmt().with_env_filter(EnvFilter::from_default_env().add_directive("info".parse().unwrap())).init();
    let path = std::env::args_os().nth(1).map(PathBuf::from).or_else(|| std::env::var_os("WORKBENCH_CONFIG").map(PathBuf::from));
    if let Err(e) = run(path).await {
        tracing::error!("{e}");
        std::process::exit(1);
    }
}

async fn run(config_path: Option<PathBuf>) -> Result<(), Box<dyn std::error::Error>> {
    let config = Config::load(config_path.as_deref())?;
    let router = app(config.clone())?;
    let listener = tokio::net::TcpListener::bind(&config.listen_addr).await?;
    tracing::info!(addr = %config.listen_addr, data = %config.data_dir.display(), "workbench listening");
    axum::serve(listener, router).with_graceful_shutdown(async { tokio::signal::ctrl_c().await.ok(); }).await?;
    Ok(())
}
