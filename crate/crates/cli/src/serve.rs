use std::io;
use std::path::PathBuf;
use std::sync::Arc;

use anyhow::Context;
use axum::Router;
use clap::Args;
use discourse_annotate::{router, SessionStore};
use tokio::net::TcpListener;
use tower_http::services::ServeDir;

use crate::args::Common;

#[derive(Args, Clone, Debug)]
pub struct ServeArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub addr: String,
    /// Static annotator bundle served for paths outside the API
    #[arg(long)]
    pub ui_dir: Option<PathBuf>,
}

/// Loads the dataset, replays stored sessions from `<out>/sessions` and
/// builds the application.
pub fn app(args: &ServeArgs) -> anyhow::Result<Router> {
    let dataset = args.common.load()?;
    let store = SessionStore::open(Arc::new(dataset), &args.common.out)
        .with_context(|| format!("opening session store in {}", args.common.out.display()))?;
    let api = router(Arc::new(store));
    Ok(match &args.ui_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    })
}

pub async fn bind(addr: &str) -> anyhow::Result<TcpListener> {
    TcpListener::bind(addr).await.map_err(|e| match e.kind() {
        io::ErrorKind::AddrInUse => anyhow::anyhow!("port in use: {addr} is already bound"),
        _ => anyhow::Error::new(e).context(format!("binding {addr}")),
    })
}

/// Serves until interrupted.
pub fn run(args: &ServeArgs) -> anyhow::Result<()> {
    let app = app(args)?;
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async {
        let listener = bind(&args.addr).await?;
        eprintln!("listening on http://{}", listener.local_addr()?);
        axum::serve(listener, app)
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await?;
        Ok(())
    })
}
