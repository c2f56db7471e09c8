use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::Parser;
use imagelab_service::{serve_with_shutdown, Config};

/// imagelab HTTP service.
#[derive(Debug, Parser)]
#[command(name = "imagelab-server", version)]
struct Args {
    #[arg(long, env = "IMAGELAB_LISTEN", default_value = "127.0.0.1:8650")]
    listen: SocketAddr,
    /// Directory holding saved templates.
    #[arg(long, env = "IMAGELAB_TEMPLATE_DIR", default_value = "templates")]
    template_dir: PathBuf,
    /// Largest accepted source width or height in pixels.
    #[arg(long, env = "IMAGELAB_MAX_DIMENSION", default_value_t = 4096)]
    max_dimension: usize,
    /// Idle seconds before a session is reclaimed.
    #[arg(long, env = "IMAGELAB_SESSION_TTL", default_value_t = 3600)]
    session_ttl: u64,
    #[arg(long, env = "IMAGELAB_MAX_SESSIONS", default_value_t = 1024)]
    max_sessions: usize,
}

#[tokio::main]
async fn main() -> ExitCode {
    let args = Args::parse();
    let config = Config {
        listen: args.listen,
        template_dir: args.template_dir,
        max_dimension: args.max_dimension,
        session_ttl: Duration::from_secs(args.session_ttl),
        max_sessions: args.max_sessions,
        ..Config::default()
    };
    let listener = match tokio::net::TcpListener::bind(config.listen).await {
        Ok(l) => l,
        Err(e) => {
            eprintln!("imagelab-server: cannot listen on {}: {e}", config.listen);
            return ExitCode::FAILURE;
        }
    };
    eprintln!("imagelab-server: listening on {}", config.listen);
    let shutdown = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    match serve_with_shutdown(listener, config, shutdown).await {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("imagelab-server: {e}");
            ExitCode::FAILURE
        }
    }
}
