use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use classilist_core::analytics::{confusion_matrix, per_class_counts, HistogramSpec};
use classilist_core::ingestion::{load_bundle, LoadError, LoadOptions, LoadedBundle};
use classilist_core::Dataset;
use classilist_server::{docs, router, AppState, Snapshot};

pub const OK: u8 = 0;
pub const INVALID: u8 = 1;
pub const ENVIRONMENT: u8 = 2;

/// Loads a bundle, printing diagnostics on failure and returning the exit code.
fn load(bundle: &Path, normalize: bool) -> Result<LoadedBundle, u8> {
    match load_bundle(bundle, LoadOptions { normalize }) {
        Ok(loaded) => Ok(loaded),
        Err(e @ LoadError::Io { .. }) => {
            eprintln!("error: {e}");
            Err(ENVIRONMENT)
        }
        Err(LoadError::Invalid(diags)) => {
            for d in &diags {
                println!("error: {d}");
            }
            println!("{} problem(s) found", diags.len());
            Err(INVALID)
        }
    }
}

fn count(n: usize, one: &str, many: &str) -> String {
    format!("{n} {}", if n == 1 { one } else { many })
}

pub fn validate(bundle: &Path, normalize: bool) -> u8 {
    let loaded = match load(bundle, normalize) {
        Ok(l) => l,
        Err(code) => return code,
    };
    for w in &loaded.warnings {
        println!("warning: {w}");
    }
    let ds = &loaded.dataset;
    println!(
        "{}, {}, {}",
        count(ds.len(), "sample", "samples"),
        count(ds.class_count(), "class", "classes"),
        count(ds.feature_names().len(), "feature", "features")
    );
    OK
}

pub fn summary(bundle: &Path, normalize: bool) -> u8 {
    match load(bundle, normalize) {
        Ok(loaded) => {
            print!("{}", summary_text(&loaded.dataset));
            OK
        }
        Err(code) => code,
    }
}

/// Confusion matrix (rows actual, columns predicted) followed by one
/// `A: TP=.. FP=.. FN=.. TN=..` line per class.
pub fn summary_text(ds: &Dataset) -> String {
    let m = confusion_matrix(ds);
    let names: Vec<&str> = ds.classes().iter().map(|c| c.name.as_str()).collect();
    let corner = "actual\\predicted";
    let label_w = names.iter().map(|n| n.len()).max().unwrap_or(0).max(corner.len());
    let cell_w = names
        .iter()
        .map(|n| n.len())
        .chain(m.rows().iter().flatten().map(|v| v.to_string().len()))
        .max()
        .unwrap_or(1);

    let mut out = format!("{corner:<label_w$}");
    for n in &names {
        out += &format!("  {n:>cell_w$}");
    }
    out.push('\n');
    for (a, row) in m.rows().iter().enumerate() {
        out += &format!("{:<label_w$}", names[a]);
        for v in row {
            out += &format!("  {v:>cell_w$}");
        }
        out.push('\n');
    }
    out.push('\n');
    for (c, counts) in per_class_counts(ds).iter().enumerate() {
        out += &format!(
            "{}: TP={} FP={} FN={} TN={}\n",
            names[c], counts.tp, counts.fp, counts.fn_, counts.tn
        );
    }
    out
}

pub fn report(bundle: &Path, out: &Path, spec: &HistogramSpec, members: bool, normalize: bool) -> u8 {
    if let Err(e) = spec.validate() {
        eprintln!("error: {e}");
        return ENVIRONMENT;
    }
    let loaded = match load(bundle, normalize) {
        Ok(l) => l,
        Err(code) => return code,
    };
    let snapshot = Snapshot::new(loaded.dataset);
    let doc = match docs::report(&snapshot, spec, members) {
        Ok(doc) => doc,
        Err(e) => {
            eprintln!("error: {e}");
            return INVALID;
        }
    };
    let mut json = serde_json::to_string_pretty(&doc).expect("report serializes");
    json.push('\n');
    let written = fs::create_dir_all(out)
        .and_then(|_| fs::write(out.join("report.json"), &json))
        .and_then(|_| fs::write(out.join("report.html"), crate::html::render(&doc)));
    match written {
        Ok(()) => {
            tracing::info!("wrote report to {}", out.display());
            OK
        }
        Err(e) => {
            eprintln!("error: cannot write report to {}: {e}", out.display());
            ENVIRONMENT
        }
    }
}

pub fn serve(bundle: &Path, addr: SocketAddr, assets: Option<PathBuf>, normalize: bool) -> u8 {
    let loaded = match load(bundle, normalize) {
        Ok(l) => l,
        Err(code) => return code,
    };
    for w in &loaded.warnings {
        tracing::warn!("{w}");
    }
    let mut state = AppState::with_dataset(loaded.dataset);
    if let Some(dir) = assets {
        state = state.with_assets(dir);
    }
    let runtime = match tokio::runtime::Runtime::new() {
        Ok(rt) => rt,
        Err(e) => {
            eprintln!("error: cannot start runtime: {e}");
            return ENVIRONMENT;
        }
    };
    runtime.block_on(async move {
        let listener = match tokio::net::TcpListener::bind(addr).await {
            Ok(l) => l,
            Err(e) => {
                eprintln!("error: cannot bind {addr}: {e}");
                return ENVIRONMENT;
            }
        };
        let local = listener.local_addr().map(|a| a.to_string()).unwrap_or_else(|_| addr.to_string());
        tracing::info!("listening on http://{local}");
        let shutdown = async {
            let _ = tokio::signal::ctrl_c().await;
            tracing::info!("shutting down");
        };
        match axum::serve(listener, router(state)).with_graceful_shutdown(shutdown).await {
            Ok(()) => OK,
            Err(e) => {
                eprintln!("error: server failed: {e}");
                ENVIRONMENT
            }
        }
    })
}
