//! Result persistence: UTF-8 CSV tables with a header row and JSON bundles
//! with a `{metadata, payload}` top level. Numbers are written with 17
//! significant digits; non-finite values abort the workflow.

use serde::Serialize;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::config::{ResolvedRun, RunConfig};
use crate::CliError;

/// Every numeric tolerance baked into the computation, echoed for
/// reproducibility.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Tolerances {
    pub root_merge_tol: f64,
    pub root_residual_factor: f64,
    pub eigen_residual_factor: f64,
    pub defective_condition_max: f64,
    pub degenerate_rabi_tol: f64,
    pub t_min_decades: f64,
    pub fano_match_tol: f64,
    pub zero_residual_rel: f64,
    pub real_root_im_tol: f64,
    pub weak_pump_im_tol: f64,
    pub branch_gap: f64,
    pub oracle_local_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            root_merge_tol: autoion::numerics::RootFinderConfig::default().merge_tol,
            root_residual_factor: autoion::numerics::RootFinderConfig::default().residual_factor,
            eigen_residual_factor: autoion::numerics::eigen::EIGEN_RESIDUAL_FACTOR,
            defective_condition_max: autoion::numerics::eigen::DEFECTIVE_CONDITION_MAX,
            degenerate_rabi_tol: autoion::model::DEGENERACY_TOL,
            t_min_decades: autoion::model::TMIN_DECADES,
            fano_match_tol: autoion::zeros::FANO_MATCH_TOL,
            zero_residual_rel: autoion::zeros::ZERO_RESIDUAL_REL,
            real_root_im_tol: autoion::zeros::REAL_ROOT_IM_TOL,
            weak_pump_im_tol: autoion::zeros::WEAK_PUMP_IM_TOL,
            branch_gap: autoion::zeros::BRANCH_GAP,
            oracle_local_tol: autoion::oracle::LOCAL_TOL,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Metadata {
    pub tool: String,
    pub created_unix: u64,
    pub mode: String,
    pub config: RunConfig,
    pub tolerances: Tolerances,
}

impl Metadata {
    pub fn for_run(run: &ResolvedRun) -> Self {
        Metadata {
            tool: format!("autoion {}", env!("CARGO_PKG_VERSION")),
            created_unix: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            mode: run.mode.as_str().to_string(),
            config: run.echo.clone(),
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Serialize)]
pub struct Bundle<P: Serialize> {
    pub metadata: Metadata,
    pub payload: P,
}

/// 17 significant digits, '.' decimal separator, no locale.
pub fn fmt_num(v: f64) -> Result<String, CliError> {
    if !v.is_finite() {
        return Err(CliError::Numeric(autoion::Error::InvalidInput(
            "non-finite value in output payload".into(),
        )));
    }
    Ok(format!("{v:.16e}"))
}

/// A CSV table accumulated in memory and written once at the end.
pub struct Csv {
    buf: String,
    columns: usize,
    row_cells: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut buf = String::new();
        buf.push_str(&header.join(","));
        buf.push('\n');
        Csv {
            buf,
            columns: header.len(),
            row_cells: 0,
        }
    }

    pub fn num(&mut self, v: f64) -> Result<&mut Self, CliError> {
        self.cell_raw(&fmt_num(v)?);
        Ok(self)
    }

    pub fn int(&mut self, v: i64) -> &mut Self {
        self.cell_raw(&v.to_string());
        self
    }

    pub fn text(&mut self, v: &str) -> &mut Self {
        debug_assert!(!v.contains(',') && !v.contains('\n'));
        self.cell_raw(v);
        self
    }

    fn cell_raw(&mut self, v: &str) {
        if self.row_cells > 0 {
            self.buf.push(',');
        }
        self.buf.push_str(v);
        self.row_cells += 1;
    }

    pub fn end_row(&mut self) {
        debug_assert_eq!(self.row_cells, self.columns, "row width mismatch");
        self.buf.push('\n');
        self.row_cells = 0;
    }

    pub fn write_to(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, &self.buf)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
    }
}

pub fn write_json<P: Serialize>(path: &Path, bundle: &Bundle<P>) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(bundle)
        .map_err(|e| CliError::Config(format!("cannot serialize bundle: {e}")))?;
    text.push('\n');
    std::fs::write(path, text)
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Config(format!("cannot create {}: {e}", dir.display())))
}

/// File name fragment for a float tag such as a time or pump strength.
pub fn value_tag(v: f64) -> String {
    if v.is_infinite() {
        return "inf".to_string();
    }
    let mut s = String::new();
    let _ = write!(s, "{v}");
    s
}

pub fn out_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}
