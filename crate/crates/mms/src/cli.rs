//! Command-line front end: run-configuration parsing, data ingestion,
//! orchestration of the four workflows, and result export.
//!
//! A run is described by a plain-text config (`key = value` grouped into
//! sections) plus optional CSV side files for point constraints and
//! tabulated boundary data. Unknown sections or keys are hard errors so a
//! typo cannot silently change an experiment. Re-running an identical
//! config byte-reproduces every output file.

use std::collections::HashSet;
use std::fmt::Write as FmtWrite;
use std::fs;
use std::io::Write as IoWrite;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::assembly::{dump_matrix, solve, BoundaryPlan, Solution};
use crate::boundary::{ConditionKind, Corner, CornerVariant, SideCondition, TabulatedSide};
use crate::constraints::{PointConstraint, Spreading};
use crate::element::Axis;
use crate::error::{Error, Result};
use crate::fields::{
    compare_to_reference, sample_line, sample_near, sample_on_x_line, sample_on_y_line,
    total_energy, write_energy, write_grid_csv, write_samples_csv, EnergyReport, ErrorNorms,
    FieldSample,
};
use crate::mesh::{BoundaryScaling, Material, Mesh, MeshSpec, Rect, Side};
use crate::surfaces::{Surface, CORNER_PLATE_REFERENCE};

pub const USAGE: &str = "\
usage: mms --config <path> [--mesh NxM] [--zeta <float>] [--out <dir>] [--quiet]

  --config <path>  run configuration file (required)
  --mesh NxM       override the mesh element counts, e.g. 71x71
  --zeta <float>   override the constraint spreading parameter
  --out <dir>      override the output directory
  --quiet          suppress the stdout summary line
  --help           print this text
";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Workflow {
    /// Corner-supported plate under uniform load; the report carries the
    /// normalized deflection/moment table against the published reference.
    ValidateCorner,
    /// Boundary-only solve (blending); constraints are rejected.
    Blend,
    /// Boundary plus interior point constraints.
    Reconstruct,
    /// Solve and summarize without exporting field CSVs.
    Report,
}

impl Workflow {
    pub fn name(self) -> &'static str {
        match self {
            Workflow::ValidateCorner => "validate-corner",
            Workflow::Blend => "blend",
            Workflow::Reconstruct => "reconstruct",
            Workflow::Report => "report",
        }
    }
}

impl FromStr for Workflow {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "validate-corner" | "validate_corner" => Ok(Workflow::ValidateCorner),
            "blend" => Ok(Workflow::Blend),
            "reconstruct" => Ok(Workflow::Reconstruct),
            "report" => Ok(Workflow::Report),
            other => Err(Error::Cli(format!("unknown workflow {other:?}"))),
        }
    }
}

/// Per-side condition source named in the config.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SideKind {
    Free,
    /// Kinematic zeros (w = theta_n = theta_tau = 0); needs no data source.
    Clamped,
    Kinematic,
    Curvature,
}

impl FromStr for SideKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "free" => Ok(SideKind::Free),
            "clamped" => Ok(SideKind::Clamped),
            "kinematic" | "kin" => Ok(SideKind::Kinematic),
            "curvature" | "cur" => Ok(SideKind::Curvature),
            other => Err(Error::Cli(format!("unknown side kind {other:?}"))),
        }
    }
}

/// Which skeleton lines get a CSV under `solution_lines/`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LineSelection {
    All,
    None,
    Chosen(Vec<(Axis, usize)>),
}

/// Fully resolved run description.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub workflow: Workflow,
    pub nx: usize,
    pub ny: usize,
    pub domain: Rect,
    pub material: Material,
    pub scaling: Option<BoundaryScaling>,
    pub q: f64,
    pub surface: Option<Surface>,
    pub boundary_file: Option<PathBuf>,
    pub side_kinds: [SideKind; 4],
    pub corners: Vec<(Corner, CornerVariant)>,
    pub constraint_file: Option<PathBuf>,
    pub zeta: Option<f64>,
    /// Spreading radius override; `None` leaves the kernel's default cutoff.
    pub cutoff: Option<f64>,
    pub out_dir: PathBuf,
    pub resolution: usize,
    pub lines: LineSelection,
    pub dump_matrix: bool,
}

impl RunConfig {
    pub fn mesh_spec(&self) -> MeshSpec {
        let mut spec = MeshSpec::uniform(self.domain, self.nx, self.ny, self.material);
        spec.scaling = self.scaling;
        spec
    }
}

fn cfg_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Config { line, msg: msg.into() }
}

/// One `key = value` occurrence with its location.
struct Item {
    line: usize,
    section: String,
    key: String,
    value: String,
}

fn scan_items(text: &str) -> Result<Vec<Item>> {
    let mut items = Vec::new();
    let mut section = String::new();
    let mut seen = HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        let body = body.trim();
        if body.is_empty() {
            continue;
        }
        if let Some(name) = body.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| cfg_err(line, "unterminated section header"))?
                .trim();
            if name.is_empty() {
                return Err(cfg_err(line, "empty section name"));
            }
            section = name.to_ascii_lowercase();
            continue;
        }
        let (key, value) = body
            .split_once('=')
            .ok_or_else(|| cfg_err(line, format!("expected key = value, got {body:?}")))?;
        let key = key.trim().to_ascii_lowercase();
        let value = value.trim().to_string();
        if key.is_empty() {
            return Err(cfg_err(line, "empty key"));
        }
        if value.is_empty() {
            return Err(cfg_err(line, format!("key {key:?} has no value")));
        }
        if !seen.insert((section.clone(), key.clone())) {
            return Err(cfg_err(line, format!("duplicate key {key:?}")));
        }
        items.push(Item { line, section: section.clone(), key, value });
    }
    Ok(items)
}

fn parse_num<T: FromStr>(it: &Item, what: &str) -> Result<T> {
    it.value
        .parse()
        .map_err(|_| cfg_err(it.line, format!("malformed {what}: {:?}", it.value)))
}

fn resolve_path(base: &Path, value: &str) -> PathBuf {
    let p = PathBuf::from(value);
    if p.is_absolute() {
        p
    } else {
        base.join(p)
    }
}

fn parse_lines(it: &Item) -> Result<LineSelection> {
    match it.value.to_ascii_lowercase().as_str() {
        "all" => return Ok(LineSelection::All),
        "none" => return Ok(LineSelection::None),
        _ => {}
    }
    let mut chosen = Vec::new();
    for tok in it.value.split([',', ' ']).filter(|t| !t.is_empty()) {
        let (axis, idx) = tok
            .split_once(':')
            .ok_or_else(|| cfg_err(it.line, format!("line token {tok:?} is not axis:index")))?;
        let axis = match axis.to_ascii_lowercase().as_str() {
            "x" => Axis::X,
            "y" => Axis::Y,
            other => return Err(cfg_err(it.line, format!("unknown line axis {other:?}"))),
        };
        let idx = idx
            .parse()
            .map_err(|_| cfg_err(it.line, format!("malformed line index {idx:?}")))?;
        chosen.push((axis, idx));
    }
    if chosen.is_empty() {
        return Err(cfg_err(it.line, "no lines selected; use all, none, or axis:index"));
    }
    Ok(LineSelection::Chosen(chosen))
}

/// Parse and validate a run configuration. Relative file paths are resolved
/// against the config's directory.
pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path)?;
    let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let items = scan_items(&text)?;

    let mut workflow: Option<(Workflow, usize)> = None;
    let (mut nx, mut ny): (Option<usize>, Option<usize>) = (None, None);
    let mut domain: Option<Rect> = None;
    let mut material = Material::default();
    let (mut scaling_rows, mut scaling_factor): (Option<(usize, usize)>, Option<(f64, usize)>) =
        (None, None);
    let mut q = 0.0;
    let mut surface: Option<(Surface, usize)> = None;
    let mut boundary_file: Option<(PathBuf, usize)> = None;
    let mut default_kind: Option<SideKind> = None;
    let mut side_kinds: [Option<SideKind>; 4] = [None; 4];
    let mut corners = Vec::new();
    let mut constraint_file: Option<PathBuf> = None;
    let mut zeta: Option<(f64, usize)> = None;
    let mut cutoff: Option<(f64, usize)> = None;
    let mut out_dir = PathBuf::from("out");
    let mut resolution = 3usize;
    let mut lines = LineSelection::All;
    let mut matrix = false;

    for it in &items {
        match (it.section.as_str(), it.key.as_str()) {
            ("", "workflow") => {
                workflow = Some((it.value.parse().map_err(|e| cfg_err(it.line, format!("{e}")))?, it.line))
            }
            ("", k) => return Err(cfg_err(it.line, format!("key {k:?} outside any section"))),
            ("mesh", "nx") => nx = Some(parse_num(it, "element count")?),
            ("mesh", "ny") => ny = Some(parse_num(it, "element count")?),
            ("mesh", "domain") => {
                let parts: Vec<f64> = it
                    .value
                    .split_whitespace()
                    .map(|t| {
                        t.parse()
                            .map_err(|_| cfg_err(it.line, format!("malformed coordinate {t:?}")))
                    })
                    .collect::<Result<_>>()?;
                let [x0, y0, x1, y1] = parts[..] else {
                    return Err(cfg_err(it.line, "domain needs exactly: x0 y0 x1 y1"));
                };
                domain =
                    Some(Rect::new(x0, y0, x1, y1).map_err(|e| cfg_err(it.line, format!("{e}")))?);
            }
            ("mesh", "scaling_rows") => scaling_rows = Some((parse_num(it, "row count")?, it.line)),
            ("mesh", "scaling_factor") => {
                scaling_factor = Some((parse_num(it, "factor")?, it.line))
            }
            ("material", "d") => material.d = parse_num(it, "stiffness")?,
            ("material", "nu") => material.nu = parse_num(it, "ratio")?,
            ("load", "q") => q = parse_num(it, "load")?,
            ("boundary", "surface") => {
                surface = Some((
                    Surface::from_name(&it.value).map_err(|e| cfg_err(it.line, format!("{e}")))?,
                    it.line,
                ))
            }
            ("boundary", "file") => boundary_file = Some((resolve_path(&base, &it.value), it.line)),
            ("boundary", "default") => {
                default_kind = Some(it.value.parse().map_err(|e| cfg_err(it.line, format!("{e}")))?)
            }
            ("boundary", side @ ("left" | "right" | "bottom" | "top")) => {
                let s: Side = side.parse().expect("literal side names");
                side_kinds[s as usize] =
                    Some(it.value.parse().map_err(|e| cfg_err(it.line, format!("{e}")))?);
            }
            ("corner", k) => {
                let corner: Corner =
                    k.parse().map_err(|_| cfg_err(it.line, format!("unknown corner {k:?}")))?;
                let variant: CornerVariant =
                    it.value.parse().map_err(|e| cfg_err(it.line, format!("{e}")))?;
                corners.push((corner, variant));
            }
            ("constraints", "file") => constraint_file = Some(resolve_path(&base, &it.value)),
            ("constraints", "zeta") => zeta = Some((parse_num(it, "zeta")?, it.line)),
            ("constraints", "cutoff") => cutoff = Some((parse_num(it, "cutoff")?, it.line)),
            ("output", "dir") => out_dir = resolve_path(&base, &it.value),
            ("output", "resolution") => {
                resolution = parse_num(it, "resolution")?;
                if resolution < 2 {
                    return Err(cfg_err(it.line, "resolution must be at least 2"));
                }
            }
            ("output", "lines") => lines = parse_lines(it)?,
            ("output", "matrix") => matrix = parse_num(it, "flag")?,
            (s @ ("mesh" | "material" | "load" | "boundary" | "constraints" | "output"), k) => {
                return Err(cfg_err(it.line, format!("unknown key {k:?} in section [{s}]")))
            }
            (s, _) => return Err(cfg_err(it.line, format!("unknown section [{s}]"))),
        }
    }

    let (workflow, wf_line) =
        workflow.ok_or_else(|| cfg_err(1, "missing top-level `workflow = ...`"))?;
    let nx = nx.ok_or_else(|| cfg_err(1, "missing nx in [mesh]"))?;
    let ny = ny.ok_or_else(|| cfg_err(1, "missing ny in [mesh]"))?;

    let scaling = match (scaling_rows, scaling_factor) {
        (None, None) => None,
        (Some((rows, line)), Some((factor, _))) => {
            Some(BoundaryScaling::new(rows, factor).map_err(|e| cfg_err(line, format!("{e}")))?)
        }
        (Some((_, line)), None) | (None, Some((_, line))) => {
            return Err(cfg_err(line, "scaling_rows and scaling_factor go together"))
        }
    };

    if let (Some((_, sl)), Some(_)) = (&surface, &boundary_file) {
        return Err(cfg_err(*sl, "boundary surface and file are mutually exclusive"));
    }
    let has_source = surface.is_some() || boundary_file.is_some();
    let default_kind =
        default_kind.unwrap_or(if has_source { SideKind::Kinematic } else { SideKind::Free });
    let side_kinds = side_kinds.map(|k| k.unwrap_or(default_kind));
    for (s, &kind) in Side::ALL.iter().zip(&side_kinds) {
        if matches!(kind, SideKind::Kinematic | SideKind::Curvature) && !has_source {
            return Err(cfg_err(
                wf_line,
                format!("side {s} wants boundary data but [boundary] names no surface or file"),
            ));
        }
    }

    let domain = match domain {
        Some(d) => d,
        None => match surface {
            Some((s, _)) => s.domain(),
            None => Rect::new(0.0, 0.0, 1.0, 1.0).expect("unit square"),
        },
    };

    if let Some((_, zl)) = zeta {
        if constraint_file.is_none() {
            return Err(cfg_err(zl, "zeta given but no constraint file"));
        }
    }
    if let Some((_, cl)) = cutoff {
        if zeta.is_none() {
            return Err(cfg_err(cl, "cutoff only applies together with zeta"));
        }
    }
    match workflow {
        Workflow::Reconstruct if constraint_file.is_none() => {
            return Err(cfg_err(wf_line, "reconstruct needs a [constraints] file"));
        }
        Workflow::Blend | Workflow::ValidateCorner if constraint_file.is_some() => {
            return Err(cfg_err(
                wf_line,
                format!("{} takes no constraints; use reconstruct", workflow.name()),
            ));
        }
        Workflow::ValidateCorner if q == 0.0 => {
            return Err(cfg_err(wf_line, "validate-corner needs a nonzero load q"));
        }
        _ => {}
    }

    Ok(RunConfig {
        workflow,
        nx,
        ny,
        domain,
        material,
        scaling,
        q,
        surface: surface.map(|(s, _)| s),
        boundary_file: boundary_file.map(|(p, _)| p),
        side_kinds,
        corners,
        constraint_file,
        zeta: zeta.map(|(z, _)| z),
        cutoff: cutoff.map(|(c, _)| c),
        out_dir,
        resolution,
        lines,
        dump_matrix: matrix,
    })
}

/// CSV rows `x,y,target`, `#` comments and an optional literal header.
pub fn read_constraints(path: &Path) -> Result<Vec<PointConstraint>> {
    let text = fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() || body.eq_ignore_ascii_case("x,y,target") {
            continue;
        }
        let fields: Vec<&str> = body.split(',').map(str::trim).collect();
        let [x, y, target] = fields[..] else {
            return Err(cfg_err(line, format!("constraint row needs x,y,target: {body:?}")));
        };
        let parse = |t: &str| {
            t.parse::<f64>()
                .map_err(|_| cfg_err(line, format!("malformed constraint number {t:?}")))
        };
        out.push(PointConstraint { x: parse(x)?, y: parse(y)?, target: parse(target)? });
    }
    if out.is_empty() {
        return Err(Error::Cli(format!("{} holds no constraint rows", path.display())));
    }
    Ok(out)
}

/// CSV rows `side,s,w,d1,d2` where s is arclength from the side's start
/// (y - y0 on vertical sides, x - x0 on horizontal ones) and d1/d2 are the
/// normal and tangential prescribed derivatives.
pub fn read_boundary_table(
    path: &Path,
    kinds: &[SideKind; 4],
) -> Result<[Option<TabulatedSide>; 4]> {
    let text = fs::read_to_string(path)?;
    let mut rows: [Vec<(f64, f64, f64, f64)>; 4] = Default::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() || body.eq_ignore_ascii_case("side,s,w,d1,d2") {
            continue;
        }
        let fields: Vec<&str> = body.split(',').map(str::trim).collect();
        let [side, s, w, d1, d2] = fields[..] else {
            return Err(cfg_err(line, format!("boundary row needs side,s,w,d1,d2: {body:?}")));
        };
        let side: Side = side.parse().map_err(|e| cfg_err(line, format!("{e}")))?;
        let parse = |t: &str| {
            t.parse::<f64>()
                .map_err(|_| cfg_err(line, format!("malformed boundary number {t:?}")))
        };
        rows[side as usize].push((parse(s)?, parse(w)?, parse(d1)?, parse(d2)?));
    }
    let mut out: [Option<TabulatedSide>; 4] = Default::default();
    for side in Side::ALL {
        let kind = match kinds[side as usize] {
            SideKind::Kinematic => ConditionKind::Kinematic,
            SideKind::Curvature => ConditionKind::Curvature,
            _ => continue,
        };
        let data = std::mem::take(&mut rows[side as usize]);
        if data.is_empty() {
            return Err(Error::BoundaryConflict(format!(
                "side {side} wants tabulated data but {} has no rows for it",
                path.display()
            )));
        }
        out[side as usize] = Some(TabulatedSide::new(kind, data)?);
    }
    for side in Side::ALL {
        if out[side as usize].is_none() && !rows[side as usize].is_empty() {
            return Err(Error::BoundaryConflict(format!(
                "{} tabulates side {side} but that side is {:?}",
                path.display(),
                kinds[side as usize]
            )));
        }
    }
    Ok(out)
}

fn side_midpoint(mesh: &Mesh, side: Side, i: usize) -> (f64, f64) {
    let r = mesh.spec.rect;
    match side {
        Side::Left => (r.x0, mesh.y_centers[i]),
        Side::Right => (r.x1, mesh.y_centers[i]),
        Side::Bottom => (mesh.x_centers[i], r.y0),
        Side::Top => (mesh.x_centers[i], r.y1),
    }
}

fn build_plan(cfg: &RunConfig, mesh: &Mesh) -> Result<BoundaryPlan> {
    let tables = match &cfg.boundary_file {
        Some(path) => Some(read_boundary_table(path, &cfg.side_kinds)?),
        None => None,
    };
    let mut plan = BoundaryPlan::all_free(mesh);
    for side in Side::ALL {
        let count = if side.is_vertical() { mesh.ny() } else { mesh.nx() };
        let kind = cfg.side_kinds[side as usize];
        let conds: Vec<SideCondition> = (0..count)
            .map(|i| {
                let (x, y) = side_midpoint(mesh, side, i);
                Ok(match kind {
                    SideKind::Free => SideCondition::Free,
                    SideKind::Clamped => {
                        SideCondition::Kinematic { w: 0.0, theta_n: 0.0, theta_tau: 0.0 }
                    }
                    SideKind::Kinematic | SideKind::Curvature => {
                        if let Some(surface) = cfg.surface {
                            let ck = if kind == SideKind::Kinematic {
                                ConditionKind::Kinematic
                            } else {
                                ConditionKind::Curvature
                            };
                            surface.side_condition(ck, side, x, y)
                        } else {
                            let table = tables
                                .as_ref()
                                .and_then(|t| t[side as usize].as_ref())
                                .expect("validated in read_boundary_table");
                            let s = if side.is_vertical() {
                                y - mesh.spec.rect.y0
                            } else {
                                x - mesh.spec.rect.x0
                            };
                            table.at(s)?
                        }
                    }
                })
            })
            .collect::<Result<_>>()?;
        plan.set_side(side, conds)?;
    }
    for corner in Corner::ALL {
        if let Some(&(_, variant)) = cfg.corners.iter().find(|(c, _)| *c == corner) {
            plan.set_corner(corner, variant)?;
        }
    }
    Ok(plan)
}

/// Everything a run produced, with the solved state for further sampling.
pub struct RunOutcome {
    pub mesh: Mesh,
    pub solution: Solution,
    pub energy: EnergyReport,
    pub norms: Option<ErrorNorms>,
    pub center: FieldSample,
    pub out_dir: PathBuf,
}

fn fixed(v: f64) -> String {
    format!("{v:.12e}")
}

fn corner_table(cfg: &RunConfig, mesh: &Mesh, sol: &Solution) -> Result<String> {
    let r = cfg.domain;
    let (lx, ly) = (r.width(), r.height());
    let wn = cfg.material.d / (cfg.q * lx.powi(4));
    let mn = 1.0 / (cfg.q * lx.powi(2));
    let slack = 1e-9 * lx.max(ly);
    let mark = |offset: f64| if offset.abs() > slack { "*" } else { "" };
    let mut t = String::new();
    writeln!(t, "corner table: DW/(q lx^4) and M/(q lx^2); * = nearest skeleton line")
        .expect("string write");
    writeln!(t, "{:>6} {:>6} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12}",
        "y/ly", "x/lx", "w_mms", "w_ref", "mx_mms", "mx_ref", "my_mms", "my_ref")
        .expect("string write");
    for &(yf, xf, w_ref, mx_ref, my_ref) in &CORNER_PLATE_REFERENCE {
        let (x, y) = (r.x0 + xf * lx, r.y0 + yf * ly);
        let w = sample_near(mesh, sol, x, y)?;
        let (iy, dy) = mesh.nearest_x_line(y);
        let mx = sample_on_x_line(mesh, sol, iy, x)?;
        let (ix, dx) = mesh.nearest_y_line(x);
        let my = sample_on_y_line(mesh, sol, ix, y)?;
        writeln!(
            t,
            "{yf:>6.2} {xf:>6.2} {:>12} {w_ref:>12.6} {:>12} {mx_ref:>12.6} {:>12} {my_ref:>12.6}",
            format!("{:.6}{}", w.values.w * wn, mark(w.offset)),
            format!("{:.6}{}", mx.values.m_n * mn, mark(dy)),
            format!("{:.6}{}", my.values.m_n * mn, mark(dx)),
        )
        .expect("string write");
    }
    Ok(t)
}

fn write_report(
    cfg: &RunConfig,
    mesh: &Mesh,
    sol: &Solution,
    energy: &EnergyReport,
    norms: &Option<ErrorNorms>,
    center: &FieldSample,
    constraints: &[PointConstraint],
    out: &mut dyn IoWrite,
) -> Result<()> {
    writeln!(out, "workflow = {}", cfg.workflow.name())?;
    writeln!(out, "{}", mesh.summary())?;
    writeln!(out, "unknowns = {}", sol.unknowns)?;
    writeln!(out, "residual = {}", fixed(sol.residual))?;
    writeln!(out, "energy_total = {}", fixed(energy.total))?;
    writeln!(out, "energy_per_element_max = {}", fixed(energy.max()))?;
    let (cx, cy) = ((cfg.domain.x0 + cfg.domain.x1) / 2.0, (cfg.domain.y0 + cfg.domain.y1) / 2.0);
    writeln!(out, "center = ({}, {})", fixed(cx), fixed(cy))?;
    writeln!(out, "center_w = {} (line offset {})", fixed(center.values.w), fixed(center.offset))?;
    if let Some(surface) = cfg.surface {
        writeln!(out, "surface = {}", surface.name())?;
        writeln!(out, "surface_reference_energy = {}", fixed(surface.reference_energy()))?;
        writeln!(out, "surface_center_w = {}", fixed(surface.w(center.x, center.y)))?;
        if let Some(n) = norms {
            writeln!(out, "norms_resolution = {}", cfg.resolution)?;
            writeln!(out, "max_dw = {} rms_dw = {}", fixed(n.max_w), fixed(n.rms_w))?;
            writeln!(out, "max_dtheta = {} rms_dtheta = {}", fixed(n.max_theta), fixed(n.rms_theta))?;
            writeln!(out, "max_dm = {} rms_dm = {}", fixed(n.max_m), fixed(n.rms_m))?;
        }
    }
    if !constraints.is_empty() {
        writeln!(out, "constraints = {}", constraints.len())?;
        if let Some(z) = cfg.zeta {
            match cfg.cutoff {
                Some(c) => writeln!(out, "spreading: zeta = {} cutoff = {}", fixed(z), fixed(c))?,
                None => writeln!(out, "spreading: zeta = {}", fixed(z))?,
            }
        }
        for (i, c) in constraints.iter().enumerate() {
            let s = sample_near(mesh, sol, c.x, c.y)?;
            let (ix, iy) = mesh.locate(c.x, c.y)?;
            let e = mesh.id(ix, iy);
            writeln!(
                out,
                "constraint {i}: x = {} y = {} target = {} w = {} multiplier = {} load = {}",
                fixed(c.x),
                fixed(c.y),
                fixed(c.target),
                fixed(s.values.w),
                fixed(sol.multipliers[i]),
                fixed(sol.loads[e]),
            )?;
        }
    }
    if cfg.workflow == Workflow::ValidateCorner {
        write!(out, "{}", corner_table(cfg, mesh, sol)?)?;
    }
    Ok(())
}

fn write_lines(cfg: &RunConfig, mesh: &Mesh, sol: &Solution, dir: &Path) -> Result<()> {
    let chosen: Vec<(Axis, usize)> = match &cfg.lines {
        LineSelection::None => return Ok(()),
        LineSelection::All => (0..mesh.ny())
            .map(|iy| (Axis::X, iy))
            .chain((0..mesh.nx()).map(|ix| (Axis::Y, ix)))
            .collect(),
        LineSelection::Chosen(v) => v.clone(),
    };
    for (axis, index) in chosen {
        let samples = sample_line(mesh, sol, axis, index, cfg.resolution)?;
        let name = match axis {
            Axis::X => format!("x_line_{index:04}.csv"),
            Axis::Y => format!("y_line_{index:04}.csv"),
        };
        let mut f = fs::File::create(dir.join(name))?;
        write_samples_csv(&mut f, &samples)?;
    }
    Ok(())
}

/// Execute a run: solve, then export the artifacts into the output
/// directory (`report.txt`, `energy.txt`, and for field-exporting workflows
/// `grid.csv` plus `solution_lines/*.csv`).
pub fn run(cfg: &RunConfig) -> Result<RunOutcome> {
    let mesh = cfg.mesh_spec().build()?;
    let plan = build_plan(cfg, &mesh)?;
    let constraints = match &cfg.constraint_file {
        Some(path) => read_constraints(path)?,
        None => Vec::new(),
    };
    let spreading = match (cfg.zeta, cfg.cutoff) {
        (Some(z), Some(c)) => Some(Spreading::with_cutoff(z, c)?),
        (Some(z), None) => Some(Spreading::new(z)?),
        (None, _) => None,
    };
    let sol = solve(&mesh, &plan, cfg.q, &constraints, spreading)?;

    let energy = total_energy(&mesh, &sol)?;
    let norms = match cfg.surface {
        Some(surface) => Some(compare_to_reference(&mesh, &sol, surface, cfg.resolution)?),
        None => None,
    };
    let (cx, cy) = ((cfg.domain.x0 + cfg.domain.x1) / 2.0, (cfg.domain.y0 + cfg.domain.y1) / 2.0);
    let center = sample_near(&mesh, &sol, cx, cy)?;

    fs::create_dir_all(&cfg.out_dir)?;
    let mut report = fs::File::create(cfg.out_dir.join("report.txt"))?;
    write_report(cfg, &mesh, &sol, &energy, &norms, &center, &constraints, &mut report)?;
    let mut efile = fs::File::create(cfg.out_dir.join("energy.txt"))?;
    write_energy(&mut efile, &energy)?;
    if cfg.workflow != Workflow::Report {
        let mut grid = fs::File::create(cfg.out_dir.join("grid.csv"))?;
        write_grid_csv(&mut grid, &mesh, &sol)?;
        let lines_dir = cfg.out_dir.join("solution_lines");
        fs::create_dir_all(&lines_dir)?;
        write_lines(cfg, &mesh, &sol, &lines_dir)?;
    }
    if cfg.dump_matrix {
        let mut m = fs::File::create(cfg.out_dir.join("matrix.txt"))?;
        dump_matrix(&mesh, &plan, cfg.q, &constraints, spreading, &mut m)?;
    }

    Ok(RunOutcome { mesh, solution: sol, energy, norms, center, out_dir: cfg.out_dir.clone() })
}

/// Command-line overrides applied on top of the parsed config.
#[derive(Debug, Default)]
pub struct CliArgs {
    pub config: Option<PathBuf>,
    pub mesh: Option<(usize, usize)>,
    pub zeta: Option<f64>,
    pub out: Option<PathBuf>,
    pub quiet: bool,
    pub help: bool,
}

pub fn parse_args<I: IntoIterator<Item = String>>(args: I) -> Result<CliArgs> {
    let mut it = args.into_iter();
    let mut out = CliArgs::default();
    let missing = |flag: &str| Error::Cli(format!("{flag} needs a value"));
    while let Some(arg) = it.next() {
        match arg.as_str() {
            "--config" => {
                out.config = Some(PathBuf::from(it.next().ok_or_else(|| missing("--config"))?))
            }
            "--mesh" => {
                let v = it.next().ok_or_else(|| missing("--mesh"))?;
                let (nx, ny) = v
                    .split_once(['x', 'X'])
                    .ok_or_else(|| Error::Cli(format!("--mesh wants NxM, got {v:?}")))?;
                let parse = |t: &str| {
                    t.parse::<usize>()
                        .map_err(|_| Error::Cli(format!("--mesh wants NxM, got {v:?}")))
                };
                out.mesh = Some((parse(nx)?, parse(ny)?));
            }
            "--zeta" => {
                let v = it.next().ok_or_else(|| missing("--zeta"))?;
                out.zeta =
                    Some(v.parse().map_err(|_| Error::Cli(format!("malformed zeta {v:?}")))?);
            }
            "--out" => out.out = Some(PathBuf::from(it.next().ok_or_else(|| missing("--out"))?)),
            "--quiet" => out.quiet = true,
            "--help" | "-h" => out.help = true,
            other => return Err(Error::Cli(format!("unknown argument {other:?}"))),
        }
    }
    Ok(out)
}

pub fn apply_overrides(cfg: &mut RunConfig, args: &CliArgs) -> Result<()> {
    if let Some((nx, ny)) = args.mesh {
        cfg.nx = nx;
        cfg.ny = ny;
    }
    if let Some(z) = args.zeta {
        if cfg.constraint_file.is_none() {
            return Err(Error::Cli("--zeta given but the config has no constraints".into()));
        }
        cfg.zeta = Some(z);
    }
    if let Some(out) = &args.out {
        cfg.out_dir = out.clone();
    }
    Ok(())
}

/// Entry point behind the `mms` binary. Returns the process exit code:
/// 0 on success, 2 for usage/config errors, 1 for runtime failures.
pub fn main<I: IntoIterator<Item = String>>(args: I) -> i32 {
    let args = match parse_args(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            eprint!("{USAGE}");
            return 2;
        }
    };
    if args.help {
        print!("{USAGE}");
        return 0;
    }
    let Some(config_path) = &args.config else {
        eprintln!("error: --config is required");
        eprint!("{USAGE}");
        return 2;
    };
    let mut cfg = match parse_config(config_path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    if let Err(e) = apply_overrides(&mut cfg, &args) {
        eprintln!("error: {e}");
        return 2;
    }
    match run(&cfg) {
        Ok(outcome) => {
            if !args.quiet {
                println!(
                    "{}: {} x {}, unknowns {}, residual {:.3e}, energy {:.6} -> {}",
                    cfg.workflow.name(),
                    cfg.nx,
                    cfg.ny,
                    outcome.solution.unknowns,
                    outcome.solution.residual,
                    outcome.energy.total,
                    outcome.out_dir.display(),
                );
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_file(dir: &Path, name: &str, text: &str) -> PathBuf {
        let p = dir.join(name);
        fs::write(&p, text).unwrap();
        p
    }

    #[test]
    fn args_parse_and_reject() {
        let a = parse_args(
            ["--config", "run.cfg", "--mesh", "21x31", "--zeta", "50", "--out", "o", "--quiet"]
                .map(String::from),
        )
        .unwrap();
        assert_eq!(a.config.as_deref(), Some(Path::new("run.cfg")));
        assert_eq!(a.mesh, Some((21, 31)));
        assert_eq!(a.zeta, Some(50.0));
        assert!(a.quiet);
        assert!(parse_args(["--mesh".into(), "21".into()]).is_err());
        assert!(parse_args(["--frobnicate".into()]).is_err());
        assert!(parse_args(["--config".into()]).is_err());
    }

    /// Minimal clamped config: parses with the documented defaults
    /// D = 1, nu = 0, q = 0 on the unit square.
    #[test]
    fn minimal_config_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_file(
            dir.path(),
            "min.cfg",
            "workflow = blend\n[mesh]\nnx = 1\nny = 1\n[boundary]\ndefault = clamped\n",
        );
        let cfg = parse_config(&p).unwrap();
        assert_eq!(cfg.workflow, Workflow::Blend);
        assert_eq!((cfg.nx, cfg.ny), (1, 1));
        assert_eq!(cfg.material, Material { d: 1.0, nu: 0.0 });
        assert_eq!(cfg.q, 0.0);
        assert_eq!(cfg.domain, Rect::new(0.0, 0.0, 1.0, 1.0).unwrap());
        assert_eq!(cfg.side_kinds, [SideKind::Clamped; 4]);
        // and it solves to the flat zero surface
        let out = run(&cfg).unwrap();
        assert!(out.energy.total.abs() <= 1e-18);
        assert!(out.center.values.w.abs() <= 1e-12);
    }

    #[test]
    fn config_errors_carry_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let bad_key = write_file(
            dir.path(),
            "a.cfg",
            "workflow = blend\n[mesh]\nnx = 3\nny = 3\nnz = 3\n",
        );
        match parse_config(&bad_key) {
            Err(Error::Config { line, msg }) => {
                assert_eq!(line, 5);
                assert!(msg.contains("nz"), "{msg}");
            }
            other => panic!("wanted config error, got {other:?}"),
        }
        let bad_section = write_file(dir.path(), "b.cfg", "workflow = blend\n[grid]\nnx = 3\n");
        match parse_config(&bad_section) {
            Err(Error::Config { line, .. }) => assert_eq!(line, 3),
            other => panic!("wanted config error, got {other:?}"),
        }
        let dup = write_file(dir.path(), "c.cfg", "workflow = blend\n[mesh]\nnx = 3\nnx = 4\n");
        assert!(matches!(parse_config(&dup), Err(Error::Config { line: 4, .. })));
        let conflict = write_file(
            dir.path(),
            "d.cfg",
            "workflow = blend\n[mesh]\nnx = 3\nny = 3\n[boundary]\nsurface = coscos\nfile = t.csv\n",
        );
        assert!(matches!(parse_config(&conflict), Err(Error::Config { line: 6, .. })));
        let zeta = write_file(
            dir.path(),
            "e.cfg",
            "workflow = blend\n[mesh]\nnx = 3\nny = 3\n[boundary]\nsurface = coscos\n[constraints]\nzeta = 50\n",
        );
        assert!(matches!(parse_config(&zeta), Err(Error::Config { line: 8, .. })));
        let cutoff = write_file(
            dir.path(),
            "e2.cfg",
            "workflow = blend\n[mesh]\nnx = 3\nny = 3\n[boundary]\nsurface = coscos\n[constraints]\ncutoff = 0.6\n",
        );
        assert!(matches!(parse_config(&cutoff), Err(Error::Config { line: 8, .. })));
        let recon = write_file(
            dir.path(),
            "f.cfg",
            "workflow = reconstruct\n[mesh]\nnx = 3\nny = 3\n[boundary]\nsurface = coscos\n",
        );
        assert!(matches!(parse_config(&recon), Err(Error::Config { line: 1, .. })));
    }

    #[test]
    fn constraint_csv_rows() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_file(
            dir.path(),
            "c.csv",
            "x,y,target\n# center pin\n0.0, 0.0, 1.0\n0.25,0.1,-2\n",
        );
        let cs = read_constraints(&p).unwrap();
        assert_eq!(cs.len(), 2);
        assert_eq!((cs[0].x, cs[0].y, cs[0].target), (0.0, 0.0, 1.0));
        assert_eq!(cs[1].target, -2.0);
        let bad = write_file(dir.path(), "bad.csv", "0.0, 0.0\n");
        assert!(read_constraints(&bad).is_err());
        let empty = write_file(dir.path(), "empty.csv", "# nothing\n");
        assert!(read_constraints(&empty).is_err());
    }

    #[test]
    fn tabulated_boundary_feeds_the_plan() {
        // a plane w = x + 2y prescribed through tabulated kinematic data
        let dir = tempfile::tempdir().unwrap();
        let mut csv = String::from("side,s,w,d1,d2\n");
        // vertical sides: s runs in y, d1 = Wx, d2 = Wy
        for side in ["left", "right"] {
            let x = if side == "left" { 0.0 } else { 1.0 };
            for s in [0.0, 1.0] {
                csv += &format!("{side},{s},{},1,2\n", x + 2.0 * s);
            }
        }
        // horizontal sides: s runs in x, d1 = Wy, d2 = Wx
        for side in ["bottom", "top"] {
            let y = if side == "bottom" { 0.0 } else { 1.0 };
            for s in [0.0, 1.0] {
                csv += &format!("{side},{s},{},2,1\n", s + 2.0 * y);
            }
        }
        write_file(dir.path(), "edge.csv", &csv);
        let p = write_file(
            dir.path(),
            "run.cfg",
            "workflow = blend\n[mesh]\nnx = 3\nny = 3\n[boundary]\nfile = edge.csv\n\
             [output]\ndir = o\nlines = none\n",
        );
        let cfg = parse_config(&p).unwrap();
        assert_eq!(cfg.side_kinds, [SideKind::Kinematic; 4]);
        let out = run(&cfg).unwrap();
        assert!(out.energy.total <= 1e-18);
        assert!((out.center.values.w - 1.5).abs() < 1e-9, "{}", out.center.values.w);
        // missing side rows are an error
        let partial = write_file(dir.path(), "partial.csv", "left,0,0,0,0\nleft,1,0,0,0\n");
        let p2 = write_file(
            dir.path(),
            "run2.cfg",
            &format!(
                "workflow = blend\n[mesh]\nnx = 3\nny = 3\n[boundary]\nfile = {}\n",
                partial.display()
            ),
        );
        assert!(run(&parse_config(&p2).unwrap()).is_err());
    }

    #[test]
    fn run_writes_deterministic_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_file(
            dir.path(),
            "run.cfg",
            "workflow = blend\n[mesh]\nnx = 5\nny = 5\n[boundary]\nsurface = coscos\n\
             [output]\ndir = art\nlines = x:2 y:0\nmatrix = true\n",
        );
        let cfg = parse_config(&p).unwrap();
        let out = run(&cfg).unwrap();
        let art = out.out_dir;
        let read = |name: &str| fs::read(art.join(name)).unwrap();
        for name in ["report.txt", "energy.txt", "grid.csv", "matrix.txt"] {
            assert!(!read(name).is_empty(), "{name} missing");
        }
        assert!(art.join("solution_lines/x_line_0002.csv").exists());
        assert!(art.join("solution_lines/y_line_0000.csv").exists());
        assert!(!art.join("solution_lines/x_line_0000.csv").exists());
        let first: Vec<Vec<u8>> =
            ["report.txt", "energy.txt", "grid.csv"].iter().map(|n| read(n)).collect();
        run(&cfg).unwrap();
        let second: Vec<Vec<u8>> =
            ["report.txt", "energy.txt", "grid.csv"].iter().map(|n| read(n)).collect();
        assert_eq!(first, second, "rerun must byte-reproduce artifacts");
        let report = String::from_utf8(read("report.txt")).unwrap();
        assert!(report.contains("workflow = blend"));
        assert!(report.contains("surface = coscos"));
        assert!(report.contains("max_dw"));
    }

    #[test]
    fn reconstruct_and_report_workflows() {
        let dir = tempfile::tempdir().unwrap();
        write_file(dir.path(), "pin.csv", "0.0, 0.0, 1.0\n");
        let p = write_file(
            dir.path(),
            "r.cfg",
            "workflow = reconstruct\n[mesh]\nnx = 5\nny = 5\n[boundary]\nsurface = coscos\n\
             [constraints]\nfile = pin.csv\nzeta = 50\ncutoff = 0.7\n[output]\ndir = rec\nlines = none\n",
        );
        let cfg = parse_config(&p).unwrap();
        assert_eq!(cfg.cutoff, Some(0.7));
        let out = run(&cfg).unwrap();
        assert_eq!(out.solution.multipliers.len(), 1);
        assert!((out.center.values.w - 1.0).abs() < 1e-9, "pin holds the target");
        let report = fs::read_to_string(out.out_dir.join("report.txt")).unwrap();
        assert!(report.contains("constraint 0:"));
        assert!(report.contains(&format!("spreading: zeta = {} cutoff = {}", fixed(50.0), fixed(0.7))));

        let p2 = write_file(
            dir.path(),
            "s.cfg",
            "workflow = report\n[mesh]\nnx = 5\nny = 5\n[boundary]\nsurface = coscos\n\
             [output]\ndir = sum\n",
        );
        let out2 = run(&parse_config(&p2).unwrap()).unwrap();
        assert!(out2.out_dir.join("report.txt").exists());
        assert!(out2.out_dir.join("energy.txt").exists());
        assert!(!out2.out_dir.join("grid.csv").exists(), "report skips field exports");
    }

    #[test]
    fn corner_workflow_emits_normalized_table() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_file(
            dir.path(),
            "corner.cfg",
            "workflow = validate-corner\n[mesh]\nnx = 7\nny = 7\n[material]\nnu = 0.3\n\
             [load]\nq = 1\n[boundary]\ndefault = free\ntop = clamped\n\
             [corner]\nbottom_left = bam\nbottom_right = bam\n\
             [output]\ndir = corner\nlines = none\n",
        );
        let cfg = parse_config(&p).unwrap();
        assert_eq!(cfg.side_kinds[Side::Top as usize], SideKind::Clamped);
        assert_eq!(cfg.corners.len(), 2);
        let out = run(&cfg).unwrap();
        // 7 x 7 BAM center deflection, frozen cross-implementation value
        let report = fs::read_to_string(out.out_dir.join("report.txt")).unwrap();
        assert!(report.contains("corner table"), "{report}");
        assert!((out.center.values.w - 0.00826291908303296).abs() < 1e-12);
        let row = report.lines().find(|l| l.trim_start().starts_with("0.50   0.50")).unwrap();
        assert!(row.contains("0.008052"), "reference column present: {row}");
    }

    #[test]
    fn overrides_apply() {
        let dir = tempfile::tempdir().unwrap();
        write_file(dir.path(), "pin.csv", "0,0,1\n");
        let p = write_file(
            dir.path(),
            "r.cfg",
            "workflow = reconstruct\n[mesh]\nnx = 5\nny = 5\n[boundary]\nsurface = coscos\n\
             [constraints]\nfile = pin.csv\n",
        );
        let mut cfg = parse_config(&p).unwrap();
        let args = parse_args(
            ["--mesh", "7x9", "--zeta", "50", "--out", "elsewhere"].map(String::from),
        )
        .unwrap();
        apply_overrides(&mut cfg, &args).unwrap();
        assert_eq!((cfg.nx, cfg.ny), (7, 9));
        assert_eq!(cfg.zeta, Some(50.0));
        assert!(cfg.out_dir.ends_with("elsewhere"));
        // zeta override without constraints is rejected
        let p2 = write_file(
            dir.path(),
            "b.cfg",
            "workflow = blend\n[mesh]\nnx = 5\nny = 5\n[boundary]\nsurface = coscos\n",
        );
        let mut cfg2 = parse_config(&p2).unwrap();
        assert!(apply_overrides(&mut cfg2, &args).is_err());
    }
}
