//! INI run configuration: parsing, validation and canonical serialization.
//!
//! ```ini
//! [problem]
//! system = burgers1d
//!
//! [initial]
//! kind = sine
//! mean = 0.5
//! amplitude = 0.25
//!
//! [mesh]
//! cells = 128
//!
//! [scheme]
//! flux = rusanov
//! speed = auto
//!
//! [time]
//! final_time = 0.2
//! ```
//!
//! Lists are comma separated. Every key has a default except `system`,
//! `kind` and the data parameters the chosen initial condition needs.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use ini::Ini;

use crate::error::{Error, Result};
use crate::initial::InitialCondition;
use crate::mesh::Quadrature;
use crate::numflux::WaveSpeed;
use crate::solver::CflMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    Advection1d,
    Advection2d,
    Friedrichs1d,
    Burgers1d,
    ShallowWater1d,
}

impl ProblemKind {
    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::Advection1d => "advection1d",
            ProblemKind::Advection2d => "advection2d",
            ProblemKind::Friedrichs1d => "friedrichs1d",
            ProblemKind::Burgers1d => "burgers1d",
            ProblemKind::ShallowWater1d => "shallow_water1d",
        }
    }

    pub fn dim(self) -> usize {
        if self == ProblemKind::Advection2d {
            2
        } else {
            1
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [
            ProblemKind::Advection1d,
            ProblemKind::Advection2d,
            ProblemKind::Friedrichs1d,
            ProblemKind::Burgers1d,
            ProblemKind::ShallowWater1d,
        ]
        .into_iter()
        .find(|p| p.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FluxChoice {
    Rusanov,
    Godunov,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshKind {
    Uniform,
    Perturbed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceChoice {
    /// Closed form when one exists, fine grid otherwise.
    Auto,
    Exact,
    FineGrid,
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSection {
    pub system: ProblemKind,
    /// Advection velocity, one entry per axis.
    pub velocity: Vec<f64>,
    /// Friedrichs matrix, row major.
    pub matrix: Vec<f64>,
    pub gravity: f64,
    /// Shallow-water admissible set; derived from the data when absent.
    pub h_min: Option<f64>,
    pub h_max: Option<f64>,
    pub q_max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeshSection {
    pub kind: MeshKind,
    /// Cells per axis (one value applies to every axis).
    pub cells: Vec<usize>,
    pub length: Vec<f64>,
    pub jitter: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeSection {
    pub flux: FluxChoice,
    pub speed: WaveSpeed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSection {
    pub final_time: f64,
    pub cfl: CflMode,
    pub zeta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSection {
    pub dir: String,
    pub record_every: usize,
    pub snapshots: bool,
    pub quadrature: Quadrature,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsSection {
    /// Radius `r` of the ball `B(0, r)`; `None` for the whole domain.
    pub radius: Option<f64>,
    pub reference: ReferenceChoice,
    pub fine_factor: usize,
    /// Seed of every sampled constant (`L_f`).
    pub seed: u64,
    pub check_admissibility: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudySection {
    pub levels: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub problem: ProblemSection,
    pub initial: InitialCondition,
    pub mesh: MeshSection,
    pub scheme: SchemeSection,
    pub time: TimeSection,
    pub output: OutputSection,
    pub diagnostics: DiagnosticsSection,
    pub study: Option<StudySection>,
}

const SECTIONS: [&str; 8] = [
    "problem",
    "initial",
    "mesh",
    "scheme",
    "time",
    "output",
    "diagnostics",
    "study",
];

/// Key lookup over one parsed section, remembering which keys were used and
/// where they sit in the source text.
struct Section<'a> {
    name: &'static str,
    props: Option<&'a ini::Properties>,
    text: &'a str,
    used: BTreeSet<String>,
}

impl<'a> Section<'a> {
    fn line_of(&self, key: &str) -> Option<usize> {
        let mut current = String::new();
        for (i, line) in self.text.lines().enumerate() {
            let t = line.trim();
            if let Some(rest) = t.strip_prefix('[') {
                current = rest.trim_end_matches(']').trim().to_string();
            } else if current == self.name {
                if let Some((k, _)) = t.split_once('=') {
                    if k.trim() == key {
                        return Some(i + 1);
                    }
                }
            }
        }
        None
    }

    fn err(&self, key: &str, msg: impl std::fmt::Display) -> Error {
        match self.line_of(key) {
            Some(line) => Error::Parse(format!("line {line}: [{}] {key}: {msg}", self.name)),
            None => Error::Parse(format!("[{}] {key}: {msg}", self.name)),
        }
    }

    fn raw(&mut self, key: &str) -> Result<Option<&'a str>> {
        let Some(props) = self.props else {
            return Ok(None);
        };
        let mut all = props.get_all(key);
        let first = all.next();
        if all.next().is_some() {
            return Err(self.err(key, "key given more than once"));
        }
        if first.is_some() {
            self.used.insert(key.to_string());
        }
        Ok(first.map(str::trim))
    }

    fn parse_with<T>(&mut self, key: &str, f: impl Fn(&str) -> Option<T>, what: &str) -> Result<Option<T>> {
        match self.raw(key)? {
            None => Ok(None),
            Some(s) => f(s)
                .map(Some)
                .ok_or_else(|| self.err(key, format!("expected {what}, got '{s}'"))),
        }
    }

    fn f64(&mut self, key: &str) -> Result<Option<f64>> {
        self.parse_with(key, |s| s.parse::<f64>().ok(), "a number")
    }

    fn usize(&mut self, key: &str) -> Result<Option<usize>> {
        self.parse_with(key, |s| s.parse::<usize>().ok(), "a non-negative integer")
    }

    fn u64(&mut self, key: &str) -> Result<Option<u64>> {
        self.parse_with(key, |s| s.parse::<u64>().ok(), "a non-negative integer")
    }

    fn bool(&mut self, key: &str) -> Result<Option<bool>> {
        self.parse_with(
            key,
            |s| match s {
                "true" | "yes" | "on" => Some(true),
                "false" | "no" | "off" => Some(false),
                _ => None,
            },
            "true or false",
        )
    }

    fn f64_list(&mut self, key: &str) -> Result<Option<Vec<f64>>> {
        self.parse_with(
            key,
            |s| s.split(',').map(|p| p.trim().parse::<f64>().ok()).collect(),
            "a comma-separated list of numbers",
        )
    }

    fn usize_list(&mut self, key: &str) -> Result<Option<Vec<usize>>> {
        self.parse_with(
            key,
            |s| s.split(',').map(|p| p.trim().parse::<usize>().ok()).collect(),
            "a comma-separated list of integers",
        )
    }

    fn required<T>(&self, key: &str, v: Option<T>) -> Result<T> {
        v.ok_or_else(|| Error::Parse(format!("[{}] missing required key '{key}'", self.name)))
    }

    fn finish(self) -> Result<()> {
        if let Some(props) = self.props {
            for (k, _) in props.iter() {
                if !self.used.contains(k) {
                    return Err(self.err(k, "unknown key"));
                }
            }
        }
        Ok(())
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Config> {
        let ini = Ini::load_from_str(text)
            .map_err(|e| Error::Parse(format!("line {}: {}", e.line + 1, e.msg)))?;
        let mut seen = BTreeSet::new();
        for (name, props) in ini.iter() {
            match name {
                None => {
                    if let Some((k, _)) = props.iter().next() {
                        return Err(Error::Parse(format!("key '{k}' appears before any section")));
                    }
                }
                Some(n) => {
                    if !SECTIONS.contains(&n) {
                        return Err(Error::Parse(format!("unknown section [{n}]")));
                    }
                    if !seen.insert(n.to_string()) {
                        return Err(Error::Parse(format!("section [{n}] appears more than once")));
                    }
                }
            }
        }
        let section = |name: &'static str| Section {
            name,
            props: ini.section(Some(name)),
            text,
            used: BTreeSet::new(),
        };

        let mut s = section("problem");
        let system_name = s.raw("system")?;
        let system_name = s.required("system", system_name)?;
        let system = ProblemKind::parse(system_name).ok_or_else(|| {
            s.err(
                "system",
                format!(
                    "unknown system '{system_name}' (advection1d, advection2d, friedrichs1d, burgers1d, shallow_water1d)"
                ),
            )
        })?;
        let dim = system.dim();
        let problem = ProblemSection {
            system,
            velocity: s.f64_list("velocity")?.unwrap_or_else(|| vec![1.0; dim]),
            matrix: s.f64_list("matrix")?.unwrap_or_else(|| vec![0.0, 1.0, 1.0, 0.0]),
            gravity: s.f64("gravity")?.unwrap_or(9.81),
            h_min: s.f64("h_min")?,
            h_max: s.f64("h_max")?,
            q_max: s.f64("q_max")?,
        };
        s.finish()?;

        let mut s = section("mesh");
        let mesh_kind = match s.raw("kind")?.unwrap_or("uniform") {
            "uniform" => MeshKind::Uniform,
            "perturbed" => MeshKind::Perturbed,
            other => return Err(s.err("kind", format!("unknown mesh kind '{other}' (uniform, perturbed)"))),
        };
        let mesh = MeshSection {
            kind: mesh_kind,
            cells: s.usize_list("cells")?.unwrap_or_else(|| vec![64]),
            length: s.f64_list("length")?.unwrap_or_else(|| vec![1.0]),
            jitter: s.f64("jitter")?.unwrap_or(0.15),
            seed: s.u64("seed")?.unwrap_or(1),
        };
        s.finish()?;

        let mut s = section("initial");
        let initial = parse_initial(&mut s, &problem, &mesh)?;
        s.finish()?;

        let mut s = section("scheme");
        let flux = match s.raw("flux")?.unwrap_or("rusanov") {
            "rusanov" => FluxChoice::Rusanov,
            "godunov" => FluxChoice::Godunov,
            other => return Err(s.err("flux", format!("unknown flux '{other}' (rusanov, godunov)"))),
        };
        let speed = match s.raw("speed")?.unwrap_or("auto") {
            "auto" => WaveSpeed::Auto,
            v => WaveSpeed::Fixed(
                v.parse::<f64>()
                    .map_err(|_| s.err("speed", format!("expected 'auto' or a number, got '{v}'")))?,
            ),
        };
        s.finish()?;
        let scheme = SchemeSection { flux, speed };

        let mut s = section("time");
        let cfl = match s.raw("cfl")?.unwrap_or("strengthened") {
            "strengthened" => CflMode::Strengthened,
            "standard" => CflMode::Standard,
            other => return Err(s.err("cfl", format!("unknown CFL mode '{other}' (strengthened, standard)"))),
        };
        let time = TimeSection {
            final_time: {
                let v = s.f64("final_time")?;
                s.required("final_time", v)?
            },
            cfl,
            zeta: s.f64("zeta")?.unwrap_or(0.1),
        };
        s.finish()?;

        let mut s = section("output");
        let quadrature = match s.raw("quadrature")?.unwrap_or("midpoint") {
            "midpoint" => Quadrature::Midpoint,
            "gauss3" => Quadrature::Gauss3,
            other => return Err(s.err("quadrature", format!("unknown quadrature '{other}' (midpoint, gauss3)"))),
        };
        let output = OutputSection {
            dir: s.raw("dir")?.unwrap_or("hypflux-out").to_string(),
            record_every: s.usize("record_every")?.unwrap_or(1),
            snapshots: s.bool("snapshots")?.unwrap_or(true),
            quadrature,
        };
        s.finish()?;

        let mut s = section("diagnostics");
        let radius = match s.raw("radius")?.unwrap_or("all") {
            "all" => None,
            v => Some(
                v.parse::<f64>()
                    .map_err(|_| s.err("radius", format!("expected 'all' or a number, got '{v}'")))?,
            ),
        };
        let reference = match s.raw("reference")?.unwrap_or("auto") {
            "auto" => ReferenceChoice::Auto,
            "exact" => ReferenceChoice::Exact,
            "fine-grid" => ReferenceChoice::FineGrid,
            "none" => ReferenceChoice::None,
            other => {
                return Err(s.err(
                    "reference",
                    format!("unknown reference '{other}' (auto, exact, fine-grid, none)"),
                ))
            }
        };
        let diagnostics = DiagnosticsSection {
            radius,
            reference,
            fine_factor: s.usize("fine_factor")?.unwrap_or(8),
            seed: s.u64("seed")?.unwrap_or(0x5eed),
            check_admissibility: s.bool("check_admissibility")?.unwrap_or(true),
        };
        s.finish()?;

        let mut s = section("study");
        let study = if s.props.is_some() {
            let levels = s.usize_list("levels")?;
            Some(StudySection {
                levels: s.required("levels", levels)?,
            })
        } else {
            None
        };
        s.finish()?;

        Ok(Config {
            problem,
            initial,
            mesh,
            scheme,
            time,
            output,
            diagnostics,
            study,
        })
    }

    pub fn load(path: &std::path::Path) -> Result<Config> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
        Config::parse(&text)
    }

    /// Domain lengths per axis.
    pub fn domain(&self) -> Vec<f64> {
        broadcast(&self.mesh.length, self.problem.system.dim())
    }

    /// Cells per axis.
    pub fn cells(&self) -> Vec<usize> {
        broadcast(&self.mesh.cells, self.problem.system.dim())
    }

    /// Checks value ranges and cross-section consistency.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        let p = &self.problem;
        let dim = p.system.dim();
        if self.mesh.cells.len() != 1 && self.mesh.cells.len() != dim {
            return bad(format!("[mesh] cells needs 1 or {dim} values"));
        }
        if self.mesh.length.len() != 1 && self.mesh.length.len() != dim {
            return bad(format!("[mesh] length needs 1 or {dim} values"));
        }
        if self.mesh.length.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
            return bad("[mesh] length must be positive".into());
        }
        if self.mesh.cells.iter().any(|&n| n < 3) {
            return bad("[mesh] cells must be at least 3 per axis".into());
        }
        if self.mesh.kind == MeshKind::Perturbed {
            if dim != 2 {
                return bad("[mesh] perturbed meshes are two-dimensional".into());
            }
            if !(self.mesh.jitter >= 0.0 && self.mesh.jitter < 0.25) {
                return bad(format!("[mesh] jitter must lie in [0, 0.25), got {}", self.mesh.jitter));
            }
        }
        match p.system {
            ProblemKind::Advection1d | ProblemKind::Advection2d => {
                if p.velocity.len() != dim || p.velocity.iter().any(|v| !v.is_finite()) {
                    return bad(format!("[problem] velocity needs {dim} finite values"));
                }
            }
            ProblemKind::Friedrichs1d => {
                let m = (p.matrix.len() as f64).sqrt() as usize;
                if m == 0 || m * m != p.matrix.len() {
                    return bad("[problem] matrix must hold m*m values".into());
                }
            }
            ProblemKind::ShallowWater1d => {
                if !(p.gravity > 0.0 && p.gravity.is_finite()) {
                    return bad("[problem] gravity must be positive".into());
                }
                if p.h_min.is_some_and(|h| !(h > 0.0)) {
                    return bad("[problem] h_min must be positive".into());
                }
            }
            ProblemKind::Burgers1d => {}
        }
        let t = &self.time;
        if !(t.final_time > 0.0 && t.final_time.is_finite()) {
            return bad(format!("[time] final_time must be positive, got {}", t.final_time));
        }
        if !(t.zeta > 0.0 && t.zeta < 1.0) {
            return bad(format!("[time] zeta must lie in (0, 1), got {}", t.zeta));
        }
        if let WaveSpeed::Fixed(c) = self.scheme.speed {
            if !(c > 0.0 && c.is_finite()) {
                return bad(format!("[scheme] speed must be positive, got {c}"));
            }
        }
        if self.scheme.flux == FluxChoice::Godunov && p.system == ProblemKind::Friedrichs1d && p.matrix.len() > 1 {
            return bad("[scheme] the Godunov flux is only available for scalar laws".into());
        }
        if self.scheme.flux == FluxChoice::Godunov && p.system == ProblemKind::ShallowWater1d {
            return bad("[scheme] the Godunov flux is only available for scalar laws".into());
        }
        if self.output.record_every == 0 {
            return bad("[output] record_every must be at least 1".into());
        }
        if self.output.dir.is_empty() {
            return bad("[output] dir must not be empty".into());
        }
        if let Some(r) = self.diagnostics.radius {
            if !(r > 0.0) {
                return bad(format!("[diagnostics] radius must be positive, got {r}"));
            }
        }
        if self.diagnostics.fine_factor < 1 {
            return bad("[diagnostics] fine_factor must be at least 1".into());
        }
        if let Some(study) = &self.study {
            if study.levels.len() < 3 {
                return bad(format!("[study] needs at least 3 levels, got {}", study.levels.len()));
            }
            if study.levels.iter().any(|&n| n < 3) {
                return bad("[study] levels must be at least 3 cells".into());
            }
            let distinct: BTreeSet<_> = study.levels.iter().collect();
            if distinct.len() != study.levels.len() {
                return bad("[study] levels must be distinct".into());
            }
        }
        let m = match p.system {
            ProblemKind::Friedrichs1d => (p.matrix.len() as f64).sqrt() as usize,
            ProblemKind::ShallowWater1d => 2,
            _ => 1,
        };
        self.initial.validate(m, &self.domain())
    }

    /// Canonical text form; `parse(serialize(c)) == c`.
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        let p = &self.problem;
        let _ = writeln!(s, "[problem]\nsystem = {}", p.system.name());
        match p.system {
            ProblemKind::Advection1d | ProblemKind::Advection2d => {
                let _ = writeln!(s, "velocity = {}", list(&p.velocity));
            }
            ProblemKind::Friedrichs1d => {
                let _ = writeln!(s, "matrix = {}", list(&p.matrix));
            }
            ProblemKind::ShallowWater1d => {
                let _ = writeln!(s, "gravity = {}", p.gravity);
                for (k, v) in [("h_min", p.h_min), ("h_max", p.h_max), ("q_max", p.q_max)] {
                    if let Some(v) = v {
                        let _ = writeln!(s, "{k} = {v}");
                    }
                }
            }
            ProblemKind::Burgers1d => {}
        }

        let _ = writeln!(s, "\n[initial]\nkind = {}", self.initial.name());
        match &self.initial {
            InitialCondition::Constant { value } => {
                let _ = writeln!(s, "value = {}", list(value));
            }
            InitialCondition::Sine {
                mean,
                amplitude,
                wavenumber,
                phase,
            } => {
                let _ = writeln!(
                    s,
                    "mean = {}\namplitude = {}\nwavenumber = {}\nphase = {}",
                    list(mean),
                    list(amplitude),
                    list(wavenumber),
                    list(phase)
                );
            }
            InitialCondition::GaussianBump {
                base,
                amplitude,
                center,
                width,
                ..
            } => {
                let _ = writeln!(
                    s,
                    "base = {}\namplitude = {}\ncenter = {}\nwidth = {width}",
                    list(base),
                    list(amplitude),
                    list(center)
                );
            }
            InitialCondition::ShallowWaterSmoothWave {
                depth,
                amplitude,
                velocity,
                wavenumber,
            } => {
                let _ = writeln!(
                    s,
                    "depth = {depth}\namplitude = {amplitude}\nvelocity = {velocity}\nwavenumber = {wavenumber}"
                );
            }
        }

        let m = &self.mesh;
        let _ = writeln!(
            s,
            "\n[mesh]\nkind = {}\ncells = {}\nlength = {}\njitter = {}\nseed = {}",
            match m.kind {
                MeshKind::Uniform => "uniform",
                MeshKind::Perturbed => "perturbed",
            },
            m.cells.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", "),
            list(&m.length),
            m.jitter,
            m.seed
        );

        let _ = writeln!(
            s,
            "\n[scheme]\nflux = {}\nspeed = {}",
            match self.scheme.flux {
                FluxChoice::Rusanov => "rusanov",
                FluxChoice::Godunov => "godunov",
            },
            match self.scheme.speed {
                WaveSpeed::Auto => "auto".to_string(),
                WaveSpeed::Fixed(c) => c.to_string(),
            }
        );

        let _ = writeln!(
            s,
            "\n[time]\nfinal_time = {}\ncfl = {}\nzeta = {}",
            self.time.final_time,
            match self.time.cfl {
                CflMode::Strengthened => "strengthened",
                CflMode::Standard => "standard",
            },
            self.time.zeta
        );

        let o = &self.output;
        let _ = writeln!(
            s,
            "\n[output]\ndir = {}\nrecord_every = {}\nsnapshots = {}\nquadrature = {}",
            o.dir, o.record_every, o.snapshots, o.quadrature
        );

        let d = &self.diagnostics;
        let _ = writeln!(
            s,
            "\n[diagnostics]\nradius = {}\nreference = {}\nfine_factor = {}\nseed = {}\ncheck_admissibility = {}",
            d.radius.map_or("all".to_string(), |r| r.to_string()),
            match d.reference {
                ReferenceChoice::Auto => "auto",
                ReferenceChoice::Exact => "exact",
                ReferenceChoice::FineGrid => "fine-grid",
                ReferenceChoice::None => "none",
            },
            d.fine_factor,
            d.seed,
            d.check_admissibility
        );

        if let Some(study) = &self.study {
            let _ = writeln!(
                s,
                "\n[study]\nlevels = {}",
                study.levels.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", ")
            );
        }
        s
    }
}

fn parse_initial(s: &mut Section<'_>, problem: &ProblemSection, mesh: &MeshSection) -> Result<InitialCondition> {
    let dim = problem.system.dim();
    let kind = s.raw("kind")?;
    let kind = s.required("kind", kind)?;
    Ok(match kind {
        "constant" => {
            let value = s.f64_list("value")?;
            InitialCondition::Constant {
                value: s.required("value", value)?,
            }
        }
        "sine" => {
            let mean = s.f64_list("mean")?;
            let mean = s.required("mean", mean)?;
            let amplitude = s.f64_list("amplitude")?;
            let amplitude = s.required("amplitude", amplitude)?;
            let wavenumber = s.f64_list("wavenumber")?.unwrap_or_else(|| vec![1.0; dim]);
            let phase = s.f64_list("phase")?.unwrap_or_else(|| vec![0.0; mean.len()]);
            InitialCondition::Sine {
                mean,
                amplitude,
                wavenumber,
                phase,
            }
        }
        "gaussian-bump" => {
            let base = s.f64_list("base")?;
            let base = s.required("base", base)?;
            let amplitude = s.f64_list("amplitude")?;
            let amplitude = s.required("amplitude", amplitude)?;
            let domain = broadcast(&mesh.length, dim);
            let center = s
                .f64_list("center")?
                .unwrap_or_else(|| domain.iter().map(|l| 0.5 * l).collect());
            InitialCondition::GaussianBump {
                base,
                amplitude,
                center,
                width: s.f64("width")?.unwrap_or(0.1),
                domain,
            }
        }
        "shallow-water-smooth-wave" => InitialCondition::ShallowWaterSmoothWave {
            depth: s.f64("depth")?.unwrap_or(1.0),
            amplitude: s.f64("amplitude")?.unwrap_or(0.1),
            velocity: s.f64("velocity")?.unwrap_or(0.0),
            wavenumber: s.f64("wavenumber")?.unwrap_or(1.0),
        },
        other => {
            return Err(s.err(
                "kind",
                format!("unknown initial data '{other}' (constant, sine, gaussian-bump, shallow-water-smooth-wave)"),
            ))
        }
    })
}

fn broadcast<T: Clone>(v: &[T], dim: usize) -> Vec<T> {
    if v.len() == 1 {
        vec![v[0].clone(); dim]
    } else {
        v.to_vec()
    }
}

fn list(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}
