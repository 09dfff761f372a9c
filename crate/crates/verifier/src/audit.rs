use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::ops::RangeInclusive;
use std::time::Instant;

use rayon::prelude::*;
use ring_core::{canonicalize, Algorithm, Configuration, NodeContent, Palette};
use ring_semantics::{Engine, SchedulerModel, SystemState};
use serde::Serialize;

use crate::certificate::{classify_configuration, Certificate};
use crate::check::{check_objective, Objective};
use crate::error::VerifyError;
use crate::graph::ExploreOptions;

pub const THREADS_ENV: &str = "RING_EXPLORER_THREADS";

/// Sizes rayon's global pool from `RING_EXPLORER_THREADS` when set. Returns the pool size.
pub fn init_thread_pool_from_env() -> usize {
    if let Some(t) = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        if t > 0 {
            // a pool built earlier in the process stays in place
            let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
        }
    }
    rayon::current_num_threads()
}

fn multisets(palette_len: usize, size: usize) -> Vec<NodeContent> {
    fn go(color: usize, left: usize, palette_len: usize, cur: &mut Vec<u8>, out: &mut Vec<NodeContent>) {
        if color == palette_len {
            if left == 0 {
                let mut m = NodeContent::EMPTY;
                for (c, &cnt) in cur.iter().enumerate() {
                    for _ in 0..cnt {
                        m.add(ring_core::Color(c as u8));
                    }
                }
                out.push(m);
            }
            return;
        }
        for take in 0..=left {
            cur.push(take as u8);
            go(color + 1, left - take, palette_len, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, size, palette_len, &mut Vec::new(), &mut out);
    out
}

/// Every placement of `k` robots colored from `palette` on a ring of `n` nodes, towers
/// included, one canonical representative per rotation/reflection class, in ascending order.
pub fn enumerate_initial_configurations(n: usize, k: usize, palette: &Palette) -> Vec<Configuration> {
    if n < 3 || k == 0 || palette.is_empty() {
        return Vec::new();
    }
    let by_size: Vec<Vec<NodeContent>> = (0..=k).map(|s| multisets(palette.len(), s)).collect();
    let mut seen = BTreeSet::new();
    let mut nodes = Vec::with_capacity(n);
    fill(n, k, &by_size, palette, &mut nodes, &mut seen);
    seen.into_iter().collect()
}

fn fill(
    n: usize,
    left: usize,
    by_size: &[Vec<NodeContent>],
    palette: &Palette,
    nodes: &mut Vec<NodeContent>,
    seen: &mut BTreeSet<Configuration>,
) {
    if nodes.len() == n {
        if left == 0 {
            let config = Configuration::new(palette.clone(), nodes.clone()).expect("k >= 1 and n >= 3");
            seen.insert(canonicalize(&config).0);
        }
        return;
    }
    let sizes = if nodes.len() + 1 == n { left..=left } else { 0..=left };
    for s in sizes {
        for &m in &by_size[s] {
            nodes.push(m);
            fill(n, left - s, by_size, palette, nodes, seen);
            nodes.pop();
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscrepancyKind {
    /// The algorithm fails and no certificate explains why.
    UnsolvedWithoutCertificate,
    /// A certificate applies although the algorithm succeeds.
    CertifiedButSolved,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum AuditStatus {
    AlgorithmSolves,
    CertifiedUnsolvable { certificate: Certificate },
    Discrepancy { kind: DiscrepancyKind, certificate: Option<Certificate> },
    StateLimit { limit: usize, frontier: usize },
}

impl AuditStatus {
    pub fn label(&self) -> &'static str {
        match self {
            AuditStatus::AlgorithmSolves => "solves",
            AuditStatus::CertifiedUnsolvable { .. } => "certified",
            AuditStatus::Discrepancy { .. } => "DISCREPANCY",
            AuditStatus::StateLimit { .. } => "state-limit",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditEntry {
    pub n: usize,
    pub configuration: Configuration,
    #[serde(flatten)]
    pub status: AuditStatus,
    pub states: usize,
    /// The failure witness, when one was produced, replays through the semantics.
    pub witness_replays: Option<bool>,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct UniversalityReport {
    pub algorithm: String,
    pub model: String,
    pub objective: Objective,
    pub k: usize,
    pub n_min: usize,
    pub n_max: usize,
    pub entries: Vec<AuditEntry>,
}

impl UniversalityReport {
    pub fn solved(&self) -> impl Iterator<Item = &AuditEntry> {
        self.entries.iter().filter(|e| e.status == AuditStatus::AlgorithmSolves)
    }

    pub fn certified(&self) -> impl Iterator<Item = &AuditEntry> {
        self.entries.iter().filter(|e| matches!(e.status, AuditStatus::CertifiedUnsolvable { .. }))
    }

    pub fn discrepancies(&self) -> impl Iterator<Item = &AuditEntry> {
        self.entries.iter().filter(|e| matches!(e.status, AuditStatus::Discrepancy { .. }))
    }

    pub fn limited(&self) -> impl Iterator<Item = &AuditEntry> {
        self.entries.iter().filter(|e| matches!(e.status, AuditStatus::StateLimit { .. }))
    }

    /// Human-readable table, one row per configuration.
    pub fn table(&self) -> String {
        self.render_table(true)
    }

    /// Same table; without timings the output only depends on the inputs.
    pub fn render_table(&self, timings: bool) -> String {
        let mut out = format!(
            "audit {} {} {} k={} n={}..{}\n",
            self.algorithm, self.model, self.objective, self.k, self.n_min, self.n_max
        );
        let mut head = format!("{:>3}  {:<28} {:<12} {:<36} {:>9}", "n", "configuration", "status", "certificate", "states");
        if timings {
            let _ = write!(head, " {:>9}", "ms");
        }
        let _ = writeln!(out, "{}", head.trim_end());
        for e in &self.entries {
            let cert = match &e.status {
                AuditStatus::CertifiedUnsolvable { certificate } => certificate.to_string(),
                AuditStatus::Discrepancy { kind, certificate } => match certificate {
                    Some(c) => format!("{c} ({kind:?})"),
                    None => format!("none ({kind:?})"),
                },
                AuditStatus::StateLimit { limit, frontier } => format!("limit {limit}, frontier {frontier}"),
                AuditStatus::AlgorithmSolves => "-".into(),
            };
            let mut row = format!(
                "{:>3}  {:<28} {:<12} {:<36} {:>9}",
                e.n,
                e.configuration.to_string(),
                e.status.label(),
                cert,
                e.states
            );
            if timings {
                let _ = write!(row, " {:>9.1}", e.wall_ms);
            }
            let _ = writeln!(out, "{}", row.trim_end());
        }
        let _ = writeln!(
            out,
            "solves {}  certified {}  discrepancies {}  state-limit {}",
            self.solved().count(),
            self.certified().count(),
            self.discrepancies().count(),
            self.limited().count()
        );
        out
    }
}

fn audit_entry(
    algorithm: &Algorithm,
    model: SchedulerModel,
    objective: Objective,
    options: ExploreOptions,
    n: usize,
    configuration: Configuration,
) -> AuditEntry {
    let started = Instant::now();
    let state = SystemState::from_configuration(&configuration, model);
    let certificate = classify_configuration(&configuration, model, objective);
    let (status, states, witness_replays) = match check_objective(&state, algorithm, model, objective, options) {
        Err(VerifyError::StateLimit { limit, frontier }) => (AuditStatus::StateLimit { limit, frontier }, limit, None),
        Err(other) => panic!("audit entry {configuration}: {other}"),
        Ok(verdict) => {
            let replays = verdict
                .witness
                .as_ref()
                .map(|w| w.replay(&Engine::with_sym_mode(algorithm, options.sym_mode)).is_ok());
            let status = match (verdict.holds(), certificate) {
                (true, None) => AuditStatus::AlgorithmSolves,
                (true, Some(c)) => {
                    AuditStatus::Discrepancy { kind: DiscrepancyKind::CertifiedButSolved, certificate: Some(c) }
                }
                (false, Some(c)) => AuditStatus::CertifiedUnsolvable { certificate: c },
                (false, None) => {
                    AuditStatus::Discrepancy { kind: DiscrepancyKind::UnsolvedWithoutCertificate, certificate: None }
                }
            };
            (status, verdict.states, replays)
        }
    };
    AuditEntry { n, configuration, status, states, witness_replays, wall_ms: started.elapsed().as_secs_f64() * 1e3 }
}

/// Runs the objective check and the certificate catalog on every canonical initial
/// configuration with `k` robots for each ring size in `n_range`. Entries run in parallel.
pub fn universality_audit_with(
    algorithm: &Algorithm,
    model: SchedulerModel,
    objective: Objective,
    n_range: RangeInclusive<usize>,
    k: usize,
    options: ExploreOptions,
) -> UniversalityReport {
    let jobs: Vec<(usize, Configuration)> = n_range
        .clone()
        .flat_map(|n| enumerate_initial_configurations(n, k, &algorithm.palette).into_iter().map(move |c| (n, c)))
        .collect();
    let entries = jobs
        .into_par_iter()
        .map(|(n, c)| audit_entry(algorithm, model, objective, options, n, c))
        .collect();
    UniversalityReport {
        algorithm: algorithm.name.clone(),
        model: model.name().to_string(),
        objective,
        k,
        n_min: *n_range.start(),
        n_max: *n_range.end(),
        entries,
    }
}

pub fn universality_audit(
    algorithm: &Algorithm,
    model: SchedulerModel,
    objective: Objective,
    n_range: RangeInclusive<usize>,
    k: usize,
) -> UniversalityReport {
    universality_audit_with(algorithm, model, objective, n_range, k, ExploreOptions::default())
}
