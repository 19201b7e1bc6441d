use super::roots::{complex_newton, dedup_roots, real_roots_on_branch};
use super::tables::{TableEntry, TableInfo};
use super::{find_roots, BranchStrategy, ClassifiedRoot, Mode, RootClass, SearchOptions, SpectrumError};
use crate::model::{PotentialKind, Sign};
use num_complex::Complex64 as C64;
use serde::Serialize;
use std::fmt::Write as _;

pub const INTERPRETATION: &str =
    "second table column (n with a tilde) read as the polar quantum number n_prime; value = real part of the matched root";

#[derive(Debug, Clone, PartialEq)]
pub struct AuditOptions {
    /// An entry matches a root when |Re E − value| is below this.
    pub tolerance: f64,
    /// Half-width of the local real scan around each published value.
    pub window: f64,
    pub panels_per_unit: usize,
    pub residual_tolerance: f64,
}

impl Default for AuditOptions {
    fn default() -> Self {
        Self { tolerance: 1e-4, window: 0.5, panels_per_unit: 2000, residual_tolerance: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditEntry {
    pub n: u32,
    pub n_prime: u32,
    pub m: i32,
    pub a: f64,
    pub b: f64,
    pub published: f64,
    pub class: RootClass,
    pub energy_re: Option<f64>,
    pub energy_im: Option<f64>,
    pub deviation: Option<f64>,
    pub branch: Option<String>,
    pub residual: Option<f64>,
    /// For unmatched entries: the closest root found and its distance.
    pub nearest_re: Option<f64>,
    pub nearest_distance: Option<f64>,
    pub expected_class: Option<RootClass>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct AuditSummary {
    pub total: usize,
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub d: usize,
    pub max_deviation: f64,
    /// Entries carrying an expected class, and how many agree.
    pub with_expected: usize,
    pub class_matches: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub table_id: u32,
    pub symmetry: String,
    pub potential: String,
    pub interpretation: String,
    pub tolerance: f64,
    pub entries: Vec<AuditEntry>,
    pub summary: AuditSummary,
}

impl AuditReport {
    pub fn d_list(&self) -> Vec<&AuditEntry> {
        self.entries.iter().filter(|e| e.class == RootClass::D).collect()
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# audit of table {} ({} {})", self.table_id, self.symmetry, self.potential);
        let _ = writeln!(s, "# {}", self.interpretation);
        let _ = writeln!(s, "# match tolerance {:e}", self.tolerance);
        for e in &self.entries {
            let detail = match (e.energy_re, e.energy_im, e.deviation) {
                (Some(re), Some(im), Some(dev)) => format!(
                    "E = {re:.10} {im:+.6}i  dev {dev:.2e}  {}",
                    e.branch.as_deref().unwrap_or("-")
                ),
                _ => format!(
                    "no match; nearest {} at distance {}",
                    e.nearest_re.map_or("-".into(), |x| format!("{x:.10}")),
                    e.nearest_distance.map_or("-".into(), |x| format!("{x:.3e}"))
                ),
            };
            let _ = writeln!(
                s,
                "({},{},{}) a={} b={}  {:>15.10}  {}  {}",
                e.n, e.n_prime, e.m, e.a, e.b, e.published, e.class, detail
            );
        }
        let t = &self.summary;
        let _ = writeln!(
            s,
            "summary: total {} | A {} | B {} | C {} | D {} | max deviation {:.2e}",
            t.total, t.a, t.b, t.c, t.d, t.max_deviation
        );
        if t.with_expected > 0 {
            let _ = writeln!(s, "expected classes matched: {}/{}", t.class_matches, t.with_expected);
        }
        let d = self.d_list();
        if !d.is_empty() {
            let _ = writeln!(s, "unexplained entries:");
            for e in d {
                let _ = writeln!(s, "  ({},{},{}) a={} b={} {}", e.n, e.n_prime, e.m, e.a, e.b, e.published);
            }
        }
        s
    }
}

fn better(a: &(ClassifiedRoot, f64), b: &(ClassifiedRoot, f64)) -> bool {
    // deviations equal to within 1e−9 count as a tie, broken by class
    if (a.1 - b.1).abs() > 1e-9 {
        a.1 < b.1
    } else {
        a.0.root_class < b.0.root_class
    }
}

fn candidates_near(info: &TableInfo, entry: &TableEntry, opts: &AuditOptions) -> Vec<ClassifiedRoot> {
    let spec = info.spec(entry.qn, entry.a, entry.b);
    let v = entry.value;
    let mut search = SearchOptions::for_spec(&spec, Mode::All);
    search.interval = (v - opts.window, v + opts.window);
    search.panels_per_unit = opts.panels_per_unit;
    search.tolerance = opts.residual_tolerance;
    let oscillator = matches!(spec.potential, PotentialKind::Oscillator { .. });
    let mut found = Vec::new();
    for branch in BranchStrategy::all() {
        if oscillator && branch.sigma_inner == Sign::Minus {
            continue;
        }
        found.extend(real_roots_on_branch(&spec, &branch, &search));
    }
    if oscillator && spec.ring.a == 0.0 && spec.ring.b == 0.0 {
        let mut global = SearchOptions::for_spec(&spec, Mode::PaperCompat);
        global.branches = vec![BranchStrategy::canonical(), BranchStrategy::with_rhs(Sign::Minus)];
        global.tolerance = opts.residual_tolerance;
        found.extend(find_roots(&spec, &global).into_iter().filter(|r| (r.reported() - v).abs() < opts.window));
    }
    let real_hit = found
        .iter()
        .any(|r| r.root_class <= RootClass::B && (r.reported() - v).abs() < 1e-6);
    if !real_hit {
        'seeds: for sign in [Sign::Plus, Sign::Minus] {
            let branch = BranchStrategy::with_rhs(sign);
            for j in 1..=240 {
                let y = 0.05 * j as f64;
                if let Some((z, norm)) = complex_newton(&spec, &branch, C64::new(v, y), opts.residual_tolerance) {
                    let z = if z.im < 0.0 { z.conj() } else { z };
                    if z.im > 1e-6 {
                        found.push(ClassifiedRoot { energy: z, branch, residual_norm: norm, root_class: RootClass::C });
                        if (z.re - v).abs() < 1e-7 {
                            break 'seeds;
                        }
                    }
                }
            }
        }
    }
    dedup_roots(found, 1e-8)
}

fn audit_entry(info: &TableInfo, entry: &TableEntry, opts: &AuditOptions) -> AuditEntry {
    let v = entry.value;
    let mut cands = candidates_near(info, entry, opts);
    let mut best: Option<(ClassifiedRoot, f64)> = None;
    for r in &cands {
        let cand = (*r, (r.reported() - v).abs());
        if cand.1 < opts.tolerance && best.as_ref().is_none_or(|b| better(&cand, b)) {
            best = Some(cand);
        }
    }
    let mut out = AuditEntry {
        n: entry.qn.n,
        n_prime: entry.qn.n_prime,
        m: entry.qn.m,
        a: entry.a,
        b: entry.b,
        published: v,
        class: RootClass::D,
        energy_re: None,
        energy_im: None,
        deviation: None,
        branch: None,
        residual: None,
        nearest_re: None,
        nearest_distance: None,
        expected_class: entry.expected_class,
    };
    match best {
        Some((root, dev)) => {
            out.class = root.root_class;
            out.energy_re = Some(root.energy.re);
            out.energy_im = Some(root.energy.im);
            out.deviation = Some(dev);
            out.branch = Some(root.branch.label());
            out.residual = Some(root.residual_norm);
        }
        None => {
            if cands.is_empty() {
                let spec = info.spec(entry.qn, entry.a, entry.b);
                cands = find_roots(&spec, &SearchOptions::for_spec(&spec, Mode::All));
            }
            if let Some(near) = cands.iter().min_by(|x, y| {
                (x.reported() - v).abs().total_cmp(&(y.reported() - v).abs())
            }) {
                out.nearest_re = Some(near.reported());
                out.nearest_distance = Some((near.reported() - v).abs());
            }
        }
    }
    out
}

/// Classifies every published entry of table `table_id`.
pub fn audit_table(table_id: u32, published: &[TableEntry], opts: &AuditOptions) -> Result<AuditReport, SpectrumError> {
    let info = TableInfo::get(table_id)?;
    let entries: Vec<AuditEntry> = published.iter().map(|e| audit_entry(&info, e, opts)).collect();
    let mut summary = AuditSummary { total: entries.len(), ..Default::default() };
    for e in &entries {
        match e.class {
            RootClass::A => summary.a += 1,
            RootClass::B => summary.b += 1,
            RootClass::C => summary.c += 1,
            RootClass::D => summary.d += 1,
        }
        if let Some(dev) = e.deviation {
            summary.max_deviation = summary.max_deviation.max(dev);
        }
        if let Some(expected) = e.expected_class {
            summary.with_expected += 1;
            if expected == e.class {
                summary.class_matches += 1;
            }
        }
    }
    Ok(AuditReport {
        table_id,
        symmetry: info.symmetry.name().into(),
        potential: info.potential_name().into(),
        interpretation: INTERPRETATION.into(),
        tolerance: opts.tolerance,
        entries,
        summary,
    })
}
