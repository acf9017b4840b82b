//! Generation verdicts from structure constants, subgroup contributions,
//! triangle groups and Ree's inequality.

use std::fmt;
use std::sync::Arc;

use num_integer::Integer;

use crate::chartable::CharacterTable;
use crate::classalg::{self, sigma_h, ClassTuple, FusionMap};
use crate::perm::CycleType;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalysisError {
    #[error("Ree's inequality needs at least 3 permutations, got {0}")]
    TooFewPermutations(usize),
    #[error("cycle types on {found} points, expected {expected}")]
    DegreeMismatch { expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Triangle {
    Finite { name: String, order: u64 },
    Euclidean,
    Hyperbolic,
}

impl fmt::Display for Triangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Triangle::Finite { name, order } => write!(f, "finite {name} (order {order})"),
            Triangle::Euclidean => write!(f, "euclidean"),
            Triangle::Hyperbolic => write!(f, "hyperbolic"),
        }
    }
}

/// Classifies the triangle group `Δ(l, m, n)` by the sign of
/// `1/l + 1/m + 1/n - 1`, naming the finite ones.
pub fn triangle_classify(l: u64, m: u64, n: u64) -> Triangle {
    let mut v = [l, m, n];
    v.sort_unstable();
    let [l, m, n] = v;
    let lhs = m * n + l * n + l * m;
    let rhs = l * m * n;
    if lhs == rhs {
        return Triangle::Euclidean;
    }
    if lhs < rhs {
        return Triangle::Hyperbolic;
    }
    let (name, order) = match (l, m, n) {
        (1, m, n) => {
            let k = m.gcd(&n);
            (format!("C{k}"), k)
        }
        (2, 2, n) => (format!("D{}", 2 * n), 2 * n),
        (2, 3, 3) => ("A4".to_string(), 12),
        (2, 3, 4) => ("S4".to_string(), 24),
        (2, 3, 5) => ("A5".to_string(), 60),
        _ => unreachable!("every spherical triple is listed"),
    };
    Triangle::Finite { name, order }
}

/// Whether `l, m, n` are pairwise coprime. A group generated by elements of
/// such orders has no soluble quotient, so soluble subgroups can be skipped.
pub fn coprime_no_soluble_quotient(l: u64, m: u64, n: u64) -> bool {
    l.gcd(&m) == 1 && l.gcd(&n) == 1 && m.gcd(&n) == 1
}

/// One maximal subgroup `H` of the scenario's group.
#[derive(Debug, Clone)]
pub struct SubgroupRecord {
    pub name: String,
    pub order: u64,
    pub soluble: bool,
    pub fusion: Option<FusionMap>,
    /// Number of conjugates of `H` containing the fixed element.
    pub copies: Option<u64>,
    /// Where `copies` came from, for reports.
    pub copies_source: String,
    /// `H`-class of the fixed element; when absent the largest `σ` over the
    /// classes fusing to the target is used.
    pub target: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PruneReason {
    /// Pairwise coprime orders forbid soluble quotients.
    Soluble,
    /// `|H|` is not divisible by the lcm of the element orders.
    OrderNotDivisible { lcm: u64 },
}

impl fmt::Display for PruneReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PruneReason::Soluble => write!(f, "soluble"),
            PruneReason::OrderNotDivisible { lcm } => write!(f, "order not divisible by {lcm}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LedgerEntry {
    pub subgroup: String,
    pub sigma: u64,
    pub copies: u64,
    pub product: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContributionLedger {
    pub xi_total: u64,
    pub entries: Vec<LedgerEntry>,
    pub pruned: Vec<(String, PruneReason)>,
    /// Records that survived pruning but lack the data to be counted.
    pub missing: Vec<(String, String)>,
    pub xi_star_lower_bound: i128,
}

impl ContributionLedger {
    pub fn is_complete(&self) -> bool {
        self.missing.is_empty()
    }

    pub fn contributions(&self) -> u64 {
        self.entries.iter().map(|e| e.product).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReeCertificate {
    Violated { total: u64, bound: u64 },
    Satisfied { total: u64, bound: u64 },
}

impl ReeCertificate {
    pub fn is_violated(&self) -> bool {
        matches!(self, ReeCertificate::Violated { .. })
    }

    pub fn total(&self) -> u64 {
        match *self {
            ReeCertificate::Violated { total, .. } | ReeCertificate::Satisfied { total, .. } => {
                total
            }
        }
    }

    pub fn bound(&self) -> u64 {
        match *self {
            ReeCertificate::Violated { bound, .. } | ReeCertificate::Satisfied { bound, .. } => {
                bound
            }
        }
    }
}

impl fmt::Display for ReeCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReeCertificate::Violated { total, bound } => write!(f, "{total} > {bound} VIOLATED"),
            ReeCertificate::Satisfied { total, bound } => write!(f, "{total} <= {bound} SATISFIED"),
        }
    }
}

/// Ree's inequality `c_1 + … + c_s ≤ (s-2)n + 2` for permutations with
/// product one generating a transitive group. A violation rules the
/// configuration out.
pub fn ree_test(n: usize, types: &[CycleType]) -> Result<ReeCertificate, AnalysisError> {
    let s = types.len();
    if s < 3 {
        return Err(AnalysisError::TooFewPermutations(s));
    }
    if let Some(t) = types.iter().find(|t| t.degree != n) {
        return Err(AnalysisError::DegreeMismatch {
            expected: n,
            found: t.degree,
        });
    }
    let total: u64 = types.iter().map(|t| t.num_cycles() as u64).sum();
    let bound = (s as u64 - 2) * n as u64 + 2;
    Ok(if total > bound {
        ReeCertificate::Violated { total, bound }
    } else {
        ReeCertificate::Satisfied { total, bound }
    })
}

/// A single generation question: does the tuple's class data force
/// generation of the whole group?
#[derive(Debug, Clone)]
pub struct Scenario {
    pub table: Arc<CharacterTable>,
    pub tuple: ClassTuple,
    pub subgroups: Vec<SubgroupRecord>,
    pub ree: Option<ReeCertificate>,
    /// Free-text references for results established elsewhere.
    pub external: Vec<String>,
}

impl Scenario {
    pub fn element_orders(&self) -> Vec<u64> {
        self.tuple
            .entries()
            .iter()
            .map(|&c| self.table.classes[c].element_order)
            .collect()
    }

    pub fn class_names(&self) -> Vec<String> {
        self.tuple.names(&self.table)
    }
}

fn sigma_for(record: &SubgroupRecord, f: &FusionMap, tuple: &ClassTuple) -> Result<u64, String> {
    let targets = match record.target {
        Some(t) => vec![t],
        None => f.preimages(tuple.target()),
    };
    let mut best = 0;
    for t in targets {
        best = best.max(sigma_h(f, tuple, t).map_err(|e| e.to_string())?);
    }
    Ok(best)
}

/// Structure constant, per-subgroup contributions and the resulting lower
/// bound `ξ* ≥ ξ − Σ σ_H · copies_H`.
pub fn build_ledger(s: &Scenario) -> Result<ContributionLedger, classalg::ClassAlgError> {
    let xi_total = classalg::xi(&s.table, &s.tuple)?;
    let orders = s.element_orders();
    let lcm = orders.iter().fold(1u64, |a, &o| a.lcm(&o));
    let coprime = orders.len() == 3 && coprime_no_soluble_quotient(orders[0], orders[1], orders[2]);
    let mut ledger = ContributionLedger {
        xi_total,
        entries: Vec::new(),
        pruned: Vec::new(),
        missing: Vec::new(),
        xi_star_lower_bound: xi_total as i128,
    };
    for r in &s.subgroups {
        if coprime && r.soluble {
            ledger.pruned.push((r.name.clone(), PruneReason::Soluble));
            continue;
        }
        if r.order % lcm != 0 {
            ledger
                .pruned
                .push((r.name.clone(), PruneReason::OrderNotDivisible { lcm }));
            continue;
        }
        let (Some(f), Some(copies)) = (&r.fusion, r.copies) else {
            let what = if r.fusion.is_none() {
                "fusion"
            } else {
                "copies"
            };
            ledger
                .missing
                .push((r.name.clone(), format!("no {what} data")));
            continue;
        };
        match sigma_for(r, f, &s.tuple) {
            Ok(sigma) => ledger.entries.push(LedgerEntry {
                subgroup: r.name.clone(),
                sigma,
                copies,
                product: sigma * copies,
            }),
            Err(e) => ledger.missing.push((r.name.clone(), e)),
        }
    }
    ledger.xi_star_lower_bound = xi_total as i128 - ledger.contributions() as i128;
    Ok(ledger)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Conclusion {
    Generated,
    NotGenerated,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Reason {
    TrianglesFinite,
    ZeroStructureConstant,
    ReeViolation,
    PositiveLowerBound,
    NoEligibleSubgroup,
    Unresolved,
}

impl Reason {
    pub fn conclusion(self) -> Conclusion {
        match self {
            Reason::TrianglesFinite | Reason::ZeroStructureConstant | Reason::ReeViolation => {
                Conclusion::NotGenerated
            }
            Reason::PositiveLowerBound | Reason::NoEligibleSubgroup => Conclusion::Generated,
            Reason::Unresolved => Conclusion::Inconclusive,
        }
    }
}

impl std::str::FromStr for Conclusion {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "Generated" => Ok(Conclusion::Generated),
            "NotGenerated" => Ok(Conclusion::NotGenerated),
            "Inconclusive" => Ok(Conclusion::Inconclusive),
            other => Err(format!("unknown conclusion `{other}`")),
        }
    }
}

impl std::str::FromStr for Reason {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "TrianglesFinite" => Reason::TrianglesFinite,
            "ZeroStructureConstant" => Reason::ZeroStructureConstant,
            "ReeViolation" => Reason::ReeViolation,
            "PositiveLowerBound" => Reason::PositiveLowerBound,
            "NoEligibleSubgroup" => Reason::NoEligibleSubgroup,
            "Unresolved" => Reason::Unresolved,
            other => return Err(format!("unknown reason `{other}`")),
        })
    }
}

impl fmt::Display for Conclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub reason: Reason,
    pub ledger: Option<ContributionLedger>,
    pub ree: Option<ReeCertificate>,
    pub triangle: Option<Triangle>,
    pub notes: Vec<String>,
}

impl Verdict {
    pub fn conclusion(&self) -> Conclusion {
        self.reason.conclusion()
    }
}

/// Runs the decision cascade: finite triangle group, vanishing structure
/// constant, Ree violation, positive lower bound, and otherwise gives up.
pub fn decide(s: &Scenario) -> Verdict {
    let orders = s.element_orders();
    let triangle = (orders.len() == 3).then(|| triangle_classify(orders[0], orders[1], orders[2]));
    let mut notes: Vec<String> = s
        .external
        .iter()
        .map(|r| format!("external: {r}"))
        .collect();
    let (ledger, xi_err) = match build_ledger(s) {
        Ok(l) => (Some(l), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let verdict = |reason, notes| Verdict {
        reason,
        ledger: ledger.clone(),
        ree: s.ree,
        triangle: triangle.clone(),
        notes,
    };

    if let Some(Triangle::Finite { name, order }) = &triangle {
        if *order < s.table.group_order {
            notes.push(format!("Δ is {name} of order {order}"));
            return verdict(Reason::TrianglesFinite, notes);
        }
    }
    let Some(l) = &ledger else {
        notes.push(format!(
            "structure constant: {}",
            xi_err.unwrap_or_default()
        ));
        return verdict(Reason::Unresolved, notes);
    };
    if l.xi_total == 0 {
        return verdict(Reason::ZeroStructureConstant, notes);
    }
    if s.ree.is_some_and(|r| r.is_violated()) {
        return verdict(Reason::ReeViolation, notes);
    }
    if !l.is_complete() {
        for (name, why) in &l.missing {
            notes.push(format!("{name}: {why}"));
        }
        return verdict(Reason::Unresolved, notes);
    }
    if l.xi_star_lower_bound > 0 {
        let reason = if l.entries.is_empty() {
            Reason::NoEligibleSubgroup
        } else {
            Reason::PositiveLowerBound
        };
        return verdict(reason, notes);
    }
    verdict(Reason::Unresolved, notes)
}
