//! Mamdani inference for the gain-correction stage of the fuzzy PID.
//!
//! Two scaled inputs (error and error rate) are fuzzified over seven
//! triangular sets on `[-3, 3]`, the 7x7 rule table yields three consequent
//! labels per cell (for the Kp, Ki and Kd corrections), and every output is
//! defuzzified by the discrete centroid over a 601-point grid.
//!
//! Operators are the classic min/max set: min for AND, min implication, max
//! aggregation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Half-width of the universe of discourse shared by inputs and outputs.
pub const DOMAIN_LIMIT: f64 = 3.0;

/// Number of slices used by the centroid defuzzifier.
pub const OUTPUT_GRID_POINTS: usize = 601;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LinguisticLabel {
    NB,
    NM,
    NS,
    ZO,
    PS,
    PM,
    PB,
}

impl LinguisticLabel {
    pub const ALL: [LinguisticLabel; 7] = [
        LinguisticLabel::NB,
        LinguisticLabel::NM,
        LinguisticLabel::NS,
        LinguisticLabel::ZO,
        LinguisticLabel::PS,
        LinguisticLabel::PM,
        LinguisticLabel::PB,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LinguisticLabel::NB => "NB",
            LinguisticLabel::NM => "NM",
            LinguisticLabel::NS => "NS",
            LinguisticLabel::ZO => "ZO",
            LinguisticLabel::PS => "PS",
            LinguisticLabel::PM => "PM",
            LinguisticLabel::PB => "PB",
        }
    }
}

impl fmt::Display for LinguisticLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LinguisticLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown linguistic label `{s}`")))
    }
}

/// Seven triangular membership functions covering `[-3, 3]`.
///
/// Each triangle peaks at its centre and reaches zero at the neighbouring
/// centres; the outermost sets are half-triangles. Inputs are clipped to the
/// domain, so the memberships always form a partition of unity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MembershipFamily {
    centers: [f64; 7],
}

impl Default for MembershipFamily {
    fn default() -> Self {
        Self {
            centers: [-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0],
        }
    }
}

impl MembershipFamily {
    /// Custom centres; the outer ones must sit on the domain edges.
    pub fn new(centers: [f64; 7]) -> Result<Self> {
        if centers.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("membership centers"));
        }
        if centers.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig(
                "membership centers must be strictly increasing".into(),
            ));
        }
        if centers[0] != -DOMAIN_LIMIT || centers[6] != DOMAIN_LIMIT {
            return Err(Error::InvalidConfig(
                "outer membership centers must be -3 and 3".into(),
            ));
        }
        Ok(Self { centers })
    }

    pub fn centers(&self) -> &[f64; 7] {
        &self.centers
    }

    /// Membership of `x` (clipped to the domain) in `label`.
    pub fn membership(&self, label: LinguisticLabel, x: f64) -> f64 {
        let x = x.clamp(-DOMAIN_LIMIT, DOMAIN_LIMIT);
        let i = label.index();
        let c = self.centers[i];
        if x == c {
            return 1.0;
        }
        if x < c {
            match i.checked_sub(1) {
                Some(l) if x > self.centers[l] => (x - self.centers[l]) / (c - self.centers[l]),
                _ => 0.0,
            }
        } else {
            match self.centers.get(i + 1) {
                Some(&r) if x < r => (r - x) / (r - c),
                _ => 0.0,
            }
        }
    }

    /// Locates the pair of adjacent sets bracketing `x`.
    ///
    /// Returns `(i, mu_i, mu_{i+1})` with `i` in `0..6`.
    fn bracket(&self, x: f64) -> (usize, f64, f64) {
        let x = x.clamp(-DOMAIN_LIMIT, DOMAIN_LIMIT);
        // first interval whose right centre is > x, capped at the last interval
        let i = self.centers[1..6].partition_point(|&c| c <= x);
        let (lo, hi) = (self.centers[i], self.centers[i + 1]);
        let width = hi - lo;
        (i, (hi - x) / width, (x - lo) / width)
    }

    pub fn fuzzify(&self, x: f64) -> Memberships {
        let mut degrees = [0.0; 7];
        if x.is_nan() {
            return Memberships(degrees);
        }
        let (i, lo, hi) = self.bracket(x);
        degrees[i] = lo;
        degrees[i + 1] = hi;
        Memberships(degrees)
    }
}

/// Membership degree of a crisp input in each of the seven labels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Memberships([f64; 7]);

impl Memberships {
    pub fn get(&self, label: LinguisticLabel) -> f64 {
        self.0[label.index()]
    }

    pub fn degrees(&self) -> &[f64; 7] {
        &self.0
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Labels with nonzero membership, in label order.
    pub fn active(&self) -> impl Iterator<Item = (LinguisticLabel, f64)> + '_ {
        LinguisticLabel::ALL
            .iter()
            .zip(self.0.iter())
            .filter(|(_, &mu)| mu > 0.0)
            .map(|(&l, &mu)| (l, mu))
    }
}

/// Consequent labels of one rule, for the Kp, Ki and Kd corrections.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Consequent {
    pub kp: LinguisticLabel,
    pub ki: LinguisticLabel,
    pub kd: LinguisticLabel,
}

impl Consequent {
    fn channel(&self, ch: usize) -> LinguisticLabel {
        match ch {
            0 => self.kp,
            1 => self.ki,
            _ => self.kd,
        }
    }
}

impl fmt::Display for Consequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}", self.kp, self.ki, self.kd)
    }
}

impl FromStr for Consequent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split('/').collect();
        if parts.len() != 3 {
            return Err(Error::InvalidConfig(format!(
                "rule cell `{s}` must have the form Kp/Ki/Kd"
            )));
        }
        Ok(Self {
            kp: parts[0].parse()?,
            ki: parts[1].parse()?,
            kd: parts[2].parse()?,
        })
    }
}

/// Rows of the standard gain-correction table: error label, then the seven
/// error-rate columns NB..PB.
const STANDARD_TABLE: [[&str; 7]; 7] = [
    ["PB/NB/PS", "PB/NB/NS", "PM/NM/NB", "PM/NM/NB", "PS/NS/NB", "ZO/ZO/NM", "ZO/ZO/PS"],
    ["PB/NB/ZO", "PB/NM/NS", "PM/NS/NM", "PS/NS/NM", "PS/ZO/NS", "ZO/PS/NS", "NS/PS/ZO"],
    ["PM/NM/ZO", "PM/NM/NS", "PM/NS/NS", "PS/ZO/NS", "ZO/PS/NS", "NS/PM/NS", "NS/PM/ZO"],
    ["PM/NM/ZO", "PM/NS/ZO", "PS/ZO/ZO", "ZO/PS/ZO", "NS/PS/ZO", "NM/PM/ZO", "NM/PB/ZO"],
    ["PS/ZO/PB", "PS/ZO/NS", "ZO/PS/PS", "NS/PS/PS", "NS/PM/PS", "NM/PB/PS", "NM/PB/PB"],
    ["PS/ZO/PB", "ZO/ZO/PM", "NS/PS/PM", "NM/PM/PM", "NM/PM/PS", "NM/PB/PS", "NB/PB/PB"],
    ["ZO/NB/PS", "ZO/NB/NS", "NM/NM/NB", "NM/NM/NB", "NM/NS/NB", "NB/ZO/NM", "NB/ZO/PS"],
];

/// 7x7 rule table indexed by (error label, error-rate label).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleBase {
    cells: [[Consequent; 7]; 7],
}

impl Default for RuleBase {
    fn default() -> Self {
        let mut cells = [[Consequent {
            kp: LinguisticLabel::ZO,
            ki: LinguisticLabel::ZO,
            kd: LinguisticLabel::ZO,
        }; 7]; 7];
        for (row, src) in cells.iter_mut().zip(STANDARD_TABLE.iter()) {
            for (cell, text) in row.iter_mut().zip(src.iter()) {
                *cell = text.parse().expect("standard rule table is well formed");
            }
        }
        Self { cells }
    }
}

impl RuleBase {
    pub fn new(cells: [[Consequent; 7]; 7]) -> Self {
        Self { cells }
    }

    pub fn get(&self, e: LinguisticLabel, ec: LinguisticLabel) -> Consequent {
        self.cells[e.index()][ec.index()]
    }
}

/// Writes the rule table (and optional centres) in the plain-text layout:
///
/// ```text
/// centers -3 -2 -1 0 1 2 3
/// e\ec NB NM NS ZO PS PM PB
/// NB PB/NB/PS PB/NB/NS ...
/// ```
///
/// One row per error label; cells are `Kp/Ki/Kd` triples. Lines starting
/// with `#` are comments.
pub fn format_knowledge_base(rules: &RuleBase, family: &MembershipFamily) -> String {
    let mut out = String::new();
    out.push_str("centers");
    for c in family.centers() {
        out.push_str(&format!(" {c}"));
    }
    out.push('\n');
    out.push_str("e\\ec");
    for l in LinguisticLabel::ALL {
        out.push_str(&format!(" {l}"));
    }
    out.push('\n');
    for e in LinguisticLabel::ALL {
        out.push_str(e.as_str());
        for ec in LinguisticLabel::ALL {
            out.push_str(&format!(" {}", rules.get(e, ec)));
        }
        out.push('\n');
    }
    out
}

/// Parses the layout written by [`format_knowledge_base`]. The `centers` line
/// is optional and defaults to the evenly spaced family.
pub fn parse_knowledge_base(text: &str) -> Result<(RuleBase, MembershipFamily)> {
    let mut family = MembershipFamily::default();
    let mut rows: Vec<[Consequent; 7]> = Vec::with_capacity(7);
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let head = tokens.next().unwrap_or_default();
        let rest: Vec<&str> = tokens.collect();
        match head {
            "centers" => {
                let values = rest
                    .iter()
                    .map(|t| {
                        t.parse::<f64>()
                            .map_err(|_| Error::InvalidConfig(format!("bad center `{t}`")))
                    })
                    .collect::<Result<Vec<f64>>>()?;
                let centers: [f64; 7] = values
                    .try_into()
                    .map_err(|_| Error::InvalidConfig("expected seven centers".into()))?;
                family = MembershipFamily::new(centers)?;
            }
            "e\\ec" => {
                let expected: Vec<&str> = LinguisticLabel::ALL.iter().map(|l| l.as_str()).collect();
                if rest != expected {
                    return Err(Error::InvalidConfig("rule table header out of order".into()));
                }
            }
            label => {
                let label: LinguisticLabel = label.parse()?;
                if label.index() != rows.len() {
                    return Err(Error::InvalidConfig(format!(
                        "rule row {label} out of order"
                    )));
                }
                if rest.len() != 7 {
                    return Err(Error::InvalidConfig(format!(
                        "rule row {label} has {} cells, expected 7",
                        rest.len()
                    )));
                }
                let mut row = [Consequent {
                    kp: LinguisticLabel::ZO,
                    ki: LinguisticLabel::ZO,
                    kd: LinguisticLabel::ZO,
                }; 7];
                for (cell, text) in row.iter_mut().zip(rest) {
                    *cell = text.parse()?;
                }
                rows.push(row);
            }
        }
    }
    let cells: [[Consequent; 7]; 7] = rows
        .try_into()
        .map_err(|_| Error::InvalidConfig("rule table must have exactly 7 rows".into()))?;
    Ok((RuleBase::new(cells), family))
}

/// Defuzzified corrections, each within `[-3, 3]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FuzzyCorrection {
    pub dkp: f64,
    pub dki: f64,
    pub dkd: f64,
}

/// A rule whose antecedents both have nonzero membership.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiredRule {
    pub e: LinguisticLabel,
    pub ec: LinguisticLabel,
    pub strength: f64,
}

/// Aggregated output set sampled on the output grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateSet {
    pub grid: Vec<f64>,
    pub membership: Vec<f64>,
}

impl AggregateSet {
    pub fn centroid(&self) -> f64 {
        defuzz_centroid(&self.grid, &self.membership)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Inference {
    pub fired: Vec<FiredRule>,
    pub kp: AggregateSet,
    pub ki: AggregateSet,
    pub kd: AggregateSet,
}

/// Discrete centroid `sum(mu_i x_i) / sum(mu_i)`; zero when the set is empty.
pub fn defuzz_centroid(grid: &[f64], membership: &[f64]) -> f64 {
    debug_assert_eq!(grid.len(), membership.len());
    let (moment, mass) = grid
        .iter()
        .zip(membership)
        .fold((0.0, 0.0), |(m, w), (&x, &mu)| (m + mu * x, w + mu));
    if mass > 0.0 {
        moment / mass
    } else {
        0.0
    }
}

/// Per grid slice: the lower of the two sets covering it and both degrees.
#[derive(Debug, Clone, Copy)]
struct GridSlice {
    x: f64,
    lower: usize,
    mu_lower: f64,
    mu_upper: f64,
}

/// Immutable inference engine: rule table, membership family and the
/// precomputed output grid.
#[derive(Debug, Clone)]
pub struct FuzzyEngine {
    rules: RuleBase,
    family: MembershipFamily,
    slices: Vec<GridSlice>,
    /// Slice index range where each output set is nonzero.
    spans: [(usize, usize); 7],
}

impl Default for FuzzyEngine {
    fn default() -> Self {
        Self::new(RuleBase::default(), MembershipFamily::default())
    }
}

impl FuzzyEngine {
    pub fn new(rules: RuleBase, family: MembershipFamily) -> Self {
        let step = 2.0 * DOMAIN_LIMIT / (OUTPUT_GRID_POINTS - 1) as f64;
        let slices = (0..OUTPUT_GRID_POINTS)
            .map(|i| {
                let x = if i == OUTPUT_GRID_POINTS - 1 {
                    DOMAIN_LIMIT
                } else {
                    -DOMAIN_LIMIT + i as f64 * step
                };
                let (lower, mu_lower, mu_upper) = family.bracket(x);
                GridSlice {
                    x,
                    lower,
                    mu_lower,
                    mu_upper,
                }
            })
            .collect::<Vec<GridSlice>>();
        let mut spans = [(usize::MAX, 0); 7];
        for (k, s) in slices.iter().enumerate() {
            for (label, mu) in [(s.lower, s.mu_lower), (s.lower + 1, s.mu_upper)] {
                if mu > 0.0 {
                    let span = &mut spans[label];
                    span.0 = span.0.min(k);
                    span.1 = span.1.max(k + 1);
                }
            }
        }
        Self {
            rules,
            family,
            slices,
            spans,
        }
    }

    pub fn rules(&self) -> &RuleBase {
        &self.rules
    }

    pub fn family(&self) -> &MembershipFamily {
        &self.family
    }

    pub fn grid(&self) -> Vec<f64> {
        self.slices.iter().map(|s| s.x).collect()
    }

    pub fn fuzzify(&self, x: f64) -> Memberships {
        self.family.fuzzify(x)
    }

    fn fire(&self, e_s: f64, ec_s: f64) -> Vec<FiredRule> {
        let me = self.family.fuzzify(e_s);
        let mec = self.family.fuzzify(ec_s);
        let mut fired = Vec::with_capacity(4);
        for (e, mu_e) in me.active() {
            for (ec, mu_ec) in mec.active() {
                fired.push(FiredRule {
                    e,
                    ec,
                    strength: mu_e.min(mu_ec),
                });
            }
        }
        fired
    }

    /// Highest firing strength reaching each consequent label, per channel.
    fn clip_levels(&self, fired: &[FiredRule]) -> [[f64; 7]; 3] {
        let mut levels = [[0.0f64; 7]; 3];
        for rule in fired {
            let cons = self.rules.get(rule.e, rule.ec);
            for (ch, level) in levels.iter_mut().enumerate() {
                let slot = &mut level[cons.channel(ch).index()];
                *slot = (*slot).max(rule.strength);
            }
        }
        levels
    }

    #[inline]
    fn aggregate_at(slice: &GridSlice, level: &[f64; 7]) -> f64 {
        // Only the two sets covering this slice are nonzero here.
        let lo = level[slice.lower].min(slice.mu_lower);
        let hi = level[slice.lower + 1].min(slice.mu_upper);
        lo.max(hi)
    }

    /// Fires the rule table on pre-scaled inputs and aggregates each output.
    pub fn infer(&self, e_s: f64, ec_s: f64) -> Inference {
        let fired = self.fire(e_s, ec_s);
        let levels = self.clip_levels(&fired);
        let grid = self.grid();
        let channel = |ch: usize| AggregateSet {
            grid: grid.clone(),
            membership: self
                .slices
                .iter()
                .map(|s| Self::aggregate_at(s, &levels[ch]))
                .collect(),
        };
        Inference {
            kp: channel(0),
            ki: channel(1),
            kd: channel(2),
            fired,
        }
    }

    /// Crisp corrections for the pre-scaled inputs.
    ///
    /// Equivalent to defuzzifying each set from [`FuzzyEngine::infer`], without
    /// materializing the sets.
    pub fn evaluate(&self, e_s: f64, ec_s: f64) -> FuzzyCorrection {
        let me = self.family.fuzzify(e_s);
        let mec = self.family.fuzzify(ec_s);
        let mut levels = [[0.0f64; 7]; 3];
        for (e, mu_e) in me.active() {
            for (ec, mu_ec) in mec.active() {
                let strength = mu_e.min(mu_ec);
                let cons = self.rules.get(e, ec);
                for (ch, level) in levels.iter_mut().enumerate() {
                    let slot = &mut level[cons.channel(ch).index()];
                    *slot = (*slot).max(strength);
                }
            }
        }
        let [dkp, dki, dkd] = levels.map(|level| self.centroid_of(&level));
        FuzzyCorrection { dkp, dki, dkd }
    }

    /// Centroid of the aggregate for one channel's clip levels. Slices outside
    /// every active set contribute exact zeros, so they are skipped.
    fn centroid_of(&self, level: &[f64; 7]) -> f64 {
        let (mut start, mut end) = (usize::MAX, 0);
        for (l, &lv) in level.iter().enumerate() {
            if lv > 0.0 {
                start = start.min(self.spans[l].0);
                end = end.max(self.spans[l].1);
            }
        }
        if start >= end {
            return 0.0;
        }
        let (mut moment, mut mass) = (0.0, 0.0);
        for s in &self.slices[start..end] {
            let mu = Self::aggregate_at(s, level);
            moment += mu * s.x;
            mass += mu;
        }
        if mass > 0.0 {
            moment / mass
        } else {
            0.0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::LinguisticLabel::*;
    use super::*;

    #[test]
    fn fuzzify_center_hit() {
        let m = MembershipFamily::default().fuzzify(0.0);
        assert_eq!(m.get(ZO), 1.0);
        assert_eq!(m.active().count(), 1);
    }

    #[test]
    fn fuzzify_between_centers() {
        let m = MembershipFamily::default().fuzzify(-2.5);
        assert_eq!(m.get(NB), 0.5);
        assert_eq!(m.get(NM), 0.5);
        assert_eq!(m.active().count(), 2);
    }

    #[test]
    fn fuzzify_clips() {
        let fam = MembershipFamily::default();
        assert_eq!(fam.fuzzify(7.0).get(PB), 1.0);
        assert_eq!(fam.fuzzify(-1e9).get(NB), 1.0);
        assert_eq!(fam.fuzzify(3.0).get(PB), 1.0);
        assert_eq!(fam.fuzzify(f64::NAN).total(), 0.0);
    }

    #[test]
    fn fuzzify_agrees_with_membership() {
        let fam = MembershipFamily::new([-3.0, -1.5, -0.7, 0.0, 0.4, 2.0, 3.0]).unwrap();
        for k in 0..=600 {
            let x = -3.0 + k as f64 * 0.01;
            let m = fam.fuzzify(x);
            for l in LinguisticLabel::ALL {
                assert!((m.get(l) - fam.membership(l, x)).abs() < 1e-12, "{l} at {x}");
            }
        }
    }

    #[test]
    fn family_validation() {
        assert!(MembershipFamily::new([-3.0, -2.0, -2.0, 0.0, 1.0, 2.0, 3.0]).is_err());
        assert!(MembershipFamily::new([-2.0, -1.5, -1.0, 0.0, 1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn label_round_trip() {
        for l in LinguisticLabel::ALL {
            assert_eq!(l.as_str().parse::<LinguisticLabel>().unwrap(), l);
            assert_eq!(LinguisticLabel::from_index(l.index()), Some(l));
        }
        assert!("XX".parse::<LinguisticLabel>().is_err());
        assert!(NB < NM && PM < PB);
    }

    #[test]
    fn centroid_examples() {
        assert_eq!(defuzz_centroid(&[-1.0, 0.0, 1.0], &[0.3, 0.5, 0.3]), 0.0);
        assert_eq!(defuzz_centroid(&[0.0, 1.0, 2.0, 3.0], &[0.0, 0.0, 0.7, 0.0]), 2.0);
        assert!((defuzz_centroid(&[0.0, 1.0, 2.0], &[0.0, 0.2, 0.6]) - 1.75).abs() < 1e-12);
        assert_eq!(defuzz_centroid(&[0.0, 1.0], &[0.0, 0.0]), 0.0);
    }

    #[test]
    fn single_rule_at_origin() {
        let engine = FuzzyEngine::default();
        let inf = engine.infer(0.0, 0.0);
        assert_eq!(
            inf.fired,
            vec![FiredRule {
                e: ZO,
                ec: ZO,
                strength: 1.0
            }]
        );
        let c = engine.evaluate(0.0, 0.0);
        assert!(c.dkp.abs() < 1e-12);
        assert!((c.dki - 1.0).abs() < 1e-12);
        assert!(c.dkd.abs() < 1e-12);
    }

    #[test]
    fn corner_cell() {
        let engine = FuzzyEngine::default();
        let inf = engine.infer(-3.0, -3.0);
        assert_eq!(inf.fired.len(), 1);
        assert_eq!((inf.fired[0].e, inf.fired[0].ec), (NB, NB));
        let cons = engine.rules().get(NB, NB);
        assert_eq!((cons.kp, cons.ki, cons.kd), (PB, NB, PS));
        let c = engine.evaluate(-3.0, -3.0);
        assert!(c.dkp > 0.0 && c.dki < 0.0 && c.dkd > 0.0);
        let mirror = engine.evaluate(3.0, 3.0);
        assert!((mirror.dkp + c.dkp).abs() < 1e-12);
    }

    #[test]
    fn two_rules_at_half() {
        let inf = FuzzyEngine::default().infer(-2.5, 0.0);
        assert_eq!(
            inf.fired,
            vec![
                FiredRule {
                    e: NB,
                    ec: ZO,
                    strength: 0.5
                },
                FiredRule {
                    e: NM,
                    ec: ZO,
                    strength: 0.5
                },
            ]
        );
    }

    #[test]
    fn evaluate_matches_infer_then_defuzz() {
        let engine = FuzzyEngine::default();
        let pairs = (0..=40).flat_map(|i| (0..=40).map(move |j| (-3.0 + 0.15 * i as f64, -3.0 + 0.15 * j as f64)));
        for (e, ec) in pairs.chain([(0.3, -1.7), (2.71, -0.05)]) {
            let inf = engine.infer(e, ec);
            let c = engine.evaluate(e, ec);
            assert!((c.dkp - inf.kp.centroid()).abs() < 1e-12);
            assert!((c.dki - inf.ki.centroid()).abs() < 1e-12);
            assert!((c.dkd - inf.kd.centroid()).abs() < 1e-12);
        }
    }

    #[test]
    fn text_table_round_trip() {
        let rules = RuleBase::default();
        let fam = MembershipFamily::default();
        let text = format_knowledge_base(&rules, &fam);
        assert!(text.contains("NB PB/NB/PS PB/NB/NS PM/NM/NB"));
        let (parsed, pfam) = parse_knowledge_base(&text).unwrap();
        assert_eq!(parsed, rules);
        assert_eq!(pfam, fam);
    }

    #[test]
    fn text_table_errors() {
        let text = format_knowledge_base(&RuleBase::default(), &MembershipFamily::default());
        let short: String = text.lines().take(8).collect::<Vec<_>>().join("\n");
        assert!(parse_knowledge_base(&short).is_err());
        let bad = text.replace("PB/NB/PS", "PB/NB");
        assert!(parse_knowledge_base(&bad).is_err());
        let swapped = text.replacen("NB PB/NB/PS", "NM PB/NB/PS", 1);
        assert!(parse_knowledge_base(&swapped).is_err());
    }
}
