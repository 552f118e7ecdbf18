//! Explicit POVMs, seeded count simulation and the success estimators.
//!
//! Outcome labels follow the analyzer wiring: Alice's outcome 0 is the
//! transmitted port `Ta` (the one that triggers the feed-forward on Bob's
//! side), Bob's outcome 0 is `Tb`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::discrimination::FeedForwardProtocol;
use crate::error::{Error, Result};
use crate::linalg::{kron, CMat4, CVec, CVec2, C64};
use crate::states::DensityMatrix2Q;

/// Tolerance on `‖Σ Π − I‖_max` accepted by the samplers.
pub const POVM_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    TaTb,
    TaRb,
    RaTb,
    RaRb,
}

impl Outcome {
    pub const ALL: [Outcome; 4] = [Outcome::TaTb, Outcome::TaRb, Outcome::RaTb, Outcome::RaRb];

    pub fn from_indices(alice: usize, bob: usize) -> Self {
        Self::ALL[2 * alice + bob]
    }

    pub fn alice(&self) -> usize {
        (*self as usize) / 2
    }

    pub fn bob(&self) -> usize {
        (*self as usize) % 2
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Outcome::TaTb => "TaTb",
            Outcome::TaRb => "TaRb",
            Outcome::RaTb => "RaTb",
            Outcome::RaRb => "RaRb",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A four-outcome projective measurement with analyzer-port labels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Povm {
    pub elements: [(Outcome, CMat4); 4],
}

impl Povm {
    pub fn completeness_deviation(&self) -> f64 {
        let sum = self.elements.iter().fold(CMat4::zeros(), |acc, (_, p)| acc + *p);
        sum.max_abs_diff(&CMat4::identity())
    }

    pub fn get(&self, o: Outcome) -> &CMat4 {
        &self.elements[o as usize].1
    }

    /// Outcome probabilities `Tr(ρ Πₒ)` in [`Outcome::ALL`] order.
    pub fn probabilities(&self, rho: &DensityMatrix2Q) -> [f64; 4] {
        self.elements.map(|(_, p)| rho.expectation(&p))
    }
}

/// The four global projectors `|i⟩⟨i| ⊗ |bⱼ|ᵢ⟩⟨bⱼ|ᵢ|` of a protocol.
pub fn protocol_to_povm(protocol: &FeedForwardProtocol) -> Result<Povm> {
    protocol.validate()?;
    let p = protocol.projectors();
    Ok(Povm {
        elements: Outcome::ALL.map(|o| (o, p[o.alice()][o.bob()])),
    })
}

/// Coincidence events per output pair.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoincidenceCounts {
    #[serde(rename = "TaTb")]
    pub ta_tb: u64,
    #[serde(rename = "TaRb")]
    pub ta_rb: u64,
    #[serde(rename = "RaTb")]
    pub ra_tb: u64,
    #[serde(rename = "RaRb")]
    pub ra_rb: u64,
}

impl CoincidenceCounts {
    pub fn new(ta_tb: u64, ta_rb: u64, ra_tb: u64, ra_rb: u64) -> Self {
        Self {
            ta_tb,
            ta_rb,
            ra_tb,
            ra_rb,
        }
    }

    pub fn get(&self, o: Outcome) -> u64 {
        match o {
            Outcome::TaTb => self.ta_tb,
            Outcome::TaRb => self.ta_rb,
            Outcome::RaTb => self.ra_tb,
            Outcome::RaRb => self.ra_rb,
        }
    }

    fn set(&mut self, o: Outcome, n: u64) {
        match o {
            Outcome::TaTb => self.ta_tb = n,
            Outcome::TaRb => self.ta_rb = n,
            Outcome::RaTb => self.ra_tb = n,
            Outcome::RaRb => self.ra_rb = n,
        }
    }

    pub fn total(&self) -> u64 {
        self.ta_tb + self.ta_rb + self.ra_tb + self.ra_rb
    }

    /// `label,count` rows in outcome order, with header.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("label,count\n");
        for o in Outcome::ALL {
            s.push_str(&format!("{o},{}\n", self.get(o)));
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut counts = Self::default();
        let mut seen = [false; 4];
        for (k, line) in data_lines(text).enumerate() {
            if k == 0 {
                expect_header(line, "label,count")?;
                continue;
            }
            let (label, count) = line
                .split_once(',')
                .ok_or_else(|| Error::InvalidInput(format!("malformed row `{line}`")))?;
            let o = Outcome::from_str(label.trim())?;
            let n = parse_count(count)?;
            if seen[o as usize] {
                return Err(Error::InvalidInput(format!("duplicate label {o}")));
            }
            seen[o as usize] = true;
            counts.set(o, n);
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidInput("missing outcome rows".into()));
        }
        Ok(counts)
    }
}

impl FromStr for Outcome {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Outcome::ALL
            .into_iter()
            .find(|o| o.as_str() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown outcome label `{s}`")))
    }
}

fn data_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
}

fn expect_header(line: &str, header: &str) -> Result<()> {
    if line != header {
        return Err(Error::InvalidInput(format!("expected header `{header}`, found `{line}`")));
    }
    Ok(())
}

fn parse_count(s: &str) -> Result<u64> {
    s.trim()
        .parse()
        .map_err(|_| Error::InvalidInput(format!("`{}` is not a nonnegative integer", s.trim())))
}

/// Multinomial draw of `n_total` coincidences with probabilities `Tr(ρΠₒ)`.
pub fn sample_coincidences(rho: &DensityMatrix2Q, povm: &Povm, n_total: u64, seed: u64) -> Result<CoincidenceCounts> {
    sample_coincidences_with(rho, povm, n_total, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Counts for both prepared states of a discrimination run, drawn in order
/// from one stream seeded with `seed`.
pub fn sample_discrimination_run(
    rho0: &DensityMatrix2Q,
    rho1: &DensityMatrix2Q,
    povm: &Povm,
    n_per_state: u64,
    seed: u64,
) -> Result<(CoincidenceCounts, CoincidenceCounts)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c0 = sample_coincidences_with(rho0, povm, n_per_state, &mut rng)?;
    let c1 = sample_coincidences_with(rho1, povm, n_per_state, &mut rng)?;
    Ok((c0, c1))
}

/// As [`sample_coincidences`] with a caller-supplied generator.
pub fn sample_coincidences_with<R: Rng>(
    rho: &DensityMatrix2Q,
    povm: &Povm,
    n_total: u64,
    rng: &mut R,
) -> Result<CoincidenceCounts> {
    let deviation = povm.completeness_deviation();
    if deviation > POVM_TOL {
        return Err(Error::IncompletePovm { deviation });
    }
    if n_total == 0 {
        return Err(Error::InvalidInput("n_total must be positive".into()));
    }
    let probs = povm.probabilities(rho).map(|p| p.max(0.0));
    let mut counts = CoincidenceCounts::default();
    let mut remaining = n_total;
    for (k, o) in Outcome::ALL.into_iter().enumerate() {
        if k == 3 {
            counts.set(o, remaining);
            break;
        }
        // conditional probability of bin k given it is not one of 0..k
        let mass: f64 = probs[k..].iter().sum();
        let q = if mass > 0.0 { (probs[k] / mass).clamp(0.0, 1.0) } else { 0.0 };
        let n = if remaining == 0 || q == 0.0 {
            0
        } else if q >= 1.0 {
            remaining
        } else {
            Binomial::new(remaining, q)
                .map_err(|e| Error::InvalidInput(e.to_string()))?
                .sample(rng)
        };
        counts.set(o, n);
        remaining -= n;
    }
    Ok(counts)
}

/// Success estimates with 1-s.d. binomial errors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscriminationEstimate {
    pub p0: f64,
    pub p1: f64,
    pub p_avg: f64,
    pub sigma_p0: f64,
    pub sigma_p1: f64,
    pub sigma_avg: f64,
}

/// `P₀ = (n_TaTb + n_RaTb)/Σ₀` from the run preparing state 0 and
/// `P₁ = (n_TaRb + n_RaRb)/Σ₁` from the run preparing state 1.
pub fn estimate(counts0: &CoincidenceCounts, counts1: &CoincidenceCounts) -> Result<DiscriminationEstimate> {
    let t0 = counts0.total();
    let t1 = counts1.total();
    if t0 == 0 {
        return Err(Error::EmptyCounts { which: "counts0" });
    }
    if t1 == 0 {
        return Err(Error::EmptyCounts { which: "counts1" });
    }
    let p0 = (counts0.ta_tb + counts0.ra_tb) as f64 / t0 as f64;
    let p1 = (counts1.ta_rb + counts1.ra_rb) as f64 / t1 as f64;
    let sigma_p0 = (p0 * (1.0 - p0) / t0 as f64).sqrt();
    let sigma_p1 = (p1 * (1.0 - p1) / t1 as f64).sqrt();
    Ok(DiscriminationEstimate {
        p0,
        p1,
        p_avg: 0.5 * (p0 + p1),
        sigma_p0,
        sigma_p1,
        sigma_avg: 0.5 * (sigma_p0 * sigma_p0 + sigma_p1 * sigma_p1).sqrt(),
    })
}

/// Polarization analyzer settings used for tomography.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarization {
    H,
    V,
    D,
    A,
    R,
    L,
}

impl Polarization {
    pub const ALL: [Polarization; 6] = [
        Polarization::H,
        Polarization::V,
        Polarization::D,
        Polarization::A,
        Polarization::R,
        Polarization::L,
    ];

    pub fn ket(&self) -> CVec2 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let (a, b) = match self {
            Polarization::H => (C64::new(1.0, 0.0), C64::new(0.0, 0.0)),
            Polarization::V => (C64::new(0.0, 0.0), C64::new(1.0, 0.0)),
            Polarization::D => (C64::new(s, 0.0), C64::new(s, 0.0)),
            Polarization::A => (C64::new(s, 0.0), C64::new(-s, 0.0)),
            Polarization::R => (C64::new(s, 0.0), C64::new(0.0, s)),
            Polarization::L => (C64::new(s, 0.0), C64::new(0.0, -s)),
        };
        CVec([a, b])
    }

    pub fn as_char(&self) -> char {
        match self {
            Polarization::H => 'H',
            Polarization::V => 'V',
            Polarization::D => 'D',
            Polarization::A => 'A',
            Polarization::R => 'R',
            Polarization::L => 'L',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.as_char() == c)
    }
}

/// Product setting `|a⟩⟨a| ⊗ |b⟩⟨b|`, written as two letters (`"DL"`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TomoSetting {
    pub alice: Polarization,
    pub bob: Polarization,
}

impl TomoSetting {
    pub fn projector(&self) -> CMat4 {
        kron(&self.alice.ket().projector(), &self.bob.ket().projector())
    }

    pub fn label(&self) -> String {
        format!("{}{}", self.alice.as_char(), self.bob.as_char())
    }
}

impl fmt::Display for TomoSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.alice.as_char(), self.bob.as_char())
    }
}

impl FromStr for TomoSetting {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut chars = s.chars();
        match (chars.next(), chars.next(), chars.next()) {
            (Some(a), Some(b), None) => match (Polarization::from_char(a), Polarization::from_char(b)) {
                (Some(alice), Some(bob)) => Ok(Self { alice, bob }),
                _ => Err(Error::InvalidInput(format!("unknown setting `{s}`"))),
            },
            _ => Err(Error::InvalidInput(format!("setting `{s}` must be two letters"))),
        }
    }
}

impl Serialize for TomoSetting {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

impl<'de> Deserialize<'de> for TomoSetting {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// All 36 settings, Alice-major over `H, V, D, A, R, L`
/// (`HH, HV, …, HL, VH, …, LL`).
pub fn tomography_settings() -> Vec<TomoSetting> {
    Polarization::ALL
        .iter()
        .flat_map(|&alice| Polarization::ALL.iter().map(move |&bob| TomoSetting { alice, bob }))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TomoEntry {
    pub setting: TomoSetting,
    pub count: u64,
    /// Relative integration time of this setting.
    #[serde(default = "unit_exposure")]
    pub exposure: f64,
}

fn unit_exposure() -> f64 {
    1.0
}

/// Counts for the 36 overcomplete tomography settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<TomoEntry>", into = "Vec<TomoEntry>")]
pub struct TomographyRecord {
    entries: Vec<TomoEntry>,
}

impl TryFrom<Vec<TomoEntry>> for TomographyRecord {
    type Error = Error;
    fn try_from(entries: Vec<TomoEntry>) -> Result<Self> {
        Self::new(entries)
    }
}

impl From<TomographyRecord> for Vec<TomoEntry> {
    fn from(r: TomographyRecord) -> Self {
        r.entries
    }
}

impl TomographyRecord {
    pub fn new(entries: Vec<TomoEntry>) -> Result<Self> {
        if entries.len() != 36 {
            return Err(Error::InvalidInput(format!(
                "tomography record needs 36 settings, got {}",
                entries.len()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for e in &entries {
            if !seen.insert(e.setting) {
                return Err(Error::InvalidInput(format!("duplicate setting {}", e.setting)));
            }
            if !(e.exposure.is_finite() && e.exposure > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "exposure for {} must be positive, got {}",
                    e.setting, e.exposure
                )));
            }
        }
        Ok(Self { entries })
    }

    /// Record in [`tomography_settings`] order with unit exposures.
    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        let entries = tomography_settings()
            .into_iter()
            .zip(counts.iter())
            .map(|(setting, &count)| TomoEntry {
                setting,
                count,
                exposure: 1.0,
            })
            .collect();
        Self::new(entries)
    }

    pub fn entries(&self) -> &[TomoEntry] {
        &self.entries
    }

    pub fn total_counts(&self) -> u64 {
        self.entries.iter().map(|e| e.count).sum()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("setting,count,exposure\n");
        for e in &self.entries {
            s.push_str(&format!("{},{},{}\n", e.setting, e.count, e.exposure));
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (k, line) in data_lines(text).enumerate() {
            if k == 0 {
                expect_header(line, "setting,count,exposure")?;
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 3 {
                return Err(Error::InvalidInput(format!("malformed row `{line}`")));
            }
            let exposure: f64 = cols[2]
                .trim()
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad exposure `{}`", cols[2])))?;
            entries.push(TomoEntry {
                setting: cols[0].trim().parse()?,
                count: parse_count(cols[1])?,
                exposure,
            });
        }
        Self::new(entries)
    }
}

/// Poisson counts with mean `n_per_setting · Tr(ρΠₛ)` for every setting.
pub fn simulate_tomography(rho: &DensityMatrix2Q, n_per_setting: u64, seed: u64) -> Result<TomographyRecord> {
    if n_per_setting == 0 {
        return Err(Error::InvalidInput("n_per_setting must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = Vec::with_capacity(36);
    for setting in tomography_settings() {
        let mean = n_per_setting as f64 * rho.expectation(&setting.projector()).max(0.0);
        let count = if mean > 0.0 {
            Poisson::new(mean)
                .map_err(|e| Error::InvalidInput(e.to_string()))?
                .sample(&mut rng) as u64
        } else {
            0
        };
        entries.push(TomoEntry {
            setting,
            count,
            exposure: 1.0,
        });
    }
    TomographyRecord::new(entries)
}

/// Record whose counts are the expected counts rounded to integers.
pub fn noiseless_tomography(rho: &DensityMatrix2Q, n_per_setting: u64) -> Result<TomographyRecord> {
    let counts: Vec<u64> = tomography_settings()
        .iter()
        .map(|s| (n_per_setting as f64 * rho.expectation(&s.projector()).max(0.0)).round() as u64)
        .collect();
    TomographyRecord::from_counts(&counts)
}
