use serde::{Deserialize, Serialize};

use super::ChannelError;

/// Eigenvalues below this are treated as exact zeros.
pub const ZERO_THRESHOLD: f64 = 1e-12;

/// Pattern text with `•` for non-identity and `∘` for identity, site 0 leftmost.
pub fn pattern_string(mask: u32, size: usize) -> String {
    (0..size)
        .map(|j| if mask >> j & 1 == 1 { '•' } else { '∘' })
        .collect()
}

pub fn parse_pattern(text: &str) -> Result<(u32, usize), ChannelError> {
    let mut mask = 0u32;
    let mut size = 0;
    for (j, c) in text.chars().enumerate() {
        match c {
            '•' | '1' | '*' => mask |= 1 << j,
            '∘' | '0' | 'o' => {}
            other => return Err(ChannelError::InvalidPattern(other.to_string())),
        }
        size = j + 1;
    }
    Ok((mask, size))
}

/// Shadow-channel eigenvalues of one block, indexed by site pattern
/// (bit `j` set when block site `j` carries a non-identity Pauli).
#[derive(Clone, Debug, PartialEq)]
pub struct BlockEigenvalues {
    size: usize,
    values: Vec<f64>,
}

impl BlockEigenvalues {
    pub fn new(size: usize, values: Vec<f64>) -> Result<Self, ChannelError> {
        if values.len() != 1 << size {
            return Err(ChannelError::InvalidTable(format!(
                "{} values for a block of {size} sites",
                values.len()
            )));
        }
        if (values[0] - 1.0).abs() > 1e-12 {
            return Err(ChannelError::InvalidTable(
                "identity pattern must have eigenvalue 1".into(),
            ));
        }
        if let Some(v) = values.iter().find(|v| !(-1e-12..=1.0 + 1e-12).contains(*v)) {
            return Err(ChannelError::InvalidTable(format!("eigenvalue {v} outside [0, 1]")));
        }
        Ok(BlockEigenvalues { size, values })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, pattern: u32) -> f64 {
        self.values[pattern as usize]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Overwrites one entry without validation (used for negative controls).
    pub fn set_unchecked(&mut self, pattern: u32, value: f64) {
        self.values[pattern as usize] = value;
    }

    pub fn is_zero(&self, pattern: u32) -> bool {
        self.get(pattern) < ZERO_THRESHOLD
    }

    /// Tensor product with `high` placed on the following sites.
    pub fn tensor(&self, high: &BlockEigenvalues) -> BlockEigenvalues {
        let size = self.size + high.size;
        let values = (0..1usize << size)
            .map(|m| self.values[m & ((1 << self.size) - 1)] * high.values[m >> self.size])
            .collect();
        BlockEigenvalues { size, values }
    }

    pub fn entries(&self) -> Vec<EigenEntry> {
        self.values
            .iter()
            .enumerate()
            .map(|(m, &v)| EigenEntry {
                pattern: pattern_string(m as u32, self.size),
                value: v,
                exact: rational_annotation(v),
            })
            .collect()
    }
}

/// One JSON row of an eigenvalue table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenEntry {
    pub pattern: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub exact: Option<String>,
}

/// `p/q` when `value` is a fraction with denominator at most `2·3^12`
/// (to within float rounding), found from the continued-fraction expansion.
pub fn rational_annotation(value: f64) -> Option<String> {
    const MAX_DEN: i64 = 2 * 531_441;
    if !value.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut x = value.abs();
    for _ in 0..40 {
        let a = x.floor();
        if a > 1e12 {
            break;
        }
        let a = a as i64;
        let (h2, k2) = (a * h1 + h0, a * k1 + k0);
        if k2 > MAX_DEN {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if ((h1 as f64) / (k1 as f64) - value.abs()).abs() <= 1e-14 * value.abs().max(1.0) {
            let sign = if value < 0.0 && h1 != 0 { "-" } else { "" };
            return Some(if k1 == 1 {
                format!("{sign}{h1}")
            } else {
                format!("{sign}{h1}/{k1}")
            });
        }
        let frac = x - x.floor();
        if frac < 1e-300 {
            break;
        }
        x = 1.0 / frac;
    }
    None
}

/// Per-block tables for a whole protocol, aligned with its covering.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelEigenvalues {
    blocks: Vec<BlockEigenvalues>,
}

impl ChannelEigenvalues {
    pub fn new(blocks: Vec<BlockEigenvalues>) -> Self {
        ChannelEigenvalues { blocks }
    }

    pub fn blocks(&self) -> &[BlockEigenvalues] {
        &self.blocks
    }

    pub fn blocks_mut(&mut self) -> &mut [BlockEigenvalues] {
        &mut self.blocks
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.blocks
                .iter()
                .map(|b| serde_json::to_value(b.entries()).expect("plain data"))
                .collect(),
        )
    }
}

/// Random single-qubit Pauli measurement: `λ∘ = 1`, `λ• = 1/3`.
pub fn pauli_block_eigs() -> BlockEigenvalues {
    BlockEigenvalues {
        size: 1,
        values: vec![1.0, 1.0 / 3.0],
    }
}

/// Bell-basis measurement: `λ∘∘ = 1`, `λ•∘ = λ∘• = 0`, `λ•• = 1/3`.
pub fn bell_block_eigs() -> BlockEigenvalues {
    BlockEigenvalues {
        size: 2,
        values: vec![1.0, 0.0, 0.0, 1.0 / 3.0],
    }
}

/// Two-qubit basis with deformation `δ = ln 2 − S₂`, `0 ≤ δ ≤ ln 2`.
pub fn tunable_block_eigs(delta: f64) -> Result<BlockEigenvalues, ChannelError> {
    let ln2 = std::f64::consts::LN_2;
    if !(0.0..=ln2 + 1e-12).contains(&delta) {
        return Err(ChannelError::OutOfRange {
            name: "delta",
            value: delta,
        });
    }
    let e = delta.exp();
    let cut = (e - 1.0) / 3.0;
    let full = (5.0 - 2.0 * e) / 9.0;
    Ok(BlockEigenvalues {
        size: 2,
        values: vec![1.0, cut, cut, full],
    })
}

/// Average subsystem purities of an `n`-qubit measurement basis, indexed by
/// subsystem mask.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntanglementFeature {
    size: usize,
    purities: Vec<f64>,
}

impl EntanglementFeature {
    pub fn new(size: usize, purities: Vec<f64>) -> Result<Self, ChannelError> {
        const TOL: f64 = 1e-10;
        if purities.len() != 1 << size {
            return Err(ChannelError::InvalidFeature(format!(
                "{} purities for {size} sites",
                purities.len()
            )));
        }
        let full = (1usize << size) - 1;
        if (purities[0] - 1.0).abs() > TOL || (purities[full] - 1.0).abs() > TOL {
            return Err(ChannelError::InvalidFeature(
                "empty and full subsystems must have purity 1".into(),
            ));
        }
        for (a, &p) in purities.iter().enumerate() {
            let k = (a as u32).count_ones() as i32;
            if p < 2f64.powi(-k) - TOL || p > 1.0 + TOL {
                return Err(ChannelError::InvalidFeature(format!(
                    "purity {p} of subsystem {a:#b} outside [2^-|A|, 1]"
                )));
            }
            if (p - purities[full ^ a]).abs() > TOL {
                return Err(ChannelError::InvalidFeature(format!(
                    "subsystem {a:#b} and its complement differ"
                )));
            }
        }
        Ok(EntanglementFeature { size, purities })
    }

    /// Two-site feature with single-site purity `p`.
    pub fn two_site(p: f64) -> Result<Self, ChannelError> {
        EntanglementFeature::new(2, vec![1.0, p, p, 1.0])
    }

    /// Three-site feature with every single-site (and so every pair) purity `p`.
    pub fn uniform_three_site(p: f64) -> Result<Self, ChannelError> {
        EntanglementFeature::new(3, vec![1.0, p, p, p, p, p, p, 1.0])
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn purity(&self, mask: u32) -> f64 {
        self.purities[mask as usize]
    }
}

/// `λ_A = (−1/3)^{|A|} Σ_{B⊆A} (−2)^{|B|} P̄_B` for every pattern `A`.
pub fn ef_to_eigs(ef: &EntanglementFeature) -> BlockEigenvalues {
    let values = (0..1u32 << ef.size)
        .map(|a| {
            let mut sum = 0.0;
            // enumerate submasks of a, including the empty set
            let mut b = a;
            loop {
                sum += (-2f64).powi(b.count_ones() as i32) * ef.purity(b);
                if b == 0 {
                    break;
                }
                b = (b - 1) & a;
            }
            (-1.0 / 3.0f64).powi(a.count_ones() as i32) * sum
        })
        .collect();
    BlockEigenvalues {
        size: ef.size,
        values,
    }
}

/// GHZ basis: `P̄_A = 1/2` for every proper non-empty subsystem.
pub fn ghz_entanglement_feature(n: usize) -> Result<EntanglementFeature, ChannelError> {
    if !(2..=20).contains(&n) {
        return Err(ChannelError::OutOfRange {
            name: "ghz size",
            value: n as f64,
        });
    }
    let full = (1usize << n) - 1;
    let purities = (0..=full)
        .map(|a| if a == 0 || a == full { 1.0 } else { 0.5 })
        .collect();
    EntanglementFeature::new(n, purities)
}

pub fn ghz_block_eigs(n: usize) -> Result<BlockEigenvalues, ChannelError> {
    Ok(ef_to_eigs(&ghz_entanglement_feature(n)?))
}

/// Closed form of the full-pattern GHZ eigenvalue, `(2^n + 1 + (−1)^n) / (2·3^n)`.
pub fn ghz_full_pattern_closed_form(n: usize) -> f64 {
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    (2f64.powi(n as i32) + 1.0 + sign) / (2.0 * 3f64.powi(n as i32))
}

/// Per-site norm base `f_n` with `‖P‖² = f_n^k` for compatible GHZ-n operators.
pub fn scaling_factor(n: usize) -> f64 {
    assert!(n >= 1, "block size must be positive");
    if n == 1 {
        return 3.0;
    }
    let nf = n as f64;
    if n % 2 == 0 {
        3.0 / (2f64.powi(n as i32 - 1) + 1.0).powf(1.0 / nf)
    } else {
        3.0 / 2f64.powf(1.0 - 1.0 / nf)
    }
}

/// Checks the stabilizer-measurement bound on one block: a compatible
/// full-weight operator is hit with probability `λ_[n] = f_n^{-n}`, which
/// can be at most `(2/3)^n`.
pub fn stabilizer_bound_check(n: usize) -> bool {
    let hit = scaling_factor(n).powi(-(n as i32));
    hit <= (2.0f64 / 3.0).powi(n as i32) * (1.0 + 1e-12) && scaling_factor(n) >= 1.5
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pauli_and_bell_tables() {
        let p = pauli_block_eigs();
        assert_eq!(p.get(0), 1.0);
        assert_eq!(p.get(1) * 3.0, 1.0);
        let b = bell_block_eigs();
        assert_eq!(b.get(0b00), 1.0);
        assert_eq!(b.get(0b01), 0.0);
        assert_eq!(b.get(0b10), 0.0);
        assert_eq!(b.get(0b11) * 3.0, 1.0);
    }

    #[test]
    fn tunable_limits() {
        assert_eq!(tunable_block_eigs(0.0).unwrap(), bell_block_eigs());
        let product = pauli_block_eigs().tensor(&pauli_block_eigs());
        let top = tunable_block_eigs(std::f64::consts::LN_2).unwrap();
        for m in 0..4 {
            assert_relative_eq!(top.get(m), product.get(m), max_relative = 1e-15);
        }
        let mid = tunable_block_eigs((11.0f64 / 8.0).ln()).unwrap();
        assert_relative_eq!(mid.get(0b01), 1.0 / 8.0, max_relative = 1e-14);
        assert_relative_eq!(mid.get(0b11), 1.0 / 4.0, max_relative = 1e-14);
        assert!(tunable_block_eigs(-0.1).is_err());
        assert!(tunable_block_eigs(0.7).is_err());
    }

    #[test]
    fn ef_map_examples() {
        let single = EntanglementFeature::new(1, vec![1.0, 1.0]).unwrap();
        assert_relative_eq!(ef_to_eigs(&single).get(1), 1.0 / 3.0, max_relative = 1e-15);
        let bell = ef_to_eigs(&EntanglementFeature::two_site(0.5).unwrap());
        assert!(bell.get(0b01).abs() < 1e-15);
        assert_relative_eq!(bell.get(0b11), 1.0 / 3.0, max_relative = 1e-15);
        for p in [0.5, 0.6, 0.75, 1.0] {
            let eigs = ef_to_eigs(&EntanglementFeature::uniform_three_site(p).unwrap());
            assert_relative_eq!(eigs.get(0b111), (7.0 - 6.0 * p) / 27.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn ghz_features_and_eigs() {
        let ef = ghz_entanglement_feature(3).unwrap();
        for a in 1..7 {
            assert_eq!(ef.purity(a), 0.5);
        }
        assert_eq!(ef.purity(7), 1.0);
        assert!(ghz_entanglement_feature(1).is_err());
        let g2 = ghz_block_eigs(2).unwrap();
        assert_relative_eq!(g2.get(0b11), 1.0 / 3.0, max_relative = 1e-15);
        assert!(g2.get(0b01).abs() < 1e-15);
        let g3 = ghz_block_eigs(3).unwrap();
        assert_relative_eq!(g3.get(0b111) * 27.0, 4.0, max_relative = 1e-14);
        for n in 2..=12 {
            let full = (1u32 << n) - 1;
            assert_relative_eq!(
                ghz_block_eigs(n).unwrap().get(full),
                ghz_full_pattern_closed_form(n),
                epsilon = 1e-12
            );
            assert_relative_eq!(
                scaling_factor(n),
                ghz_full_pattern_closed_form(n).powf(-1.0 / n as f64),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn feature_validation() {
        assert!(EntanglementFeature::two_site(0.4).is_err());
        assert!(EntanglementFeature::new(2, vec![1.0, 0.5, 0.7, 1.0]).is_err());
        assert!(EntanglementFeature::new(2, vec![0.9, 0.5, 0.5, 1.0]).is_err());
    }

    #[test]
    fn scaling_factor_values() {
        assert_eq!(scaling_factor(1), 3.0);
        assert_relative_eq!(scaling_factor(2), 3f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(scaling_factor(3), 3.0 / 2f64.powf(2.0 / 3.0), max_relative = 1e-15);
        assert!((scaling_factor(2) - 1.732).abs() < 5e-4);
        assert!((scaling_factor(3) - 1.890).abs() < 5e-4);
    }

    #[test]
    fn stabilizer_bound() {
        assert!(stabilizer_bound_check(1));
        assert!(stabilizer_bound_check(2));
        assert!(stabilizer_bound_check(8));
        assert!((1..=64).all(stabilizer_bound_check));
    }

    #[test]
    fn patterns_and_annotations() {
        assert_eq!(pattern_string(0b011, 3), "••∘");
        assert_eq!(parse_pattern("••∘").unwrap(), (0b011, 3));
        assert_eq!(rational_annotation(1.0 / 3.0).as_deref(), Some("1/3"));
        assert_eq!(rational_annotation(4.0 / 27.0).as_deref(), Some("4/27"));
        assert_eq!(rational_annotation(0.0).as_deref(), Some("0"));
        assert_eq!(rational_annotation(1.0).as_deref(), Some("1"));
        assert_eq!(
            rational_annotation(ghz_full_pattern_closed_form(12)).as_deref(),
            Some("683/177147")
        );
        assert_eq!(rational_annotation(std::f64::consts::PI), None);
    }
}
