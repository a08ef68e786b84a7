//! Self-checks: analytic identities against the brute-force oracle (fast) and
//! Monte Carlo checks of the estimator (full).

use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::config::CampaignConfig;
use super::estimate::{cmd_estimate, EstimateOptions};
use super::norm::cmd_norm;
use super::presets;
use super::sweep::{cmd_sweep, SweepAxis, SweepOptions};
use super::HarnessError;
use crate::channels::oracle::{
    bell_basis, computational_basis, cphase_single_site_purity, cphase_states, entanglement_feature_of,
    ghz_basis,
};
use crate::channels::{
    bell_block_eigs, delta_from_phi, ef_to_eigs, ghz_block_eigs, ghz_entanglement_feature,
    ghz_full_pattern_closed_form, norm_from_eigenvalues, oracle_block_eig, pauli_block_eigs,
    scaling_factor, shadow_norm_sq, tunable_block_eigs, BasisFamily, BlockEigenvalues,
    ChannelEigenvalues, EntanglementFeature, NormValue, ProtocolSpec, ScrambleMode,
};
use crate::estimation::{estimate, hit_frequency, second_moment};
use crate::operators::{Boundary, Covering, Parity, PauliString};
use crate::simulator::{prepare_preset, sample_dataset, QuantumState, StatePreset};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Level {
    Fast,
    Full,
}

impl FromStr for Level {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fast" => Ok(Level::Fast),
            "full" => Ok(Level::Full),
            _ => Err(HarnessError::Config(format!("unknown validation level {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ValidateOptions {
    pub level: Level,
    pub seed: u64,
    pub workers: usize,
    /// Replace the Bell `λ••` entry used by every check with a wrong value.
    pub tamper_bell: bool,
}

impl ValidateOptions {
    pub fn new(level: Level) -> Self {
        ValidateOptions {
            level,
            seed: 2024,
            workers: 0,
            tamper_bell: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect()
    }
}

struct Ctx {
    opts: ValidateOptions,
    checks: Vec<CheckResult>,
}

impl Ctx {
    fn record(&mut self, name: &str, outcome: Result<String, String>) {
        let (passed, detail) = match outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        self.checks.push(CheckResult {
            name: name.into(),
            passed,
            detail,
        });
    }

    fn run(&mut self, name: &str, check: impl FnOnce(&ValidateOptions) -> Result<String, HarnessError>) {
        let outcome = check(&self.opts).map_err(|e| match e {
            HarnessError::Validation(msg) => msg,
            other => other.to_string(),
        });
        self.record(name, outcome);
    }
}

fn fail(msg: String) -> HarnessError {
    HarnessError::Validation(msg)
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), HarnessError> {
    if ok {
        Ok(())
    } else {
        Err(fail(msg()))
    }
}

const TAMPERED_BELL: f64 = 0.3;

fn bell_table(opts: &ValidateOptions) -> BlockEigenvalues {
    let mut t = bell_block_eigs();
    if opts.tamper_bell {
        t.set_unchecked(0b11, TAMPERED_BELL);
    }
    t
}

/// The protocol's eigenvalues, with Bell blocks swapped for [`bell_table`].
fn eigs_for(spec: &ProtocolSpec, opts: &ValidateOptions) -> Result<ChannelEigenvalues, HarnessError> {
    let mut eigs = spec.eigenvalues()?;
    for (block, family) in eigs.blocks_mut().iter_mut().zip(spec.families()) {
        if *family == BasisFamily::Bell {
            *block = bell_table(opts);
        }
    }
    Ok(eigs)
}

fn table_vs_oracle(table: &BlockEigenvalues, basis: &[Vec<crate::dense::C64>]) -> Result<String, HarnessError> {
    let mut worst: f64 = 0.0;
    for pattern in 0..1u32 << table.size() {
        let want = oracle_block_eig(basis, pattern)?;
        let got = table.get(pattern);
        worst = worst.max((want - got).abs());
        ensure((want - got).abs() <= 1e-12, || format!("pattern {pattern:#b}: table {got}, oracle {want}"))?;
    }
    Ok(format!("max deviation {worst:.1e}"))
}

fn chain_spec(n: usize, family: BasisFamily, scramble: ScrambleMode) -> Result<ProtocolSpec, HarnessError> {
    let size = family.block_size();
    let covering = if size == 1 {
        Covering::singletons(n)
    } else if size == 2 {
        Covering::dimer_chain(n, Parity::Even, Boundary::Open)?
    } else {
        Covering::n_mer_chain(n, size, 0)?
    };
    let families = vec![family; covering.num_blocks()];
    Ok(ProtocolSpec::new(covering, families, scramble)?)
}

fn z_string(n: usize, k: usize) -> Result<PauliString, HarnessError> {
    let text: String = (0..n).map(|q| if q < k { 'Z' } else { 'I' }).collect();
    Ok(text.parse()?)
}

fn fast_checks(ctx: &mut Ctx) {
    ctx.run("eigenvalues-pauli-oracle", |_| table_vs_oracle(&pauli_block_eigs(), &computational_basis(1)));
    ctx.run("eigenvalues-bell-oracle", |o| table_vs_oracle(&bell_table(o), &bell_basis()));
    ctx.run("eigenvalues-tunable-endpoints", |o| {
        let bell = tunable_block_eigs(0.0)?;
        ensure(bell == bell_table(o), || format!("tunable(0) = {:?}", bell.values()))?;
        let product = pauli_block_eigs().tensor(&pauli_block_eigs());
        let top = tunable_block_eigs(LN_2)?;
        for p in 0..4 {
            ensure((top.get(p) - product.get(p)).abs() < 1e-15, || format!("tunable(ln 2) pattern {p}"))?;
        }
        Ok("tunable(0) = Bell, tunable(ln 2) = Pauli x Pauli".into())
    });
    ctx.run("eigenvalues-ghz3-oracle", |_| table_vs_oracle(&ghz_block_eigs(3)?, &ghz_basis(3)));
    ctx.run("feature-map-ghz-closed-form", |_| {
        for n in 2..=12 {
            let eigs = ef_to_eigs(&ghz_entanglement_feature(n)?);
            let got = eigs.get((1 << n) - 1);
            let want = ghz_full_pattern_closed_form(n);
            ensure((got - want).abs() <= 1e-12, || format!("n = {n}: {got} vs {want}"))?;
        }
        Ok("n = 2..12".into())
    });
    ctx.run("feature-map-three-site-uniform", |_| {
        for i in 0..=20 {
            let p = 0.5 + 0.5 * i as f64 / 20.0;
            let got = ef_to_eigs(&EntanglementFeature::uniform_three_site(p)?).get(0b111);
            let want = (7.0 - 6.0 * p) / 27.0;
            ensure((got - want).abs() <= 1e-12, || format!("purity {p}: {got} vs {want}"))?;
        }
        Ok("21-point purity grid".into())
    });
    ctx.run("feature-map-oracle-bases", |o| {
        let pairs = [
            (ef_to_eigs(&entanglement_feature_of(&bell_basis())?), bell_table(o)),
            (ef_to_eigs(&entanglement_feature_of(&ghz_basis(3))?), ghz_block_eigs(3)?),
        ];
        for (from_basis, table) in &pairs {
            for p in 0..1u32 << table.size() {
                ensure((from_basis.get(p) - table.get(p)).abs() <= 1e-12, || {
                    format!("size {} pattern {p:#b}", table.size())
                })?;
            }
        }
        Ok("Bell and GHZ-3 features reproduce their tables".into())
    });
    ctx.run("scaling-factors", |_| {
        ensure(scaling_factor(1) == 3.0, || "f_1".into())?;
        ensure((scaling_factor(2) - 3f64.sqrt()).abs() < 1e-12, || "f_2".into())?;
        ensure((scaling_factor(3) - 3.0 * 2f64.powf(-2.0 / 3.0)).abs() < 1e-12, || "f_3".into())?;
        for n in 4..=64 {
            let f = scaling_factor(n);
            ensure(f >= 1.5, || format!("f_{n} = {f} below 3/2"))?;
            if n >= 6 {
                ensure(f < scaling_factor(n - 2), || format!("f_{n} not below f_{}", n - 2))?;
            }
        }
        for n in 2..=10 {
            let lambda = ghz_block_eigs(n)?.get((1 << n) - 1);
            let f = scaling_factor(n);
            ensure((f.powi(n as i32) * lambda - 1.0).abs() < 1e-9, || format!("f_{n}^{n} λ ≠ 1"))?;
        }
        Ok(format!("f_64 = {:.6}", scaling_factor(64)))
    });
    ctx.run("tunable-norms", |_| {
        let delta = (11.0f64 / 8.0).ln();
        let spec = chain_spec(8, BasisFamily::tunable_from_delta(delta)?, ScrambleMode::AllQubits)?;
        for k in 1..=8 {
            let got = shadow_norm_sq(&z_string(8, k)?, &spec)?.finite().unwrap_or(f64::NAN);
            let want = 4f64.powi(k as i32 % 2) * 2f64.powi(k as i32);
            ensure((got - want).abs() <= 1e-9 * want, || format!("k = {k}: {got} vs {want}"))?;
        }
        Ok("k = 1..8".into())
    });
    ctx.run("cphase-calibration", |_| {
        ensure(delta_from_phi(PI)?.abs() < 1e-12, || "delta(pi) ≠ 0".into())?;
        ensure((delta_from_phi(0.0)? - LN_2).abs() < 1e-12, || "delta(0) ≠ ln 2".into())?;
        for i in 0..20 {
            let phi = PI * i as f64 / 19.0;
            let purity = cphase_single_site_purity(phi);
            let want = (3.0 + phi.cos()) / 4.0;
            ensure((purity - want).abs() < 1e-12, || format!("phi = {phi}: purity {purity}"))?;
            ensure(cphase_states(phi).len() == 4, || "basis size".into())?;
        }
        Ok("20-point phi grid".into())
    });
    ctx.run("preset-string-1d-budget", |_| {
        let rows = presets::string_budgets(12, &[2, 4, 6], 0.1)?;
        for r in &rows {
            let diff = r.split_budget as f64 - r.closed_form;
            ensure(r.unlearnable == 0 && (0.0..2.0).contains(&diff), || format!("{r:?}"))?;
        }
        Ok(format!("{} weights within ceiling rounding", rows.len()))
    });
    ctx.run("preset-honeycomb-prefactor", |o| {
        let a = presets::honeycomb_analysis()?;
        let fractions_ok = a.compatible_fraction.iter().all(|f| (f - 2.0 / 3.0).abs() < 1e-12);
        ensure(fractions_ok, || format!("fractions {:?}", a.compatible_fraction))?;
        // every assigned hexagon holds three full dimers
        let per_hex = bell_table(o).get(0b11).powi(-3);
        let prefactor = a.summary.prefactor.unwrap_or(f64::NAN);
        ensure((prefactor - 2.0 * per_hex).abs() < 1e-9 && (prefactor - 54.0).abs() < 1e-9, || {
            format!("prefactor {prefactor}")
        })?;
        let reference = a.summary.reference.and_then(|r| r.prefactor).unwrap_or(f64::NAN);
        ensure((reference - 729.0).abs() < 1e-9, || format!("Pauli prefactor {reference}"))?;
        Ok("54 vs 729".into())
    });
    ctx.run("preset-multipoint-ratio", |_| {
        let a = presets::multipoint_analysis(2)?;
        ensure((a.bell_prefactor - 9.0).abs() < 1e-9 && (a.pauli_prefactor - 81.0).abs() < 1e-9, || {
            format!("{a:?}")
        })?;
        Ok(format!("prefactor ratio {}", a.prefactor_ratio))
    });
    ctx.run("norm-sweep-consistency", |o| {
        let rows = cmd_sweep(&SweepOptions::new(SweepAxis::K))?;
        for r in &rows {
            let delta = r.delta.unwrap_or(0.0);
            let family = BasisFamily::tunable_from_delta(delta)?;
            let n = 2 * r.k.div_ceil(2);
            let spec = chain_spec(n, family, ScrambleMode::AllQubits)?;
            let mut eigs = spec.eigenvalues()?;
            if delta == 0.0 {
                for b in eigs.blocks_mut() {
                    *b = bell_table(o);
                }
            }
            let direct = norm_from_eigenvalues(&z_string(n, r.k)?, &spec, &eigs)?;
            let same = match (direct, r.norm_sq) {
                (NormValue::Finite(a), NormValue::Finite(b)) => (a - b).abs() <= 1e-12 * a,
                (a, b) => a == b,
            };
            ensure(same, || format!("delta {delta}, k {}: {direct} vs {}", r.k, r.norm_sq))?;
        }
        Ok(format!("{} rows", rows.len()))
    });
    ctx.run("determinism", |o| {
        let mut config: CampaignConfig = presets::config("string-1d")?;
        config.shots = 500;
        config.master_seed = o.seed;
        let campaign = config.resolve()?;
        let mut outputs = Vec::new();
        for workers in [1, 8] {
            let report = cmd_estimate(&campaign, EstimateOptions { workers })?;
            let mut csv = Vec::new();
            report.write(super::OutputFormat::Csv, &mut csv)?;
            let datasets: Vec<String> = report
                .datasets
                .iter()
                .map(|(_, d)| d.to_jsonl_string())
                .collect::<Result<_, _>>()?;
            outputs.push((csv, datasets));
        }
        ensure(outputs[0] == outputs[1], || "1 and 8 workers differ".into())?;
        let norm = cmd_norm(&campaign)?;
        ensure(norm == cmd_norm(&campaign)?, || "norm table differs between runs".into())?;
        Ok("1 vs 8 workers byte-identical".into())
    });
}

const MOMENT_SHOTS: u64 = 1_000_000;

struct MomentCase {
    name: &'static str,
    family: BasisFamily,
    k: usize,
    want: f64,
}

fn moment_cases() -> Result<Vec<MomentCase>, HarnessError> {
    let tunable = BasisFamily::tunable_from_delta((11.0f64 / 8.0).ln())?;
    let mut cases = Vec::new();
    for k in [2, 4, 6] {
        cases.push(MomentCase {
            name: "bell",
            family: BasisFamily::Bell,
            k,
            want: 3f64.powi(k as i32 / 2),
        });
    }
    for k in 1..=3 {
        cases.push(MomentCase {
            name: "pauli",
            family: BasisFamily::PauliLocal,
            k,
            want: 3f64.powi(k as i32),
        });
    }
    cases.push(MomentCase {
        name: "ghz3",
        family: BasisFamily::Ghz { n: 3 },
        k: 3,
        want: scaling_factor(3).powi(3),
    });
    cases.push(MomentCase {
        name: "tunable",
        family: tunable,
        k: 2,
        want: 4.0,
    });
    cases.push(MomentCase {
        name: "tunable",
        family: tunable,
        k: 3,
        want: 32.0,
    });
    Ok(cases)
}

fn mixed_dataset(
    spec: &ProtocolSpec,
    shots: u64,
    seed: u64,
    opts: &ValidateOptions,
) -> Result<crate::simulator::SnapshotDataset, HarnessError> {
    let state = prepare_preset(StatePreset::MaximallyMixed, spec.num_qubits(), 0)?;
    Ok(sample_dataset(&state, spec, shots, seed, opts.workers)?)
}

fn unbiasedness_operators(
    state: &QuantumState,
    spec: &ProtocolSpec,
    eigs: &ChannelEigenvalues,
) -> Result<Vec<(PauliString, f64)>, HarnessError> {
    let n = state.num_qubits();
    let mut candidates = Vec::new();
    for code in 1..4usize.pow(n as u32) {
        let text: String = (0..n).map(|q| ['I', 'X', 'Y', 'Z'][code >> (2 * q) & 3]).collect();
        let p: PauliString = text.parse()?;
        if let NormValue::Finite(norm) = norm_from_eigenvalues(&p, spec, eigs)? {
            let exact = state.expectation(&p)?;
            candidates.push((exact.abs() < 0.5, norm, text, p, exact));
        }
    }
    candidates.sort_by(|a, b| (a.0, a.1).partial_cmp(&(b.0, b.1)).unwrap().then_with(|| a.2.cmp(&b.2)));
    Ok(candidates.into_iter().take(5).map(|c| (c.3, c.4)).collect())
}

fn full_checks(ctx: &mut Ctx) {
    let cases = match moment_cases() {
        Ok(c) => c,
        Err(e) => return ctx.record("second-moments", Err(e.to_string())),
    };
    for (i, case) in cases.iter().enumerate() {
        let name = format!("second-moment-{}-k{}", case.name, case.k);
        ctx.run(&name, |o| {
            let n = case.family.block_size() * case.k.div_ceil(case.family.block_size());
            let spec = chain_spec(n, case.family, ScrambleMode::AllQubits)?;
            let eigs = eigs_for(&spec, o)?;
            let ds = mixed_dataset(&spec, MOMENT_SHOTS, o.seed.wrapping_add(i as u64), o)?;
            let m = second_moment(&z_string(n, case.k)?, &ds, &eigs)?;
            let rel = (m.mean - case.want).abs() / case.want;
            ensure(rel <= 0.03, || format!("{} vs {} ({:.2}% off)", m.mean, case.want, 100.0 * rel))?;
            Ok(format!("{:.4} vs {:.4} (se {:.1e})", m.mean, case.want, m.std_error))
        });
    }
    for (name, family, k) in [("hit-frequency-bell-k4", BasisFamily::Bell, 4), ("hit-frequency-pauli-k2", BasisFamily::PauliLocal, 2)] {
        ctx.run(name, |o| {
            let spec = chain_spec(k, family, ScrambleMode::AllQubits)?;
            let eigs = eigs_for(&spec, o)?;
            let ds = mixed_dataset(&spec, MOMENT_SHOTS, o.seed ^ 0x5eed, o)?;
            let h = hit_frequency(&z_string(k, k)?, &ds, &eigs)?;
            let rel = (h - 1.0 / 9.0).abs() * 9.0;
            ensure(rel <= 0.02, || format!("{h} vs 1/9"))?;
            Ok(format!("{h:.5} vs {:.5}", 1.0 / 9.0))
        });
    }
    ctx.run("teleportation-equivalence", |o| {
        let state = prepare_preset(StatePreset::RandomStabilizer, 4, 7)?;
        let mut detail = Vec::new();
        let specs = [ScrambleMode::AllQubits, ScrambleMode::OnePerBlock]
            .map(|mode| chain_spec(4, BasisFamily::Bell, mode));
        let [all, one] = specs;
        let (all, one) = (all?, one?);
        let eigs = eigs_for(&all, o)?;
        let ds_all = sample_dataset(&state, &all, MOMENT_SHOTS, o.seed.wrapping_add(101), o.workers)?;
        let ds_one = sample_dataset(&state, &one, MOMENT_SHOTS, o.seed.wrapping_add(102), o.workers)?;
        for text in ["XYII", "ZZXX", "YYZX"] {
            let p: PauliString = text.parse()?;
            let a = second_moment(&p, &ds_all, &eigs)?;
            let b = second_moment(&p, &ds_one, &eigs)?;
            let combined = (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
            ensure((a.mean - b.mean).abs() <= 3.0 * combined, || {
                format!("{text}: {} vs {} (combined se {combined})", a.mean, b.mean)
            })?;
            detail.push(format!("{text} {:.3}/{:.3}", a.mean, b.mean));
        }
        Ok(detail.join(", "))
    });
    ctx.run("estimator-unbiasedness", |o| {
        let tunable = BasisFamily::tunable_from_delta((11.0f64 / 8.0).ln())?;
        let families = [BasisFamily::Bell, BasisFamily::Ghz { n: 3 }, tunable];
        let mut count = 0;
        let mut worst: f64 = 0.0;
        for (s, preset) in [StatePreset::Ghz, StatePreset::Cluster1d].into_iter().enumerate() {
            let state = prepare_preset(preset, 6, 0)?;
            for (f, family) in families.iter().enumerate() {
                let spec = chain_spec(6, *family, ScrambleMode::AllQubits)?;
                let eigs = eigs_for(&spec, o)?;
                let seed = o.seed.wrapping_add(1000 + 10 * s as u64 + f as u64);
                let ds = sample_dataset(&state, &spec, 200_000, seed, o.workers)?;
                for (p, exact) in unbiasedness_operators(&state, &spec, &eigs)? {
                    let e = estimate(&p, &ds, &eigs, 1)?;
                    let z = (e.mean - exact).abs() / e.std_error.max(1e-300);
                    worst = worst.max(if e.std_error == 0.0 && e.mean == exact { 0.0 } else { z });
                    ensure((e.mean - exact).abs() <= 5.0 * e.std_error, || {
                        format!("{} on {} with {}: {} vs {exact}", p, preset.name(), family.name(), e.mean)
                    })?;
                    count += 1;
                }
            }
        }
        Ok(format!("{count} estimates, worst deviation {worst:.2} se"))
    });
}

pub fn cmd_validate(opts: ValidateOptions) -> ValidationReport {
    let mut ctx = Ctx {
        opts,
        checks: Vec::new(),
    };
    fast_checks(&mut ctx);
    if opts.level == Level::Full {
        full_checks(&mut ctx);
    }
    ValidationReport { checks: ctx.checks }
}
