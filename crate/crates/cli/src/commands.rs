use std::collections::hash_map::RandomState;
use std::fs;
use std::hash::BuildHasher;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use scc_core::de::{bp_thresholds, iterations_to_target};
use scc_core::table::{rate_rows, reference_row, REFERENCE_ROWS};
use scc_core::termbench::bench_termination as run_bench;
use scc_core::{
    alist, bitio, design_rate, run_monte_carlo, trajectory as de_trajectory, verify_codeword, BaseMatrix, BitVector,
    CodeParams, Codeword, DeOptions, Encoder, LiftedCode, PatchKind,
};

use crate::{Format, GlobalArgs};

/// Default budget of permutation redraws before entry toggles are used.
const DEFAULT_REPAIR_ATTEMPTS: u32 = 10;

#[derive(Debug)]
pub struct VerificationFailed(pub String);

impl std::fmt::Display for VerificationFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "verification failed: {}", self.0)
    }
}

impl std::error::Error for VerificationFailed {}

pub fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<VerificationFailed>().is_some() {
        return 3;
    }
    match e.downcast_ref::<scc_core::Error>() {
        Some(scc_core::Error::Parameter(_)) => 2,
        _ => 1,
    }
}

fn is_false(b: &bool) -> bool {
    !*b
}

fn req<T: Copy>(v: Option<T>, name: &str) -> Result<T> {
    v.ok_or_else(|| anyhow!("missing required option --{name}"))
}

fn params(dl: Option<usize>, dr: Option<usize>, l: Option<usize>, modified: bool) -> Result<CodeParams> {
    Ok(CodeParams::new(req(dl, "dl")?, req(dr, "dr")?, req(l, "L")?, modified)?)
}

fn resolve_seed(g: &GlobalArgs) -> u64 {
    g.seed.unwrap_or_else(|| {
        let seed = RandomState::new().hash_one(std::time::SystemTime::now());
        if !g.quiet {
            eprintln!("no --seed given, using {seed}");
        }
        seed
    })
}

fn note(g: &GlobalArgs, msg: impl AsRef<str>) {
    if !g.quiet {
        eprintln!("{}", msg.as_ref());
    }
}

fn write_out(g: &GlobalArgs, bytes: &[u8]) -> Result<()> {
    match &g.out {
        Some(path) => fs::write(path, bytes).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
            Ok(())
        }
    }
}

fn emit_json(g: &GlobalArgs, config: Value, body: Value) -> Result<()> {
    let mut obj = serde_json::Map::new();
    obj.insert("config".into(), config);
    match body {
        Value::Object(m) => obj.extend(m),
        other => {
            obj.insert("result".into(), other);
        }
    }
    let mut text = serde_json::to_string_pretty(&Value::Object(obj))?;
    text.push('\n');
    write_out(g, text.as_bytes())
}

/// CSV goes out bare; the resolved config lands next to it as
/// `<out>.config.json`, or on stderr when writing to stdout.
fn emit_csv(g: &GlobalArgs, config: Value, csv: String) -> Result<()> {
    write_out(g, csv.as_bytes())?;
    let text = serde_json::to_string_pretty(&config)?;
    match &g.out {
        Some(path) => {
            let mut side = path.clone().into_os_string();
            side.push(".config.json");
            fs::write(PathBuf::from(side), text + "\n")?;
        }
        None => note(g, format!("config: {}", serde_json::to_string(&config)?)),
    }
    Ok(())
}

fn config_value<T: Serialize>(opts: &T, g: &GlobalArgs, seed: Option<u64>) -> Result<Value> {
    let mut v = serde_json::to_value(opts)?;
    if let Value::Object(m) = &mut v {
        m.retain(|_, v| !v.is_null());
        if let Some(s) = seed {
            m.insert("seed".into(), json!(s));
        }
        if let Some(f) = g.format {
            m.insert("format".into(), serde_json::to_value(f)?);
        }
    }
    Ok(v)
}

fn load_code(path: &Path) -> Result<LiftedCode> {
    LiftedCode::import(path).with_context(|| format!("loading code {}", path.display()))
}

/// Applies the termination fix-up that matches the variant.
fn finish_code(code: LiftedCode, repair_attempts: u32) -> Result<LiftedCode> {
    Ok(if code.params().modified {
        code.apply_accumulator_patch()?
    } else {
        code.repair_term_rank_or_flip(repair_attempts)?
    })
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BitFormat {
    /// One section per line, `M` characters of `0`/`1`.
    #[default]
    Ascii,
    /// Bits packed eight per byte, most significant bit first.
    Packed,
}

fn read_bits(path: &Path, format: BitFormat, n_sections: usize, m: usize) -> Result<Vec<BitVector>> {
    let sections = match format {
        BitFormat::Ascii => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            bitio::read_ascii(&text, m).with_context(|| format!("parsing {}", path.display()))?
        }
        BitFormat::Packed => {
            let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
            bitio::from_packed(&bytes, n_sections * m)?.split(m)?
        }
    };
    if sections.len() != n_sections {
        bail!(
            "{}: expected {n_sections} sections, found {}",
            path.display(),
            sections.len()
        );
    }
    Ok(sections)
}

// ---------------------------------------------------------------- construct

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructOpts {
    #[arg(long)]
    pub dl: Option<usize>,
    #[arg(long)]
    pub dr: Option<usize>,
    /// Coupling number.
    #[arg(short = 'L', long = "coupling")]
    #[serde(rename = "L")]
    pub l: Option<usize>,
    /// Lifting number.
    #[arg(short = 'M', long = "lifting")]
    #[serde(rename = "M")]
    pub m: Option<usize>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub modified: bool,
    /// Also write the expanded parity-check matrix in alist format.
    #[arg(long)]
    pub alist: Option<PathBuf>,
    /// Permutation redraws tried before toggling entries of `H_term`.
    #[arg(long)]
    pub repair_attempts: Option<u32>,
}

pub fn construct(o: ConstructOpts, g: &GlobalArgs) -> Result<()> {
    let p = params(o.dl, o.dr, o.l, o.modified)?;
    let m = req(o.m, "M")?;
    let seed = resolve_seed(g);
    let base = BaseMatrix::build(p)?;
    let code = finish_code(
        LiftedCode::lift(&base, m, seed)?,
        o.repair_attempts.unwrap_or(DEFAULT_REPAIR_ATTEMPTS),
    )?;
    let patch = code.patch();
    let detail = match patch.kind {
        PatchKind::RankRepaired => format!(
            " ({} redraws, {} toggled entries)",
            patch.repair_attempts,
            patch.flips.len()
        ),
        _ => String::new(),
    };
    note(
        g,
        format!(
            "{} ({},{},{}) M={m} seed={seed}: {} bits, rate {}, patch {}{detail}",
            p.variant_name(),
            p.dl,
            p.dr,
            p.l,
            code.n_bits(),
            design_rate(&p)?.to_decimal(5),
            patch.kind.as_str(),
        ),
    );
    let mut text = code.to_json()?;
    text.push('\n');
    write_out(g, text.as_bytes())?;
    if let Some(path) = &o.alist {
        fs::write(path, alist::to_alist(&code.parity_check()))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

// ---------------------------------------------------------------- encode

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EncodeOpts {
    /// Code file written by `construct`.
    #[arg(long)]
    pub code: Option<PathBuf>,
    /// Information bits; random (from --seed) when absent.
    #[arg(long)]
    pub info: Option<PathBuf>,
    /// Layout of the information and codeword files.
    #[arg(long, value_enum)]
    pub bits: Option<BitFormat>,
}

pub fn encode(o: EncodeOpts, g: &GlobalArgs) -> Result<()> {
    let code_path = o
        .code
        .clone()
        .ok_or_else(|| anyhow!("missing required option --code"))?;
    let code = load_code(&code_path)?;
    let format = o.bits.unwrap_or_default();
    let m = code.m();
    let enc = Encoder::new(&code)?;
    let n_info_sections = code.accounting().n_info;
    let (info, seed) = match &o.info {
        Some(path) => (BitVector::concat(&read_bits(path, format, n_info_sections, m)?), None),
        None => {
            let seed = resolve_seed(g);
            (BitVector::random_seeded(enc.info_len(), seed), Some(seed))
        }
    };
    let cw = enc.encode(&info)?;
    if !verify_codeword(&code, &cw) {
        return Err(VerificationFailed("encoded word violates a parity check".into()).into());
    }
    let bytes = match format {
        BitFormat::Ascii => {
            let config = config_value(&o, g, seed)?;
            let mut text = format!("# {}\n", serde_json::to_string(&config)?);
            text.push_str(&bitio::write_ascii(cw.sections()));
            text.into_bytes()
        }
        BitFormat::Packed => bitio::to_packed(&cw.to_flat()),
    };
    write_out(g, &bytes)?;
    note(
        g,
        format!(
            "encoded {} information bits into {} code bits",
            enc.info_len(),
            code.n_bits()
        ),
    );
    Ok(())
}

// ---------------------------------------------------------------- decode-sim

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecodeSimOpts {
    /// Code file; otherwise the code is built from the parameters and --seed.
    #[arg(long)]
    pub code: Option<PathBuf>,
    #[arg(long)]
    pub dl: Option<usize>,
    #[arg(long)]
    pub dr: Option<usize>,
    #[arg(short = 'L', long = "coupling")]
    #[serde(rename = "L")]
    pub l: Option<usize>,
    #[arg(short = 'M', long = "lifting")]
    #[serde(rename = "M")]
    pub m: Option<usize>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub modified: bool,
    /// Channel erasure probability.
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
}

pub fn decode_sim(mut o: DecodeSimOpts, g: &GlobalArgs) -> Result<()> {
    let seed = resolve_seed(g);
    let code = match &o.code {
        Some(path) => load_code(path)?,
        None => {
            let base = BaseMatrix::build(params(o.dl, o.dr, o.l, o.modified)?)?;
            finish_code(LiftedCode::lift(&base, req(o.m, "M")?, seed)?, DEFAULT_REPAIR_ATTEMPTS)?
        }
    };
    let eps = req(o.eps, "eps")?;
    let trials = o.trials.unwrap_or(100);
    o.trials = Some(trials);
    let report = run_monte_carlo(&code, eps, trials, seed)?;
    note(
        g,
        format!(
            "eps={eps}: FER {:.4e} [{:.3e}, {:.3e}], BER {:.4e} over {trials} frames",
            report.fer, report.ci.fer.0, report.ci.fer.1, report.ber
        ),
    );
    let config = config_value(&o, g, Some(seed))?;
    match g.format.unwrap_or(Format::Json) {
        Format::Json => emit_json(g, config, json!({ "report": report })),
        Format::Csv => {
            let mut csv = String::from("section,ber\n");
            for (i, b) in report.per_section_ber.iter().enumerate() {
                csv.push_str(&format!("{},{}\n", i + 1, b));
            }
            emit_csv(g, config, csv)
        }
    }
}

// ---------------------------------------------------------------- threshold

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Original,
    Modified,
    Both,
}

impl Variant {
    fn flags(self) -> &'static [bool] {
        match self {
            Variant::Original => &[false],
            Variant::Modified => &[true],
            Variant::Both => &[false, true],
        }
    }
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdOpts {
    #[arg(long)]
    pub dl: Option<usize>,
    #[arg(long)]
    pub dr: Option<usize>,
    /// One or more coupling numbers, comma separated.
    #[arg(short = 'L', long = "coupling", value_delimiter = ',')]
    #[serde(rename = "L")]
    pub l: Option<Vec<usize>>,
    /// Shorthand for `--variant modified`.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub modified: bool,
    #[arg(long, value_enum)]
    pub variant: Option<Variant>,
    /// Every cell of the built-in reference table.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub table: bool,
    /// DE success when every erasure probability is below this.
    #[arg(long)]
    pub target: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Bisection bracket width.
    #[arg(long)]
    pub tol: Option<f64>,
}

fn variant_of(modified: bool, variant: Option<Variant>) -> Variant {
    variant.unwrap_or(if modified { Variant::Modified } else { Variant::Both })
}

pub fn threshold(o: ThresholdOpts, g: &GlobalArgs) -> Result<()> {
    let defaults = DeOptions::default();
    let opts = DeOptions {
        target: o.target.unwrap_or(defaults.target),
        max_iter: o.max_iter.unwrap_or(defaults.max_iter),
        bisection_tol: o.tol.unwrap_or(defaults.bisection_tol),
    };
    if !(opts.target > 0.0 && opts.bisection_tol > 0.0) {
        return Err(scc_core::Error::Parameter("--target and --tol must be positive".into()).into());
    }
    let variant = variant_of(o.modified, o.variant);
    let triples: Vec<(usize, usize, usize)> = if o.table {
        REFERENCE_ROWS.iter().map(|r| (r.dl, r.dr, r.l)).collect()
    } else {
        let (dl, dr) = (req(o.dl, "dl")?, req(o.dr, "dr")?);
        let ls = o.l.clone().ok_or_else(|| anyhow!("missing required option -L"))?;
        ls.into_iter().map(|l| (dl, dr, l)).collect()
    };
    let mut cells = Vec::new();
    for &(dl, dr, l) in &triples {
        for &modified in variant.flags() {
            cells.push(CodeParams::new(dl, dr, l, modified)?);
        }
    }
    let bases = cells
        .iter()
        .map(|p| BaseMatrix::build(*p))
        .collect::<scc_core::Result<Vec<_>>>()?;
    let results = bp_thresholds(&bases, opts);
    let mut rows = Vec::new();
    let mut csv = String::from("dl,dr,L,variant,threshold,rate\n");
    for (p, r) in cells.iter().zip(&results) {
        let rate = design_rate(p)?.to_decimal(5);
        let reference = reference_row(p.dl, p.dr, p.l).map(|row| row.threshold(p.modified));
        csv.push_str(&format!(
            "{},{},{},{},{:.5},{}\n",
            p.dl,
            p.dr,
            p.l,
            p.variant_name(),
            r.epsilon_star,
            rate
        ));
        rows.push(json!({
            "dl": p.dl, "dr": p.dr, "L": p.l, "variant": p.variant_name(),
            "threshold": r.epsilon_star, "bracket": r.bracket, "rate": rate,
            "reference": reference,
        }));
    }
    let mut config = config_value(&o, g, None)?;
    config["de"] = serde_json::to_value(opts)?;
    match g.format.unwrap_or(Format::Csv) {
        Format::Json => emit_json(g, config, json!({ "thresholds": rows })),
        Format::Csv => emit_csv(g, config, csv),
    }
}

// ---------------------------------------------------------------- trajectory

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryOpts {
    #[arg(long)]
    pub dl: Option<usize>,
    #[arg(long)]
    pub dr: Option<usize>,
    #[arg(short = 'L', long = "coupling")]
    #[serde(rename = "L")]
    pub l: Option<usize>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub modified: bool,
    #[arg(long)]
    pub eps: Option<f64>,
    /// Number of DE iterations to record.
    #[arg(long)]
    pub iters: Option<usize>,
}

pub fn trajectory(mut o: TrajectoryOpts, g: &GlobalArgs) -> Result<()> {
    let p = params(o.dl, o.dr, o.l, o.modified)?;
    let eps = req(o.eps, "eps")?;
    if !(0.0..=1.0).contains(&eps) {
        return Err(scc_core::Error::Parameter(format!("erasure probability {eps} outside [0, 1]")).into());
    }
    let iters = o.iters.unwrap_or(300);
    o.iters = Some(iters);
    let base = BaseMatrix::build(p)?;
    let traj = de_trajectory(&base, eps, iters);
    let final_max = traj.last().map_or(0.0, |row| row.iter().cloned().fold(0.0, f64::max));
    note(g, format!("after {iters} iterations max p = {final_max:e}"));
    let config = config_value(&o, g, None)?;
    match g.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut csv = String::from("section,iter,p\n");
            for (it, row) in traj.iter().enumerate() {
                for (i, pv) in row.iter().enumerate() {
                    csv.push_str(&format!("{},{},{}\n", i + 1, it, pv));
                }
            }
            emit_csv(g, config, csv)
        }
        Format::Json => emit_json(
            g,
            config,
            json!({
                "final_max": final_max,
                "iterations_to_1e-6": iterations_to_target(&base, eps, 1e-6, iters),
                "p": traj,
            }),
        ),
    }
}

// ---------------------------------------------------------------- rate-table

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateTableOpts {
    #[arg(long)]
    pub dl: Option<usize>,
    #[arg(long)]
    pub dr: Option<usize>,
    #[arg(short = 'L', long = "coupling", value_delimiter = ',')]
    #[serde(rename = "L")]
    pub l: Option<Vec<usize>>,
    /// Every row of the built-in reference table.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub table: bool,
}

pub fn rate_table(o: RateTableOpts, g: &GlobalArgs) -> Result<()> {
    let rows = if o.table {
        let mut rows = Vec::new();
        for r in &REFERENCE_ROWS {
            rows.extend(rate_rows(r.dl, r.dr, &[r.l])?);
        }
        rows
    } else {
        let ls = o.l.clone().ok_or_else(|| anyhow!("missing required option -L"))?;
        rate_rows(req(o.dl, "dl")?, req(o.dr, "dr")?, &ls)?
    };
    let config = config_value(&o, g, None)?;
    match g.format.unwrap_or(Format::Csv) {
        Format::Json => emit_json(g, config, json!({ "rates": rows })),
        Format::Csv => {
            let mut csv = String::from("dl,dr,L,variant,rate,exact\n");
            for r in &rows {
                csv.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    r.dl, r.dr, r.l, r.variant, r.rate, r.exact
                ));
            }
            emit_csv(g, config, csv)
        }
    }
}

// ---------------------------------------------------------------- bench-termination

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchOpts {
    #[arg(long)]
    pub dl: Option<usize>,
    #[arg(long)]
    pub dr: Option<usize>,
    #[arg(short = 'L', long = "coupling")]
    #[serde(rename = "L")]
    pub l: Option<usize>,
    /// Lifting numbers, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub ms: Option<Vec<usize>>,
    /// Largest M for the generic solve (its factorization is cubic).
    #[arg(long)]
    pub generic_max_m: Option<usize>,
    #[arg(long)]
    pub reps: Option<usize>,
}

pub fn bench_termination(mut o: BenchOpts, g: &GlobalArgs) -> Result<()> {
    let dl = *o.dl.get_or_insert(3);
    let dr = *o.dr.get_or_insert(6);
    let l = *o.l.get_or_insert(9);
    let ms =
        o.ms.get_or_insert_with(|| (6..=14).map(|e| 1usize << e).collect())
            .clone();
    let generic_max_m = *o.generic_max_m.get_or_insert(1024);
    let reps = *o.reps.get_or_insert(10);
    let seed = resolve_seed(g);
    let report = run_bench(dl, dr, l, &ms, seed, reps, generic_max_m)?;
    for s in &report.samples {
        let generic = s
            .generic
            .as_ref()
            .map_or("-".to_string(), |x| format!("{} ops {:.3e}s", x.bit_ops, x.solve_secs));
        note(
            g,
            format!(
                "M={:>6}: generic {generic}; accumulator {} ops {:.3e}s",
                s.m, s.accumulator_bit_ops, s.accumulator_secs
            ),
        );
    }
    let config = config_value(&o, g, Some(seed))?;
    emit_json(g, config, serde_json::to_value(&report)?)
}

// ---------------------------------------------------------------- verify

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyOpts {
    #[arg(long)]
    pub code: Option<PathBuf>,
    /// Codeword to check against the code.
    #[arg(long)]
    pub codeword: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub bits: Option<BitFormat>,
}

pub fn verify(o: VerifyOpts, g: &GlobalArgs) -> Result<()> {
    let code_path = o
        .code
        .clone()
        .ok_or_else(|| anyhow!("missing required option --code"))?;
    let code = load_code(&code_path)?;
    let term = code.term_block();
    let term_rank = term.rank();
    let term_ok = code.params().modified || term_rank == term.rows();
    let patch_ok = !code.params().modified || code.patch().kind == PatchKind::Accumulator;
    let mut failures = Vec::new();
    if !term_ok {
        failures.push(format!("H_term has rank {term_rank} of {}", term.rows()));
    }
    if !patch_ok {
        failures.push("modified code lacks the accumulator patch".to_string());
    }
    let codeword_valid = match &o.codeword {
        Some(path) => {
            let sections = read_bits(path, o.bits.unwrap_or_default(), code.params().n_sections(), code.m())?;
            let ok = verify_codeword(&code, &Codeword::new(sections));
            if !ok {
                failures.push(format!("{} is not a codeword", path.display()));
            }
            Some(ok)
        }
        None => None,
    };
    let config = config_value(&o, g, None)?;
    emit_json(
        g,
        config,
        json!({
            "params": code.params(),
            "M": code.m(),
            "patch_kind": code.patch().kind,
            "term_rank": term_rank,
            "term_size": term.rows(),
            "rank_status": code.full_rank_status(),
            "codeword_valid": codeword_valid,
            "ok": failures.is_empty(),
        }),
    )?;
    if failures.is_empty() {
        note(g, "ok");
        Ok(())
    } else {
        Err(VerificationFailed(failures.join("; ")).into())
    }
}
