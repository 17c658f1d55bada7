//! Exhaustive campaigns over every linear endomorphism of `M_n(F_p)`.
//!
//! A map is identified by its column codes: `cₖ` is the code of `f(Eₖ)`
//! (see [`crate::packed`]) and the map id is `Σ cₖ Nᵏ` with `N = p^{n²}`.
//! Matrix addition, scaling and invertibility are table lookups on codes.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::PathBuf;
use std::sync::Mutex;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::lattice::{self, DieudonneReport};
use crate::matrix::Matrix;
use crate::packed::{self, Odometer};
use crate::preserver::{span_gl_audit, MatEndo, PreservationVerdict, PreserverClassification};

/// Default cap on the number of maps a campaign may scan without override.
pub const DEFAULT_MAP_CAP: u64 = 1 << 24;
/// Absolute cap, override or not.
pub const MAX_MAPS: u64 = 1 << 32;
/// Largest code space handled by lookup tables.
pub const MAX_CODES: usize = 1024;
/// Format version of the JSON reports.
pub const REPORT_VERSION: u32 = 1;

#[derive(Clone, Debug)]
pub struct CampaignConfig {
    pub field: FieldSpec,
    pub n: usize,
    pub budget: Budget,
    /// Worker threads; 0 picks the default.
    pub jobs: usize,
    pub map_cap: u64,
    /// Permits scans above `map_cap`.
    pub allow_large: bool,
    /// Append-only log of finished partitions, reread on restart.
    pub checkpoint: Option<PathBuf>,
}

impl CampaignConfig {
    pub fn new(field: FieldSpec, n: usize) -> Self {
        CampaignConfig {
            field,
            n,
            budget: Budget::default(),
            jobs: 0,
            map_cap: DEFAULT_MAP_CAP,
            allow_large: false,
            checkpoint: None,
        }
    }

    fn run<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        if self.jobs == 0 {
            return Ok(f());
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.jobs)
            .build()
            .map_err(|e| Error::Precondition(e.to_string()))?;
        Ok(pool.install(f))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnumerationReport {
    pub version: u32,
    pub field: FieldSpec,
    pub n: usize,
    pub seed: u64,
    pub total_maps: u64,
    pub preserver_count: u64,
    pub bijective_count: u64,
    pub singular_count: u64,
    pub class_histogram: BTreeMap<String, u64>,
    pub frobenius_expected: u64,
    pub pinch_expected: u64,
    pub full_nonsingular_subspaces: u64,
    pub partitions: u64,
    pub anomalies: Vec<String>,
    pub wall_time_secs: f64,
}

impl EnumerationReport {
    /// The report with the timing field zeroed, for comparisons.
    pub fn without_timing(&self) -> EnumerationReport {
        EnumerationReport { wall_time_secs: 0.0, ..self.clone() }
    }
}

/// A finished scan: the report plus the sorted ids of all preservers.
#[derive(Clone, Debug)]
pub struct Enumeration {
    pub report: EnumerationReport,
    pub preservers: Vec<u64>,
    pub tables: Tables,
}

/// Lookup tables on matrix codes.
#[derive(Clone, Debug)]
pub struct Tables {
    pub field: FieldSpec,
    pub p: u32,
    pub n: usize,
    /// `p^{n²}`.
    pub codes: usize,
    add: Vec<u16>,
    smul: Vec<u16>,
    invertible: Vec<bool>,
    /// `GL_n` as sparse digit lists `(k, digit)`, identity first.
    gl: Vec<Vec<(usize, u16)>>,
}

impl Tables {
    pub fn new(field: FieldSpec, n: usize, seed: u64) -> Result<Self> {
        let p = field
            .modulus()
            .ok_or_else(|| Error::UnsupportedField("enumeration needs a finite field".into()))?;
        let nn = n * n;
        let codes = packed::pow_sat(p as u64, nn);
        if codes > MAX_CODES as u128 {
            return Err(Error::BudgetExceeded { needed: codes, budget: MAX_CODES as u64 });
        }
        let codes = codes as usize;
        let digits: Vec<Vec<u32>> = (0..codes).map(|c| packed::decode(c as u64, p, nn)).collect();
        let mut add = vec![0u16; codes * codes];
        for a in 0..codes {
            for b in 0..codes {
                let s: Vec<u32> = digits[a].iter().zip(&digits[b]).map(|(x, y)| (x + y) % p).collect();
                add[a * codes + b] = packed::encode(&s, p) as u16;
            }
        }
        let mut smul = vec![0u16; p as usize * codes];
        for s in 0..p {
            for a in 0..codes {
                let v: Vec<u32> = digits[a].iter().map(|x| (x * s) % p).collect();
                smul[s as usize * codes + a] = packed::encode(&v, p) as u16;
            }
        }
        let mut scratch = Vec::new();
        let invertible: Vec<bool> = digits.iter().map(|d| packed::is_invertible_vec(d, n, p, &mut scratch)).collect();
        let id = packed::identity_vec(n);
        let mut rest: Vec<Vec<u32>> = packed::gl_vecs(p, n).into_iter().filter(|g| *g != id).collect();
        rest.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let sparse = |g: &[u32]| g.iter().enumerate().filter(|(_, &d)| d != 0).map(|(k, &d)| (k, d as u16)).collect();
        let gl = std::iter::once(sparse(&id)).chain(rest.iter().map(|g| sparse(g))).collect();
        Ok(Tables { field, p, n, codes, add, smul, invertible, gl })
    }

    pub fn gl_order(&self) -> usize {
        self.gl.len()
    }

    pub fn total_maps(&self) -> u128 {
        packed::pow_sat(self.codes as u64, self.n * self.n)
    }

    pub fn is_invertible(&self, code: u16) -> bool {
        self.invertible[code as usize]
    }

    /// Code of `f(M)` for `M` given by its `vec` digits.
    pub fn image(&self, cols: &[u16], digits: &[u32]) -> u16 {
        let mut acc = 0u16;
        for (k, &d) in digits.iter().enumerate() {
            if d != 0 {
                acc = self.add[acc as usize * self.codes + self.smul[d as usize * self.codes + cols[k] as usize] as usize];
            }
        }
        acc
    }

    /// Early-exit test of `f(GL) ⊆ GL`.
    pub fn preserves(&self, cols: &[u16]) -> bool {
        let c = self.codes;
        self.gl.iter().all(|g| {
            let mut acc = 0u16;
            for &(k, d) in g {
                acc = self.add[acc as usize * c + self.smul[d as usize * c + cols[k] as usize] as usize];
            }
            self.invertible[acc as usize]
        })
    }

    /// Same verdict as [`Tables::preserves`], without early exit.
    pub fn preserves_full_scan(&self, cols: &[u16]) -> bool {
        let mut ok = true;
        for g in &self.gl {
            let digits = sparse_to_digits(g, self.n * self.n);
            ok &= self.invertible[self.image(cols, &digits) as usize];
        }
        ok
    }

    pub fn columns(&self, id: u64) -> Vec<u16> {
        packed::decode(id, self.codes as u32, self.n * self.n).into_iter().map(|c| c as u16).collect()
    }

    pub fn id_of(&self, cols: &[u16]) -> u64 {
        cols.iter().rev().fold(0u64, |acc, &c| acc * self.codes as u64 + c as u64)
    }

    pub fn code_of(&self, vec_digits: &[u32]) -> u16 {
        packed::encode(vec_digits, self.p) as u16
    }

    pub fn endo(&self, id: u64) -> MatEndo {
        let nn = self.n * self.n;
        let cols = self.columns(id);
        let mut op = vec![0u32; nn * nn];
        for (k, &c) in cols.iter().enumerate() {
            for (i, d) in packed::decode(c as u64, self.p, nn).into_iter().enumerate() {
                op[i * nn + k] = d;
            }
        }
        MatEndo::new(self.field, self.n, Matrix::from_residues(self.field, nn, nn, &op)).unwrap()
    }

    pub fn id_of_endo(&self, f: &MatEndo) -> u64 {
        let nn = self.n * self.n;
        let cols: Vec<u16> = (0..nn).map(|k| self.code_of(&f.op().col(k).residues())).collect();
        self.id_of(&cols)
    }

    fn rank(&self, cols: &[u16]) -> usize {
        let nn = self.n * self.n;
        let mut op = vec![0u32; nn * nn];
        for (k, &c) in cols.iter().enumerate() {
            for (i, d) in packed::decode(c as u64, self.p, nn).into_iter().enumerate() {
                op[k * nn + i] = d;
            }
        }
        lattice::rank_mod_p(&op, nn, nn, self.p)
    }

    fn gl_digits(&self) -> Vec<Vec<u32>> {
        self.gl.iter().map(|g| sparse_to_digits(g, self.n * self.n)).collect()
    }
}

fn sparse_to_digits(g: &[(usize, u16)], len: usize) -> Vec<u32> {
    let mut v = vec![0u32; len];
    for &(k, d) in g {
        v[k] = d as u32;
    }
    v
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
struct PartitionResult {
    partition: u64,
    maps: u64,
    preservers: Vec<u64>,
}

fn scan_partition(t: &Tables, top: u16) -> PartitionResult {
    let nn = t.n * t.n;
    let mut cols = vec![0u16; nn];
    cols[nn - 1] = top;
    let mut odo = Odometer::new(nn - 1, t.codes as u32);
    let mut result = PartitionResult { partition: top as u64, ..Default::default() };
    while odo.advance().is_some() {
        for (c, &d) in cols.iter_mut().zip(odo.digits()) {
            *c = d as u16;
        }
        result.maps += 1;
        if t.preserves(&cols) {
            result.preservers.push(t.id_of(&cols));
        }
    }
    result
}

fn check_cap(cfg: &CampaignConfig, total: u128) -> Result<()> {
    let cap = if cfg.allow_large { MAX_MAPS } else { cfg.map_cap };
    if total > cap as u128 {
        return Err(Error::BudgetExceeded { needed: total, budget: cap });
    }
    Ok(())
}

fn load_checkpoint(path: &PathBuf) -> Result<BTreeMap<u64, PartitionResult>> {
    let mut done = BTreeMap::new();
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(done),
        Err(e) => return Err(Error::Io(e.to_string())),
    };
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| Error::Io(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        // a torn final line from an interrupted run is ignored
        if let Ok(r) = serde_json::from_str::<PartitionResult>(&line) {
            done.insert(r.partition, r);
        }
    }
    Ok(done)
}

/// Scans every map, classifies every preserver and compares the preserver
/// set with the constructively generated one.
pub fn enumerate_preservers(cfg: &CampaignConfig) -> Result<Enumeration> {
    let start = Instant::now();
    let t = Tables::new(cfg.field, cfg.n, cfg.budget.seed)?;
    if cfg.n < 2 {
        return Err(Error::Precondition("enumeration needs n >= 2".into()));
    }
    let total = t.total_maps();
    check_cap(cfg, total)?;
    let mut done = match &cfg.checkpoint {
        Some(path) => load_checkpoint(path)?,
        None => BTreeMap::new(),
    };
    let todo: Vec<u16> = (0..t.codes as u16).filter(|c| !done.contains_key(&(*c as u64))).collect();
    let log = match &cfg.checkpoint {
        Some(path) => Some(Mutex::new(
            OpenOptions::new().create(true).append(true).open(path).map_err(|e| Error::Io(e.to_string()))?,
        )),
        None => None,
    };
    let fresh: Vec<Result<PartitionResult>> = cfg.run(|| {
        todo.par_iter()
            .map(|&top| {
                let r = scan_partition(&t, top);
                if let Some(log) = &log {
                    let line = serde_json::to_string(&r).map_err(|e| Error::Io(e.to_string()))?;
                    let mut f = log.lock().unwrap();
                    writeln!(f, "{line}").map_err(|e| Error::Io(e.to_string()))?;
                }
                Ok(r)
            })
            .collect()
    })?;
    for r in fresh {
        let r = r?;
        done.insert(r.partition, r);
    }
    let scanned: u64 = done.values().map(|r| r.maps).sum();
    let mut preservers: Vec<u64> = done.values().flat_map(|r| r.preservers.iter().copied()).collect();
    preservers.sort_unstable();

    let mut anomalies = Vec::new();
    if scanned as u128 != total {
        anomalies.push(format!("scanned {scanned} maps out of {total}"));
    }
    let expected = cfg.run(|| expected_preservers(&t))?;
    let found: BTreeSet<u64> = preservers.iter().copied().collect();
    let all_expected: BTreeSet<u64> = expected.frobenius.union(&expected.pinch).copied().collect();
    report_difference(&mut anomalies, "preserver not generated constructively", found.difference(&all_expected));
    report_difference(&mut anomalies, "constructive preserver not found by the scan", all_expected.difference(&found));
    let overlap = expected.frobenius.intersection(&expected.pinch).count();
    if overlap > 0 {
        anomalies.push(format!("{overlap} maps are both Frobenius and pinch maps"));
    }

    let gl_count = t.gl_order() as u64;
    let budget = cfg.budget;
    let outcomes: Vec<(u64, std::result::Result<(&'static str, bool), String>)> = cfg.run(|| {
        preservers
            .par_iter()
            .map(|&id| (id, classify_preserver(&t, id, gl_count, &budget)))
            .collect()
    })?;
    let mut histogram = BTreeMap::new();
    let (mut bijective, mut singular) = (0u64, 0u64);
    for (id, outcome) in outcomes {
        match outcome {
            Ok((tag, is_bijective)) => {
                *histogram.entry(tag.to_string()).or_insert(0) += 1;
                if is_bijective {
                    bijective += 1;
                } else {
                    singular += 1;
                }
                if is_bijective != expected.frobenius.contains(&id) {
                    anomalies.push(format!("map {id}: classified {tag} against its constructive origin"));
                }
            }
            Err(e) => anomalies.push(format!("map {id}: {e}")),
        }
    }
    let report = EnumerationReport {
        version: REPORT_VERSION,
        field: cfg.field,
        n: cfg.n,
        seed: cfg.budget.seed,
        total_maps: total as u64,
        preserver_count: preservers.len() as u64,
        bijective_count: bijective,
        singular_count: singular,
        class_histogram: histogram,
        frobenius_expected: expected.frobenius.len() as u64,
        pinch_expected: expected.pinch.len() as u64,
        full_nonsingular_subspaces: expected.full_nonsingular_subspaces,
        partitions: t.codes as u64,
        anomalies,
        wall_time_secs: start.elapsed().as_secs_f64(),
    };
    Ok(Enumeration { report, preservers, tables: t })
}

fn report_difference<'a>(anomalies: &mut Vec<String>, what: &str, diff: impl Iterator<Item = &'a u64>) {
    let ids: Vec<u64> = diff.copied().collect();
    if !ids.is_empty() {
        let shown: Vec<String> = ids.iter().take(10).map(u64::to_string).collect();
        anomalies.push(format!("{} x {what} (ids {}{})", ids.len(), shown.join(", "), if ids.len() > 10 { ", ..." } else { "" }));
    }
}

/// Classifies one preserver; returns its tag and whether it is bijective.
fn classify_preserver(
    t: &Tables,
    id: u64,
    gl_count: u64,
    budget: &Budget,
) -> std::result::Result<(&'static str, bool), String> {
    let cols = t.columns(id);
    let f = t.endo(id);
    let rank = t.rank(&cols);
    let nn = t.n * t.n;
    if rank != nn && rank != t.n {
        return Err(format!("preserver of rank {rank}"));
    }
    let c = f
        .classify_with(&PreservationVerdict::ExhaustivePass(gl_count), budget)
        .map_err(|e| e.to_string())?;
    let bijective = rank == nn;
    let consistent = match &c {
        PreserverClassification::FrobeniusDirect { .. } | PreserverClassification::FrobeniusTwisted { .. } => bijective,
        PreserverClassification::PinchDirect(_) | PreserverClassification::PinchTwisted(_) => !bijective,
        other => return Err(format!("certified preserver classified as {}", other.tag())),
    };
    if !consistent {
        return Err(format!("{} for a map of rank {rank}", c.tag()));
    }
    match c.reconstruct().map_err(|e| e.to_string())? {
        Some(g) if g == f => Ok((c.tag(), bijective)),
        _ => Err(format!("{} reconstruction mismatch", c.tag())),
    }
}

/// The preserver set predicted by the classification, built directly from
/// its ingredients.
pub struct ExpectedPreservers {
    pub frobenius: BTreeSet<u64>,
    pub pinch: BTreeSet<u64>,
    pub full_nonsingular_subspaces: u64,
}

/// Row-major residue matrix product.
fn mat_mul(a: &[u32], b: &[u32], n: usize, p: u32) -> Vec<u32> {
    let mut out = vec![0u32; n * n];
    for i in 0..n {
        for k in 0..n {
            let x = a[i * n + k] as u64;
            if x == 0 {
                continue;
            }
            for j in 0..n {
                let o = &mut out[i * n + j];
                *o = ((*o as u64 + x * b[k * n + j] as u64) % p as u64) as u32;
            }
        }
    }
    out
}

/// `vec` digits of a row-major matrix.
fn vec_of_rows(m: &[u32], n: usize) -> Vec<u32> {
    (0..n * n).map(|k| m[(k % n) * n + k / n]).collect()
}

pub fn expected_preservers(t: &Tables) -> ExpectedPreservers {
    let (n, p) = (t.n, t.p);
    let nn = n * n;
    // invertible matrices in row-major form
    let gl_rows: Vec<Vec<u32>> = t
        .gl_digits()
        .iter()
        .map(|v| (0..nn).map(|idx| v[(idx % n) * n + idx / n]).collect())
        .collect();
    let unit = |i: usize, j: usize| {
        let mut e = vec![0u32; nn];
        e[i * n + j] = 1;
        e
    };
    let frobenius: BTreeSet<u64> = gl_rows
        .par_iter()
        .flat_map_iter(|pm| {
            gl_rows.iter().flat_map(move |qm| {
                [false, true].into_iter().map(move |twisted| {
                    let cols: Vec<u16> = (0..nn)
                        .map(|k| {
                            let (i, j) = (k % n, k / n);
                            let e = if twisted { unit(j, i) } else { unit(i, j) };
                            t.code_of(&vec_of_rows(&mat_mul(&mat_mul(pm, &e, n, p), qm, n, p), n))
                        })
                        .collect();
                    t.id_of(&cols)
                })
            })
        })
        .collect();

    let mut subspaces: Vec<Vec<u32>> = Vec::new();
    lattice::for_each_subspace(p, nn, n, |rows| {
        if lattice::is_nonsingular_span(rows, n, n, p) {
            subspaces.push(rows.to_vec());
        }
    });
    let nonzero: Vec<Vec<u32>> = {
        let mut odo = Odometer::new(n, p);
        let mut v = Vec::new();
        odo.advance();
        while odo.advance().is_some() {
            v.push(odo.digits().to_vec());
        }
        v
    };
    let pinch: BTreeSet<u64> = subspaces
        .par_iter()
        .flat_map_iter(|basis| {
            let nonzero = &nonzero;
            gl_rows.iter().flat_map(move |a| {
                nonzero.iter().flat_map(move |x| {
                    [false, true].into_iter().map(move |twisted| {
                        // f(E_ij) = x_j α(e_i) directly, x_i α(e_j) twisted; α(e_c) = Σ_l a_lc B_l
                        let cols: Vec<u16> = (0..nn)
                            .map(|k| {
                                let (i, j) = (k % n, k / n);
                                let (c, s) = if twisted { (j, x[i]) } else { (i, x[j]) };
                                let mut img = vec![0u32; nn];
                                for l in 0..n {
                                    let coef = (a[l * n + c] as u64 * s as u64 % p as u64) as u32;
                                    if coef == 0 {
                                        continue;
                                    }
                                    for (o, b) in img.iter_mut().zip(&basis[l * nn..(l + 1) * nn]) {
                                        *o = ((*o as u64 + coef as u64 * *b as u64) % p as u64) as u32;
                                    }
                                }
                                t.code_of(&img)
                            })
                            .collect();
                        t.id_of(&cols)
                    })
                })
            })
        })
        .collect();
    ExpectedPreservers { frobenius, pinch, full_nonsingular_subspaces: subspaces.len() as u64 }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Report {
    pub version: u32,
    pub field: FieldSpec,
    pub n: usize,
    /// `exhaustive` or `sampled`.
    pub mode: String,
    pub maps_checked: u64,
    /// Maps with `f(GL) = GL`.
    pub image_equals_gl: u64,
    /// Maps with `f⁻¹(GL) = GL`.
    pub preimage_equals_gl: u64,
    pub bijective_preservers: u64,
    pub singular_preservers: u64,
    pub sets_coincide: bool,
    pub singular_images_proper: bool,
    pub proof_device: bool,
    pub anomalies: Vec<String>,
}

/// Largest map space scanned in full by [`verify_theorem1`].
pub const THEOREM1_EXHAUSTIVE_LIMIT: u128 = 1 << 20;

struct GlSets {
    image_equal: bool,
    preimage_equal: bool,
}

fn gl_sets(t: &Tables, cols: &[u16], all: &[Vec<u32>]) -> GlSets {
    let mut images = BTreeSet::new();
    let mut image_in_gl = true;
    let mut preimage_equal = true;
    for (code, digits) in all.iter().enumerate() {
        let img = t.image(cols, digits);
        let src = t.invertible[code];
        let dst = t.invertible[img as usize];
        if src {
            image_in_gl &= dst;
            images.insert(img);
        }
        preimage_equal &= src == dst;
    }
    GlSets { image_equal: image_in_gl && images.len() == t.gl_order(), preimage_equal }
}

/// Checks that `{f : f(GL) = GL}`, `{f : f⁻¹(GL) = GL}` and the bijective
/// preservers coincide, and that singular preservers map `GL` onto a proper
/// subset of `GL`.
pub fn verify_theorem1(cfg: &CampaignConfig) -> Result<Theorem1Report> {
    let t = Tables::new(cfg.field, cfg.n, cfg.budget.seed)?;
    let all: Vec<Vec<u32>> = (0..t.codes as u64).map(|c| packed::decode(c, t.p, t.n * t.n)).collect();
    let total = t.total_maps();
    let mut anomalies = Vec::new();
    let classify = |id: u64| {
        let cols = t.columns(id);
        let s = gl_sets(&t, &cols, &all);
        let preserver = t.preserves(&cols);
        let bijective = preserver && t.rank(&cols) == t.n * t.n;
        (id, s.image_equal, s.preimage_equal, preserver, bijective)
    };
    let (mode, rows): (&str, Vec<(u64, bool, bool, bool, bool)>) = if total <= THEOREM1_EXHAUSTIVE_LIMIT {
        ("exhaustive", cfg.run(|| (0..total as u64).into_par_iter().map(classify).collect())?)
    } else {
        let expected = cfg.run(|| expected_preservers(&t))?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.budget.seed);
        let mut ids: Vec<u64> = (0..cfg.budget.samples).map(|_| rng.gen_range(0..total as u64)).collect();
        ids.extend(expected.frobenius.iter().copied());
        ids.extend(expected.pinch.iter().copied());
        let rows: Vec<_> = cfg.run(|| ids.par_iter().map(|&id| classify(id)).collect())?;
        for &(id, image_eq, _, preserver, bijective) in &rows {
            if preserver && bijective != expected.frobenius.contains(&id) {
                anomalies.push(format!("map {id}: bijectivity disagrees with the constructive set"));
            }
            if image_eq && !expected.frobenius.contains(&id) {
                anomalies.push(format!("map {id}: f(GL) = GL outside the constructive bijective set"));
            }
        }
        ("sampled", rows)
    };
    let image_set: BTreeSet<u64> = rows.iter().filter(|r| r.1).map(|r| r.0).collect();
    let preimage_set: BTreeSet<u64> = rows.iter().filter(|r| r.2).map(|r| r.0).collect();
    let bijective_set: BTreeSet<u64> = rows.iter().filter(|r| r.4).map(|r| r.0).collect();
    let singular: Vec<u64> = rows.iter().filter(|r| r.3 && !r.4).map(|r| r.0).collect();
    let sets_coincide = image_set == preimage_set && preimage_set == bijective_set;
    if !sets_coincide {
        anomalies.push(format!(
            "f(GL)=GL: {}, f^-1(GL)=GL: {}, bijective preservers: {}",
            image_set.len(),
            preimage_set.len(),
            bijective_set.len()
        ));
    }
    let singular_images_proper = singular.iter().all(|id| !image_set.contains(id));
    if !singular_images_proper {
        anomalies.push("a singular preserver maps GL onto GL".into());
    }
    let proof_device = proof_device_holds(cfg.field, cfg.n);
    if !proof_device {
        anomalies.push("B - I is invertible for a truncated identity B".into());
    }
    Ok(Theorem1Report {
        version: REPORT_VERSION,
        field: cfg.field,
        n: cfg.n,
        mode: mode.into(),
        maps_checked: rows.len() as u64,
        image_equals_gl: image_set.len() as u64,
        preimage_equals_gl: preimage_set.len() as u64,
        bijective_preservers: bijective_set.len() as u64,
        singular_preservers: singular.len() as u64,
        sets_coincide,
        singular_images_proper,
        proof_device,
        anomalies,
    })
}

/// For the rank-`r` truncated identity `B` (`1 ≤ r ≤ n`), `B − I` is singular.
pub fn proof_device_holds(field: FieldSpec, n: usize) -> bool {
    (1..=n).all(|r| {
        let b = Matrix::from_fn(field, n, n, |i, j| if i == j && i < r { field.one() } else { field.zero() });
        b.sub(&Matrix::identity(field, n)).map(|m| !m.is_invertible()).unwrap_or(false)
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OntoReport {
    pub version: u32,
    pub field: FieldSpec,
    pub n: usize,
    pub preservers: u64,
    pub vectors: u64,
    pub checks: u64,
    pub failures: u64,
    pub anomalies: Vec<String>,
}

/// `M ↦ f(M)X` is onto for every preserver and every nonzero `X`.
pub fn run_onto(cfg: &CampaignConfig, enumeration: &Enumeration) -> Result<OntoReport> {
    let t = &enumeration.tables;
    let xs: Vec<Matrix> = {
        let mut odo = Odometer::new(t.n, t.p);
        let mut v = Vec::new();
        odo.advance();
        while odo.advance().is_some() {
            v.push(Matrix::from_residues(t.field, t.n, 1, odo.digits()));
        }
        v
    };
    let failures: Vec<String> = cfg.run(|| {
        enumeration
            .preservers
            .par_iter()
            .flat_map_iter(|&id| {
                let f = t.endo(id);
                xs.iter()
                    .filter(move |x| !f.onto_column_audit(x).unwrap_or(false))
                    .map(move |x| format!("map {id}, X = {x}"))
                    .collect::<Vec<_>>()
            })
            .collect()
    })?;
    Ok(OntoReport {
        version: REPORT_VERSION,
        field: t.field,
        n: t.n,
        preservers: enumeration.preservers.len() as u64,
        vectors: xs.len() as u64,
        checks: (enumeration.preservers.len() * xs.len()) as u64,
        failures: failures.len() as u64,
        anomalies: failures.into_iter().take(20).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpanReport {
    pub version: u32,
    pub cases: Vec<SpanCase>,
    pub anomalies: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpanCase {
    pub field: FieldSpec,
    pub n: usize,
    pub spans: bool,
}

/// `GL_n` spans `M_n` for each `(field, n)`.
pub fn run_span(cases: &[(FieldSpec, usize)], budget: &Budget) -> Result<SpanReport> {
    let mut out = Vec::new();
    let mut anomalies = Vec::new();
    for &(field, n) in cases {
        let spans = span_gl_audit(field, n, budget)?;
        if !spans {
            anomalies.push(format!("GL_{n}({field}) does not span M_{n}"));
        }
        out.push(SpanCase { field, n, spans });
    }
    Ok(SpanReport { version: REPORT_VERSION, cases: out, anomalies })
}

pub fn run_dieudonne(cfg: &CampaignConfig) -> Result<DieudonneReport> {
    let budget = cfg.budget;
    let (field, n) = (cfg.field, cfg.n);
    cfg.run(|| lattice::dieudonne_audit(field, n, &budget))?
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u64) -> FieldSpec {
        FieldSpec::prime(p).unwrap()
    }

    #[test]
    fn tables_agree_with_generic_arithmetic() {
        let t = Tables::new(gf(3), 2, 0).unwrap();
        assert_eq!(t.gl_order(), 48);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let id = rng.gen_range(0..t.total_maps() as u64);
            let f = t.endo(id);
            assert_eq!(t.id_of_endo(&f), id);
            let m = Matrix::random(gf(3), 2, 2, &mut rng, 0);
            let digits = m.vec().residues();
            let img = f.apply(&m).unwrap();
            assert_eq!(t.image(&t.columns(id), &digits), t.code_of(&img.vec().residues()));
            let cols = t.columns(id);
            assert_eq!(t.preserves(&cols), t.preserves_full_scan(&cols));
            assert_eq!(t.preserves(&cols), !f.preserves_gl(&Budget::default()).unwrap().is_refuted());
        }
    }

    #[test]
    fn expected_counts_over_gf2() {
        let t = Tables::new(gf(2), 2, 0).unwrap();
        let e = expected_preservers(&t);
        assert_eq!(e.frobenius.len(), 72);
        assert_eq!(e.full_nonsingular_subspaces, 2);
        assert_eq!(e.pinch.len(), 72);
    }

    #[test]
    fn identity_and_transpose_ids() {
        let t = Tables::new(gf(2), 2, 0).unwrap();
        let id = t.id_of_endo(&MatEndo::identity(gf(2), 2));
        assert!(t.preserves(&t.columns(id)));
        let e = expected_preservers(&t);
        assert!(e.frobenius.contains(&id));
        assert!(e.frobenius.contains(&t.id_of_endo(&MatEndo::transpose_map(gf(2), 2))));
    }

    #[test]
    fn cap_requires_override() {
        let mut cfg = CampaignConfig::new(gf(3), 2);
        assert!(matches!(enumerate_preservers(&cfg), Err(Error::BudgetExceeded { .. })));
        cfg.map_cap = 10;
        cfg.field = gf(2);
        assert!(matches!(enumerate_preservers(&cfg), Err(Error::BudgetExceeded { .. })));
        assert!(matches!(Tables::new(FieldSpec::RATIONALS, 2, 0), Err(Error::UnsupportedField(_))));
    }

    #[test]
    fn proof_device() {
        assert!(proof_device_holds(gf(2), 3));
        assert!(proof_device_holds(FieldSpec::RATIONALS, 4));
    }
}
