//! JSON instance and result files (schema version "v1").
//!
//! Integers are written as JSON numbers when `|v| ≤ 2⁵³ − 1` and as decimal
//! strings beyond that; both forms are accepted on input.

use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{BigRational, Gfp, Prime};
use crate::bilinear::{SymbolicMatrix, VanishingPair};
use crate::linalg::{self, Matrix};
use crate::oracle::RankWitness;
use crate::sppa::{FrCertificate, SolverConfig, SolverState, TraceEntry};
use crate::valdet::{IntSymbolicMatrix, NcRegularityVerdict, StepRecord};

pub const SCHEMA_VERSION: &str = "v1";
const MAX_SAFE: i64 = (1 << 53) - 1;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema version {0:?}, expected \"v1\"")]
    Version(String),
    #[error("p = {0} is not prime")]
    NotPrime(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("this command needs a {expected} instance")]
    WrongField { expected: &'static str },
}

/// An arbitrary-precision integer in the number-or-string JSON encoding.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JsonInt(pub BigInt);

impl Serialize for JsonInt {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) if v.abs() <= MAX_SAFE => s.serialize_i64(v),
            _ => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for JsonInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = JsonInt;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer or a decimal integer string")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<JsonInt, E> {
                Ok(JsonInt(v.into()))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<JsonInt, E> {
                Ok(JsonInt(v.into()))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<JsonInt, E> {
                v.trim().parse::<BigInt>().map(JsonInt).map_err(|_| E::custom(format!("not an integer: {v:?}")))
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
enum FieldSpec {
    Gfp { gfp: JsonInt },
    Int { int: bool },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawInstance {
    version: String,
    n: usize,
    m: usize,
    field: FieldSpec,
    matrices: Vec<Vec<Vec<JsonInt>>>,
    #[serde(default)]
    metadata: Metadata,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Gfp(Prime),
    Int,
}

/// A validated instance. Entries of GF(p) instances are reduced into `[0, p)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub n: usize,
    pub field: FieldKind,
    pub matrices: Vec<Vec<Vec<BigInt>>>,
    pub metadata: Metadata,
}

impl Instance {
    pub fn m(&self) -> usize {
        self.matrices.len()
    }

    pub fn from_json(text: &str) -> Result<Self, IoError> {
        let raw: RawInstance = serde_json::from_str(text)?;
        if raw.version != SCHEMA_VERSION {
            return Err(IoError::Version(raw.version));
        }
        if raw.n == 0 || raw.m == 0 {
            return Err(IoError::Shape("n and m must be positive".into()));
        }
        if raw.matrices.len() != raw.m {
            return Err(IoError::Shape(format!("m = {} but {} matrices given", raw.m, raw.matrices.len())));
        }
        for (i, a) in raw.matrices.iter().enumerate() {
            if a.len() != raw.n || a.iter().any(|r| r.len() != raw.n) {
                return Err(IoError::Shape(format!("matrix {i} is not {0}x{0}", raw.n)));
            }
        }
        let field = match raw.field {
            FieldSpec::Int { int: true } => FieldKind::Int,
            FieldSpec::Int { int: false } => return Err(IoError::Shape("field must be {\"gfp\": p} or {\"int\": true}".into())),
            FieldSpec::Gfp { gfp } => {
                let p = gfp.0.to_u64().ok_or_else(|| IoError::NotPrime(gfp.0.to_string()))?;
                FieldKind::Gfp(Prime::new(p).map_err(|_| IoError::NotPrime(p.to_string()))?)
            }
        };
        let mut matrices: Vec<Vec<Vec<BigInt>>> = raw
            .matrices
            .into_iter()
            .map(|a| a.into_iter().map(|r| r.into_iter().map(|v| v.0).collect()).collect())
            .collect();
        if let FieldKind::Gfp(p) = field {
            let f = Gfp::from_prime(p);
            for v in matrices.iter_mut().flatten().flatten() {
                *v = BigInt::from(f.reduce_bigint(v));
            }
        }
        Ok(Instance {
            n: raw.n,
            field,
            matrices,
            metadata: raw.metadata,
        })
    }

    pub fn to_json(&self) -> String {
        let raw = RawInstance {
            version: SCHEMA_VERSION.into(),
            n: self.n,
            m: self.m(),
            field: match self.field {
                FieldKind::Gfp(p) => FieldSpec::Gfp { gfp: JsonInt(p.get().into()) },
                FieldKind::Int => FieldSpec::Int { int: true },
            },
            matrices: self
                .matrices
                .iter()
                .map(|a| a.iter().map(|r| r.iter().map(|v| JsonInt(v.clone())).collect()).collect())
                .collect(),
            metadata: self.metadata.clone(),
        };
        serde_json::to_string_pretty(&raw).expect("serializable") + "\n"
    }

    pub fn load(path: &Path) -> Result<Self, IoError> {
        let text = std::fs::read_to_string(path).map_err(|source| IoError::Read {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn from_symbolic(a: &SymbolicMatrix, metadata: Metadata) -> Self {
        Instance {
            n: a.n(),
            field: FieldKind::Gfp(a.field().prime()),
            matrices: a.mats().iter().map(|m| m.row_vecs().into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect()).collect(),
            metadata,
        }
    }

    pub fn from_int(a: &IntSymbolicMatrix, metadata: Metadata) -> Self {
        Instance {
            n: a.n(),
            field: FieldKind::Int,
            matrices: a.mats().iter().map(Matrix::row_vecs).collect(),
            metadata,
        }
    }

    pub fn to_symbolic(&self) -> Result<SymbolicMatrix, IoError> {
        let FieldKind::Gfp(p) = self.field else {
            return Err(IoError::WrongField { expected: "gfp" });
        };
        let f = Gfp::from_prime(p);
        let mats = self
            .matrices
            .iter()
            .map(|a| {
                let rows: Vec<Vec<u64>> = a.iter().map(|r| r.iter().map(|v| f.reduce_bigint(v)).collect()).collect();
                Matrix::from_rows(&rows, self.n).expect("shape validated")
            })
            .collect();
        SymbolicMatrix::new(f, mats).map_err(|e| IoError::Shape(e.to_string()))
    }

    pub fn to_int(&self) -> Result<IntSymbolicMatrix, IoError> {
        if self.field != FieldKind::Int {
            return Err(IoError::WrongField { expected: "int" });
        }
        let mats = self
            .matrices
            .iter()
            .map(|a| Matrix::from_rows(a, self.n).expect("shape validated"))
            .collect();
        IntSymbolicMatrix::new(mats).map_err(|e| IoError::Shape(e.to_string()))
    }
}

fn rat_str(q: &BigRational) -> String {
    q.to_string()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateJson {
    #[serde(rename = "S")]
    pub s_matrix: Vec<Vec<u64>>,
    #[serde(rename = "T")]
    pub t_matrix: Vec<Vec<u64>>,
    pub r: usize,
    pub s: usize,
    pub x_basis: Vec<Vec<u64>>,
    pub y_basis: Vec<Vec<u64>>,
}

impl CertificateJson {
    pub fn new(cert: &FrCertificate, pair: &VanishingPair) -> Self {
        CertificateJson {
            s_matrix: cert.s.row_vecs(),
            t_matrix: cert.t.row_vecs(),
            r: cert.r,
            s: cert.c,
            x_basis: pair.x.basis_vectors(),
            y_basis: pair.y.basis_vectors(),
        }
    }

    /// Checks invertibility of `S` and `T` and the zero `r × s` block of
    /// every `S A_i T`.
    pub fn verify(&self, a: &SymbolicMatrix) -> Result<(), String> {
        let n = a.n();
        let to_matrix = |rows: &Vec<Vec<u64>>, name: &str| {
            Matrix::from_rows(rows, n)
                .ok()
                .filter(|m| m.rows() == n)
                .ok_or_else(|| format!("{name} is not {n}x{n}"))
        };
        let cert = FrCertificate {
            s: to_matrix(&self.s_matrix, "S")?,
            t: to_matrix(&self.t_matrix, "T")?,
            r: self.r,
            c: self.s,
        };
        let f = a.field();
        if linalg::inverse(&f, &cert.s).is_none() || linalg::inverse(&f, &cert.t).is_none() {
            return Err("S or T is singular".into());
        }
        if !cert.verify(a) {
            return Err("upper-left block of some S A_i T is nonzero".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessJson {
    pub d: usize,
    pub field_degree: usize,
    pub modulus: Vec<u64>,
    pub rank: usize,
    pub bound: usize,
    pub trials: usize,
    pub seed: u64,
    pub substitution: Vec<Vec<u64>>,
}

impl From<&RankWitness> for WitnessJson {
    fn from(w: &RankWitness) -> Self {
        WitnessJson {
            d: w.d,
            field_degree: w.degree,
            modulus: w.modulus.clone(),
            rank: w.rank,
            bound: w.bound,
            trials: w.trials,
            seed: w.seed,
            substitution: w.substitution.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceJson {
    pub cycle: usize,
    pub lambda: String,
    pub g: String,
    pub g_tilde: String,
    pub best_value: usize,
    pub max_denominator_bits: u64,
    pub support_x: usize,
    pub support_y: usize,
}

impl From<&TraceEntry> for TraceJson {
    fn from(t: &TraceEntry) -> Self {
        TraceJson {
            cycle: t.cycle,
            lambda: rat_str(&t.lambda),
            g: rat_str(&t.g),
            g_tilde: rat_str(&t.g_tilde),
            best_value: t.best_value,
            max_denominator_bits: t.max_denominator_bits,
            support_x: t.support_sizes.0,
            support_y: t.support_sizes.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigJson {
    pub epsilon_sc: String,
    pub perturbation: String,
    pub penalty: u64,
    pub max_cycles: usize,
    pub certify_dmax: usize,
    pub trials: usize,
    pub seed: u64,
}

impl From<&SolverConfig> for ConfigJson {
    fn from(c: &SolverConfig) -> Self {
        ConfigJson {
            epsilon_sc: rat_str(&c.epsilon_sc),
            perturbation: rat_str(&c.perturbation),
            penalty: c.penalty,
            max_cycles: c.max_cycles,
            certify_dmax: c.certify_dmax,
            trials: c.trials,
            seed: c.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsJson {
    pub cycles: usize,
    pub certified_at: Option<usize>,
    pub trace: Vec<TraceJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NcRankResult {
    pub version: String,
    pub kind: String,
    pub n: usize,
    pub m: usize,
    pub p: u64,
    /// Best upper bound found; the nc-rank when `certified`.
    pub nc_rank: usize,
    pub certified: bool,
    pub lower_bound: usize,
    pub certificate: CertificateJson,
    pub witness: WitnessJson,
    pub stats: StatsJson,
    pub config: ConfigJson,
}

impl NcRankResult {
    pub fn new(a: &SymbolicMatrix, state: &SolverState, cert: &FrCertificate, cfg: &SolverConfig) -> Self {
        NcRankResult {
            version: SCHEMA_VERSION.into(),
            kind: "ncrank".into(),
            n: a.n(),
            m: a.m(),
            p: a.field().p(),
            nc_rank: state.best_feasible.value,
            certified: state.certified,
            lower_bound: state.lower_bound,
            certificate: CertificateJson::new(cert, &state.best_feasible),
            witness: (&state.witness).into(),
            stats: StatsJson {
                cycles: state.cycle,
                certified_at: state.certified_at,
                trace: state.trace.iter().map(Into::into).collect(),
            },
            config: cfg.into(),
        }
    }

    /// Re-verifies the certificate against the instance and the reported
    /// value.
    pub fn verify(&self, a: &SymbolicMatrix) -> Result<(), String> {
        if self.version != SCHEMA_VERSION {
            return Err(format!("unsupported version {:?}", self.version));
        }
        if self.n != a.n() || self.p != a.field().p() {
            return Err("result does not match the instance".into());
        }
        self.certificate.verify(a)?;
        let value = 2 * self.n - self.certificate.r - self.certificate.s;
        if value != self.nc_rank {
            return Err(format!("certificate value {value} differs from nc_rank {}", self.nc_rank));
        }
        if self.certified && self.lower_bound != self.nc_rank {
            return Err("certified result with a gap between the bounds".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepJson {
    pub r: usize,
    pub s: usize,
    pub increment: u64,
    pub objective: u64,
    pub max_bits: u64,
}

impl From<&StepRecord> for StepJson {
    fn from(s: &StepRecord) -> Self {
        StepJson {
            r: s.r,
            s: s.s,
            increment: s.increment,
            objective: s.objective,
            max_bits: s.max_bits,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairJson {
    pub x_basis: Vec<Vec<u64>>,
    pub y_basis: Vec<Vec<u64>>,
    pub value: usize,
}

impl From<&VanishingPair> for PairJson {
    fn from(p: &VanishingPair) -> Self {
        PairJson {
            x_basis: p.x.basis_vectors(),
            y_basis: p.y.basis_vectors(),
            value: p.value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NcSingularResult {
    pub version: String,
    pub kind: String,
    pub n: usize,
    pub m: usize,
    pub p: u64,
    pub verdict: String,
    /// `v_p Det′ A` when regular.
    pub objective: u64,
    pub bound: u64,
    pub iterations: usize,
    pub transcript: Vec<StepJson>,
    pub final_leading: Vec<Vec<Vec<u64>>>,
    pub final_pair: Option<PairJson>,
    pub config: ConfigJson,
}

impl NcSingularResult {
    pub fn new(a: &IntSymbolicMatrix, p: Prime, v: &NcRegularityVerdict, cfg: &SolverConfig) -> Self {
        NcSingularResult {
            version: SCHEMA_VERSION.into(),
            kind: "ncsingular".into(),
            n: a.n(),
            m: a.m(),
            p: p.get(),
            verdict: v.verdict.as_str().into(),
            objective: v.objective,
            bound: v.state.bound,
            iterations: v.state.iterations,
            transcript: v.state.transcript.iter().map(Into::into).collect(),
            final_leading: v.leading.mats().iter().map(Matrix::row_vecs).collect(),
            final_pair: v.final_pair.as_ref().map(Into::into),
            config: cfg.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleResult {
    pub version: String,
    pub kind: String,
    pub mode: String,
    pub n: usize,
    pub m: usize,
    pub p: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub nc_rank: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub optimal_pair: Option<PairJson>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lower_bound: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<WitnessJson>,
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable") + "\n"
}

pub fn write_file(path: &Path, text: &str) -> Result<(), IoError> {
    std::fs::write(path, text).map_err(|source| IoError::Write {
        path: path.display().to_string(),
        source,
    })
}
