//! Decision sessions and their file-backed store.
//!
//! The whole store lives in memory and is written to
//! `<dir>/sessions.json` after every mutation, via a temporary file and a
//! rename so a crash never leaves a half-written snapshot.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::RwLock;

use ahp_core::group::normalize_weights;
use ahp_core::{PartialJudgments, ScaleMode};
use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{AhpError, Result};
use crate::report::Method;

pub const SCHEMA_VERSION: u32 = 1;
pub const SNAPSHOT_FILE: &str = "sessions.json";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SessionSettings {
    pub scale_mode: ScaleMode,
    pub consistency_tol: f64,
    pub method: Method,
}

impl Default for SessionSettings {
    fn default() -> Self {
        Self {
            scale_mode: ScaleMode::FreePositive,
            consistency_tol: ahp_core::lls::DEFAULT_CONSISTENCY_TOL,
            method: Method::Both,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expert {
    pub name: String,
    pub alpha: f64,
    #[serde(with = "partial_serde")]
    pub matrix: PartialJudgments,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionSession {
    pub id: String,
    pub labels: Vec<String>,
    pub experts: Vec<Expert>,
    pub created_at: DateTime<Utc>,
    pub updated_at: DateTime<Utc>,
    pub settings: SessionSettings,
    /// Incremented on every write; used for optimistic concurrency.
    pub version: u64,
}

impl DecisionSession {
    pub fn expert(&self, index: usize) -> Result<&Expert> {
        self.experts
            .get(index)
            .ok_or_else(|| AhpError::NotFound(format!("{}/experts/{index}", self.id)))
    }
}

/// Creation request: expert weights may be omitted for equal weighting.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NewSession {
    pub labels: Vec<String>,
    pub experts: Vec<NewExpert>,
    #[serde(default)]
    pub settings: SessionSettings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NewExpert {
    pub name: String,
    #[serde(default)]
    pub alpha: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct Snapshot {
    schema_version: u32,
    sessions: Vec<DecisionSession>,
}

pub struct SessionStore {
    path: PathBuf,
    sessions: RwLock<BTreeMap<String, DecisionSession>>,
}

impl SessionStore {
    /// Opens the store in `dir`, creating the directory if needed.
    pub fn open(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| AhpError::io(dir, e))?;
        let path = dir.join(SNAPSHOT_FILE);
        let mut sessions = BTreeMap::new();
        if path.exists() {
            let text = fs::read_to_string(&path).map_err(|e| AhpError::io(&path, e))?;
            let snapshot: Snapshot = serde_json::from_str(&text).map_err(|e| {
                AhpError::parse(format!("{} line {} column {}", path.display(), e.line(), e.column()), e.to_string())
            })?;
            if snapshot.schema_version != SCHEMA_VERSION {
                return Err(AhpError::parse(
                    path.display().to_string(),
                    format!("unsupported schema_version {}", snapshot.schema_version),
                ));
            }
            for s in snapshot.sessions {
                sessions.insert(s.id.clone(), s);
            }
        }
        Ok(Self { path, sessions: RwLock::new(sessions) })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn create(&self, request: NewSession) -> Result<DecisionSession> {
        let n = request.labels.len();
        if n < 2 {
            return Err(AhpError::Invalid(format!("need at least 2 labels, got {n}")));
        }
        if request.experts.is_empty() {
            return Err(AhpError::Invalid("at least one expert is required".into()));
        }
        let s = request.settings;
        if !(s.consistency_tol >= 0.0 && s.consistency_tol.is_finite()) {
            return Err(AhpError::Invalid("consistency_tol must be finite and non-negative".into()));
        }
        let m = request.experts.len();
        let alphas = match request.experts.iter().map(|e| e.alpha).collect::<Option<Vec<f64>>>() {
            Some(alphas) => normalize_weights(&alphas)?,
            None if request.experts.iter().all(|e| e.alpha.is_none()) => vec![1.0 / m as f64; m],
            None => return Err(AhpError::Invalid("give alpha for every expert or for none".into())),
        };
        let experts = request
            .experts
            .into_iter()
            .zip(alphas)
            .map(|(e, alpha)| {
                Ok(Expert { name: e.name, alpha, matrix: PartialJudgments::new(n, s.scale_mode)? })
            })
            .collect::<Result<Vec<_>>>()?;
        let now = Utc::now();
        let session = DecisionSession {
            id: uuid::Uuid::new_v4().simple().to_string(),
            labels: request.labels,
            experts,
            created_at: now,
            updated_at: now,
            settings: s,
            version: 1,
        };
        let mut sessions = self.sessions.write().expect("store lock poisoned");
        sessions.insert(session.id.clone(), session.clone());
        self.persist(&sessions)?;
        Ok(session)
    }

    pub fn get(&self, id: &str) -> Result<DecisionSession> {
        self.sessions
            .read()
            .expect("store lock poisoned")
            .get(id)
            .cloned()
            .ok_or_else(|| AhpError::NotFound(id.to_owned()))
    }

    pub fn list(&self) -> Vec<DecisionSession> {
        self.sessions.read().expect("store lock poisoned").values().cloned().collect()
    }

    pub fn delete(&self, id: &str) -> Result<()> {
        let mut sessions = self.sessions.write().expect("store lock poisoned");
        sessions.remove(id).ok_or_else(|| AhpError::NotFound(id.to_owned()))?;
        self.persist(&sessions)
    }

    /// Sets `a_ij = value` for one expert; `a_ji` follows by construction.
    ///
    /// With `expected_version`, a stale version yields [`AhpError::Conflict`].
    pub fn update_judgment(
        &self,
        id: &str,
        expert: usize,
        i: usize,
        j: usize,
        value: f64,
        expected_version: Option<u64>,
    ) -> Result<DecisionSession> {
        let mut sessions = self.sessions.write().expect("store lock poisoned");
        let session = sessions.get_mut(id).ok_or_else(|| AhpError::NotFound(id.to_owned()))?;
        if let Some(expected) = expected_version {
            if expected != session.version {
                return Err(AhpError::Conflict { expected, current: session.version });
            }
        }
        let n_experts = session.experts.len();
        let target = session
            .experts
            .get_mut(expert)
            .ok_or_else(|| AhpError::NotFound(format!("{id}/experts/{expert} (session has {n_experts})")))?;
        let mut matrix = target.matrix.clone();
        matrix.set(i, j, value)?;
        target.matrix = matrix;
        session.version += 1;
        session.updated_at = Utc::now();
        let updated = session.clone();
        self.persist(&sessions)?;
        Ok(updated)
    }

    /// Writes the current state to disk.
    pub fn flush(&self) -> Result<()> {
        let sessions = self.sessions.read().expect("store lock poisoned");
        self.persist(&sessions)
    }

    fn persist(&self, sessions: &BTreeMap<String, DecisionSession>) -> Result<()> {
        let snapshot = Snapshot { schema_version: SCHEMA_VERSION, sessions: sessions.values().cloned().collect() };
        let bytes = serde_json::to_vec_pretty(&snapshot).expect("sessions always serialize");
        let tmp = self.path.with_extension("json.tmp");
        fs::write(&tmp, bytes).map_err(|e| AhpError::io(&tmp, e))?;
        fs::rename(&tmp, &self.path).map_err(|e| AhpError::io(&self.path, e))
    }
}

/// Stores a partial matrix as `{n, scale_mode, upper: [[i, j, value], ...]}`.
mod partial_serde {
    use ahp_core::{PartialJudgments, ScaleMode};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Repr {
        n: usize,
        scale_mode: ScaleMode,
        upper: Vec<(usize, usize, f64)>,
    }

    pub fn serialize<S: Serializer>(p: &PartialJudgments, s: S) -> Result<S::Ok, S::Error> {
        Repr { n: p.n(), scale_mode: p.scale_mode(), upper: p.judgments() }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<PartialJudgments, D::Error> {
        let repr = Repr::deserialize(d)?;
        let mut p = PartialJudgments::new(repr.n, repr.scale_mode).map_err(serde::de::Error::custom)?;
        for (i, j, v) in repr.upper {
            p.set(i, j, v).map_err(serde::de::Error::custom)?;
        }
        Ok(p)
    }
}
