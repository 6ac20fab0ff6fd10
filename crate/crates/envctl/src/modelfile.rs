//! The model file: one structured text document describing a finite grid
//! instance (space, prior, model rows), an optional countable profile model,
//! optional extra conditional assessments, queries, and an optional
//! standalone capacity.
//!
//! All rationals are written as `"p/q"` strings; floats are rejected so no
//! binary rounding can contaminate exact verdicts. Parsing, serializing, and
//! re-parsing a file yields an identical document.

use std::collections::BTreeMap;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use envelope_core::algebra::{AtomSpace, Event, Subalgebra};
use envelope_core::assessment::{strategy_from_model, Prior, StatisticalModel, Strategy};
use envelope_core::capacity::Capacity;
use envelope_core::countable::{CEvent, NamedAtom, Profile, ProfileModel, TailSpec};
use envelope_core::rational::Q;

use crate::rationals::{format_q, parse_q};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prior: Option<PriorSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSection>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub assessments: Vec<AssessmentEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profiles: Option<ProfilesSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub capacity: Option<CapacitySection>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub queries: Vec<QueryEntry>,
}

/// Atom grid: conditioning cells × observable columns, with optional
/// incompatible pairs carved out (1-based `[row, col]`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSection {
    pub rows: usize,
    pub cols: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub incompatible: Vec<[usize; 2]>,
}

/// Prior blocks as 1-based row index lists, one mass string per block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorSection {
    pub blocks: Vec<Vec<usize>>,
    pub mass: Vec<String>,
}

/// One full-width probability row per conditioning cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub rows: Vec<Vec<String>>,
}

/// An extra pinned conditional probability P(f|k) = value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssessmentEntry {
    pub f: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<String>,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueryEntry {
    pub f: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<String>,
    /// Envelope kinds to compute; defaults to the command-line kind.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kinds: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfilesSection {
    pub cols: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub named: Vec<NamedSection>,
    pub profile: Vec<ProfileSection>,
    pub cells: CellsSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedSection {
    pub label: String,
    pub mass: String,
    pub row: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSection {
    pub label: String,
    pub sigma: Vec<SigmaSection>,
}

/// Tail certificate of one column along one profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SigmaSection {
    pub liminf: String,
    pub limsup: String,
    pub inf: String,
    pub sup: String,
    pub inf_attained: bool,
    pub sup_attained: bool,
    /// Declared cell index (decimal string key) → exact value.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub exceptions: BTreeMap<String, String>,
}

/// Prior blocks over profile labels, one diffuse weight per block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellsSection {
    pub blocks: Vec<Vec<String>>,
    pub weight: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapacitySection {
    pub n: usize,
    /// 2^n values indexed by subset bitmask.
    pub values: Vec<String>,
    /// Optional point to integrate against the capacity.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<String>>,
}

/// A finite grid instance assembled from the file.
#[derive(Debug)]
pub struct FiniteInstance {
    pub space: AtomSpace,
    pub prior: Prior,
    pub model: StatisticalModel,
    pub strategy: Strategy,
    /// Extra pinned entries beyond the prior and model.
    pub assessments: Vec<(Event, Event, Q)>,
}

/// Everything a command needs, with sections assembled into core objects.
#[derive(Debug)]
pub struct LoadedModel {
    pub file: ModelFile,
    pub finite: Option<FiniteInstance>,
    pub countable: Option<ProfileModel>,
    pub capacity: Option<(Capacity, Option<Vec<Q>>)>,
}

pub fn parse_model(text: &str) -> Result<ModelFile> {
    let file: ModelFile = toml::from_str(text).context("model file does not parse")?;
    Ok(file)
}

pub fn to_text(file: &ModelFile) -> Result<String> {
    Ok(toml::to_string(file)?)
}

pub fn load_path(path: &std::path::Path) -> Result<LoadedModel> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let file = parse_model(&text)?;
    assemble(file)
}

fn parse_q_at(text: &str, at: &str) -> Result<Q> {
    parse_q(text).with_context(|| format!("at {at}"))
}

fn unit_q_at(text: &str, at: &str) -> Result<Q> {
    let v = parse_q_at(text, at)?;
    if v < Q::from_integer(0.into()) || v > Q::from_integer(1.into()) {
        bail!("at {at}: {text} is outside [0, 1]");
    }
    Ok(v)
}

pub fn assemble(file: ModelFile) -> Result<LoadedModel> {
    let finite = assemble_finite(&file)?;
    let countable = match &file.profiles {
        Some(p) => Some(assemble_profiles(p)?),
        None => None,
    };
    let capacity = match &file.capacity {
        Some(c) => Some(assemble_capacity(c)?),
        None => None,
    };
    if file.assessments.is_empty() || finite.is_some() {
        Ok(LoadedModel { file, finite, countable, capacity })
    } else {
        bail!("[[assessments]] requires the finite sections [space], [prior], [model]");
    }
}

fn assemble_finite(file: &ModelFile) -> Result<Option<FiniteInstance>> {
    let (space_s, prior_s, model_s) = match (&file.space, &file.prior, &file.model) {
        (Some(s), Some(p), Some(m)) => (s, p, m),
        (None, None, None) => return Ok(None),
        _ => bail!("[space], [prior], and [model] must be given together"),
    };
    if space_s.rows == 0 || space_s.cols == 0 {
        bail!("[space]: rows and cols must be positive");
    }
    let mut compat = vec![true; space_s.rows * space_s.cols];
    for (i, pair) in space_s.incompatible.iter().enumerate() {
        let [r, c] = *pair;
        if r == 0 || c == 0 || r > space_s.rows || c > space_s.cols {
            bail!("[space].incompatible[{i}]: [{r}, {c}] is out of range (1-based)");
        }
        compat[(r - 1) * space_s.cols + (c - 1)] = false;
    }
    let space = AtomSpace::build(space_s.rows, space_s.cols, compat)
        .map_err(|e| anyhow::anyhow!("[space]: {e}"))?;

    if prior_s.blocks.len() != prior_s.mass.len() {
        bail!(
            "[prior]: {} blocks but {} masses",
            prior_s.blocks.len(),
            prior_s.mass.len()
        );
    }
    let mut blocks = Vec::with_capacity(prior_s.blocks.len());
    for (b, rows) in prior_s.blocks.iter().enumerate() {
        let mut block = Vec::with_capacity(rows.len());
        for &r in rows {
            if r == 0 || r > space_s.rows {
                bail!("[prior].blocks[{b}]: row {r} is out of range (1-based)");
            }
            block.push(r - 1);
        }
        blocks.push(block);
    }
    let sub = Subalgebra::new(space_s.rows, blocks)
        .map_err(|e| anyhow::anyhow!("[prior].blocks: {e}"))?;
    let mass = prior_s
        .mass
        .iter()
        .enumerate()
        .map(|(i, m)| unit_q_at(m, &format!("[prior].mass[{i}]")))
        .collect::<Result<Vec<Q>>>()?;
    let prior = Prior::new(sub, mass).map_err(|e| anyhow::anyhow!("[prior]: {e}"))?;

    if model_s.rows.len() != space_s.rows {
        bail!(
            "[model]: {} rows for a {}-row space",
            model_s.rows.len(),
            space_s.rows
        );
    }
    let mut rows = Vec::with_capacity(model_s.rows.len());
    for (i, row) in model_s.rows.iter().enumerate() {
        let mut out = Vec::with_capacity(row.len());
        for (j, v) in row.iter().enumerate() {
            out.push(unit_q_at(v, &format!("[model].rows[{i}][{j}]"))?);
        }
        rows.push(out);
    }
    let model =
        StatisticalModel::new(&space, rows).map_err(|e| anyhow::anyhow!("[model]: {e}"))?;
    let strategy = strategy_from_model(&space, &model);

    let mut assessments = Vec::with_capacity(file.assessments.len());
    for (i, entry) in file.assessments.iter().enumerate() {
        let at = format!("[[assessments]][{i}]");
        let f = space
            .parse_event(&entry.f)
            .map_err(|e| anyhow::anyhow!("{at}.f: {e}"))?;
        let k = match &entry.k {
            Some(text) => space
                .parse_event(text)
                .map_err(|e| anyhow::anyhow!("{at}.k: {e}"))?,
            None => space.omega(),
        };
        let value = unit_q_at(&entry.value, &format!("{at}.value"))?;
        assessments.push((f, k, value));
    }

    Ok(Some(FiniteInstance { space, prior, model, strategy, assessments }))
}

fn assemble_profiles(s: &ProfilesSection) -> Result<ProfileModel> {
    let mut named = Vec::with_capacity(s.named.len());
    for (i, n) in s.named.iter().enumerate() {
        let at = format!("[[profiles.named]][{i}]");
        let mass = unit_q_at(&n.mass, &format!("{at}.mass"))?;
        let row = n
            .row
            .iter()
            .enumerate()
            .map(|(j, v)| unit_q_at(v, &format!("{at}.row[{j}]")))
            .collect::<Result<Vec<Q>>>()?;
        named.push(NamedAtom { label: n.label.clone(), mass, row });
    }
    let mut profiles = Vec::with_capacity(s.profile.len());
    for (i, p) in s.profile.iter().enumerate() {
        let mut sigma = Vec::with_capacity(p.sigma.len());
        for (j, t) in p.sigma.iter().enumerate() {
            let at = format!("[[profiles.profile]][{i}].sigma[{j}]");
            let mut exceptions = BTreeMap::new();
            for (key, value) in &t.exceptions {
                let idx: u64 = key
                    .parse()
                    .map_err(|_| anyhow::anyhow!("{at}.exceptions: bad index {key:?}"))?;
                exceptions.insert(idx, unit_q_at(value, &format!("{at}.exceptions[{key}]"))?);
            }
            sigma.push(TailSpec {
                exceptions,
                liminf: unit_q_at(&t.liminf, &format!("{at}.liminf"))?,
                limsup: unit_q_at(&t.limsup, &format!("{at}.limsup"))?,
                inf_value: unit_q_at(&t.inf, &format!("{at}.inf"))?,
                sup_value: unit_q_at(&t.sup, &format!("{at}.sup"))?,
                inf_attained: t.inf_attained,
                sup_attained: t.sup_attained,
            });
        }
        profiles.push(Profile { label: p.label.clone(), sigma });
    }
    let label_index = |label: &str| -> Result<usize> {
        profiles
            .iter()
            .position(|p| p.label == label)
            .ok_or_else(|| anyhow::anyhow!("[profiles.cells].blocks: unknown profile {label:?}"))
    };
    let mut blocks = Vec::with_capacity(s.cells.blocks.len());
    for labels in &s.cells.blocks {
        blocks.push(
            labels
                .iter()
                .map(|l| label_index(l))
                .collect::<Result<Vec<usize>>>()?,
        );
    }
    let cells = Subalgebra::new(profiles.len(), blocks)
        .map_err(|e| anyhow::anyhow!("[profiles.cells].blocks: {e}"))?;
    let weight = s
        .cells
        .weight
        .iter()
        .enumerate()
        .map(|(i, w)| unit_q_at(w, &format!("[profiles.cells].weight[{i}]")))
        .collect::<Result<Vec<Q>>>()?;
    ProfileModel::new(s.cols, named, profiles, cells, weight)
        .map_err(|e| anyhow::anyhow!("[profiles]: {e}"))
}

fn assemble_capacity(s: &CapacitySection) -> Result<(Capacity, Option<Vec<Q>>)> {
    let values = s
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| unit_q_at(v, &format!("[capacity].values[{i}]")))
        .collect::<Result<Vec<Q>>>()?;
    let capacity =
        Capacity::new(s.n, values).map_err(|e| anyhow::anyhow!("[capacity]: {e}"))?;
    let x = match &s.x {
        Some(raw) => {
            if raw.len() != s.n {
                bail!("[capacity].x: {} entries for {} ground elements", raw.len(), s.n);
            }
            Some(
                raw.iter()
                    .enumerate()
                    .map(|(i, v)| parse_q_at(v, &format!("[capacity].x[{i}]")))
                    .collect::<Result<Vec<Q>>>()?,
            )
        }
        None => None,
    };
    Ok((capacity, x))
}

/// Canonical document for a finite instance plus queries; used by fixture
/// writers and the round-trip tests.
pub fn finite_document(
    rows: usize,
    cols: usize,
    incompatible: Vec<[usize; 2]>,
    blocks: Vec<Vec<usize>>,
    mass: &[Q],
    model_rows: &[Vec<Q>],
    queries: Vec<QueryEntry>,
) -> ModelFile {
    ModelFile {
        space: Some(SpaceSection { rows, cols, incompatible }),
        prior: Some(PriorSection {
            blocks,
            mass: mass.iter().map(format_q).collect(),
        }),
        model: Some(ModelSection {
            rows: model_rows
                .iter()
                .map(|r| r.iter().map(format_q).collect())
                .collect(),
        }),
        assessments: vec![],
        profiles: None,
        capacity: None,
        queries,
    }
}

/// Resolves a finite query expression, defaulting the conditioning side to Ω.
pub fn finite_query(space: &AtomSpace, f: &str, k: Option<&str>) -> Result<(Event, Event)> {
    let fe = space
        .parse_event(f)
        .map_err(|e| anyhow::anyhow!("query f {f:?}: {e}"))?;
    let ke = match k {
        Some(text) => space
            .parse_event(text)
            .map_err(|e| anyhow::anyhow!("query k {text:?}: {e}"))?,
        None => space.omega(),
    };
    Ok((fe, ke))
}

/// Resolves a countable query expression against a profile model.
pub fn countable_query(
    model: &ProfileModel,
    f: &str,
    k: Option<&str>,
) -> Result<(CEvent, CEvent)> {
    let fe = crate::queries::countable_event(model, f)?;
    let ke = match k {
        Some(text) => crate::queries::countable_event(model, text)?,
        None => CEvent::full(model),
    };
    Ok((fe, ke))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture(name: &str) -> String {
        let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("../../fixtures")
            .join(name);
        std::fs::read_to_string(path).expect("fixture readable")
    }

    #[test]
    fn shipped_fixtures_round_trip_identically() {
        for name in [
            "grid2x2.toml",
            "vacuity.toml",
            "binomial_n2.toml",
            "binomial_n3.toml",
            "ultrafilter.toml",
            "evens_odds.toml",
            "capacity_pair.toml",
            "capacity_conflict.toml",
        ] {
            let first = parse_model(&fixture(name)).expect(name);
            let text = to_text(&first).expect(name);
            let second = parse_model(&text).expect(name);
            assert_eq!(first, second, "{name} drifts under serialize/parse");
            assemble(first).expect(name);
        }
    }

    #[test]
    fn floats_are_rejected_everywhere() {
        let doc = fixture("grid2x2.toml").replace("\"1/2\", \"1/2\"", "\"0.5\", \"0.5\"");
        let err = assemble(parse_model(&doc).unwrap()).unwrap_err().to_string();
        assert!(err.contains("[prior].mass[0]"), "unexpected error: {err}");
        // A bare TOML float is a type error before assembly even starts.
        let doc = fixture("capacity_pair.toml").replace("\"1/5\"", "0.2");
        assert!(parse_model(&doc).is_err());
    }

    #[test]
    fn countable_queries_resolve_declared_vocabulary() {
        let loaded = assemble(parse_model(&fixture("ultrafilter.toml")).unwrap()).unwrap();
        let model = loaded.countable.as_ref().unwrap();
        let (f, k) = countable_query(model, "E1 & evens", Some("odds_tail | evens")).unwrap();
        assert!(!f.is_empty() && !k.is_empty());
        let exc = crate::queries::countable_event(model, "evens_exc2").unwrap();
        assert!(exc.is_subset(&crate::queries::countable_event(model, "evens").unwrap()));
        assert!(crate::queries::countable_event(model, "evens_exc7").is_err());
        assert!(crate::queries::countable_event(model, "H1").is_err());
        assert!(crate::queries::countable_event(model, "E3").is_err());
        let (full, _) = countable_query(model, "odds | evens", None).unwrap();
        assert_eq!(full, CEvent::full(model));
    }

    #[test]
    fn partial_finite_sections_are_rejected() {
        let doc = "[space]\nrows = 2\ncols = 2\n";
        let err = assemble(parse_model(doc).unwrap()).unwrap_err().to_string();
        assert!(err.contains("together"), "unexpected error: {err}");
    }
}
