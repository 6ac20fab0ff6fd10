//! Query expressions over profile models.
//!
//! The shared grammar (`&`, `|`, `!`, parentheses, `omega`, `empty`,
//! `E<j>`) is extended here with identifier vocabulary for countable
//! models: a profile label means the whole profile (declared cells
//! included), a named-cell label means that cell, `<label>_tail` the
//! non-declared cells of a profile, and `<label>_exc<idx>` the declared
//! exceptional cell with index `<idx>`.

use anyhow::{bail, Result};
use envelope_core::algebra::{parse_expr, Expr};
use envelope_core::countable::{CEvent, ProfileModel};

pub fn countable_event(model: &ProfileModel, text: &str) -> Result<CEvent> {
    let expr = parse_expr(text).map_err(|e| anyhow::anyhow!("query {text:?}: {e}"))?;
    resolve(model, &expr)
}

fn resolve(model: &ProfileModel, expr: &Expr) -> Result<CEvent> {
    Ok(match expr {
        Expr::Omega => CEvent::full(model),
        Expr::Empty => CEvent::empty(model),
        Expr::E(j) => {
            if *j >= model.n_cols() {
                bail!(
                    "column E{} is out of range (model has {} columns)",
                    j + 1,
                    model.n_cols()
                );
            }
            CEvent::column(model, *j)
        }
        Expr::H(k) => {
            bail!(
                "H{} addresses a finite grid row; profile-model cells are addressed by label",
                k + 1
            )
        }
        Expr::Ident(name) => ident_event(model, name)?,
        Expr::Not(e) => resolve(model, e)?.complement(),
        Expr::And(a, b) => resolve(model, a)?.and(&resolve(model, b)?),
        Expr::Or(a, b) => resolve(model, a)?.or(&resolve(model, b)?),
    })
}

fn ident_event(model: &ProfileModel, name: &str) -> Result<CEvent> {
    if let Some(p) = model.profile_index(name) {
        return Ok(CEvent::profile_event(model, p));
    }
    if let Some(c) = model.named_index(name) {
        return Ok(CEvent::named_cell(model, c));
    }
    if let Some(label) = name.strip_suffix("_tail") {
        if let Some(p) = model.profile_index(label) {
            return Ok(CEvent::tail_only(model, p));
        }
    }
    if let Some((label, idx_text)) = name.rsplit_once("_exc") {
        if let Some(p) = model.profile_index(label) {
            let idx: u64 = idx_text
                .parse()
                .map_err(|_| anyhow::anyhow!("bad exceptional-cell index in {name:?}"))?;
            let t = model
                .exception_indices(p)
                .iter()
                .position(|&i| i == idx)
                .ok_or_else(|| {
                    anyhow::anyhow!("profile {label:?} declares no exceptional cell {idx}")
                })?;
            return Ok(CEvent::exception_cell(model, p, t));
        }
    }
    bail!(
        "unknown identifier {name:?}; expected a profile label, a named-cell label, \
         `<label>_tail`, or `<label>_exc<idx>`"
    )
}
