//! Game sources and expression parsing shared by the subcommands.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use domlab_core::catalog;
use domlab_core::engine::Policy;
use domlab_core::error::{Error, Result};
use domlab_core::game::{load_finite_game, Game, Reduction};
use domlab_core::seq::standard_registry;
use domlab_core::set::{parse_set, SymbolicSet};
use serde_json::Value as Json;

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::InvalidConfig(format!("cannot read `{}`: {e}", path.display())))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text)
        .map_err(|e| Error::InvalidConfig(format!("cannot write `{}`: {e}", path.display())))
}

/// Resolves the `--game` / `--catalog` / `--trunc` flags to a game.
pub fn load_game(
    file: &Option<PathBuf>,
    catalog_id: &Option<String>,
    trunc: Option<usize>,
) -> Result<Game> {
    match (file, catalog_id) {
        (Some(_), None) if trunc.is_some() => {
            Err(Error::InvalidConfig("--trunc only applies to --catalog entries".into()))
        }
        (Some(path), None) => load_finite_game(&read_text(path)?, Arc::new(standard_registry())),
        (None, Some(id)) => match trunc {
            Some(n) => catalog::truncation(id, n),
            None => Ok(catalog::instantiate(id)?.game),
        },
        _ => Err(Error::InvalidConfig("provide exactly one of --game or --catalog".into())),
    }
}

/// One set expression per player, in declaration order; no expressions
/// means the full strategy space.
pub fn parse_reduction(game: &Game, exprs: &[String]) -> Result<Reduction> {
    if exprs.is_empty() {
        return Ok(game.full_reduction());
    }
    Ok(Reduction::new(parse_parts(game, exprs)?))
}

pub fn parse_parts(game: &Game, exprs: &[String]) -> Result<Vec<SymbolicSet>> {
    if exprs.len() != game.num_players() {
        return Err(Error::InvalidConfig(format!(
            "expected {} set expressions (one per player), got {}",
            game.num_players(),
            exprs.len()
        )));
    }
    exprs.iter().map(|e| parse_set(e, game.registry())).collect()
}

/// Loads a stage script: a JSON array of stages, each an array of set
/// expressions in player order or an object keyed by player name (players
/// left out remove nothing).
pub fn load_script(game: &Game, path: &Path) -> Result<Policy> {
    let doc: Json = serde_json::from_str(&read_text(path)?)?;
    let arr = doc.as_array().ok_or_else(|| {
        Error::InvalidConfig("script must be a JSON array of stages".into())
    })?;
    let mut stages = Vec::with_capacity(arr.len());
    for (k, stage) in arr.iter().enumerate() {
        let mut parts = vec![SymbolicSet::empty(); game.num_players()];
        match stage {
            Json::Array(items) => {
                if items.len() != game.num_players() {
                    return Err(Error::InvalidConfig(format!(
                        "script stage {k}: expected {} entries, got {}",
                        game.num_players(),
                        items.len()
                    )));
                }
                for (i, item) in items.iter().enumerate() {
                    parts[i] = parse_set(expr_str(item, k)?, game.registry())?;
                }
            }
            Json::Object(map) => {
                for (name, item) in map {
                    let i = game
                        .players()
                        .iter()
                        .position(|p| p == name)
                        .ok_or_else(|| {
                            Error::InvalidConfig(format!(
                                "script stage {k}: unknown player `{name}`"
                            ))
                        })?;
                    parts[i] = parse_set(expr_str(item, k)?, game.registry())?;
                }
            }
            _ => {
                return Err(Error::InvalidConfig(format!(
                    "script stage {k}: expected an array or an object"
                )))
            }
        }
        stages.push(parts);
    }
    Ok(Policy::Scripted { stages })
}

fn expr_str(item: &Json, stage: usize) -> Result<&str> {
    item.as_str().ok_or_else(|| {
        Error::InvalidConfig(format!("script stage {stage}: entries must be set expressions"))
    })
}
