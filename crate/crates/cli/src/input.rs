use std::path::Path;

use grushin::iterate::IterationSpec;
use grushin::lti::StateSpaceSystem;
use grushin::{ComplexMatrix, ComplexVector};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::report::CliError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Flags {
    #[serde(default)]
    pub skew_adjoint: bool,
}

/// On-disk system description. Matrices are nested arrays of `[re, im]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<ComplexMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<ComplexMatrix>,
    #[serde(default)]
    pub flags: Flags,
}

impl SystemFile {
    pub fn from_system(system: &StateSpaceSystem) -> Self {
        Self {
            a: system.a().clone(),
            b: system.b().clone(),
            c: Some(system.c().clone()),
            d: Some(system.d().clone()),
            flags: Flags {
                skew_adjoint: system.is_skew_adjoint(),
            },
        }
    }

    pub fn to_system(&self) -> grushin::Result<StateSpaceSystem> {
        StateSpaceSystem::new(
            self.a.clone(),
            self.b.clone(),
            self.c.clone(),
            self.d.clone(),
            self.flags.skew_adjoint,
        )
    }
}

/// Deserializes JSON text, naming the offending field and position on failure.
pub fn parse_json<T: DeserializeOwned>(text: &str, origin: &str) -> Result<T, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "." {
            CliError::Parse(format!("{origin}: {inner}"))
        } else {
            CliError::Parse(format!("{origin}: field `{path}`: {inner}"))
        }
    })
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn load_system(path: &Path) -> Result<(SystemFile, StateSpaceSystem), CliError> {
    let origin = path.display().to_string();
    let file: SystemFile = parse_json(&read(path)?, &origin)?;
    let system = file
        .to_system()
        .map_err(|e| CliError::Parse(format!("{origin}: {}: {e}", e.name())))?;
    Ok((SystemFile::from_system(&system), system))
}

pub fn load_couplings(path: &Path) -> Result<IterationSpec, CliError> {
    parse_json(&read(path)?, &path.display().to_string())
}

pub fn parse_vector(text: &str, flag: &str) -> Result<ComplexVector, CliError> {
    parse_json(text, flag)
}
