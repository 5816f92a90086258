//! Method lookup: bundled splitting names, classic tableaus, or scheme files.

use std::path::Path;

use crate::driver::AnyMethod;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::schemes::{
    builtin_tableau, load_scheme, load_scheme_file, LoadedScheme, BUILTIN_SPLITTING,
};
use crate::stepper::OutputRegister;

/// Resolves a method given as a bundled splitting name, a classic tableau
/// name (`RK2`, `RK4`), or a scheme-file path — tried in that order.
///
/// Splitting schemes default to averaged output; callers that want a single
/// register rebuild the [`AnyMethod::Splitting`] variant with their own
/// [`OutputRegister`].
pub fn resolve_method<S: Scalar>(spec: &str) -> Result<AnyMethod<S>> {
    let trimmed = spec.trim();
    if BUILTIN_SPLITTING
        .iter()
        .any(|name| name.eq_ignore_ascii_case(trimmed))
    {
        return Ok(AnyMethod::Splitting {
            scheme: load_scheme::<S>(trimmed)?,
            output: OutputRegister::Average,
        });
    }
    let canon = trimmed.to_ascii_uppercase();
    if canon == "RK2" || canon == "RK4" {
        return Ok(AnyMethod::Tableau(builtin_tableau::<S>(&canon)?));
    }
    let path = Path::new(trimmed);
    if path.exists() {
        return Ok(match load_scheme_file::<S>(path)? {
            LoadedScheme::Splitting(s) => AnyMethod::Splitting {
                scheme: s,
                output: OutputRegister::Average,
            },
            LoadedScheme::LowStorage(l) => AnyMethod::LowStorage(l),
            LoadedScheme::Tableau(t) => AnyMethod::Tableau(t),
        });
    }
    Err(Error::UnknownMethod(trimmed.to_string()))
}

/// Whether the method's coefficients force complex arithmetic.
pub fn method_needs_complex(spec: &str) -> Result<bool> {
    match resolve_method::<f64>(spec) {
        Ok(_) => Ok(false),
        Err(Error::ComplexCoefficients { .. }) => Ok(true),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn resolves_builtin_names_case_insensitively() {
        match resolve_method::<f64>("bm4").unwrap() {
            AnyMethod::Splitting { scheme, output } => {
                assert_eq!(scheme.name(), "BM4");
                assert_eq!(output, OutputRegister::Average);
            }
            other => panic!("expected splitting scheme, got {}", other.name()),
        }
        match resolve_method::<f64>("rk4").unwrap() {
            AnyMethod::Tableau(t) => assert_eq!(t.name(), "RK4"),
            other => panic!("expected tableau, got {}", other.name()),
        }
    }

    #[test]
    fn unknown_name_is_an_error() {
        let err = resolve_method::<f64>("NoSuchMethod").unwrap_err();
        assert!(matches!(err, Error::UnknownMethod(ref n) if n == "NoSuchMethod"));
    }

    #[test]
    fn complex_detection_matches_the_catalogue() {
        assert!(!method_needs_complex("LT").unwrap());
        assert!(!method_needs_complex("BM6").unwrap());
        assert!(!method_needs_complex("RK4").unwrap());
        assert!(method_needs_complex("SPL24+").unwrap());
        assert!(method_needs_complex("SPL24-").unwrap());
        assert!(method_needs_complex("NoSuchMethod").is_err());
    }

    #[test]
    fn scheme_files_resolve_by_path() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("heun.json");
        let json = r#"{
            "kind": "butcher",
            "name": "heun-file",
            "a": [[1.0, 0.0]],
            "b": [[0.5, 0.0], [0.5, 0.0]]
        }"#;
        std::fs::write(&path, json).unwrap();
        let spec = path.display().to_string();
        match resolve_method::<Complex64>(&spec).unwrap() {
            AnyMethod::Tableau(t) => assert_eq!(t.name(), "heun-file"),
            other => panic!("expected tableau, got {}", other.name()),
        }
        assert!(!method_needs_complex(&spec).unwrap());
    }
}
