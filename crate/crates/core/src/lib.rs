//! Model checking of Abstract State Machine models written in AsmetaL.
//!
//! The pipeline parses a model ([`frontend`]), checks that it can be mapped
//! to a finite system ([`validator`]), lowers it to guarded commands
//! ([`translator`], [`gts`]) and explores the result ([`checker`]).

pub mod checker;
pub mod frontend;
pub mod gts;
pub mod ltl;
pub mod seq;
pub mod translator;
pub mod validator;

pub use checker::{check, CheckOptions, CheckReport, Limits, Outcome, Trace, Verdict};
pub use frontend::{parse_source, FrontendError, ModelAst};
pub use gts::{emit_bir_text, read_bir_text, ReadError, StateVector, System};
pub use translator::{translate, TranslateError, TranslateOptions, Translation};
pub use validator::{validate, ValidationReport};

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("parse error: {0}")]
    Parse(#[from] FrontendError),
    #[error("model is not translatable:\n{}", .0.to_text())]
    Invalid(ValidationReport),
    #[error("translation error: {0}")]
    Translate(#[from] TranslateError),
    #[error("IR error at line {}: {}", .0.line, .0.message)]
    Read(#[from] ReadError),
}

/// Parsed, validated and translated model.
pub struct Compiled {
    pub validation: ValidationReport,
    pub translation: Translation,
}

pub fn compile(source: &str, opts: TranslateOptions) -> Result<Compiled, PipelineError> {
    let model = parse_source(source)?;
    let validation = validate(&model);
    if !validation.ok {
        return Err(PipelineError::Invalid(validation));
    }
    let translation = translate(&model, opts)?;
    Ok(Compiled { validation, translation })
}
