//! Text format for a profile.
//!
//! ```text
//! # swimming pool
//! vars: a, b            # optional, widens the vocabulary
//! constraint: ((S&T)|(S&P)|(T&P)) -> I
//! kb: S & T & P
//! kb: S & T & P         # repetition is multiplicity
//! kb: !S & !T & !P & !I
//! ```
//!
//! At most one `constraint:` line (absent means `true`) and at least one
//! `kb:` line.

use thiserror::Error;

use crate::formula::{Formula, Vocabulary};
use crate::merging::{MergeError, Profile};
use crate::parser::{self, ParseError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProfileFileError {
    #[error("line {line}: {source}")]
    Formula {
        line: usize,
        #[source]
        source: ParseError,
    },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("no `kb:` line")]
    NoKnowledgeBase,
    #[error(transparent)]
    Invalid(#[from] MergeError),
}

impl ProfileFileError {
    /// True for errors in the text itself, as opposed to a well-formed file
    /// describing an invalid profile.
    pub fn is_syntax(&self) -> bool {
        !matches!(self, ProfileFileError::Invalid(_))
    }
}

/// Parsed contents of a profile file, before profile validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileSource {
    pub kbs: Vec<Formula>,
    pub constraint: Option<Formula>,
    pub declared: Vocabulary,
}

impl ProfileSource {
    pub fn into_profile(self) -> Result<Profile, MergeError> {
        Profile::with_vocabulary(
            self.kbs,
            self.constraint.unwrap_or_else(Formula::top),
            &self.declared,
        )
    }
}

fn strip_comment(s: &str) -> &str {
    s.split('#').next().unwrap_or("")
}

/// Reads the directives of a profile file without validating the profile.
pub fn read_source(text: &str) -> Result<ProfileSource, ProfileFileError> {
    let mut kbs = Vec::new();
    let mut constraint = None;
    let mut declared = Vec::new();

    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        if strip_comment(raw).trim().is_empty() {
            continue;
        }
        let Some((key, body)) = raw.split_once(':') else {
            return Err(ProfileFileError::Syntax {
                line,
                message: format!("expected `kb:`, `constraint:` or `vars:`, found `{}`", raw.trim()),
            });
        };
        let offset = key.chars().count() + 1;
        let formula = |body: &str| {
            parser::parse(body).map_err(|mut source| {
                if source.line == 1 {
                    source.column += offset;
                }
                source.line = line;
                ProfileFileError::Formula { line, source }
            })
        };
        match key.trim() {
            "kb" => kbs.push(formula(body)?),
            "constraint" => {
                if constraint.is_some() {
                    return Err(ProfileFileError::Syntax {
                        line,
                        message: "more than one `constraint:` line".into(),
                    });
                }
                constraint = Some(formula(body)?);
            }
            "vars" => {
                for name in strip_comment(body).split(',').map(str::trim).filter(|n| !n.is_empty()) {
                    if !parser::is_identifier(name) {
                        return Err(ProfileFileError::Syntax {
                            line,
                            message: format!("`{name}` is not a variable name"),
                        });
                    }
                    declared.push(name.to_owned());
                }
            }
            other => {
                return Err(ProfileFileError::Syntax {
                    line,
                    message: format!("unknown directive `{other}`"),
                })
            }
        }
    }
    if kbs.is_empty() {
        return Err(ProfileFileError::NoKnowledgeBase);
    }
    Ok(ProfileSource {
        kbs,
        constraint,
        declared: Vocabulary::new(declared),
    })
}

/// Parses and validates a profile file.
pub fn parse_profile(text: &str) -> Result<Profile, ProfileFileError> {
    Ok(read_source(text)?.into_profile()?)
}

/// Renders a profile in the file format; [`parse_profile`] reads it back
/// to an equal profile.
pub fn render_profile(profile: &Profile) -> String {
    let mut out = String::new();
    let extra = profile.extra_vocabulary();
    if !extra.is_empty() {
        out.push_str(&format!("vars: {}\n", extra.names().join(", ")));
    }
    out.push_str(&format!("constraint: {}\n", profile.constraint()));
    for kb in profile.kbs() {
        out.push_str(&format!("kb: {kb}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const POOL: &str = "\
# swimming pool
constraint: ((S&T)|(S&P)|(T&P)) -> I
kb: S & T & P
kb: S & T & P   # second co-owner
kb: !S & !T & !P & !I

kb: T & P & !I
";

    #[test]
    fn reads_the_pool() {
        let prof = parse_profile(POOL).unwrap();
        assert_eq!(prof.kbs().len(), 4);
        assert_eq!(prof.kbs()[0], prof.kbs()[1]);
        assert_eq!(prof.vocabulary().names(), ["I", "P", "S", "T"]);
        assert_eq!(parse_profile(&render_profile(&prof)).unwrap(), prof);
    }

    #[test]
    fn constraint_defaults_to_true_and_vars_widen() {
        let prof = parse_profile("vars: z, a\nkb: p\n").unwrap();
        assert_eq!(*prof.constraint(), Formula::top());
        assert_eq!(prof.vocabulary().names(), ["a", "p", "z"]);
        let text = render_profile(&prof);
        assert!(text.starts_with("vars: a, z\n"));
        assert_eq!(parse_profile(&text).unwrap(), prof);
    }

    #[test]
    fn syntax_errors() {
        assert_eq!(parse_profile("# nothing\n"), Err(ProfileFileError::NoKnowledgeBase));
        assert!(matches!(
            parse_profile("kb: p\nconstraint: p\nconstraint: q"),
            Err(ProfileFileError::Syntax { line: 3, .. })
        ));
        assert!(matches!(
            parse_profile("formula: p"),
            Err(ProfileFileError::Syntax { line: 1, .. })
        ));
        assert!(matches!(parse_profile("kb p"), Err(ProfileFileError::Syntax { .. })));
        assert!(matches!(
            parse_profile("vars: 1x\nkb: p"),
            Err(ProfileFileError::Syntax { line: 1, .. })
        ));
        match parse_profile("kb: p\nkb: p & & q") {
            Err(ProfileFileError::Formula { line, source }) => {
                assert_eq!(line, 2);
                assert_eq!(source.column, 9);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn invalid_profiles_are_not_syntax_errors() {
        let err = parse_profile("kb: p & !p").unwrap_err();
        assert!(!err.is_syntax());
        assert!(matches!(err, ProfileFileError::Invalid(MergeError::InconsistentKb { index: 0, .. })));
    }
}
