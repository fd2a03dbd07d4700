//! Field identifiers and the two classification universes.
//!
//! Fine-grained fields follow the 22-field ESI scheme; broad fields follow the
//! 9-field NSF scheme. Input files spell field names in several ways
//! ("Material science", "MATERIALS SCIENCE", "Plant & animal sciences"), so
//! every name is resolved through a [`FieldUniverse`] into one canonical
//! spelling before it becomes an identifier.

use std::fmt;

use serde::{Deserialize, Serialize};

macro_rules! field_id {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(String);

        impl $name {
            /// Wraps a name that is already canonical. Use
            /// [`FieldUniverse::resolve`] for user-supplied spellings.
            pub fn new(canonical: impl Into<String>) -> Self {
                $name(canonical.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl AsRef<str> for $name {
            fn as_ref(&self) -> &str {
                &self.0
            }
        }
    };
}

field_id!(
    /// One of the fine-grained (ESI) fields.
    EsiField
);
field_id!(
    /// One of the broad (NSF) fields.
    NsfField
);

impl NsfField {
    pub fn mathematics() -> Self {
        NsfField::new(MATHEMATICS)
    }
}

impl EsiField {
    pub fn mathematics() -> Self {
        EsiField::new(MATHEMATICS)
    }
}

pub const MATHEMATICS: &str = "Mathematics";

/// Canonical ESI names with the alternate spellings seen in published tables.
const ESI_FIELDS: &[(&str, &[&str])] = &[
    ("Agriculture", &["Agricultural sciences"]),
    ("Biology and biochemistry", &[]),
    ("Chemistry", &[]),
    ("Clinical medicine", &[]),
    ("Computer science", &[]),
    ("Economics and business", &[]),
    ("Engineering", &[]),
    ("Environment and ecology", &[]),
    ("Geosciences", &[]),
    ("Immunology", &[]),
    ("Materials science", &["Material science"]),
    ("Mathematics", &[]),
    ("Microbiology", &[]),
    ("Molecular biology and genetics", &[]),
    ("Multidisciplinary", &[]),
    (
        "Neuroscience and behavior",
        &["Neuroscience and behavior science"],
    ),
    ("Pharmacology and toxicology", &[]),
    ("Physics", &[]),
    ("Plant and animal science", &["Plant and animal sciences"]),
    ("Psychiatry and psychology", &[]),
    ("Social sciences", &["Social sciences, general"]),
    ("Space science", &["Space sciences"]),
];

const NSF_FIELDS: &[(&str, &[&str])] = &[
    ("Biology", &[]),
    ("Biomedical research", &["Biomedicine"]),
    ("Chemistry", &[]),
    ("Clinical medicine", &[]),
    ("Earth and space sciences", &[]),
    ("Engineering and technology", &[]),
    ("Mathematics", &[]),
    ("Physics", &[]),
    ("Social/behavioral sciences", &[]),
];

/// Comparison key for field names: case, whitespace and punctuation are
/// ignored, and `&` or `/` read as "and".
fn match_key(name: &str) -> String {
    name.to_lowercase()
        .replace(['&', '/'], "and")
        .chars()
        .filter(char::is_ascii_alphanumeric)
        .collect()
}

#[derive(Debug, Clone)]
struct UniverseEntry {
    canonical: String,
    keys: Vec<String>,
}

/// A declared set of field names plus accepted alternate spellings.
#[derive(Debug, Clone)]
pub struct FieldUniverse {
    entries: Vec<UniverseEntry>,
}

impl FieldUniverse {
    /// Builds a universe from canonical names and their aliases. Entries are
    /// kept sorted by canonical name.
    pub fn new<I, S, A>(fields: I) -> Self
    where
        I: IntoIterator<Item = (S, Vec<A>)>,
        S: Into<String>,
        A: AsRef<str>,
    {
        let mut entries: Vec<UniverseEntry> = fields
            .into_iter()
            .map(|(canonical, aliases)| {
                let canonical = canonical.into();
                let mut keys = vec![match_key(&canonical)];
                keys.extend(aliases.iter().map(|a| match_key(a.as_ref())));
                UniverseEntry { canonical, keys }
            })
            .collect();
        entries.sort_by(|a, b| a.canonical.cmp(&b.canonical));
        entries.dedup_by(|a, b| a.canonical == b.canonical);
        FieldUniverse { entries }
    }

    /// The 22 ESI fields.
    pub fn esi_default() -> Self {
        Self::new(ESI_FIELDS.iter().map(|(c, a)| (*c, a.to_vec())))
    }

    /// The 9 NSF broad fields.
    pub fn nsf_default() -> Self {
        Self::new(NSF_FIELDS.iter().map(|(c, a)| (*c, a.to_vec())))
    }

    /// Canonical spelling of `name`, if it belongs to this universe.
    pub fn resolve(&self, name: &str) -> Option<&str> {
        let key = match_key(name);
        if key.is_empty() {
            return None;
        }
        self.entries
            .iter()
            .find(|e| e.keys.contains(&key))
            .map(|e| e.canonical.as_str())
    }

    pub fn resolve_esi(&self, name: &str) -> Option<EsiField> {
        self.resolve(name).map(EsiField::new)
    }

    pub fn resolve_nsf(&self, name: &str) -> Option<NsfField> {
        self.resolve(name).map(NsfField::new)
    }

    /// Canonical names in sorted order.
    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.canonical.as_str())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
