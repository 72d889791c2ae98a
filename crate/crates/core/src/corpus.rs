//! Domain model: libraries, methods, migration rules and labeled mappings.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default base of the Maven Central repository layout.
pub const MAVEN_CENTRAL: &str = "https://repo1.maven.org/maven2";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("invalid maven coordinates: {0}")]
    InvalidCoordinates(String),
    #[error("method name must not be empty (in {0})")]
    EmptyMethodName(String),
    #[error("duplicate method id {0}")]
    DuplicateMethodId(String),
    #[error("migration rule source and target are the same: {0}")]
    SelfMigration(String),
}

/// `group:artifact:version` of a published Maven artifact.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MavenCoordinates {
    group_id: String,
    artifact_id: String,
    version: String,
}

impl MavenCoordinates {
    pub fn new(group_id: &str, artifact_id: &str, version: &str) -> Result<Self, CorpusError> {
        let bad = |s: &str| s.is_empty() || s.chars().any(char::is_whitespace);
        if bad(group_id) || bad(artifact_id) || bad(version) {
            return Err(CorpusError::InvalidCoordinates(format!("{group_id}:{artifact_id}:{version}")));
        }
        if group_id.split('.').any(str::is_empty) {
            return Err(CorpusError::InvalidCoordinates(format!("group id {group_id} has an empty segment")));
        }
        Ok(Self { group_id: group_id.into(), artifact_id: artifact_id.into(), version: version.into() })
    }

    pub fn group_id(&self) -> &str {
        &self.group_id
    }

    pub fn artifact_id(&self) -> &str {
        &self.artifact_id
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    /// File name of the javadoc jar, `{artifact}-{version}-javadoc.jar`.
    pub fn javadoc_file_name(&self) -> String {
        format!("{}-{}-javadoc.jar", self.artifact_id, self.version)
    }

    /// URL of the javadoc jar below a repository root such as [`MAVEN_CENTRAL`].
    pub fn javadoc_url(&self, base: &str) -> String {
        format!(
            "{}/{}/{}/{}/{}",
            base.trim_end_matches('/'),
            self.group_id.replace('.', "/"),
            self.artifact_id,
            self.version,
            self.javadoc_file_name()
        )
    }
}

impl FromStr for MavenCoordinates {
    type Err = CorpusError;

    /// Parses `group:artifact:version`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [g, a, v] => Self::new(g, a, v),
            _ => Err(CorpusError::InvalidCoordinates(s.into())),
        }
    }
}

impl fmt::Display for MavenCoordinates {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.group_id, self.artifact_id, self.version)
    }
}

/// One declared parameter of a method.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiParam {
    pub name: String,
    #[serde(rename = "type")]
    pub type_name: String,
    pub description: String,
}

impl ApiParam {
    pub fn new(type_name: &str, name: &str, description: &str) -> Self {
        Self { name: name.into(), type_name: type_name.into(), description: description.into() }
    }
}

/// A documented API method.
///
/// Missing documentation is always an empty string. The parameter
/// signature, parameter description and parameter count are derived from
/// `params` so they can never disagree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiMethod {
    #[serde(rename = "package")]
    pub package_name: String,
    #[serde(rename = "class")]
    pub class_name: String,
    pub class_description: String,
    #[serde(rename = "name")]
    pub method_name: String,
    #[serde(rename = "return_type")]
    pub return_type_signature: String,
    #[serde(rename = "return_description")]
    pub return_type_description: String,
    pub params: Vec<ApiParam>,
    #[serde(rename = "description")]
    pub method_description: String,
}

/// Separator placed between per-parameter descriptions.
pub const PARAM_DESCRIPTION_SEPARATOR: &str = " — ";

impl ApiMethod {
    /// A method with the given location and name and no documentation.
    pub fn new(package: &str, class: &str, name: &str) -> Self {
        Self {
            package_name: package.into(),
            class_name: class.into(),
            class_description: String::new(),
            method_name: name.into(),
            return_type_signature: String::new(),
            return_type_description: String::new(),
            params: Vec::new(),
            method_description: String::new(),
        }
    }

    /// Fully qualified id `package.Class#name(Type1,Type2)`.
    pub fn id(&self) -> String {
        let types: Vec<&str> = self.params.iter().map(|p| p.type_name.trim()).collect();
        if self.package_name.is_empty() {
            format!("{}#{}({})", self.class_name, self.method_name, types.join(","))
        } else {
            format!("{}.{}#{}({})", self.package_name, self.class_name, self.method_name, types.join(","))
        }
    }

    /// `Type name, Type name` as written in the declaration.
    pub fn input_parameters_signature(&self) -> String {
        let parts: Vec<String> = self
            .params
            .iter()
            .map(|p| match (p.type_name.trim(), p.name.trim()) {
                (t, "") => t.to_string(),
                (t, n) => format!("{t} {n}"),
            })
            .collect();
        parts.join(", ")
    }

    /// Parameter descriptions in declaration order, `name - description`,
    /// joined by [`PARAM_DESCRIPTION_SEPARATOR`]. Undocumented parameters
    /// are left out.
    pub fn input_parameters_description(&self) -> String {
        let parts: Vec<String> = self
            .params
            .iter()
            .filter(|p| !p.description.trim().is_empty())
            .map(|p| format!("{} - {}", p.name.trim(), p.description.trim()))
            .collect();
        parts.join(PARAM_DESCRIPTION_SEPARATOR)
    }

    pub fn input_parameter_count(&self) -> usize {
        self.params.len()
    }

    // builder-style helpers, mostly for fixtures

    pub fn with_return(mut self, type_name: &str, description: &str) -> Self {
        self.return_type_signature = type_name.into();
        self.return_type_description = description.into();
        self
    }

    pub fn with_param(mut self, type_name: &str, name: &str, description: &str) -> Self {
        self.params.push(ApiParam::new(type_name, name, description));
        self
    }

    pub fn with_description(mut self, description: &str) -> Self {
        self.method_description = description.into();
        self
    }

    pub fn with_class_description(mut self, description: &str) -> Self {
        self.class_description = description.into();
        self
    }
}

/// A library release and its documented methods, sorted by id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "LibraryDoc")]
pub struct ApiLibrary {
    name: String,
    version: String,
    methods: Vec<ApiMethod>,
}

#[derive(Deserialize)]
struct LibraryDoc {
    name: String,
    version: String,
    methods: Vec<ApiMethod>,
}

impl TryFrom<LibraryDoc> for ApiLibrary {
    type Error = CorpusError;

    fn try_from(doc: LibraryDoc) -> Result<Self, Self::Error> {
        ApiLibrary::new(&doc.name, &doc.version, doc.methods)
    }
}

impl ApiLibrary {
    pub fn new(name: &str, version: &str, mut methods: Vec<ApiMethod>) -> Result<Self, CorpusError> {
        let mut keyed = Vec::with_capacity(methods.len());
        for m in methods.drain(..) {
            if m.method_name.trim().is_empty() {
                return Err(CorpusError::EmptyMethodName(format!("{}.{}", m.package_name, m.class_name)));
            }
            keyed.push((m.id(), m));
        }
        keyed.sort_by(|a, b| a.0.cmp(&b.0));
        for w in keyed.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(CorpusError::DuplicateMethodId(w[0].0.clone()));
            }
        }
        Ok(Self { name: name.into(), version: version.into(), methods: keyed.into_iter().map(|(_, m)| m).collect() })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn methods(&self) -> &[ApiMethod] {
        &self.methods
    }

    pub fn len(&self) -> usize {
        self.methods.len()
    }

    pub fn is_empty(&self) -> bool {
        self.methods.is_empty()
    }

    pub fn find(&self, id: &str) -> Option<&ApiMethod> {
        self.methods.binary_search_by(|m| m.id().as_str().cmp(id)).ok().map(|i| &self.methods[i])
    }
}

/// An ordered (retired library → replacing library) pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MigrationRule {
    pub source: String,
    pub target: String,
}

impl MigrationRule {
    pub fn new(source: &str, target: &str) -> Result<Self, CorpusError> {
        if source == target {
            return Err(CorpusError::SelfMigration(source.into()));
        }
        Ok(Self { source: source.into(), target: target.into() })
    }

    /// `source→target`.
    pub fn rule_id(&self) -> String {
        format!("{}→{}", self.source, self.target)
    }
}

impl FromStr for MigrationRule {
    type Err = CorpusError;

    /// Accepts `a→b` as well as `a->b`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s
            .split_once('→')
            .or_else(|| s.split_once("->"))
            .ok_or_else(|| CorpusError::InvalidCoordinates(s.into()))?;
        Self::new(a.trim(), b.trim())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Valid,
    Invalid,
}

impl Label {
    pub fn is_valid(self) -> bool {
        self == Label::Valid
    }

    pub fn from_bool(valid: bool) -> Self {
        if valid {
            Label::Valid
        } else {
            Label::Invalid
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Valid => "valid",
            Label::Invalid => "invalid",
        }
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "valid" => Ok(Label::Valid),
            "invalid" => Ok(Label::Invalid),
            other => Err(format!("unknown label {other:?}")),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A labeled (source method, target method) pair within a migration rule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappingRecord {
    pub rule_id: String,
    pub source_method_id: String,
    pub target_method_id: String,
    pub label: Label,
}

/// One unparsed row of a mapping dataset, numbered from 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappingRow {
    pub row: usize,
    pub rule_id: String,
    pub source_method_id: String,
    pub target_method_id: String,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DatasetError {
    #[error("row {row}: unresolvable method id {id}")]
    UnresolvableMethodId { row: usize, id: String },
    #[error("row {row}: duplicate record")]
    DuplicateRecord { row: usize },
    #[error("row {row}: {reason}")]
    MalformedRow { row: usize, reason: String },
}

/// A mapping record joined to the two methods it references.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedMapping {
    pub record: MappingRecord,
    pub source: ApiMethod,
    pub target: ApiMethod,
}

/// Resolved mapping records grouped by rule id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MappingDataset {
    rules: BTreeMap<String, Vec<ResolvedMapping>>,
}

impl MappingDataset {
    /// Resolves every row against the given libraries. Ids are looked up in
    /// library order, first match wins.
    pub fn resolve<I>(rows: I, libraries: &[ApiLibrary]) -> Result<Self, DatasetError>
    where
        I: IntoIterator<Item = MappingRow>,
    {
        let mut index: BTreeMap<String, &ApiMethod> = BTreeMap::new();
        for lib in libraries {
            for m in lib.methods() {
                index.entry(m.id()).or_insert(m);
            }
        }
        let mut seen = BTreeSet::new();
        let mut rules: BTreeMap<String, Vec<ResolvedMapping>> = BTreeMap::new();
        for row in rows {
            let r = row.row;
            let rule_id = row.rule_id.trim();
            if rule_id.is_empty() {
                return Err(DatasetError::MalformedRow { row: r, reason: "empty rule_id".into() });
            }
            let label: Label = row.label.parse().map_err(|reason| DatasetError::MalformedRow { row: r, reason })?;
            let sid = row.source_method_id.trim();
            let tid = row.target_method_id.trim();
            let source =
                *index.get(sid).ok_or_else(|| DatasetError::UnresolvableMethodId { row: r, id: sid.into() })?;
            let target =
                *index.get(tid).ok_or_else(|| DatasetError::UnresolvableMethodId { row: r, id: tid.into() })?;
            if !seen.insert((String::from(rule_id), String::from(sid), String::from(tid))) {
                return Err(DatasetError::DuplicateRecord { row: r });
            }
            rules.entry(rule_id.into()).or_default().push(ResolvedMapping {
                record: MappingRecord {
                    rule_id: rule_id.into(),
                    source_method_id: sid.into(),
                    target_method_id: tid.into(),
                    label,
                },
                source: source.clone(),
                target: target.clone(),
            });
        }
        Ok(Self { rules })
    }

    pub fn from_records(records: Vec<ResolvedMapping>) -> Self {
        let mut rules: BTreeMap<String, Vec<ResolvedMapping>> = BTreeMap::new();
        for r in records {
            rules.entry(r.record.rule_id.clone()).or_default().push(r);
        }
        Self { rules }
    }

    pub fn rules(&self) -> &BTreeMap<String, Vec<ResolvedMapping>> {
        &self.rules
    }

    pub fn rule_ids(&self) -> impl Iterator<Item = &str> {
        self.rules.keys().map(String::as_str)
    }

    pub fn records(&self) -> impl Iterator<Item = &ResolvedMapping> {
        self.rules.values().flatten()
    }

    pub fn len(&self) -> usize {
        self.rules.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
