//! Best-effort parser for Javadoc-8 style class pages.

use std::collections::BTreeSet;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::LazyLock;

use apimap_core::corpus::{ApiLibrary, ApiMethod, CorpusError};
use regex::Regex;
use scraper::{ElementRef, Html, Selector};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum JavadocError {
    #[error("{0}: no Javadoc class pages found")]
    NoClassPagesFound(PathBuf),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

/// A page or method entry that was skipped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PageWarning {
    pub page: PathBuf,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedLibrary {
    pub library: ApiLibrary,
    pub warnings: Vec<PageWarning>,
}

const MODIFIERS: &[&str] = &[
    "public",
    "protected",
    "private",
    "static",
    "final",
    "abstract",
    "synchronized",
    "native",
    "default",
    "strictfp",
    "transient",
    "volatile",
];

const CLASS_KINDS: &[&str] = &["Class", "Interface", "Enum", "Annotation Type", "Record"];

static QUALIFIER: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\b(?:[a-z_][a-z0-9_]*\.)+([A-Z_])").unwrap());
static ANNOTATION: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"@[\w.]+(?:\([^)]*\))?\s*").unwrap());
static PACKAGE_NAME: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^[a-z_][A-Za-z0-9_]*(?:\.[a-z_][A-Za-z0-9_]*)*$").unwrap());

fn sel(s: &str) -> Selector {
    Selector::parse(s).expect("static selector")
}

static TITLE: LazyLock<Selector> = LazyLock::new(|| sel("div.header h2.title, div.header h1.title"));
static SUBTITLE: LazyLock<Selector> = LazyLock::new(|| sel("div.header div.subTitle"));
static CLASS_BLOCK: LazyLock<Selector> = LazyLock::new(|| sel("div.description div.block"));
static METHOD_ANCHOR: LazyLock<Selector> = LazyLock::new(|| sel(r#"a[name="method.detail"], a[id="method.detail"]"#));
static ITEM: LazyLock<Selector> = LazyLock::new(|| sel("li.blockList"));
static DEPRECATED: LazyLock<Selector> = LazyLock::new(|| sel("span.deprecatedLabel"));
static CODE: LazyLock<Selector> = LazyLock::new(|| sel("code"));

/// Collapses whitespace (including non-breaking spaces) and trims.
fn clean(s: &str) -> String {
    s.split(|c: char| c.is_whitespace() || c == '\u{a0}').filter(|w| !w.is_empty()).collect::<Vec<_>>().join(" ")
}

fn text_of(e: ElementRef<'_>) -> String {
    clean(&e.text().collect::<String>())
}

/// Drops package qualifiers: `java.util.Map<java.lang.String, T>` becomes
/// `Map<String, T>`.
pub fn simple_type(t: &str) -> String {
    let t = ANNOTATION.replace_all(t, "");
    clean(&QUALIFIER.replace_all(&t, "$1"))
}

fn child_elements<'a>(e: ElementRef<'a>) -> impl Iterator<Item = ElementRef<'a>> {
    e.children().filter_map(ElementRef::wrap)
}

fn first_block<'a>(mut blocks: impl Iterator<Item = ElementRef<'a>>) -> String {
    blocks.find(|b| b.select(&DEPRECATED).next().is_none()).map(text_of).unwrap_or_default()
}

/// Splits on commas that are not nested inside `<...>`.
fn split_top_level(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '<' => depth += 1,
            '>' => depth -= 1,
            ',' if depth == 0 => {
                out.push(std::mem::take(&mut cur));
                continue;
            }
            _ => {}
        }
        cur.push(c);
    }
    out.push(cur);
    out.into_iter().map(|p| clean(&p)).filter(|p| !p.is_empty()).collect()
}

/// Strips modifiers and a leading type-parameter list from the text before
/// the method name; what remains is the return type.
fn return_type_of(prefix: &str) -> String {
    let mut rest = ANNOTATION.replace_all(prefix, "").trim().to_string();
    loop {
        if rest.starts_with('<') {
            let mut depth = 0;
            let mut end = rest.len();
            for (i, c) in rest.char_indices() {
                match c {
                    '<' => depth += 1,
                    '>' => {
                        depth -= 1;
                        if depth == 0 {
                            end = i + 1;
                            break;
                        }
                    }
                    _ => {}
                }
            }
            rest = rest[end..].trim_start().to_string();
            continue;
        }
        match MODIFIERS.iter().find(|m| rest.strip_prefix(**m).is_some_and(|r| r.starts_with(' '))) {
            Some(m) => rest = rest[m.len()..].trim_start().to_string(),
            None => break,
        }
    }
    simple_type(&rest)
}

/// Parsed method signature: return type and (type, name) parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    pub return_type: String,
    pub params: Vec<(String, String)>,
}

pub fn parse_signature(sig: &str, name: &str) -> Result<Signature, String> {
    let sig = clean(sig);
    let needle = format!("{name}(");
    let start = sig
        .match_indices(&needle)
        .map(|(i, _)| i)
        .find(|&i| i == 0 || !sig[..i].ends_with(|c: char| c.is_alphanumeric() || c == '_' || c == '$'))
        .ok_or_else(|| format!("signature does not declare {name}"))?;
    let return_type = return_type_of(&sig[..start]);
    if return_type.is_empty() {
        return Err(format!("{name}: no return type"));
    }
    let open = start + needle.len();
    let close =
        sig[open..].find(')').map(|i| open + i).ok_or_else(|| format!("{name}: unterminated parameter list"))?;
    let mut params = Vec::new();
    for p in split_top_level(&ANNOTATION.replace_all(&sig[open..close], "")) {
        let p = p.strip_prefix("final ").unwrap_or(&p).trim().to_string();
        let (ty, pname) = p.rsplit_once(' ').ok_or_else(|| format!("{name}: parameter {p:?} has no name"))?;
        params.push((simple_type(ty), pname.to_string()));
    }
    Ok(Signature { return_type, params })
}

struct ClassHeader {
    package: String,
    class: String,
    description: String,
}

fn class_header(doc: &Html, rel: &Path) -> Option<Result<ClassHeader, String>> {
    let title =
        doc.select(&TITLE).map(text_of).find(|t| CLASS_KINDS.iter().any(|k| t.starts_with(&format!("{k} "))))?;
    let kind = CLASS_KINDS.iter().find(|k| title.starts_with(&format!("{k} "))).expect("matched above");
    let class = title[kind.len()..].trim();
    let class = class.split('<').next().unwrap_or(class).trim().to_string();
    if class.is_empty() {
        return Some(Err("empty class title".into()));
    }
    let from_header = doc
        .select(&SUBTITLE)
        .map(text_of)
        .map(|t| t.strip_prefix("Package ").map(str::to_string).unwrap_or(t))
        .rfind(|t| PACKAGE_NAME.is_match(t));
    let from_path = || {
        let dirs: Vec<String> = rel
            .parent()
            .into_iter()
            .flat_map(|p| p.components())
            .map(|c| c.as_os_str().to_string_lossy().into_owned())
            .collect();
        dirs.join(".")
    };
    let package = from_header.unwrap_or_else(from_path);
    let description = first_block(doc.select(&CLASS_BLOCK));
    Some(Ok(ClassHeader { package, class, description }))
}

fn parse_method(item: ElementRef<'_>, header: &ClassHeader) -> Result<ApiMethod, String> {
    let name = child_elements(item)
        .find(|e| e.value().name() == "h4")
        .map(text_of)
        .filter(|n| !n.is_empty())
        .ok_or("method entry without a name")?;
    let pre =
        child_elements(item).find(|e| e.value().name() == "pre").ok_or_else(|| format!("{name}: no signature"))?;
    let sig = parse_signature(&pre.text().collect::<String>(), &name)?;
    let description = first_block(
        child_elements(item).filter(|e| e.value().name() == "div" && e.value().classes().any(|c| c == "block")),
    );

    let mut param_docs: Vec<(String, String)> = Vec::new();
    let mut return_doc = String::new();
    if let Some(dl) = child_elements(item).find(|e| e.value().name() == "dl") {
        let mut section = String::new();
        for e in child_elements(dl) {
            match e.value().name() {
                "dt" => section = text_of(e).trim_end_matches(':').to_string(),
                "dd" if section == "Parameters" => {
                    let pname = e.select(&CODE).next().map(text_of).unwrap_or_default();
                    if pname.is_empty() || pname.starts_with('<') {
                        continue;
                    }
                    let full = text_of(e);
                    let rest = full.strip_prefix(pname.as_str()).unwrap_or(&full).trim_start();
                    let rest = rest.strip_prefix('-').unwrap_or(rest).trim();
                    param_docs.push((pname, rest.to_string()));
                }
                "dd" if section == "Returns" => return_doc = text_of(e),
                _ => {}
            }
        }
    }

    let mut m = ApiMethod::new(&header.package, &header.class, &name)
        .with_return(&sig.return_type, &return_doc)
        .with_description(&description)
        .with_class_description(&header.description);
    for (ty, pname) in &sig.params {
        let doc = param_docs.iter().find(|(n, _)| n == pname).map_or("", |(_, d)| d.as_str());
        m = m.with_param(ty, pname, doc);
    }
    Ok(m)
}

/// Methods of one page plus a note for each entry that had to be skipped.
pub type PageMethods = (Vec<ApiMethod>, Vec<String>);

/// Methods documented on one page. `Ok(None)` means the page is not a class
/// page at all.
pub fn parse_class_page(html: &str, rel: &Path) -> Result<Option<PageMethods>, String> {
    let doc = Html::parse_document(html);
    let header = match class_header(&doc, rel) {
        None => return Ok(None),
        Some(h) => h?,
    };
    let mut methods = Vec::new();
    let mut problems = Vec::new();
    let Some(anchor) = doc.select(&METHOD_ANCHOR).next() else {
        return Ok(Some((methods, problems)));
    };
    let container = anchor
        .ancestors()
        .filter_map(ElementRef::wrap)
        .find(|e| e.value().name() == "li")
        .ok_or("method detail anchor outside a list")?;
    for item in container.select(&ITEM) {
        if !child_elements(item).any(|e| e.value().name() == "h4") {
            continue;
        }
        match parse_method(item, &header) {
            Ok(m) => methods.push(m),
            Err(reason) => problems.push(reason),
        }
    }
    Ok(Some((methods, problems)))
}

fn is_candidate(rel: &Path) -> bool {
    let skip_dirs = ["class-use", "doc-files", "src-html"];
    if rel.components().any(|c| skip_dirs.contains(&c.as_os_str().to_string_lossy().as_ref())) {
        return false;
    }
    rel.extension().is_some_and(|e| e == "html")
        && rel.file_stem().and_then(|s| s.to_str()).is_some_and(|s| s.starts_with(|c: char| c.is_ascii_uppercase()))
}

fn html_files(root: &Path, dir: &Path, out: &mut Vec<PathBuf>) -> Result<(), JavadocError> {
    let io_err = |source| JavadocError::Io { path: dir.to_path_buf(), source };
    let mut entries: Vec<_> = fs::read_dir(dir).map_err(io_err)?.collect::<Result<_, _>>().map_err(io_err)?;
    entries.sort_by_key(|e| e.file_name());
    for e in entries {
        let path = e.path();
        if path.is_dir() {
            html_files(root, &path, out)?;
        } else if let Ok(rel) = path.strip_prefix(root) {
            if is_candidate(rel) {
                out.push(rel.to_path_buf());
            }
        }
    }
    Ok(())
}

/// Parses every class page under `doc_dir`. Pages and method entries that
/// cannot be parsed are skipped with a warning; duplicate method ids keep
/// the first occurrence.
pub fn parse_javadoc_html(doc_dir: &Path, name: &str, version: &str) -> Result<ParsedLibrary, JavadocError> {
    let mut files = Vec::new();
    html_files(doc_dir, doc_dir, &mut files)?;
    let mut methods = Vec::new();
    let mut warnings = Vec::new();
    let mut ids = BTreeSet::new();
    let mut class_pages = 0;
    for rel in files {
        let path = doc_dir.join(&rel);
        let bytes = fs::read(&path).map_err(|source| JavadocError::Io { path: path.clone(), source })?;
        let html = String::from_utf8_lossy(&bytes);
        match parse_class_page(&html, &rel) {
            Ok(None) => {}
            Ok(Some((page_methods, problems))) => {
                class_pages += 1;
                warnings.extend(problems.into_iter().map(|reason| PageWarning { page: rel.clone(), reason }));
                for m in page_methods {
                    if ids.insert(m.id()) {
                        methods.push(m);
                    } else {
                        warnings
                            .push(PageWarning { page: rel.clone(), reason: format!("duplicate method {}", m.id()) });
                    }
                }
            }
            Err(reason) => warnings.push(PageWarning { page: rel.clone(), reason }),
        }
    }
    if class_pages == 0 {
        return Err(JavadocError::NoClassPagesFound(doc_dir.to_path_buf()));
    }
    Ok(ParsedLibrary { library: ApiLibrary::new(name, version, methods)?, warnings })
}
