use std::path::{Path, PathBuf};

use apimap::api_json::load_api_json;
use apimap::javadoc::{parse_class_page, parse_javadoc_html, parse_signature, simple_type, JavadocError, Signature};
use apimap_core::corpus::{ApiMethod, ApiParam};

fn docs(lib: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/javadoc").join(lib)
}

#[test]
fn builder_page_yields_the_worked_source_method() {
    let parsed = parse_javadoc_html(&docs("easymock"), "easymock", "3.4").unwrap();
    let lib = &parsed.library;
    assert_eq!(lib.len(), 7);
    let m = lib.find("org.easymock.IMockBuilder#createMock(String,MockType)").unwrap();
    let want = ApiMethod {
        package_name: "org.easymock".into(),
        class_name: "IMockBuilder".into(),
        class_description: "Helps the creation of partial mocks with EasyMock.".into(),
        method_name: "createMock".into(),
        return_type_signature: "T".into(),
        return_type_description: "the newly created mock".into(),
        params: vec![
            ApiParam::new("String", "name", "the mock name"),
            ApiParam::new("MockType", "type", "the mock type"),
        ],
        method_description: "Create a named mock of the request type from this builder. \
                             The same builder can be called to create multiple mocks."
            .into(),
    };
    assert_eq!(*m, want);
    let varargs = lib.find("org.easymock.IMockBuilder#withConstructor(Object...)").unwrap();
    assert_eq!(varargs.return_type_signature, "IMockBuilder<T>");
}

#[test]
fn unparseable_entries_become_warnings() {
    let parsed = parse_javadoc_html(&docs("easymock"), "easymock", "3.4").unwrap();
    assert_eq!(parsed.warnings.len(), 1, "{:?}", parsed.warnings);
    assert_eq!(parsed.warnings[0].page, Path::new("org/easymock/MockType.html"));
    // the class-use page has the same stem but is not a class page
    assert!(parsed.library.methods().iter().all(|m| m.class_name == "IMockBuilder"));
}

#[test]
fn generic_target_method_and_missing_docs() {
    let lib = parse_javadoc_html(&docs("mockito"), "mockito", "2.8.9").unwrap().library;
    let mock = lib.find("org.mockito.Mockito#mock(T)").unwrap();
    assert_eq!(mock.return_type_signature, "T");
    assert_eq!(mock.return_type_description, "mock object");
    assert_eq!(mock.params, vec![ApiParam::new("T", "classToMock", "class or interface to mock")]);
    assert_eq!(
        mock.method_description,
        "Creates mock object of given class or interface. See examples in Javadoc for Mockito class"
    );
    let bare = lib.find("org.mockito.Mockito#validateMockitoUsage()").unwrap();
    assert_eq!(bare.method_description, "");
    assert_eq!(bare.return_type_description, "");
    assert_eq!(bare.return_type_signature, "void");
    let when = lib.find("org.mockito.Mockito#when(T)").unwrap();
    assert_eq!(when.return_type_signature, "OngoingStubbing<T>");
}

#[test]
fn parsed_fixtures_match_the_committed_json() {
    for (lib, version) in [("easymock", "3.4"), ("mockito", "2.8.9"), ("json", "20160810"), ("gson", "2.8.0")] {
        let parsed = parse_javadoc_html(&docs(lib), lib, version).unwrap().library;
        let json = Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("tests/fixtures/api/{lib}.json"));
        assert_eq!(parsed, load_api_json(&json).unwrap(), "{lib}");
    }
}

#[test]
fn directory_without_class_pages_is_an_error() {
    let err = parse_javadoc_html(&docs("not-javadoc"), "x", "1").unwrap_err();
    assert!(matches!(err, JavadocError::NoClassPagesFound(_)), "{err}");
}

#[test]
fn non_class_pages_are_skipped() {
    let page = "<html><body><div class=\"header\"><h1 class=\"title\">Package org.x</h1></div></body></html>";
    assert_eq!(parse_class_page(page, Path::new("org/x/package-summary.html")).unwrap(), None);
}

#[test]
fn signatures() {
    assert_eq!(
        parse_signature("public static\u{a0}<T>\u{a0}T\u{a0}mock(java.lang.Class<T>\u{a0}classToMock)", "mock"),
        Ok(Signature { return_type: "T".into(), params: vec![("Class<T>".into(), "classToMock".into())] })
    );
    assert_eq!(
        parse_signature(
            "public java.util.Map<java.lang.String, java.util.List<java.lang.Integer>> m(int a, java.lang.String... b)",
            "m"
        ),
        Ok(Signature {
            return_type: "Map<String, List<Integer>>".into(),
            params: vec![("int".into(), "a".into()), ("String...".into(), "b".into())],
        })
    );
    assert!(parse_signature("public void other()", "m").is_err());
    assert_eq!(simple_type("java.util.List<org.json.JSONObject>"), "List<JSONObject>");
    assert_eq!(simple_type("int[]"), "int[]");
}
