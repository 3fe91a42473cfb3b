//! Shared helpers for the CLI and acceptance suites: the case-study fixture
//! (built through the CLI or directly through the library), a seeded random
//! project generator, defect injection, and a brute-force consistency oracle
//! that works on the raw files.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use sha2::{Digest, Sha256};

use annoglue_cli::{run, Outcome};
use annoglue_core::env::{Environment, SequentialEnvironment};
use annoglue_core::linker::{annotate_annotation, import_into_artefact};
use annoglue_core::model::{
    scenario_body, Annotation, AnnotationFunction, AnnotationId, Body, Choice, Creator,
    LifecycleState, Motivation, Point, PresentationProps, Role, Selector, Target, VersionRef,
};
use annoglue_core::registry::{
    ArtefactId, ArtefactKind, EditorBinding, NewArtefact, VersionStatus,
};
use annoglue_core::repository::{AnnotationSetFile, Project, SetPlacement};

pub const START: i64 = 1_760_000_000;

pub fn env() -> SequentialEnvironment {
    SequentialEnvironment::new(START, 1, "ann")
}

pub fn cli(dir: &Path, env: &mut dyn Environment, args: &[&str]) -> Outcome {
    run(
        std::iter::once("annoglue").chain(args.iter().copied()),
        dir,
        env,
    )
}

/// Runs a command that must succeed and returns its stdout.
pub fn ok(dir: &Path, env: &mut dyn Environment, args: &[&str]) -> String {
    let out = cli(dir, env, args);
    assert_eq!(out.code, 0, "{args:?} failed: {}", out.stderr);
    out.stdout
}

pub const PROTOTYPE_FILE: &str = "WXR - V0.prstn";
pub const DIALOG_FILE: &str = "MPIA_WXR.xml";
pub const CRITERIA_FILE: &str = "criteria.pdf";
pub const SET: &str = "session-1";
pub const SESSION: &str = "case study";

pub const DESCRIPTIVE: [(&str, &str); 5] = [
    ("OFF", "OFF = Switch OFF"),
    ("STDY", "STDY = Switch for test only"),
    ("TST", "TST = trigger for hardware checkup"),
    ("WxON", "WxON = activate radar detection"),
    ("WXA", "WXA = Focus detection on alert"),
];
pub const TODO_LABEL: &str = "TODO: Ergonomic inspection reference";

pub fn descriptive_at(i: usize) -> PresentationProps {
    PresentationProps::new(20.0 + 180.0 * i as f64, 300.0, 160.0, 40.0)
}

pub fn todo_at() -> PresentationProps {
    PresentationProps::new(20.0, 20.0, 240.0, 40.0)
}

fn at_arg(p: PresentationProps) -> String {
    format!("{},{},{},{}", p.x, p.y, p.width, p.height)
}

#[derive(Debug, Clone)]
pub struct Fixture {
    /// The five descriptive annotations, in creation order.
    pub descriptive: Vec<AnnotationId>,
    pub todo: AnnotationId,
}

impl Fixture {
    pub fn all(&self) -> Vec<AnnotationId> {
        let mut ids = self.descriptive.clone();
        ids.push(self.todo.clone());
        ids
    }
}

pub fn write_fixture_files(dir: &Path) {
    fs::write(dir.join(PROTOTYPE_FILE), "<presentation name=\"WXR\"/>\n").unwrap();
    fs::write(dir.join(DIALOG_FILE), "<ico name=\"MPIA_WXR\"/>\n").unwrap();
    fs::write(dir.join(CRITERIA_FILE), "%PDF-1.4 ergonomic criteria\n").unwrap();
}

/// The case study, scripted through the command line.
pub fn fixture_via_cli(dir: &Path, env: &mut dyn Environment) -> Fixture {
    write_fixture_files(dir);
    ok(dir, env, &["init", "wxr"]);
    ok(
        dir,
        env,
        &[
            "artefact",
            "add",
            PROTOTYPE_FILE,
            "--editor",
            "pandaannotation",
            "--kind",
            "prototype",
            "--name",
            PROTOTYPE_FILE,
            "--id",
            "proto",
        ],
    );
    ok(
        dir,
        env,
        &[
            "artefact",
            "add",
            DIALOG_FILE,
            "--editor",
            "petshop",
            "--kind",
            "dialog-model",
            "--name",
            DIALOG_FILE,
            "--id",
            "ico",
        ],
    );
    let mut descriptive = Vec::new();
    for (i, (widget, text)) in DESCRIPTIVE.iter().enumerate() {
        let selector = format!("id:wxr/{widget}");
        let at = at_arg(descriptive_at(i));
        let id = ok(
            dir,
            env,
            &[
                "annotate",
                "proto",
                "--type",
                "text",
                "--body",
                text,
                "--function",
                "descriptive",
                "--motivation",
                "describing",
                "--as",
                "designer:dana",
                "--at",
                &at,
                "--selector",
                &selector,
                "--set",
                SET,
                "--session",
                SESSION,
            ],
        );
        descriptive.push(AnnotationId::new(id.trim()));
    }
    let body = format!("{TODO_LABEL}|{CRITERIA_FILE}");
    let at = at_arg(todo_at());
    let todo = ok(
        dir,
        env,
        &[
            "annotate",
            "proto",
            "--type",
            "file",
            "--body",
            &body,
            "--function",
            "organizational",
            "--motivation",
            "commenting",
            "--as",
            "designer:dana",
            "--at",
            &at,
            "--set",
            SET,
            "--session",
            SESSION,
        ],
    );
    for id in &descriptive {
        ok(dir, env, &["target", "add", id.as_str(), "ico"]);
    }
    Fixture {
        descriptive,
        todo: AnnotationId::new(todo.trim()),
    }
}

/// The same case study driven directly through the library, one persist per
/// step, consuming the environment in the same order as the CLI does.
pub fn fixture_via_library(dir: &Path, env: &mut dyn Environment) -> (Project, Fixture) {
    write_fixture_files(dir);
    let project = Project::init(dir, "wxr").unwrap();
    let register =
        |project: &Project, id: &str, file: &str, editor: &str, kind, env: &mut dyn Environment| {
            project
                .register_artefact(
                    NewArtefact {
                        id: Some(ArtefactId::new(id)),
                        name: file.into(),
                        path: file.into(),
                        editor: EditorBinding::new(editor, editor, "").unwrap(),
                        kind,
                    },
                    env.now(),
                )
                .unwrap()
                .0
        };
    let project = register(
        &project,
        "proto",
        PROTOTYPE_FILE,
        "pandaannotation",
        ArtefactKind::Prototype,
        env,
    );
    let mut project = register(
        &project,
        "ico",
        DIALOG_FILE,
        "petshop",
        ArtefactKind::DialogModel,
        env,
    );

    let dana = Creator::new("dana", "dana", [Role::Designer]).unwrap();
    let add = |project: &Project,
               body: Body,
               function,
               motivation,
               selector,
               at,
               env: &mut dyn Environment| {
        let now = env.now();
        let a = Annotation::create(
            env.fresh_id(),
            body,
            function,
            dana.clone(),
            motivation,
            Default::default(),
            now,
        )
        .unwrap()
        .attach_target(
            Target::new("proto", VersionRef::Pinned(1), selector).with_presentation(at),
            now,
        )
        .unwrap();
        let id = a.id().clone();
        let placement = SetPlacement {
            set_id: SET.into(),
            username: "dana".into(),
            session: SESSION.into(),
            date: now,
        };
        (project.put_annotation(a, &placement).unwrap(), id)
    };
    let mut descriptive = Vec::new();
    for (i, (widget, text)) in DESCRIPTIVE.iter().enumerate() {
        let (next, id) = add(
            &project,
            Body::text(*text),
            AnnotationFunction::Descriptive,
            Motivation::Describing,
            Selector::element_id(["wxr", widget]),
            descriptive_at(i),
            env,
        );
        project = next;
        descriptive.push(id);
    }
    let (next, todo) = add(
        &project,
        Body::external_file(TODO_LABEL, CRITERIA_FILE),
        AnnotationFunction::Organizational,
        Motivation::Commenting,
        Selector::WholeArtefact,
        todo_at(),
        env,
    );
    project = next;
    for id in &descriptive {
        project = import_into_artefact(
            &project,
            std::slice::from_ref(id),
            &ArtefactId::new("ico"),
            VersionRef::Pinned(1),
            env,
        )
        .unwrap();
    }
    (project, Fixture { descriptive, todo })
}

pub fn copy_dir(from: &Path, to: &Path) {
    fs::create_dir_all(to).unwrap();
    for entry in fs::read_dir(from).unwrap() {
        let entry = entry.unwrap();
        let dest = to.join(entry.file_name());
        if entry.file_type().unwrap().is_dir() {
            copy_dir(&entry.path(), &dest);
        } else {
            fs::copy(entry.path(), dest).unwrap();
        }
    }
}

/// Every regular file under `dir`, relative path to bytes, sorted.
pub fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    fn walk(base: &Path, dir: &Path, out: &mut Vec<(String, Vec<u8>)>) {
        for entry in fs::read_dir(dir).unwrap() {
            let entry = entry.unwrap();
            let path = entry.path();
            if entry.file_type().unwrap().is_dir() {
                walk(base, &path, out);
            } else {
                let rel = path
                    .strip_prefix(base)
                    .unwrap()
                    .to_string_lossy()
                    .replace('\\', "/");
                out.push((rel, fs::read(&path).unwrap()));
            }
        }
    }
    let mut out = Vec::new();
    walk(dir, dir, &mut out);
    out.sort();
    out
}

// ---------------------------------------------------------------------------
// Random projects

const WORDS: &[&str] = &[
    "alert",
    "radar",
    "mode",
    "switch",
    "naïve",
    "quote\"d",
    "back\\slash",
    "tab\there",
    "日本語",
    "line\nbreak",
    "WXON",
    "MODE_SELECTION",
    "focus",
    "  spaced  ",
    "émoji 🚀",
];

fn words(rng: &mut ChaCha8Rng, min: usize, max: usize) -> String {
    let n = rng.gen_range(min..=max);
    (0..n)
        .map(|_| *WORDS.choose(rng).unwrap())
        .collect::<Vec<_>>()
        .join(" ")
}

fn coord(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(-2000.0..2000.0)
}

fn extent(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(0.001..1500.0)
}

fn creators() -> Vec<Creator> {
    vec![
        Creator::new("u1", "Ann", [Role::Designer]).unwrap(),
        Creator::new("u2", "Bob", [Role::Developer, Role::Client]).unwrap(),
        Creator::new("u3", "Cy", [Role::EndUser]).unwrap(),
        Creator::new("u4", "Di", [Role::Custom("ergonomist".into())]).unwrap(),
        Creator::new("u5", "Eve", [Role::Client]).unwrap(),
    ]
}

fn random_selector(rng: &mut ChaCha8Rng) -> Selector {
    match rng.gen_range(0..4) {
        0 => Selector::WholeArtefact,
        1 => {
            let n = rng.gen_range(1..=3);
            let path: Vec<String> = (0..n)
                .map(|_| {
                    ["MODE_SELECTION", "WXON", "btn-ok", "panel 2", "ü"]
                        .choose(rng)
                        .unwrap()
                        .to_string()
                })
                .collect();
            Selector::ElementId { path }
        }
        2 => Selector::Region {
            x: coord(rng),
            y: coord(rng),
            w: extent(rng),
            h: extent(rng),
        },
        _ => Selector::Fragment {
            scheme: ["xpointer", "svg", "t"].choose(rng).unwrap().to_string(),
            expression: ["/doc/p[3]", "#rect1", "10,20"]
                .choose(rng)
                .unwrap()
                .to_string(),
        },
    }
}

fn random_presentation(rng: &mut ChaCha8Rng) -> PresentationProps {
    PresentationProps::new(coord(rng), coord(rng), extent(rng), extent(rng))
}

/// Links: existing project files, files that were never written, and URIs.
fn random_link(rng: &mut ChaCha8Rng) -> String {
    match rng.gen_range(0..5) {
        0 => "art0.bin".into(),
        1 => "docs/criteria.pdf".into(),
        2 => "missing/nowhere.pdf".into(),
        3 => "https://example.org/criteria.pdf".into(),
        _ => "urn:isbn:0451450523".into(),
    }
}

fn random_body(rng: &mut ChaCha8Rng) -> Body {
    match rng.gen_range(0..7) {
        0 => Body::text(format!("note {}", words(rng, 1, 6))),
        1 => {
            let strokes = (0..rng.gen_range(1..=3))
                .map(|_| {
                    (0..rng.gen_range(2..=5))
                        .map(|_| Point {
                            x: coord(rng),
                            y: coord(rng),
                        })
                        .collect()
                })
                .collect();
            Body::Drawing { strokes }
        }
        2 => Body::Image {
            uri: "img/shot.png".into(),
            alt: words(rng, 0, 3),
        },
        3 => {
            let glyph = ["warning", "question", "todo", "check", "cross", "info"]
                .choose(rng)
                .unwrap();
            Body::marker(glyph, words(rng, 0, 2)).unwrap()
        }
        4 => Body::vote(format!("adopt {}?", words(rng, 1, 2))),
        5 => {
            let mut raw = String::from("Given the radar is off\n");
            if rng.gen_bool(0.5) {
                raw.push_str("And the aircraft is on ground\n");
            }
            raw.push_str("When the pilot selects WXON\nThen detection starts");
            scenario_body(words(rng, 1, 3), &raw).unwrap()
        }
        _ => Body::external_file(format!("see {}", words(rng, 1, 2)), random_link(rng)),
    }
}

fn pick<T: Copy>(rng: &mut ChaCha8Rng, all: &[T]) -> T {
    *all.choose(rng).unwrap()
}

fn random_annotation(
    rng: &mut ChaCha8Rng,
    project: &Project,
    env: &mut dyn Environment,
) -> Annotation {
    let pool = creators();
    let now = env.now();
    let audience: BTreeSet<Role> = [Role::Designer, Role::Developer, Role::Client, Role::EndUser]
        .into_iter()
        .filter(|_| rng.gen_bool(0.3))
        .collect();
    let mut a = Annotation::create(
        env.fresh_id(),
        random_body(rng),
        pick(rng, AnnotationFunction::ALL),
        pool.choose(rng).unwrap().clone(),
        pick(rng, Motivation::ALL),
        audience,
        now,
    )
    .unwrap();
    if rng.gen_bool(0.2) {
        a = a.with_purpose(words(rng, 1, 3), now);
    }
    let registry: Vec<_> = project
        .registry()
        .artefacts()
        .iter()
        .filter(|x| x.kind != ArtefactKind::AnnotationSet)
        .collect();
    let wanted = rng.gen_range(1..=3);
    for _ in 0..wanted * 3 {
        if a.targets().len() >= wanted {
            break;
        }
        let artefact = registry.choose(rng).unwrap();
        let version = if rng.gen_bool(0.3) {
            VersionRef::Any
        } else {
            VersionRef::Pinned(artefact.versions.choose(rng).unwrap().version_id)
        };
        let t = Target::new(&artefact.id, version, random_selector(rng))
            .with_presentation(random_presentation(rng));
        if let Ok(next) = a.attach_target(t, now) {
            a = next;
        }
    }
    if matches!(a.body(), Body::Vote { .. }) {
        for _ in 0..rng.gen_range(0..6) {
            let voter = pool.choose(rng).unwrap();
            a = a.cast_vote(voter, pick(rng, Choice::ALL), now).unwrap();
        }
    }
    for _ in 0..rng.gen_range(0..5) {
        if let Ok(next) = a.transition_state(pick(rng, LifecycleState::ALL), now) {
            a = next;
        }
    }
    a
}

/// A valid project: 1-4 artefacts with extra versions and review statuses,
/// 1-3 annotation sets holding random annotations, and occasional replies.
pub fn random_project(rng: &mut ChaCha8Rng, dir: &Path, env: &mut dyn Environment) -> Project {
    fs::create_dir_all(dir.join("docs")).unwrap();
    fs::write(dir.join("docs/criteria.pdf"), b"%PDF criteria").unwrap();
    let mut project = Project::init(dir, &format!("random {}", rng.gen::<u16>())).unwrap();
    let n_artefacts = rng.gen_range(1..=4);
    for i in 0..n_artefacts {
        let file = format!("art{i}.bin");
        let bytes: Vec<u8> = (0..rng.gen_range(1..64)).map(|_| rng.gen()).collect();
        fs::write(dir.join(&file), bytes).unwrap();
        let kind = pick(
            rng,
            &[
                ArtefactKind::TaskModel,
                ArtefactKind::DialogModel,
                ArtefactKind::Prototype,
                ArtefactKind::Document,
            ],
        );
        let editor = ["pandaannotation", "petshop", "hamsters", "docs"]
            .choose(rng)
            .unwrap();
        project = project
            .register_artefact(
                NewArtefact {
                    id: rng.gen_bool(0.7).then(|| ArtefactId::new(format!("a{i}"))),
                    name: format!("Artefact {i}"),
                    path: file.clone().into(),
                    editor: EditorBinding::new(*editor, format!("{editor} editor"), "").unwrap(),
                    kind,
                },
                env.now(),
            )
            .unwrap()
            .0;
    }
    let ids: Vec<ArtefactId> = project
        .registry()
        .artefacts()
        .iter()
        .map(|a| a.id.clone())
        .collect();
    for id in &ids {
        for k in 0..rng.gen_range(0..=2) {
            let file = format!("{id}-v{}.bin", k + 2);
            fs::write(
                dir.join(&file),
                format!("{id} version {} {}", k + 2, rng.gen::<u32>()),
            )
            .unwrap();
            project = project
                .add_version(id, Path::new(&file), env.now())
                .unwrap();
        }
        for _ in 0..rng.gen_range(0..4) {
            let a = project.registry().get(id).unwrap();
            let v = a.versions.choose(rng).unwrap().version_id;
            if let Ok(next) = project.set_version_status(id, v, pick(rng, VersionStatus::ALL)) {
                project = next;
            }
        }
    }

    for s in 0..rng.gen_range(1..=3) {
        let mut set = AnnotationSetFile::new(format!("set-{s}"), "u1", words(rng, 0, 2), env.now());
        for _ in 0..rng.gen_range(1..=5) {
            set.annotations.push(random_annotation(rng, &project, env));
        }
        project = project.persist_annotation_set(set).unwrap();
    }
    for _ in 0..rng.gen_range(0..=2) {
        let all: Vec<AnnotationId> = project.annotations().map(|a| a.id().clone()).collect();
        let source = all.choose(rng).unwrap().clone();
        project = annotate_annotation(
            &project,
            &source,
            Body::text(words(rng, 1, 4)),
            AnnotationFunction::Contributive,
            creators().choose(rng).unwrap().clone(),
            Motivation::Replying,
            env,
        )
        .unwrap()
        .0;
    }
    project
}

/// Applies 1-5 random defects: unregistered artefacts, newer versions,
/// links to files that do not exist, edited or deleted artefact files, and
/// replies whose source annotation was removed.
pub fn inject_defects(
    rng: &mut ChaCha8Rng,
    project: Project,
    env: &mut dyn Environment,
) -> Project {
    let dir = project.root().to_path_buf();
    let mut project = project;
    for _ in 0..rng.gen_range(1..=5) {
        let artefacts: Vec<_> = project.registry().artefacts().to_vec();
        match rng.gen_range(0..6) {
            0 => {
                if let Some(victim) = artefacts.choose(rng) {
                    project = project.remove_artefact(&victim.id).unwrap();
                }
            }
            1 => {
                let Some(a) = artefacts
                    .iter()
                    .filter(|a| a.kind != ArtefactKind::AnnotationSet)
                    .collect::<Vec<_>>()
                    .choose(rng)
                    .copied()
                else {
                    continue;
                };
                let path = if rng.gen_bool(0.5) {
                    a.latest_version().path.clone()
                } else {
                    format!("{}-extra-{}.bin", a.id, rng.gen::<u32>())
                };
                fs::write(dir.join(&path), format!("new content {}", rng.gen::<u64>())).unwrap();
                project = project
                    .add_version(&a.id, Path::new(&path), env.now())
                    .unwrap();
            }
            2 => {
                let Some(host) = artefacts
                    .iter()
                    .filter(|a| a.kind != ArtefactKind::AnnotationSet)
                    .collect::<Vec<_>>()
                    .choose(rng)
                    .copied()
                else {
                    continue;
                };
                let now = env.now();
                let a = Annotation::create(
                    env.fresh_id(),
                    Body::external_file("broken", format!("gone/{}.pdf", rng.gen::<u16>())),
                    AnnotationFunction::Organizational,
                    creators()[0].clone(),
                    Motivation::Commenting,
                    Default::default(),
                    now,
                )
                .unwrap()
                .attach_target(
                    Target::new(&host.id, VersionRef::Any, Selector::WholeArtefact),
                    now,
                )
                .unwrap();
                let placement = SetPlacement {
                    set_id: "defects".into(),
                    username: "u1".into(),
                    session: String::new(),
                    date: now,
                };
                if let Ok(next) = project.put_annotation(a, &placement) {
                    project = next;
                }
            }
            3 => {
                let files: Vec<String> = artefacts
                    .iter()
                    .filter(|a| a.kind != ArtefactKind::AnnotationSet)
                    .flat_map(|a| a.versions.iter().map(|v| v.path.clone()))
                    .collect();
                if let Some(f) = files.choose(rng) {
                    fs::write(dir.join(f), format!("edited {}", rng.gen::<u64>())).unwrap();
                }
            }
            4 => {
                let files: Vec<String> = artefacts
                    .iter()
                    .filter(|a| a.kind != ArtefactKind::AnnotationSet)
                    .flat_map(|a| a.versions.iter().map(|v| v.path.clone()))
                    .collect();
                if let Some(f) = files.choose(rng) {
                    let _ = fs::remove_file(dir.join(f));
                }
            }
            _ => {
                // Drop an annotation that something replies to (or any one).
                let replied: Vec<AnnotationId> = project
                    .annotations()
                    .flat_map(|a| a.targets().iter())
                    .filter_map(|t| match &t.selector {
                        Selector::ElementId { path } => {
                            path.last().map(|s| AnnotationId::new(s.as_str()))
                        }
                        _ => None,
                    })
                    .filter(|id| project.annotation(id).is_some())
                    .collect();
                let victim = match replied.choose(rng) {
                    Some(id) => id.clone(),
                    None => project
                        .annotations()
                        .map(|a| a.id().clone())
                        .collect::<Vec<_>>()
                        .choose(rng)
                        .unwrap()
                        .clone(),
                };
                let mut set = project.set_of(&victim).unwrap().clone();
                if set.annotations.len() < 2 {
                    continue;
                }
                set.annotations.retain(|a| a.id() != &victim);
                // Persisting re-resolves every target; a set that already
                // holds dangling targets cannot be rewritten, which is fine.
                if let Ok(next) = project.persist_annotation_set(set) {
                    project = next;
                }
            }
        }
    }
    project
}

// ---------------------------------------------------------------------------
// Brute-force consistency oracle over the raw repository files

/// (annotation id, target index, finding kind, severity)
pub type OracleFinding = (String, Option<usize>, String, String);

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn is_uri_or_absolute(link: &str) -> bool {
    let bytes = link.as_bytes();
    if link.starts_with('/') || link.starts_with('\\') {
        return true;
    }
    if bytes.len() >= 2 && bytes[0].is_ascii_alphabetic() && bytes[1] == b':' {
        return true;
    }
    match link.find(':') {
        Some(i) if i > 1 => {
            let scheme = &link[..i];
            scheme.as_bytes()[0].is_ascii_alphabetic()
                && scheme
                    .bytes()
                    .all(|b| b.is_ascii_alphanumeric() || b == b'+' || b == b'-' || b == b'.')
        }
        _ => false,
    }
}

pub fn oracle_findings(dir: &Path) -> Vec<OracleFinding> {
    let read = |rel: &str| -> Value {
        serde_json::from_str(&fs::read_to_string(dir.join(rel)).unwrap()).unwrap()
    };
    let index = read("annoglue.index.json");
    let artefacts = index["artefacts"].as_array().unwrap().clone();
    let mut annotations: Vec<Value> = Vec::new();
    for entry in index["annotation_sets"].as_array().unwrap() {
        let set = read(entry["path"].as_str().unwrap());
        annotations.extend(set["annotations"].as_array().unwrap().iter().cloned());
    }
    let all_ids: Vec<String> = annotations
        .iter()
        .map(|a| a["id"].as_str().unwrap().to_string())
        .collect();

    let mut out = Vec::new();
    let mut push = |id: &str, idx: Option<usize>, kind: &str| {
        let severity = if kind == "stale-target" || kind == "digest-mismatch" {
            "warning"
        } else {
            "error"
        };
        out.push((id.to_string(), idx, kind.to_string(), severity.to_string()));
    };
    for a in &annotations {
        let id = a["id"].as_str().unwrap();
        let body = &a["body"];
        if body["kind"] == "external-file" {
            let link = body["link"].as_str().unwrap();
            if !is_uri_or_absolute(link) && !dir.join(link).exists() {
                push(id, None, "broken-external-file");
            }
        }
        for (i, t) in a["targets"].as_array().unwrap().iter().enumerate() {
            let Some(art) = artefacts.iter().find(|x| x["id"] == t["artefact"]) else {
                push(id, Some(i), "dangling-artefact");
                continue;
            };
            let versions = art["versions"].as_array().unwrap();
            let latest = versions
                .iter()
                .map(|v| v["version_id"].as_u64().unwrap())
                .max()
                .unwrap();
            let version = if t["version"] == "any" {
                versions
                    .iter()
                    .find(|v| v["version_id"].as_u64() == Some(latest))
            } else {
                versions.iter().find(|v| v["version_id"] == t["version"])
            };
            let Some(version) = version else {
                push(id, Some(i), "dangling-version");
                continue;
            };
            if version["version_id"].as_u64() != Some(latest) {
                push(id, Some(i), "stale-target");
            }
            if art["kind"] == "annotation-set" {
                if t["selector"]["type"] == "element-id" {
                    let last = t["selector"]["path"]
                        .as_array()
                        .unwrap()
                        .last()
                        .and_then(|v| v.as_str());
                    if !last.is_some_and(|l| all_ids.iter().any(|x| x == l)) {
                        push(id, Some(i), "orphan-annotation-target");
                    }
                }
            } else {
                match fs::read(dir.join(version["path"].as_str().unwrap())) {
                    Ok(bytes)
                        if sha256_hex(&bytes) == version["content_digest"].as_str().unwrap() => {}
                    _ => push(id, Some(i), "digest-mismatch"),
                }
            }
        }
    }
    out.sort();
    out
}

/// The library's report in the oracle's shape, sorted.
pub fn library_findings(project: &Project) -> Vec<OracleFinding> {
    let mut out: Vec<OracleFinding> = annoglue_core::linker::check_consistency(project)
        .into_iter()
        .map(|f| {
            let severity = serde_json::to_value(f.severity)
                .unwrap()
                .as_str()
                .unwrap()
                .to_string();
            (
                f.annotation.to_string(),
                f.target_index,
                f.kind.as_str().to_string(),
                severity,
            )
        })
        .collect();
    out.sort();
    out
}
