#![allow(dead_code)]

use std::fs;
use std::path::Path;

use annoglue_core::env::{Environment, SequentialEnvironment};
use annoglue_core::model::{
    Annotation, AnnotationFunction, AnnotationId, Body, Creator, Motivation, PresentationProps,
    Role, Selector, Target, VersionRef,
};
use annoglue_core::registry::{ArtefactId, ArtefactKind, EditorBinding, NewArtefact};
use annoglue_core::repository::{AnnotationSetFile, Project};

pub const PROTOTYPE_FILE: &str = "WXR - V0.prstn";
pub const DIALOG_FILE: &str = "MPIA_WXR.xml";
pub const CRITERIA_FILE: &str = "criteria.pdf";

pub const DESCRIPTIVE: [(&str, &str); 5] = [
    ("OFF", "OFF = Switch OFF"),
    ("STDY", "STDY = Switch for test only"),
    ("TST", "TST = trigger for hardware checkup"),
    ("WxON", "WxON = activate radar detection"),
    ("WXA", "WXA = Focus detection on alert"),
];

pub fn env() -> SequentialEnvironment {
    SequentialEnvironment::new(1_760_000_000, 1, "ann")
}

pub fn designer() -> Creator {
    Creator::new("dana", "Dana", [Role::Designer]).unwrap()
}

pub fn proto() -> ArtefactId {
    ArtefactId::new("proto")
}

pub fn ico() -> ArtefactId {
    ArtefactId::new("ico")
}

/// Weather-radar case study: a prototype and a dialog model, five
/// descriptive notes on prototype widgets and one organizational reminder
/// pointing at an external document. Nothing is imported onto the dialog
/// model yet.
pub fn fixture(dir: &Path, env: &mut dyn Environment) -> (Project, Vec<AnnotationId>) {
    fs::write(dir.join(PROTOTYPE_FILE), "<presentation name=\"WXR\"/>\n").unwrap();
    fs::write(dir.join(DIALOG_FILE), "<ico name=\"MPIA_WXR\"/>\n").unwrap();
    fs::write(dir.join(CRITERIA_FILE), "%PDF-1.4 ergonomic criteria\n").unwrap();

    let project = Project::init(dir, "wxr").unwrap();
    let (project, _) = project
        .register_artefact(
            NewArtefact {
                id: Some(proto()),
                name: PROTOTYPE_FILE.into(),
                path: PROTOTYPE_FILE.into(),
                editor: EditorBinding::new("pandaannotation", "Prototype editor", "").unwrap(),
                kind: ArtefactKind::Prototype,
            },
            env.now(),
        )
        .unwrap();
    let (project, _) = project
        .register_artefact(
            NewArtefact {
                id: Some(ico()),
                name: DIALOG_FILE.into(),
                path: DIALOG_FILE.into(),
                editor: EditorBinding::new("petshop", "ICO editor", "").unwrap(),
                kind: ArtefactKind::DialogModel,
            },
            env.now(),
        )
        .unwrap();

    let mut set = AnnotationSetFile::new("session-1", "dana", "case study", env.now());
    let mut ids = Vec::new();
    for (i, (widget, text)) in DESCRIPTIVE.iter().enumerate() {
        let now = env.now();
        let a = Annotation::create(
            env.fresh_id(),
            Body::text(*text),
            AnnotationFunction::Descriptive,
            designer(),
            Motivation::Describing,
            Default::default(),
            now,
        )
        .unwrap()
        .attach_target(
            Target::new(
                proto(),
                VersionRef::Pinned(1),
                Selector::element_id(["wxr", widget]),
            )
            .with_presentation(PresentationProps::new(
                20.0 + 180.0 * i as f64,
                300.0,
                160.0,
                40.0,
            )),
            now,
        )
        .unwrap();
        ids.push(a.id().clone());
        set.annotations.push(a);
    }
    let now = env.now();
    let todo = Annotation::create(
        env.fresh_id(),
        Body::external_file("TODO: Ergonomic inspection reference", CRITERIA_FILE),
        AnnotationFunction::Organizational,
        designer(),
        Motivation::Commenting,
        Default::default(),
        now,
    )
    .unwrap()
    .attach_target(
        Target::new(proto(), VersionRef::Pinned(1), Selector::WholeArtefact)
            .with_presentation(PresentationProps::new(20.0, 20.0, 240.0, 40.0)),
        now,
    )
    .unwrap();
    ids.push(todo.id().clone());
    set.annotations.push(todo);
    (project.persist_annotation_set(set).unwrap(), ids)
}
