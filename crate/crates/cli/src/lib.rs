//! `annoglue` command-line front end.
//!
//! [`run`] is the whole program minus process plumbing: it takes the
//! argument vector, the project directory and an [`Environment`], and
//! returns the exit code with captured stdout/stderr. Exit codes: 0 success,
//! 1 domain error, 2 usage error, 3 I/O or corrupt project.

pub mod selector;

use std::fmt::{Display, Write as _};
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use annoglue_core::env::Environment;
use annoglue_core::graph::{build_graph, export_dot, export_graph_json};
use annoglue_core::linker::{
    annotate_annotation, check_consistency, import_into_artefact, Severity,
};
use annoglue_core::model::{
    scenario_body, Annotation, AnnotationFunction, AnnotationId, Body, Choice, Creator,
    LifecycleState, Motivation, Polyline, PresentationProps, Role, Selector, Target, VersionRef,
};
use annoglue_core::registry::{
    ArtefactId, ArtefactKind, EditorBinding, NewArtefact, RegistryError, VersionStatus,
};
use annoglue_core::repository::canonical::to_canonical_file;
use annoglue_core::repository::lock::ProjectLock;
use annoglue_core::repository::w3c::{export_w3c, export_w3c_value, import_w3c_value};
use annoglue_core::repository::{rebuild_index, write_index, Project, RepoError, SetPlacement};

use selector::{parse_placement, parse_selector_expr};

/// Optional creator catalogue at the project root.
pub const USERS_FILE: &str = "users.json";
/// Role given to undeclared users who do not name a role.
pub const UNDECLARED_ROLE: &str = "unspecified";
/// Set that `import w3c` writes to unless told otherwise.
pub const DEFAULT_IMPORT_SET: &str = "imported";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(String),
    Io(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Domain(m) | CliError::Io(m) => m,
        }
    }
}

impl From<annoglue_core::Error> for CliError {
    fn from(e: annoglue_core::Error) -> Self {
        if e.is_io() {
            CliError::Io(e.to_string())
        } else {
            CliError::Domain(e.to_string())
        }
    }
}

macro_rules! via_core_error {
    ($($t:ty),+) => {
        $(impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::from(annoglue_core::Error::from(e))
            }
        })+
    };
}

via_core_error!(
    RepoError,
    RegistryError,
    annoglue_core::model::ModelError,
    annoglue_core::repository::w3c::W3cError
);

fn keyword<T>(
    all: &'static [T],
) -> impl Fn(&str) -> Result<T, String> + Clone + Send + Sync + 'static
where
    T: FromStr + Display + Copy + Send + Sync + 'static,
{
    move |s: &str| {
        s.parse::<T>().map_err(|_| {
            let known: Vec<String> = all.iter().map(|v| v.to_string()).collect();
            format!("expected one of: {}", known.join(", "))
        })
    }
}

fn version_ref(s: &str) -> Result<VersionRef, String> {
    s.parse()
}

fn selector_arg(s: &str) -> Result<Selector, String> {
    parse_selector_expr(s).map_err(|e| e.to_string())
}

fn placement_arg(s: &str) -> Result<PresentationProps, String> {
    parse_placement(s).map_err(|e| e.to_string())
}

#[derive(Debug, Parser)]
#[command(
    name = "annoglue",
    version,
    about = "Annotate and cross-reference design artefacts"
)]
struct Cli {
    /// Acting user, as `<role>:<user>` or `<user>`.
    #[arg(long = "as", global = true, value_name = "ROLE:USER")]
    as_user: Option<String>,

    /// Reject users that are not declared in users.json.
    #[arg(long, global = true)]
    strict_users: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Create a project in the project directory.
    Init { name: String },
    #[command(subcommand)]
    Artefact(ArtefactCmd),
    /// Create an annotation on an artefact; prints its id.
    Annotate(AnnotateArgs),
    /// Create an annotation on another annotation; prints its id.
    Reply(ReplyArgs),
    #[command(subcommand)]
    Target(TargetCmd),
    /// Cast or replace the acting user's ballot.
    Vote {
        annotation: String,
        #[arg(value_parser = keyword(Choice::ALL))]
        choice: Choice,
    },
    /// Move an annotation through its lifecycle.
    Status {
        annotation: String,
        #[arg(value_parser = keyword(LifecycleState::ALL))]
        state: LifecycleState,
    },
    /// List annotations, oldest first.
    List(ListArgs),
    /// Report referential and file-level problems.
    Check {
        #[arg(long)]
        json: bool,
        /// Exit 1 if any error-level finding is reported.
        #[arg(long)]
        strict: bool,
    },
    /// Export the annotation graph.
    Graph {
        #[arg(long, value_enum, default_value_t = GraphFormat::Dot)]
        format: GraphFormat,
        #[arg(long)]
        include_disposed: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    #[command(subcommand)]
    Export(ExportCmd),
    #[command(subcommand)]
    Import(ImportCmd),
    /// Rebuild the index's set catalogue from the annotations directory.
    Reindex {
        /// Write the rebuilt index instead of only reporting.
        #[arg(long)]
        write: bool,
    },
}

#[derive(Debug, Subcommand)]
enum ArtefactCmd {
    /// Register a file (path relative to the project directory).
    Add {
        path: PathBuf,
        #[arg(long)]
        editor: String,
        #[arg(long, value_parser = keyword(ArtefactKind::ALL))]
        kind: ArtefactKind,
        #[arg(long)]
        name: String,
        /// Defaults to a slug of the name.
        #[arg(long)]
        id: Option<String>,
    },
    /// Record a new version from a file.
    Version {
        artefact: String,
        path: PathBuf,
    },
    /// Change a version's review status.
    Status {
        artefact: String,
        version: u32,
        #[arg(value_parser = keyword(VersionStatus::ALL))]
        status: VersionStatus,
    },
    /// Unregister an artefact; its annotations are kept.
    Remove {
        artefact: String,
    },
    List,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BodyType {
    Text,
    Drawing,
    Marker,
    Vote,
    Scenario,
    File,
}

#[derive(Debug, Args)]
struct BodyArgs {
    #[arg(long = "type", value_enum)]
    body_type: BodyType,
    /// Body text; `@path` reads it from a file. Markers take `glyph[:label]`,
    /// files take `label|link`, drawings a JSON list of polylines.
    #[arg(long, allow_hyphen_values = true)]
    body: String,
    /// Scenario title.
    #[arg(long)]
    title: Option<String>,
    #[arg(long, value_parser = keyword(AnnotationFunction::ALL))]
    function: AnnotationFunction,
    #[arg(long, value_parser = keyword(Motivation::ALL))]
    motivation: Motivation,
}

#[derive(Debug, Args)]
struct AnnotateArgs {
    artefact: String,
    #[command(flatten)]
    body: BodyArgs,
    #[arg(long, allow_hyphen_values = true, value_parser = placement_arg)]
    at: Option<PresentationProps>,
    /// Version number or `any`; defaults to the latest version.
    #[arg(long, value_parser = version_ref)]
    version: Option<VersionRef>,
    #[arg(long, value_parser = selector_arg)]
    selector: Option<Selector>,
    /// Annotation set to store into; defaults to the artefact id.
    #[arg(long)]
    set: Option<String>,
    /// Session label recorded on a newly created set.
    #[arg(long, default_value = "")]
    session: String,
}

#[derive(Debug, Args)]
struct ReplyArgs {
    annotation: String,
    #[command(flatten)]
    body: BodyArgs,
}

#[derive(Debug, Subcommand)]
enum TargetCmd {
    /// Anchor an annotation on a further artefact, copying its placement.
    Add {
        annotation: String,
        artefact: String,
        #[arg(long, value_parser = version_ref)]
        version: Option<VersionRef>,
    },
    /// Reposition one target.
    Move {
        annotation: String,
        index: usize,
        #[arg(long, allow_hyphen_values = true, value_parser = placement_arg)]
        at: PresentationProps,
    },
    Remove {
        annotation: String,
        index: usize,
    },
}

#[derive(Debug, Args)]
struct ListArgs {
    #[arg(long)]
    artefact: Option<String>,
    #[arg(long, value_parser = keyword(LifecycleState::ALL))]
    state: Option<LifecycleState>,
    #[arg(long, value_parser = keyword(AnnotationFunction::ALL))]
    function: Option<AnnotationFunction>,
    #[arg(long)]
    creator: Option<String>,
    #[arg(long)]
    grep: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GraphFormat {
    Dot,
    Json,
}

#[derive(Debug, Subcommand)]
enum ExportCmd {
    /// Web Annotation JSON-LD for one annotation, or an array for `--all`.
    W3c {
        #[arg(required_unless_present = "all", conflicts_with = "all")]
        annotation: Option<String>,
        #[arg(long)]
        all: bool,
    },
}

#[derive(Debug, Subcommand)]
enum ImportCmd {
    /// Import a JSON-LD annotation (or an array of them).
    W3c {
        file: PathBuf,
        #[arg(long, default_value = DEFAULT_IMPORT_SET)]
        set: String,
    },
}

impl Command {
    fn mutates(&self) -> bool {
        match self {
            Command::Init { .. } => false,
            Command::Artefact(ArtefactCmd::List) => false,
            Command::Artefact(_)
            | Command::Annotate(_)
            | Command::Reply(_)
            | Command::Target(_)
            | Command::Vote { .. }
            | Command::Status { .. }
            | Command::Import(_) => true,
            Command::Reindex { write } => *write,
            Command::List(_)
            | Command::Check { .. }
            | Command::Graph { .. }
            | Command::Export(_) => false,
        }
    }
}

struct Ctx<'a> {
    dir: &'a Path,
    env: &'a mut dyn Environment,
    as_user: Option<String>,
    strict_users: bool,
    out: String,
    err: String,
    code: i32,
}

/// Runs one invocation. `argv[0]` is the program name.
pub fn run<I, S>(argv: I, project_dir: &Path, env: &mut dyn Environment) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Outcome {
                        code: 0,
                        stdout: text,
                        stderr: String::new(),
                    }
                }
                _ => Outcome {
                    code: 2,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    let mut ctx = Ctx {
        dir: project_dir,
        env,
        as_user: cli.as_user,
        strict_users: cli.strict_users,
        out: String::new(),
        err: String::new(),
        code: 0,
    };
    let result = dispatch(&mut ctx, cli.command);
    let mut outcome = Outcome {
        code: ctx.code,
        stdout: ctx.out,
        stderr: ctx.err,
    };
    if let Err(e) = result {
        outcome.code = e.code();
        let _ = writeln!(outcome.stderr, "error: {}", e.message());
    }
    outcome
}

fn dispatch(ctx: &mut Ctx<'_>, command: Command) -> Result<(), CliError> {
    let _lock = if command.mutates() {
        let acquired =
            ProjectLock::acquire(ctx.dir, ProjectLock::DEFAULT_STALE_AFTER).map_err(|e| {
                if matches!(e, RepoError::IoFailure { .. })
                    && !ctx.dir.join(annoglue_core::repository::INDEX_FILE).exists()
                {
                    CliError::from(RepoError::NotAProject(ctx.dir.to_path_buf()))
                } else {
                    CliError::from(e)
                }
            })?;
        if let Some(w) = acquired.warning {
            let _ = writeln!(ctx.err, "warning: {w}");
        }
        Some(acquired.lock)
    } else {
        None
    };

    match command {
        Command::Init { name } => {
            fs::create_dir_all(ctx.dir)
                .map_err(|e| CliError::Io(format!("{}: {e}", ctx.dir.display())))?;
            Project::init(ctx.dir, &name)?;
            let _ = writeln!(
                ctx.out,
                "initialized project {name:?} in {}",
                ctx.dir.display()
            );
            Ok(())
        }
        Command::Artefact(cmd) => artefact(ctx, cmd),
        Command::Annotate(args) => annotate(ctx, args),
        Command::Reply(args) => reply(ctx, args),
        Command::Target(cmd) => target(ctx, cmd),
        Command::Vote { annotation, choice } => {
            let creator = creator(ctx)?;
            let id = AnnotationId::new(annotation);
            let now = ctx.env.now();
            let project =
                load(ctx)?.update_annotation(&id, |a| a.cast_vote(&creator, choice, now))?;
            let tally = project
                .annotation(&id)
                .expect("just updated")
                .tally_votes()?;
            let _ = writeln!(
                ctx.out,
                "{id}: {} agree / {} disagree",
                tally.agree, tally.disagree
            );
            Ok(())
        }
        Command::Status { annotation, state } => {
            let id = AnnotationId::new(annotation);
            let now = ctx.env.now();
            load(ctx)?.update_annotation(&id, |a| a.transition_state(state, now))?;
            let _ = writeln!(ctx.out, "{id}: {state}");
            Ok(())
        }
        Command::List(args) => list(ctx, args),
        Command::Check { json, strict } => {
            let findings = check_consistency(&load(ctx)?);
            if json {
                ctx.out
                    .push_str(&to_canonical_file(&findings).expect("findings serialize"));
            } else {
                for f in &findings {
                    let _ = writeln!(ctx.out, "{f}");
                }
            }
            if strict && findings.iter().any(|f| f.severity == Severity::Error) {
                ctx.code = 1;
            }
            Ok(())
        }
        Command::Graph {
            format,
            include_disposed,
            out,
        } => {
            let graph = build_graph(&load(ctx)?, include_disposed);
            let text = match format {
                GraphFormat::Dot => export_dot(&graph),
                GraphFormat::Json => export_graph_json(&graph) + "\n",
            };
            match out {
                Some(path) => fs::write(&path, text)
                    .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
                None => ctx.out.push_str(&text),
            }
            Ok(())
        }
        Command::Export(ExportCmd::W3c { annotation, all }) => {
            let project = load(ctx)?;
            if all {
                let docs = project
                    .annotations()
                    .map(|a| export_w3c_value(a, &project))
                    .collect::<Result<Vec<_>, _>>()?;
                ctx.out
                    .push_str(&to_canonical_file(&docs).expect("documents serialize"));
            } else {
                let id = AnnotationId::new(annotation.expect("clap requires an id without --all"));
                let a = project
                    .annotation(&id)
                    .ok_or(RepoError::UnknownAnnotation(id))?;
                ctx.out.push_str(&export_w3c(a, &project)?);
            }
            Ok(())
        }
        Command::Import(ImportCmd::W3c { file, set }) => import(ctx, &file, &set),
        Command::Reindex { write } => {
            let (index, findings) = rebuild_index(ctx.dir)?;
            for f in &findings {
                let _ = writeln!(ctx.out, "{f}");
            }
            if write {
                write_index(ctx.dir, &index)?;
            }
            Ok(())
        }
    }
}

fn load(ctx: &Ctx<'_>) -> Result<Project, CliError> {
    Ok(Project::load(ctx.dir)?)
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// `@path` reads the value from a file.
fn arg_value(raw: &str) -> Result<String, CliError> {
    match raw.strip_prefix('@') {
        Some(path) => read_file(Path::new(path)),
        None => Ok(raw.to_string()),
    }
}

fn build_body(args: &BodyArgs) -> Result<Body, CliError> {
    let raw = arg_value(&args.body)?;
    let body = match args.body_type {
        BodyType::Text => Body::text(raw),
        BodyType::Vote => Body::vote(raw),
        BodyType::Drawing => {
            let strokes: Vec<Polyline> = serde_json::from_str(&raw).map_err(|e| {
                CliError::Usage(format!("drawing body is not a JSON list of polylines: {e}"))
            })?;
            Body::Drawing { strokes }
        }
        BodyType::Marker => {
            let (glyph, label) = raw.split_once(':').unwrap_or((raw.as_str(), ""));
            Body::marker(glyph, label)?
        }
        BodyType::Scenario => scenario_body(
            args.title.clone().unwrap_or_else(|| "scenario".into()),
            &raw,
        )?,
        BodyType::File => {
            let (label, link) = raw.split_once('|').unwrap_or((raw.as_str(), raw.as_str()));
            Body::external_file(label, link)
        }
    };
    body.check()?;
    Ok(body)
}

fn read_users(dir: &Path) -> Result<Vec<Creator>, CliError> {
    let path = dir.join(USERS_FILE);
    if !path.exists() {
        return Ok(Vec::new());
    }
    let text = read_file(&path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Resolves `--as`: declared users come from users.json; undeclared ones are
/// accepted (unless `--strict-users`) with the role they name, or a custom
/// placeholder role.
fn creator(ctx: &Ctx<'_>) -> Result<Creator, CliError> {
    let raw = ctx
        .as_user
        .as_deref()
        .ok_or_else(|| CliError::Usage("this command needs --as <role>:<user>".into()))?;
    let (role, user) = match raw.split_once(':') {
        Some((role, user)) => (Some(role), user),
        None => (None, raw),
    };
    if user.trim().is_empty() {
        return Err(CliError::Usage(format!("--as {raw:?}: empty user")));
    }
    let role = role.map(Role::parse).transpose()?;
    let users = read_users(ctx.dir)?;
    if let Some(declared) = users.into_iter().find(|c| c.user_id == user) {
        if let Some(role) = role {
            if !declared.roles.contains(&role) {
                return Err(CliError::Domain(format!(
                    "user {user:?} is not declared with role {:?}",
                    role.as_str()
                )));
            }
        }
        return Ok(declared);
    }
    if ctx.strict_users {
        return Err(CliError::Domain(format!(
            "user {user:?} is not declared in {USERS_FILE}"
        )));
    }
    let role = role.unwrap_or_else(|| Role::Custom(UNDECLARED_ROLE.into()));
    Ok(Creator::new(user, user, [role])?)
}

fn latest_pin(project: &Project, artefact: &ArtefactId) -> Result<VersionRef, CliError> {
    let a = project
        .registry()
        .get(artefact)
        .ok_or_else(|| RegistryError::UnknownArtefact(artefact.to_string()))?;
    Ok(VersionRef::Pinned(a.latest_version().version_id))
}

fn artefact(ctx: &mut Ctx<'_>, cmd: ArtefactCmd) -> Result<(), CliError> {
    let project = load(ctx)?;
    match cmd {
        ArtefactCmd::Add {
            path,
            editor,
            kind,
            name,
            id,
        } => {
            let editor = EditorBinding::new(editor.clone(), editor, "")?;
            let now = ctx.env.now();
            let (_, id) = project.register_artefact(
                NewArtefact {
                    id: id.map(ArtefactId::new),
                    name,
                    path,
                    editor,
                    kind,
                },
                now,
            )?;
            let _ = writeln!(ctx.out, "{id}");
        }
        ArtefactCmd::Version { artefact, path } => {
            let id = ArtefactId::new(artefact);
            let now = ctx.env.now();
            let project = project.add_version(&id, &path, now)?;
            let v = project
                .registry()
                .get(&id)
                .expect("just updated")
                .latest_version();
            let _ = writeln!(ctx.out, "{id} v{}", v.version_id);
        }
        ArtefactCmd::Status {
            artefact,
            version,
            status,
        } => {
            let id = ArtefactId::new(artefact);
            project.set_version_status(&id, version, status)?;
            let _ = writeln!(ctx.out, "{id} v{version}: {status}");
        }
        ArtefactCmd::Remove { artefact } => {
            let id = ArtefactId::new(artefact);
            project.remove_artefact(&id)?;
            let _ = writeln!(ctx.out, "removed {id}");
        }
        ArtefactCmd::List => {
            for a in project.registry().artefacts() {
                let v = a.latest_version();
                let _ = writeln!(
                    ctx.out,
                    "{}\t{}\tv{}\t{}\t{}\t{}",
                    a.id, a.kind, v.version_id, v.status, v.path, a.name
                );
            }
        }
    }
    Ok(())
}

fn annotate(ctx: &mut Ctx<'_>, args: AnnotateArgs) -> Result<(), CliError> {
    let project = load(ctx)?;
    let creator = creator(ctx)?;
    let body = build_body(&args.body)?;
    let artefact = ArtefactId::new(args.artefact);
    let version = match args.version {
        Some(v) => v,
        None => latest_pin(&project, &artefact)?,
    };
    let now = ctx.env.now();
    let user = creator.user_id.clone();
    let annotation = Annotation::create(
        ctx.env.fresh_id(),
        body,
        args.body.function,
        creator,
        args.body.motivation,
        Default::default(),
        now,
    )?;
    let id = annotation.id().clone();
    if let Some(holder) = project.set_of(&id) {
        return Err(RepoError::DuplicateAnnotation {
            annotation: id,
            set_id: holder.set_id.clone(),
        }
        .into());
    }
    let target = Target::new(
        artefact.clone(),
        version,
        args.selector.unwrap_or(Selector::WholeArtefact),
    )
    .with_presentation(args.at.unwrap_or(PresentationProps::DEFAULT));
    let annotation = annotation.attach_target(target, now)?;
    let placement = SetPlacement {
        set_id: args.set.unwrap_or_else(|| artefact.to_string()),
        username: user,
        session: args.session,
        date: now,
    };
    project.put_annotation(annotation, &placement)?;
    let _ = writeln!(ctx.out, "{id}");
    Ok(())
}

fn reply(ctx: &mut Ctx<'_>, args: ReplyArgs) -> Result<(), CliError> {
    let project = load(ctx)?;
    let creator = creator(ctx)?;
    let body = build_body(&args.body)?;
    let (_, id) = annotate_annotation(
        &project,
        &AnnotationId::new(args.annotation),
        body,
        args.body.function,
        creator,
        args.body.motivation,
        ctx.env,
    )?;
    let _ = writeln!(ctx.out, "{id}");
    Ok(())
}

fn target(ctx: &mut Ctx<'_>, cmd: TargetCmd) -> Result<(), CliError> {
    let project = load(ctx)?;
    let (id, project) = match cmd {
        TargetCmd::Add {
            annotation,
            artefact,
            version,
        } => {
            let id = AnnotationId::new(annotation);
            let artefact = ArtefactId::new(artefact);
            let version = match version {
                Some(v) => v,
                None => latest_pin(&project, &artefact)?,
            };
            let next = import_into_artefact(
                &project,
                std::slice::from_ref(&id),
                &artefact,
                version,
                ctx.env,
            )?;
            (id, next)
        }
        TargetCmd::Move {
            annotation,
            index,
            at,
        } => {
            let id = AnnotationId::new(annotation);
            let now = ctx.env.now();
            let next =
                project.update_annotation(&id, |a| a.set_target_presentation(index, at, now))?;
            (id, next)
        }
        TargetCmd::Remove { annotation, index } => {
            let id = AnnotationId::new(annotation);
            let now = ctx.env.now();
            let next = project.update_annotation(&id, |a| a.detach_target(index, now))?;
            (id, next)
        }
    };
    let a = project.annotation(&id).expect("just updated");
    for (i, t) in a.targets().iter().enumerate() {
        let p = t.presentation;
        let _ = writeln!(
            ctx.out,
            "{id}[{i}] {}@{} {} at {},{},{},{}",
            t.artefact, t.version, t.selector, p.x, p.y, p.width, p.height
        );
    }
    Ok(())
}

fn list(ctx: &mut Ctx<'_>, args: ListArgs) -> Result<(), CliError> {
    let project = load(ctx)?;
    let artefact = args.artefact.map(ArtefactId::new);
    let mut rows: Vec<&Annotation> = project
        .annotations()
        .filter(|a| {
            artefact
                .as_ref()
                .is_none_or(|id| a.targets().iter().any(|t| &t.artefact == id))
        })
        .filter(|a| args.state.is_none_or(|s| a.state() == s))
        .filter(|a| args.function.is_none_or(|f| a.function() == f))
        .filter(|a| {
            args.creator
                .as_ref()
                .is_none_or(|u| &a.creator().user_id == u)
        })
        .filter(|a| {
            args.grep
                .as_ref()
                .is_none_or(|g| a.body().textual().contains(g.as_str()))
        })
        .collect();
    rows.sort_by(|a, b| (a.metadata().created_at, a.id()).cmp(&(b.metadata().created_at, b.id())));
    for a in rows {
        let _ = writeln!(
            ctx.out,
            "{}\t{}\t{}\t{}\t{}",
            a.id(),
            a.state(),
            a.function(),
            a.creator().user_id,
            a.body().summary(60)
        );
    }
    Ok(())
}

fn import(ctx: &mut Ctx<'_>, file: &Path, set_id: &str) -> Result<(), CliError> {
    let text = read_file(file)?;
    let doc: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Domain(format!("{}: not JSON: {e}", file.display())))?;
    let docs = match doc {
        serde_json::Value::Array(items) => items,
        single => vec![single],
    };
    let mut project = load(ctx)?;
    let mut imported = Vec::new();
    for doc in &docs {
        let result = import_w3c_value(doc, &project, ctx.env)?;
        for w in &result.warnings {
            let _ = writeln!(ctx.err, "warning: {}: {w}", result.annotation.id());
        }
        let id = result.annotation.id().clone();
        if let Some(holder) = project.set_of(&id) {
            return Err(RepoError::DuplicateAnnotation {
                annotation: id,
                set_id: holder.set_id.clone(),
            }
            .into());
        }
        let placement = SetPlacement {
            set_id: set_id.to_string(),
            username: result.annotation.creator().user_id.clone(),
            session: String::new(),
            date: result.annotation.metadata().created_at,
        };
        project = project.put_annotation(result.annotation, &placement)?;
        imported.push(id);
    }
    for id in imported {
        let _ = writeln!(ctx.out, "{id}");
    }
    Ok(())
}
