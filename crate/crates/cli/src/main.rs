use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;

use accessarc::access::{access_arc, AccessError, AccessScene, Budget, StageState};
use accessarc::adversary::{run, square, AdversaryRun, TaggedWitness};
use accessarc::geometry::Disk;
use accessarc::linker::{link, LinkError, LinkScene};
use accessarc::report::{access_report, adversary_report, link_report, to_json, FailureReport};
use accessarc::scene::{Scene, SceneFile, VERSION};
use accessarc::{Poly, Rational, Scalar};

mod svg;
use svg::Svg;

#[derive(Parser)]
#[command(name = "accessarc", version, about = "Accessing arcs, links and stage adversaries in exact arithmetic")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute terms of an accessing arc name
    Access(RunArgs),
    /// Compute terms of a link between two boundary points
    Link(RunArgs),
    /// Run the adversary stage construction
    Adversary(AdversaryArgs),
    /// Parse and check a scene file
    Validate { scene: PathBuf },
}

#[derive(Args)]
struct RunArgs {
    scene: PathBuf,
    /// Largest stage index the construction may reach
    #[arg(long)]
    stages: Option<usize>,
    /// Largest name index and dyadic exponent any search may use
    #[arg(long)]
    max_precision: Option<u32>,
    /// Number of terms to emit
    #[arg(long, default_value_t = 4)]
    emit: u32,
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Output JSON path; stdout when absent
    #[arg(long)]
    json: Option<PathBuf>,
    /// Reserved; all algorithms are deterministic
    #[arg(long)]
    seed: Option<u64>,
    /// Leave timestamps out of SVG output
    #[arg(long)]
    reproducible: bool,
}

#[derive(Args)]
struct AdversaryArgs {
    scene: PathBuf,
    #[arg(long, default_value_t = 4)]
    stages: u32,
    /// Directory for one SVG frame per stage
    #[arg(long)]
    frames: Option<PathBuf>,
    #[arg(long)]
    json: Option<PathBuf>,
    /// Resolution index of the emitted plot
    #[arg(long, default_value_t = 5)]
    plot_n: u32,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    reproducible: bool,
}

/// A failed command: exit code and message.
struct Fail(u8, String);

type Outcome = Result<(), Fail>;

fn input(msg: impl std::fmt::Display) -> Fail {
    Fail(1, msg.to_string())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("ACCESS_ARC_LOG", "warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Access(a) => cmd_access(&a),
        Cmd::Link(a) => cmd_link(&a),
        Cmd::Adversary(a) => cmd_adversary(&a),
        Cmd::Validate { scene } => cmd_validate(&scene),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

fn load(path: &Path) -> Result<Scene, Fail> {
    let text = fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    let file = SceneFile::parse(&text).map_err(|e| input(format!("{}: {e}", path.display())))?;
    file.build().map_err(|e| input(format!("{}: {e}", path.display())))
}

fn emit(path: Option<&Path>, text: &str) -> Outcome {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn budget(a: &RunArgs) -> Budget {
    let mut b = Budget::default();
    if let Some(m) = a.max_precision {
        b.max_precision = m;
    }
    if let Some(s) = a.stages {
        b.max_stages = s;
    }
    b
}

fn cmd_validate(path: &Path) -> Outcome {
    let kind = match load(path)? {
        Scene::Access(_) => "access",
        Scene::Link(_) => "link",
        Scene::Adversary(_) => "adversary",
    };
    println!("ok: {kind} scene ({VERSION})");
    Ok(())
}

fn access_failure(err: &AccessError, partial: &StageState, sc: &AccessScene, json: Option<&Path>) -> Fail {
    match err {
        AccessError::StageTimeout { stage, n, .. } => {
            let rep = FailureReport::access(err, partial, &sc.g);
            if let Err(f) = emit(json, &to_json(&rep)) {
                return f;
            }
            Fail(2, format!("budget exhausted: stage {stage} stalled at precision {n}"))
        }
        AccessError::Precondition(_) => input(err),
        _ => Fail(2, err.to_string()),
    }
}

fn cmd_access(a: &RunArgs) -> Outcome {
    let Scene::Access(sc) = load(&a.scene)? else {
        return Err(input("not an access scene"));
    };
    let arc = access_arc(sc.clone(), 0, budget(a))
        .map_err(|e| access_failure(&e, &StageState::default(), &sc, a.json.as_deref()))?;
    let rep = access_report(&arc, a.emit).map_err(|e| access_failure(&e, &arc.state(), &sc, a.json.as_deref()))?;
    info!("stages: s = {:?}", arc.state().s);
    emit(a.json.as_deref(), &to_json(&rep))?;
    if let Some(p) = &a.svg {
        let mut s = Svg::new(a.reproducible);
        s.group("domain");
        s.disk(&sc.domain, "fill=\"#eef3fb\" stroke=\"#8aa\"");
        s.end_group();
        s.group("arc");
        let arc_poly = sc.arc.approx(12).map_err(|e| Fail(2, e.to_string()))?;
        s.poly(&arc_poly, "stroke=\"#b22\"");
        s.end_group();
        s.group("terms");
        for m in 0..a.emit {
            s.poly(&arc.term(m).map_err(|e| Fail(2, e.to_string()))?, "stroke=\"#226\" opacity=\"0.5\"");
        }
        s.end_group();
        s.point(&sc.z0, "fill=\"#060\"");
        if let Some(z) = sc.zeta0.exact_point() {
            s.point(z, "fill=\"#b22\"");
        }
        fs::write(p, s.finish()).map_err(|e| input(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

fn link_failure(err: LinkError, sc: &LinkScene, json: Option<&Path>) -> Fail {
    match &err {
        LinkError::Access(j, inner @ AccessError::StageTimeout { stage, n, state }) => {
            let rep = FailureReport {
                kind: "link",
                error: err.to_string(),
                ..FailureReport::access(inner, state, &sc.g[*j])
            };
            if let Err(f) = emit(json, &to_json(&rep)) {
                return f;
            }
            Fail(2, format!("budget exhausted: endpoint {j}, stage {stage} stalled at precision {n}"))
        }
        LinkError::Cross(_) | LinkError::Access(..) | LinkError::XiNotFound(_) => Fail(2, err.to_string()),
        _ => input(err),
    }
}

fn cmd_link(a: &RunArgs) -> Outcome {
    let Scene::Link(sc) = load(&a.scene)? else {
        return Err(input("not a link scene"));
    };
    let b = budget(a);
    let l = link(&sc, 0, b).map_err(|e| link_failure(e, &sc, a.json.as_deref()))?;
    let rep = link_report(&sc, &l, a.emit, b.max_precision).map_err(|e| link_failure(e, &sc, a.json.as_deref()))?;
    emit(a.json.as_deref(), &to_json(&rep))?;
    if let Some(p) = &a.svg {
        fs::write(p, link_svg(&sc, &l, a).map_err(|e| Fail(2, e.to_string()))?)
            .map_err(|e| input(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

fn link_svg(sc: &LinkScene, l: &accessarc::linker::Link, a: &RunArgs) -> Result<String, LinkError> {
    let mut s = Svg::new(a.reproducible);
    s.group("domain");
    for d in &sc.d.balls {
        s.disk(d, "fill=\"#eef3fb\" stroke=\"#8aa\"");
    }
    s.end_group();
    s.group("access-balls");
    for j in 0..2 {
        let (z, _) = accessarc::access::approx_point(&sc.zeta[j], 20)?;
        s.disk(&Disk { center: z, radius: l.r.clone() }, "fill=\"none\" stroke=\"#aa6\" stroke-dasharray=\"0.02\"");
    }
    s.end_group();
    s.group("boundary");
    for b in &sc.b {
        s.poly(&*b.approx(12)?, "stroke=\"#b22\"");
    }
    s.end_group();
    s.group("terms");
    for m in 0..a.emit {
        s.poly(&l.term(m)?.curve, "stroke=\"#226\" opacity=\"0.5\"");
    }
    s.end_group();
    Ok(s.finish())
}

fn cmd_adversary(a: &AdversaryArgs) -> Outcome {
    let Scene::Adversary(ws) = load(&a.scene)? else {
        return Err(input("not an adversary scene"));
    };
    let r = run(&ws, a.stages).map_err(|e| Fail(2, e.to_string()))?;
    for l in &r.log {
        match &l.act {
            Some(act) => {
                let deltas: Vec<String> = act.checks.iter().map(|c| format!("{:+} at 2^-{}", c.after as i64 - c.before as i64, c.m)).collect();
                println!(
                    "stage {}: R_{} acts, k = {}, delta = 2^-{}, components {}",
                    l.stage,
                    act.e,
                    act.k,
                    act.delta_exp,
                    deltas.join(", ")
                );
            }
            None => println!("stage {}: quiescent", l.stage),
        }
    }
    let rep = adversary_report(&r, a.plot_n).map_err(|e| Fail(2, e.to_string()))?;
    let text = to_json(&rep);
    match &a.json {
        Some(p) => fs::write(p, text).map_err(|e| input(format!("{}: {e}", p.display())))?,
        None if a.frames.is_none() => print!("{text}"),
        None => {}
    }
    if let Some(dir) = &a.frames {
        fs::create_dir_all(dir).map_err(|e| input(format!("{}: {e}", dir.display())))?;
        for (t, arc) in r.arcs.iter().enumerate() {
            let f = dir.join(format!("stage-{t:03}.svg"));
            fs::write(&f, frame(&r, &ws, arc.poly(), a.reproducible)).map_err(|e| input(format!("{}: {e}", f.display())))?;
        }
    }
    Ok(())
}

fn frame(r: &AdversaryRun, ws: &[TaggedWitness], arc: &Poly, reproducible: bool) -> String {
    let mut s = Svg::new(reproducible);
    s.group("squares");
    for req in &r.requirements {
        s.rect(&square(req.e), "fill=\"none\" stroke=\"#999\" stroke-dasharray=\"0.01\"");
    }
    s.end_group();
    s.group("adversaries");
    for w in ws {
        s.poly(&w.witness.c, "stroke=\"#c70\"");
    }
    s.end_group();
    s.group("arc");
    s.poly(arc, "stroke=\"#226\"");
    s.end_group();
    s.point(&accessarc::Point::new(Rational::from_int(0), Rational::from_int(0)), "fill=\"#b22\"");
    s.finish()
}
