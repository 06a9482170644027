use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use explore_core::community::{
    community_dump, community_scores, detect_communities, prune_topk, Topology,
};
use explore_core::fast::{train_policy, SelectionMode, TrainConfig};
use explore_core::graph::dump::write_graph;
use explore_core::gridworld::io::{parse_map, write_map};
use explore_core::gridworld::{generate_map, MapKind};
use explore_core::mission::{
    benchmark, render_trajectory, Episode, EpisodeLog, LocalPolicy, MapSpec, Method, MissionConfig,
    ReasonerBackend,
};

#[derive(Parser)]
#[command(
    name = "explore",
    version,
    about = "Hierarchical 2D exploration planner and simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one episode and write its JSONL log.
    Run(RunArgs),
    /// Paired-seed benchmark of guided and greedy exploration.
    Bench(BenchArgs),
    /// Train the attention policy on small maps.
    Train(TrainArgs),
    /// Render an episode log over its map as SVG.
    Render(RenderArgs),
    /// Generate map files.
    Maps(MapsArgs),
}

/// Flags mirroring `MissionConfig`; set flags override the config file.
#[derive(Args, Clone, Default)]
struct ConfigArgs {
    /// TOML config file applied before the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    kind: Option<MapKind>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    width: Option<usize>,
    #[arg(long)]
    height: Option<usize>,
    #[arg(long)]
    resolution: Option<f64>,
    /// Map file instead of a generated map.
    #[arg(long)]
    map: Option<String>,
    #[arg(long)]
    node_resolution: Option<f64>,
    #[arg(long)]
    sensor_range: Option<f64>,
    #[arg(long)]
    rays: Option<usize>,
    #[arg(long)]
    window: Option<f64>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    k_top: Option<usize>,
    /// guided or greedy
    #[arg(long, value_parser = parse_method)]
    method: Option<Method>,
    /// heuristic or network
    #[arg(long, value_parser = parse_policy)]
    policy: Option<LocalPolicy>,
    #[arg(long)]
    checkpoint: Option<String>,
    /// greedy or sample
    #[arg(long, value_parser = parse_selection)]
    selection: Option<SelectionMode>,
    /// rule or external
    #[arg(long, value_parser = parse_backend)]
    reasoner: Option<ReasonerBackend>,
    #[arg(long, env = "EXPLORE_REASONER_ENDPOINT")]
    endpoint: Option<String>,
    /// Recorded reasoner exchanges (JSONL) to replay.
    #[arg(long)]
    replay: Option<String>,
    #[arg(long)]
    description: Option<String>,
    #[arg(long)]
    step_cap: Option<usize>,
    #[arg(long)]
    replan_interval: Option<usize>,
    #[arg(long)]
    rng_seed: Option<u64>,
}

fn parse_method(s: &str) -> Result<Method, String> {
    match s {
        "guided" => Ok(Method::Guided),
        "greedy" => Ok(Method::Greedy),
        _ => Err(format!("unknown method `{s}`")),
    }
}

fn parse_policy(s: &str) -> Result<LocalPolicy, String> {
    match s {
        "heuristic" => Ok(LocalPolicy::Heuristic),
        "network" => Ok(LocalPolicy::Network),
        _ => Err(format!("unknown policy `{s}`")),
    }
}

fn parse_selection(s: &str) -> Result<SelectionMode, String> {
    match s {
        "greedy" => Ok(SelectionMode::Greedy),
        "sample" => Ok(SelectionMode::Sample),
        _ => Err(format!("unknown selection mode `{s}`")),
    }
}

fn parse_backend(s: &str) -> Result<ReasonerBackend, String> {
    match s {
        "rule" => Ok(ReasonerBackend::Rule),
        "external" => Ok(ReasonerBackend::External),
        _ => Err(format!("unknown reasoner `{s}`")),
    }
}

impl ConfigArgs {
    fn resolve(&self) -> Result<MissionConfig, String> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text =
                    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
                MissionConfig::from_toml(&text).map_err(|e| e.to_string())?
            }
            None => MissionConfig::default(),
        };
        macro_rules! set {
            ($($flag:ident => $($field:ident).+),* $(,)?) => {
                $(if let Some(v) = &self.$flag { cfg.$($field).+ = v.clone().into(); })*
            };
        }
        set!(
            kind => map.kind,
            seed => map.seed,
            width => map.width,
            height => map.height,
            resolution => map.resolution,
            map => map.file,
            node_resolution => node_resolution,
            sensor_range => sensor_range,
            rays => sensor_rays,
            window => window,
            k => k,
            k_top => k_top,
            method => method,
            policy => policy,
            checkpoint => checkpoint,
            selection => selection,
            reasoner => reasoner,
            endpoint => endpoint,
            replay => replay,
            description => description,
            step_cap => step_cap,
            replan_interval => replan_interval,
            rng_seed => rng_seed,
        );
        cfg.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    cfg: ConfigArgs,
    /// Episode log; lines are appended as the episode runs.
    #[arg(long, default_value = "episode.jsonl")]
    log: PathBuf,
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Final collision-free graph dump.
    #[arg(long)]
    dump_graph: Option<PathBuf>,
    /// Final per-community modularity dump.
    #[arg(long)]
    dump_communities: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    cfg: ConfigArgs,
    /// Map kinds, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "indoor,forest,warehouse")]
    kinds: Vec<MapKind>,
    #[arg(long, default_value_t = 10)]
    repetitions: usize,
    #[arg(long, value_delimiter = ',', value_parser = parse_method, default_value = "guided,greedy")]
    methods: Vec<Method>,
    #[arg(long, default_value = "bench.csv")]
    csv: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    /// TOML file with training settings.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    d_f: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long, default_value = "policy.ckpt")]
    out: PathBuf,
    #[arg(long, default_value = "curve.csv")]
    curve: PathBuf,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long)]
    log: PathBuf,
    /// Map file; without it the map is regenerated from the config flags.
    #[arg(long)]
    map_file: Option<PathBuf>,
    #[command(flatten)]
    cfg: ConfigArgs,
    #[arg(long, default_value = "episode.svg")]
    out: PathBuf,
}

#[derive(Args)]
struct MapsArgs {
    #[arg(long, value_delimiter = ',', default_value = "indoor,forest,warehouse")]
    kinds: Vec<MapKind>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    count: u64,
    #[arg(long, default_value_t = 64)]
    width: usize,
    #[arg(long, default_value_t = 64)]
    height: usize,
    #[arg(long, default_value_t = 0.4)]
    resolution: f64,
    #[arg(long, default_value = "maps")]
    out_dir: PathBuf,
}

fn write(path: &PathBuf, text: &str) -> Result<(), String> {
    fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

fn run(args: RunArgs) -> Result<(), String> {
    let cfg = args.cfg.resolve()?;
    let truth = cfg.map.load().map_err(|e| e.to_string())?;
    let mut ep = Episode::new(cfg, truth.clone()).map_err(|e| e.to_string())?;
    let file = fs::File::create(&args.log).map_err(|e| format!("{}: {e}", args.log.display()))?;
    ep.set_sink(Box::new(std::io::BufWriter::new(file)));
    let outcome = ep.run();
    if let Some(path) = &args.dump_graph {
        write(path, &write_graph(ep.graph()))?;
    }
    if let Some(path) = &args.dump_communities {
        let topology = Topology::from_graph(ep.graph());
        let partition = detect_communities(&topology);
        let retained = prune_topk(ep.graph(), &partition, ep.config().k_top, &[ep.node()])
            .map_err(|e| e.to_string())?;
        let scores = if topology.edge_count() == 0 {
            Vec::new()
        } else {
            community_scores(&topology, &partition).map_err(|e| e.to_string())?
        };
        write(path, &community_dump(&scores, &partition, &retained))?;
    }
    let log = ep.into_log();
    if let Some(path) = &args.svg {
        write(path, &render_trajectory(&log, &truth))?;
    }
    let s = log.summary().expect("finished logs carry a summary");
    println!(
        "{} on {} seed {}: distance {:.2} m, {} steps, coverage {:.3}, complete {}",
        s.method, s.map_kind, s.map_seed, s.distance, s.steps, s.coverage, s.complete
    );
    outcome.map_err(|e| e.to_string())
}

fn bench(args: BenchArgs) -> Result<(), String> {
    let base = args.cfg.resolve()?;
    let configs: Vec<MissionConfig> = args
        .kinds
        .iter()
        .map(|k| {
            let mut c = base.clone();
            c.map = MapSpec {
                kind: *k,
                ..base.map.clone()
            };
            c
        })
        .collect();
    let report = benchmark(&configs, &args.methods, args.repetitions).map_err(|e| e.to_string())?;
    write(&args.csv, &report.to_csv())?;
    print!("{}", report.to_table());
    Ok(())
}

fn train(args: TrainArgs) -> Result<(), String> {
    let mut tc = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            toml::from_str(&text).map_err(|e| e.to_string())?
        }
        None => TrainConfig::default(),
    };
    if let Some(v) = args.iterations {
        tc.iterations = v;
    }
    if let Some(v) = args.seed {
        tc.seed = v;
    }
    if let Some(v) = args.d_f {
        tc.d_f = v;
    }
    if let Some(v) = args.learning_rate {
        tc.learning_rate = v;
    }
    let report = train_policy(&tc).map_err(|e| e.to_string())?;
    write(&args.out, &report.params.to_checkpoint())?;
    write(&args.curve, &report.to_csv())?;
    if let (Some(first), Some(last)) = (report.rows.first(), report.rows.last()) {
        println!(
            "smoothed return {:.4} -> {:.4} over {} iterations",
            first.smoothed_return, last.smoothed_return, last.iteration
        );
    }
    Ok(())
}

fn render(args: RenderArgs) -> Result<(), String> {
    let text = fs::read_to_string(&args.log).map_err(|e| format!("{}: {e}", args.log.display()))?;
    let log = EpisodeLog::from_jsonl(&text).map_err(|e| e.to_string())?;
    let truth = match &args.map_file {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            parse_map(&text).map_err(|e| e.to_string())?
        }
        None => args.cfg.resolve()?.map.load().map_err(|e| e.to_string())?,
    };
    write(&args.out, &render_trajectory(&log, &truth))
}

fn maps(args: MapsArgs) -> Result<(), String> {
    fs::create_dir_all(&args.out_dir).map_err(|e| format!("{}: {e}", args.out_dir.display()))?;
    for kind in &args.kinds {
        for seed in args.seed..args.seed + args.count {
            let map = generate_map(*kind, seed, args.width, args.height, args.resolution)
                .map_err(|e| e.to_string())?;
            let path = args.out_dir.join(format!("{}_{seed}.map", kind.as_str()));
            write(&path, &write_map(&map))?;
            println!("{}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Bench(a) => bench(a),
        Command::Train(a) => train(a),
        Command::Render(a) => render(a),
        Command::Maps(a) => maps(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
