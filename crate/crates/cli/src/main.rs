//! Command line surface: orbit listings, resolution reports, degeneracy
//! locus invariants, and the verification sweeps.

mod config;
mod render;

use clap::{Parser, Subcommand};
use quiver_odl::error::Error as CoreError;
use quiver_odl::quiver::CaseTag;
use quiver_odl::{odl, orbit, resolution, sweeps};

#[derive(Parser)]
#[command(name = "quiver-odl", about = "Orbit closures in quiver representation spaces: resolutions, crepancy, degeneracy loci", version)]
struct Cli {
    /// Configuration file (TOML, or JSON with a .json extension)
    #[arg(long, global = true)]
    config: Option<String>,
    /// Output format
    #[arg(long, global = true, default_value = "table")]
    format: String,
    /// Random seed for localization framing and sampling oracles
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for the fixed-point sums (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Quantities to compute for `odl` (comma separated), overriding the
    /// config's report section
    #[arg(long, global = true, value_delimiter = ',')]
    quantities: Option<Vec<String>>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the positive roots of the configured quiver
    Roots,
    /// Enumerate the orbits for the configured dimension vector
    Orbits,
    /// Decomposition, codimension and closure data of one orbit
    OrbitInfo,
    /// Construct the resolution display and decide crepancy
    Resolve,
    /// Degeneracy locus report with numerical invariants
    Odl,
    /// Run the verification sweeps
    Verify {
        /// Use the full acceptance-scale ranges (slower)
        #[arg(long)]
        full: bool,
    },
}

fn exit_code_for(e: &anyhow::Error) -> i32 {
    if let Some(core) = e.downcast_ref::<CoreError>() {
        match core {
            CoreError::Infeasible(_)
            | CoreError::NoResolutionRule(_)
            | CoreError::NotCrepant(_)
            | CoreError::PartialInvariants(_)
            | CoreError::ExpectedDimensionNegative
            | CoreError::PointNotInOrbit => 3,
            CoreError::NonIntegerResult(_) | CoreError::WeightCollision => 4,
            _ => 2,
        }
    } else {
        2
    }
}

fn main() {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .ok();
    }
    match run(&cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(exit_code_for(&e));
        }
    }
}

fn need_config(cli: &Cli) -> anyhow::Result<config::Config> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| anyhow::anyhow!("this command needs --config PATH"))?;
    config::load(path)
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    let json = cli.format == "json";
    match &cli.command {
        Command::Roots => {
            let cfg = need_config(cli)?;
            let quiver = config::build_quiver(&cfg.quiver)?;
            let roots = quiver.positive_roots()?;
            render::roots(&quiver, &roots, json);
        }
        Command::Orbits => {
            let cfg = need_config(cli)?;
            let quiver = config::build_quiver(&cfg.quiver)?;
            let o = cfg
                .orbit
                .as_ref()
                .ok_or_else(|| anyhow::anyhow!("config needs an [orbit] section"))?;
            let d = config::dim_vector(o, &quiver)?;
            let orbits = orbit::enumerate_orbits(&quiver, &d)?;
            render::orbits(&quiver, &d, &orbits, json)?;
        }
        Command::OrbitInfo => {
            let cfg = need_config(cli)?;
            let quiver = config::build_quiver(&cfg.quiver)?;
            let o = cfg
                .orbit
                .as_ref()
                .ok_or_else(|| anyhow::anyhow!("config needs an [orbit] section"))?;
            let d = config::dim_vector(o, &quiver)?;
            let inv = config::build_invariants(&quiver, o)?;
            render::orbit_info(&quiver, &d, &inv, json)?;
        }
        Command::Resolve => {
            let cfg = need_config(cli)?;
            let quiver = config::build_quiver(&cfg.quiver)?;
            let o = cfg
                .orbit
                .as_ref()
                .ok_or_else(|| anyhow::anyhow!("config needs an [orbit] section"))?;
            let d = config::dim_vector(o, &quiver)?;
            let inv = config::build_invariants(&quiver, o)?;
            let rt = match &o.res_type {
                Some(s) => config::parse_res_type(s)?,
                None => resolution::select_res_type(&quiver, &d, &inv)?,
            };
            let spec = resolution::resolution_with_type(&quiver, &d, &inv, rt)?;
            render::resolve(&quiver, &d, &inv, &spec, json)?;
        }
        Command::Odl => {
            let cfg = need_config(cli)?;
            let quiver = config::build_quiver(&cfg.quiver)?;
            let o = cfg
                .orbit
                .as_ref()
                .ok_or_else(|| anyhow::anyhow!("config needs an [orbit] section"))?;
            let d = config::dim_vector(o, &quiver)?;
            let inv = config::build_invariants(&quiver, o)?;
            let variety = cfg
                .variety
                .as_ref()
                .ok_or_else(|| anyhow::anyhow!("odl needs a [variety] section"))?;
            let base = config::parse_base(&variety.base)?;
            let cuts = variety
                .cuts
                .iter()
                .map(|c| config::parse_bundle(c))
                .collect::<anyhow::Result<Vec<_>>>()?;
            let bundle_map = cfg
                .bundles
                .as_ref()
                .ok_or_else(|| anyhow::anyhow!("odl needs a [bundles] section"))?;
            let mut bundles = Vec::new();
            for v in 0..quiver.vertex_count {
                let key = format!("E{}", v + 1);
                let text = bundle_map
                    .get(&key)
                    .ok_or_else(|| anyhow::anyhow!("bundles section is missing {key}"))?;
                bundles.push(config::parse_bundle(text)?);
            }
            let quantity_names: Vec<String> = match (&cli.quantities, &cfg.report) {
                (Some(q), _) => q.clone(),
                (None, Some(r)) => r.quantities.clone(),
                (None, None) => vec!["chi_O".into()],
            };
            let quantities = config::parse_quantities(&quantity_names)?;
            let odl_config = odl::ODLConfig {
                base,
                cuts,
                bundles,
                quiver,
                d,
                inv,
                res_type: match &o.res_type {
                    Some(s) => Some(config::parse_res_type(s)?),
                    None => None,
                },
                seed: cli.seed.or(cfg.seed).unwrap_or(1),
            };
            let report = render::odl_with_progress(&odl_config, &quantities, json)?;
            render::odl_report(&report, json)?;
        }
        Command::Verify { full } => {
            let seed = cli.seed.unwrap_or(1);
            let (a3_max, d4_max, an_max, trials) = if *full { (5, 5, 3, 100) } else { (3, 3, 2, 25) };
            let mut all = Vec::new();
            for case in [
                CaseTag::A3SinkCenter,
                CaseTag::A3SourceCenter,
                CaseTag::A3OneWay,
            ] {
                all.push(sweeps::sweep_a3(case, a3_max)?);
                all.push(sweeps::sweep_codim_triple(case, a3_max)?);
                all.push(sweeps::sweep_closure_a3(case, 3.min(a3_max))?);
            }
            all.push(sweeps::sweep_d4(d4_max)?);
            all.push(sweeps::sweep_codim_triple(CaseTag::D4SinkCenter, d4_max)?);
            let ns: Vec<(CaseTag, Vec<usize>)> = if *full {
                vec![
                    (CaseTag::AnOneWay, vec![4, 5, 6, 7]),
                    (CaseTag::A2mSourceSink, vec![4, 6]),
                    (CaseTag::A2mp1TypeI, vec![5, 7]),
                    (CaseTag::A2mp1TypeII, vec![5, 7]),
                ]
            } else {
                vec![
                    (CaseTag::AnOneWay, vec![4, 5]),
                    (CaseTag::A2mSourceSink, vec![4]),
                    (CaseTag::A2mp1TypeI, vec![5]),
                    (CaseTag::A2mp1TypeII, vec![5]),
                ]
            };
            for (case, sizes) in ns {
                for n in sizes {
                    all.push(sweeps::sweep_an(case, n, an_max)?);
                }
            }
            all.push(sweeps::sweep_degeneration_paths(trials, seed)?);
            all.push(sweeps::sweep_fibers()?);
            let mut failed = false;
            for o in &all {
                println!("{}", o.summary());
                for m in o.mismatches.iter().take(5) {
                    println!("    counterexample: {m}");
                }
                failed |= !o.passed();
            }
            if failed {
                anyhow::bail!("verification sweeps found mismatches");
            }
        }
    }
    Ok(())
}
