//! Command-line surface: exact counting, uniform sampling, exhaustive
//! enumeration and self-verification for phylogenetic trees fixed by a
//! permutation and for tangled chains.
//!
//! Results go to stdout; diagnostics and run metadata go to stderr. A run
//! with the same subcommand, parameters and seed produces byte-identical
//! output. JSON output embeds the seed so that any run can be reproduced.

use std::collections::BTreeSet;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use tanglegen::oracle;
use tanglegen::sampler::{
    sample_chain, sample_fixed_tree, sample_partition, RandomSource,
};
use tanglegen::verify::run_verification;
use tanglegen::{
    count_chains, count_fixed_trees, Label, Partition, PartitionWeightTable, Permutation,
};

#[derive(Parser)]
#[command(
    name = "tanglegen",
    about = "Exact counting and provably uniform sampling of phylogenetic trees \
             fixed by a permutation, tanglegrams and tangled chains",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact counts: fixed trees of a cycle type, or tangled chains.
    Count {
        #[command(subcommand)]
        target: CountTarget,
    },
    /// Draw uniformly at random, reproducibly from a seed.
    Sample {
        #[command(subcommand)]
        target: SampleTarget,
    },
    /// Exhaustively list trees (optionally only those fixed by a permutation).
    Enumerate(EnumerateArgs),
    /// Re-check the library's identities against brute force.
    Verify {
        /// Largest label-set size to verify (at most 8).
        #[arg(long, default_value_t = 5)]
        max_n: usize,
    },
}

#[derive(Subcommand)]
enum CountTarget {
    /// Number of trees fixed by any permutation of the given cycle type.
    FixedTrees {
        /// Cycle type as comma-separated parts, e.g. `8,4,2`.
        #[arg(long)]
        partition: String,
    },
    /// Number of tangled chains of length k and size n.
    Chains {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u32,
    },
}

#[derive(Subcommand)]
enum SampleTarget {
    /// A uniformly random tree fixed by the given permutation.
    Tree(SampleTreeArgs),
    /// A uniformly random tangled chain of length k and size n.
    Chain(SampleChainArgs),
    /// A random binary cycle type under the tangled-chain weight.
    Partition(SampleChainArgs),
}

#[derive(Args)]
struct SampleTreeArgs {
    /// Permutation in cycle notation, e.g. `(1,2)(3,4)`.
    #[arg(long)]
    permutation: String,
    /// Ground set size; when given, the permutation acts on {1..n}.
    /// Otherwise the ground set is the set of labels mentioned.
    #[arg(long)]
    n: Option<u64>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct SampleChainArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: u32,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct RunArgs {
    /// Seed for the random source; generated (and reported) when absent.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of independent draws.
    #[arg(long, default_value_t = 1)]
    count: u64,
    #[arg(long, value_enum, default_value_t = Format::Newick)]
    format: Format,
}

#[derive(Args)]
struct EnumerateArgs {
    /// Label-set size; trees are listed over {1..n}.
    #[arg(long)]
    n: u64,
    /// Only trees fixed by this permutation (cycle notation).
    #[arg(long)]
    fixed_by: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Newick)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Newick,
    Json,
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Count { target } => count(target),
        Command::Sample { target } => sample(target),
        Command::Enumerate(args) => enumerate(args),
        Command::Verify { max_n } => verify(max_n),
    };
    if let Err(err) = outcome {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn count(target: CountTarget) -> Result<()> {
    match target {
        CountTarget::FixedTrees { partition } => {
            let partition = Partition::parse(&partition)?;
            println!("{}", count_fixed_trees(&partition));
        }
        CountTarget::Chains { n, k } => {
            if n < 1 || k < 1 {
                bail!("need n >= 1 and k >= 1");
            }
            println!("{}", count_chains(n, k));
        }
    }
    Ok(())
}

fn resolve_seed(run: &RunArgs) -> u64 {
    run.seed.unwrap_or_else(|| {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.subsec_nanos() as u64 ^ d.as_secs())
            .unwrap_or(0)
    })
}

fn parse_permutation(text: &str, n: Option<u64>) -> Result<Permutation> {
    let ground: BTreeSet<Label> = match n {
        Some(n) => {
            if n < 1 {
                bail!("need n >= 1");
            }
            (1..=n).collect()
        }
        None => mentioned_labels(text)?,
    };
    Ok(Permutation::parse(text, &ground)?)
}

fn mentioned_labels(text: &str) -> Result<BTreeSet<Label>> {
    let mut labels = BTreeSet::new();
    for chunk in text.split(|c: char| !c.is_ascii_digit()) {
        if !chunk.is_empty() {
            labels.insert(chunk.parse::<Label>().context("label out of range")?);
        }
    }
    if labels.is_empty() {
        bail!("permutation mentions no labels; pass --n for an identity ground set");
    }
    Ok(labels)
}

fn sample(target: SampleTarget) -> Result<()> {
    match target {
        SampleTarget::Tree(args) => {
            let sigma = parse_permutation(&args.permutation, args.n)?;
            let seed = resolve_seed(&args.run);
            let mut trees = Vec::with_capacity(args.run.count as usize);
            for i in 0..args.run.count {
                let mut rng = RandomSource::from_seed_stream(seed, i);
                let tree = sample_fixed_tree(&sigma, &mut rng)?;
                // Never print a tree the permutation does not fix.
                assert!(tree.is_fixed(&sigma)?, "sampler produced an unfixed tree");
                trees.push(tree.to_string());
            }
            match args.run.format {
                Format::Newick => {
                    eprintln!(
                        "# sample tree permutation=({sigma}) seed={seed} count={}",
                        args.run.count
                    );
                    for t in &trees {
                        println!("{t}");
                    }
                }
                Format::Json => {
                    let doc = json!({
                        "n": sigma.domain_size(),
                        "k": 1,
                        "seed": seed,
                        "permutation": sigma.to_string(),
                        "trees": trees,
                    });
                    println!("{doc}");
                }
            }
        }
        SampleTarget::Chain(args) => {
            if args.n < 1 || args.k < 1 {
                bail!("need n >= 1 and k >= 1");
            }
            let seed = resolve_seed(&args.run);
            let table = PartitionWeightTable::build(args.n, args.k);
            let mut chains = Vec::with_capacity(args.run.count as usize);
            for i in 0..args.run.count {
                let mut rng = RandomSource::from_seed_stream(seed, i);
                let chain = sample_chain(args.n, args.k, &table, &mut rng)?;
                chains.push(
                    chain
                        .trees()
                        .iter()
                        .map(|t| t.to_string())
                        .collect::<Vec<_>>(),
                );
            }
            match args.run.format {
                Format::Newick => {
                    eprintln!(
                        "# sample chain n={} k={} seed={seed} count={}",
                        args.n, args.k, args.run.count
                    );
                    for chain in &chains {
                        for t in chain {
                            println!("{t}");
                        }
                    }
                }
                Format::Json => {
                    let doc = json!({
                        "n": args.n,
                        "k": args.k,
                        "seed": seed,
                        "chains": chains,
                    });
                    println!("{doc}");
                }
            }
        }
        SampleTarget::Partition(args) => {
            if args.n < 1 || args.k < 1 {
                bail!("need n >= 1 and k >= 1");
            }
            let seed = resolve_seed(&args.run);
            let table = PartitionWeightTable::build(args.n, args.k);
            let mut partitions = Vec::with_capacity(args.run.count as usize);
            for i in 0..args.run.count {
                let mut rng = RandomSource::from_seed_stream(seed, i);
                partitions.push(sample_partition(args.n, args.k, &table, &mut rng)?);
            }
            match args.run.format {
                Format::Newick => {
                    eprintln!(
                        "# sample partition n={} k={} seed={seed} count={}",
                        args.n, args.k, args.run.count
                    );
                    for p in &partitions {
                        println!("{p}");
                    }
                }
                Format::Json => {
                    let doc = json!({
                        "n": args.n,
                        "k": args.k,
                        "seed": seed,
                        "partitions": partitions
                            .iter()
                            .map(|p| p.parts().to_vec())
                            .collect::<Vec<_>>(),
                    });
                    println!("{doc}");
                }
            }
        }
    }
    Ok(())
}

fn enumerate(args: EnumerateArgs) -> Result<()> {
    if args.n < 1 {
        bail!("need n >= 1");
    }
    let labels: BTreeSet<Label> = (1..=args.n).collect();
    let trees = match &args.fixed_by {
        Some(text) => {
            let sigma = Permutation::parse(text, &labels)?;
            oracle::enumerate_fixed_trees(&sigma)?
        }
        None => oracle::enumerate_all_trees(&labels)?,
    };
    let mut lines: Vec<String> = trees.iter().map(|t| t.to_string()).collect();
    lines.sort();
    match args.format {
        Format::Newick => {
            for line in &lines {
                println!("{line}");
            }
            println!("count={}", lines.len());
        }
        Format::Json => {
            let doc = json!({
                "n": args.n,
                "fixed_by": args.fixed_by,
                "trees": lines,
                "count": lines.len(),
            });
            println!("{doc}");
        }
    }
    Ok(())
}

fn verify(max_n: usize) -> Result<()> {
    let results = run_verification(max_n)?;
    let mut failed = 0;
    for r in &results {
        let tag = if r.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] {}: {}", r.name, r.detail);
        if !r.passed {
            failed += 1;
        }
    }
    if failed > 0 {
        bail!("{failed} verification checks failed");
    }
    Ok(())
}
