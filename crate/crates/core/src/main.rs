use clap::Parser;

use pherogrid::cli::Cli;
use pherogrid::experiment::run_experiment;

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help/--version are not usage errors.
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp
                | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let config = match cli.into_config() {
        Ok(config) => config,
        Err(e) => {
            eprintln!("usage error: {e}");
            std::process::exit(1);
        }
    };
    match run_experiment(&config) {
        Ok(artifacts) => {
            println!("wrote artifacts to {}", artifacts.out_dir.display());
            println!(
                "final population: {}{}",
                artifacts.final_population,
                if artifacts.extinct { " (extinct)" } else { "" }
            );
            println!(
                "mean population over trailing window: {:.2}% of cells \
                 (regression anchor for synthetic habitats)",
                artifacts.mean_population_pct
            );
            println!("cumulative ant-steps: {}", artifacts.cumulative_ant_steps);
            if let Some(basins) = artifacts.basin_count {
                println!("watershed basins: {basins}");
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    }
}
