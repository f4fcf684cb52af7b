//! Runs the implicit nine-point scheme and writes CSV and binary trajectories.

use std::fs::File;

use fdcons::scheme_library::SchemeName;
use fdcons::solver::{read_binary, run, write_binary, write_csv, BcConfig, GridConfig, IcPreset, SimulationConfig};

fn main() {
    let config = SimulationConfig {
        scheme: SchemeName::NonlinearNine3,
        grid: GridConfig { m: 64, h: None, tau: None, x0: 0.0, bc: BcConfig::Periodic },
        ic: IcPreset::Gaussian { center: 0.5, width: 0.08, amplitude: 0.05 },
        steps: 256,
        record_stride: 16,
    };
    let traj = run(&config).unwrap();
    let dir = std::env::temp_dir();
    let csv = dir.join("nine3.csv");
    let bin = dir.join("nine3.bin");
    write_csv(&traj, File::create(&csv).unwrap()).unwrap();
    write_binary(&traj, File::create(&bin).unwrap()).unwrap();
    let (tau, h, layers) = read_binary(File::open(&bin).unwrap()).unwrap();
    println!("{} layers, h = {h}, tau = {tau}", layers.len());
    println!("wrote {} and {}", csv.display(), bin.display());
}
