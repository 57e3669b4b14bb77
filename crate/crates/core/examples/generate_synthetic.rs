//! Write a seeded synthetic stream to CSV, ready for the `govpat` tool.
//!
//! Usage: `cargo run --example generate_synthetic -- out.csv [seed] [--drift]`

use governing_pattern::harness::synthetic::{generate, write_csv, DriftSpec, SyntheticSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let path = args.first().map_or("synthetic.csv", String::as_str);
    let seed = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let mut spec = SyntheticSpec {
        seed,
        ..SyntheticSpec::default()
    };
    if args.iter().any(|a| a == "--drift") {
        spec.drift.push(DriftSpec {
            start: 1900,
            length: 100,
            ramp: 0,
            shift: [-18.0, 11.0],
            class: Some(0),
        });
    }
    let stream = generate(&spec);
    write_csv(&stream, path.as_ref())?;
    println!("wrote {} samples to {path}", stream.samples.len());
    Ok(())
}
