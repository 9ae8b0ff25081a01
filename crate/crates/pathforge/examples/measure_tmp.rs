use pathforge::sampler::{sample_paths, Alpha, FlagScope, PathLimit, SamplerConfig};
use pathforge::taxonomy::{leaves_with_name, max_depth};
use pathforge::toy::world::taxonomy;

fn main() {
    let tree = taxonomy();
    println!("depth = {}", max_depth(&tree));
    for label in [
        "real",
        "print attack",
        "replay attack",
        "mask attack",
        "paper mask attack",
    ] {
        let leaves = leaves_with_name(&tree, label).len();
        print!("  {label:?} ({leaves} leaves):");
        for (num, den) in [(2u64, 1u64), (7, 3), (5, 2), (8, 3), (3, 1)] {
            let config = SamplerConfig {
                limit: PathLimit::Exhaustive,
                alpha: Alpha::new(num, den).unwrap(),
                seed: 0,
                flag_scope: FlagScope::PerPath,
            };
            let paths = sample_paths(&tree, label, &config).unwrap();
            print!("  alpha={num}/{den}: {} paths;", paths.len());
        }
        println!();
    }
}
