//! Trains a decision tree on a synthetic cohort and prints feature ranks.
//!
//!     cargo run -p newscog --example train_tree -- [seed] [max_depth]

use newscog::ml::synthetic::{synthetic_cohort, CohortSpec};
use newscog::ml::{rank_features, train_decision_tree, Dataset, TreeParams};

fn main() -> newscog::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<u64>().ok());
    let seed = args.next().flatten().unwrap_or(1);
    let max_depth = args.next().flatten().unwrap_or(5) as usize;

    let dataset = Dataset::from(synthetic_cohort(&CohortSpec::default(), seed)?.as_slice());
    println!("gain ratio per feature:");
    for (name, gr) in rank_features(&dataset)? {
        println!("  {name:<12} {gr:.4}");
    }
    let tree = train_decision_tree(
        &dataset,
        TreeParams {
            max_depth,
            ..Default::default()
        },
    )?;
    println!("\ndepth {}:\n{}", tree.depth(), tree.render());
    Ok(())
}
