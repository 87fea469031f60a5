use newscog::ml::synthetic::{synthetic_cohort, CohortSpec};
use newscog::ml::{evaluate, grouped_kfold, Dataset, TreeParams};

fn main() -> newscog::Result<()> {
    let dataset = Dataset::from(synthetic_cohort(&CohortSpec::default(), 7)?.as_slice());
    let folds = grouped_kfold(&dataset, 10, 7)?;
    for (i, fold) in folds.iter().enumerate() {
        let users: Vec<&str> = fold
            .iter()
            .map(|&r| dataset.rows[r].user_id.as_str())
            .collect();
        println!("fold {i}: {users:?}");
    }
    println!();
    print!(
        "{}",
        evaluate(&dataset, 10, 7, TreeParams::default())?.render()
    );

    let accuracies: Vec<f64> = (0..20)
        .map(|seed| {
            let d = Dataset::from(synthetic_cohort(&CohortSpec::default(), seed)?.as_slice());
            Ok(evaluate(&d, 10, seed, TreeParams::default())?.accuracy)
        })
        .collect::<newscog::Result<_>>()?;
    let mean = accuracies.iter().sum::<f64>() / accuracies.len() as f64;
    println!("\nmean accuracy over 20 cohorts: {:.2}%", 100.0 * mean);
    Ok(())
}
