//! How quantities in an answer are matched against the reference.

use newscog::similarity::{number_score, round_candidates, NumberMention, Qualifier, SimParams};

fn main() {
    let params = SimParams::default();
    let ideal = NumberMention {
        value: 2569,
        qualifier: Qualifier::None,
    };
    println!(
        "round forms of {}: {:?}",
        ideal.value,
        round_candidates(ideal.value)
    );
    for (value, qualifier) in [
        (2569, Qualifier::None),
        (2500, Qualifier::Over),
        (2600, Qualifier::Under),
        (2500, Qualifier::None),
        (2600, Qualifier::Over),
        (2400, Qualifier::None),
    ] {
        let answer = NumberMention { value, qualifier };
        println!(
            "{qualifier:?} {value}: {}",
            number_score(&ideal, &answer, &params)
        );
    }
}
