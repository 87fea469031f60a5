//! Scores free-text answers against a reference sentence.
//!
//!     cargo run -p newscog --example sentence_scoring -- "reference" "answer" ...

use newscog::analysis::Analyzer;
use newscog::lexicon::Lexicon;
use newscog::similarity::{round2, sentence_similarity, SimParams};

fn main() -> newscog::Result<()> {
    let lex = Lexicon::bundled();
    let analyzer = Analyzer::new(&lex);
    let mut args: Vec<String> = std::env::args().skip(1).collect();
    if args.len() < 2 {
        args = vec![
            "un profesor llevó papel en blanco a su hogar en la montaña".into(),
            "Un hombre llevó folios blancos a su casa del monte".into(),
            "Un hombre sacó madera blanca de su apartamento".into(),
            "Un hombre rompió una silla en una tienda".into(),
        ];
    }
    let ideal = analyzer.analyze_answer(&args[0]);
    println!("reference: {}", args[0]);
    for answer in &args[1..] {
        let score = sentence_similarity(
            &ideal,
            &analyzer.analyze_answer(answer),
            &lex,
            &SimParams::default(),
        )?;
        println!("\n{:.2}  {answer}", round2(score.value));
        for w in score
            .nv_scores
            .iter()
            .chain(&score.number_scores)
            .chain(&score.aa_scores)
        {
            let matched = w.matched.as_deref().unwrap_or("-");
            println!(
                "      {:<10} {:?}  ~ {matched:<10} {:.3}",
                w.ideal, w.class, w.value
            );
        }
    }
    Ok(())
}
