use newscog::lexicon::{LexKey, Lexicon, Pos};
use newscog::similarity::{word_similarity, SimParams};

fn main() -> newscog::Result<()> {
    let lex = Lexicon::bundled();
    let params = SimParams::default();
    let pairs = [
        ("casa", "hogar"),
        ("montaña", "monte"),
        ("profesor", "maestro"),
        ("papel", "folio"),
        ("montaña", "montañero"),
        ("profesor", "papel"),
    ];
    println!(
        "{:<10} {:<10} {:>5}  {:<7} distance",
        "a", "b", "sim", "gamma"
    );
    for (a, b) in pairs {
        let (ka, kb) = (LexKey::new(a, Pos::Noun), LexKey::new(b, Pos::Noun));
        let s = word_similarity(&ka, &kb, &lex, &params)?;
        println!(
            "{a:<10} {b:<10} {:>5.3}  {:<7} {:?}",
            s.value,
            format!("{:?}", s.gamma),
            s.distance
        );
    }
    Ok(())
}
