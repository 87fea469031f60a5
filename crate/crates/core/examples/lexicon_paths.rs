//! Walks the bundled lexicon: direct relations and conceptual distances
//! between a few Spanish nouns.
//!
//!     cargo run -p newscog --example lexicon_paths [lemma lemma ...]

use newscog::lexicon::{LexKey, Lexicon, Pos};

fn main() -> newscog::Result<()> {
    let lex = Lexicon::bundled();
    println!("{} entries, path cap {}", lex.len(), lex.graph().path_cap());

    let args: Vec<String> = std::env::args().skip(1).collect();
    let words: Vec<&str> = if args.is_empty() {
        vec![
            "montaña",
            "monte",
            "elevación",
            "profesor",
            "maestro",
            "papel",
            "casa",
            "hogar",
        ]
    } else {
        args.iter().map(String::as_str).collect()
    };
    let keys: Vec<LexKey> = words.iter().map(|w| LexKey::new(*w, Pos::Noun)).collect();

    for (i, a) in keys.iter().enumerate() {
        for b in &keys[i + 1..] {
            if !lex.contains(a) || !lex.contains(b) {
                continue;
            }
            let d = lex.shortest_path(a, b)?;
            let rel = lex.direct_relation(a, b)?;
            let d = d.map_or("-".to_string(), |d| d.to_string());
            println!("{:<12} {:<12} d={d:<3} {rel:?}", a.lemma, b.lemma);
        }
    }
    Ok(())
}
