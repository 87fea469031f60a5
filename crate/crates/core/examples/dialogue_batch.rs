//! Runs one complete session from scripted answers and prints the report.

use std::sync::Arc;

use newscog::dialogue::{
    run_batch, Education, FrameOfMind, Impairment, RegistrationSheet, ScriptedAnswers,
    SessionEngine, SessionStore,
};
use newscog::ingest::bundled_news;
use newscog::lexicon::Lexicon;
use newscog::questgen::{build_session_script, Gazetteer};
use newscog::similarity::SimParams;

fn main() -> newscog::Result<()> {
    let lexicon = Arc::new(Lexicon::bundled());
    let news = &bundled_news()[2];
    let script = build_session_script(news, &lexicon, &Gazetteer::bundled(), 25)?;

    let sheet = RegistrationSheet {
        user_id: "demo".into(),
        age: 77,
        tech_skills: false,
        hearing_problems: false,
        education: Education::Basic,
        impairment: Impairment::Absent,
        frame_of_mind: FrameOfMind::Happy,
        stressed: false,
        focused: true,
        notes: String::new(),
    };
    let answers = ScriptedAnswers::parse(
        "summary\tok\n\
         q1\tyes of course\n\
         q1.1\tShe is a minister of the Government\n\
         q2\tthe administration that rules the country\n\
         q3\tThey will extend the social bonds for electricity\n\
         q4\tyes\n",
    )?;

    let root = std::env::temp_dir().join(format!("newscog-demo-{}", std::process::id()));
    let engine = SessionEngine::new(SessionStore::open(&root)?, lexicon, SimParams::default());
    let (id, report) = run_batch(&engine, sheet, script.clone(), &answers)?;

    for turn in engine.store.transcript(&id)?.turns {
        println!(
            "{:>8}  {}\n          > {}",
            turn.question_id, turn.prompt, turn.answer
        );
    }
    println!("\nsims: {:?}", report.sims);
    println!(
        "average answer length: {:.1} chars",
        report.avg_answer_length_chars
    );
    println!("stored under {}", root.display());
    Ok(())
}
