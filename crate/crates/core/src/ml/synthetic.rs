//! Synthetic cohort generator: per-class attention similarities and answer
//! lengths drawn from normal distributions, clipped to their valid ranges.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{extract_features, LabeledExample, SESSIONS};
use crate::dialogue::{
    Education, FrameOfMind, Impairment, RegistrationSheet, SessionReport, SheetFlags,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassProfile {
    pub users: usize,
    pub sim_mean: f64,
    pub sim_sd: f64,
    pub length_mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortSpec {
    pub absent: ClassProfile,
    pub mild: ClassProfile,
    pub severe: ClassProfile,
    /// Spread of per-session answer lengths, in characters.
    pub length_sd: f64,
    pub age_mean: f64,
    pub age_sd: f64,
    pub p_focused: f64,
    pub p_stressed: f64,
    pub p_tech: f64,
    pub p_superior: f64,
}

impl Default for CohortSpec {
    fn default() -> Self {
        CohortSpec {
            absent: ClassProfile {
                users: 13,
                sim_mean: 0.42,
                sim_sd: 0.17,
                length_mean: 54.20,
            },
            mild: ClassProfile {
                users: 12,
                sim_mean: 0.29,
                sim_sd: 0.17,
                length_mean: 37.75,
            },
            severe: ClassProfile {
                users: 5,
                sim_mean: 0.08,
                sim_sd: 0.10,
                length_mean: 30.84,
            },
            length_sd: 15.0,
            age_mean: 75.73,
            age_sd: 6.60,
            p_focused: 22.0 / 30.0,
            p_stressed: 0.3,
            p_tech: 17.0 / 30.0,
            p_superior: 14.0 / 30.0,
        }
    }
}

fn normal(mean: f64, sd: f64) -> Result<Normal<f64>> {
    Normal::new(mean, sd).map_err(|e| Error::validation(format!("bad distribution: {e}")))
}

/// Sheets and five session reports per synthetic user.
pub fn synthetic_sessions(
    spec: &CohortSpec,
    seed: u64,
) -> Result<Vec<(RegistrationSheet, Vec<SessionReport>)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let age = normal(spec.age_mean, spec.age_sd)?;
    let mut out = Vec::new();
    let classes = [
        (Impairment::Absent, spec.absent),
        (Impairment::Mild, spec.mild),
        (Impairment::Severe, spec.severe),
    ];
    for (impairment, profile) in classes {
        let sim = normal(profile.sim_mean, profile.sim_sd)?;
        let length = normal(profile.length_mean, spec.length_sd)?;
        for _ in 0..profile.users {
            let user_id = format!("synthetic-{:02}", out.len() + 1);
            let sheet = RegistrationSheet {
                user_id: user_id.clone(),
                age: age.sample(&mut rng).round().clamp(60.0, 100.0) as u32,
                tech_skills: rng.random_bool(spec.p_tech),
                hearing_problems: false,
                education: if rng.random_bool(spec.p_superior) {
                    Education::Superior
                } else {
                    Education::Basic
                },
                impairment,
                frame_of_mind: FrameOfMind::Normal,
                stressed: rng.random_bool(spec.p_stressed),
                focused: rng.random_bool(spec.p_focused),
                notes: String::new(),
            };
            let reports = (1..=SESSIONS)
                .map(|s| {
                    let attention = sim.sample(&mut rng).clamp(0.0, 1.0);
                    SessionReport {
                        session_id: format!("{user_id}-s{s}"),
                        user_id: user_id.clone(),
                        script_id: format!("synthetic-s{s}"),
                        news_id: format!("synthetic-s{s}"),
                        sims: BTreeMap::from([("q3".to_string(), attention)]),
                        meaning_sim: 0.0,
                        attention_sim: attention,
                        avg_answer_length_chars: length.sample(&mut rng).max(0.0),
                        completed: true,
                        flags: SheetFlags::from(&sheet),
                    }
                })
                .collect();
            out.push((sheet, reports));
        }
    }
    Ok(out)
}

/// One labeled example per synthetic user.
pub fn synthetic_cohort(spec: &CohortSpec, seed: u64) -> Result<Vec<LabeledExample>> {
    synthetic_sessions(spec, seed)?
        .iter()
        .map(|(sheet, reports)| extract_features(sheet, reports))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ml::Label;

    #[test]
    fn cohort_shape() {
        let c = synthetic_cohort(&CohortSpec::default(), 1).unwrap();
        assert_eq!(c.len(), 30);
        assert_eq!(c.iter().filter(|e| e.label == Label::Present).count(), 17);
        for e in &c {
            assert!(e.features.sims.iter().all(|s| (0.0..=1.0).contains(s)));
            assert!(e.features.num_chars >= 0.0);
        }
        assert_eq!(c, synthetic_cohort(&CohortSpec::default(), 1).unwrap());
    }
}
