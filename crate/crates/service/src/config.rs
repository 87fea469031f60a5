use std::path::{Path, PathBuf};
use std::sync::Arc;

use newscog::dialogue::{SessionEngine, SessionStore};
use newscog::ingest::NewsStore;
use newscog::lexicon::Lexicon;
use newscog::questgen::{Gazetteer, ScriptBuilder, Templates};
use newscog::similarity::SimParams;
use newscog::Result;

/// Resource paths. `None` selects the fixture bundled with the library.
#[derive(Debug, Clone, Default)]
pub struct ServiceConfig {
    pub lexicon: Option<PathBuf>,
    pub gazetteer: Option<PathBuf>,
    pub templates: Option<PathBuf>,
    pub sim_config: Option<PathBuf>,
    pub store: PathBuf,
}

impl ServiceConfig {
    pub fn with_store(store: impl Into<PathBuf>) -> Self {
        ServiceConfig {
            store: store.into(),
            ..Default::default()
        }
    }

    pub fn load(&self) -> Result<Resources> {
        let lexicon = match &self.lexicon {
            Some(p) => Lexicon::load_path(p)?,
            None => Lexicon::bundled(),
        };
        let gazetteer = match &self.gazetteer {
            Some(p) => Gazetteer::load_path(p)?,
            None => Gazetteer::bundled(),
        };
        let templates = match &self.templates {
            Some(p) => Templates::load_path(p)?,
            None => Templates::bundled(),
        };
        let params = match &self.sim_config {
            Some(p) => SimParams::from_config_path(p)?,
            None => SimParams::default(),
        };
        let store = self.store.clone();
        Ok(Resources {
            lexicon: Arc::new(lexicon),
            gazetteer,
            templates,
            params,
            news: NewsStore::open(store.join("news"))?,
            sessions: SessionStore::open(&store)?,
            store,
        })
    }
}

/// Everything a pipeline needs, loaded once and shared read-only.
#[derive(Debug, Clone)]
pub struct Resources {
    pub lexicon: Arc<Lexicon>,
    pub gazetteer: Gazetteer,
    pub templates: Templates,
    pub params: SimParams,
    pub news: NewsStore,
    pub sessions: SessionStore,
    pub store: PathBuf,
}

impl Resources {
    pub fn engine(&self) -> SessionEngine {
        SessionEngine::new(self.sessions.clone(), self.lexicon.clone(), self.params)
    }

    pub fn script_builder(&self) -> ScriptBuilder<'_> {
        ScriptBuilder::new(&self.lexicon, &self.gazetteer, &self.templates)
    }

    pub fn ml_dir(&self) -> PathBuf {
        self.store.join("ml")
    }

    pub fn dataset_path(&self) -> PathBuf {
        self.ml_dir().join("dataset.csv")
    }

    pub fn tree_path(&self) -> PathBuf {
        self.ml_dir().join("tree.json")
    }

    pub fn store(&self) -> &Path {
        &self.store
    }
}
