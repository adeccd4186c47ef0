use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::classify::{ClassifyError, LinearModel};
use crate::engine::{load_store, EngineError, SchemaCatalog, TableStore};
use crate::template::{load_templates, TemplateCatalog, TemplateError};
use crate::text::{build_value_index, Gazetteer, Lexicon, TextError, ValueIndex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LoadError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Text(#[from] TextError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Template(#[from] TemplateError),
}

/// One connected database: the catalog, the live rows and the lookup
/// tables the tagger derives from them.
#[derive(Debug, Clone)]
pub struct Database {
    catalog: SchemaCatalog,
    store: TableStore,
    lexicon: Lexicon,
    index: ValueIndex,
    gazetteer: Gazetteer,
}

impl Database {
    pub fn new(catalog: SchemaCatalog, store: TableStore, lexicon: Lexicon) -> Self {
        let index = build_value_index(&store);
        let gazetteer = Gazetteer::new(&catalog, &index, &lexicon);
        Database { catalog, store, lexicon, index, gazetteer }
    }

    pub fn load(catalog_file: &Path, data_dir: &Path, lexicon: Lexicon) -> Result<Self, LoadError> {
        let (catalog, store) = load_store(catalog_file, data_dir)?;
        Ok(Database::new(catalog, store, lexicon))
    }

    pub fn catalog(&self) -> &SchemaCatalog {
        &self.catalog
    }

    pub fn store(&self) -> &TableStore {
        &self.store
    }

    pub fn index(&self) -> &ValueIndex {
        &self.index
    }

    pub fn gazetteer(&self) -> &Gazetteer {
        &self.gazetteer
    }

    /// Mutable access to the rows; the value index is rebuilt when the guard drops.
    pub fn store_mut(&mut self) -> StoreGuard<'_> {
        StoreGuard { db: self }
    }

    fn refresh(&mut self) {
        self.index = build_value_index(&self.store);
        self.gazetteer = Gazetteer::new(&self.catalog, &self.index, &self.lexicon);
    }
}

pub struct StoreGuard<'a> {
    db: &'a mut Database,
}

impl std::ops::Deref for StoreGuard<'_> {
    type Target = TableStore;

    fn deref(&self) -> &TableStore {
        &self.db.store
    }
}

impl std::ops::DerefMut for StoreGuard<'_> {
    fn deref_mut(&mut self) -> &mut TableStore {
        &mut self.db.store
    }
}

impl Drop for StoreGuard<'_> {
    fn drop(&mut self) {
        self.db.refresh();
    }
}

/// The read-only parts of the pipeline: both classifiers and the field's templates.
#[derive(Debug, Clone)]
pub struct Engine {
    pub statement_model: LinearModel,
    pub linking_model: LinearModel,
    pub templates: TemplateCatalog,
}

impl Engine {
    pub fn load(statement_model: &Path, linking_model: &Path, templates: &Path) -> Result<Self, LoadError> {
        Ok(Engine {
            statement_model: LinearModel::load(statement_model)?,
            linking_model: LinearModel::load(linking_model)?,
            templates: load_templates(templates)?,
        })
    }
}

/// File locations for one bundled field, following the `data/` layout:
/// `db/<name>/{catalog.tsv,*.csv,templates.txt}`, `models/*.linmodel` and `lexicon.tsv`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssetPaths {
    pub catalog: PathBuf,
    pub data_dir: PathBuf,
    pub templates: PathBuf,
    pub statement_model: PathBuf,
    pub linking_model: PathBuf,
    pub lexicon: Option<PathBuf>,
}

impl AssetPaths {
    pub fn bundled(data_root: &Path, db: &str) -> Self {
        let dir = data_root.join("db").join(db);
        AssetPaths {
            catalog: dir.join("catalog.tsv"),
            templates: dir.join("templates.txt"),
            data_dir: dir,
            statement_model: data_root.join("models").join("statement.linmodel"),
            linking_model: data_root.join("models").join("linking.linmodel"),
            lexicon: Some(data_root.join("lexicon.tsv")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Assets {
    pub engine: Engine,
    pub db: Database,
}

impl Assets {
    pub fn load(paths: &AssetPaths) -> Result<Self, LoadError> {
        let lexicon = match &paths.lexicon {
            Some(p) => Lexicon::load(p)?,
            None => Lexicon::bundled(),
        };
        Ok(Assets {
            engine: Engine::load(&paths.statement_model, &paths.linking_model, &paths.templates)?,
            db: Database::load(&paths.catalog, &paths.data_dir, lexicon)?,
        })
    }
}
