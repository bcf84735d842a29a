//! Vocabularies, formulas, the concrete formula language and the
//! symbol-level operations on formulas.

mod formula;
mod ops;
mod parse;
mod print;
mod vocab;

pub use formula::{Formula, Quantifier, Term};
pub(crate) use formula::fresh_var;
pub use ops::{dual_negation, nnf, rename, un_ex_sorts, RenameError};
pub use parse::{declarations, parse_formula, parse_formula_file, parse_open_formula, FormulaFile, ParseError};
pub use vocab::{FnProfile, Sort, SortSet, SymbolKind, Vocabulary, VocabularyError, RESERVED};
