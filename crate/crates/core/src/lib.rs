pub mod cclo;
pub mod cli;
pub mod coloring;
pub mod decorated;
pub mod error;
pub mod gen;
pub mod io;
pub mod ramsey;
pub mod relstruct;
pub mod suite;
pub mod tree;
