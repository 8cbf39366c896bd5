pub mod bases;
pub mod cli;
pub mod family;
pub mod oracle;
pub mod precise;
pub mod solver;
pub mod words;
