pub mod catalog;
pub mod connection;
pub mod dual;
pub mod engine;
pub mod error;
pub mod field;
pub mod frame;
pub mod linalg;
pub mod local;
pub mod maps;
pub mod report;
pub mod suite;
pub mod triad;
pub mod verify;
