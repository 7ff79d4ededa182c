pub mod error;
pub mod ext;
pub mod fpt;
pub mod generators;
pub mod geometry;
pub mod instance;
pub mod oracle;
pub mod pas;
