pub mod corpus;
pub mod decision;
pub mod fixtures;
pub mod gog;
pub mod group;
pub mod par;
pub mod quotient;
pub mod tree;
pub mod word;
