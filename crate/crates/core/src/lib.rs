pub mod cnf;
pub mod diagonal;
pub mod goedel;
pub mod harness;
pub mod machine;
pub mod tableau;
