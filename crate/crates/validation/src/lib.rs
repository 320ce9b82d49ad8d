//! Holds the `acceptance` test target; run it with
//! `cargo test -p shift-equiv-validation --test acceptance`.
