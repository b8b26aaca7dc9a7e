//! Host crate for the `acceptance` test target, which prints one PASS/FAIL
//! line per acceptance criterion. Run it with
//! `cargo test -p subregkl-validation --test acceptance`.
