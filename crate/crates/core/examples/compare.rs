//! Cross-validate C4.5 on a synthetic cohort and print the report table.
//!
//! Run: cargo run -p retain --example compare

use retain::{c45, eval, schema, AlgoSpec};

fn main() -> retain::Result<()> {
    let data = schema::generate_synthetic(432, 34.0 / 432.0, 42)?;
    let report = eval::cross_validate(
        &data,
        &AlgoSpec::C45(c45::C45Params::default()),
        10, // folds
        7,  // seed
        0,  // positive class index (dropout)
    )?;
    println!("{}", eval::render_report_table(std::slice::from_ref(&report)));
    Ok(())
}
