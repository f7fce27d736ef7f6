//! Hidden `geotopics fixture`: regenerate the bundled synthetic city so the
//! committed files can be reproduced from the generator.

use std::fs;
use std::path::Path;

use geotopics::fixture::generate_fixture;
use geotopics::{Error, Result};

pub const BUSINESS_FILE: &str = "business.json";
pub const REVIEW_FILE: &str = "review.json";
pub const DISTRICTS_FILE: &str = "districts.csv";

pub fn run(out: &Path, seed: u64) -> Result<()> {
    let fixture = generate_fixture(seed);
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let write = |name: &str, body: &str| -> Result<()> {
        let path = out.join(name);
        fs::write(&path, body).map_err(|e| Error::io(path, e))
    };
    write(BUSINESS_FILE, &fixture.businesses_jsonl)?;
    write(REVIEW_FILE, &fixture.reviews_jsonl)?;
    write(DISTRICTS_FILE, &fixture.districts_csv)?;

    println!(
        "fixture city written to {} (seed {seed}): {} businesses, {} reviews",
        out.display(),
        fixture.businesses_jsonl.lines().count(),
        fixture.reviews_jsonl.lines().count()
    );
    Ok(())
}
