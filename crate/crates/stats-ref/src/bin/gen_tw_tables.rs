//! Writes the Tracy-Widom distribution tables as plain "x F" rows.
//!
//! Usage: gen-tw-tables [OUT_DIR]   (default: data)

use std::fs;
use std::io::Write;
use std::path::Path;

fn main() -> std::io::Result<()> {
    let out_dir = std::env::args().nth(1).unwrap_or_else(|| "data".into());
    fs::create_dir_all(&out_dir)?;
    let t = stats_ref::tw_tables();
    for (name, column) in [("tw_gue.txt", &t.f2), ("tw_goe.txt", &t.f1)] {
        let path = Path::new(&out_dir).join(name);
        let mut file = fs::File::create(&path)?;
        for (x, f) in t.x.iter().zip(column.iter()) {
            writeln!(file, "{x:.2} {f:.15e}")?;
        }
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}
