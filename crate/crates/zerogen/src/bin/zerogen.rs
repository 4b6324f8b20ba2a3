//! `zerogen COUNT OUTPUT` writes the first COUNT zeta zero ordinates.

use std::path::PathBuf;
use std::process::ExitCode;

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let [count, output] = args.as_slice() else {
        eprintln!("usage: zerogen COUNT OUTPUT");
        return ExitCode::from(2);
    };
    let Ok(count) = count.parse::<usize>() else {
        eprintln!("zerogen: COUNT must be a non-negative integer, got {count:?}");
        return ExitCode::from(2);
    };
    let zeros = match mertens_zerogen::first_zeros(count) {
        Ok(z) => z,
        Err(e) => {
            eprintln!("zerogen: {e}");
            return ExitCode::from(1);
        }
    };
    if let Err(e) = mertens_zerogen::write_table(&PathBuf::from(output), &zeros) {
        eprintln!("zerogen: {output}: {e}");
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
