use maxdens::cli::{error_line, exit_code, run};

fn main() {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    if let Err(err) = run(&argv) {
        if let Some(clap_err) = err.downcast_ref::<clap::Error>() {
            // Help and version go to stdout with status 0. Usage errors exit 1
            // because 2 is reserved for infeasible constraints.
            if !clap_err.use_stderr() {
                clap_err.exit();
            }
            let _ = clap_err.print();
            std::process::exit(1);
        }
        eprintln!("{}", error_line(&err));
        std::process::exit(exit_code(&err));
    }
}
