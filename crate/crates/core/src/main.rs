use std::collections::HashMap;

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let env: HashMap<String, String> = std::env::vars().collect();
    std::process::exit(popper_core::cli::run_cli(&argv, &env));
}
