fn main() { std::process::exit(statorforge::cli::main()); }
