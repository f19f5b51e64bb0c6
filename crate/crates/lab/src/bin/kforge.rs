fn main() { std::process::exit(kforge_lab::cli::run()); }
