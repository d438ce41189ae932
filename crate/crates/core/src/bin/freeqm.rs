fn main() { std::process::exit(freeqm::cli::main()) }
