fn main() {
    std::process::exit(qlog_core::cli::main());
}
