fn main() {
    std::process::exit(reeb_lab::cli::run(std::env::args()));
}
