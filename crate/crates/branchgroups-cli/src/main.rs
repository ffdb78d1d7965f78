fn main() {
    std::process::exit(branchgroups_cli::run(std::env::args_os()));
}
