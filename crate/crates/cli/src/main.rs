fn main() {
    std::process::exit(qenergy::run(std::env::args_os()));
}
