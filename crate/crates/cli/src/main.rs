fn main() {
    std::process::exit(abstain_ht::run(std::env::args_os()));
}
