fn main() {
    let argv: Vec<String> = std::env::args().collect();
    std::process::exit(embedlab_cli::run(&argv));
}
