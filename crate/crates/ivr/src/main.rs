fn main() {
    env_logger::init();
    if let Err(e) = ivr::cli::run() {
        eprintln!("error: {e}");
        std::process::exit(if e.is_usage() { 2 } else { 1 });
    }
}
