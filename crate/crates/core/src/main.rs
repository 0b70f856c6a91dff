fn main() -> std::process::ExitCode {
    mooring_shoot::cli::run()
}
