fn main() -> std::process::ExitCode {
    newscog_service::cli::main()
}
