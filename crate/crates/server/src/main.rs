fn main() -> std::process::ExitCode {
    oekg_server::cli::main()
}
