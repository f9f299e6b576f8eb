fn main() -> std::process::ExitCode {
    weibrec::cli::main()
}
