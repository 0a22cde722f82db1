fn main() -> std::process::ExitCode {
    facultymetrics::cli::main()
}
