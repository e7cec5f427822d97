fn main() -> std::process::ExitCode {
    mspec_core::cli::main_entry()
}
