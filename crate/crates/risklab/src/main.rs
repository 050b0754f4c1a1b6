fn main() {
    // die silently when the output pipe closes, like standard unix tools
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    std::process::exit(risklab::cli::run());
}
