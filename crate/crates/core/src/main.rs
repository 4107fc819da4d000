fn main() {
    pin_blas_kernels();
    let code = rdlab::cli::main_with(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}

/// OpenBLAS picks its kernels when the library is loaded, from the
/// environment. Its runtime choice of AVX-512 kernels misbehaves on some
/// virtualized hosts (dense eigensolves at n >= 1000 stall or go wrong), so
/// unless the caller chose a core type we restart with Haswell kernels and
/// one thread.
fn pin_blas_kernels() {
    #[cfg(unix)]
    {
        use std::os::unix::process::CommandExt;
        if std::env::var_os("OPENBLAS_CORETYPE").is_some() {
            return;
        }
        let Ok(exe) = std::env::current_exe() else { return };
        let mut cmd = std::process::Command::new(exe);
        cmd.args(std::env::args_os().skip(1)).env("OPENBLAS_CORETYPE", "Haswell");
        if std::env::var_os("OPENBLAS_NUM_THREADS").is_none() {
            cmd.env("OPENBLAS_NUM_THREADS", "1");
        }
        // exec only returns on failure; carry on with the default kernels
        let _ = cmd.exec();
    }
}
