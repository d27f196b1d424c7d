fn main() {
    let out = hermite_obs_cli::run(std::env::args_os());
    hermite_obs_cli::print(&out);
    std::process::exit(out.code);
}
