fn main() {
    // CLI fleshed out after the library settles.
    eprintln!("gamealg: not yet wired");
    std::process::exit(2);
}
