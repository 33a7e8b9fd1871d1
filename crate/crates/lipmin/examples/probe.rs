fn main() {
    let args: Vec<String> = std::env::args().collect();
    let suite = args.get(1).map(|s| s.as_str()).unwrap_or("all");
    let seed: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(20240810);
    let t0 = std::time::Instant::now();
    let r = lipmin::suite::run_suite(suite, 10_000, seed).unwrap();
    print!("{}", r.format_lines());
    println!("elapsed {:?}", t0.elapsed());
}
