use vorcpx::{complex::enumerate_cells, voronoi::classify_perfect_forms, Group};

struct StderrLog;
impl log::Log for StderrLog {
    fn enabled(&self, _: &log::Metadata) -> bool { true }
    fn log(&self, r: &log::Record) { eprintln!("[{:?}] {}", std::time::Instant::now(), r.args()); }
    fn flush(&self) {}
}

#[test]
fn gl5_cardinalities() {
    static L: StderrLog = StderrLog;
    log::set_logger(&L).ok();
    log::set_max_level(log::LevelFilter::Debug);
    let t = std::time::Instant::now();
    let c = classify_perfect_forms(5, Group::Gl, &Default::default()).unwrap();
    eprintln!("classified in {:?}", t.elapsed());
    let cx = enumerate_cells(&c, Group::Gl, &Default::default()).unwrap();
    eprintln!("GL5 complex in {:?}", t.elapsed());
    let star: Vec<usize> = (4..=14).map(|d| cx.sigma_star_count(d)).collect();
    eprintln!("sigma* = {star:?}");
}
