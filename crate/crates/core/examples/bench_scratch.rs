use gsm_mimo::sim::{sweep, Mode, SweepVariable, SystemConfig};
use std::time::Instant;

fn main() {
    let mut c = SystemConfig::defaults();
    c.trials = 300;
    let t0 = Instant::now();
    let rep = sweep(
        &c,
        SweepVariable::Users,
        &[2, 4, 6, 8, 10, 12, 14, 16, 18, 20],
        &[Mode::Gsm, Mode::Baseline],
    )
    .unwrap();
    println!("users sweep 300 trials: {:?}", t0.elapsed());
    let mut max_impr: f64 = f64::MIN;
    for k in [2, 4, 6, 8, 10, 12, 14, 16, 18, 20] {
        let g = rep.stats(k, Mode::Gsm).unwrap();
        let b = rep.stats(k, Mode::Baseline).unwrap();
        let impr = g.ee.mean / b.ee.mean - 1.0;
        max_impr = max_impr.max(impr);
        let sep_p = (b.p_total.mean - g.p_total.mean)
            / (b.p_total.stderr.powi(2) + g.p_total.stderr.powi(2)).sqrt();
        let sep_c = (b.p_c.mean - g.p_c.mean)
            / (b.p_c.stderr.powi(2) + g.p_c.stderr.powi(2)).sqrt();
        let se_ok = g.se_total.mean
            <= b.se_total.mean + (g.se_total.stderr.powi(2) + b.se_total.stderr.powi(2)).sqrt();
        println!(
            "k={:2} EEimpr={:+.3} share={:.3} sepP={:8.1} sepC={:8.1} seRatio={:.3} seOk={} Pg={:7.3} Pb={:7.3}",
            k, impr, g.p_c.mean / g.p_total.mean, sep_p, sep_c,
            g.se_total.mean / b.se_total.mean, se_ok, g.p_total.mean, b.p_total.mean
        );
    }
    println!("max EE improvement: {max_impr:+.3}");
    let g10 = rep.stats(10, Mode::Gsm).unwrap();
    let b10 = rep.stats(10, Mode::Baseline).unwrap();
    println!("power ratio at K=10: {:.4}", b10.p_total.mean / g10.p_total.mean);
}
