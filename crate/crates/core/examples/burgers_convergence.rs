//! Refinement study for smooth Burgers data against the characteristics
//! solution, with Rusanov and Godunov fluxes.

use hypflux::cli::{self, Config};

const BASE: &str = "
[problem]
system = burgers1d

[initial]
kind = sine
mean = 0.5
amplitude = 0.25

[time]
final_time = 0.2

[study]
levels = 32, 64, 128, 256
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for flux in ["rusanov", "godunov"] {
        let config = Config::parse(&format!("{BASE}\n[scheme]\nflux = {flux}\n"))?;
        let outcome = cli::run_study_config(&config, 4)?;
        let r = &outcome.report;
        println!("== {flux}");
        print!("{}", r.table.to_csv());
        println!(
            "wbv_l1*sqrt(h) {:?}\nwbv_sq spread {:.3}\nmu0/h {:?}\nmu_t/sqrt(h) {:?}\nstudy pass: {}\n",
            r.wbv_scaling.wbv_l1_sqrt_h,
            r.wbv_scaling.wbv_sq_spread,
            r.mass_scaling.mu0_over_h,
            r.mass_scaling.mu_t_over_sqrt_h,
            r.pass
        );
    }
    Ok(())
}
