//! Short-time Fourier transform of a chirp, its energy identity and inversion.
//!
//! ```bash
//! cargo run -p tfq --example stft
//! ```

use std::f64::consts::PI;

use num_complex::Complex64;
use tfq::lattice::{Grid, Signal};
use tfq::timefreq::{istft, stft};

fn main() -> tfq::Result<()> {
    let grid = Grid::new(16, 1)?;
    let chirp = Signal::from_fn(grid, |n| {
        Complex64::from_polar(1.0, PI * (n * n) as f64 / 16.0)
    });
    let window = Signal::gaussian(grid);
    let v = stft(&chirp, &window)?;

    println!("|V(x, xi)| for the discrete chirp (rows x, columns xi):");
    for x in 0..16 {
        let row: String = (0..16)
            .map(|xi| {
                let m = v.values()[x * 16 + xi].norm();
                if m > 0.5 { '#' } else if m > 0.2 { '+' } else { '.' }
            })
            .collect();
        println!("  {row}");
    }

    let energy: f64 = v.values().iter().map(|z| z.norm_sqr()).sum();
    println!("sum |V|^2 = {energy:.12}, |f|^2 |phi|^2 = {:.12}", chirp.norm_sqr() * window.norm_sqr());
    let back = istft(&v, &window)?;
    println!("inversion error {:.2e}", back.max_abs_diff(&chirp));
    Ok(())
}
