//! Brute-force references for the statistics and SSIM tests.

use transfid_core::iqa::SsimParams;
use transfid_core::Volume3D;

/// Gamma at positive half-integers from the recurrence.
pub fn gamma_half(k2: u32) -> f64 {
    // Gamma(k2 / 2)
    let mut g = if k2 % 2 == 0 { 1.0 } else { std::f64::consts::PI.sqrt() };
    let mut x = if k2 % 2 == 0 { 1.0 } else { 0.5 };
    while 2.0 * x < k2 as f64 {
        g *= x;
        x += 1.0;
    }
    g
}

/// Two-sided p by composite Simpson integration of the t density on [0, |t|].
pub fn p_by_integration(t: f64, df: u32) -> f64 {
    let nu = df as f64;
    let c = gamma_half(df + 1) / ((nu * std::f64::consts::PI).sqrt() * gamma_half(df));
    let f = |x: f64| c * (1.0 + x * x / nu).powf(-(nu + 1.0) / 2.0);
    let n = 200_000;
    let h = t.abs() / n as f64;
    let mut s = f(0.0) + f(t.abs());
    for k in 1..n {
        s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(k as f64 * h);
    }
    1.0 - 2.0 * s * h / 3.0
}

/// Window statistics computed directly from the weighted voxels in the
/// clipped cube around each centre.
pub fn naive_ssim_map(a: &Volume3D, b: &Volume3D, p: &SsimParams) -> Vec<f64> {
    let [nx, ny, nz] = a.dims();
    let h = p.half_width as i64;
    let g = |k: i64| (-((k * k) as f64) / (2.0 * p.sigma * p.sigma)).exp();
    let mut out = Vec::with_capacity(nx * ny * nz);
    for z in 0..nz as i64 {
        for y in 0..ny as i64 {
            for x in 0..nx as i64 {
                let mut cells = Vec::new();
                for dz in -h..=h {
                    for dy in -h..=h {
                        for dx in -h..=h {
                            let (u, v, w) = (x + dx, y + dy, z + dz);
                            if u < 0 || v < 0 || w < 0 || u >= nx as i64 || v >= ny as i64 || w >= nz as i64 {
                                continue;
                            }
                            let (u, v, w) = (u as usize, v as usize, w as usize);
                            cells.push((g(dx) * g(dy) * g(dz), a.get(u, v, w), b.get(u, v, w)));
                        }
                    }
                }
                let total: f64 = cells.iter().map(|c| c.0).sum();
                let ma: f64 = cells.iter().map(|c| c.0 * c.1).sum::<f64>() / total;
                let mb: f64 = cells.iter().map(|c| c.0 * c.2).sum::<f64>() / total;
                let va: f64 = cells.iter().map(|c| c.0 * (c.1 - ma).powi(2)).sum::<f64>() / total;
                let vb: f64 = cells.iter().map(|c| c.0 * (c.2 - mb).powi(2)).sum::<f64>() / total;
                let cov: f64 = cells.iter().map(|c| c.0 * (c.1 - ma) * (c.2 - mb)).sum::<f64>() / total;
                let (c1, c2) = (p.c1(), p.c2());
                out.push(((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2)));
            }
        }
    }
    out
}
