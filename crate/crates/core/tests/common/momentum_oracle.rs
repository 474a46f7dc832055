//! Brute-force biphoton amplitudes built in wavevector space.
//!
//! The pump spectrum of a Gaussian is sampled on a square grid of transverse
//! wavevectors `Q = q_s + q_i`, each plane wave is carried to the detector
//! plane with its paraxial phase, and the sum is taken numerically. The
//! relative wavevector `q = (q_s - q_i)/2` only enters through a Gaussian
//! Fresnel integral, which is applied in closed form. Beam-splitter routing
//! is done photon by photon: transmission keeps the wavevector, reflection
//! flips `q_y` and carries a factor `i r`.

use std::f64::consts::PI;

use multimode_hom::Complex64;

const I: Complex64 = Complex64::new(0.0, 1.0);

pub struct MomentumOracle {
    /// Pump waist at the crystal, mm.
    pub waist_mm: f64,
    /// Pump wavenumber, rad/mm.
    pub k_pump: f64,
    /// Crystal to detector distance, mm.
    pub z_mm: f64,
    pub t: f64,
    pub r: f64,
    /// Samples per wavevector axis.
    pub grid: usize,
}

impl MomentumOracle {
    pub fn new(waist_mm: f64, wavelength_nm: f64, z_mm: f64, t: f64, grid: usize) -> Self {
        Self {
            waist_mm,
            k_pump: 2.0 * PI / (wavelength_nm * 1e-6),
            z_mm,
            t,
            r: (1.0 - t * t).sqrt(),
            grid,
        }
    }

    /// Unitary-convention spectrum of the unit-power Gaussian at its waist.
    fn spectrum(&self, qx: f64, qy: f64) -> f64 {
        let w = self.waist_mm;
        w / (2.0 * PI).sqrt() * (-(qx * qx + qy * qy) * w * w / 4.0).exp()
    }

    /// Pump field at the detector plane from the sampled spectrum.
    fn pump_at_detector(&self, u: (f64, f64)) -> Complex64 {
        let q_max = 8.0 / self.waist_mm;
        let n = self.grid;
        let dq = 2.0 * q_max / n as f64;
        let mut sum = Complex64::new(0.0, 0.0);
        for i in 0..n {
            let qx = -q_max + (i as f64 + 0.5) * dq;
            for j in 0..n {
                let qy = -q_max + (j as f64 + 0.5) * dq;
                let phase = qx * u.0 + qy * u.1 - (qx * qx + qy * qy) * self.z_mm / (2.0 * self.k_pump);
                sum += self.spectrum(qx, qy) * Complex64::from_polar(1.0, phase);
            }
        }
        sum * dq * dq / (2.0 * PI)
    }

    /// Signal at `rho_s`, idler at `rho_i`, no beam splitter.
    pub fn biphoton(&self, rho_s: (f64, f64), rho_i: (f64, f64)) -> Complex64 {
        let dx = rho_s.0 - rho_i.0;
        let dy = rho_s.1 - rho_i.1;
        let fresnel = Complex64::from_polar(1.0, self.k_pump * (dx * dx + dy * dy) / (8.0 * self.z_mm));
        fresnel * self.pump_at_detector((0.5 * (rho_s.0 + rho_i.0), 0.5 * (rho_s.1 + rho_i.1)))
    }

    fn mirror(p: (f64, f64)) -> (f64, f64) {
        (p.0, -p.1)
    }

    /// Polarization-resolved amplitude `[hh, hv, vh, vv]` ordered as
    /// (detector 1, detector 2); `swap` when detector 1 holds the idler.
    fn routed(&self, pol: [Complex64; 4], spatial: Complex64, swap: bool) -> [Complex64; 4] {
        let p = if swap { [pol[0], pol[2], pol[1], pol[3]] } else { pol };
        p.map(|c| c * spatial)
    }

    /// Both photons transmitted: signal to detector 1 at `r1`, idler to detector 2 at `r2`.
    pub fn tt(&self, pol: [Complex64; 4], r1: (f64, f64), r2: (f64, f64)) -> [Complex64; 4] {
        self.routed(pol, self.t * self.t * self.biphoton(r1, r2), false)
    }

    /// Both reflected: idler to detector 1, signal to detector 2.
    pub fn rr(&self, pol: [Complex64; 4], r1: (f64, f64), r2: (f64, f64)) -> [Complex64; 4] {
        let amp = (I * self.r) * (I * self.r);
        self.routed(pol, amp * self.biphoton(Self::mirror(r2), Self::mirror(r1)), true)
    }

    /// Both photons in port 1 (`port_one`) or port 2, detectors A at `ra`, B at `rb`.
    pub fn same_port(&self, pol: [Complex64; 4], port_one: bool, ra: (f64, f64), rb: (f64, f64)) -> [Complex64; 4] {
        let c = self.t * (I * self.r);
        let (first, second) = if port_one {
            // Signal transmitted, idler reflected into port 1.
            (self.biphoton(ra, Self::mirror(rb)), self.biphoton(rb, Self::mirror(ra)))
        } else {
            (self.biphoton(Self::mirror(ra), rb), self.biphoton(Self::mirror(rb), ra))
        };
        let a = self.routed(pol, c * first, false);
        let b = self.routed(pol, c * second, true);
        [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
    }
}
