//! Airy function `Ai` and its derivative on the real line.
//!
//! Three regimes:
//! * `|t| ≤ 9`: Maclaurin series summed in double-double arithmetic. The
//!   series terms reach ~e^{2|t|^{3/2}/3} (≈ 7e7 at |t| = 9) while the
//!   function itself can be as small as 2.5e−9, so plain f64 summation
//!   would lose all significance; the ~32-digit accumulator keeps ≥ 15
//!   digits through the cancellation.
//! * `t > 9`: the exponentially decaying asymptotic series in
//!   `ζ = (2/3) t^{3/2}`, truncated at its smallest term (error
//!   ~e^{−2ζ} ≈ 2e−16 relative at the switchover, and smaller beyond).
//! * `t < −9`: the oscillatory asymptotic form with `cos/sin(ζ − π/4)`
//!   envelopes and the even/odd splits of the same coefficient sequence.

use crate::numeric::Dd;

/// Switchover between the Maclaurin core and the asymptotic wings. At this
/// radius both representations deliver ≥ 14 correct digits; pulling it
/// lower would leave the asymptotic error (~e^{−(4/3)|t|^{3/2}}) visible.
const SWITCHOVER: f64 = 9.0;

/// `Ai(0)` as a double-double pair.
const AI0: Dd = Dd {
    hi: 0.3550280538878172,
    lo: 2.05233632436212e-17,
};
/// `−Ai′(0)` as a double-double pair.
const AIP0_NEG: Dd = Dd {
    hi: 0.2588194037928068,
    lo: -2.522243111610832e-17,
};

/// `Ai(t)` and `Ai′(t)` in one evaluation.
pub fn airy_ai_pair(t: f64) -> (f64, f64) {
    if t.abs() <= SWITCHOVER {
        maclaurin_pair(t)
    } else if t > 0.0 {
        asymptotic_positive(t)
    } else {
        asymptotic_negative(t)
    }
}

/// Maclaurin evaluation: `Ai = Ai(0)·f + Ai′(0)·g` where `f` and `g` are
/// the two standard solutions of `y'' = t·y` with `f(0)=1, f'(0)=0` and
/// `g(0)=0, g'(0)=1`; their coefficients obey `a_{j+3} = a_j/((j+2)(j+3))`.
fn maclaurin_pair(t: f64) -> (f64, f64) {
    let t_dd = Dd::from_f64(t);
    let t3 = t_dd.mul(t_dd).mul(t_dd);

    // f   = Σ p_k,  p_0 = 1,   p_{k+1} = p_k t³/((3k+2)(3k+3))
    // f'  = Σ s_k,  s_1 = t²/2, s_{k+1} = s_k t³/((3k)(3k+2))
    // g   = Σ u_k,  u_0 = t,   u_{k+1} = u_k t³/((3k+3)(3k+4))
    // g'  = Σ w_k,  w_0 = 1,   w_{k+1} = w_k t³/((3k+1)(3k+3))
    let mut p = Dd::from_f64(1.0);
    let mut s = t_dd.mul(t_dd).div_f64(2.0);
    let mut u = t_dd;
    let mut w = Dd::from_f64(1.0);
    let mut f = p;
    let mut fp = s;
    let mut g = u;
    let mut gp = w;
    for k in 0..200u32 {
        let k = f64::from(k);
        p = p.mul(t3).div_f64((3.0 * k + 2.0) * (3.0 * k + 3.0));
        s = s.mul(t3).div_f64((3.0 * k + 3.0) * (3.0 * k + 5.0));
        u = u.mul(t3).div_f64((3.0 * k + 3.0) * (3.0 * k + 4.0));
        w = w.mul(t3).div_f64((3.0 * k + 1.0) * (3.0 * k + 3.0));
        f = f.add(p);
        fp = fp.add(s);
        g = g.add(u);
        gp = gp.add(w);
        let biggest = p.hi.abs().max(s.hi.abs()).max(u.hi.abs()).max(w.hi.abs());
        if biggest < 1e-42 {
            break;
        }
    }
    let ai = AI0.mul(f).sub(AIP0_NEG.mul(g));
    let aip = AI0.mul(fp).sub(AIP0_NEG.mul(gp));
    (ai.value(), aip.value())
}

/// Smallest-term-truncated sums `Σ (−1)^k u_k/ζ^k` and `Σ (−1)^k v_k/ζ^k`
/// with `u_{k+1}/u_k = (6k+1)(6k+3)(6k+5)/(216(k+1)(2k+1))` and
/// `v_k = (6k+1)/(1−6k) · u_k`.
fn asymptotic_sums(zeta: f64) -> (f64, f64) {
    let mut u_term = 1.0f64; // u_k / ζ^k, unsigned
    let mut sum_u = 1.0f64;
    let mut sum_v = 1.0f64;
    let mut sign = 1.0f64;
    for k in 0..60u32 {
        let kf = f64::from(k);
        let next = u_term * (6.0 * kf + 1.0) * (6.0 * kf + 3.0) * (6.0 * kf + 5.0)
            / (216.0 * (kf + 1.0) * (2.0 * kf + 1.0))
            / zeta;
        if next >= u_term {
            break; // asymptotic tail started growing: stop at smallest term
        }
        u_term = next;
        sign = -sign;
        let v_term = (6.0 * (kf + 1.0) + 1.0) / (1.0 - 6.0 * (kf + 1.0)) * u_term;
        sum_u += sign * u_term;
        sum_v += sign * v_term;
        if u_term < 1e-18 {
            break;
        }
    }
    (sum_u, sum_v)
}

fn asymptotic_positive(t: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * t.powf(1.5);
    let (sum_u, sum_v) = asymptotic_sums(zeta);
    let quarter_root = t.powf(0.25);
    let envelope = (-zeta).exp() / (2.0 * std::f64::consts::PI.sqrt());
    let ai = envelope / quarter_root * sum_u;
    let aip = -envelope * quarter_root * sum_v;
    (ai, aip)
}

/// Even/odd splits of the alternating-coefficient sums used on the
/// oscillatory side: `Σ (−1)^k c_{2k}/ζ^{2k}` and `Σ (−1)^k c_{2k+1}/ζ^{2k+1}`.
fn oscillatory_sums(zeta: f64) -> (f64, f64, f64, f64) {
    let mut u = vec![1.0f64];
    for k in 0..40usize {
        let kf = k as f64;
        let next = u[k] * (6.0 * kf + 1.0) * (6.0 * kf + 3.0) * (6.0 * kf + 5.0)
            / (216.0 * (kf + 1.0) * (2.0 * kf + 1.0));
        u.push(next);
    }
    let v: Vec<f64> = u
        .iter()
        .enumerate()
        .map(|(k, uk)| (6.0 * k as f64 + 1.0) / (1.0 - 6.0 * k as f64) * uk)
        .collect();
    let mut u_even = 0.0;
    let mut u_odd = 0.0;
    let mut v_even = 0.0;
    let mut v_odd = 0.0;
    let mut pow = 1.0f64; // ζ^{-j}
    let mut prev = f64::INFINITY;
    for (j, (uj, vj)) in u.iter().zip(&v).enumerate() {
        let mag = uj.abs() * pow;
        if mag >= prev {
            break;
        }
        prev = mag;
        let sign = if (j / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if j % 2 == 0 {
            u_even += sign * uj * pow;
            v_even += sign * vj * pow;
        } else {
            u_odd += sign * uj * pow;
            v_odd += sign * vj * pow;
        }
        pow /= zeta;
        if mag < 1e-18 {
            break;
        }
    }
    (u_even, u_odd, v_even, v_odd)
}

fn asymptotic_negative(t: f64) -> (f64, f64) {
    let z = -t;
    let zeta = 2.0 / 3.0 * z.powf(1.5);
    let (u_even, u_odd, v_even, v_odd) = oscillatory_sums(zeta);
    let phase = zeta - std::f64::consts::FRAC_PI_4;
    let (sin_p, cos_p) = phase.sin_cos();
    let quarter_root = z.powf(0.25);
    let sqrt_pi = std::f64::consts::PI.sqrt();
    let ai = (cos_p * u_even + sin_p * u_odd) / (sqrt_pi * quarter_root);
    let aip = (sin_p * v_even - cos_p * v_odd) * quarter_root / sqrt_pi;
    (ai, aip)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_rel(got: f64, expect: f64, tol: f64, label: &str) {
        let denom = expect.abs().max(1e-300);
        assert!(
            ((got - expect) / denom).abs() < tol,
            "{label}: got {got:e}, expected {expect:e}"
        );
    }

    #[test]
    fn values_at_origin() {
        let (ai, aip) = airy_ai_pair(0.0);
        assert_rel(ai, 0.3550280538878172392600632, 1e-16, "Ai(0)");
        assert_rel(aip, -0.2588194037928067984051836, 1e-16, "Ai'(0)");
    }

    #[test]
    fn series_region_reference_values() {
        let (ai, aip) = airy_ai_pair(9.0);
        assert_rel(ai, 2.471168430872489843289241e-9, 5e-15, "Ai(9)");
        assert_rel(aip, -7.480641389658946412759545e-9, 5e-15, "Ai'(9)");
    }

    #[test]
    fn decaying_asymptotic_reference_values() {
        let (ai, _) = airy_ai_pair(20.0);
        assert_rel(ai, 1.69167286867054031355356e-27, 1e-13, "Ai(20)");
        let (ai12, aip12) = airy_ai_pair(12.0);
        assert_rel(ai12, 1.393184688875360839049035e-13, 1e-13, "Ai(12)");
        assert_rel(aip12, -4.854736554985308462993654e-13, 1e-13, "Ai'(12)");
    }

    #[test]
    fn oscillatory_asymptotic_reference_values() {
        let (ai, aip) = airy_ai_pair(-12.0);
        assert_rel(ai, -0.06655517505437312947418966, 5e-14, "Ai(-12)");
        assert_rel(aip, 1.023110453367970729895984, 5e-14, "Ai'(-12)");
        let (ai40, aip40) = airy_ai_pair(-40.0);
        assert_rel(ai40, -0.04593392343795724963226072, 1e-12, "Ai(-40)");
        assert_rel(aip40, -1.389090875260718380975817, 1e-12, "Ai'(-40)");
    }

    #[test]
    fn branches_agree_at_switchover() {
        for t in [9.0f64, -9.0] {
            let series = maclaurin_pair(t);
            let asym = if t > 0.0 {
                asymptotic_positive(t)
            } else {
                asymptotic_negative(t)
            };
            assert_rel(asym.0, series.0, 5e-14, "Ai at switchover");
            assert_rel(asym.1, series.1, 5e-14, "Ai' at switchover");
        }
    }

    #[test]
    fn wronskian_identity_everywhere() {
        // Ai(t)Bi'(t) − Ai'(t)Bi(t) = 1/π is unavailable without Bi, but
        // the ODE itself is checkable: numerically differentiate Ai' and
        // compare with t·Ai(t).
        for &t in &[-30.0f64, -9.5, -4.0, -1.0, 0.5, 3.0, 8.5, 9.5, 15.0] {
            let h = 1e-5;
            let (_, dm2) = airy_ai_pair(t - 2.0 * h);
            let (_, dm1) = airy_ai_pair(t - h);
            let (ai, _) = airy_ai_pair(t);
            let (_, dp1) = airy_ai_pair(t + h);
            let (_, dp2) = airy_ai_pair(t + 2.0 * h);
            let second = (-dp2 + 8.0 * dp1 - 8.0 * dm1 + dm2) / (12.0 * h);
            let expect = t * ai;
            let scale = ai.abs().max(1e-6);
            assert!(
                (second - expect).abs() < 1e-8 * scale.max(1.0) + 1e-8,
                "ODE residual at t={t}: {second} vs {expect}"
            );
        }
    }
}
