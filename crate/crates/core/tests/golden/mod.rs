//! Expression corpus shared by the parser tests and the acceptance suite.

#![allow(dead_code)]

use std::f64::consts::PI;

use lieflow_core::expr::Params;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Direct = fn(f64, f64, f64, f64, f64, f64) -> f64;

macro_rules! golden {
    ($($src:literal => |$t:ident, $x1:ident, $x2:ident, $x3:ident, $a:ident, $g:ident| $body:expr;)*) => {
        vec![$(($src, (|$t, $x1, $x2, $x3, $a, $g| { let _ = ($t, $x1, $x2, $x3, $a, $g); $body }) as Direct)),*]
    };
}

pub fn corpus() -> Vec<(&'static str, Direct)> {
    golden! {
        "1" => |t, x1, x2, x3, a, g| 1.0;
        "2.5e-3" => |t, x1, x2, x3, a, g| 2.5e-3;
        ".5" => |t, x1, x2, x3, a, g| 0.5;
        "pi" => |t, x1, x2, x3, a, g| PI;
        "t" => |t, x1, x2, x3, a, g| t;
        "x1" => |t, x1, x2, x3, a, g| x1;
        "x2" => |t, x1, x2, x3, a, g| x2;
        "x3" => |t, x1, x2, x3, a, g| x3;
        "-x1" => |t, x1, x2, x3, a, g| -x1;
        "--x2" => |t, x1, x2, x3, a, g| -(-x2);
        "x1 + x2" => |t, x1, x2, x3, a, g| x1 + x2;
        "x1 - x2 - x3" => |t, x1, x2, x3, a, g| (x1 - x2) - x3;
        "x1 * x2 / x3" => |t, x1, x2, x3, a, g| (x1 * x2) / x3;
        "x1 / x2 / x3" => |t, x1, x2, x3, a, g| (x1 / x2) / x3;
        "1 + 2 * 3" => |t, x1, x2, x3, a, g| 1.0 + 2.0 * 3.0;
        "(1 + 2) * 3" => |t, x1, x2, x3, a, g| (1.0 + 2.0) * 3.0;
        "-2^2" => |t, x1, x2, x3, a, g| -(2f64.powf(2.0));
        "2^3^2" => |t, x1, x2, x3, a, g| 2f64.powf(3f64.powf(2.0));
        "2^-1" => |t, x1, x2, x3, a, g| 2f64.powf(-1.0);
        "x1^2 + x2^2" => |t, x1, x2, x3, a, g| x1.powf(2.0) + x2.powf(2.0);
        "abs(x1)^0.5" => |t, x1, x2, x3, a, g| x1.abs().powf(0.5);
        "sin(x1)" => |t, x1, x2, x3, a, g| x1.sin();
        "cos(x2)" => |t, x1, x2, x3, a, g| x2.cos();
        "exp(x3)" => |t, x1, x2, x3, a, g| x3.exp();
        "log(1 + x1*x1)" => |t, x1, x2, x3, a, g| (1.0 + x1 * x1).ln();
        "sqrt(4 + x2)" => |t, x1, x2, x3, a, g| (4.0 + x2).sqrt();
        "abs(x3 - 1)" => |t, x1, x2, x3, a, g| (x3 - 1.0).abs();
        "sin(x1) * cos(x2) + x3" => |t, x1, x2, x3, a, g| x1.sin() * x2.cos() + x3;
        "x1 - g*t*x2" => |t, x1, x2, x3, a, g| x1 - (g * t) * x2;
        "g * x2" => |t, x1, x2, x3, a, g| g * x2;
        "a * x1" => |t, x1, x2, x3, a, g| a * x1;
        "exp(a*t) * x1" => |t, x1, x2, x3, a, g| (a * t).exp() * x1;
        "exp(-2*a*t)" => |t, x1, x2, x3, a, g| (-(2.0 * a * t)).exp();
        "cos(t)*x1 - sin(t)*x2" => |t, x1, x2, x3, a, g| t.cos() * x1 - t.sin() * x2;
        "sin(t)*x1 + cos(t)*x2" => |t, x1, x2, x3, a, g| t.sin() * x1 + t.cos() * x2;
        "x2 + t*x3 + t^2/2*0" => |t, x1, x2, x3, a, g| (x2 + t * x3) + (t.powf(2.0) / 2.0) * 0.0;
        "1 + x1^2 + 0.5*x2" => |t, x1, x2, x3, a, g| (1.0 + x1.powf(2.0)) + 0.5 * x2;
        "sin(x1) + x2*x3" => |t, x1, x2, x3, a, g| x1.sin() + x2 * x3;
        "((x1))" => |t, x1, x2, x3, a, g| x1;
        "x1*(x2 + x3)*(x1 - x3)" => |t, x1, x2, x3, a, g| (x1 * (x2 + x3)) * (x1 - x3);
        "1/(1 + x1^2)" => |t, x1, x2, x3, a, g| 1.0 / (1.0 + x1.powf(2.0));
        "exp(sin(x1))" => |t, x1, x2, x3, a, g| x1.sin().exp();
        "sqrt(abs(x1*x2))" => |t, x1, x2, x3, a, g| (x1 * x2).abs().sqrt();
        "log(exp(x3))" => |t, x1, x2, x3, a, g| x3.exp().ln();
        "2*pi*t" => |t, x1, x2, x3, a, g| (2.0 * PI) * t;
        "x3 / 4 + x2 / 8" => |t, x1, x2, x3, a, g| x3 / 4.0 + x2 / 8.0;
        "-x1^2" => |t, x1, x2, x3, a, g| -(x1.powf(2.0));
        "(-x1)^2" => |t, x1, x2, x3, a, g| (-x1).powf(2.0);
        "t*(1 + t)*x3" => |t, x1, x2, x3, a, g| (t * (1.0 + t)) * x3;
        "3 - -x2" => |t, x1, x2, x3, a, g| 3.0 - (-x2);
    }
}

pub const POINTS: [(f64, [f64; 3]); 3] = [(0.0, [0.3, -0.7, 0.2]), (0.45, [1.2, 0.5, -0.9]), (1.0, [-0.25, 2.0, 0.75])];

pub fn params() -> Params {
    Params::from([("a".to_string(), 0.5), ("g".to_string(), 2.0)])
}

/// Random strings of at most 256 characters mixing grammar tokens with
/// arbitrary characters.
pub fn fuzz_inputs(seed: u64, n: usize) -> Vec<String> {
    const ALPHABET: &[&str] = &[
        "x1", "x2", "x3", "t", "pi", "sin", "cos", "exp", "log", "sqrt", "abs", "(", ")", "+", "-", "*", "/", "^", " ",
        "0", "1", "2.5", "1e308", "e", ".", "$", "é", "x", "_a", "9e-9", "((", "))",
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let mut s = String::new();
            let target = rng.gen_range(0..=256);
            while s.chars().count() < target {
                if rng.gen_bool(0.1) {
                    s.push(char::from_u32(rng.gen_range(32..0x2fff)).unwrap_or('?'));
                } else {
                    s.push_str(ALPHABET[rng.gen_range(0..ALPHABET.len())]);
                }
            }
            s.chars().take(256).collect()
        })
        .collect()
}
