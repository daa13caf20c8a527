//! Radix-2 complex FFT over power-of-two lengths, and its row-major
//! multidimensional extension. Unnormalized in both directions.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

/// Direction of the transform: `Forward` uses `exp(-2πi jk/M)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// A precomputed plan for one power-of-two length.
pub struct Radix2 {
    len: usize,
    twiddles: Vec<Complex64>,
    direction: Direction,
}

impl Radix2 {
    pub fn new(len: usize, direction: Direction) -> Self {
        assert!(len.is_power_of_two(), "FFT length {len} is not a power of two");
        let sign = match direction {
            Direction::Forward => -1.0,
            Direction::Inverse => 1.0,
        };
        let twiddles = (0..len / 2)
            .map(|k| Complex64::from_polar(1.0, sign * 2.0 * PI * k as f64 / len as f64))
            .collect();
        Radix2 {
            len,
            twiddles,
            direction,
        }
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn process(&self, buf: &mut [Complex64]) {
        let n = self.len;
        assert_eq!(buf.len(), n);
        if n <= 1 {
            return;
        }
        let bits = n.trailing_zeros();
        for i in 0..n {
            let j = i.reverse_bits() >> (usize::BITS - bits);
            if i < j {
                buf.swap(i, j);
            }
        }
        let mut half = 1;
        while half < n {
            let stride = n / (2 * half);
            for start in (0..n).step_by(2 * half) {
                for k in 0..half {
                    let w = self.twiddles[k * stride];
                    let a = buf[start + k];
                    let b = buf[start + k + half] * w;
                    buf[start + k] = a + b;
                    buf[start + k + half] = a - b;
                }
            }
            half *= 2;
        }
    }
}

/// In-place transform of a row-major array of shape `[m; d]` along every axis.
pub fn fft_cube(data: &mut [Complex64], m: usize, d: usize, direction: Direction) {
    assert_eq!(data.len(), m.pow(d as u32));
    let plan = Radix2::new(m, direction);
    let mut line = alloc::vec![Complex64::new(0.0, 0.0); m];
    for axis in 0..d {
        let stride = m.pow((d - 1 - axis) as u32);
        let block = stride * m;
        for outer in (0..data.len()).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                for (k, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + k * stride];
                }
                plan.process(&mut line);
                for (k, v) in line.iter().enumerate() {
                    data[base + k * stride] = *v;
                }
            }
        }
    }
}
