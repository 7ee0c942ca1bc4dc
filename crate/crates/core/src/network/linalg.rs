//! Planar complex matrix products on top of real `dgemm`.

/// Strided view of a complex matrix stored as separate real/imaginary planes.
/// `im == None` means the matrix is purely real.
#[derive(Clone, Copy)]
pub(crate) struct CView<'a> {
    pub re: &'a [f64],
    pub im: Option<&'a [f64]>,
    pub rs: isize,
    pub cs: isize,
    pub conj: bool,
}

impl<'a> CView<'a> {
    /// Row-major `rows × cols`.
    pub fn rows(re: &'a [f64], im: Option<&'a [f64]>, cols: usize) -> Self {
        CView {
            re,
            im,
            rs: cols as isize,
            cs: 1,
            conj: false,
        }
    }

    /// Transpose of a row-major matrix with `cols` columns.
    pub fn transposed(re: &'a [f64], im: Option<&'a [f64]>, cols: usize) -> Self {
        CView {
            re,
            im,
            rs: 1,
            cs: cols as isize,
            conj: false,
        }
    }

    pub fn conj(mut self) -> Self {
        self.conj = !self.conj;
        self
    }

    fn im_sign(&self) -> f64 {
        if self.conj {
            -1.0
        } else {
            1.0
        }
    }

    /// Contiguous row-major copy of `re + s·im` (`s` = ±1 from conjugation).
    fn packed_sum(&self, rows: usize, cols: usize) -> Vec<f64> {
        let im = self.im.expect("packed_sum needs an imaginary plane");
        let s = self.im_sign();
        let mut out = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                let idx = (r as isize * self.rs + c as isize * self.cs) as usize;
                out.push(self.re[idx] + s * im[idx]);
            }
        }
        out
    }
}

/// `c ← alpha·a·b + beta·c` for real strided operands; `c` is row-major `m × n`.
#[allow(clippy::too_many_arguments)]
fn dgemm(
    m: usize,
    k: usize,
    n: usize,
    alpha: f64,
    a: &[f64],
    rsa: isize,
    csa: isize,
    b: &[f64],
    rsb: isize,
    csb: isize,
    beta: f64,
    c: &mut [f64],
) {
    debug_assert!(c.len() >= m * n);
    if m == 0 || n == 0 {
        return;
    }
    // SAFETY: callers pass views whose extents cover m×k and k×n under the
    // given strides, and `c` holds m×n contiguous values.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            alpha,
            a.as_ptr(),
            rsa,
            csa,
            b.as_ptr(),
            rsb,
            csb,
            beta,
            c.as_mut_ptr(),
            n as isize,
            1,
        );
    }
}

/// `C = op(A)·op(B)` with `A: m × k`, `B: k × n`, `C` row-major `m × n`.
///
/// Fully complex products use three real multiplications
/// (`T1 = Ar·Br`, `T2 = Ai·Bi`, `T3 = (Ar+Ai)(Br+Bi)`).
pub(crate) fn cgemm(
    m: usize,
    k: usize,
    n: usize,
    a: CView<'_>,
    b: CView<'_>,
    c_re: &mut [f64],
    c_im: &mut [f64],
) {
    match (a.im, b.im) {
        (None, None) => {
            dgemm(m, k, n, 1.0, a.re, a.rs, a.cs, b.re, b.rs, b.cs, 0.0, c_re);
            c_im[..m * n].iter_mut().for_each(|v| *v = 0.0);
        }
        (None, Some(bi)) => {
            dgemm(m, k, n, 1.0, a.re, a.rs, a.cs, b.re, b.rs, b.cs, 0.0, c_re);
            dgemm(m, k, n, b.im_sign(), a.re, a.rs, a.cs, bi, b.rs, b.cs, 0.0, c_im);
        }
        (Some(ai), None) => {
            dgemm(m, k, n, 1.0, a.re, a.rs, a.cs, b.re, b.rs, b.cs, 0.0, c_re);
            dgemm(m, k, n, a.im_sign(), ai, a.rs, a.cs, b.re, b.rs, b.cs, 0.0, c_im);
        }
        (Some(ai), Some(bi)) => {
            let sab = a.im_sign() * b.im_sign();
            let a_sum = a.packed_sum(m, k);
            let b_sum = b.packed_sum(k, n);
            let mut t2 = vec![0.0; m * n];
            dgemm(m, k, n, 1.0, a.re, a.rs, a.cs, b.re, b.rs, b.cs, 0.0, c_re);
            dgemm(m, k, n, sab, ai, a.rs, a.cs, bi, b.rs, b.cs, 0.0, &mut t2);
            dgemm(m, k, n, 1.0, &a_sum, k as isize, 1, &b_sum, n as isize, 1, 0.0, c_im);
            for ((cr, ci), t) in c_re[..m * n].iter_mut().zip(c_im[..m * n].iter_mut()).zip(&t2) {
                *ci -= *cr + *t;
                *cr -= *t;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Complex;

    fn naive(
        m: usize,
        k: usize,
        n: usize,
        a: impl Fn(usize, usize) -> Complex,
        b: impl Fn(usize, usize) -> Complex,
    ) -> Vec<Complex> {
        let mut out = vec![Complex::ZERO; m * n];
        for i in 0..m {
            for j in 0..n {
                for l in 0..k {
                    out[i * n + j] += a(i, l) * b(l, j);
                }
            }
        }
        out
    }

    #[test]
    fn matches_naive_product_with_transposes_and_conjugates() {
        let (m, k, n) = (5, 7, 3);
        let ar: Vec<f64> = (0..m * k).map(|i| (i as f64 * 0.37).sin()).collect();
        let ai: Vec<f64> = (0..m * k).map(|i| (i as f64 * 0.11).cos()).collect();
        // B stored as n × k, used transposed and conjugated
        let br: Vec<f64> = (0..n * k).map(|i| (i as f64 * 0.23).cos()).collect();
        let bi: Vec<f64> = (0..n * k).map(|i| (i as f64 * 0.71).sin()).collect();
        let mut cr = vec![0.0; m * n];
        let mut ci = vec![0.0; m * n];
        cgemm(
            m,
            k,
            n,
            CView::rows(&ar, Some(&ai), k),
            CView::transposed(&br, Some(&bi), k).conj(),
            &mut cr,
            &mut ci,
        );
        let want = naive(
            m,
            k,
            n,
            |i, l| Complex::new(ar[i * k + l], ai[i * k + l]),
            |l, j| Complex::new(br[j * k + l], -bi[j * k + l]),
        );
        for (idx, w) in want.iter().enumerate() {
            assert!((cr[idx] - w.re).abs() < 1e-12 && (ci[idx] - w.im).abs() < 1e-12);
        }

        // real left operand
        cgemm(
            m,
            k,
            n,
            CView::rows(&ar, None, k),
            CView::transposed(&br, Some(&bi), k),
            &mut cr,
            &mut ci,
        );
        let want = naive(
            m,
            k,
            n,
            |i, l| Complex::real(ar[i * k + l]),
            |l, j| Complex::new(br[j * k + l], bi[j * k + l]),
        );
        for (idx, w) in want.iter().enumerate() {
            assert!((cr[idx] - w.re).abs() < 1e-12 && (ci[idx] - w.im).abs() < 1e-12);
        }
    }
}
