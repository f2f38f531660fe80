//! Floating-point abstraction shared by every numerical routine in the crate.
//!
//! Estimators, losses and networks are written once against [`Scalar`] and
//! instantiated for `f32` and `f64`. Random draws are made in `f64` and cast,
//! so a given seed produces the same stream regardless of precision.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign};

pub trait Scalar:
    Float
    + FromPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` constant. Panics only if the value is unrepresentable,
    /// which cannot happen for `f32`/`f64`.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// `C <- alpha * A B + beta * C` for strided row/column layouts, where
    /// `A` is `m x k`, `B` is `k x n` and `C` is `m x n`. When `beta` is zero
    /// the prior contents of `C` are ignored.
    #[allow(clippy::too_many_arguments)]
    fn gemm(m: usize, k: usize, n: usize, alpha: Self, a: Strided<'_, Self>, b: Strided<'_, Self>, beta: Self, c: StridedMut<'_, Self>);
}

/// Read-only matrix view: data plus row and column strides.
#[derive(Clone, Copy)]
pub struct Strided<'a, T> {
    pub data: &'a [T],
    pub rs: usize,
    pub cs: usize,
}

pub struct StridedMut<'a, T> {
    pub data: &'a mut [T],
    pub rs: usize,
    pub cs: usize,
}

impl<'a, T> Strided<'a, T> {
    pub fn row_major(data: &'a [T], cols: usize) -> Self {
        Self { data, rs: cols, cs: 1 }
    }

    /// The transpose of a row-major matrix with `cols` columns.
    pub fn transposed(data: &'a [T], cols: usize) -> Self {
        Self { data, rs: 1, cs: cols }
    }

    fn covers(&self, rows: usize, cols: usize) -> bool {
        rows == 0 || cols == 0 || (rows - 1) * self.rs + (cols - 1) * self.cs < self.data.len()
    }
}

impl<'a, T> StridedMut<'a, T> {
    pub fn row_major(data: &'a mut [T], cols: usize) -> Self {
        Self { data, rs: cols, cs: 1 }
    }
}

macro_rules! impl_gemm {
    ($t:ty, $f:path) => {
        impl Scalar for $t {
            #[allow(clippy::too_many_arguments)]
            fn gemm(m: usize, k: usize, n: usize, alpha: $t, a: Strided<'_, $t>, b: Strided<'_, $t>, beta: $t, c: StridedMut<'_, $t>) {
                assert!(a.covers(m, k) && b.covers(k, n), "gemm operand out of bounds");
                let c_view = Strided { data: &*c.data, rs: c.rs, cs: c.cs };
                assert!(c_view.covers(m, n), "gemm output out of bounds");
                // SAFETY: every index touched lies inside the checked slices,
                // and `c` is uniquely borrowed.
                unsafe {
                    $f(
                        m, k, n, alpha,
                        a.data.as_ptr(), a.rs as isize, a.cs as isize,
                        b.data.as_ptr(), b.rs as isize, b.cs as isize,
                        beta,
                        c.data.as_mut_ptr(), c.rs as isize, c.cs as isize,
                    );
                }
            }
        }
    };
}

impl_gemm!(f32, matrixmultiply::sgemm);
impl_gemm!(f64, matrixmultiply::dgemm);
