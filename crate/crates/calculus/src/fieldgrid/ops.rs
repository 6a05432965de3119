//! Second-order central-difference operators. Periodic wrap on the torus,
//! zero extension on the box.

use alloc::vec;
use alloc::vec::Vec;

use super::field::{GridField, Rank};
use super::grid::{Boundary, Grid};
use crate::error::{input, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Operator {
    /// Scalar → vector.
    Grad,
    /// Scalar → matrix, `D_a D_b` composed from first differences.
    Hessian,
    /// Matrix → vector, `(Div A)_i = Σ_j D_j a_ij`; vector → scalar.
    Div,
    /// Matrix → one 2-form per row; vector → one 2-form.
    Curl,
    /// Matrix → scalar, `Div ∘ Div`.
    Div2,
    /// Matrix → matrix, `A − Tr(A)·I`.
    LQ,
    /// Matrix → vector, `Div(LQ A) = Div A − D Tr A`.
    Q,
    /// Matrix → `(Div A, Curl Aᵀ)`.
    DivCurlPair,
    /// Matrix → the two-row stack of planar curls on consecutive principal
    /// 2×2 blocks.
    Pn,
}

/// `D_axis f`.
pub fn diff(grid: &Grid, f: &[f64], axis: usize) -> Vec<f64> {
    let n = grid.points();
    let stride = grid.stride(axis);
    let inv = 0.5 / grid.spacing();
    let periodic = grid.boundary() == Boundary::Torus;
    let mut out = vec![0.0; f.len()];
    for (cell, o) in out.iter_mut().enumerate() {
        let i = (cell / stride) % n;
        let plus = if i + 1 < n {
            f[cell + stride]
        } else if periodic {
            f[cell + stride - n * stride]
        } else {
            0.0
        };
        let minus = if i > 0 {
            f[cell - stride]
        } else if periodic {
            f[cell + (n - 1) * stride]
        } else {
            0.0
        };
        *o = (plus - minus) * inv;
    }
    out
}

fn interleave(grid: &Grid, rank: Rank, comps: Vec<Vec<f64>>) -> GridField {
    let m = comps.len();
    debug_assert_eq!(m, rank.components(grid.dim()));
    let mut values = vec![0.0; grid.len() * m];
    for (c, comp) in comps.iter().enumerate() {
        for (cell, v) in comp.iter().enumerate() {
            values[cell * m + c] = *v;
        }
    }
    GridField::raw(*grid, rank, values)
}

fn components(f: &GridField) -> Vec<Vec<f64>> {
    (0..f.components()).map(|c| f.component(c)).collect()
}

fn add_into(acc: &mut [f64], v: &[f64]) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a += b;
    }
}

fn need(f: &GridField, ranks: &[Rank], op: Operator) -> Result<()> {
    if ranks.contains(&f.rank()) {
        Ok(())
    } else {
        input(alloc::format!("{op:?} is not defined on a {:?} field", f.rank()))
    }
}

/// 2-forms of the vectors `rows[r]`: `c_ab = D_b v_a − D_a v_b`, `a < b`.
fn curl_rows(grid: &Grid, rows: &[Vec<Vec<f64>>]) -> Vec<Vec<f64>> {
    let n = grid.dim();
    let mut out = Vec::new();
    for v in rows {
        for a in 0..n {
            for b in (a + 1)..n {
                let mut c = diff(grid, &v[a], b);
                let d = diff(grid, &v[b], a);
                for (x, y) in c.iter_mut().zip(&d) {
                    *x -= y;
                }
                out.push(c);
            }
        }
    }
    out
}

fn div_matrix(grid: &Grid, a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = grid.dim();
    (0..n)
        .map(|i| {
            let mut acc = vec![0.0; grid.len()];
            for j in 0..n {
                add_into(&mut acc, &diff(grid, &a[i * n + j], j));
            }
            acc
        })
        .collect()
}

fn lq(grid: &Grid, a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = grid.dim();
    let mut tr = vec![0.0; grid.len()];
    for i in 0..n {
        add_into(&mut tr, &a[i * n + i]);
    }
    let mut out = a.to_vec();
    for i in 0..n {
        for (x, t) in out[i * n + i].iter_mut().zip(&tr) {
            *x -= t;
        }
    }
    out
}

/// Index pairs `(j, j+1)` of the principal blocks used by [`Operator::Pn`]:
/// odd `j` (1-based) in even dimension, every `j` cyclically in odd dimension.
pub fn pn_pairs(dim: usize) -> Vec<(usize, usize)> {
    if dim % 2 == 0 {
        (0..dim).step_by(2).map(|j| (j, j + 1)).collect()
    } else {
        (0..dim).map(|j| (j, (j + 1) % dim)).collect()
    }
}

pub fn apply_operator(field: &GridField, op: Operator) -> Result<GridField> {
    let grid = field.grid();
    let n = grid.dim();
    match op {
        Operator::Grad => {
            need(field, &[Rank::Scalar], op)?;
            let f = field.values();
            Ok(interleave(grid, Rank::Vector, (0..n).map(|a| diff(grid, f, a)).collect()))
        }
        Operator::Hessian => {
            need(field, &[Rank::Scalar], op)?;
            let first: Vec<Vec<f64>> = (0..n).map(|b| diff(grid, field.values(), b)).collect();
            let mut comps = vec![Vec::new(); n * n];
            for a in 0..n {
                for b in a..n {
                    let h = diff(grid, &first[b], a);
                    if a != b {
                        comps[b * n + a] = h.clone();
                    }
                    comps[a * n + b] = h;
                }
            }
            Ok(interleave(grid, Rank::Matrix, comps))
        }
        Operator::Div => {
            need(field, &[Rank::Matrix, Rank::Vector], op)?;
            let a = components(field);
            if field.rank() == Rank::Vector {
                let mut acc = vec![0.0; grid.len()];
                for (j, comp) in a.iter().enumerate() {
                    add_into(&mut acc, &diff(grid, comp, j));
                }
                return Ok(interleave(grid, Rank::Scalar, vec![acc]));
            }
            Ok(interleave(grid, Rank::Vector, div_matrix(grid, &a)))
        }
        Operator::Curl => {
            need(field, &[Rank::Matrix, Rank::Vector], op)?;
            let a = components(field);
            let rows: Vec<Vec<Vec<f64>>> = if field.rank() == Rank::Vector {
                vec![a]
            } else {
                a.chunks(n).map(|r| r.to_vec()).collect()
            };
            let count = rows.len();
            Ok(interleave(grid, Rank::Form2 { rows: count }, curl_rows(grid, &rows)))
        }
        Operator::Div2 => {
            need(field, &[Rank::Matrix], op)?;
            let v = div_matrix(grid, &components(field));
            let mut acc = vec![0.0; grid.len()];
            for (j, comp) in v.iter().enumerate() {
                add_into(&mut acc, &diff(grid, comp, j));
            }
            Ok(interleave(grid, Rank::Scalar, vec![acc]))
        }
        Operator::LQ => {
            need(field, &[Rank::Matrix], op)?;
            Ok(interleave(grid, Rank::Matrix, lq(grid, &components(field))))
        }
        Operator::Q => {
            need(field, &[Rank::Matrix], op)?;
            let l = lq(grid, &components(field));
            Ok(interleave(grid, Rank::Vector, div_matrix(grid, &l)))
        }
        Operator::DivCurlPair => {
            need(field, &[Rank::Matrix], op)?;
            let a = components(field);
            let mut out = div_matrix(grid, &a);
            let cols: Vec<Vec<Vec<f64>>> =
                (0..n).map(|j| (0..n).map(|i| a[i * n + j].clone()).collect()).collect();
            out.extend(curl_rows(grid, &cols));
            let m = out.len();
            Ok(interleave(grid, Rank::Tuple(m), out))
        }
        Operator::Pn => {
            need(field, &[Rank::Matrix], op)?;
            let a = components(field);
            let mut out = Vec::new();
            for (p, q) in pn_pairs(n) {
                let mut top = diff(grid, &a[p * n + p], q);
                for (x, y) in top.iter_mut().zip(diff(grid, &a[p * n + q], p)) {
                    *x -= y;
                }
                let mut bottom = diff(grid, &a[q * n + p], q);
                for (x, y) in bottom.iter_mut().zip(diff(grid, &a[q * n + q], p)) {
                    *x -= y;
                }
                out.push(top);
                out.push(bottom);
            }
            let m = out.len();
            Ok(interleave(grid, Rank::Tuple(m), out))
        }
    }
}

/// Row `i` of the trace-identity right-hand side: `Σ_j (curl of column j)_{ij}`
/// taken from a `Curl(Aᵀ)` field, with `(curl v)_{ij} = ∂_j v_i − ∂_i v_j`.
pub fn curl_row_sums(curl_of_transpose: &GridField) -> Result<GridField> {
    let grid = curl_of_transpose.grid();
    let n = grid.dim();
    if curl_of_transpose.rank() != (Rank::Form2 { rows: n }) {
        return input("expected one 2-form per row");
    }
    let pairs = n * (n - 1) / 2;
    let slot = |a: usize, b: usize| {
        // index of (a, b), a < b, in lexicographic order
        (0..a).map(|r| n - 1 - r).sum::<usize>() + (b - a - 1)
    };
    let mut values = vec![0.0; grid.len() * n];
    for cell in 0..grid.len() {
        let c = curl_of_transpose.at(cell);
        for i in 0..n {
            let mut s = 0.0;
            for j in 0..n {
                let form = &c[j * pairs..(j + 1) * pairs];
                if i < j {
                    s += form[slot(i, j)];
                } else if j < i {
                    s -= form[slot(j, i)];
                }
            }
            values[cell * n + i] = s;
        }
    }
    Ok(GridField::raw(*grid, Rank::Vector, values))
}
