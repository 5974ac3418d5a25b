use std::collections::HashMap;

use num_complex::Complex64;
use thiserror::Error;

use super::{Color, ZXDiagram, ZXError};
use crate::phase::Phase;

/// Largest number of indices any intermediate tensor may carry.
const MAX_WIDTH: usize = 22;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatrixError {
    #[error("contraction needs a tensor with {0} indices, budget is {MAX_WIDTH}")]
    TooLarge(usize),
    #[error(transparent)]
    Invalid(#[from] ZXError),
}

/// Dense complex matrix in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex64>,
}

impl Matrix {
    pub fn identity(n: usize) -> Matrix {
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        Matrix {
            rows: n,
            cols: n,
            data,
        }
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Matrix {
        let cols = rows.first().map_or(0, Vec::len);
        Matrix {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        }
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    fn argmax(&self) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (i, z) in self.data.iter().enumerate() {
            let m = z.norm();
            if best.is_none_or(|(_, b)| m > b) {
                best = Some((i, m));
            }
        }
        best.map(|(i, _)| i)
    }

    pub fn max_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Divides by the first entry of largest modulus. A zero matrix is
    /// returned unchanged.
    pub fn normalized(&self) -> Matrix {
        let Some(i) = self.argmax() else {
            return self.clone();
        };
        let pivot = self.data[i];
        if pivot.norm() == 0.0 {
            return self.clone();
        }
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z / pivot).collect(),
        }
    }

    /// Whether `other = λ·self` for some nonzero λ, entrywise within `tol`
    /// after both are normalized. Two zero matrices compare equal.
    pub fn approx_eq_up_to_scalar(&self, other: &Matrix, tol: f64) -> bool {
        if self.rows != other.rows || self.cols != other.cols {
            return false;
        }
        let (za, zb) = (self.max_norm() <= tol, other.max_norm() <= tol);
        if za || zb {
            return za && zb;
        }
        let i = self.argmax().expect("nonzero matrix has entries");
        let scale = other.max_norm();
        if other.data[i].norm() <= tol * scale {
            return false;
        }
        let lambda = other.data[i] / self.data[i];
        self.data
            .iter()
            .zip(&other.data)
            .all(|(a, b)| (a * lambda - b).norm() <= tol * scale)
    }
}

/// A tensor over binary indices; `vars` are sorted and `data` is indexed
/// with `vars[0]` as the most significant bit.
#[derive(Clone, Debug)]
struct Factor {
    vars: Vec<usize>,
    data: Vec<Complex64>,
}

fn bit(idx: usize, pos: usize, width: usize) -> usize {
    (idx >> (width - 1 - pos)) & 1
}

fn spider_value(color: Color, phase: Phase, legs: &[usize]) -> Complex64 {
    let e = Complex64::from_polar(1.0, phase.radians());
    let one = Complex64::new(1.0, 0.0);
    match color {
        Color::Z => {
            let ones = legs.iter().filter(|&&b| b == 1).count();
            match (ones, legs.len()) {
                (_, 0) => one + e,
                (0, _) => one,
                (k, n) if k == n => e,
                _ => Complex64::new(0.0, 0.0),
            }
        }
        Color::X => {
            let parity = legs.iter().sum::<usize>() % 2;
            let sign = if parity == 0 { 1.0 } else { -1.0 };
            (one + e * sign) * 2f64.powf(-(legs.len() as f64) / 2.0)
        }
    }
}

impl Factor {
    /// Tensor of a spider whose legs carry the variables `legs` (repeated for
    /// self-loops).
    fn spider(color: Color, phase: Phase, legs: &[usize]) -> Result<Factor, MatrixError> {
        let mut vars = legs.to_vec();
        vars.sort_unstable();
        vars.dedup();
        if vars.len() > MAX_WIDTH {
            return Err(MatrixError::TooLarge(vars.len()));
        }
        let pos: Vec<usize> = legs
            .iter()
            .map(|v| vars.binary_search(v).expect("leg var present"))
            .collect();
        let w = vars.len();
        let data = (0..1usize << w)
            .map(|idx| {
                let bits: Vec<usize> = pos.iter().map(|&p| bit(idx, p, w)).collect();
                spider_value(color, phase, &bits)
            })
            .collect();
        Ok(Factor { vars, data })
    }

    fn product(&self, other: &Factor) -> Result<Factor, MatrixError> {
        let mut vars: Vec<usize> = self.vars.iter().chain(&other.vars).copied().collect();
        vars.sort_unstable();
        vars.dedup();
        if vars.len() > MAX_WIDTH {
            return Err(MatrixError::TooLarge(vars.len()));
        }
        let w = vars.len();
        let locate = |f: &Factor| -> Vec<usize> {
            f.vars
                .iter()
                .map(|v| vars.binary_search(v).expect("var present"))
                .collect()
        };
        let (pa, pb) = (locate(self), locate(other));
        let sub = |idx: usize, pos: &[usize]| {
            pos.iter()
                .fold(0usize, |acc, &p| (acc << 1) | bit(idx, p, w))
        };
        let data = (0..1usize << w)
            .map(|idx| self.data[sub(idx, &pa)] * other.data[sub(idx, &pb)])
            .collect();
        Ok(Factor { vars, data })
    }

    fn sum_out(&self, var: usize) -> Factor {
        let p = self.vars.binary_search(&var).expect("var present");
        let w = self.vars.len();
        let shift = w - 1 - p;
        let low = (1usize << shift) - 1;
        let vars: Vec<usize> = self.vars.iter().copied().filter(|&v| v != var).collect();
        let data = (0..1usize << (w - 1))
            .map(|idx| {
                let base = ((idx & !low) << 1) | (idx & low);
                self.data[base] + self.data[base | (1 << shift)]
            })
            .collect();
        Factor { vars, data }
    }

    fn value(&self, assignment: &HashMap<usize, usize>) -> Complex64 {
        let idx = self
            .vars
            .iter()
            .fold(0usize, |acc, v| (acc << 1) | assignment[v]);
        self.data[idx]
    }
}

/// One index variable per wire; a boundary point shares the variable of its
/// wire. Returns the spider tensors and, for each boundary point in
/// outputs-then-inputs order, its variable.
fn factors(d: &ZXDiagram) -> Result<(Vec<Factor>, Vec<usize>, usize), MatrixError> {
    d.validate()?;
    let mut legs: HashMap<&str, Vec<usize>> = HashMap::new();
    for (w, (a, b)) in d.wires.iter().enumerate() {
        legs.entry(a).or_default().push(w);
        legs.entry(b).or_default().push(w);
    }
    let fs = d
        .spiders
        .iter()
        .map(|s| {
            Factor::spider(
                s.color,
                s.phase,
                legs.get(s.id.as_str()).map_or(&[][..], Vec::as_slice),
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    let boundary = d
        .outputs
        .iter()
        .chain(&d.inputs)
        .map(|b| legs[b.as_str()][0])
        .collect();
    Ok((fs, boundary, d.wires.len()))
}

/// The linear map of a diagram, `2^outputs` rows by `2^inputs` columns, with
/// `out0` and `in0` as the most significant bits. Scalars are kept, so two
/// diagrams agree exactly only if their scalar factors agree.
pub fn to_matrix(d: &ZXDiagram) -> Result<Matrix, MatrixError> {
    let (mut fs, boundary, nvars) = factors(d)?;
    let open: Vec<bool> = (0..nvars).map(|v| boundary.contains(&v)).collect();
    // Eliminate internal wires, cheapest resulting tensor first.
    loop {
        let candidates = (0..nvars).filter(|&v| !open[v] && fs.iter().any(|f| f.vars.contains(&v)));
        let cost = |v: usize| {
            let mut vs: Vec<usize> = fs
                .iter()
                .filter(|f| f.vars.contains(&v))
                .flat_map(|f| f.vars.iter().copied())
                .collect();
            vs.sort_unstable();
            vs.dedup();
            vs.len()
        };
        let Some(v) = candidates.min_by_key(|&v| (cost(v), v)) else {
            break;
        };
        let (with, without): (Vec<Factor>, Vec<Factor>) =
            fs.into_iter().partition(|f| f.vars.contains(&v));
        let mut acc = with[0].clone();
        for f in &with[1..] {
            acc = acc.product(f)?;
        }
        fs = without;
        fs.push(acc.sum_out(v));
    }
    let mut total = Factor {
        vars: Vec::new(),
        data: vec![Complex64::new(1.0, 0.0)],
    };
    for f in &fs {
        total = total.product(f)?;
    }
    // A wire with no spider on it and both ends on the boundary never
    // appears in a factor: it is a delta between the two boundary points.
    let (no, ni) = (d.outputs.len(), d.inputs.len());
    let width = no + ni;
    let mut data = Vec::with_capacity(1 << width);
    for idx in 0..1usize << width {
        let mut assignment: HashMap<usize, usize> = HashMap::new();
        let mut consistent = true;
        for (pos, &v) in boundary.iter().enumerate() {
            let b = bit(idx, pos, width);
            if *assignment.entry(v).or_insert(b) != b {
                consistent = false;
            }
        }
        data.push(if consistent {
            total.value(&assignment)
        } else {
            Complex64::new(0.0, 0.0)
        });
    }
    Ok(Matrix {
        rows: 1 << no,
        cols: 1 << ni,
        data,
    })
}
