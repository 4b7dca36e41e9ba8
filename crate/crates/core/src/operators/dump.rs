use super::DiscreteOperator;
use crate::error::{Error, Result};
use crate::Grid;
use nalgebra::DMatrix;
use std::io::{Read, Write};

const MAGIC: &[u8; 8] = b"BFOPv1\0\0";

/// CSV with header `node,weight,c0,...,c{N-1}`; row `i` holds `x_i`, `w_i` and
/// row `i` of the weighted matrix.
pub fn write_csv<W: Write>(op: &DiscreteOperator, mut out: W) -> Result<()> {
    let n = op.dim();
    let mut header = String::from("node,weight");
    for j in 0..n {
        header.push_str(&format!(",c{j}"));
    }
    writeln!(out, "{header}")?;
    for i in 0..n {
        let mut line = format!("{:.16e},{:.16e}", op.grid.nodes[i], op.grid.weights[i]);
        for j in 0..n {
            line.push_str(&format!(",{:.16e}", op.matrix[(i, j)]));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// Little-endian binary: 8-byte magic, `u64` N, N nodes, N weights, N*N
/// matrix entries row-major, all `f64`.
pub fn write_binary<W: Write>(op: &DiscreteOperator, mut out: W) -> Result<()> {
    let n = op.dim();
    out.write_all(MAGIC)?;
    out.write_all(&(n as u64).to_le_bytes())?;
    for v in op.grid.nodes.iter().chain(&op.grid.weights) {
        out.write_all(&v.to_le_bytes())?;
    }
    for i in 0..n {
        for j in 0..n {
            out.write_all(&op.matrix[(i, j)].to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_binary<R: Read>(mut inp: R) -> Result<DiscreteOperator> {
    let mut magic = [0u8; 8];
    inp.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Usage("not an operator dump".into()));
    }
    let mut word = [0u8; 8];
    inp.read_exact(&mut word)?;
    let n = u64::from_le_bytes(word) as usize;
    let mut next = || -> Result<f64> {
        inp.read_exact(&mut word)?;
        Ok(f64::from_le_bytes(word))
    };
    let nodes = (0..n).map(|_| next()).collect::<Result<Vec<_>>>()?;
    let weights = (0..n).map(|_| next()).collect::<Result<Vec<_>>>()?;
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = next()?;
        }
    }
    let interval = (
        nodes.first().copied().unwrap_or(0.0),
        nodes.last().copied().unwrap_or(0.0),
    );
    let grid = Grid {
        nodes,
        weights,
        interval,
        breaks: vec![interval.0, interval.1],
    };
    DiscreteOperator::new(m, grid)
}
