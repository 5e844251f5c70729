//! Versioned text format for the complex.
//!
//! Header `VORCPX 1 N=<N> group=<GL|SL>`, then per level `level <n> count
//! <k>` followed by the cells (id, pair lines, stabilizer order, orientable
//! flag, orientation basis), then `incidence <sigma_id> <tau_rep_id>
//! <count>` records. Cell ids are global in file order. Reading rebuilds
//! every representative from its pair list and checks the stored data.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use super::{Cell, ComplexError, VoronoiComplex};
use crate::Group;

pub fn write_complex(cx: &VoronoiComplex, w: &mut impl Write) -> std::io::Result<()> {
    writeln!(w, "VORCPX 1 N={} group={}", cx.n, cx.group)?;
    // global ids: levels ascending, cells in level order
    let mut ids: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (&dim, cells) in &cx.levels {
        for i in 0..cells.len() {
            let next = ids.len();
            ids.insert((dim, i), next);
        }
    }
    for (&dim, cells) in &cx.levels {
        writeln!(w, "level {} count {}", dim, cells.len())?;
        for (i, cell) in cells.iter().enumerate() {
            writeln!(w, "cell {}", ids[&(dim, i)])?;
            writeln!(w, "pairs {}", cell.npairs())?;
            for v in &cell.pairs {
                let line: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                writeln!(w, "{}", line.join(" "))?;
            }
            writeln!(w, "stab {}", cell.stabilizer_order(cx.group))?;
            writeln!(w, "orientable {}", if cell.orientable { 1 } else { 0 })?;
            let basis: Vec<String> =
                cell.orientation_basis().iter().map(|b| b.to_string()).collect();
            writeln!(w, "obasis {}", basis.join(" "))?;
        }
    }
    for ((dim, ci), records) in &cx.faces {
        // counts per representative, boundary faces omitted
        let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
        for r in records {
            if let Some(rep) = r.rep {
                *counts.entry(rep).or_default() += 1;
            }
        }
        for (rep, count) in counts {
            writeln!(
                w,
                "incidence {} {} {}",
                ids[&(*dim, *ci)],
                ids[&(dim - 1, rep as usize)],
                count
            )?;
        }
    }
    Ok(())
}

pub fn read_complex(r: &mut impl BufRead) -> Result<VoronoiComplex, ComplexError> {
    let bad = |m: &str| ComplexError::Parse(m.to_string());
    let mut lines = Vec::new();
    for line in r.lines() {
        let line = line.map_err(|e| ComplexError::Parse(e.to_string()))?;
        if !line.trim().is_empty() {
            lines.push(line.trim().to_string());
        }
    }
    let mut it = lines.into_iter().peekable();
    let header = it.next().ok_or_else(|| bad("empty file"))?;
    let mut n = None;
    let mut group = None;
    {
        let mut parts = header.split_whitespace();
        if parts.next() != Some("VORCPX") || parts.next() != Some("1") {
            return Err(bad("bad magic"));
        }
        for p in parts {
            if let Some(v) = p.strip_prefix("N=") {
                n = v.parse().ok();
            } else if let Some(v) = p.strip_prefix("group=") {
                group = Group::parse(v);
            }
        }
    }
    let n: usize = n.ok_or_else(|| bad("missing N"))?;
    let group = group.ok_or_else(|| bad("missing group"))?;

    let mut levels: BTreeMap<usize, Vec<Cell>> = BTreeMap::new();
    let mut id_map: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    let mut incidences: Vec<(usize, usize, usize)> = Vec::new();
    while let Some(line) = it.next() {
        if let Some(rest) = line.strip_prefix("level ") {
            let mut parts = rest.split_whitespace();
            let dim: usize =
                parts.next().and_then(|t| t.parse().ok()).ok_or_else(|| bad("bad level"))?;
            if parts.next() != Some("count") {
                return Err(bad("bad level line"));
            }
            let count: usize =
                parts.next().and_then(|t| t.parse().ok()).ok_or_else(|| bad("bad level"))?;
            let mut cells = Vec::with_capacity(count);
            for _ in 0..count {
                let cell_line = it.next().ok_or_else(|| bad("truncated cell"))?;
                let id: usize = cell_line
                    .strip_prefix("cell ")
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| bad("bad cell id"))?;
                let pairs_line = it.next().ok_or_else(|| bad("truncated cell"))?;
                let npairs: usize = pairs_line
                    .strip_prefix("pairs ")
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| bad("bad pairs line"))?;
                let mut pairs = Vec::with_capacity(npairs);
                for _ in 0..npairs {
                    let v: Vec<i64> = it
                        .next()
                        .ok_or_else(|| bad("truncated pairs"))?
                        .split_whitespace()
                        .map(|t| t.parse().map_err(|_| bad("bad vector")))
                        .collect::<Result<_, _>>()?;
                    if v.len() != n {
                        return Err(bad("vector length mismatch"));
                    }
                    pairs.push(v);
                }
                let stab_line = it.next().ok_or_else(|| bad("truncated cell"))?;
                let stored_order = stab_line
                    .strip_prefix("stab ")
                    .and_then(|t| t.parse::<num_bigint::BigInt>().ok())
                    .ok_or_else(|| bad("bad stab line"))?;
                let orient_line = it.next().ok_or_else(|| bad("truncated cell"))?;
                let stored_orientable = match orient_line.strip_prefix("orientable ") {
                    Some("1") => true,
                    Some("0") => false,
                    _ => return Err(bad("bad orientable line")),
                };
                let basis_line = it.next().ok_or_else(|| bad("truncated cell"))?;
                let stored_basis: Vec<usize> = basis_line
                    .strip_prefix("obasis ")
                    .ok_or_else(|| bad("bad obasis line"))?
                    .split_whitespace()
                    .map(|t| t.parse().map_err(|_| bad("bad obasis")))
                    .collect::<Result<_, _>>()?;
                // rebuild and cross-check the derived data
                let cell = Cell::build(pairs, usize::MAX, n, group)?;
                if cell.dim != dim
                    || cell.stabilizer_order(group) != &stored_order
                    || cell.orientable != stored_orientable
                    || cell.orientation_basis() != stored_basis.as_slice()
                {
                    return Err(bad("stored cell data disagrees with rebuild"));
                }
                id_map.insert(id, (dim, cells.len()));
                cells.push(cell);
            }
            levels.insert(dim, cells);
        } else if let Some(rest) = line.strip_prefix("incidence ") {
            let nums: Vec<usize> = rest
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| bad("bad incidence")))
                .collect::<Result<_, _>>()?;
            if nums.len() != 3 {
                return Err(bad("bad incidence record"));
            }
            incidences.push((nums[0], nums[1], nums[2]));
        } else {
            return Err(bad("unexpected line"));
        }
    }
    // recompute face records from the cells; validate the incidence counts
    let classification_free = VoronoiComplex { n, group, levels, faces: BTreeMap::new() };
    let cx = super::build::attach_faces(classification_free)?;
    for (sigma, tau, count) in incidences {
        let &(dim, ci) = id_map.get(&sigma).ok_or_else(|| bad("unknown cell id"))?;
        let &(tdim, ti) = id_map.get(&tau).ok_or_else(|| bad("unknown cell id"))?;
        if tdim + 1 != dim {
            return Err(bad("incidence dimensions"));
        }
        let records = cx.faces.get(&(dim, ci)).ok_or_else(|| bad("missing faces"))?;
        let actual =
            records.iter().filter(|r| r.rep == Some(ti as u32)).count();
        if actual != count {
            return Err(bad("incidence count mismatch"));
        }
    }
    Ok(cx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::voronoi::classify_perfect_forms;

    #[test]
    fn roundtrip_small_complex() {
        let c = classify_perfect_forms(2, Group::Gl, &Default::default()).unwrap();
        let cx = crate::complex::enumerate_cells(&c, Group::Gl, &Default::default()).unwrap();
        let mut buf = Vec::new();
        write_complex(&cx, &mut buf).unwrap();
        let back = read_complex(&mut buf.as_slice()).unwrap();
        let mut buf2 = Vec::new();
        write_complex(&back, &mut buf2).unwrap();
        assert_eq!(buf, buf2, "byte-exact roundtrip");
    }
}
