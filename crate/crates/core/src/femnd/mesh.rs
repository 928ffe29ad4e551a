use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt::Write;

use num_traits::Float;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeshDomain {
    /// `(0, lx) × (0, ly)` split into `nx × ny` squares.
    Rectangle { lx: f64, ly: f64, nx: usize, ny: usize },
    /// Disk of radius `radius` centred at the origin; `6·2^level` boundary edges.
    Disk { radius: f64, level: usize },
}

/// Conforming triangulation with counterclockwise triangles.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh2D {
    pub vertices: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary: Vec<bool>,
    pub domain: MeshDomain,
}

/// Twice the signed area.
pub(crate) fn cross(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

impl Mesh2D {
    pub fn corners(&self, t: usize) -> [[f64; 2]; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.corners(t);
        0.5 * cross(a, b, c)
    }

    pub fn area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    /// Longest edge.
    pub fn max_edge(&self) -> f64 {
        let mut h = 0.0f64;
        for t in 0..self.triangles.len() {
            let p = self.corners(t);
            for k in 0..3 {
                let (a, b) = (p[k], p[(k + 1) % 3]);
                h = h.max((a[0] - b[0]).hypot(a[1] - b[1]));
            }
        }
        h
    }

    pub fn boundary_count(&self) -> usize {
        self.boundary.iter().filter(|&&b| b).count()
    }

    /// Edges used by exactly one triangle, as `(v0, v1, triangle)` with the
    /// triangle's orientation (interior on the left).
    pub fn boundary_edges(&self) -> Vec<(usize, usize, usize)> {
        let mut count: BTreeMap<(usize, usize), (usize, usize, usize, usize)> = BTreeMap::new();
        for (t, tri) in self.triangles.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                count.entry(key).and_modify(|e| e.3 += 1).or_insert((a, b, t, 1));
            }
        }
        count.values().filter(|e| e.3 == 1).map(|e| (e.0, e.1, e.2)).collect()
    }

    /// Checks positivity, conformity and boundary flags.
    pub fn validate(&self) -> Result<()> {
        for t in 0..self.triangles.len() {
            if !(self.triangle_area(t) > 0.0) {
                return Err(Error::Fem(format!("triangle {t} has non-positive area")));
            }
        }
        let mut uses: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for tri in &self.triangles {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                *uses.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        if uses.values().any(|&c| c > 2) {
            return Err(Error::Fem("edge shared by more than two triangles".into()));
        }
        let mut on_boundary = vec![false; self.vertices.len()];
        for (&(a, b), &c) in &uses {
            if c == 1 {
                on_boundary[a] = true;
                on_boundary[b] = true;
            }
        }
        if on_boundary != self.boundary {
            return Err(Error::Fem("boundary flags disagree with boundary edges".into()));
        }
        Ok(())
    }

    /// Plain-text export.
    ///
    /// ```text
    /// # singspec mesh v1
    /// vertices <n>
    /// <x> <y> <boundary 0|1>      (n lines)
    /// triangles <m>
    /// <i> <j> <k>                 (m lines, 0-based, counterclockwise)
    /// ```
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# singspec mesh v1");
        let _ = writeln!(s, "vertices {}", self.vertices.len());
        for (v, b) in self.vertices.iter().zip(&self.boundary) {
            let _ = writeln!(s, "{:.16e} {:.16e} {}", v[0], v[1], u8::from(*b));
        }
        let _ = writeln!(s, "triangles {}", self.triangles.len());
        for t in &self.triangles {
            let _ = writeln!(s, "{} {} {}", t[0], t[1], t[2]);
        }
        s
    }
}

/// Structured triangulation of `(0, lx) × (0, ly)`: every square is cut by
/// its diagonal from lower left to upper right.
pub fn mesh_rectangle(lx: f64, ly: f64, nx: usize, ny: usize) -> Result<Mesh2D> {
    if nx < 2 || ny < 2 || !(lx > 0.0) || !(ly > 0.0) {
        return Err(Error::Fem(format!("rectangle mesh needs nx, ny >= 2 and positive sides, got {nx}x{ny}")));
    }
    let idx = |i: usize, j: usize| j * (nx + 1) + i;
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    let mut boundary = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            vertices.push([lx * i as f64 / nx as f64, ly * j as f64 / ny as f64]);
            boundary.push(i == 0 || j == 0 || i == nx || j == ny);
        }
    }
    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
        }
    }
    Ok(Mesh2D { vertices, triangles, boundary, domain: MeshDomain::Rectangle { lx, ly, nx, ny } })
}

/// Disk of radius `radius`: a hexagon fan refined `level` times by edge
/// midpoints, with new boundary vertices projected onto the circle.
pub fn mesh_disk(radius: f64, level: usize) -> Result<Mesh2D> {
    if !(radius > 0.0) {
        return Err(Error::Fem("disk radius must be positive".into()));
    }
    let mut vertices = vec![[0.0, 0.0]];
    let mut boundary = vec![false];
    for k in 0..6 {
        let a = PI / 3.0 * k as f64;
        vertices.push([radius * a.cos(), radius * a.sin()]);
        boundary.push(true);
    }
    let mut triangles: Vec<[usize; 3]> = (0..6).map(|k| [0, 1 + k, 1 + (k + 1) % 6]).collect();
    for _ in 0..level {
        let mut uses: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for tri in &triangles {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                *uses.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        let mut mid: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut midpoint = |a: usize, b: usize, vertices: &mut Vec<[f64; 2]>, boundary: &mut Vec<bool>| -> usize {
            let key = (a.min(b), a.max(b));
            if let Some(&m) = mid.get(&key) {
                return m;
            }
            let (p, q) = (vertices[a], vertices[b]);
            let mut m = [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])];
            let on_boundary = uses[&key] == 1;
            if on_boundary {
                let r = m[0].hypot(m[1]);
                m = [radius * m[0] / r, radius * m[1] / r];
            }
            vertices.push(m);
            boundary.push(on_boundary);
            let idx = vertices.len() - 1;
            mid.insert(key, idx);
            idx
        };
        let mut next = Vec::with_capacity(4 * triangles.len());
        for &[a, b, c] in &triangles {
            let ab = midpoint(a, b, &mut vertices, &mut boundary);
            let bc = midpoint(b, c, &mut vertices, &mut boundary);
            let ca = midpoint(c, a, &mut vertices, &mut boundary);
            next.extend([[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]);
        }
        triangles = next;
    }
    Ok(Mesh2D { vertices, triangles, boundary, domain: MeshDomain::Disk { radius, level } })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_square() {
        let m = mesh_rectangle(PI, PI, 2, 2).unwrap();
        assert_eq!(m.vertices.len(), 9);
        assert_eq!(m.triangles.len(), 8);
        assert!((m.area() - PI * PI).abs() < 1e-14);
        m.validate().unwrap();
    }

    #[test]
    fn rectangle_area_and_boundary() {
        let m = mesh_rectangle(1.0, 2.0, 4, 8).unwrap();
        assert!((m.area() - 2.0).abs() < 1e-14);
        let big = mesh_rectangle(PI, PI, 64, 64).unwrap();
        assert_eq!(big.boundary_count(), 4 * 64);
        assert_eq!(big.boundary_edges().len(), 4 * 64);
        assert!(mesh_rectangle(1.0, 1.0, 1, 4).is_err());
    }

    #[test]
    fn hexagon_fan() {
        let m = mesh_disk(1.0, 0).unwrap();
        assert!((m.area() - 1.5 * 3f64.sqrt()).abs() < 1e-14);
        m.validate().unwrap();
    }

    #[test]
    fn disk_area_converges() {
        for level in 0..6 {
            let m = mesh_disk(1.0, level).unwrap();
            m.validate().unwrap();
            let gap = 1.0 - m.area() / PI;
            assert!(gap > 0.0 && gap <= 0.25f64.powi(level as i32), "level {level}: {gap}");
            assert_eq!(m.boundary_count(), 6 << level);
            for (v, &b) in m.vertices.iter().zip(&m.boundary) {
                if b {
                    assert!((v[0].hypot(v[1]) - 1.0).abs() < 1e-14);
                }
            }
        }
        let m = mesh_disk(1.0, 4).unwrap();
        assert!((1.0 - m.area() / PI) < 1e-3);
    }

    #[test]
    fn text_export_shape() {
        let m = mesh_rectangle(1.0, 1.0, 2, 2).unwrap();
        let t = m.to_text();
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines[1], "vertices 9");
        assert_eq!(lines[11], "triangles 8");
        assert_eq!(lines.len(), 1 + 1 + 9 + 1 + 8);
    }
}
