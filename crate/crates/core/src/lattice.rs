//! Cell complexes carrying one qubit per edge.
//!
//! Vertices `0..n_sites` are *sites*: each carries a vertex operator `A_v`
//! and, on the dual side, one Ising spin. Open lattices with a rough
//! boundary add a single *terminal* vertex (index `n_sites`) with no vertex
//! operator; every perimeter site is joined to it by one dangling edge, and
//! consecutive dangling edges close three-edge boundary plaquettes.
//!
//! Indexing, fixed for reproducible dumps:
//!
//! * square lattices: site `(x, y)` is `y * L + x`. Torus edges: horizontal
//!   `(x,y)-(x+1,y)` is `y * L + x`, vertical `(x,y)-(x,y+1)` is
//!   `L^2 + y * L + x`. Open edges: horizontal is `y * (L-1) + x`, vertical
//!   is `L * (L-1) + y * L + x`, dangling edges follow in perimeter order
//!   (bottom row left to right, right column upwards, top row right to
//!   left, left column downwards).
//! * hexagonal lattices are brick walls of `W x H` sites, site `(i, j)` is
//!   `j * W + i`; horizontal edge `(i,j)-(i+1,j)` comes first, then one
//!   vertical edge `(i,j)-(i,j+1)` for every site with `i + j` even.
//! * cubic lattices: site `(x,y,z)` is `(z * Ly + y) * Lx + x`; edges are
//!   grouped by direction x, y, z and ordered by base site.
//! * paths: site `i`, edge `(i, i+1)` is `i`; a rough path adds the
//!   dangling edge `(0, terminal)` last.

use std::collections::VecDeque;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gf2;
use crate::pauli::{BitMask, PauliString};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LatticeKind {
    SquareTorus,
    SquareOpen,
    HexTorus,
    HexOpen,
    CubicPeriodic,
    CubicOpen,
    Path,
}

impl LatticeKind {
    pub fn is_torus(self) -> bool {
        matches!(
            self,
            LatticeKind::SquareTorus | LatticeKind::HexTorus | LatticeKind::CubicPeriodic
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LatticeKind::SquareTorus => "square-torus",
            LatticeKind::SquareOpen => "square-open",
            LatticeKind::HexTorus => "hex-torus",
            LatticeKind::HexOpen => "hex-open",
            LatticeKind::CubicPeriodic => "cubic-periodic",
            LatticeKind::CubicOpen => "cubic-open",
            LatticeKind::Path => "path",
        }
    }
}

impl fmt::Display for LatticeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LatticeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        Ok(match norm.as_str() {
            "squaretorus" => LatticeKind::SquareTorus,
            "squareopen" => LatticeKind::SquareOpen,
            "hextorus" => LatticeKind::HexTorus,
            "hexopen" => LatticeKind::HexOpen,
            "cubicperiodic" => LatticeKind::CubicPeriodic,
            "cubicopen" => LatticeKind::CubicOpen,
            "path" => LatticeKind::Path,
            _ => return Err(Error::Config(format!("unknown lattice kind {s:?}"))),
        })
    }
}

/// Boundary variant of open lattices. `Rough` adds dangling edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Boundary {
    #[default]
    Plain,
    Rough,
}

impl FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "plain" | "smooth" => Ok(Boundary::Plain),
            "rough" | "dangling" => Ok(Boundary::Rough),
            _ => Err(Error::Config(format!("unknown boundary {s:?}"))),
        }
    }
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Boundary::Plain => "plain",
            Boundary::Rough => "rough",
        })
    }
}

/// What to build.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeSpec {
    pub kind: LatticeKind,
    pub dims: Vec<usize>,
    pub boundary: Boundary,
}

impl LatticeSpec {
    pub fn new(kind: LatticeKind, dims: &[usize], boundary: Boundary) -> Self {
        LatticeSpec {
            kind,
            dims: dims.to_vec(),
            boundary,
        }
    }

    pub fn build(&self) -> Result<CellComplex> {
        build(self.kind, &self.dims, self.boundary)
    }
}

impl fmt::Display for LatticeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dims: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
        write!(f, "{} {} {}", self.kind, dims.join("x"), self.boundary)
    }
}

/// Graph `G = (V, E)` with plaquettes; one qubit per edge.
#[derive(Clone, Debug)]
pub struct CellComplex {
    kind: LatticeKind,
    boundary: Boundary,
    dims: Vec<usize>,
    n_sites: usize,
    coords: Vec<[i32; 3]>,
    edges: Vec<(usize, usize)>,
    plaquettes: Vec<Vec<usize>>,
    boundary_vertices: Vec<usize>,
    boundary_edges: Vec<usize>,
    incidence: Vec<Vec<usize>>,
}

/// The four non-contractible loop operators of a 2D torus.
///
/// `tx[a]` is an X-string on a dual loop winding in direction `a`, `tz[a]`
/// a Z-string on a direct loop winding in direction `a`. `tx[a]`
/// anticommutes with `tz[b]` exactly when `a != b`.
#[derive(Clone, Debug)]
pub struct LogicalOperators {
    pub tx: [PauliString; 2],
    pub tz: [PauliString; 2],
}

/// Vertex adjacency seen from the dual (vertex-qubit) side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsingGraph {
    pub n_spins: usize,
    /// `(i, j, edge)` for every edge joining two sites.
    pub bonds: Vec<(usize, usize, usize)>,
    /// `(i, edge)` for every dangling edge; site `i` gets a single-site field.
    pub fields: Vec<(usize, usize)>,
    /// No dangling edges: the product of all vertex operators is the
    /// identity, so only even spin parity is physical.
    pub parity_constrained: bool,
}

impl CellComplex {
    pub fn kind(&self) -> LatticeKind {
        self.kind
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn spec(&self) -> LatticeSpec {
        LatticeSpec::new(self.kind, &self.dims, self.boundary)
    }

    /// Vertices carrying a vertex operator.
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// All vertices, terminal included.
    pub fn n_vertices(&self) -> usize {
        self.coords.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_qubits(&self) -> usize {
        self.edges.len()
    }

    pub fn n_plaquettes(&self) -> usize {
        self.plaquettes.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> Result<(usize, usize)> {
        self.edges.get(e).copied().ok_or(Error::IndexOutOfRange {
            what: "edge",
            index: e,
            len: self.edges.len(),
        })
    }

    pub fn plaquettes(&self) -> &[Vec<usize>] {
        &self.plaquettes
    }

    pub fn boundary_vertices(&self) -> &[usize] {
        &self.boundary_vertices
    }

    pub fn boundary_edges(&self) -> &[usize] {
        &self.boundary_edges
    }

    pub fn coords(&self, v: usize) -> [i32; 3] {
        self.coords[v]
    }

    pub fn incident_edges(&self, v: usize) -> &[usize] {
        &self.incidence[v]
    }

    pub fn is_terminal(&self, v: usize) -> bool {
        v >= self.n_sites
    }

    pub fn terminals(&self) -> std::ops::Range<usize> {
        self.n_sites..self.coords.len()
    }

    /// No dangling edges.
    pub fn is_closed(&self) -> bool {
        self.coords.len() == self.n_sites
    }

    pub fn is_torus(&self) -> bool {
        self.kind.is_torus()
    }

    pub fn other_end(&self, e: usize, v: usize) -> usize {
        let (a, b) = self.edges[e];
        if a == v {
            b
        } else {
            a
        }
    }

    /// X-mask of the vertex operator on `v` as a word (for n <= 64).
    pub fn vertex_mask(&self, v: usize) -> BitMask {
        let mut m = BitMask::zeros(self.n_qubits());
        for &e in &self.incidence[v] {
            m.toggle(e);
        }
        m
    }

    pub fn edge_set_mask(&self, edges: &[usize]) -> Result<BitMask> {
        BitMask::from_indices(self.n_qubits(), edges)
    }

    /// `A_v`: X on every edge incident to site `v`.
    pub fn vertex_operator(&self, v: usize) -> Result<PauliString> {
        if v >= self.n_sites {
            return Err(Error::IndexOutOfRange {
                what: "site",
                index: v,
                len: self.n_sites,
            });
        }
        PauliString::x_type(self.n_qubits(), &self.incidence[v])
    }

    /// `B_p`: Z on every edge of plaquette `p`.
    pub fn plaquette_operator(&self, p: usize) -> Result<PauliString> {
        let edges = self.plaquettes.get(p).ok_or(Error::IndexOutOfRange {
            what: "plaquette",
            index: p,
            len: self.plaquettes.len(),
        })?;
        PauliString::z_type(self.n_qubits(), edges)
    }

    pub fn vertex_operators(&self) -> Vec<PauliString> {
        (0..self.n_sites)
            .map(|v| self.vertex_operator(v).expect("site in range"))
            .collect()
    }

    pub fn plaquette_operators(&self) -> Vec<PauliString> {
        (0..self.plaquettes.len())
            .map(|p| self.plaquette_operator(p).expect("plaquette in range"))
            .collect()
    }

    /// Dimension of the cycle space of the graph, `|E| - |V| + #components`.
    pub fn cycle_space_dim(&self) -> usize {
        self.edges.len() + self.components() - self.coords.len()
    }

    fn components(&self) -> usize {
        let mut seen = vec![false; self.coords.len()];
        let mut count = 0;
        for s in 0..self.coords.len() {
            if seen[s] {
                continue;
            }
            count += 1;
            let mut q = vec![s];
            seen[s] = true;
            while let Some(v) = q.pop() {
                for &e in &self.incidence[v] {
                    let w = self.other_end(e, v);
                    if !seen[w] {
                        seen[w] = true;
                        q.push(w);
                    }
                }
            }
        }
        count
    }

    /// Number of encoded (logical) qubits: `n - rank(A) - rank(B)`.
    pub fn logical_qubits(&self) -> usize {
        let a = gf2::pauli_rank(&self.vertex_operators());
        let b = gf2::pauli_rank(&self.plaquette_operators());
        self.n_qubits() - a - b
    }

    /// Non-contractible loop operators, minimal coordinate lines through
    /// the origin. Only 2D tori are supported.
    pub fn logical_operators(&self) -> Result<LogicalOperators> {
        let n = self.n_qubits();
        let (tx1, tx2, tz1, tz2): (Vec<usize>, Vec<usize>, Vec<usize>, Vec<usize>) = match self.kind
        {
            LatticeKind::SquareTorus => {
                let l = self.dims[0];
                (
                    (0..l).map(|x| l * l + x).collect(),
                    (0..l).map(|y| y * l).collect(),
                    (0..l).collect(),
                    (0..l).map(|y| l * l + y * l).collect(),
                )
            }
            LatticeKind::HexTorus => {
                let (w, h) = hex_torus_shape(&self.dims);
                let vert = |i: usize, j: usize| self.hex_vertical_edge(i, j, w);
                (
                    (0..w).step_by(2).map(|i| vert(i, 0)).collect(),
                    (0..h).map(|j| j * w + 1).collect(),
                    (0..w).collect(),
                    (0..h).flat_map(|j| [vert(j % 2, j), j * w]).collect(),
                )
            }
            other => {
                return Err(Error::UnsupportedLattice(format!(
                    "logical loop operators are defined for 2D tori, not {other}"
                )))
            }
        };
        Ok(LogicalOperators {
            tx: [PauliString::x_type(n, &tx1)?, PauliString::x_type(n, &tx2)?],
            tz: [PauliString::z_type(n, &tz1)?, PauliString::z_type(n, &tz2)?],
        })
    }

    fn hex_vertical_edge(&self, i: usize, j: usize, w: usize) -> usize {
        debug_assert!((i + j).is_multiple_of(2));
        let h = self.coords.len() / w;
        // verticals are numbered in site order after the W*H horizontals
        w * h + (j * w + i) / 2
    }

    /// Vertex adjacency for the dual transverse-field Ising model.
    pub fn dual_ising_graph(&self) -> IsingGraph {
        let mut bonds = Vec::new();
        let mut fields = Vec::new();
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            match (self.is_terminal(a), self.is_terminal(b)) {
                (false, false) => bonds.push((a, b, e)),
                (false, true) => fields.push((a, e)),
                (true, false) => fields.push((b, e)),
                (true, true) => {}
            }
        }
        IsingGraph {
            n_spins: self.n_sites,
            bonds,
            fields,
            parity_constrained: self.is_closed(),
        }
    }

    /// Shortest edge path from `from` to `to`, ties broken by edge index.
    pub fn shortest_path(&self, from: usize, to: usize) -> Option<Vec<usize>> {
        let nv = self.coords.len();
        if from >= nv || to >= nv {
            return None;
        }
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; nv];
        let mut seen = vec![false; nv];
        seen[from] = true;
        let mut q = VecDeque::from([from]);
        while let Some(v) = q.pop_front() {
            if v == to {
                break;
            }
            let mut inc = self.incidence[v].clone();
            inc.sort_unstable();
            for e in inc {
                let w = self.other_end(e, v);
                if !seen[w] {
                    seen[w] = true;
                    prev[w] = Some((v, e));
                    q.push_back(w);
                }
            }
        }
        if !seen[to] {
            return None;
        }
        let mut path = Vec::new();
        let mut v = to;
        while let Some((p, e)) = prev[v] {
            path.push(e);
            v = p;
        }
        path.reverse();
        Some(path)
    }

    /// Graph distance (in edges) from `v` to every vertex.
    pub fn distances_from(&self, v: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.coords.len()];
        dist[v] = Some(0);
        let mut q = VecDeque::from([v]);
        while let Some(u) = q.pop_front() {
            let d = dist[u].unwrap_or(0);
            for &e in &self.incidence[u] {
                let w = self.other_end(e, u);
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    q.push_back(w);
                }
            }
        }
        dist
    }

    /// Plain-text adjacency dump: `edge <id>: <v1> <v2>` and
    /// `plaq <id>: <e1> <e2> ...` lines after a `#` header.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# {} sites={} vertices={} edges={} plaquettes={}",
            self.spec(),
            self.n_sites,
            self.coords.len(),
            self.edges.len(),
            self.plaquettes.len()
        );
        for (i, (a, b)) in self.edges.iter().enumerate() {
            let _ = writeln!(out, "edge {i}: {a} {b}");
        }
        for (i, p) in self.plaquettes.iter().enumerate() {
            let es: Vec<String> = p.iter().map(|e| e.to_string()).collect();
            let _ = writeln!(out, "plaq {i}: {}", es.join(" "));
        }
        out
    }

    fn finish(mut self) -> Result<Self> {
        let nv = self.coords.len();
        self.incidence = vec![Vec::new(); nv];
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            if a >= nv || b >= nv || a == b {
                return Err(Error::UnsupportedLattice(format!(
                    "edge {e} = ({a}, {b}) is not a pair of distinct vertices"
                )));
            }
            self.incidence[a].push(e);
            self.incidence[b].push(e);
        }
        for (p, edges) in self.plaquettes.iter().enumerate() {
            if !self.is_simple_cycle(edges) {
                return Err(Error::UnsupportedLattice(format!(
                    "plaquette {p} is not a closed cycle"
                )));
            }
        }
        Ok(self)
    }

    /// Every vertex touched exactly twice, and the edges connected.
    pub fn is_simple_cycle(&self, edges: &[usize]) -> bool {
        if edges.is_empty() {
            return false;
        }
        let mut deg = std::collections::HashMap::new();
        let mut uniq = edges.to_vec();
        uniq.sort_unstable();
        uniq.dedup();
        if uniq.len() != edges.len() {
            return false;
        }
        for &e in edges {
            let Some(&(a, b)) = self.edges.get(e) else {
                return false;
            };
            *deg.entry(a).or_insert(0) += 1;
            *deg.entry(b).or_insert(0) += 1;
        }
        if deg.values().any(|&d| d != 2) {
            return false;
        }
        // connectivity along the cycle
        let start = self.edges[edges[0]].0;
        let mut seen = vec![start];
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &e in edges {
                let (a, b) = self.edges[e];
                let w = if a == v {
                    b
                } else if b == v {
                    a
                } else {
                    continue;
                };
                if !seen.contains(&w) {
                    seen.push(w);
                    stack.push(w);
                }
            }
        }
        seen.len() == deg.len()
    }
}

fn hex_torus_shape(dims: &[usize]) -> (usize, usize) {
    (2 * dims[0], 2 * dims[1])
}

fn expect_dims(kind: LatticeKind, dims: &[usize], n: usize) -> Result<()> {
    if dims.len() != n {
        return Err(Error::UnsupportedLattice(format!(
            "{kind} takes {n} dimension(s), got {}",
            dims.len()
        )));
    }
    if dims.contains(&0) {
        return Err(Error::UnsupportedLattice(format!(
            "{kind} dimensions must be >= 1"
        )));
    }
    Ok(())
}

/// Build a lattice. `dims` is `[L]` for square lattices, `[m]` for paths
/// (number of sites), `[Lx, Ly]` for hexagonal lattices (bricks per row,
/// brick rows) and `[Lx, Ly, Lz]` for cubic lattices. A single `[L]` is
/// accepted for hexagonal and cubic kinds as shorthand for equal sides.
pub fn build(kind: LatticeKind, dims: &[usize], boundary: Boundary) -> Result<CellComplex> {
    let dims: Vec<usize> = match (kind, dims.len()) {
        (LatticeKind::HexTorus | LatticeKind::HexOpen, 1) => vec![dims[0]; 2],
        (LatticeKind::CubicPeriodic | LatticeKind::CubicOpen, 1) => vec![dims[0]; 3],
        _ => dims.to_vec(),
    };
    if kind.is_torus() && boundary == Boundary::Rough {
        return Err(Error::UnsupportedLattice(format!(
            "{kind} has no boundary; rough variant not defined"
        )));
    }
    match kind {
        LatticeKind::SquareTorus => {
            expect_dims(kind, &dims, 1)?;
            square_torus(dims[0])
        }
        LatticeKind::SquareOpen => {
            expect_dims(kind, &dims, 1)?;
            square_open(dims[0], boundary)
        }
        LatticeKind::Path => {
            expect_dims(kind, &dims, 1)?;
            path(dims[0], boundary)
        }
        LatticeKind::HexTorus => {
            expect_dims(kind, &dims, 2)?;
            hex_torus(dims[0], dims[1])
        }
        LatticeKind::HexOpen => {
            expect_dims(kind, &dims, 2)?;
            if boundary == Boundary::Rough {
                return Err(Error::UnsupportedLattice(
                    "rough boundary is implemented for square-open and path only".into(),
                ));
            }
            hex_open(dims[0], dims[1])
        }
        LatticeKind::CubicPeriodic | LatticeKind::CubicOpen => {
            expect_dims(kind, &dims, 3)?;
            if boundary == Boundary::Rough {
                return Err(Error::UnsupportedLattice(
                    "rough boundary is implemented for square-open and path only".into(),
                ));
            }
            cubic(kind, [dims[0], dims[1], dims[2]])
        }
    }
}

fn empty(kind: LatticeKind, dims: Vec<usize>, boundary: Boundary) -> CellComplex {
    CellComplex {
        kind,
        boundary,
        dims,
        n_sites: 0,
        coords: Vec::new(),
        edges: Vec::new(),
        plaquettes: Vec::new(),
        boundary_vertices: Vec::new(),
        boundary_edges: Vec::new(),
        incidence: Vec::new(),
    }
}

pub fn square_torus(l: usize) -> Result<CellComplex> {
    if l < 2 {
        return Err(Error::UnsupportedLattice(
            "square torus needs L >= 2 (L = 1 would create self-loops)".into(),
        ));
    }
    let mut c = empty(LatticeKind::SquareTorus, vec![l], Boundary::Plain);
    let site = |x: usize, y: usize| (y % l) * l + (x % l);
    c.n_sites = l * l;
    for y in 0..l {
        for x in 0..l {
            c.coords.push([x as i32, y as i32, 0]);
        }
    }
    for y in 0..l {
        for x in 0..l {
            c.edges.push((site(x, y), site(x + 1, y)));
        }
    }
    for y in 0..l {
        for x in 0..l {
            c.edges.push((site(x, y), site(x, y + 1)));
        }
    }
    let h = |x: usize, y: usize| (y % l) * l + (x % l);
    let v = |x: usize, y: usize| l * l + (y % l) * l + (x % l);
    for y in 0..l {
        for x in 0..l {
            c.plaquettes
                .push(vec![h(x, y), v(x + 1, y), h(x, y + 1), v(x, y)]);
        }
    }
    c.finish()
}

/// Perimeter sites of an `L x L` grid in the documented order.
fn perimeter(l: usize) -> Vec<(usize, usize)> {
    if l == 1 {
        return vec![(0, 0)];
    }
    let mut p = Vec::with_capacity(4 * (l - 1));
    for x in 0..l {
        p.push((x, 0));
    }
    for y in 1..l {
        p.push((l - 1, y));
    }
    for x in (0..l - 1).rev() {
        p.push((x, l - 1));
    }
    for y in (1..l - 1).rev() {
        p.push((0, y));
    }
    p
}

pub fn square_open(l: usize, boundary: Boundary) -> Result<CellComplex> {
    let mut c = empty(LatticeKind::SquareOpen, vec![l], boundary);
    let site = |x: usize, y: usize| y * l + x;
    c.n_sites = l * l;
    for y in 0..l {
        for x in 0..l {
            c.coords.push([x as i32, y as i32, 0]);
        }
    }
    let h = |x: usize, y: usize| y * (l - 1) + x;
    let v = |x: usize, y: usize| l * (l - 1) + y * l + x;
    for y in 0..l {
        for x in 0..l - 1 {
            c.edges.push((site(x, y), site(x + 1, y)));
        }
    }
    for y in 0..l - 1 {
        for x in 0..l {
            c.edges.push((site(x, y), site(x, y + 1)));
        }
    }
    for y in 0..l.saturating_sub(1) {
        for x in 0..l - 1 {
            c.plaquettes
                .push(vec![h(x, y), v(x + 1, y), h(x, y + 1), v(x, y)]);
        }
    }
    let perim = perimeter(l);
    c.boundary_vertices = perim.iter().map(|&(x, y)| site(x, y)).collect();
    // grid edge joining two consecutive perimeter sites
    let grid_edge = |a: (usize, usize), b: (usize, usize)| -> usize {
        if a.1 == b.1 {
            h(a.0.min(b.0), a.1)
        } else {
            v(a.0, a.1.min(b.1))
        }
    };
    match boundary {
        Boundary::Plain => {
            if perim.len() > 1 {
                for k in 0..perim.len() {
                    c.boundary_edges
                        .push(grid_edge(perim[k], perim[(k + 1) % perim.len()]));
                }
            }
        }
        Boundary::Rough => {
            let terminal = l * l;
            c.coords.push([-1, -1, 0]);
            let first = c.edges.len();
            for &(x, y) in &perim {
                c.boundary_edges.push(c.edges.len());
                c.edges.push((site(x, y), terminal));
            }
            let np = perim.len();
            if np > 1 {
                for k in 0..np {
                    let k1 = (k + 1) % np;
                    c.plaquettes
                        .push(vec![grid_edge(perim[k], perim[k1]), first + k1, first + k]);
                }
            }
        }
    }
    c.finish()
}

pub fn path(m: usize, boundary: Boundary) -> Result<CellComplex> {
    let mut c = empty(LatticeKind::Path, vec![m], boundary);
    c.n_sites = m;
    for i in 0..m {
        c.coords.push([i as i32, 0, 0]);
    }
    for i in 0..m.saturating_sub(1) {
        c.edges.push((i, i + 1));
    }
    match boundary {
        Boundary::Plain => {
            c.boundary_vertices = if m > 1 { vec![0, m - 1] } else { vec![0] };
        }
        Boundary::Rough => {
            c.coords.push([-1, 0, 0]);
            c.boundary_vertices = vec![0];
            c.boundary_edges = vec![c.edges.len()];
            c.edges.push((0, m));
        }
    }
    c.finish()
}

fn brick_wall(
    kind: LatticeKind,
    dims: Vec<usize>,
    w: usize,
    h: usize,
    periodic: bool,
) -> Result<CellComplex> {
    let mut c = empty(kind, dims, Boundary::Plain);
    c.n_sites = w * h;
    for j in 0..h {
        for i in 0..w {
            c.coords.push([i as i32, j as i32, 0]);
        }
    }
    let site = |i: usize, j: usize| (j % h) * w + (i % w);
    let mut hidx = vec![usize::MAX; w * h];
    for j in 0..h {
        for i in 0..w {
            if periodic || i + 1 < w {
                hidx[j * w + i] = c.edges.len();
                c.edges.push((site(i, j), site(i + 1, j)));
            }
        }
    }
    let mut vidx = vec![usize::MAX; w * h];
    for j in 0..h {
        for i in 0..w {
            if (i + j) % 2 == 0 && (periodic || j + 1 < h) {
                vidx[j * w + i] = c.edges.len();
                c.edges.push((site(i, j), site(i, j + 1)));
            }
        }
    }
    for j in 0..h {
        for i in 0..w {
            if (i + j) % 2 != 0 {
                continue;
            }
            if !periodic && (i + 2 >= w || j + 1 >= h) {
                continue;
            }
            let hx = |ii: usize, jj: usize| hidx[(jj % h) * w + (ii % w)];
            let vx = |ii: usize, jj: usize| vidx[(jj % h) * w + (ii % w)];
            c.plaquettes.push(vec![
                hx(i, j),
                hx(i + 1, j),
                vx(i + 2, j),
                hx(i + 1, j + 1),
                hx(i, j + 1),
                vx(i, j),
            ]);
        }
    }
    if !periodic {
        for j in 0..h {
            for i in 0..w {
                if c.edges
                    .iter()
                    .filter(|&&(a, b)| a == site(i, j) || b == site(i, j))
                    .count()
                    < 3
                {
                    c.boundary_vertices.push(site(i, j));
                }
            }
        }
    }
    c.finish()
}

fn hex_torus(lx: usize, ly: usize) -> Result<CellComplex> {
    if lx < 2 {
        return Err(Error::UnsupportedLattice(
            "hex torus needs Lx >= 2 so that hexagons do not wrap onto themselves".into(),
        ));
    }
    let (w, h) = hex_torus_shape(&[lx, ly]);
    brick_wall(LatticeKind::HexTorus, vec![lx, ly], w, h, true)
}

fn hex_open(lx: usize, ly: usize) -> Result<CellComplex> {
    brick_wall(
        LatticeKind::HexOpen,
        vec![lx, ly],
        2 * lx + 1,
        ly + 1,
        false,
    )
}

fn cubic(kind: LatticeKind, n: [usize; 3]) -> Result<CellComplex> {
    let periodic = kind == LatticeKind::CubicPeriodic;
    if periodic && n.iter().any(|&l| l < 2) {
        return Err(Error::UnsupportedLattice(
            "periodic cubic lattice needs every side >= 2".into(),
        ));
    }
    let mut c = empty(kind, n.to_vec(), Boundary::Plain);
    let total = n[0] * n[1] * n[2];
    c.n_sites = total;
    let site = |p: [usize; 3]| (p[2] * n[1] + p[1]) * n[0] + p[0];
    let mut points = Vec::with_capacity(total);
    for z in 0..n[2] {
        for y in 0..n[1] {
            for x in 0..n[0] {
                points.push([x, y, z]);
                c.coords.push([x as i32, y as i32, z as i32]);
            }
        }
    }
    let step = |p: [usize; 3], d: usize| -> Option<[usize; 3]> {
        let mut q = p;
        q[d] += 1;
        if q[d] == n[d] {
            if periodic {
                q[d] = 0;
            } else {
                return None;
            }
        }
        Some(q)
    };
    let mut eidx = vec![[usize::MAX; 3]; total];
    for d in 0..3 {
        for &p in &points {
            if let Some(q) = step(p, d) {
                eidx[site(p)][d] = c.edges.len();
                c.edges.push((site(p), site(q)));
            }
        }
    }
    for (d1, d2) in [(0, 1), (0, 2), (1, 2)] {
        for &p in &points {
            let (Some(p1), Some(p2)) = (step(p, d1), step(p, d2)) else {
                continue;
            };
            c.plaquettes.push(vec![
                eidx[site(p)][d1],
                eidx[site(p1)][d2],
                eidx[site(p2)][d1],
                eidx[site(p)][d2],
            ]);
        }
    }
    if !periodic {
        c.boundary_vertices = points
            .iter()
            .filter(|p| (0..3).any(|d| n[d] > 1 && (p[d] == 0 || p[d] == n[d] - 1)))
            .map(|&p| site(p))
            .collect();
    }
    c.finish()
}
