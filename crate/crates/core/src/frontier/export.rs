//! Map CSV and boundary polylines.
//!
//! Boundaries are traced along cell edges: wherever two neighbouring cells
//! carry different classes, the shared edge becomes a segment. Segments are
//! grouped by the unordered class pair and chained into polylines. Lattice
//! vertices sit halfway between axis values, extended by half a step past
//! either end of each axis.
//!
//! Runtime level sets come from [`iso_lines`] instead, which interpolates
//! the scalar `log₂ R_Q` field between samples.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{Cell, FrontierError, RegionLabel, RegionMap};
use crate::costmodel::{Algorithm, YEAR_SECONDS};

const HEADER: [&str; 8] = [
    "n",
    "m",
    "label",
    "log2_rq_seconds",
    "log2_rc_seconds",
    "best_classical",
    "alpha_sa",
    "alpha_sfa",
];

fn opt_f64(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_map_csv<W: Write>(map: &RegionMap, out: W) -> Result<(), FrontierError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for c in &map.cells {
        w.write_record([
            c.n.to_string(),
            c.m.to_string(),
            c.label.as_str().to_string(),
            c.log2_rq_seconds.to_string(),
            opt_f64(c.log2_rc_seconds),
            c.best_classical.map(|a| a.tag().to_string()).unwrap_or_default(),
            opt_f64(c.alpha_sa),
            opt_f64(c.alpha_sfa),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn bad(row: usize, msg: impl std::fmt::Display) -> FrontierError {
    FrontierError::BadMapCsv(format!("row {row}: {msg}"))
}

fn parse_opt(field: &str, row: usize, what: &str) -> Result<Option<f64>, FrontierError> {
    if field.is_empty() {
        return Ok(None);
    }
    field.parse().map(Some).map_err(|_| bad(row, format!("invalid {what} `{field}`")))
}

fn parse_algorithm(field: &str, row: usize) -> Result<Option<Algorithm>, FrontierError> {
    Ok(match field {
        "" => None,
        "SA" => Some(Algorithm::Sa),
        "SFA" => Some(Algorithm::Sfa),
        "TN" => Some(Algorithm::Tn),
        other => return Err(bad(row, format!("unknown classical method `{other}`"))),
    })
}

/// Inverse of [`write_map_csv`]. Rows must form a complete `n`-major grid.
pub fn parse_map_csv<R: Read>(input: R) -> Result<RegionMap, FrontierError> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let headers = r.headers()?.clone();
    if headers.iter().ne(HEADER.iter().copied()) {
        return Err(FrontierError::BadMapCsv("unexpected header".into()));
    }
    let mut cells = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = i + 1;
        if rec.len() != HEADER.len() {
            return Err(bad(row, "wrong field count"));
        }
        let n = rec[0].parse().map_err(|_| bad(row, "invalid n"))?;
        let m = rec[1].parse().map_err(|_| bad(row, "invalid m"))?;
        let label: RegionLabel = rec[2].parse().map_err(|e| bad(row, e))?;
        let log2_rq_seconds = parse_opt(&rec[3], row, "log2_rq_seconds")?.ok_or_else(|| bad(row, "missing log2_rq_seconds"))?;
        cells.push(Cell {
            n,
            m,
            label,
            log2_rq_seconds,
            log2_rc_seconds: parse_opt(&rec[4], row, "log2_rc_seconds")?,
            best_classical: parse_algorithm(&rec[5], row)?,
            alpha_sa: parse_opt(&rec[6], row, "alpha_sa")?,
            alpha_sfa: parse_opt(&rec[7], row, "alpha_sfa")?,
        });
    }
    if cells.is_empty() {
        return Err(FrontierError::BadMapCsv("no rows".into()));
    }
    let first_n = cells[0].n;
    let m_axis: Vec<usize> = cells.iter().take_while(|c| c.n == first_n).map(|c| c.m).collect();
    if cells.len() % m_axis.len() != 0 {
        return Err(FrontierError::BadMapCsv("rows do not form a complete grid".into()));
    }
    let n_axis: Vec<usize> = cells.chunks(m_axis.len()).map(|ch| ch[0].n).collect();
    for (i, chunk) in cells.chunks(m_axis.len()).enumerate() {
        for (j, c) in chunk.iter().enumerate() {
            if c.n != n_axis[i] || c.m != m_axis[j] {
                return Err(bad(i * m_axis.len() + j + 1, "cell out of grid order"));
            }
        }
    }
    super::check_axis(&n_axis, "n")?;
    super::check_axis(&m_axis, "m")?;
    Ok(RegionMap { n_axis, m_axis, cells })
}

/// A chain of lattice vertices separating two classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Boundary {
    /// The two classes on either side, smaller first.
    pub classes: (usize, usize),
    /// Vertices `(a, b)` on the edge lattice: `a ∈ 0..=nn`, `b ∈ 0..=nm`.
    pub points: Vec<(usize, usize)>,
    pub closed: bool,
}

type Point = (usize, usize);

/// Join segments that share endpoints into maximal chains. Open chains
/// start at odd-degree vertices; the remainder are loops.
fn chain<K: Ord + Copy>(segs: &[(K, K)]) -> Vec<(Vec<K>, bool)> {
    let mut adj: BTreeMap<K, Vec<usize>> = BTreeMap::new();
    for (k, &(p, q)) in segs.iter().enumerate() {
        adj.entry(p).or_default().push(k);
        adj.entry(q).or_default().push(k);
    }
    let mut used = vec![false; segs.len()];
    let walk = |start: K, used: &mut Vec<bool>| {
        let mut pts = vec![start];
        let mut cur = start;
        while let Some(&k) = adj[&cur].iter().find(|&&k| !used[k]) {
            used[k] = true;
            let (p, q) = segs[k];
            cur = if p == cur { q } else { p };
            pts.push(cur);
        }
        pts
    };
    let mut out = Vec::new();
    let ends: Vec<K> = adj.iter().filter(|(_, v)| v.len() % 2 == 1).map(|(p, _)| *p).collect();
    for p in ends {
        if adj[&p].iter().any(|&k| !used[k]) {
            out.push((walk(p, &mut used), false));
        }
    }
    for k in 0..segs.len() {
        if !used[k] {
            let pts = walk(segs[k].0, &mut used);
            let closed = pts.first() == pts.last();
            out.push((pts, closed));
        }
    }
    out
}

/// Trace class boundaries on an `nn × nm` grid stored `n`-major.
pub fn trace_boundaries(classes: &[usize], nn: usize, nm: usize) -> Vec<Boundary> {
    assert_eq!(classes.len(), nn * nm, "class grid size");
    let at = |i: usize, j: usize| classes[i * nm + j];
    let mut groups: BTreeMap<(usize, usize), Vec<(Point, Point)>> = BTreeMap::new();
    let mut push = |a: usize, b: usize, s: (Point, Point)| {
        groups.entry((a.min(b), a.max(b))).or_default().push(s);
    };
    for i in 0..nn {
        for j in 0..nm {
            if i + 1 < nn && at(i, j) != at(i + 1, j) {
                push(at(i, j), at(i + 1, j), ((i + 1, j), (i + 1, j + 1)));
            }
            if j + 1 < nm && at(i, j) != at(i, j + 1) {
                push(at(i, j), at(i, j + 1), ((i, j + 1), (i + 1, j + 1)));
            }
        }
    }
    let mut out = Vec::new();
    for (pair, segs) in groups {
        for (points, closed) in chain(&segs) {
            out.push(Boundary { classes: pair, points, closed });
        }
    }
    out
}

/// Grid edge holding a level crossing: `(0, i, j)` joins samples `(i, j)`
/// and `(i + 1, j)`, `(1, i, j)` joins `(i, j)` and `(i, j + 1)`.
type EdgeKey = (u8, usize, usize);

/// Iso-line of a scalar field on an `nn × nm` sample grid (`n`-major) by
/// marching squares with linear interpolation along cell edges. Saddles
/// are resolved by the mean of the four corners. Vertices are fractional
/// sample indices `(i, j)`.
pub fn iso_lines(values: &[f64], nn: usize, nm: usize, level: f64) -> Vec<(Vec<[f64; 2]>, bool)> {
    assert_eq!(values.len(), nn * nm, "field size");
    let v = |i: usize, j: usize| values[i * nm + j];
    let above = |i: usize, j: usize| v(i, j) > level;
    let mut segs: Vec<(EdgeKey, EdgeKey)> = Vec::new();
    for i in 0..nn.saturating_sub(1) {
        for j in 0..nm.saturating_sub(1) {
            let (a, b, c, d) = (above(i, j), above(i + 1, j), above(i + 1, j + 1), above(i, j + 1));
            let e0 = (0, i, j);
            let e1 = (1, i + 1, j);
            let e2 = (0, i, j + 1);
            let e3 = (1, i, j);
            let crossed: Vec<EdgeKey> =
                [(a != b, e0), (b != c, e1), (d != c, e2), (a != d, e3)].into_iter().filter(|x| x.0).map(|x| x.1).collect();
            match crossed.len() {
                2 => segs.push((crossed[0], crossed[1])),
                4 => {
                    let centre = (v(i, j) + v(i + 1, j) + v(i + 1, j + 1) + v(i, j + 1)) / 4.0 > level;
                    if centre == a {
                        segs.push((e0, e1));
                        segs.push((e2, e3));
                    } else {
                        segs.push((e0, e3));
                        segs.push((e1, e2));
                    }
                }
                _ => {}
            }
        }
    }
    let place = |(dir, i, j): EdgeKey| {
        let (v0, v1) = if dir == 0 { (v(i, j), v(i + 1, j)) } else { (v(i, j), v(i, j + 1)) };
        let t = (level - v0) / (v1 - v0);
        let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 0.5 };
        if dir == 0 {
            [i as f64 + t, j as f64]
        } else {
            [i as f64, j as f64 + t]
        }
    };
    chain(&segs).into_iter().map(|(keys, closed)| (keys.into_iter().map(place).collect(), closed)).collect()
}

/// Axis value at fractional index `x`, linear between samples.
fn axis_value(axis: &[usize], x: f64) -> f64 {
    let k = (x.floor() as usize).min(axis.len() - 1);
    if k + 1 >= axis.len() {
        return axis[k] as f64;
    }
    let t = x - k as f64;
    axis[k] as f64 * (1.0 - t) + axis[k + 1] as f64 * t
}

fn edge_coord(axis: &[usize], k: usize) -> f64 {
    let v = |i: usize| axis[i] as f64;
    let len = axis.len();
    if len == 1 {
        return v(0) + if k == 0 { -0.5 } else { 0.5 };
    }
    if k == 0 {
        v(0) - (v(1) - v(0)) / 2.0
    } else if k == len {
        v(len - 1) + (v(len - 1) - v(len - 2)) / 2.0
    } else {
        (v(k - 1) + v(k)) / 2.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    pub labels: [String; 2],
    /// `(n, m)` vertices.
    pub points: Vec<[f64; 2]>,
    pub closed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RqContour {
    pub name: String,
    pub seconds: f64,
    pub polylines: Vec<Polyline>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Contours {
    pub n_axis: Vec<usize>,
    pub m_axis: Vec<usize>,
    pub polylines: Vec<Polyline>,
    pub rq_contours: Vec<RqContour>,
}

fn to_polylines(map: &RegionMap, bounds: Vec<Boundary>, name: impl Fn(usize) -> String) -> Vec<Polyline> {
    bounds
        .into_iter()
        .map(|b| Polyline {
            labels: [name(b.classes.0), name(b.classes.1)],
            points: b.points.iter().map(|&(a, c)| [edge_coord(&map.n_axis, a), edge_coord(&map.m_axis, c)]).collect(),
            closed: b.closed,
        })
        .collect()
}

impl Contours {
    /// Label boundaries along cell edges plus interpolated `R_Q` level sets
    /// at one day, one year and `cutoff_seconds`. Level-set polylines keep
    /// `labels = [BELOW, ABOVE]` without orientation.
    pub fn from_map(map: &RegionMap, cutoff_seconds: f64) -> Self {
        let (nn, nm) = (map.n_axis.len(), map.m_axis.len());
        let label_ix: Vec<usize> =
            map.cells.iter().map(|c| RegionLabel::ALL.iter().position(|&l| l == c.label).unwrap_or(0)).collect();
        let polylines = to_polylines(map, trace_boundaries(&label_ix, nn, nm), |i| RegionLabel::ALL[i].as_str().into());

        let levels = [("1 day", 86_400.0), ("1 year", YEAR_SECONDS), ("cutoff", cutoff_seconds)];
        let rq_contours = levels
            .into_iter()
            .map(|(name, seconds)| {
                let rq: Vec<f64> = map.cells.iter().map(|c| c.log2_rq_seconds).collect();
                let polylines = iso_lines(&rq, nn, nm, f64::log2(seconds))
                    .into_iter()
                    .map(|(pts, closed)| Polyline {
                        labels: ["BELOW".into(), "ABOVE".into()],
                        points: pts.iter().map(|&[a, b]| [axis_value(&map.n_axis, a), axis_value(&map.m_axis, b)]).collect(),
                        closed,
                    })
                    .collect();
                RqContour { name: name.into(), seconds, polylines }
            })
            .collect();
        Contours { n_axis: map.n_axis.clone(), m_axis: map.m_axis.clone(), polylines, rq_contours }
    }
}

pub fn write_contours_json<W: Write>(map: &RegionMap, cutoff_seconds: f64, out: W) -> Result<(), FrontierError> {
    serde_json::to_writer(out, &Contours::from_map(map, cutoff_seconds))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::costmodel::HardwareProfile;
    use crate::fidmodel::FidelityParams;
    use crate::frontier::{compute_map, FrontierConfig};

    fn small_map() -> RegionMap {
        compute_map(
            &[10, 20, 53, 100, 300],
            &[4, 6, 14, 20, 60, 200, 500],
            &FidelityParams::sycamore(),
            &HardwareProfile::default(),
            &FrontierConfig::default(),
        )
        .unwrap()
    }

    #[test]
    fn csv_round_trip() {
        let map = small_map();
        let mut buf = Vec::new();
        write_map_csv(&map, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("n,m,label,log2_rq_seconds,log2_rc_seconds,best_classical,alpha_sa,alpha_sfa\n"));
        assert_eq!(text.lines().count(), 1 + map.cells.len());
        assert_eq!(parse_map_csv(&buf[..]).unwrap(), map);
    }

    #[test]
    fn csv_rejects_malformed() {
        let head = HEADER.join(",");
        for body in [
            String::new(),
            format!("{head}\n"),
            format!("{head}\n10,6,NOPE,1,,,,\n"),
            format!("{head}\n10,6,CLASSICAL_SA,x,,,,\n"),
            format!("{head}\n10,6,CLASSICAL_SA,1,,QQ,,\n"),
            format!("{head}\n10,6,CLASSICAL_SA,1,,,,\n10,7,CLASSICAL_SA,1,,,,\n20,6,CLASSICAL_SA,1,,,,\n"),
            format!("{head}\n10,7,CLASSICAL_SA,1,,,,\n10,6,CLASSICAL_SA,1,,,,\n"),
            "a,b\n1,2\n".to_string(),
        ] {
            assert!(parse_map_csv(body.as_bytes()).is_err(), "{body:?}");
        }
    }

    #[test]
    fn single_cell_has_no_boundaries() {
        assert!(trace_boundaries(&[3], 1, 1).is_empty());
        let map = compute_map(&[53], &[20], &FidelityParams::sycamore(), &HardwareProfile::default(), &FrontierConfig::default()).unwrap();
        let mut buf = Vec::new();
        write_map_csv(&map, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 2);
        assert!(Contours::from_map(&map, 1.0).polylines.is_empty());
    }

    #[test]
    fn step_gives_one_polyline() {
        // 4 widths × 3 depths, classes split between width index 1 and 2.
        let classes = [0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1];
        let b = trace_boundaries(&classes, 4, 3);
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].classes, (0, 1));
        assert_eq!(b[0].points, vec![(2, 0), (2, 1), (2, 2), (2, 3)]);
        assert!(!b[0].closed);
    }

    #[test]
    fn island_is_closed() {
        let mut classes = vec![0; 9];
        classes[4] = 1;
        let b = trace_boundaries(&classes, 3, 3);
        assert_eq!(b.len(), 1);
        assert!(b[0].closed);
        assert_eq!(b[0].points.len(), 5);
    }

    #[test]
    fn edge_coordinates() {
        assert_eq!(edge_coord(&[10, 20, 40], 0), 5.0);
        assert_eq!(edge_coord(&[10, 20, 40], 1), 15.0);
        assert_eq!(edge_coord(&[10, 20, 40], 3), 50.0);
        assert_eq!(edge_coord(&[7], 0), 6.5);
        assert_eq!(edge_coord(&[7], 1), 7.5);
    }

    #[test]
    fn contour_json_shape() {
        let map = small_map();
        let mut buf = Vec::new();
        write_contours_json(&map, HardwareProfile::default().cutoff_seconds.value, &mut buf).unwrap();
        let c: Contours = serde_json::from_slice(&buf).unwrap();
        assert_eq!(c.rq_contours.len(), 3);
        assert!(!c.polylines.is_empty());
        for p in &c.polylines {
            assert!(p.labels[0] != p.labels[1]);
            assert!(p.points.len() >= 2);
        }
    }

    proptest! {
        #[test]
        fn every_differing_edge_is_covered(nn in 1usize..7, nm in 1usize..7, seed in prop::collection::vec(0usize..3, 49)) {
            let classes: Vec<usize> = seed[..nn * nm].to_vec();
            let bounds = trace_boundaries(&classes, nn, nm);
            let mut covered = std::collections::BTreeSet::new();
            for b in &bounds {
                for w in b.points.windows(2) {
                    let s = if w[0] <= w[1] { (w[0], w[1]) } else { (w[1], w[0]) };
                    prop_assert!(covered.insert((b.classes, s)), "segment emitted twice");
                }
            }
            let mut expected = 0;
            for i in 0..nn {
                for j in 0..nm {
                    if i + 1 < nn && classes[i * nm + j] != classes[(i + 1) * nm + j] { expected += 1; }
                    if j + 1 < nm && classes[i * nm + j] != classes[i * nm + j + 1] { expected += 1; }
                }
            }
            prop_assert_eq!(covered.len(), expected);
        }
    }

    #[test]
    fn iso_line_of_linear_field_is_exact() {
        let (nn, nm) = (6, 5);
        let values: Vec<f64> = (0..nn).flat_map(|i| (0..nm).map(move |j| i as f64 + 2.0 * j as f64)).collect();
        let lines = iso_lines(&values, nn, nm, 4.3);
        assert_eq!(lines.len(), 1);
        assert!(!lines[0].1);
        for [a, b] in &lines[0].0 {
            assert!((a + 2.0 * b - 4.3).abs() < 1e-12, "({a}, {b})");
        }
    }

    #[test]
    fn iso_line_around_peak_is_closed() {
        let (nn, nm) = (7, 7);
        let values: Vec<f64> =
            (0..nn).flat_map(|i| (0..nm).map(move |j| -((i as f64 - 3.0).powi(2) + (j as f64 - 3.0).powi(2)))).collect();
        let lines = iso_lines(&values, nn, nm, -4.5);
        assert_eq!(lines.len(), 1);
        assert!(lines[0].1);
        for [a, b] in &lines[0].0 {
            let r2 = (a - 3.0).powi(2) + (b - 3.0).powi(2);
            assert!((r2 - 4.5).abs() < 1.0, "r² = {r2}");
        }
    }

    #[test]
    fn saddle_uses_centre_value() {
        // Diagonal corners high; a high centre joins them.
        let joined = iso_lines(&[1.0, 0.0, 0.0, 1.0], 2, 2, 0.4);
        let split = iso_lines(&[1.0, 0.0, 0.0, 1.0], 2, 2, 0.6);
        assert_eq!(joined.len(), 2);
        assert_eq!(split.len(), 2);
        let has = |lines: &[(Vec<[f64; 2]>, bool)], p: [f64; 2], q: [f64; 2]| {
            lines.iter().any(|(pts, _)| {
                let near = |x: [f64; 2], y: [f64; 2]| (x[0] - y[0]).abs() + (x[1] - y[1]).abs() < 1e-12;
                (near(pts[0], p) && near(pts[1], q)) || (near(pts[0], q) && near(pts[1], p))
            })
        };
        // Corner (1, 0) cut off from the rest when the centre is above.
        assert!(has(&joined, [0.6, 0.0], [1.0, 0.4]));
        assert!(has(&split, [0.4, 0.0], [0.0, 0.4]));
    }

    #[test]
    fn flat_field_has_no_iso_lines() {
        assert!(iso_lines(&[1.0; 12], 3, 4, 1.0).is_empty());
        assert!(iso_lines(&[2.0], 1, 1, 1.0).is_empty());
    }
}
