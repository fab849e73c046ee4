//! Adiabatic state labelling along a parameter sweep.

use nalgebra::DVector;

use crate::dynamics::eigen::Eigen;
use crate::dynamics::hamiltonian::FockBasis;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackOptions {
    /// Minimum |⟨v(prev)|v(next)⟩| accepted for a step.
    pub min_overlap: f64,
    /// Overlaps closer than this count as ties.
    pub tie_tolerance: f64,
    /// Levels of midpoint bisection tried when a step fails.
    pub max_refine: usize,
}

impl Default for TrackOptions {
    fn default() -> Self {
        TrackOptions { min_overlap: 0.5, tie_tolerance: 1e-9, max_refine: 3 }
    }
}

/// Tracked energies and vectors at one sweep parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackPoint {
    pub param: f64,
    /// Eigenvalue index assigned to each label.
    pub columns: Vec<usize>,
    pub energies: Vec<f64>,
    pub vectors: Vec<DVector<f64>>,
    /// Smallest overlap with the previous point (1 for the first point).
    pub min_overlap: f64,
    pub error: Option<Error>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdiabaticTrack {
    pub labels: Vec<Vec<usize>>,
    pub points: Vec<TrackPoint>,
}

impl AdiabaticTrack {
    pub fn label_index(&self, label: &[usize]) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::MissingLabel(format_label(label)))
    }

    /// Energy of `label` at every point.
    pub fn energies(&self, label: &[usize]) -> Result<Vec<f64>> {
        let i = self.label_index(label)?;
        Ok(self.points.iter().map(|p| p.energies[i]).collect())
    }
}

pub fn format_label(label: &[usize]) -> String {
    let digits: String = label.iter().map(|n| n.to_string()).collect();
    format!("|{digits}>")
}

/// Pick `candidates[best]` by largest score; near-ties go to the candidate
/// whose index is closest to `previous`.
fn argmax_with_tie(scores: &[f64], previous: usize, tie: f64) -> usize {
    let best = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut choice = None;
    for (i, &s) in scores.iter().enumerate() {
        if best - s <= tie {
            let d = i.abs_diff(previous);
            match choice {
                Some((_, bd)) if bd <= d => {}
                _ => choice = Some((i, d)),
            }
        }
    }
    choice.map(|(i, _)| i).unwrap_or(0)
}

/// Label eigenvectors by their largest component on the bare product states.
pub fn label_from_bare(eigen: &Eigen, basis: &FockBasis, labels: &[Vec<usize>], opts: &TrackOptions) -> Result<Vec<usize>> {
    let mut cols = Vec::with_capacity(labels.len());
    for label in labels {
        let row = basis.index(label).ok_or_else(|| Error::MissingLabel(format_label(label)))?;
        let scores: Vec<f64> = (0..eigen.dim()).map(|c| eigen.vectors[(row, c)].abs()).collect();
        // With no history, a near-tie falls back to the bare-state position.
        cols.push(argmax_with_tie(&scores, row, opts.tie_tolerance));
    }
    Ok(cols)
}

struct Assignment {
    columns: Vec<usize>,
    min_overlap: f64,
    collision: bool,
}

fn assign(prev: &[DVector<f64>], prev_cols: &[usize], eigen: &Eigen, opts: &TrackOptions) -> Assignment {
    let mut columns = Vec::with_capacity(prev.len());
    let mut min_overlap = f64::INFINITY;
    for (v, &pc) in prev.iter().zip(prev_cols) {
        let scores: Vec<f64> = (0..eigen.dim()).map(|c| eigen.vectors.column(c).dot(v).abs()).collect();
        let c = argmax_with_tie(&scores, pc, opts.tie_tolerance);
        min_overlap = min_overlap.min(scores[c]);
        columns.push(c);
    }
    let mut sorted = columns.clone();
    sorted.sort_unstable();
    sorted.dedup();
    let collision = sorted.len() != columns.len();
    Assignment { columns, min_overlap, collision }
}

fn select(eigen: &Eigen, columns: &[usize]) -> (Vec<f64>, Vec<DVector<f64>>) {
    let energies = columns.iter().map(|&c| eigen.values[c]).collect();
    let mut vectors: Vec<DVector<f64>> = columns.iter().map(|&c| eigen.vectors.column(c).into_owned()).collect();
    // Fix the arbitrary eigenvector sign so overlaps stay positive along the track.
    for v in vectors.iter_mut() {
        let (imax, _) = v.iamax_full();
        if v[imax] < 0.0 {
            *v *= -1.0;
        }
    }
    (energies, vectors)
}

struct Step {
    columns: Vec<usize>,
    vectors: Vec<DVector<f64>>,
    energies: Vec<f64>,
    min_overlap: f64,
    ok: bool,
}

#[allow(clippy::too_many_arguments)]
fn advance<F>(prev: &[DVector<f64>], prev_cols: &[usize], a: f64, b: f64, eig_b: &Eigen, depth: usize, solve: &F, opts: &TrackOptions) -> Result<Step>
where
    F: Fn(f64) -> Result<Eigen>,
{
    let asg = assign(prev, prev_cols, eig_b, opts);
    let ok = asg.min_overlap >= opts.min_overlap && !asg.collision;
    if ok || depth >= opts.max_refine {
        let (energies, vectors) = select(eig_b, &asg.columns);
        return Ok(Step { columns: asg.columns, vectors, energies, min_overlap: asg.min_overlap, ok });
    }
    let mid = 0.5 * (a + b);
    let eig_mid = solve(mid)?;
    let first = advance(prev, prev_cols, a, mid, &eig_mid, depth + 1, solve, opts)?;
    if !first.ok {
        let asg = assign(prev, prev_cols, eig_b, opts);
        let (energies, vectors) = select(eig_b, &asg.columns);
        return Ok(Step { columns: asg.columns, vectors, energies, min_overlap: asg.min_overlap, ok: false });
    }
    advance(&first.vectors, &first.columns, mid, b, eig_b, depth + 1, solve, opts)
}

/// Follow `labels` through `eigens` (one per entry of `params`, in sweep order).
///
/// The first successfully solved point is labelled against the bare product
/// states; every later point by overlap with its predecessor. Failed steps are
/// refined by midpoint insertion through `solve`; a step that still fails is
/// recorded as a `TrackingBreak` and tracking continues from the best guess.
pub fn track_adiabatic<F>(
    params: &[f64],
    eigens: Vec<Result<Eigen>>,
    basis: &FockBasis,
    labels: &[Vec<usize>],
    solve: F,
    opts: &TrackOptions,
) -> Result<AdiabaticTrack>
where
    F: Fn(f64) -> Result<Eigen>,
{
    assert_eq!(params.len(), eigens.len());
    let n = labels.len();
    let mut points = Vec::with_capacity(params.len());
    let mut prev: Option<(f64, Vec<usize>, Vec<DVector<f64>>)> = None;
    for (&p, eig) in params.iter().zip(eigens) {
        let eig = match eig {
            Ok(e) => e,
            Err(err) => {
                points.push(TrackPoint {
                    param: p,
                    columns: vec![usize::MAX; n],
                    energies: vec![f64::NAN; n],
                    vectors: Vec::new(),
                    min_overlap: f64::NAN,
                    error: Some(err),
                });
                continue;
            }
        };
        let point = match &prev {
            None => {
                let columns = label_from_bare(&eig, basis, labels, opts)?;
                let (energies, vectors) = select(&eig, &columns);
                let mut uniq = columns.clone();
                uniq.sort_unstable();
                uniq.dedup();
                let error = (uniq.len() != n).then_some(Error::TrackingBreak { from: p, to: p });
                TrackPoint { param: p, columns, energies, vectors, min_overlap: 1.0, error }
            }
            Some((pp, pcols, pvecs)) => {
                let step = advance(pvecs, pcols, *pp, p, &eig, 0, &solve, opts)?;
                let error = (!step.ok).then_some(Error::TrackingBreak { from: *pp, to: p });
                TrackPoint { param: p, columns: step.columns, energies: step.energies, vectors: step.vectors, min_overlap: step.min_overlap, error }
            }
        };
        prev = Some((p, point.columns.clone(), point.vectors.clone()));
        points.push(point);
    }
    Ok(AdiabaticTrack { labels: labels.to_vec(), points })
}

/// Label a single eigendecomposition by overlap with already tracked vectors.
pub fn label_by_reference(eigen: &Eigen, reference: &TrackPoint, opts: &TrackOptions) -> Result<(Vec<f64>, f64)> {
    let asg = assign(&reference.vectors, &reference.columns, eigen, opts);
    if asg.collision || asg.min_overlap < opts.min_overlap {
        return Err(Error::TrackingBreak { from: reference.param, to: reference.param });
    }
    let (energies, _) = select(eigen, &asg.columns);
    Ok((energies, asg.min_overlap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::eigen::{eigensolve, eigensolve_by_sector};
    use crate::dynamics::hamiltonian::build_truncated_hamiltonian;
    use nalgebra::{DMatrix, DVector};

    fn lz(eps: f64, g: f64) -> Result<Eigen> {
        eigensolve(&DMatrix::from_row_slice(2, 2, &[eps, g, g, -eps]))
    }

    #[test]
    fn landau_zener_follows_adiabatic_branch() {
        let g = 0.05;
        let grid: Vec<f64> = (0..=200).map(|i| -1.0 + 0.01 * i as f64).collect();
        let eig: Vec<_> = grid.iter().map(|&e| lz(e, g)).collect();
        let basis = FockBasis::new(1, 2);
        let labels = vec![vec![1], vec![0]];
        let t = track_adiabatic(&grid, eig, &basis, &labels, |e| lz(e, g), &TrackOptions::default()).unwrap();
        // |1⟩ has energy −ε and starts as the upper level at ε = −1.
        for (p, &e) in t.points.iter().zip(&t.energies(&[1]).unwrap()) {
            let upper = (p.param * p.param + g * g).sqrt();
            assert!((e - upper).abs() < 1e-12, "at {} got {}", p.param, e);
            assert!(p.error.is_none());
        }
    }

    #[test]
    fn zero_coupling_keeps_bare_labels() {
        let grid: Vec<f64> = (0..50).map(|i| 3.0 + 0.1 * i as f64).collect();
        let solve = |nu: f64| eigensolve_by_sector(&build_truncated_hamiltonian([4.25, 4.7], [nu, 7.9], [[0.0; 2]; 2]));
        let eig: Vec<_> = grid.iter().map(|&x| solve(x)).collect();
        let basis = FockBasis::new(4, 2);
        let labels = vec![vec![0, 0, 0, 0], vec![1, 0, 0, 0], vec![0, 0, 0, 1], vec![1, 0, 0, 1]];
        let t = track_adiabatic(&grid, eig, &basis, &labels, solve, &TrackOptions::default()).unwrap();
        for p in &t.points {
            let nu = p.param;
            let bare = |o: [f64; 4]| -> f64 {
                [4.25, nu, 7.9, 4.7].iter().zip(o).map(|(w, n)| if n == 1.0 { w / 2.0 } else { -w / 2.0 }).sum()
            };
            assert!((p.energies[0] - bare([0.0, 0.0, 0.0, 0.0])).abs() < 1e-12);
            assert!((p.energies[3] - bare([1.0, 0.0, 0.0, 1.0])).abs() < 1e-12);
            for (v, l) in p.vectors.iter().zip(&labels) {
                assert!((v[basis.index(l).unwrap()] - 1.0).abs() < 1e-12);
            }
        }
    }

    /// Eigenvectors rotating continuously as exp(pK) with fixed energy ranks.
    fn rotating(k: &DMatrix<f64>, p: f64) -> Result<Eigen> {
        let n = k.nrows();
        Ok(Eigen { values: DVector::from_fn(n, |i, _| i as f64), vectors: (k * p).exp() })
    }

    fn generator(seed: u64, scale: f64) -> DMatrix<f64> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let a = DMatrix::from_fn(6, 6, |_, _| rng.random_range(-1.0..1.0));
        let k = &a - a.transpose();
        let norm = k.norm();
        k * (scale / norm)
    }

    fn track_rotation(scale: f64) -> AdiabaticTrack {
        let k = generator(7, scale);
        let grid = vec![0.0, 1.0];
        let eig: Vec<_> = grid.iter().map(|&p| rotating(&k, p)).collect();
        let labels: Vec<Vec<usize>> = (0..6).map(|i| vec![i]).collect();
        track_adiabatic(&grid, eig, &FockBasis::new(1, 6), &labels, |p| rotating(&k, p), &TrackOptions::default()).unwrap()
    }

    #[test]
    fn coarse_grid_is_refined() {
        let k = generator(7, 2.0);
        let direct = assign(&rotating(&k, 0.0).unwrap().vectors.column_iter().map(|c| c.into_owned()).collect::<Vec<_>>(), &[0, 1, 2, 3, 4, 5], &rotating(&k, 1.0).unwrap(), &TrackOptions::default());
        assert!(direct.collision || direct.min_overlap < 0.5, "step should need refinement");
        let t = track_rotation(2.0);
        assert!(t.points[1].error.is_none());
        assert_eq!(t.points[1].columns, vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn unresolvable_step_is_reported() {
        let t = track_rotation(30.0);
        assert!(matches!(t.points[1].error, Some(Error::TrackingBreak { from: 0.0, to: 1.0 })));
    }

    #[test]
    fn ties_keep_previous_rank() {
        assert_eq!(argmax_with_tie(&[0.5, 0.7, 0.7 - 1e-12, 0.1], 2, 1e-9), 2);
        assert_eq!(argmax_with_tie(&[0.5, 0.7, 0.7 - 1e-12, 0.1], 0, 1e-9), 1);
        assert_eq!(argmax_with_tie(&[0.5, 0.7, 0.6, 0.1], 2, 1e-9), 1);
    }
}
