//! Quantization and modulation codebooks.
//!
//! Quantization codebooks hold unit-norm real codewords on the sphere in
//! `R^D`, trained with Lloyd iterations (spherical k-means: nearest codeword
//! by Euclidean distance, centroids renormalized to unit length). Modulation
//! codebooks hold complex sequences with entries drawn uniformly from
//! `{(+-1 +- j) / sqrt(2)}`.

use std::io::{Read, Write};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::CodecError;

const LLOYD_MAX_ITERS: usize = 100;
const LLOYD_REL_TOL: f64 = 1e-6;

/// Unit-norm codewords, one per column of a D x I matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantCodebook {
    mat: DMatrix<f64>,
    bits: usize,
}

impl QuantCodebook {
    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn size(&self) -> usize {
        self.mat.ncols()
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn codeword(&self, i: usize) -> DVector<f64> {
        self.mat.column(i).into_owned()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    /// Index of the codeword with minimum Euclidean distance to `v`; ties
    /// break to the lowest index.
    pub fn quantize(&self, v: &DVector<f64>) -> usize {
        let mut best = 0usize;
        let mut best_d2 = f64::INFINITY;
        for i in 0..self.size() {
            let d2 = (v - self.mat.column(i)).norm_squared();
            if d2 < best_d2 {
                best_d2 = d2;
                best = i;
            }
        }
        best
    }

    /// Mean squared quantization error over a sample set.
    pub fn distortion(&self, samples: &[DVector<f64>]) -> f64 {
        let total: f64 = samples
            .iter()
            .map(|v| (v - self.mat.column(self.quantize(v))).norm_squared())
            .sum();
        total / samples.len() as f64
    }
}

/// Nearest-codeword quantization: `argmin_i ||v - q_i||`, ties to the lowest
/// index.
pub fn quantize_block(v: &DVector<f64>, codebook: &QuantCodebook) -> usize {
    codebook.quantize(v)
}

/// Unit vectors from normalized i.i.d. Gaussians: `2^bits * multiplier`
/// training samples matching the feature model after block normalization.
pub fn standard_training_set<R: Rng + ?Sized>(
    d: usize,
    bits: usize,
    multiplier: usize,
    rng: &mut R,
) -> Vec<DVector<f64>> {
    let count = (1usize << bits) * multiplier;
    (0..count)
        .map(|_| {
            let mut v = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
            let n = v.norm();
            if n > 0.0 {
                v /= n;
            } else {
                v[0] = 1.0;
            }
            v
        })
        .collect()
}

fn normalize_or_keep(sum: DVector<f64>, previous: &DVector<f64>) -> DVector<f64> {
    let n = sum.norm();
    if n > 1e-300 {
        sum / n
    } else {
        previous.clone()
    }
}

fn lloyd(
    d: usize,
    bits: usize,
    samples: &[DVector<f64>],
    mut centroids: Vec<DVector<f64>>,
) -> Result<QuantCodebook, CodecError> {
    let size = 1usize << bits;
    let n = samples.len();
    let mut assignment = vec![0usize; n];
    let mut prev_distortion = f64::INFINITY;
    for _ in 0..LLOYD_MAX_ITERS {
        // Assignment by max inner product == min Euclidean distance on the
        // sphere; ties resolve to the lowest index via strict improvement.
        let mut distortion = 0.0;
        for (s, v) in samples.iter().enumerate() {
            let mut best = 0usize;
            let mut best_dot = f64::NEG_INFINITY;
            for (i, c) in centroids.iter().enumerate() {
                let dot = v.dot(c);
                if dot > best_dot {
                    best_dot = dot;
                    best = i;
                }
            }
            assignment[s] = best;
            distortion += 2.0 - 2.0 * best_dot;
        }
        distortion /= n as f64;

        let mut sums = vec![DVector::<f64>::zeros(d); size];
        let mut counts = vec![0usize; size];
        for (s, v) in samples.iter().enumerate() {
            sums[assignment[s]] += v;
            counts[assignment[s]] += 1;
        }
        for i in 0..size {
            if counts[i] > 0 {
                centroids[i] = normalize_or_keep(std::mem::take(&mut sums[i]), &centroids[i]);
            } else {
                // Re-seed an empty cluster with the sample farthest from its
                // current codeword.
                let far = samples
                    .iter()
                    .enumerate()
                    .max_by(|(sa, a), (sb, b)| {
                        let da = (*a - &centroids[assignment[*sa]]).norm_squared();
                        let db = (*b - &centroids[assignment[*sb]]).norm_squared();
                        da.partial_cmp(&db).unwrap()
                    })
                    .map(|(_, v)| v.clone())
                    .unwrap();
                centroids[i] = far;
            }
        }

        if prev_distortion.is_finite()
            && (prev_distortion - distortion) < LLOYD_REL_TOL * prev_distortion.max(1e-300)
        {
            break;
        }
        prev_distortion = distortion;
    }
    let mat = DMatrix::from_fn(d, size, |r, c| centroids[c][r]);
    Ok(QuantCodebook { mat, bits })
}

fn check_training_input(
    d: usize,
    bits: usize,
    samples: &[DVector<f64>],
) -> Result<usize, CodecError> {
    let size = 1usize
        .checked_shl(bits as u32)
        .ok_or_else(|| CodecError::Parameter(format!("bits = {bits} too large")))?;
    if samples.len() < size {
        return Err(CodecError::Parameter(format!(
            "need at least {size} training samples, got {}",
            samples.len()
        )));
    }
    if samples.iter().any(|s| s.len() != d) {
        return Err(CodecError::Dimension("training sample dimension mismatch".into()));
    }
    Ok(size)
}

/// Trains a `2^bits`-codeword sphere codebook with Lloyd iterations seeded by
/// uniformly drawn distinct samples.
pub fn train_codebook<R: Rng + ?Sized>(
    d: usize,
    bits: usize,
    samples: &[DVector<f64>],
    rng: &mut R,
) -> Result<QuantCodebook, CodecError> {
    let size = check_training_input(d, bits, samples)?;
    // Partial Fisher-Yates over sample indices for distinct seeds.
    let mut idx: Vec<usize> = (0..samples.len()).collect();
    for i in 0..size {
        let pick = i + rng.random_range(0..idx.len() - i);
        idx.swap(i, pick);
    }
    let centroids = idx[..size].iter().map(|&i| samples[i].clone()).collect();
    lloyd(d, bits, samples, centroids)
}

/// Same Lloyd refinement but seeded with k-means++: each new seed is drawn
/// with probability proportional to its squared distance from the seeds
/// chosen so far.
pub fn train_codebook_kmeanspp<R: Rng + ?Sized>(
    d: usize,
    bits: usize,
    samples: &[DVector<f64>],
    rng: &mut R,
) -> Result<QuantCodebook, CodecError> {
    let size = check_training_input(d, bits, samples)?;
    let mut centroids: Vec<DVector<f64>> = Vec::with_capacity(size);
    let first = rng.random_range(0..samples.len());
    centroids.push(samples[first].clone());
    let mut d2: Vec<f64> = samples.iter().map(|v| (v - &centroids[0]).norm_squared()).collect();
    while centroids.len() < size {
        let total: f64 = d2.iter().sum();
        let pick = if total <= 0.0 {
            rng.random_range(0..samples.len())
        } else {
            let mut target = rng.random::<f64>() * total;
            let mut chosen = samples.len() - 1;
            for (i, w) in d2.iter().enumerate() {
                target -= w;
                if target <= 0.0 {
                    chosen = i;
                    break;
                }
            }
            chosen
        };
        centroids.push(samples[pick].clone());
        for (i, v) in samples.iter().enumerate() {
            d2[i] = d2[i].min((v - centroids.last().unwrap()).norm_squared());
        }
    }
    lloyd(d, bits, samples, centroids)
}

/// Complex modulation sequences, one per column of a J x I matrix; entries
/// lie in `{(+-1 +- j) / sqrt(2)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModCodebook {
    mat: DMatrix<Complex64>,
    bits: usize,
}

impl ModCodebook {
    pub fn seq_len(&self) -> usize {
        self.mat.nrows()
    }

    pub fn size(&self) -> usize {
        self.mat.ncols()
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn column(&self, i: usize) -> DVector<Complex64> {
        self.mat.column(i).into_owned()
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }
}

/// Draws a J x 2^bits modulation codebook with i.i.d. uniform quaternary
/// entries.
pub fn build_modulation_codebook<R: Rng + ?Sized>(
    j: usize,
    bits: usize,
    rng: &mut R,
) -> ModCodebook {
    let size = 1usize << bits;
    let half = std::f64::consts::FRAC_1_SQRT_2;
    let mat = DMatrix::from_fn(j, size, |_, _| {
        let re = if rng.random::<bool>() { half } else { -half };
        let im = if rng.random::<bool>() { half } else { -half };
        Complex64::new(re, im)
    });
    ModCodebook { mat, bits }
}

/// A matched quantization/modulation codebook pair sharing one bit budget;
/// column `i` of the modulation codebook carries codeword `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct CodebookPair {
    pub quant: QuantCodebook,
    pub modulation: ModCodebook,
}

impl CodebookPair {
    pub fn bits(&self) -> usize {
        self.quant.bits()
    }

    pub fn size(&self) -> usize {
        self.quant.size()
    }
}

const CODEBOOK_MAGIC: &[u8; 4] = b"ACBK";
const CODEBOOK_VERSION: u32 = 1;

fn write_u32<W: Write>(w: &mut W, v: u32) -> std::io::Result<()> {
    w.write_all(&v.to_le_bytes())
}

fn read_u32<R: Read>(r: &mut R) -> std::io::Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

fn write_f64<W: Write>(w: &mut W, v: f64) -> std::io::Result<()> {
    w.write_all(&v.to_le_bytes())
}

fn read_f64<R: Read>(r: &mut R) -> std::io::Result<f64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(f64::from_le_bytes(buf))
}

impl CodebookPair {
    /// Writes the pair as little-endian binary: header {D, J, bits}, the
    /// quantization matrix row-major, then the modulation matrix row-major
    /// with interleaved re/im.
    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<(), CodecError> {
        w.write_all(CODEBOOK_MAGIC)?;
        write_u32(w, CODEBOOK_VERSION)?;
        write_u32(w, self.quant.dim() as u32)?;
        write_u32(w, self.modulation.seq_len() as u32)?;
        write_u32(w, self.bits() as u32)?;
        let q = self.quant.as_matrix();
        for r in 0..q.nrows() {
            for c in 0..q.ncols() {
                write_f64(w, q[(r, c)])?;
            }
        }
        let p = self.modulation.as_matrix();
        for r in 0..p.nrows() {
            for c in 0..p.ncols() {
                write_f64(w, p[(r, c)].re)?;
                write_f64(w, p[(r, c)].im)?;
            }
        }
        Ok(())
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self, CodecError> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != CODEBOOK_MAGIC {
            return Err(CodecError::Format("bad magic".into()));
        }
        let version = read_u32(r)?;
        if version != CODEBOOK_VERSION {
            return Err(CodecError::Format(format!("unsupported version {version}")));
        }
        let d = read_u32(r)? as usize;
        let j = read_u32(r)? as usize;
        let bits = read_u32(r)? as usize;
        if bits >= usize::BITS as usize {
            return Err(CodecError::Format(format!("bits = {bits} too large")));
        }
        let size = 1usize << bits;
        let mut q = DMatrix::zeros(d, size);
        for row in 0..d {
            for c in 0..size {
                q[(row, c)] = read_f64(r)?;
            }
        }
        let mut p = DMatrix::from_element(j, size, Complex64::ZERO);
        for row in 0..j {
            for c in 0..size {
                let re = read_f64(r)?;
                let im = read_f64(r)?;
                p[(row, c)] = Complex64::new(re, im);
            }
        }
        for c in 0..size {
            let norm = q.column(c).norm();
            if (norm - 1.0).abs() > 1e-9 {
                return Err(CodecError::Format(format!(
                    "quantization codeword {c} has norm {norm}"
                )));
            }
        }
        Ok(Self {
            quant: QuantCodebook { mat: q, bits },
            modulation: ModCodebook { mat: p, bits },
        })
    }

    pub fn save(&self, path: &std::path::Path) -> Result<(), CodecError> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_to(&mut f)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CodecError> {
        let mut f = std::io::BufReader::new(std::fs::File::open(path)?);
        Self::read_from(&mut f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Purpose};

    fn training(d: usize, bits: usize, seed: u64) -> Vec<DVector<f64>> {
        standard_training_set(d, bits, 64, &mut stream(seed, Purpose::Codebooks, 0))
    }

    #[test]
    fn zero_bits_gives_spherical_centroid() {
        let mut rng = stream(40, Purpose::Codebooks, 0);
        // Samples concentrated around e1 so the mean is far from zero.
        let samples: Vec<DVector<f64>> = (0..64)
            .map(|_| {
                let mut v = DVector::from_fn(3, |r, _| {
                    if r == 0 {
                        3.0 + rng.sample::<f64, _>(StandardNormal) * 0.1
                    } else {
                        rng.sample::<f64, _>(StandardNormal) * 0.1
                    }
                });
                let n = v.norm();
                v /= n;
                v
            })
            .collect();
        let cb = train_codebook(3, 0, &samples, &mut rng).unwrap();
        assert_eq!(cb.size(), 1);
        let mut mean = DVector::zeros(3);
        for s in &samples {
            mean += s;
        }
        mean /= mean.norm();
        assert!((cb.codeword(0) - mean).norm() < 1e-9);
    }

    #[test]
    fn two_clusters_on_the_circle() {
        // Samples near (1,0) and (0,1); the two trained codewords must land
        // within 0.1 rad of those axes. Oracle: spherical 2-means run from the
        // true cluster centers.
        let mut rng = stream(41, Purpose::Codebooks, 0);
        let mut samples = Vec::new();
        for i in 0..400 {
            let base = if i % 2 == 0 { 0.0 } else { std::f64::consts::FRAC_PI_2 };
            let angle = base + rng.sample::<f64, _>(StandardNormal) * 0.05;
            samples.push(DVector::from_row_slice(&[angle.cos(), angle.sin()]));
        }
        let cb = train_codebook(2, 1, &samples, &mut rng).unwrap();
        let mut angles: Vec<f64> = (0..2).map(|i| cb.codeword(i)[1].atan2(cb.codeword(i)[0])).collect();
        angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!(angles[0].abs() < 0.1, "angle {}", angles[0]);
        assert!((angles[1] - std::f64::consts::FRAC_PI_2).abs() < 0.1, "angle {}", angles[1]);
    }

    #[test]
    fn distortion_decreases_with_bits() {
        let d = 4;
        let holdout = training(d, 6, 99); // 4096 >> 1e4? 2^6*64 = 4096 held-out samples
        let mut prev = f64::INFINITY;
        for bits in [2usize, 4, 6] {
            let samples = training(d, bits, 42);
            let cb =
                train_codebook(d, bits, &samples, &mut stream(43, Purpose::Codebooks, 1)).unwrap();
            let dist = cb.distortion(&holdout);
            assert!(dist < prev, "distortion {dist} at {bits} bits not below {prev}");
            prev = dist;
        }
    }

    #[test]
    fn quantize_prefers_nearest_and_breaks_ties_low() {
        let mat = DMatrix::from_columns(&[
            DVector::from_row_slice(&[1.0, 0.0]),
            DVector::from_row_slice(&[0.0, 1.0]),
        ]);
        let cb = QuantCodebook { mat, bits: 1 };
        let v = DVector::from_row_slice(&[0.8, 0.6]);
        assert_eq!(cb.quantize(&v), 0); // distances sqrt(0.4) vs sqrt(0.8)
        assert_eq!(cb.quantize(&DVector::from_row_slice(&[0.0, 1.0])), 1);
        // Equidistant point ties to the lowest index.
        let tie = DVector::from_row_slice(&[0.5f64.sqrt(), 0.5f64.sqrt()]);
        assert_eq!(cb.quantize(&tie), 0);
    }

    #[test]
    fn quantize_matches_exhaustive_scan() {
        let mut rng = stream(44, Purpose::Codebooks, 0);
        let samples = training(5, 4, 7);
        let cb = train_codebook(5, 4, &samples, &mut rng).unwrap();
        for _ in 0..50 {
            let (_, v) = crate::codec::decompose_block(&DVector::from_fn(5, |_, _| {
                rng.sample::<f64, _>(StandardNormal)
            }));
            let got = cb.quantize(&v);
            let brute = (0..cb.size())
                .min_by(|&a, &b| {
                    let da = (&v - cb.codeword(a)).norm_squared();
                    let db = (&v - cb.codeword(b)).norm_squared();
                    da.partial_cmp(&db).unwrap()
                })
                .unwrap();
            assert_eq!(got, brute);
        }
    }

    #[test]
    fn round_trip_is_no_worse_than_any_codeword() {
        let mut rng = stream(45, Purpose::Codebooks, 0);
        let samples = training(4, 3, 8);
        let cb = train_codebook(4, 3, &samples, &mut rng).unwrap();
        for v in samples.iter().take(100) {
            let chosen = cb.codeword(cb.quantize(v));
            for i in 0..cb.size() {
                assert!((v - &chosen).norm() <= (v - cb.codeword(i)).norm() + 1e-12);
            }
        }
    }

    #[test]
    fn trained_codewords_are_unit_norm() {
        let samples = training(6, 4, 9);
        let cb =
            train_codebook(6, 4, &samples, &mut stream(46, Purpose::Codebooks, 0)).unwrap();
        for i in 0..cb.size() {
            assert!((cb.codeword(i).norm() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn kmeanspp_also_trains_valid_codebooks() {
        let samples = training(4, 4, 10);
        let cb = train_codebook_kmeanspp(4, 4, &samples, &mut stream(47, Purpose::Codebooks, 0))
            .unwrap();
        assert_eq!(cb.size(), 16);
        for i in 0..cb.size() {
            assert!((cb.codeword(i).norm() - 1.0).abs() < 1e-9);
        }
        // Comparable quality to the plain seeding.
        let plain =
            train_codebook(4, 4, &samples, &mut stream(47, Purpose::Codebooks, 1)).unwrap();
        let holdout = training(4, 4, 11);
        assert!(cb.distortion(&holdout) < 2.0 * plain.distortion(&holdout));
    }

    #[test]
    fn insufficient_samples_rejected() {
        let samples = training(4, 2, 12);
        assert!(train_codebook(4, 6, &samples[..8], &mut stream(48, Purpose::Codebooks, 0))
            .is_err());
    }

    #[test]
    fn modulation_entries_are_unit_modulus_quaternary() {
        let p = build_modulation_codebook(16, 5, &mut stream(49, Purpose::Codebooks, 0));
        let half = std::f64::consts::FRAC_1_SQRT_2;
        for v in p.as_matrix().iter() {
            assert!((v.norm() - 1.0).abs() < 1e-15);
            assert!((v.re.abs() - half).abs() < 1e-15);
            assert!((v.im.abs() - half).abs() < 1e-15);
        }
    }

    #[test]
    fn modulation_symbols_uniform() {
        // Frequency test over 1e5 entries: each of the 4 symbols within 3
        // standard errors of 1/4.
        let p = build_modulation_codebook(100, 10, &mut stream(50, Purpose::Codebooks, 0));
        let mut counts = [0usize; 4];
        for v in p.as_matrix().iter() {
            let idx = (if v.re > 0.0 { 0 } else { 1 }) + (if v.im > 0.0 { 0 } else { 2 });
            counts[idx] += 1;
        }
        let n = (100 * 1024) as f64;
        let se = (0.25 * 0.75 / n).sqrt();
        for c in counts {
            let freq = c as f64 / n;
            assert!((freq - 0.25).abs() < 3.0 * se, "freq {freq}");
        }
    }

    #[test]
    fn modulation_deterministic_given_seed() {
        let a = build_modulation_codebook(8, 4, &mut stream(51, Purpose::Codebooks, 0));
        let b = build_modulation_codebook(8, 4, &mut stream(51, Purpose::Codebooks, 0));
        assert_eq!(a, b);
    }

    #[test]
    fn codebook_pair_round_trips_through_bytes() {
        let samples = training(4, 3, 13);
        let quant =
            train_codebook(4, 3, &samples, &mut stream(52, Purpose::Codebooks, 0)).unwrap();
        let modulation = build_modulation_codebook(6, 3, &mut stream(52, Purpose::Codebooks, 1));
        let pair = CodebookPair { quant, modulation };
        let mut buf = Vec::new();
        pair.write_to(&mut buf).unwrap();
        let back = CodebookPair::read_from(&mut buf.as_slice()).unwrap();
        assert_eq!(pair, back);
    }

    #[test]
    fn corrupt_codebook_file_is_rejected() {
        assert!(CodebookPair::read_from(&mut &b"nope"[..]).is_err());
    }
}
