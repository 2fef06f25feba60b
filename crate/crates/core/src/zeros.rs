//! Zero tables: build by scanning Z sign changes, ingest from text files,
//! persist to a binary cache, query N(T) and N(sigma, T), and inject
//! synthetic off-line zeros for exercising zero-density-dependent paths.

use crate::error::{Error, Result};
use crate::zeta::{gram_point, hardy_z_unchecked, mean_gap, theta_series};
use rayon::prelude::*;
use std::io::{Read, Write};
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Origin {
    Computed,
    Ingested,
    Synthetic,
}

#[derive(Clone, Copy, Debug)]
pub struct ZeroEntry {
    pub beta: f64,
    pub gamma: f64,
    pub multiplicity: u32,
    pub origin: Origin,
}

impl ZeroEntry {
    pub fn on_line(gamma: f64, origin: Origin) -> ZeroEntry {
        ZeroEntry {
            beta: 0.5,
            gamma,
            multiplicity: 1,
            origin,
        }
    }

    pub fn synthetic(beta: f64, gamma: f64) -> ZeroEntry {
        ZeroEntry {
            beta,
            gamma,
            multiplicity: 1,
            origin: Origin::Synthetic,
        }
    }
}

/// Sorted table of nontrivial-zero ordinates. Read-only once built.
#[derive(Clone, Debug)]
pub struct ZeroTable {
    entries: Vec<ZeroEntry>,
    covered: Option<(f64, f64)>,
    provenance: String,
    cum_mult: Vec<usize>,
}

impl ZeroTable {
    pub fn from_entries(
        mut entries: Vec<ZeroEntry>,
        covered: Option<(f64, f64)>,
        provenance: impl Into<String>,
    ) -> ZeroTable {
        entries.sort_by(|a, b| {
            a.gamma
                .partial_cmp(&b.gamma)
                .unwrap()
                .then(a.beta.partial_cmp(&b.beta).unwrap())
        });
        let mut cum = Vec::with_capacity(entries.len());
        let mut acc = 0usize;
        for e in &entries {
            acc += e.multiplicity as usize;
            cum.push(acc);
        }
        ZeroTable {
            entries,
            covered,
            provenance: provenance.into(),
            cum_mult: cum,
        }
    }

    pub fn empty() -> ZeroTable {
        ZeroTable::from_entries(Vec::new(), None, "empty")
    }

    pub fn entries(&self) -> &[ZeroEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn covered(&self) -> Option<(f64, f64)> {
        self.covered
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn covered_desc(&self) -> String {
        match self.covered {
            Some((lo, hi)) => format!("[{lo}, {hi}]"),
            None => "(empty)".into(),
        }
    }

    /// A table whose scan started at or below t = 10 is complete from 0:
    /// the first zero ordinate lies above 14.
    pub fn covers_from_origin(&self, t: f64) -> bool {
        match self.covered {
            Some((lo, hi)) => lo <= 10.0 + 1e-9 && t <= hi,
            None => false,
        }
    }

    pub fn covers(&self, lo: f64, hi: f64) -> bool {
        match self.covered {
            Some((clo, chi)) => (clo <= lo || (clo <= 10.0 + 1e-9 && lo >= 0.0)) && hi <= chi,
            None => false,
        }
    }

    /// Declare the table complete from ordinate 0 (for ingested files known
    /// to start at the first zero).
    pub fn assume_complete_from_origin(mut self) -> ZeroTable {
        if let Some((_, hi)) = self.covered {
            self.covered = Some((0.0, hi));
        }
        self
    }

    /// N(T): zeros with gamma <= t, counted with multiplicity.
    pub fn count_leq(&self, t: f64) -> usize {
        let idx = self.entries.partition_point(|e| e.gamma <= t);
        if idx == 0 {
            0
        } else {
            self.cum_mult[idx - 1]
        }
    }

    pub fn nearest_gamma(&self, t: f64) -> Option<f64> {
        if self.entries.is_empty() {
            return None;
        }
        let idx = self.entries.partition_point(|e| e.gamma < t);
        let mut best = f64::INFINITY;
        let mut arg = None;
        for i in [idx.wrapping_sub(1), idx] {
            if let Some(e) = self.entries.get(i) {
                let d = (e.gamma - t).abs();
                if d < best {
                    best = d;
                    arg = Some(e.gamma);
                }
            }
        }
        arg
    }

    /// Entries with |gamma - t| <= w (positive ordinates only).
    pub fn window(&self, t: f64, w: f64) -> &[ZeroEntry] {
        let lo = self.entries.partition_point(|e| e.gamma < t - w);
        let hi = self.entries.partition_point(|e| e.gamma <= t + w);
        &self.entries[lo..hi]
    }

    /// Largest |beta - 1/2| present (0 for a purely on-line table).
    pub fn max_beta_dev(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| (e.beta - 0.5).abs())
            .fold(0.0, f64::max)
    }

    pub fn has_synthetic(&self) -> bool {
        self.entries.iter().any(|e| e.origin == Origin::Synthetic)
    }
}

/// Result of a scan: the table plus non-fatal audit notes.
#[derive(Debug)]
pub struct ScanOutcome {
    pub table: ZeroTable,
    pub warnings: Vec<String>,
}

/// Locate all sign changes of Z on [t_lo, t_hi] and audit completeness by
/// Gram-block counting with local grid refinement.
///
/// `grid_factor` is the sample density per local mean gap; below 4 the scan
/// still runs (the refinement path repairs coarse grids where it can) but a
/// warning is recorded.
pub fn scan_zeros(t_lo: f64, t_hi: f64, grid_factor: f64) -> Result<ScanOutcome> {
    if !(10.0 <= t_lo && t_lo < t_hi) {
        return Err(Error::Domain(format!(
            "scan range must satisfy 10 <= t_lo < t_hi, got [{t_lo}, {t_hi}]"
        )));
    }
    if !(grid_factor >= 0.5) {
        return Err(Error::Domain(format!(
            "grid_factor must be >= 0.5, got {grid_factor}"
        )));
    }
    let mut warnings = Vec::new();
    if grid_factor < 4.0 {
        warnings.push(format!(
            "grid_factor {grid_factor} below supported minimum 4; relying on refinement"
        ));
    }

    let z = |t: f64| hardy_z_unchecked(t, 4);

    // Good Gram anchors just outside the requested range.
    let n_lo = anchor_below(t_lo, &z)?;
    let n_hi = anchor_above(t_hi, &z)?;

    // Good Gram indices partition [g_lo, g_hi] into blocks with known counts.
    let mut good = vec![n_lo];
    for n in (n_lo + 1)..n_hi {
        let g = gram_point(n);
        let zg = z(g);
        if parity_ok(n, zg) {
            good.push(n);
        }
    }
    good.push(n_hi);

    let blocks: Vec<(i64, i64)> = good.windows(2).map(|w| (w[0], w[1])).collect();
    let results: Vec<Result<(Vec<f64>, bool)>> = blocks
        .par_iter()
        .map(|&(a, b)| scan_block(a, b, grid_factor, &z))
        .collect();

    let mut zeros = Vec::new();
    let mut refined_blocks = 0usize;
    for r in results {
        let (v, refined) = r?;
        if refined {
            refined_blocks += 1;
        }
        zeros.extend(v);
    }
    if refined_blocks > 0 {
        warnings.push(format!(
            "{refined_blocks} Gram block(s) needed grid refinement to reach the expected count"
        ));
    }
    zeros.sort_by(|a, b| a.partial_cmp(b).unwrap());
    zeros.retain(|&g| g >= t_lo && g <= t_hi);

    let entries: Vec<ZeroEntry> = zeros
        .iter()
        .map(|&g| ZeroEntry::on_line(g, Origin::Computed))
        .collect();
    let table = ZeroTable::from_entries(
        entries,
        Some((t_lo, t_hi)),
        format!("scan[{t_lo},{t_hi}]x{grid_factor}"),
    );
    Ok(ScanOutcome { table, warnings })
}

fn parity_ok(n: i64, z_at_gram: f64) -> bool {
    let sign = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    sign * z_at_gram > 0.0
}

fn anchor_below(t: f64, z: &impl Fn(f64) -> f64) -> Result<i64> {
    let mut n = (theta_series(t) / std::f64::consts::PI).floor() as i64;
    while n >= -1 {
        let g = gram_point(n);
        if g <= t && parity_ok(n, z(g)) {
            return Ok(n);
        }
        n -= 1;
    }
    Err(Error::Domain(format!("no good Gram anchor below {t}")))
}

fn anchor_above(t: f64, z: &impl Fn(f64) -> f64) -> Result<i64> {
    let mut n = (theta_series(t) / std::f64::consts::PI).ceil() as i64;
    for _ in 0..10_000 {
        let g = gram_point(n);
        if g >= t && parity_ok(n, z(g)) {
            return Ok(n);
        }
        n += 1;
    }
    Err(Error::Domain(format!("no good Gram anchor above {t}")))
}

/// Scan one Gram block (g_a, g_b], expected count b - a, refining the grid
/// up to four times before reporting an audit mismatch. Returns the zeros and
/// whether refinement beyond the requested grid was needed.
fn scan_block(
    a: i64,
    b: i64,
    grid_factor: f64,
    z: &impl Fn(f64) -> f64,
) -> Result<(Vec<f64>, bool)> {
    let ga = gram_point(a);
    let gb = gram_point(b);
    let expected = (b - a) as usize;
    let gap = mean_gap(0.5 * (ga + gb));
    let mut factor = grid_factor;
    for attempt in 0..5 {
        let n_pts = (((gb - ga) / gap * factor).ceil() as usize).max(2);
        let zeros = sign_change_scan(ga, gb, n_pts, z);
        if zeros.len() == expected {
            return Ok((zeros, attempt > 0));
        }
        if zeros.len() > expected {
            return Err(Error::AuditMismatch {
                lo: ga,
                hi: gb,
                expected,
                found: zeros.len(),
            });
        }
        factor *= 4.0;
    }
    let n_pts = (((gb - ga) / gap * factor).ceil() as usize).max(2);
    let found = sign_change_scan(ga, gb, n_pts, z).len();
    Err(Error::AuditMismatch {
        lo: ga,
        hi: gb,
        expected,
        found,
    })
}

fn sign_change_scan(lo: f64, hi: f64, n_pts: usize, z: &impl Fn(f64) -> f64) -> Vec<f64> {
    let h = (hi - lo) / n_pts as f64;
    let mut prev_t = lo;
    let mut prev_z = z(lo);
    let mut out = Vec::new();
    for i in 1..=n_pts {
        let t = if i == n_pts { hi } else { lo + h * i as f64 };
        let zt = z(t);
        if prev_z * zt < 0.0 {
            out.push(bisect_zero(prev_t, t, prev_z, z));
        }
        prev_t = t;
        prev_z = zt;
    }
    out
}

fn bisect_zero(mut lo: f64, mut hi: f64, z_lo: f64, z: &impl Fn(f64) -> f64) -> f64 {
    let s_lo = z_lo.signum();
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if z(mid).signum() == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Parse a text zero file: one decimal ordinate per line, ascending,
/// '#' comment lines ignored.
pub fn ingest_zeros(path: &Path) -> Result<ZeroTable> {
    let mut text = String::new();
    std::fs::File::open(path)?.read_to_string(&mut text)?;
    ingest_zeros_str(&text, format!("ingest:{}", path.display()))
}

pub fn ingest_zeros_str(text: &str, provenance: String) -> Result<ZeroTable> {
    let mut ordinates: Vec<f64> = Vec::new();
    let mut prev: Option<f64> = None;
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let s = line.trim();
        if s.is_empty() || s.starts_with('#') {
            continue;
        }
        let v: f64 = s.parse().map_err(|e| Error::Parse {
            line: line_no,
            msg: format!("{e} in {s:?}"),
        })?;
        if let Some(p) = prev {
            if v <= p {
                return Err(Error::Monotonicity {
                    line: line_no,
                    prev: p,
                    next: v,
                });
            }
        }
        prev = Some(v);
        ordinates.push(v);
    }
    let covered = match (ordinates.first(), ordinates.last()) {
        (Some(&a), Some(&b)) => Some((a, b)),
        _ => None,
    };
    let entries = ordinates
        .into_iter()
        .map(|g| ZeroEntry::on_line(g, Origin::Ingested))
        .collect();
    Ok(ZeroTable::from_entries(entries, covered, provenance))
}

/// N(sigma, T): zeros with beta > sigma, 0 <= gamma <= T, with multiplicity.
///
/// The density-bound comparison is meaningful for sigma >= 1/2 + 1/log T;
/// the count itself is served for any sigma >= 1/2.
pub fn count_n_sigma(table: &ZeroTable, sigma: f64, t: f64) -> Result<usize> {
    if sigma < 0.5 {
        return Err(Error::Precondition(format!(
            "sigma must be >= 1/2, got {sigma}"
        )));
    }
    if !table.covers(0.0, t) && !table.covers_from_origin(t) {
        return Err(Error::Coverage {
            need_lo: 0.0,
            need_hi: t,
            covered: table.covered_desc(),
        });
    }
    Ok(table
        .entries
        .iter()
        .filter(|e| e.beta > sigma && e.gamma >= 0.0 && e.gamma <= t)
        .map(|e| e.multiplicity as usize)
        .sum())
}

/// Right-hand side of the zero-density bound: T^{1 - lambda (sigma - 1/2)} Phi(T).
pub fn density_bound_eval(lambda: f64, phi_at_t: f64, sigma: f64, t: f64) -> f64 {
    t.powf(1.0 - lambda * (sigma - 0.5)) * phi_at_t
}

/// Merge synthetic zeros into a table. The symmetric partner 1 - beta is NOT
/// auto-added; callers that need the functional-equation pair add both.
pub fn inject_synthetic(table: &ZeroTable, zeros: &[ZeroEntry]) -> Result<ZeroTable> {
    for e in zeros {
        if !(e.beta > 0.0 && e.beta < 1.0) {
            return Err(Error::BetaRange(e.beta));
        }
    }
    let mut entries = table.entries.clone();
    entries.extend(zeros.iter().map(|e| ZeroEntry {
        origin: Origin::Synthetic,
        ..*e
    }));
    Ok(ZeroTable::from_entries(
        entries,
        table.covered,
        format!("{}+synthetic", table.provenance),
    ))
}

const CACHE_MAGIC: &[u8; 4] = b"ZMLZ";
const CACHE_VERSION: u32 = 1;

/// Write the real (computed/ingested) ordinates to the binary cache format:
/// magic "ZMLZ", u32 LE version, u64 LE count, 2 x f64 LE covered bounds,
/// then count x f64 LE ordinates. Synthetic entries are never persisted.
pub fn save_cache(table: &ZeroTable, path: &Path) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    let real: Vec<&ZeroEntry> = table
        .entries
        .iter()
        .filter(|e| e.origin != Origin::Synthetic)
        .collect();
    f.write_all(CACHE_MAGIC)?;
    f.write_all(&CACHE_VERSION.to_le_bytes())?;
    f.write_all(&(real.len() as u64).to_le_bytes())?;
    let (lo, hi) = table.covered.unwrap_or((f64::NAN, f64::NAN));
    f.write_all(&lo.to_le_bytes())?;
    f.write_all(&hi.to_le_bytes())?;
    for e in &real {
        f.write_all(&e.gamma.to_le_bytes())?;
    }
    Ok(())
}

pub fn load_cache(path: &Path) -> Result<ZeroTable> {
    let mut buf = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut buf)?;
    if buf.len() < 32 || &buf[0..4] != CACHE_MAGIC {
        return Err(Error::Cache("bad magic".into()));
    }
    let version = u32::from_le_bytes(buf[4..8].try_into().unwrap());
    if version != CACHE_VERSION {
        return Err(Error::Cache(format!("unsupported version {version}")));
    }
    let count = u64::from_le_bytes(buf[8..16].try_into().unwrap()) as usize;
    if buf.len() != 32 + 8 * count {
        return Err(Error::Cache(format!(
            "length {} does not match count {count}",
            buf.len()
        )));
    }
    let lo = f64::from_le_bytes(buf[16..24].try_into().unwrap());
    let hi = f64::from_le_bytes(buf[24..32].try_into().unwrap());
    let mut entries = Vec::with_capacity(count);
    for i in 0..count {
        let off = 32 + 8 * i;
        let g = f64::from_le_bytes(buf[off..off + 8].try_into().unwrap());
        entries.push(ZeroEntry::on_line(g, Origin::Computed));
    }
    let covered = if lo.is_nan() { None } else { Some((lo, hi)) };
    Ok(ZeroTable::from_entries(
        entries,
        covered,
        format!("cache:{}", path.display()),
    ))
}

/// Independent count of zeros in (t_lo, t_hi] by anchor-to-anchor argument
/// tracking; used by the audit command and the table invariant tests.
pub fn expected_count(t_lo: f64, t_hi: f64) -> Result<usize> {
    let z = |t: f64| hardy_z_unchecked(t, 4);
    let n_lo = anchor_below(t_lo, &z)?;
    let n_hi = anchor_above(t_hi, &z)?;
    let mut count = (n_hi - n_lo) as usize;
    // trim zeros between the anchors and the requested endpoints
    let ga = gram_point(n_lo);
    let gb = gram_point(n_hi);
    let gap = mean_gap(t_lo);
    count -= sign_change_scan(ga, t_lo, ((t_lo - ga) / gap * 64.0).ceil() as usize + 2, &z).len();
    count -= sign_change_scan(t_hi, gb, ((gb - t_hi) / gap * 64.0).ceil() as usize + 2, &z).len();
    Ok(count)
}
