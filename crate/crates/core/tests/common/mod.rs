//! Test-only oracles independent of the library's floating-point paths.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Fixed-point reals with `DIGITS` decimal places.
pub const DIGITS: u32 = 60;

const PI_100: &str =
    "31415926535897932384626433832795028841971693993751058209749445923078164062862089986280348253421170679";

pub fn scale() -> BigInt {
    BigInt::from(10u32).pow(DIGITS)
}

pub fn pi() -> BigInt {
    PI_100[..(DIGITS as usize + 1)].parse().unwrap()
}

pub fn from_ratio(num: i64, den: i64) -> BigInt {
    BigInt::from(num) * scale() / BigInt::from(den)
}

pub fn mul(a: &BigInt, b: &BigInt) -> BigInt {
    a * b / scale()
}

pub fn div(a: &BigInt, b: &BigInt) -> BigInt {
    a * scale() / b
}

/// cos(x) by Taylor series; fine for |x| ≤ 2.
pub fn cos(x: &BigInt) -> BigInt {
    let x2 = mul(x, x);
    let mut term = scale();
    let mut sum = term.clone();
    let mut k = 1u32;
    loop {
        term = -mul(&term, &x2) / BigInt::from((2 * k - 1) * (2 * k));
        if term.is_zero() {
            return sum;
        }
        sum += &term;
        k += 1;
    }
}

/// Ceiling of a fixed-point value, asserting it is not within 1e-40 of an
/// integer (so truncation error cannot flip the result).
pub fn ceil(x: &BigInt) -> i64 {
    let s = scale();
    let q = x / &s;
    let r = x - &q * &s;
    let guard = BigInt::from(10u32).pow(DIGITS - 40);
    assert!(
        r.abs() > guard && (&s - r.abs()) > guard,
        "oracle value too close to an integer"
    );
    let q = if r.is_positive() { q + BigInt::one() } else { q };
    q.to_i64().unwrap()
}

pub fn to_f64(x: &BigInt) -> f64 {
    let s = x.to_string();
    let (neg, digits) = match s.strip_prefix('-') {
        Some(d) => (true, d.to_string()),
        None => (false, s),
    };
    let padded = format!("{:0>width$}", digits, width = DIGITS as usize + 1);
    let (int, frac) = padded.split_at(padded.len() - DIGITS as usize);
    let v: f64 = format!("{int}.{frac}").parse().unwrap();
    if neg {
        -v
    } else {
        v
    }
}

/// Earth radius 6378.137 km and spacing as exact rationals (metres).
pub struct OracleGrid {
    pub radius_m: i64,
    pub spacing_m: i64,
}

impl OracleGrid {
    pub fn standard() -> Self {
        OracleGrid {
            radius_m: 6_378_137,
            spacing_m: 10_000,
        }
    }

    /// ceil(π R / D)
    pub fn n_rows(&self) -> i64 {
        ceil(&(pi() * self.radius_m / self.spacing_m))
    }

    /// max(1, ceil(2π R cos(π r / N_r) / D))
    pub fn num_cols(&self, row: i64) -> i64 {
        let n = self.n_rows();
        let angle = pi() * row / n;
        let c = cos(&angle);
        if c < BigInt::from(10u32).pow(DIGITS - 40) {
            return 1;
        }
        let circumference = mul(&(pi() * 2 * self.radius_m), &c);
        ceil(&(circumference / self.spacing_m)).max(1)
    }

    /// Row latitude r·180/N_r in degrees.
    pub fn row_lat(&self, row: i64) -> f64 {
        to_f64(&from_ratio(row * 180, self.n_rows()))
    }

    /// Anchor longitude col·360/N_c(row) in degrees.
    pub fn anchor_lon(&self, row: i64, col: i64) -> f64 {
        to_f64(&from_ratio(col * 360, self.num_cols(row)))
    }
}

#[test]
fn oracle_self_check() {
    // cos(π/3) = 1/2
    let half = cos(&(pi() / 3));
    assert!((to_f64(&half) - 0.5).abs() < 1e-15);
    assert_eq!(to_f64(&from_ratio(-1, 4)), -0.25);
    assert!((to_f64(&div(&pi(), &from_ratio(1, 1))) - std::f64::consts::PI).abs() < 1e-15);
}

pub mod gen {
    use majortom::catalog::MetadataRecord;
    use majortom::sampler::ProviderScene;
    use majortom::{CellId, GridSpec, Timestamp};
    use rand::rngs::StdRng;
    use rand::Rng;

    pub const SOURCES: [&str; 3] = ["S2-L1C", "S2-L2A", "S1-RTC"];

    /// A cell near the origin so that random records collide on cells.
    pub fn cell(rng: &mut StdRng, span: i32) -> CellId {
        CellId::new(rng.gen_range(-span..=span), rng.gen_range(-span..=span))
    }

    pub fn record(rng: &mut StdRng, span: i32) -> MetadataRecord {
        let mut r = MetadataRecord::new(
            cell(rng, span),
            SOURCES[rng.gen_range(0..SOURCES.len())],
            format!("P{:04}", rng.gen_range(0..2000)),
            Timestamp::from_unix(1_500_000_000 + rng.gen_range(0..200) * 3600),
        );
        if rng.gen_bool(0.8) {
            r.cloud_fraction = Some((rng.gen_range(0..=20) as f64) / 20.0);
        }
        if rng.gen_bool(0.5) {
            r.nodata_fraction = Some((rng.gen_range(0..=10) as f64) / 100.0);
        }
        if rng.gen_bool(0.2) {
            r.time_end = Some(Timestamp::from_unix(r.time_start.unix() + 30));
        }
        if rng.gen_bool(0.1) {
            r.extra.insert("tile".into(), format!("T{}", rng.gen_range(0..9)));
        }
        r
    }

    pub fn records(rng: &mut StdRng, n: usize, span: i32) -> Vec<MetadataRecord> {
        (0..n).map(|_| record(rng, span)).collect()
    }

    pub fn records_upto(rng: &mut StdRng, max: usize, span: i32) -> Vec<MetadataRecord> {
        let n = rng.gen_range(0..max);
        records(rng, n, span)
    }

    pub fn catalog(spec: GridSpec, records: &[MetadataRecord]) -> majortom::Catalog {
        let mut c = majortom::Catalog::new(spec);
        for r in records {
            c.insert(r.clone()).unwrap();
        }
        c
    }

    /// Scene pools for `n_cells` cells on the default grid between 2018 and
    /// 2020. Each cell gets a pool whose size and cloudiness vary so that
    /// outright acceptance, fallback and unsampled outcomes all occur.
    pub fn scene_pools(rng: &mut StdRng, n_cells: usize) -> (Vec<CellId>, Vec<ProviderScene>) {
        let spec = GridSpec::default();
        let start = Timestamp::from_unix(1_514_764_800); // 2018-01-01
        let span_s = 2 * 365 * 86_400;
        let mut cells = Vec::new();
        let mut scenes = Vec::new();
        while cells.len() < n_cells {
            let row = rng.gen_range(-800..=800);
            let (lo, hi) = spec.col_range(row).unwrap();
            let cell = CellId::new(row, rng.gen_range(lo..=hi));
            if cells.contains(&cell) {
                continue;
            }
            cells.push(cell);
            let kind = rng.gen_range(0..4);
            let pool = match kind {
                0 => rng.gen_range(0..20),
                1 => rng.gen_range(50..120),
                _ => rng.gen_range(200..500),
            };
            for i in 0..pool {
                let refined = match kind {
                    // mostly cloudy: fallback territory
                    2 => rng.gen_range(0.2..1.0),
                    3 => rng.gen_range(0.3..1.0),
                    _ => rng.gen_range(0.0..1.0f64),
                };
                let rough = (refined + rng.gen_range(-0.3..0.3f64)).clamp(0.0, 1.0);
                scenes.push(ProviderScene {
                    cell,
                    scene_id: format!("S2_{i:04}"),
                    acquired: Timestamp::from_unix(start.unix() + rng.gen_range(0..span_s)),
                    rough_cloud: (rough * 100.0).round() / 100.0,
                    refined_cloud: if rng.gen_bool(0.02) {
                        None
                    } else {
                        Some((refined * 100.0).round() / 100.0)
                    },
                    nodata_fraction: Some(if rng.gen_bool(0.1) {
                        rng.gen_range(0.05..0.5)
                    } else {
                        0.0
                    }),
                });
            }
        }
        (cells, scenes)
    }
}

/// Exhaustive reference implementations.
pub mod brute {
    use std::collections::BTreeSet;

    use chrono::Months;
    use majortom::catalog::MetadataRecord;
    use majortom::geogrid::{great_circle_km, LatLon};
    use majortom::sampler::{InspectionRecord, Outcome};
    use majortom::{CellId, GridSpec, SamplerConfig, SelectionResult, Timestamp};

    pub type Key = (CellId, String, String, Timestamp);

    pub fn key(r: &MetadataRecord) -> Key {
        (r.cell, r.source.clone(), r.product_id.clone(), r.time_start)
    }

    /// First occurrence of each identity, as ingest would keep.
    pub fn dedup(records: &[MetadataRecord]) -> Vec<MetadataRecord> {
        let mut seen = BTreeSet::new();
        records.iter().filter(|r| seen.insert(key(r))).cloned().collect()
    }

    pub fn brute_bbox(spec: &GridSpec, lat_min: f64, lat_max: f64, lon_min: f64, lon_max: f64) -> Vec<CellId> {
        let mut out = Vec::new();
        for row in spec.row_min()..=spec.row_max() {
            let (lo, hi) = spec.col_range(row).unwrap();
            for col in lo..=hi {
                let p = spec.cell_to_coords(CellId::new(row, col)).unwrap();
                let lat_ok = lat_min <= p.lat && p.lat <= lat_max;
                let lon_ok = if lon_min > lon_max {
                    p.lon >= lon_min || p.lon < lon_max
                } else {
                    lon_min <= p.lon && p.lon < lon_max
                };
                if lat_ok && lon_ok {
                    out.push(p.cell);
                }
            }
        }
        out
    }

    pub fn brute_radius(spec: &GridSpec, center: LatLon, km: f64) -> Vec<CellId> {
        let mut out = Vec::new();
        for row in spec.row_min()..=spec.row_max() {
            let (lo, hi) = spec.col_range(row).unwrap();
            for col in lo..=hi {
                let p = spec.cell_to_coords(CellId::new(row, col)).unwrap();
                if great_circle_km(center, LatLon::new(p.lat, p.lon), spec.earth_radius_km()) <= km {
                    out.push(p.cell);
                }
            }
        }
        out
    }

    /// Checks one result against the selection rules using only its log.
    pub fn check_selection(r: &SelectionResult, config: &SamplerConfig) {
        let roughs: Vec<f64> = r.log.iter().map(|l| l.rough_cloud).collect();
        assert!(roughs.windows(2).all(|w| w[0] <= w[1]), "{}: inspection order", r.cell);
        assert_eq!(r.scenes_inspected, r.log.len());

        let w = r.window;
        assert_eq!(
            w.end.date(),
            w.start
                .date()
                .checked_add_months(Months::new(config.window_months))
                .unwrap()
        );
        assert!(config.availability.start <= w.start && w.end <= config.availability.end);

        let admissible = |l: &&InspectionRecord| {
            l.refined_cloud.is_some() && l.nodata_fraction.is_none_or(|n| n <= config.max_nodata)
        };
        match r.outcome {
            Outcome::Selected => {
                let cloud = r.refined_cloud.unwrap();
                let sound = cloud < 0.25 || (r.fallback_used && r.scenes_inspected >= 50 && cloud < 0.50);
                assert!(sound, "{}: accepted {cloud} after {}", r.cell, r.scenes_inspected);
                if r.fallback_used {
                    let min = r
                        .log
                        .iter()
                        .filter(admissible)
                        .map(|l| l.refined_cloud.unwrap())
                        .fold(f64::INFINITY, f64::min);
                    assert_eq!(cloud, min, "{}: fallback not minimal", r.cell);
                    assert!(r
                        .log
                        .iter()
                        .filter(admissible)
                        .all(|l| l.refined_cloud.unwrap() >= 0.25));
                } else {
                    // accepted the first admissible scene under the threshold, which is the last one inspected
                    let last = r.log.last().unwrap();
                    assert_eq!(Some(&last.scene_id), r.scene_id.as_ref());
                    assert!(r.log[..r.log.len() - 1]
                        .iter()
                        .filter(admissible)
                        .all(|l| l.refined_cloud.unwrap() >= 0.25));
                }
            }
            Outcome::Unsampled => {
                assert!(r.scene_id.is_none());
                assert!(r
                    .log
                    .iter()
                    .filter(admissible)
                    .all(|l| l.refined_cloud.unwrap() >= 0.25));
                if r.scenes_inspected >= 50 {
                    assert!(r
                        .log
                        .iter()
                        .filter(admissible)
                        .all(|l| l.refined_cloud.unwrap() >= 0.50));
                }
            }
        }
    }
}
