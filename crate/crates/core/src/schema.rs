//! The student-retention attribute schema: raw admission-form records, their
//! categorical encodings (grade bands, graduation divisions), CSV ingestion
//! and a seeded synthetic cohort generator.
//!
//! The schema has ten attributes, in order: Sex, Cat, GSS, GMSS, GS, GOG,
//! MED, CL, ATYPE and the class attribute RET (`1` = continued enrollment,
//! `0` = dropped out after the first year).

use std::io::Read;

use rand::distr::weighted::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;
use serde::{Deserialize, Serialize};

use crate::dataset::{Attribute, Cell, Dataset, Instance};
use crate::error::{Error, Result};

/// Dropout fraction of the 432-student cohort the schema models (34/432).
pub const DEFAULT_DROPOUT_RATE: f64 = 34.0 / 432.0;

pub const RELATION_NAME: &str = "student-retention";

/// Index of the class attribute (RET) in the schema.
pub const CLASS_INDEX: usize = 9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sex {
    Male,
    Female,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Category {
    General,
    OBC,
    SC,
    ST,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GradStream {
    #[serde(rename = "BA_with_Math")]
    BaWithMath,
    #[serde(rename = "BA_without_Math")]
    BaWithoutMath,
    #[serde(rename = "BSc_with_Math")]
    BScWithMath,
    #[serde(rename = "BSc_without_Math")]
    BScWithoutMath,
    #[serde(rename = "BCom")]
    BCom,
    #[serde(rename = "BCA")]
    Bca,
    #[serde(rename = "BBA")]
    Bba,
    #[serde(rename = "BTech")]
    BTech,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Medium {
    Hindi,
    English,
    Regional,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Location {
    Rural,
    Urban,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AdmissionType {
    #[serde(rename = "UPSEE")]
    Upsee,
    Direct,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Retention {
    #[serde(rename = "0")]
    Dropout,
    #[serde(rename = "1")]
    Continue,
}

/// One raw admission-form record before categorical encoding.
///
/// `ss_math_percent` is `None` exactly when the student took no mathematics
/// at the 10+2 level (encoded as GMSS = Not-Applicable).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudentRecord {
    pub sex: Sex,
    pub cat: Category,
    pub ss_percent: f64,
    pub ss_math_percent: Option<f64>,
    pub grad_stream: GradStream,
    pub grad_percent: f64,
    pub med: Medium,
    pub cl: Location,
    pub atype: AdmissionType,
    pub ret: Retention,
}

/// Letter grade assigned to a senior-secondary percentage.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GradeBand {
    O,
    A,
    B,
    C,
    D,
    E,
    F,
}

impl GradeBand {
    pub fn label(self) -> &'static str {
        match self {
            GradeBand::O => "O",
            GradeBand::A => "A",
            GradeBand::B => "B",
            GradeBand::C => "C",
            GradeBand::D => "D",
            GradeBand::E => "E",
            GradeBand::F => "F",
        }
    }

    /// Position in the GSS/GMSS value lists.
    pub fn index(self) -> usize {
        self as usize
    }
}

/// Graduation division.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GradDivision {
    First,
    Second,
    Third,
}

impl GradDivision {
    pub fn index(self) -> usize {
        self as usize
    }
}

/// Maps a percentage to its grade band. Bands are half-open so every real
/// percentage in [0, 100] lands in exactly one band: [90,100] -> O,
/// [80,90) -> A, [70,80) -> B, [60,70) -> C, [50,60) -> D, [40,50) -> E,
/// [0,40) -> F.
pub fn encode_grade(percent: f64) -> Result<GradeBand> {
    if !(0.0..=100.0).contains(&percent) {
        return Err(Error::PercentOutOfRange {
            field: "grade percentage",
            value: percent,
        });
    }
    Ok(if percent >= 90.0 {
        GradeBand::O
    } else if percent >= 80.0 {
        GradeBand::A
    } else if percent >= 70.0 {
        GradeBand::B
    } else if percent >= 60.0 {
        GradeBand::C
    } else if percent >= 50.0 {
        GradeBand::D
    } else if percent >= 40.0 {
        GradeBand::E
    } else {
        GradeBand::F
    })
}

/// Maps a graduation percentage to its division: >= 60 First, [45,60)
/// Second, [36,45) Third. Below 36 is not a passing graduate record.
pub fn encode_gog(percent: f64) -> Result<GradDivision> {
    if percent > 100.0 {
        return Err(Error::PercentOutOfRange {
            field: "graduation percentage",
            value: percent,
        });
    }
    if percent < 36.0 {
        return Err(Error::BelowPassMark(percent));
    }
    Ok(if percent >= 60.0 {
        GradDivision::First
    } else if percent >= 45.0 {
        GradDivision::Second
    } else {
        GradDivision::Third
    })
}

/// The ten attribute declarations, in schema order.
pub fn retention_attributes() -> Vec<Attribute> {
    let grades = ["O", "A", "B", "C", "D", "E", "F"];
    let mut gmss: Vec<&str> = grades.to_vec();
    gmss.push("Not-Applicable");
    vec![
        Attribute::nominal("Sex", ["Male", "Female"]),
        Attribute::nominal("Cat", ["General", "OBC", "SC", "ST"]),
        Attribute::nominal("GSS", grades),
        Attribute::nominal("GMSS", gmss),
        Attribute::nominal(
            "GS",
            [
                "B.A. with Math",
                "B.A. without Math",
                "B.Sc. with Math",
                "B.Sc. without Math",
                "B.Com",
                "BCA",
                "BBA",
                "B.Tech",
            ],
        ),
        Attribute::nominal("GOG", ["First", "Second", "Third"]),
        Attribute::nominal("MED", ["Hindi", "English", "Regional"]),
        Attribute::nominal("CL", ["Rural", "Urban"]),
        Attribute::nominal("ATYPE", ["UPSEE", "Direct"]),
        Attribute::nominal("RET", ["0", "1"]),
    ]
}

/// Encodes one raw record into a schema instance. GMSS becomes
/// Not-Applicable when the student took no 10+2 mathematics.
pub fn encode_record(r: &StudentRecord) -> Result<Instance> {
    let gss = encode_grade(r.ss_percent)?.index();
    let gmss = match r.ss_math_percent {
        Some(p) => encode_grade(p)?.index(),
        None => 7, // Not-Applicable
    };
    let gog = encode_gog(r.grad_percent)?.index();
    Ok(Instance::new(vec![
        Cell::Nominal(r.sex as usize),
        Cell::Nominal(r.cat as usize),
        Cell::Nominal(gss),
        Cell::Nominal(gmss),
        Cell::Nominal(r.grad_stream as usize),
        Cell::Nominal(gog),
        Cell::Nominal(r.med as usize),
        Cell::Nominal(r.cl as usize),
        Cell::Nominal(r.atype as usize),
        Cell::Nominal(r.ret as usize),
    ]))
}

/// Builds the retention dataset from encoded instances.
pub fn retention_dataset(instances: Vec<Instance>) -> Result<Dataset> {
    Dataset::with_class_index(RELATION_NAME, retention_attributes(), CLASS_INDEX, instances)
}

/// Reads raw records from CSV. The header row must name the
/// [`StudentRecord`] fields (`sex,cat,ss_percent,ss_math_percent,
/// grad_stream,grad_percent,med,cl,atype,ret`); an empty `ss_math_percent`
/// cell means the student took no 10+2 mathematics.
pub fn read_records_csv<R: Read>(reader: R) -> Result<Vec<StudentRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut out = Vec::new();
    for (i, row) in rdr.deserialize::<StudentRecord>().enumerate() {
        match row {
            Ok(r) => out.push(r),
            Err(e) => {
                return Err(Error::CsvRecord {
                    record: i + 1,
                    message: e.to_string(),
                })
            }
        }
    }
    Ok(out)
}

/// CSV -> encoded retention dataset.
pub fn ingest_csv<R: Read>(reader: R) -> Result<Dataset> {
    let records = read_records_csv(reader)?;
    let instances = records
        .iter()
        .map(encode_record)
        .collect::<Result<Vec<_>>>()?;
    retention_dataset(instances)
}

/// Knobs for the synthetic cohort generator. The class-conditional shifts
/// lower dropout students' senior-secondary and graduation percentages and
/// raise their direct-admission rate, so GSS/GOG/ATYPE carry signal.
#[derive(Clone, Copy, Debug)]
pub struct GeneratorConfig {
    pub n: usize,
    pub dropout_rate: f64,
    pub seed: u64,
    /// Probability that any one predictor cell is blanked to `?`.
    pub missing_rate: f64,
    /// Percentage points subtracted from dropout students' mean senior-
    /// secondary percentage.
    pub gss_dropout_shift: f64,
    /// Percentage points subtracted from dropout students' mean graduation
    /// percentage.
    pub gog_dropout_shift: f64,
    pub direct_rate_continue: f64,
    pub direct_rate_dropout: f64,
}

impl GeneratorConfig {
    pub fn new(n: usize, dropout_rate: f64, seed: u64) -> GeneratorConfig {
        GeneratorConfig {
            n,
            dropout_rate,
            seed,
            missing_rate: 0.0,
            gss_dropout_shift: 12.0,
            gog_dropout_shift: 10.0,
            direct_rate_continue: 0.40,
            direct_rate_dropout: 0.65,
        }
    }
}

// Marginal distributions for attributes without class-conditional skew.
const P_FEMALE: f64 = 0.35;
const P_MATH_AT_12: f64 = 0.55;
const P_URBAN: f64 = 0.55;
const CAT_WEIGHTS: [f64; 4] = [0.40, 0.35, 0.18, 0.07];
const STREAM_WEIGHTS: [f64; 8] = [0.08, 0.22, 0.18, 0.14, 0.15, 0.12, 0.06, 0.05];
const MED_WEIGHTS: [f64; 3] = [0.55, 0.35, 0.10];
const GSS_MEAN: f64 = 66.0;
const GSS_SD: f64 = 13.0;
const GMSS_MEAN: f64 = 60.0;
const GMSS_SD: f64 = 15.0;
const GOG_MEAN: f64 = 61.0;
const GOG_SD: f64 = 9.0;

/// Generates a reproducible synthetic cohort over the retention schema.
/// Output is a pure function of the configuration.
pub fn generate(config: &GeneratorConfig) -> Result<Dataset> {
    if config.n < 10 {
        return Err(Error::InvalidGeneratorParams(format!(
            "n = {} is too small (minimum 10)",
            config.n
        )));
    }
    if !(config.dropout_rate > 0.0 && config.dropout_rate < 1.0) {
        return Err(Error::InvalidGeneratorParams(format!(
            "dropout rate {} must lie in (0, 1)",
            config.dropout_rate
        )));
    }
    if !(0.0..1.0).contains(&config.missing_rate) {
        return Err(Error::InvalidGeneratorParams(format!(
            "missing rate {} must lie in [0, 1)",
            config.missing_rate
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let cat_dist = WeightedIndex::new(CAT_WEIGHTS).expect("static weights");
    let stream_dist = WeightedIndex::new(STREAM_WEIGHTS).expect("static weights");
    let med_dist = WeightedIndex::new(MED_WEIGHTS).expect("static weights");

    let mut instances = Vec::with_capacity(config.n);
    for _ in 0..config.n {
        let dropped = rng.random_bool(config.dropout_rate);
        let (gss_shift, gog_shift, direct_rate) = if dropped {
            (
                config.gss_dropout_shift,
                config.gog_dropout_shift,
                config.direct_rate_dropout,
            )
        } else {
            (0.0, 0.0, config.direct_rate_continue)
        };

        let sex = if rng.random_bool(P_FEMALE) {
            Sex::Female
        } else {
            Sex::Male
        };
        let cat = [Category::General, Category::OBC, Category::SC, Category::ST]
            [cat_dist.sample(&mut rng)];
        let ss_percent = draw_percent(&mut rng, GSS_MEAN - gss_shift, GSS_SD, 0.0, 100.0);
        let ss_math_percent = if rng.random_bool(P_MATH_AT_12) {
            Some(draw_percent(
                &mut rng,
                GMSS_MEAN - gss_shift,
                GMSS_SD,
                0.0,
                100.0,
            ))
        } else {
            None
        };
        let grad_stream = [
            GradStream::BaWithMath,
            GradStream::BaWithoutMath,
            GradStream::BScWithMath,
            GradStream::BScWithoutMath,
            GradStream::BCom,
            GradStream::Bca,
            GradStream::Bba,
            GradStream::BTech,
        ][stream_dist.sample(&mut rng)];
        let grad_percent = draw_percent(&mut rng, GOG_MEAN - gog_shift, GOG_SD, 36.0, 100.0);
        let med = [Medium::Hindi, Medium::English, Medium::Regional][med_dist.sample(&mut rng)];
        let cl = if rng.random_bool(P_URBAN) {
            Location::Urban
        } else {
            Location::Rural
        };
        let atype = if rng.random_bool(direct_rate) {
            AdmissionType::Direct
        } else {
            AdmissionType::Upsee
        };

        let record = StudentRecord {
            sex,
            cat,
            ss_percent,
            ss_math_percent,
            grad_stream,
            grad_percent,
            med,
            cl,
            atype,
            ret: if dropped {
                Retention::Dropout
            } else {
                Retention::Continue
            },
        };
        let mut instance = encode_record(&record)?;
        if config.missing_rate > 0.0 {
            for col in 0..CLASS_INDEX {
                if rng.random_bool(config.missing_rate) {
                    instance.cells[col] = Cell::Missing;
                }
            }
        }
        instances.push(instance);
    }
    retention_dataset(instances)
}

/// Convenience wrapper with the default skew configuration.
pub fn generate_synthetic(n: usize, dropout_rate: f64, seed: u64) -> Result<Dataset> {
    generate(&GeneratorConfig::new(n, dropout_rate, seed))
}

fn draw_percent(rng: &mut ChaCha8Rng, mean: f64, sd: f64, lo: f64, hi: f64) -> f64 {
    let normal = Normal::new(mean, sd).expect("valid normal parameters");
    normal.sample(rng).clamp(lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arff;
    use proptest::prelude::*;

    #[test]
    fn grade_bands_match_the_table() {
        assert_eq!(encode_grade(92.0).unwrap(), GradeBand::O);
        assert_eq!(encode_grade(35.0).unwrap(), GradeBand::F);
        assert_eq!(encode_grade(79.5).unwrap(), GradeBand::B);
        // boundaries are half-open, top band closed
        assert_eq!(encode_grade(100.0).unwrap(), GradeBand::O);
        assert_eq!(encode_grade(90.0).unwrap(), GradeBand::O);
        assert_eq!(encode_grade(89.999).unwrap(), GradeBand::A);
        assert_eq!(encode_grade(40.0).unwrap(), GradeBand::E);
        assert_eq!(encode_grade(0.0).unwrap(), GradeBand::F);
    }

    #[test]
    fn grade_rejects_out_of_range() {
        assert!(encode_grade(-0.1).is_err());
        assert!(encode_grade(100.1).is_err());
        assert!(encode_grade(f64::NAN).is_err());
    }

    #[test]
    fn graduation_divisions_match_the_table() {
        assert_eq!(encode_gog(60.0).unwrap(), GradDivision::First);
        assert_eq!(encode_gog(45.0).unwrap(), GradDivision::Second);
        assert_eq!(encode_gog(36.0).unwrap(), GradDivision::Third);
        assert_eq!(encode_gog(59.999).unwrap(), GradDivision::Second);
        assert!(matches!(encode_gog(35.9), Err(Error::BelowPassMark(_))));
        assert!(encode_gog(101.0).is_err());
    }

    fn sample_record() -> StudentRecord {
        StudentRecord {
            sex: Sex::Male,
            cat: Category::General,
            ss_percent: 92.0,
            ss_math_percent: None,
            grad_stream: GradStream::BScWithMath,
            grad_percent: 65.0,
            med: Medium::Hindi,
            cl: Location::Urban,
            atype: AdmissionType::Upsee,
            ret: Retention::Continue,
        }
    }

    #[test]
    fn encode_record_maps_bands_and_not_applicable() {
        let inst = encode_record(&sample_record()).unwrap();
        let attrs = retention_attributes();
        // GSS = O
        assert_eq!(inst.cells[2], Cell::Nominal(0));
        // GMSS = Not-Applicable (no 10+2 math)
        assert_eq!(inst.cells[3], Cell::Nominal(7));
        assert_eq!(attrs[3].values().unwrap()[7], "Not-Applicable");
        // GOG = First
        assert_eq!(inst.cells[5], Cell::Nominal(0));
        // RET = 1
        assert_eq!(inst.cells[9], Cell::Nominal(1));
    }

    #[test]
    fn encode_record_is_deterministic() {
        let r = sample_record();
        assert_eq!(encode_record(&r).unwrap(), encode_record(&r).unwrap());
    }

    #[test]
    fn generator_is_reproducible_byte_for_byte() {
        let a = generate_synthetic(100, 0.2, 7).unwrap();
        let b = generate_synthetic(100, 0.2, 7).unwrap();
        assert_eq!(arff::write(&a), arff::write(&b));
        let c = generate_synthetic(100, 0.2, 8).unwrap();
        assert_ne!(arff::write(&a), arff::write(&c));
    }

    #[test]
    fn generator_matches_the_described_cohort() {
        let d = generate_synthetic(432, DEFAULT_DROPOUT_RATE, 42).unwrap();
        assert_eq!(d.num_instances(), 432);
        let dist = d.class_distribution();
        // binomial concentration around 34 dropouts
        assert!(
            (dist[0] as i64 - 34).unsigned_abs() <= 10,
            "dropout count {} strays too far from 34",
            dist[0]
        );
        assert_eq!(dist[0] + dist[1], 432);
        d.validate().unwrap();
        assert!(d
            .instances
            .iter()
            .all(|i| i.cells.iter().all(|c| !c.is_missing())));
    }

    #[test]
    fn generator_honors_a_quarter_dropout_rate() {
        let d = generate_synthetic(2000, 0.25, 11).unwrap();
        let dist = d.class_distribution();
        let rate = dist[0] as f64 / 2000.0;
        assert!((rate - 0.25).abs() < 0.05, "observed dropout rate {rate}");
    }

    #[test]
    fn generator_rejects_degenerate_parameters() {
        assert!(generate_synthetic(9, 0.2, 1).is_err());
        assert!(generate_synthetic(100, 0.0, 1).is_err());
        assert!(generate_synthetic(100, 1.0, 1).is_err());
    }

    #[test]
    fn generator_missing_rate_blanks_predictor_cells_only() {
        let mut config = GeneratorConfig::new(200, 0.2, 3);
        config.missing_rate = 0.2;
        let d = generate(&config).unwrap();
        d.validate().unwrap();
        let missing: usize = d
            .instances
            .iter()
            .map(|i| i.cells.iter().filter(|c| c.is_missing()).count())
            .sum();
        assert!(missing > 0);
        assert!(d.instances.iter().all(|i| !i.cells[CLASS_INDEX].is_missing()));
    }

    #[test]
    fn csv_ingestion_round_trips_records() {
        let csv_text = "\
sex,cat,ss_percent,ss_math_percent,grad_stream,grad_percent,med,cl,atype,ret
Male,General,92,88,BSc_with_Math,65,Hindi,Urban,UPSEE,1
Female,OBC,55,,BA_without_Math,48,English,Rural,Direct,0
";
        let d = ingest_csv(csv_text.as_bytes()).unwrap();
        assert_eq!(d.num_instances(), 2);
        // row 1: GSS=O, GMSS=A, GOG=First, RET=1
        assert_eq!(d.instances[0].cells[2], Cell::Nominal(0));
        assert_eq!(d.instances[0].cells[3], Cell::Nominal(1));
        assert_eq!(d.instances[0].cells[5], Cell::Nominal(0));
        assert_eq!(d.instances[0].cells[9], Cell::Nominal(1));
        // row 2: empty math cell -> Not-Applicable; GOG=Second; RET=0
        assert_eq!(d.instances[1].cells[3], Cell::Nominal(7));
        assert_eq!(d.instances[1].cells[5], Cell::Nominal(1));
        assert_eq!(d.instances[1].cells[9], Cell::Nominal(0));
    }

    #[test]
    fn csv_errors_carry_the_record_number() {
        let csv_text = "\
sex,cat,ss_percent,ss_math_percent,grad_stream,grad_percent,med,cl,atype,ret
Male,General,92,88,BSc_with_Math,65,Hindi,Urban,UPSEE,1
Male,Nope,92,88,BSc_with_Math,65,Hindi,Urban,UPSEE,1
";
        match ingest_csv(csv_text.as_bytes()) {
            Err(Error::CsvRecord { record, .. }) => assert_eq!(record, 2),
            other => panic!("expected csv error, got {other:?}"),
        }
    }

    proptest! {
        #[test]
        fn encode_grade_is_a_monotone_step_function(
            lo in 0.0f64..100.0,
            hi in 0.0f64..100.0,
        ) {
            let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
            let a = encode_grade(lo).unwrap().index();
            let b = encode_grade(hi).unwrap().index();
            // a higher percentage never maps to a lower grade
            prop_assert!(b <= a);
        }

        #[test]
        fn every_generated_instance_is_schema_valid(seed in 0u64..500) {
            let d = generate_synthetic(20, 0.3, seed).unwrap();
            prop_assert!(d.validate().is_ok());
            prop_assert_eq!(d.num_instances(), 20);
        }
    }
}
