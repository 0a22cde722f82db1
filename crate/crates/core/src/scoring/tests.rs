use proptest::prelude::*;

use super::*;
use crate::testkit::{career, dataset, publication, roster};

fn period() -> Period {
    Period::new(2008, 2012).unwrap()
}

fn stratum(citations: &[u64], categories: &[&str]) -> Dataset {
    let r = career("R", 2008..=2012, "U", "S", Rank::Full);
    let pubs = citations
        .iter()
        .enumerate()
        .map(|(i, c)| {
            publication(
                &format!("P{i}"),
                2010,
                *c,
                categories,
                &[(Some("U"), Some("R"))],
            )
        })
        .collect();
    dataset(r, pubs)
}

#[test]
fn baselines_ignore_uncited() {
    let b = compute_baselines(&stratum(&[0, 4, 6], &["C"]), period());
    assert_eq!(b.get(2010, &"C".into()), Some(5.0));
    assert!(compute_baselines(&stratum(&[0, 0], &["C"]), period()).is_empty());
    assert_eq!(
        compute_baselines(&stratum(&[7], &["C"]), period()).get(2010, &"C".into()),
        Some(7.0)
    );
}

#[test]
fn baselines_stay_inside_the_period() {
    let outside = dataset(
        career("R", 2008..=2012, "U", "S", Rank::Full),
        vec![publication(
            "OLD",
            2005,
            9,
            &["C"],
            &[(Some("U"), Some("R"))],
        )],
    );
    assert!(compute_baselines(&outside, period()).is_empty());
}

#[test]
fn scaled_citations() {
    let d = stratum(&[10, 0], &["C"]);
    let b = Baselines {
        strata: [((2010, "C".into()), 5.0)].into(),
    };
    assert_eq!(scaled_citation(&d.publications()[0], &b), 2.0);
    assert_eq!(scaled_citation(&d.publications()[1], &b), 0.0);

    let multi = publication("M", 2010, 6, &["A", "B"], &[(Some("U"), Some("R"))]);
    let b = Baselines {
        strata: [((2010, "A".into()), 4.0), ((2010, "B".into()), 8.0)].into(),
    };
    assert_eq!(scaled_citation(&multi, &b), 1.0);
}

#[test]
fn service_year_counting() {
    assert_eq!(
        service_years(&career("R", 2008..=2012, "U", "S", Rank::Full), period()),
        5
    );
    assert_eq!(
        service_years(&career("R", 2010..=2012, "U", "S", Rank::Full), period()),
        3
    );
    let mut moved = career("R", 2006..=2009, "A", "S", Rank::Full);
    moved.extend(career("R", 2010..=2012, "B", "S", Rank::Full));
    assert_eq!(service_years(&moved, period()), 5);
}

#[test]
fn fss_from_one_publication() {
    // t = 5, one publication scaled to 2.0, credit 0.5.
    let r = [
        career("R1", 2008..=2012, "U", "S", Rank::Full),
        career("R2", 2008..=2012, "U", "S", Rank::Full),
    ]
    .concat();
    let pubs = vec![
        publication(
            "P1",
            2010,
            10,
            &["C"],
            &[(Some("U"), Some("R1")), (Some("U"), Some("R2"))],
        ),
        publication("P2", 2010, 5, &["C"], &[(Some("X"), None)]),
        publication("P3", 2010, 0, &["C"], &[(Some("X"), None)]),
    ];
    let d = dataset(r, pubs);
    let config = AssessmentConfig::new(2008, 2012);
    let b = compute_baselines(&d, period());
    assert_eq!(b.get(2010, &"C".into()), Some(7.5));
    let (p, issues) = compute_productivity(&d, &b, &config);
    assert!(issues.is_empty());
    let fss = p.fss(&"R1".into()).unwrap();
    assert!((fss - 0.2 * 10.0 / 7.5 / 2.0).abs() < 1e-15);

    // With c_bar = 5 as in the textbook case.
    let b5 = Baselines {
        strata: [((2010, "C".into()), 5.0)].into(),
    };
    let (p, _) = compute_productivity(&d, &b5, &config);
    assert!((p.fss(&"R1".into()).unwrap() - 0.2).abs() < 1e-15);
}

#[test]
fn fss_sums_credited_scaled_citations() {
    // Two years of service, credited scaled citations 0.6 and 1.4.
    let r = career("R", 2011..=2012, "U", "S", Rank::Assistant);
    let pubs = vec![
        publication(
            "A",
            2011,
            6,
            &["C"],
            &[(Some("U"), Some("R")), (Some("X"), None)],
        ),
        publication("B", 2011, 7, &["C"], &[(Some("U"), Some("R"))]),
        publication("Z", 2011, 0, &["C"], &[(Some("U"), Some("R"))]),
    ];
    let d = dataset(r, pubs);
    let b = Baselines {
        strata: [((2011, "C".into()), 5.0)].into(),
    };
    let (p, _) = compute_productivity(&d, &b, &AssessmentConfig::new(2008, 2012));
    let rec = p.get(&"R".into()).unwrap();
    assert_eq!(rec.t, 2);
    assert!((rec.fss - 1.0).abs() < 1e-12);
}

#[test]
fn no_publications_means_zero() {
    let r = [
        career("A", 2008..=2012, "U", "S", Rank::Full),
        career("B", 2008..=2012, "U", "S", Rank::Full),
    ]
    .concat();
    let d = dataset(
        r,
        vec![publication("P", 2009, 2, &["C"], &[(Some("U"), Some("B"))])],
    );
    let b = compute_baselines(&d, period());
    let (p, _) = compute_productivity(&d, &b, &AssessmentConfig::new(2008, 2012));
    let a = p.get(&"A".into()).unwrap();
    assert_eq!(a.fss, 0.0);
    assert_eq!(a.percentile, Some(0));
    assert_eq!(a.fss_ratio, Some(0.0));
    assert_eq!(p.get(&"B".into()).unwrap().percentile, Some(100));
}

#[test]
fn positional_credit_follows_the_field() {
    let r = [
        career("F", 2008..=2012, "U1", "POS", Rank::Full),
        career("M", 2008..=2012, "U1", "ALPHA", Rank::Full),
        career("L", 2008..=2012, "U1", "POS", Rank::Full),
    ]
    .concat();
    let d = dataset(
        r,
        vec![publication(
            "P",
            2010,
            1,
            &["C"],
            &[
                (Some("U1"), Some("F")),
                (Some("U1"), Some("M")),
                (Some("U1"), Some("L")),
            ],
        )],
    );
    let mut config = AssessmentConfig::new(2008, 2012);
    config
        .credit_scheme
        .insert("POS".into(), CreditScheme::Positional);
    let b = compute_baselines(&d, period());
    let (p, _) = compute_productivity(&d, &b, &config);
    assert!((p.fss(&"F".into()).unwrap() - 0.4 / 5.0).abs() < 1e-15);
    assert!((p.fss(&"M".into()).unwrap() - 1.0 / 3.0 / 5.0).abs() < 1e-15);

    config.force_equal_credit = true;
    let (p, _) = compute_productivity(&d, &b, &config);
    assert!((p.fss(&"F".into()).unwrap() - 1.0 / 15.0).abs() < 1e-15);
}

#[test]
fn salary_normalization() {
    let mut raw = std::collections::BTreeMap::new();
    raw.insert(Rank::Assistant, 1.0);
    raw.insert(Rank::Associate, 1.5);
    raw.insert(Rank::Full, 2.0);
    let w = SalaryWeights::new(raw).unwrap();
    assert_eq!(salary_normalize(2.0, Rank::Assistant, &w), 2.0);
    assert_eq!(salary_normalize(2.0, Rank::Full, &w), 1.0);
    assert_eq!(
        salary_normalize(2.0, Rank::Full, &w.scaled(7.0).unwrap()),
        1.0
    );
    assert_eq!(
        salary_normalize(2.0, Rank::Full, &SalaryWeights::uniform()),
        2.0
    );
}

#[test]
fn percentiles() {
    assert_eq!(percentile_rank(&[1.0, 2.0, 3.0]).unwrap(), vec![0, 50, 100]);
    assert_eq!(percentile_rank(&[5.0, 1.0]).unwrap(), vec![100, 0]);
    assert_eq!(
        percentile_rank(&[2.0, 2.0, 1.0]).unwrap(),
        vec![100, 100, 0]
    );
    assert!(percentile_rank(&[1.0]).is_err());
    assert!(percentile_rank(&[1.0, f64::NAN]).is_err());
}

/// First two indicator columns of the published recruitment table, in its
/// row order (49 universities).
const PUBLISHED_R11: [f64; 49] = [
    13.27, 11.49, 10.06, 8.28, 8.10, 4.94, 4.17, 3.70, 3.63, 3.53, 3.32, 3.22, 3.03, 2.92, 2.80,
    2.72, 2.55, 2.46, 2.41, 2.34, 2.31, 2.15, 2.10, 2.04, 2.00, 1.92, 1.92, 1.85, 1.79, 1.78, 1.74,
    1.74, 1.72, 1.68, 1.65, 1.63, 1.61, 1.58, 1.50, 1.47, 1.45, 1.38, 1.37, 1.29, 1.19, 1.16, 1.15,
    0.91, 0.36,
];
const PUBLISHED_R12: [f64; 49] = [
    50.0, 44.4, 50.8, 51.9, 47.8, 52.9, 37.3, 68.2, 52.9, 53.3, 45.2, 53.8, 65.1, 44.4, 50.0, 25.0,
    63.8, 57.5, 46.2, 49.0, 48.8, 100.0, 59.4, 48.9, 57.1, 54.1, 53.6, 50.0, 55.4, 41.7, 59.3,
    56.2, 66.7, 62.9, 53.8, 50.0, 45.5, 49.1, 45.7, 47.5, 40.0, 48.6, 38.6, 46.2, 42.7, 25.0, 55.6,
    27.8, 20.0,
];

#[test]
fn percentile_anchors_of_the_published_ranking() {
    let p = percentile_rank(&PUBLISHED_R11).unwrap();
    assert_eq!((p[0], p[1], p[48]), (100, 98, 0));
    assert_eq!(p[25], p[26]);

    let p = percentile_rank(&PUBLISHED_R12).unwrap();
    let tied: Vec<u8> = PUBLISHED_R12
        .iter()
        .zip(&p)
        .filter(|(v, _)| **v == 50.0)
        .map(|(_, r)| *r)
        .collect();
    assert_eq!(tied, vec![54; 4]);
}

#[test]
fn ratios() {
    assert_eq!(fss_ratio(1.5, 1.5), 1.0);
    assert_eq!(fss_ratio(3.0, 1.5), 2.0);
    assert_eq!(fss_ratio(1.0, (0.5 + 1.0 + 1.5) / 3.0), 1.0);
    assert_eq!(fss_ratio(0.0, 0.0), 0.0);
}

#[test]
fn university_productivity_is_mean_ratio() {
    let r = [
        career("A", 2008..=2012, "U1", "S", Rank::Full),
        career("B", 2008..=2012, "U1", "S", Rank::Full),
        career("C", 2008..=2012, "U2", "S", Rank::Full),
    ]
    .concat();
    let by = |id| [(Some("U1"), Some(id))];
    let d = dataset(
        r,
        vec![
            publication("P1", 2010, 1, &["C"], &by("A")),
            publication("P2", 2010, 3, &["C"], &by("B")),
            publication("P3", 2010, 2, &["C"], &by("C")),
        ],
    );
    let b = compute_baselines(&d, period());
    let (p, _) = compute_productivity(&d, &b, &AssessmentConfig::new(2008, 2012));
    let u = university_productivity(&p);
    // Ratios 0.5, 1.5 at U1 and 1.0 at U2.
    assert!((u[&UniversityId::from("U1")] - 1.0).abs() < 1e-12);
    assert!((u[&UniversityId::from("U2")] - 1.0).abs() < 1e-12);
    let a = p.get(&"A".into()).unwrap().fss_ratio.unwrap();
    assert!((a - 0.5).abs() < 1e-12);
}

#[test]
fn records_are_sorted_and_profiles_are_last_year() {
    let mut r = career("Z", 2008..=2009, "U1", "S", Rank::Assistant);
    r.extend(roster(&[("Z", 2010, "U2", "S", Rank::Associate)]));
    r.extend(career("A", 2008..=2012, "U1", "S", Rank::Full));
    let d = dataset(r, vec![]);
    let (p, _) = compute_productivity(
        &d,
        &Baselines::default(),
        &AssessmentConfig::new(2008, 2012),
    );
    let ids: Vec<&str> = p.records.iter().map(|r| r.researcher_id.as_str()).collect();
    assert_eq!(ids, ["A", "Z"]);
    let z = p.get(&"Z".into()).unwrap();
    assert_eq!(
        (z.rank, z.t, z.university_id.as_str()),
        (Rank::Associate, 3, "U2")
    );
    // Alone in their pool.
    assert_eq!(z.percentile, None);
}

proptest! {
    #[test]
    fn scaled_citations_average_one(citations in proptest::collection::vec(0u64..500, 1..60)) {
        prop_assume!(citations.iter().any(|c| *c > 0));
        let d = stratum(&citations, &["C"]);
        let b = compute_baselines(&d, period());
        let cited: Vec<f64> = d
            .publications()
            .iter()
            .filter(|p| p.citations > 0)
            .map(|p| scaled_citation(p, &b))
            .collect();
        let mean = cited.iter().sum::<f64>() / cited.len() as f64;
        prop_assert!((mean - 1.0).abs() < 1e-9);
    }

    #[test]
    fn scaling_citations_leaves_fss_unchanged(
        citations in proptest::collection::vec(0u64..200, 1..30),
        factor in 2u64..9,
    ) {
        let fss = |cs: &[u64]| {
            let d = stratum(cs, &["C"]);
            let b = compute_baselines(&d, period());
            compute_productivity(&d, &b, &AssessmentConfig::new(2008, 2012)).0.fss(&"R".into()).unwrap()
        };
        let scaled: Vec<u64> = citations.iter().map(|c| c * factor).collect();
        prop_assert!((fss(&citations) - fss(&scaled)).abs() < 1e-9);
    }

    #[test]
    fn percentiles_are_order_isomorphic(values in proptest::collection::vec(-50i32..50, 2..40)) {
        let v: Vec<f64> = values.iter().map(|x| *x as f64).collect();
        let p = percentile_rank(&v).unwrap();
        for i in 0..v.len() {
            for j in 0..v.len() {
                if v[i] > v[j] {
                    prop_assert!(p[i] >= p[j]);
                }
                if v[i] == v[j] {
                    prop_assert_eq!(p[i], p[j]);
                }
            }
        }
        prop_assert!(p.iter().all(|x| *x <= 100));
        prop_assert_eq!(*p.iter().max().unwrap(), 100);
        let t: Vec<f64> = v.iter().map(|x| (x / 10.0).exp()).collect();
        prop_assert_eq!(percentile_rank(&t).unwrap(), p);
    }

    #[test]
    fn pool_ratios_average_one(fss in proptest::collection::vec(0.0f64..10.0, 1..20)) {
        let mean = fss.iter().sum::<f64>() / fss.len() as f64;
        prop_assume!(mean > 0.0);
        let avg = fss.iter().map(|f| fss_ratio(*f, mean)).sum::<f64>() / fss.len() as f64;
        prop_assert!((avg - 1.0).abs() < 1e-12);
    }
}
