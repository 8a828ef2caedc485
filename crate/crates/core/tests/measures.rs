mod common;

use catutil::{
    conditional_distribution, cu_info_category, cu_info_partition, cu_quad_category,
    cu_quad_partition, level_report, ordering, parse_dataset, parse_hierarchy,
    predict_basic_level, rival_measures, uncertainty, Category, Dataset, FeatureRule, MeasureId,
    MeasureOptions,
};
use common::{fixture, r, Oracle};

fn load(name: &str) -> Dataset {
    parse_dataset(&fixture(name)).unwrap()
}

fn ids(d: &Dataset, names: &[&str]) -> Category {
    Category::from_ids(d, "c", names).unwrap()
}

#[test]
fn conditional_distributions() {
    let d1 = load("d1.csv");
    let c = ids(&d1, &["i1", "i2"]);
    assert_eq!(conditional_distribution(&d1, 0, Some(&c)).unwrap().probabilities, [1.0, 0.0]);
    assert_eq!(conditional_distribution(&d1, 0, None).unwrap().probabilities, [0.5, 0.5]);
    let d2 = load("d2.csv");
    assert_eq!(conditional_distribution(&d2, 0, None).unwrap().probabilities, [0.4, 0.5, 0.1]);
}

#[test]
fn eye_color_uncertainty() {
    let d2 = load("d2.csv");
    let p = conditional_distribution(&d2, 0, None).unwrap();
    let u = uncertainty(&p, &MeasureOptions::default()).unwrap();
    let by_hand = -(0.4f64 * 0.4f64.log2() + 0.5 * 0.5f64.log2() + 0.1 * 0.1f64.log2());
    assert!((u - by_hand).abs() < 1e-12);
    assert!((u - 1.3610).abs() < 5e-5);
}

#[test]
fn d1_pair_values() {
    let d = load("d1.csv");
    let o = MeasureOptions::default();
    let c = ids(&d, &["i1", "i2"]);
    assert!((cu_info_partition(&d, &c, &o).unwrap().value() - 1.0).abs() < 1e-12);
    assert!((cu_info_category(&d, &c, &o).unwrap().value() - 0.5).abs() < 1e-12);
    assert_eq!(cu_quad_partition(&d, &c, &o).unwrap().score.exact, Some(r(1, 2)));
    assert_eq!(cu_quad_category(&d, &c, &o).unwrap().score.exact, Some(r(1, 4)));
    let mixed = ids(&d, &["i1", "i3"]);
    assert_eq!(cu_quad_category(&d, &mixed, &o).unwrap().score.exact, Some(r(0, 1)));
}

#[test]
fn independent_dimension_adds_nothing() {
    let d = parse_dataset("id,color,shape\ni1,a,s\ni2,a,t\ni3,b,s\ni4,b,t\n").unwrap();
    let c = ids(&d, &["i1", "i2"]);
    let o = MeasureOptions::default();
    let v = cu_info_category(&d, &c, &o).unwrap();
    assert!((v.value() - 0.5).abs() < 1e-12);
    assert!(v.per_dimension[1].value.abs() < 1e-15);
}

#[test]
fn d3_a_block_against_oracle() {
    let d = load("d3.csv");
    let o = MeasureOptions::default();
    let members = [0, 1, 2, 3];
    let c = ids(&d, &["i1", "i2", "i3", "i4"]);
    let oracle = Oracle::new(&d);

    let info = cu_info_partition(&d, &c, &o).unwrap().value();
    assert!((info - oracle.info_partition_mi(&members)).abs() < 1e-9);
    assert!((info - 3.0).abs() < 1e-12);
    let cat = cu_info_category(&d, &c, &o).unwrap().value();
    assert!((cat - oracle.info_category(&members)).abs() < 1e-9);
    assert!((cat - 1.5).abs() < 1e-12);

    let quad = cu_quad_partition(&d, &c, &o).unwrap().score.exact.unwrap();
    assert_eq!(quad, oracle.quad_partition(&members));
    assert_eq!(quad, r(7, 8));
    let quad_c = cu_quad_category(&d, &c, &o).unwrap().score.exact.unwrap();
    assert_eq!(quad_c, oracle.quad_category(&members));
    assert_eq!(quad_c, r(7, 16));
}

#[test]
fn d3_b_pair_rivals_under_both_rules() {
    let d = load("d3.csv");
    let c = ids(&d, &["i1", "i2"]);
    let oracle = Oracle::new(&d);
    for (rule, modal) in [(FeatureRule::Modal, true), (FeatureRule::AllWeighted, false)] {
        let o = MeasureOptions::default().with_feature_rule(rule);
        let rv = rival_measures(&d, &c, &o).unwrap();
        let (cue, cv, col) = oracle.rivals(&[0, 1], modal);
        assert_eq!(rv.cue_validity.exact.as_ref(), Some(&cue));
        assert_eq!(rv.category_validity.exact.as_ref(), Some(&cv));
        assert_eq!(rv.collocation.exact.as_ref(), Some(&col));
        assert_eq!((cue, cv, col), (r(5, 6), r(5, 6), r(2, 3)));
    }
}

#[test]
fn population_cue_validity_is_one() {
    let d = load("d3.csv");
    let pop = Category::population(&d);
    let rv = rival_measures(&d, &pop, &MeasureOptions::default()).unwrap();
    assert_eq!(rv.cue_validity.exact, Some(r(1, 1)));
}

#[test]
fn d1_hierarchy_report() {
    let d = load("d1.csv");
    let h = parse_hierarchy(&fixture("d1_h1.json"), &d).unwrap();
    let rep = level_report(&d, &h, &MeasureOptions::default()).unwrap();
    for m in [
        MeasureId::CuInfoPartition,
        MeasureId::CuInfoCategory,
        MeasureId::CuQuadPartition,
        MeasureId::CuQuadCategory,
    ] {
        assert_eq!(rep.rows[0].mean(m).value, 0.0, "{m}");
    }
    assert!((rep.rows[1].mean(MeasureId::CuInfoPartition).value - 1.0).abs() < 1e-12);
    let p = predict_basic_level(&rep, MeasureId::CuInfoPartition);
    assert_eq!(p.winner, Some(2));
}

#[test]
fn d3_hierarchy_report_matches_oracle() {
    let d = load("d3.csv");
    let h = parse_hierarchy(&fixture("d3_hierarchy.json"), &d).unwrap();
    let o = MeasureOptions::default();
    let rep = level_report(&d, &h, &o).unwrap();
    let oracle = Oracle::new(&d);
    for (row, level) in rep.rows.iter().zip(h.levels()) {
        let n = level.categories.len() as f64;
        let nr = r(level.categories.len() as i64, 1);
        let mean_f = |g: &dyn Fn(&[usize]) -> f64| {
            level.categories.iter().map(|c| g(c.members())).sum::<f64>() / n
        };
        let mean_q = |g: &dyn Fn(&[usize]) -> catutil::Rational| {
            level
                .categories
                .iter()
                .map(|c| g(c.members()))
                .fold(r(0, 1), |a, b| a + b)
                / &nr
        };
        let info_p = mean_f(&|m| oracle.info_partition_mi(m));
        assert!((row.mean(MeasureId::CuInfoPartition).value - info_p).abs() < 1e-9);
        let info_c = mean_f(&|m| oracle.info_category(m));
        assert!((row.mean(MeasureId::CuInfoCategory).value - info_c).abs() < 1e-9);
        assert_eq!(
            row.mean(MeasureId::CuQuadPartition).exact,
            Some(mean_q(&|m| oracle.quad_partition(m)))
        );
        assert_eq!(
            row.mean(MeasureId::CuQuadCategory).exact,
            Some(mean_q(&|m| oracle.quad_category(m)))
        );
        assert_eq!(
            row.mean(MeasureId::CueValidity).exact,
            Some(mean_q(&|m| oracle.rivals(m, true).0))
        );
        assert_eq!(
            row.mean(MeasureId::CategoryValidity).exact,
            Some(mean_q(&|m| oracle.rivals(m, true).1))
        );
        assert_eq!(
            row.mean(MeasureId::Collocation).exact,
            Some(mean_q(&|m| oracle.rivals(m, true).2))
        );
    }
}

#[test]
fn single_level_hierarchy_scores_zero() {
    let d = load("d3.csv");
    let h = parse_hierarchy(
        r#"{"levels":[{"name":"all","categories":[{"name":"p","members":["i1","i2","i3","i4","i5","i6","i7","i8"]}]}]}"#,
        &d,
    )
    .unwrap();
    let rep = level_report(&d, &h, &MeasureOptions::default()).unwrap();
    for m in &MeasureId::ALL[..4] {
        assert_eq!(rep.rows[0].mean(*m).value, 0.0);
    }
}

fn exact_means(rep: &catutil::MeasureReport, m: MeasureId) -> Vec<catutil::Rational> {
    rep.rows.iter().map(|row| row.mean(m).exact.clone().unwrap()).collect()
}

#[test]
fn tool_hierarchy_reproduces_level_preferences() {
    let d = load("tools.csv");
    let h = parse_hierarchy(&fixture("tools.json"), &d).unwrap();
    let rep = level_report(&d, &h, &MeasureOptions::default()).unwrap();

    // basic, then superordinate, then subordinate
    assert_eq!(ordering(&rep, MeasureId::CuInfoCategory), vec![vec![2], vec![1], vec![3]]);
    // superordinate and basic tie on the partition form
    let p = rep.rows.iter().map(|r| r.mean(MeasureId::CuInfoPartition).value).collect::<Vec<_>>();
    assert!((p[0] - p[1]).abs() < 1e-9, "{p:?}");
    assert!(p[2] < p[0]);
    assert_eq!(ordering(&rep, MeasureId::CuInfoPartition), vec![vec![1, 2], vec![3]]);

    assert_eq!(exact_means(&rep, MeasureId::CueValidity), [r(1, 2), r(1, 4), r(1, 8)]);
    assert_eq!(exact_means(&rep, MeasureId::CategoryValidity), [r(9, 16), r(9, 16), r(9, 16)]);
    assert_eq!(exact_means(&rep, MeasureId::Collocation), [r(9, 32), r(9, 64), r(7, 96)]);
    for m in [MeasureId::CueValidity, MeasureId::Collocation] {
        assert_eq!(predict_basic_level(&rep, m).winner, Some(1), "{m}");
    }
    assert_eq!(predict_basic_level(&rep, MeasureId::CategoryValidity).tied, [1, 2, 3]);
}

#[test]
fn sharing_family_selects_designed_levels() {
    let cases = [
        ("sharing_top", 1, [r(31, 36), r(31, 72), r(3, 14)], [r(451, 576), r(1583, 4032), r(397, 2016)]),
        ("sharing_middle", 2, [r(1, 2), r(7, 24), r(7, 48)], [r(11, 32), r(5, 24), r(5, 48)]),
        ("sharing_bottom", 3, [r(1, 2), r(1, 4), r(7, 48)], [r(11, 32), r(11, 64), r(5, 48)]),
    ];
    for (name, designed, cue, col) in cases {
        let d = load(&format!("{name}.csv"));
        let h = parse_hierarchy(&fixture(&format!("{name}.json")), &d).unwrap();
        let rep = level_report(&d, &h, &MeasureOptions::default()).unwrap();
        let p = predict_basic_level(&rep, MeasureId::CuInfoPartition);
        assert_eq!(p.winner, Some(designed), "{name}");
        assert_eq!(exact_means(&rep, MeasureId::CueValidity), cue, "{name}");
        assert_eq!(exact_means(&rep, MeasureId::Collocation), col, "{name}");
        assert_eq!(ordering(&rep, MeasureId::CategoryValidity), vec![vec![1, 2, 3]], "{name}");
    }
}
