use super::*;

fn dot(s: i32, f: i32, w: i32) -> Dot {
    Dot { s, f, w, torsion: Torsion::Free }
}

#[test]
fn empty_chart_is_an_empty_grid() {
    let c = ExtChart::empty("M2", "M2", 2, 1);
    assert_eq!(render_text(&c), "f\\s  0  1  2\n  1  .  .  .\n  0  .  .  .\n");
}

#[test]
fn single_dot_sits_at_the_origin() {
    let mut c = ExtChart::empty("M2", "M2", 0, 0);
    c.dots.push(dot(0, 0, 0));
    assert_eq!(render_text(&c), "f\\s  0\n  0  *\n");
}

#[test]
fn torsion_is_annotated() {
    let c = ExtChart::new(
        ExtChart::empty("M2", "M2", 1, 1).meta,
        vec![dot(1, 1, 1), Dot { s: 1, f: 1, w: 2, torsion: Torsion::Finite(3) }],
        [],
    );
    assert!(render_text(&c).contains("*,3"));
}

#[test]
fn figure_grids_match_the_committed_text() {
    assert_eq!(render_text(&golden(Figure::Fig2).chart), include_str!("golden/fig2.txt"));
    assert_eq!(render_text(&golden(Figure::Fig3).chart), include_str!("golden/fig3.txt"));
}

fn line_with(svg: &str, needle: &str) -> Vec<f64> {
    let line = svg.lines().find(|l| l.starts_with("<line") && l.contains(needle)).expect("edge is drawn");
    ["x1", "y1", "x2", "y2"]
        .iter()
        .map(|k| {
            let at = line.find(&format!(" {k}=\"")).unwrap() + k.len() + 3;
            line[at..].split('"').next().unwrap().parse().unwrap()
        })
        .collect()
}

#[test]
fn h2_is_drawn_with_slope_one_third() {
    let meta = ExtChart::empty("M2", "M2", 3, 1).meta;
    let e = Edge { from: [0, 0, 0], to: [3, 1, 2], label: HLabel::H2, tau_twist: false };
    let c = ExtChart::new(meta, vec![dot(0, 0, 0), dot(3, 1, 2)], [e]);
    let svg = render_svg(&c, &ChartStyle::default());
    let p = line_with(&svg, "class=\"h2\"");
    let slope = -(p[3] - p[1]) / (p[2] - p[0]);
    assert!((slope - 1.0 / 3.0).abs() < 1e-9, "slope {slope}");
    assert!(svg.contains(r#"data-w="2""#));
}

#[test]
fn twisted_edges_get_the_twist_color() {
    let g = golden(Figure::Fig2).chart;
    let style = ChartStyle::default();
    let svg = render_svg(&g, &style);
    let twisted = svg.lines().filter(|l| l.contains(&format!("stroke=\"{}\"", style.twist_color))).count();
    assert_eq!(twisted, g.edges.iter().filter(|e| e.tau_twist).count());
    assert!(svg.contains("marker-end"));
}

#[test]
fn rendering_is_deterministic() {
    let g = golden(Figure::Fig2).chart;
    let shuffled = ExtChart::new(g.meta.clone(), g.dots.iter().rev().copied().collect(), g.edges.iter().rev().copied());
    assert_eq!(render_text(&g), render_text(&shuffled));
    assert_eq!(render_svg(&g, &ChartStyle::default()), render_svg(&shuffled, &ChartStyle::default()));
}

#[test]
fn golden_charts_are_consistent() {
    for fig in [Figure::Fig2, Figure::Fig3] {
        let g = golden(fig);
        let c = &g.chart;
        assert_eq!((c.meta.bounds.max_s, c.meta.bounds.max_f), (12, 7));
        let has = |p: [i32; 3]| c.dots.iter().any(|d| d.coords() == p);
        for e in &c.edges {
            assert!(has(e.from) && has(e.to), "{fig}: {e:?} has a missing end");
            let [ds, df, dw] = e.label.shift();
            assert_eq!((e.to[0] - e.from[0], e.to[1] - e.from[1]), (ds, df), "{fig}: {e:?}");
            // a twisted product lands on τ^k times a generator of higher weight
            let w = e.to[2] - e.from[2];
            assert!(if e.tau_twist { w > dw } else { w == dw }, "{fig}: {e:?}");
        }
        for n in &g.notes {
            assert!(has(n.at), "{fig}: note at {:?}", n.at);
        }
    }
}

#[test]
fn perturbed_chart_names_the_dot() {
    let g = golden(Figure::Fig3).chart;
    assert!(golden_compare(&g, Figure::Fig3).is_empty());
    let mut bad = g.clone();
    let i = bad.dots.iter().position(|d| d.coords() == [7, 1, 4]).unwrap();
    bad.dots[i].w = 5;
    let bad = ExtChart::new(bad.meta, bad.dots, bad.edges);
    let diff = golden_compare(&bad, Figure::Fig3);
    assert_eq!(diff.missing_dots, vec![dot(7, 1, 4)]);
    assert_eq!(diff.extra_dots, vec![dot(7, 1, 5)]);
    let text = diff.to_string();
    assert!(text.contains("(7,1,4)") && text.contains("(7,1,5)"), "{text}");
}

#[test]
fn comparison_is_symmetric() {
    let a = golden(Figure::Fig2).chart;
    let mut b = a.clone();
    b.dots.pop();
    b.edges.remove(0);
    let (ab, ba) = (compare(&a, &b), compare(&b, &a));
    assert_eq!(ab.missing_dots, ba.extra_dots);
    assert_eq!(ab.extra_edges, ba.missing_edges);
}

#[test]
fn small_charts_are_flagged() {
    let c = ExtChart::empty("A0", "M2", 5, 7);
    assert_eq!(golden_compare(&c, Figure::Fig2).uncovered, Some((5, 7)));
}
