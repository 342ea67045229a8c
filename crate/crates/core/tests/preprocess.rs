use csem_core::chartsynth::{rasterize, PixelGrid, TextAnchor, TextRole};
use csem_core::encoder::{
    extract_chart_features, features_from_grid, pool_grid, preprocess, PreprocessMode, DEFAULT_TEXT_BUCKETS,
};
use csem_core::pipeline::synth_corpus;

fn anchor(text: &str, x: f64, y: f64, role: TextRole) -> TextAnchor {
    TextAnchor { text: text.into(), x, y, role }
}

#[test]
fn crop_drops_the_side_label_and_keeps_the_title() {
    let mut grid = PixelGrid::blank(800, 500);
    grid.text_anchors =
        vec![anchor("Revenue by Year", 400.0, 20.0, TextRole::Title), anchor("revenue", 60.0, 250.0, TextRole::YLabel)];
    let cropped = preprocess(&grid, PreprocessMode::center_crop());
    assert_eq!(cropped.w, 512);
    let kept: Vec<&str> = cropped.text_anchors.iter().map(|a| a.text.as_str()).collect();
    assert_eq!(kept, ["Revenue by Year"]);
    // the 500-wide window starts at x = 150 and scales by 512/500
    assert!((cropped.text_anchors[0].x - 250.0 * 512.0 / 500.0).abs() < 1e-9);

    let resized = preprocess(&grid, PreprocessMode::direct_resize());
    assert_eq!(resized.text_anchors.len(), 2);
    assert!((resized.text_anchors[1].x - 60.0 * 512.0 / 800.0).abs() < 1e-9);
}

#[test]
fn resize_preserves_mass() {
    let corpus = synth_corpus(4, 2, 3).unwrap();
    let g = rasterize(&corpus.charts[0]);
    let r = preprocess(&g, PreprocessMode::direct_resize());
    let before: f64 = g.occupancy.iter().map(|&v| v as f64).sum::<f64>() / (g.w * g.h) as f64;
    let after: f64 = r.occupancy.iter().map(|&v| v as f64).sum::<f64>() / (r.w * r.h) as f64;
    assert!((before - after).abs() < 1e-3, "{before} vs {after}");
}

#[test]
fn crop_loses_y_label_on_every_synthetic_chart() {
    let corpus = synth_corpus(8, 20, 6).unwrap();
    for chart in &corpus.charts {
        let g = rasterize(chart);
        let crop = preprocess(&g, PreprocessMode::center_crop());
        let resize = preprocess(&g, PreprocessMode::direct_resize());
        assert!(!crop.text_anchors.iter().any(|a| a.role == TextRole::YLabel), "{}", chart.id);
        assert_eq!(resize.text_anchors.len(), g.text_anchors.len());
        let f = extract_chart_features(chart, PreprocessMode::center_crop());
        assert!(f.to_sparse().iter().all(|(_, v)| v.is_finite()));
    }
}

#[test]
fn pooling_the_window_equals_preprocess_then_pool() {
    let corpus = synth_corpus(6, 3, 3).unwrap();
    for chart in corpus.charts.iter().take(4) {
        let g = rasterize(chart);
        for mode in [PreprocessMode::direct_resize(), PreprocessMode::center_crop()] {
            let direct = features_from_grid(&g, mode, DEFAULT_TEXT_BUCKETS).grid;
            let staged = pool_grid(&preprocess(&g, mode));
            let worst = direct.iter().zip(&staged).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(worst < 1e-5, "{} {:?}: {worst}", chart.id, mode.kind);
        }
    }
}
