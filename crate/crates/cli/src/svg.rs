//! Minimal standalone SVG bar charts: one bar per KPI showing the best
//! method's error, labeled with the winning method. Bars switch to a log
//! scale when the values span more than two decades.

pub struct Bar {
    pub kpi: String,
    pub method: String,
    pub value: f64,
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn render_bar_chart(title: &str, bars: &[Bar]) -> String {
    let width = 800.0;
    let height = 400.0;
    let margin = 50.0;
    let plot_h = height - 2.0 * margin;
    let slot = (width - 2.0 * margin) / bars.len().max(1) as f64;
    let bar_w = slot * 0.6;

    let positives: Vec<f64> = bars.iter().map(|b| b.value).filter(|v| *v > 0.0).collect();
    let min_pos = positives.iter().cloned().fold(f64::INFINITY, f64::min);
    let max_val = bars.iter().map(|b| b.value).fold(0.0f64, f64::max);
    let log_scale = min_pos.is_finite() && max_val / min_pos > 100.0;

    let bar_height = |v: f64| -> f64 {
        if v <= 0.0 || max_val <= 0.0 {
            2.0
        } else if log_scale {
            let span = (max_val / min_pos).log10() + 0.5;
            let h = ((v / min_pos).log10() + 0.5) / span * plot_h;
            h.max(2.0)
        } else {
            (v / max_val * plot_h).max(2.0)
        }
    };

    let mut body = String::new();
    body.push_str(&format!(
        "  <text x=\"{:.1}\" y=\"28\" text-anchor=\"middle\" font-size=\"18\" \
         font-family=\"sans-serif\">{}</text>\n",
        width / 2.0,
        escape(title)
    ));
    body.push_str(&format!(
        "  <line x1=\"{m:.1}\" y1=\"{base:.1}\" x2=\"{x2:.1}\" y2=\"{base:.1}\" \
         stroke=\"#333\" stroke-width=\"1\"/>\n",
        m = margin,
        base = height - margin,
        x2 = width - margin
    ));
    for (i, bar) in bars.iter().enumerate() {
        let h = bar_height(bar.value);
        let x = margin + i as f64 * slot + (slot - bar_w) / 2.0;
        let y = height - margin - h;
        let cx = x + bar_w / 2.0;
        body.push_str(&format!(
            "  <rect x=\"{x:.1}\" y=\"{y:.1}\" width=\"{bar_w:.1}\" height=\"{h:.1}\" \
             fill=\"#4878a8\"/>\n"
        ));
        body.push_str(&format!(
            "  <text x=\"{cx:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"12\" \
             font-family=\"sans-serif\">{}</text>\n",
            y - 18.0,
            escape(&bar.method)
        ));
        body.push_str(&format!(
            "  <text x=\"{cx:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"11\" \
             font-family=\"sans-serif\">{}</text>\n",
            y - 5.0,
            escape(&crate::tables::fmt_metric(bar.value))
        ));
        body.push_str(&format!(
            "  <text x=\"{cx:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"13\" \
             font-family=\"sans-serif\">{}</text>\n",
            height - margin + 18.0,
            escape(&bar.kpi)
        ));
    }

    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\">\n{body}</svg>\n"
    )
}
