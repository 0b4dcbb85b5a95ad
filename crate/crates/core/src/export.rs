//! Renderers for every exportable artifact.
//!
//! Data files are self-describing: each starts with `#`-prefixed comment
//! lines carrying the config hash and the seeds that produced it, followed
//! by a CSV header row (or a JSON object embedding the same fields).
//! Prices appear in tick-exact decimal form.

use serde_json::json;

use crate::agents::NaParams;
use crate::backtest::BaselineQuotes;
use crate::config::MarketConfig;
use crate::error::Result;
use crate::evolve::GenerationStats;
use crate::market::{Gene, MarketRecord, VolumeBucket};
use crate::price::{Price, PriceScale};
use crate::stats::{
    StylizedReport, REFERENCE_ACF_SQ, REFERENCE_EXCESS_KURTOSIS, REFERENCE_STD_RETURNS,
};
use crate::Trade;

/// Identification block embedded in every output file.
#[derive(Debug, Clone, Default)]
pub struct ExportMeta {
    pub config_hash: String,
    pub seed: Option<u64>,
    pub ga_seed: Option<u64>,
}

impl ExportMeta {
    pub fn new(config_hash: impl Into<String>) -> ExportMeta {
        ExportMeta { config_hash: config_hash.into(), seed: None, ga_seed: None }
    }

    pub fn with_seed(mut self, seed: u64) -> ExportMeta {
        self.seed = Some(seed);
        self
    }

    pub fn with_ga_seed(mut self, ga_seed: u64) -> ExportMeta {
        self.ga_seed = Some(ga_seed);
        self
    }

    fn comment_block(&self) -> String {
        let mut out = format!("# config_hash={}\n", self.config_hash);
        if let Some(seed) = self.seed {
            out.push_str(&format!("# seed={seed}\n"));
        }
        if let Some(ga_seed) = self.ga_seed {
            out.push_str(&format!("# ga_seed={ga_seed}\n"));
        }
        out
    }

    fn json_fields(&self) -> serde_json::Map<String, serde_json::Value> {
        let mut map = serde_json::Map::new();
        map.insert("config_hash".into(), json!(self.config_hash));
        if let Some(seed) = self.seed {
            map.insert("seed".into(), json!(seed));
        }
        if let Some(ga_seed) = self.ga_seed {
            map.insert("ga_seed".into(), json!(ga_seed));
        }
        map
    }
}

/// Mid-price series, one row per tick starting at tick 1.
pub fn render_mid_csv(mid_series: &[Price], scale: &PriceScale, meta: &ExportMeta) -> String {
    let mut out = meta.comment_block();
    out.push_str("tick,mid\n");
    for (tick, mid) in mid_series.iter().enumerate().skip(1) {
        out.push_str(&format!("{tick},{}\n", scale.format_price(*mid)));
    }
    out
}

/// Signed trader volume per tick bucket.
pub fn render_volume_csv(buckets: &[VolumeBucket], meta: &ExportMeta) -> String {
    let mut out = meta.comment_block();
    out.push_str("bucket_start,signed_volume\n");
    for b in buckets {
        out.push_str(&format!("{},{}\n", b.start_tick, b.signed_volume));
    }
    out
}

/// Full trade log.
pub fn render_trades_csv(trades: &[Trade], scale: &PriceScale, meta: &ExportMeta) -> String {
    let mut out = meta.comment_block();
    out.push_str("tick,taker_side,price,maker_owner,taker_owner\n");
    for t in trades {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            t.tick,
            t.taker_side.as_str(),
            scale.format_price(t.price),
            t.maker_owner,
            t.taker_owner
        ));
    }
    out
}

/// Run summary: profit, position and fill counts.
pub fn render_summary_json(
    record: &MarketRecord,
    cfg: &MarketConfig,
    meta: &ExportMeta,
) -> Result<String> {
    let scale = cfg.scale()?;
    let fundamental = cfg.p_f_price()?;
    let mut object = meta.json_fields();
    object.insert("gene".into(), match &record.gene {
        Some(g) => json!(g.to_string()),
        None => json!(null),
    });
    object.insert("profit_ticks".into(), json!(record.profit_ticks));
    object.insert("profit".into(), json!(scale.monetary(record.profit_ticks)));
    object.insert("final_position".into(), json!(record.aia.position));
    object.insert("fill_count".into(), json!(record.aia.fills.len()));
    object.insert("trade_count".into(), json!(record.trades.len()));
    object.insert(
        "max_abs_mid_deviation".into(),
        json!(scale.monetary(record.max_abs_deviation_ticks(fundamental))),
    );
    Ok(pretty(serde_json::Value::Object(object)))
}

/// Per-generation fitness history, monetary units.
pub fn render_fitness_csv(
    history: &[GenerationStats],
    scale: &PriceScale,
    meta: &ExportMeta,
) -> String {
    let mut out = meta.comment_block();
    out.push_str("generation,best,mean,median,elapsed_secs\n");
    for h in history {
        out.push_str(&format!(
            "{},{},{},{},{:.3}\n",
            h.generation,
            scale.format_ticks(h.best_ticks),
            scale.monetary_f64(h.mean_ticks),
            scale.monetary_f64(h.median_ticks),
            h.elapsed_secs,
        ));
    }
    out
}

/// Gene file: comment block, then the action string on its own line.
pub fn render_gene_file(gene: &Gene, meta: &ExportMeta) -> String {
    format!("{}{}\n", meta.comment_block(), gene)
}

/// Reads a gene file written by [`render_gene_file`] (comment lines are
/// skipped).
pub fn parse_gene_file(contents: &str) -> Result<Gene> {
    let line = contents
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .unwrap_or("");
    Gene::parse(line)
}

/// Baseline audit: the frozen quotes a backtest executes against.
pub fn render_baseline_csv(
    baseline: &BaselineQuotes,
    scale: &PriceScale,
    meta: &ExportMeta,
) -> String {
    let mut out = meta.comment_block();
    out.push_str("slot,tick,best_bid,best_ask,mid\n");
    for q in baseline.slots() {
        let bid = q.best_bid.map(|p| scale.format_price(p)).unwrap_or_default();
        let ask = q.best_ask.map(|p| scale.format_price(p)).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{bid},{ask},{}\n",
            q.slot,
            q.tick,
            scale.format_price(q.mid)
        ));
    }
    out
}

/// Agent parameter audit.
pub fn render_profiles_json(params: &[NaParams], meta: &ExportMeta) -> String {
    let mut object = meta.json_fields();
    object.insert("agents".into(), serde_json::to_value(params).expect("plain structs"));
    pretty(serde_json::Value::Object(object))
}

/// Stylized-fact report as JSON, measured values next to references.
pub fn render_report_json(report: &StylizedReport, meta: &ExportMeta) -> String {
    let mut object = meta.json_fields();
    object.insert("measured".into(), serde_json::to_value(report).expect("plain structs"));
    object.insert(
        "reference".into(),
        json!({
            "std_returns": REFERENCE_STD_RETURNS,
            "excess_kurtosis": REFERENCE_EXCESS_KURTOSIS,
            "acf_sq": REFERENCE_ACF_SQ,
        }),
    );
    pretty(serde_json::Value::Object(object))
}

/// Stylized-fact report as a statistic/value/reference table.
pub fn render_report_csv(report: &StylizedReport, meta: &ExportMeta) -> String {
    let mut out = meta.comment_block();
    out.push_str("statistic,value,reference\n");
    out.push_str(&format!("std_returns,{},{REFERENCE_STD_RETURNS}\n", report.std_returns));
    out.push_str(&format!(
        "excess_kurtosis,{},{REFERENCE_EXCESS_KURTOSIS}\n",
        report.excess_kurtosis
    ));
    for (i, (v, r)) in report.acf_sq.iter().zip(REFERENCE_ACF_SQ).enumerate() {
        out.push_str(&format!("acf_sq_lag{},{v},{r}\n", i + 1));
    }
    out.push_str(&format!("n_runs,{},100\n", report.n_runs));
    out
}

fn pretty(value: serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(&value).expect("in-memory serialization");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::AiaState;

    fn scale() -> PriceScale {
        PriceScale::from_delta_p(0.01).unwrap()
    }

    fn meta() -> ExportMeta {
        ExportMeta::new("abc123").with_seed(7)
    }

    #[test]
    fn mid_csv_shape() {
        let series = vec![Price::from_ticks(1_000_000).unwrap(); 4];
        let csv = render_mid_csv(&series, &scale(), &meta());
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# config_hash=abc123");
        assert_eq!(lines[1], "# seed=7");
        assert_eq!(lines[2], "tick,mid");
        assert_eq!(lines[3], "1,10000.00");
        assert_eq!(lines.len(), 6, "ticks 1..=3 exported, tick 0 is not");
        assert!(csv.ends_with('\n'));
    }

    #[test]
    fn gene_file_round_trip() {
        let gene = Gene::parse("BSNNB").unwrap();
        let rendered = render_gene_file(&gene, &meta());
        let parsed = parse_gene_file(&rendered).unwrap();
        assert_eq!(parsed, gene);
        // A bare gene string with no comments parses too.
        assert_eq!(parse_gene_file("BSNNB\n").unwrap(), gene);
    }

    #[test]
    fn summary_embeds_meta() {
        let cfg = MarketConfig::default();
        let record = MarketRecord {
            mid_series: vec![cfg.p_f_price().unwrap(); 3],
            aia: AiaState::default(),
            profit_ticks: 0,
            trades: vec![],
            seed: 7,
            gene: None,
        };
        let json = render_summary_json(&record, &cfg, &meta()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["config_hash"], "abc123");
        assert_eq!(v["seed"], 7);
        assert_eq!(v["gene"], serde_json::Value::Null);
        assert_eq!(v["profit_ticks"], 0);
    }
}
