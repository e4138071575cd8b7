//! End-to-end compression, decompression and measurement.
//!
//! Compression never commits to tunneling blindly: the greedy choice must
//! ask for tunnels (`t_best > 0`) *and* the tunneled container must actually
//! be smaller than the plain one, otherwise the plain container is written.
//! That makes the output never worse than the untunneled pipeline.

use crate::backend::{
    decode_payload, encode_payload, read_container, rl_encoded_len, write_container, Container,
};
use crate::blocks::{build_collision_graph, compute_run_blocks, compute_runs};
use crate::bwt::{build_suffix_array, bwt_from_sa, invert_bwt, lf_mapping, Bwt, Text};
use crate::choice::{greedy_choice, gross_benefit, score_blocks, tax, EstimatorState};
use crate::tunnel::{decode_aux, encode_aux, invert_tunneled, tunnel, AuxVector, TunneledBwt};
use crate::{Error, Result, ALPHABET};
use std::time::Instant;

/// Options for [`compress_bytes`].
#[derive(Debug, Clone, Copy)]
pub struct CompressOptions {
    /// Attempt tunneling (default). When false the plain pipeline runs.
    pub tunnel: bool,
}

impl Default for CompressOptions {
    fn default() -> Self {
        CompressOptions { tunnel: true }
    }
}

/// Wall-clock time per stage, in milliseconds.
#[derive(Debug, Clone, Copy, Default)]
pub struct StageTimings {
    pub block_ms: f64,
    pub choice_ms: f64,
    pub tunnel_ms: f64,
    pub encode_ms: f64,
}

/// Everything measured while compressing one input.
#[derive(Debug, Clone)]
pub struct StatsReport {
    /// Input length including the sentinel.
    pub orig_len: u64,
    /// BWT length after tunneling (equals `orig_len` when not tunneled).
    pub bwt_len: u64,
    /// Number of runs in the BWT.
    pub runs: u64,
    /// Runs of height greater than one.
    pub runs_gt1: u64,
    /// Width-maximal run-blocks found.
    pub block_count: u64,
    /// Tunnels the estimator selected.
    pub t_best: u64,
    /// Estimator state at the selected prefix (`tc`, `t` filled in).
    pub estimator: EstimatorState,
    /// Predicted bits saved on the encoded BWT at `t_best`.
    pub gross_pred_bits: f64,
    /// Predicted bits spent on the aux vector at `t_best`.
    pub tax_pred_bits: f64,
    /// Plain container size in bytes.
    pub plain_bytes: u64,
    /// Tunneled container size in bytes, when tunneling was attempted.
    pub tunneled_bytes: Option<u64>,
    /// Encoded-BWT payload size of the plain container.
    pub enc_l_plain_bytes: u64,
    /// Encoded-BWT payload size of the tunneled container.
    pub enc_l_tunneled_bytes: Option<u64>,
    /// Encoded-aux payload size of the tunneled container.
    pub enc_aux_bytes: Option<u64>,
    /// Model fit: min-max distance of the predicted and measured
    /// gross-to-net benefit ratios, in (0, 1]. `None` when `t_best == 0`.
    pub fit: Option<f64>,
    /// Whether the emitted container is the tunneled one.
    pub wrote_tunneled: bool,
    pub timings: StageTimings,
}

/// A compressed container plus its measurement report.
#[derive(Debug, Clone)]
pub struct CompressOutcome {
    pub container: Vec<u8>,
    pub report: StatsReport,
}

fn plain_container(bwt: &Bwt) -> Result<(Vec<u8>, u64)> {
    let enc_l = encode_payload(bwt.symbols(), ALPHABET)?;
    let enc_l_len = enc_l.len() as u64;
    let container = write_container(&Container {
        tunneled: false,
        orig_len: bwt.len() as u64,
        bwt_len: bwt.len() as u64,
        aux_len: 0,
        enc_l,
        enc_aux: Vec::new(),
    });
    Ok((container, enc_l_len))
}

/// Compress `input` into a container.
pub fn compress_bytes(input: &[u8], opts: &CompressOptions) -> Result<CompressOutcome> {
    let text = Text::from_bytes(input);
    let sa = build_suffix_array(&text);
    let bwt = bwt_from_sa(&text, &sa)?;
    drop(sa);

    let started = Instant::now();
    let runs = compute_runs(&bwt);
    let mut timings = StageTimings::default();

    let mut report = StatsReport {
        orig_len: text.len() as u64,
        bwt_len: text.len() as u64,
        runs: runs.len() as u64,
        runs_gt1: runs.iter().filter(|r| r.height > 1).count() as u64,
        block_count: 0,
        t_best: 0,
        estimator: EstimatorState::from_runs(&runs),
        gross_pred_bits: 0.0,
        tax_pred_bits: 0.0,
        plain_bytes: 0,
        tunneled_bytes: None,
        enc_l_plain_bytes: 0,
        enc_l_tunneled_bytes: None,
        enc_aux_bytes: None,
        fit: None,
        wrote_tunneled: false,
        timings: StageTimings::default(),
    };
    debug_assert_eq!(report.estimator.n_rle, rl_encoded_len(&runs));

    let tunneled = if opts.tunnel {
        let lf = lf_mapping(&bwt);
        let blocks = compute_run_blocks(&lf, &runs);
        drop(lf);
        report.block_count = blocks.len() as u64;
        timings.block_ms = started.elapsed().as_secs_f64() * 1e3;

        let choice_started = Instant::now();
        let graph = build_collision_graph(&blocks, &runs)?;
        let scored = score_blocks(&blocks, &runs);
        let choice = greedy_choice(&blocks, &scored, &graph, &report.estimator);
        timings.choice_ms = choice_started.elapsed().as_secs_f64() * 1e3;

        if choice.t_best > 0 {
            let tunnel_started = Instant::now();
            let chosen: Vec<_> = choice.order[..choice.t_best]
                .iter()
                .map(|&i| blocks[i].clone())
                .collect();
            let tb = tunnel(&bwt, &chosen)?;
            let aux = encode_aux(&tb)?;
            timings.tunnel_ms = tunnel_started.elapsed().as_secs_f64() * 1e3;

            report.t_best = choice.t_best as u64;
            report.estimator.t = choice.t_best as u64;
            report.estimator.tc = choice.tc_at(choice.t_best);
            report.gross_pred_bits = gross_benefit(&report.estimator)?;
            report.tax_pred_bits = tax(&report.estimator);
            Some((tb, aux))
        } else {
            None
        }
    } else {
        timings.block_ms = started.elapsed().as_secs_f64() * 1e3;
        None
    };

    let encode_started = Instant::now();
    let (plain, enc_l_plain) = plain_container(&bwt)?;
    report.plain_bytes = plain.len() as u64;
    report.enc_l_plain_bytes = enc_l_plain;

    let container = match tunneled {
        None => plain,
        Some((tb, aux)) => {
            let enc_l = encode_payload(tb.l(), ALPHABET)?;
            let aux16: Vec<u16> = aux.symbols().iter().map(|&s| s as u16).collect();
            let enc_aux = encode_payload(&aux16, 4)?;
            report.enc_l_tunneled_bytes = Some(enc_l.len() as u64);
            report.enc_aux_bytes = Some(enc_aux.len() as u64);
            let bytes = write_container(&Container {
                tunneled: true,
                orig_len: tb.orig_len() as u64,
                bwt_len: tb.len() as u64,
                aux_len: aux.len() as u64,
                enc_l,
                enc_aux,
            });
            report.tunneled_bytes = Some(bytes.len() as u64);
            report.fit = Some(model_fit(&report));

            // never worse: fall back to the plain container unless tunneling
            // actually won
            if bytes.len() < report.plain_bytes as usize {
                report.wrote_tunneled = true;
                report.bwt_len = tb.len() as u64;
                bytes
            } else {
                plain
            }
        }
    };
    timings.encode_ms = encode_started.elapsed().as_secs_f64() * 1e3;
    report.timings = timings;

    Ok(CompressOutcome { container, report })
}

/// The min-max distance between the measured and predicted gross-to-net
/// benefit ratios.
fn model_fit(report: &StatsReport) -> f64 {
    let aux_bits = report.enc_aux_bytes.unwrap_or(0) as f64 * 8.0;
    let delta_l_bits = (report.enc_l_plain_bytes as f64
        - report.enc_l_tunneled_bytes.unwrap_or(0) as f64)
        * 8.0;
    let x = 1.0 + aux_bits / (delta_l_bits - aux_bits);
    let y = 1.0 + report.tax_pred_bits / (report.gross_pred_bits - report.tax_pred_bits);
    let fit = x.min(y).max(0.0) / x.max(y);
    if fit.is_finite() {
        fit
    } else {
        0.0
    }
}

/// Decompress a container back to the original bytes.
pub fn decompress_bytes(container: &[u8]) -> Result<Vec<u8>> {
    let c = read_container(container)?;
    let l16 = decode_payload(&c.enc_l, ALPHABET, c.bwt_len as usize)?;

    let text = if c.tunneled {
        let aux16 = decode_payload(&c.enc_aux, 4, c.aux_len as usize)?;
        let aux_syms: Vec<u8> = aux16
            .iter()
            .map(|&s| u8::try_from(s).map_err(|_| Error::corrupt("aux symbol out of range")))
            .collect::<Result<_>>()?;
        let aux = AuxVector::from_symbols(aux_syms)?;
        let tb: TunneledBwt = decode_aux(l16, &aux, c.orig_len as usize)?;
        invert_tunneled(&tb)?
    } else {
        let bwt =
            Bwt::from_symbols(l16).map_err(|_| Error::corrupt("payload is not a valid BWT"))?;
        invert_bwt(&bwt)?
    };
    if text.len() != c.orig_len as usize {
        return Err(Error::corrupt("reconstructed length mismatch"));
    }
    Ok(text.to_bytes())
}
