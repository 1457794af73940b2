#pragma once

#include "rcsf/config.hpp"
#include "rcsf/metrics.hpp"
#include "rcsf/protocol.hpp"

namespace rcsf {

/// Trained compressors plus the codec scales they were fitted with.
struct TrainedBundle {
    NeuralModel ae1;
    NeuralModel ae2;
    NormalizationSpec chan_scale;
    NormalizationSpec ratio_scale;
    bool has_ae2 = false;

    QuantSpec quant;

    void save(const std::string& dir) const;
    static TrainedBundle load(const std::string& dir, Method method);
};

/// Anchor channels H(0) of each episode as a training tensor
/// (N, 2, n_ris, n_t).
Tensor anchors_tensor(std::span<const Episode> episodes,
                      const NormalizationSpec& spec);

/// Ratio vectors for t = 1..T of each episode as a tensor (N*T, 2*n_ris).
Tensor ratios_tensor(std::span<const Episode> episodes,
                     const NormalizationSpec& spec);

struct TrainOutcome {
    TrainHistory ae1_history;
    TrainHistory ae2_history;
    double seconds = 0.0;
};

/// Fits codec scales on the training split and trains AE1 on episode
/// anchors (and AE2 on ratio vectors unless the method is the baseline).
TrainedBundle train_models(const ExperimentConfig& cfg, const EpisodeDataset& ds,
                           uint64_t seed, TrainOutcome* outcome = nullptr);

/// Runs one episode (channels h_seq[0..T]) through the feedback loop and
/// returns the per-interval linear NMSE. The proposed method anchors at
/// t=0 and sends ratios afterwards; the baseline sends a FULL frame every
/// interval. Frames cross a serialize/parse boundary. When `ledger` is
/// given, the UE's per-interval bit counts are appended to it.
std::vector<double> run_episode(TrainedBundle& bundle,
                                std::span<const CMat> h_seq, Method method,
                                OverheadLedger* ledger = nullptr);

struct EvalSummary {
    std::vector<double> per_interval_linear;  // mean over episodes, per t
    double avg_linear = 0.0;                  // mean over t of the above
    double avg_db = 0.0;
    uint64_t total_bits = 0;
    size_t frame_count = 0;
    double measured_bits_per_interval = 0.0;
    double eq_overhead_bits = 0.0;  // Eq-style formula for this config
    double seconds = 0.0;
};

/// Evaluates over the given episodes, truncated to T = `intervals` ratio
/// steps per episode.
EvalSummary evaluate(TrainedBundle& bundle, std::span<const Episode> episodes,
                     size_t intervals, Method method);

struct ComplexityReport {
    uint64_t ae1_flops = 0;
    uint64_t ae2_flops = 0;
    size_t intervals = 0;
    // per-interval FLOPs of the proposed method as the exact rational
    // (ae1 + T*ae2) / (T+1)
    uint64_t proposed_num = 0;
    uint64_t proposed_den = 1;
    double proposed_per_interval = 0.0;
    double baseline_per_interval = 0.0;
    double ratio = 0.0;  // proposed / baseline
};

ComplexityReport report_complexity(const NeuralModel& ae1,
                                   const NeuralModel& ae2, size_t intervals);
std::string complexity_csv(const ComplexityReport& r);

struct SweepRow {
    Method method = Method::proposed;
    size_t intervals = 0;
    double gamma1 = 0.0, gamma2 = 0.0;
    size_t n_s1 = 0, n_s2 = 0;
    int n_q = 4;
    double eq_overhead_bits = 0.0;
    double avg_linear_median = 0.0;  // median over seeds
    double avg_linear_lo = 0.0, avg_linear_hi = 0.0;
    uint64_t ae1_flops = 0, ae2_flops = 0;
    double flops_per_interval = 0.0;
    size_t seed_count = 0;
};

/// Trains one AE1 per gamma1 and one AE2 per gamma2 for every seed, then
/// evaluates every (gamma1, gamma2, T, method) grid point on the test
/// split. Baseline rows reuse the proposed rows' AE1.
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg,
                                const EpisodeDataset& ds);

std::string sweep_csv_header();
std::string sweep_csv_row(const SweepRow& row);

}  // namespace rcsf
