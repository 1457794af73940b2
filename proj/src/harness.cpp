#include "rcsf/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <sstream>

namespace rcsf {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
}

}  // namespace

void TrainedBundle::save(const std::string& dir) const {
    std::filesystem::create_directories(dir);
    ae1.save(dir + "/ae1.rcnn");
    if (has_ae2) ae2.save(dir + "/ae2.rcnn");
    KvFile norms;
    norms.set_f64("chan_scale", chan_scale.scale);
    norms.set_f64("ratio_scale", ratio_scale.scale);
    norms.set_i64("n_q", quant.n_q);
    norms.set_i64("raw64", quant.raw64 ? 1 : 0);
    norms.save(dir + "/norms.txt");
}

TrainedBundle TrainedBundle::load(const std::string& dir, Method method) {
    TrainedBundle b;
    b.ae1 = NeuralModel::load(dir + "/ae1.rcnn");
    KvFile norms = KvFile::load(dir + "/norms.txt");
    b.chan_scale.scale = norms.get_f64("chan_scale");
    b.ratio_scale.scale = norms.get_f64("ratio_scale");
    b.quant.n_q = static_cast<int>(norms.get_i64("n_q"));
    b.quant.raw64 = norms.get_i64("raw64") != 0;
    if (method == Method::proposed) {
        b.ae2 = NeuralModel::load(dir + "/ae2.rcnn");
        b.has_ae2 = true;
    }
    return b;
}

Tensor anchors_tensor(std::span<const Episode> episodes,
                      const NormalizationSpec& spec) {
    if (episodes.empty()) throw DimensionError("anchors_tensor: no episodes");
    std::vector<Tensor> samples;
    samples.reserve(episodes.size());
    for (const Episode& ep : episodes) {
        samples.push_back(channel_to_tensor(ep.h[0], spec));
    }
    return stack_batch(samples);
}

Tensor ratios_tensor(std::span<const Episode> episodes,
                     const NormalizationSpec& spec) {
    std::vector<Tensor> samples;
    for (const Episode& ep : episodes) {
        for (size_t t = 1; t < ep.h.size(); ++t) {
            samples.push_back(ratio_to_tensor(extract_ratio(ep.h[0], ep.h[t]), spec));
        }
    }
    if (samples.empty()) throw DimensionError("ratios_tensor: no ratio samples");
    return stack_batch(samples);
}

TrainedBundle train_models(const ExperimentConfig& cfg, const EpisodeDataset& ds,
                           uint64_t seed, TrainOutcome* outcome) {
    auto start = std::chrono::steady_clock::now();
    auto train_eps = ds.train_view();
    auto val_eps = ds.val_view();
    if (train_eps.empty() || val_eps.empty()) {
        throw ConfigError("train_models: dataset too small for the split");
    }

    TrainedBundle bundle;
    bundle.quant = QuantSpec{cfg.n_q, false};
    bundle.chan_scale = fit_channel_scale(train_eps);

    const size_t n_ris = ds.geometry.n_ris();
    const size_t n_t = ds.geometry.n_t;

    Rng seed_rng(seed);

    {
        Tensor train_x = anchors_tensor(train_eps, bundle.chan_scale);
        Tensor val_x = anchors_tensor(val_eps, bundle.chan_scale);
        bundle.ae1 = build_ae1(n_ris, n_t, cfg.resolved_n_s1());
        Rng init = seed_rng.substream(1);
        bundle.ae1.init_params(init);
        TrainConfig tc = cfg.ae1_train;
        tc.seed = seed_rng.substream(2).next_u64();
        TrainHistory hist = train(bundle.ae1, train_x, train_x, val_x, val_x, tc);
        if (outcome) outcome->ae1_history = std::move(hist);
    }

    if (cfg.method == Method::proposed) {
        if (ds.intervals == 0) {
            throw ConfigError("train_models: proposed method needs T >= 1");
        }
        bundle.ratio_scale = fit_ratio_scale(train_eps);
        Tensor train_x = ratios_tensor(train_eps, bundle.ratio_scale);
        Tensor val_x = ratios_tensor(val_eps, bundle.ratio_scale);
        bundle.ae2 = build_ae2(n_ris, cfg.resolved_n_s2());
        Rng init = seed_rng.substream(3);
        bundle.ae2.init_params(init);
        TrainConfig tc = cfg.ae2_train;
        tc.seed = seed_rng.substream(4).next_u64();
        TrainHistory hist = train(bundle.ae2, train_x, train_x, val_x, val_x, tc);
        if (outcome) outcome->ae2_history = std::move(hist);
        bundle.has_ae2 = true;
    }

    if (outcome) outcome->seconds = seconds_since(start);
    return bundle;
}

std::vector<double> run_episode(TrainedBundle& bundle,
                                std::span<const CMat> h_seq, Method method,
                                OverheadLedger* ledger) {
    if (h_seq.empty()) throw DimensionError("run_episode: empty episode");
    const size_t T = h_seq.size() - 1;

    ProtocolConfig pc;
    pc.n_ris = h_seq[0].rows;
    pc.n_t = h_seq[0].cols;
    pc.intervals = method == Method::proposed ? T : 0;
    pc.quant = bundle.quant;
    pc.chan_scale = bundle.chan_scale;
    pc.ratio_scale = bundle.ratio_scale;

    NeuralModel* ae2 = bundle.has_ae2 ? &bundle.ae2 : nullptr;
    if (method == Method::proposed && T > 0 && ae2 == nullptr) {
        throw ProtocolError("run_episode: proposed method without AE2");
    }
    UeSide ue(pc, bundle.ae1, ae2);
    BsSide bs(pc, bundle.ae1, ae2);

    std::vector<double> out;
    out.reserve(T + 1);
    for (const CMat& h : h_seq) {
        FeedbackMessage msg = parse_frame(serialize_frame(ue.step(h)));
        CMat h_hat = bs.step(msg);
        out.push_back(nmse(h, h_hat).linear);
    }
    if (ledger) {
        for (uint32_t bits : ue.ledger().per_interval()) ledger->record(bits);
    }
    return out;
}

EvalSummary evaluate(TrainedBundle& bundle, std::span<const Episode> episodes,
                     size_t intervals, Method method) {
    if (episodes.empty()) throw DimensionError("evaluate: no episodes");
    auto start = std::chrono::steady_clock::now();

    EvalSummary sum;
    sum.per_interval_linear.assign(intervals + 1, 0.0);
    OverheadLedger ledger;
    for (const Episode& ep : episodes) {
        if (ep.h.size() < intervals + 1) {
            throw DimensionError("evaluate: episode shorter than requested T");
        }
        std::span<const CMat> view(ep.h.data(), intervals + 1);
        std::vector<double> per_t = run_episode(bundle, view, method, &ledger);
        for (size_t t = 0; t <= intervals; ++t) {
            sum.per_interval_linear[t] += per_t[t];
        }
    }
    for (double& v : sum.per_interval_linear) {
        v /= static_cast<double>(episodes.size());
    }
    sum.avg_linear = 0.0;
    for (double v : sum.per_interval_linear) sum.avg_linear += v;
    sum.avg_linear /= static_cast<double>(intervals + 1);
    sum.avg_db = 10.0 * std::log10(std::max(sum.avg_linear, 1e-300));

    sum.total_bits = ledger.total_bits();
    sum.frame_count = ledger.intervals();
    sum.measured_bits_per_interval = ledger.average_bits();
    const size_t n_s1 = bundle.ae1.codeword_length();
    const size_t n_s2 = bundle.has_ae2 ? bundle.ae2.codeword_length() : 0;
    sum.eq_overhead_bits =
        method == Method::proposed
            ? equivalent_overhead(bundle.quant.n_q, n_s1, n_s2, intervals)
            : equivalent_overhead(bundle.quant.n_q, n_s1, 0, 0);
    sum.seconds = seconds_since(start);
    return sum;
}

ComplexityReport report_complexity(const NeuralModel& ae1,
                                   const NeuralModel& ae2, size_t intervals) {
    ComplexityReport r;
    r.ae1_flops = count_flops(ae1);
    r.ae2_flops = count_flops(ae2);
    r.intervals = intervals;
    r.proposed_num = r.ae1_flops + static_cast<uint64_t>(intervals) * r.ae2_flops;
    r.proposed_den = intervals + 1;
    r.proposed_per_interval = static_cast<double>(r.proposed_num) /
                              static_cast<double>(r.proposed_den);
    r.baseline_per_interval = static_cast<double>(r.ae1_flops);
    r.ratio = r.proposed_per_interval / r.baseline_per_interval;
    return r;
}

std::string complexity_csv(const ComplexityReport& r) {
    std::ostringstream out;
    out << "T,ae1_flops,ae2_flops,proposed_flops_per_interval,"
           "baseline_flops_per_interval,ratio\n";
    out << r.intervals << ',' << r.ae1_flops << ',' << r.ae2_flops << ','
        << format_f64(r.proposed_per_interval) << ','
        << format_f64(r.baseline_per_interval) << ',' << format_f64(r.ratio)
        << "\n";
    return out.str();
}

namespace {

double median_of(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    size_t n = xs.size();
    return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

}  // namespace

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg,
                                const EpisodeDataset& ds) {
    std::vector<double> gamma1s =
        cfg.sweep_gamma1.empty() ? std::vector<double>{cfg.gamma1} : cfg.sweep_gamma1;
    std::vector<double> gamma2s =
        cfg.sweep_gamma2.empty() ? std::vector<double>{cfg.gamma2} : cfg.sweep_gamma2;
    std::vector<size_t> interval_list = cfg.sweep_intervals.empty()
                                            ? std::vector<size_t>{cfg.intervals}
                                            : cfg.sweep_intervals;
    for (size_t T : interval_list) {
        if (T > ds.intervals) {
            throw ConfigError("run_sweep: grid T exceeds the dataset's T");
        }
    }

    const size_t n_ris = ds.geometry.n_ris();
    const size_t n_t = ds.geometry.n_t;

    // Per (seed, gamma) trained models; AE1 is shared by both methods.
    struct SeedModels {
        std::vector<TrainedBundle> by_gamma1;  // AE1 + chan scale
        std::vector<NeuralModel> ae2_by_gamma2;
        NormalizationSpec ratio_scale;
    };

    std::vector<SeedModels> seeds(cfg.sweep_seeds.size());
    for (size_t si = 0; si < cfg.sweep_seeds.size(); ++si) {
        SeedModels& sm = seeds[si];
        for (double g1 : gamma1s) {
            ExperimentConfig one = cfg;
            one.method = Method::baseline;  // train AE1 only here
            one.gamma1 = g1;
            one.n_s1 = 0;
            sm.by_gamma1.push_back(
                train_models(one, ds, cfg.sweep_seeds[si], nullptr));
        }
        // AE2 per gamma2, trained on the full-T ratio set
        sm.ratio_scale = fit_ratio_scale(ds.train_view());
        Tensor train_x = ratios_tensor(ds.train_view(), sm.ratio_scale);
        Tensor val_x = ratios_tensor(ds.val_view(), sm.ratio_scale);
        for (double g2 : gamma2s) {
            size_t n_s2 = static_cast<size_t>(
                std::llround(g2 * 2.0 * static_cast<double>(n_ris)));
            NeuralModel ae2 = build_ae2(n_ris, n_s2);
            Rng seed_rng(cfg.sweep_seeds[si]);
            Rng init = seed_rng.substream(3);
            ae2.init_params(init);
            TrainConfig tc = cfg.ae2_train;
            tc.seed = seed_rng.substream(4).next_u64();
            (void)train(ae2, train_x, train_x, val_x, val_x, tc);
            sm.ae2_by_gamma2.push_back(std::move(ae2));
        }
    }

    std::vector<SweepRow> rows;
    for (size_t T : interval_list) {
        for (size_t g1i = 0; g1i < gamma1s.size(); ++g1i) {
            for (size_t g2i = 0; g2i < gamma2s.size(); ++g2i) {
                for (Method method : {Method::proposed, Method::baseline}) {
                    std::vector<double> per_seed;
                    size_t n_s1 = 0, n_s2 = 0;
                    for (size_t si = 0; si < seeds.size(); ++si) {
                        TrainedBundle& b = seeds[si].by_gamma1[g1i];
                        b.has_ae2 = method == Method::proposed;
                        if (b.has_ae2) {
                            b.ae2 = std::move(seeds[si].ae2_by_gamma2[g2i]);
                            b.ratio_scale = seeds[si].ratio_scale;
                        }
                        EvalSummary s = evaluate(b, ds.test_view(), T, method);
                        per_seed.push_back(s.avg_linear);
                        n_s1 = b.ae1.codeword_length();
                        n_s2 = b.has_ae2 ? b.ae2.codeword_length() : 0;
                        if (b.has_ae2) {
                            seeds[si].ae2_by_gamma2[g2i] = std::move(b.ae2);
                        }
                    }
                    SweepRow row;
                    row.method = method;
                    row.intervals = T;
                    Gammas g = compression_ratios(n_s1, std::max<size_t>(n_s2, 1),
                                                  n_t, n_ris);
                    row.gamma1 = g.gamma1;
                    row.gamma2 = method == Method::proposed ? g.gamma2 : 0.0;
                    row.n_s1 = n_s1;
                    row.n_s2 = method == Method::proposed ? n_s2 : 0;
                    row.n_q = cfg.n_q;
                    row.eq_overhead_bits =
                        method == Method::proposed
                            ? equivalent_overhead(cfg.n_q, n_s1, n_s2, T)
                            : equivalent_overhead(cfg.n_q, n_s1, 0, 0);
                    row.avg_linear_median = median_of(per_seed);
                    row.avg_linear_lo =
                        *std::min_element(per_seed.begin(), per_seed.end());
                    row.avg_linear_hi =
                        *std::max_element(per_seed.begin(), per_seed.end());
                    NeuralModel empty;
                    empty.input_shape = {1};
                    const NeuralModel& ae2_ref =
                        method == Method::proposed
                            ? seeds[0].ae2_by_gamma2[g2i]
                            : empty;
                    ComplexityReport cr =
                        report_complexity(seeds[0].by_gamma1[g1i].ae1, ae2_ref, T);
                    row.ae1_flops = cr.ae1_flops;
                    row.ae2_flops = method == Method::proposed ? cr.ae2_flops : 0;
                    row.flops_per_interval = method == Method::proposed
                                                 ? cr.proposed_per_interval
                                                 : cr.baseline_per_interval;
                    row.seed_count = seeds.size();
                    rows.push_back(row);
                }
            }
        }
    }
    return rows;
}

std::string sweep_csv_header() {
    return "method,T,gamma1,gamma2,n_s1,n_s2,n_q,n_equ_bits,avg_nmse_db,"
           "avg_nmse_db_lo,avg_nmse_db_hi,ae1_flops,ae2_flops,"
           "avg_flops_per_interval,seeds\n";
}

std::string sweep_csv_row(const SweepRow& row) {
    std::ostringstream out;
    out << method_name(row.method) << ',' << row.intervals << ','
        << format_f64(row.gamma1) << ',' << format_f64(row.gamma2) << ','
        << row.n_s1 << ',' << row.n_s2 << ',' << row.n_q << ','
        << format_f64(row.eq_overhead_bits) << ','
        << nmse_db_csv(row.avg_linear_median) << ','
        << nmse_db_csv(row.avg_linear_lo) << ','
        << nmse_db_csv(row.avg_linear_hi) << ',' << row.ae1_flops << ','
        << row.ae2_flops << ',' << format_f64(row.flops_per_interval) << ','
        << row.seed_count << "\n";
    return out.str();
}

}  // namespace rcsf
