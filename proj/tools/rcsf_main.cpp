// rcsf: two-timescale RIS cascaded-channel feedback simulator.
//
// Subcommands: gen-data, train, eval, sweep, report, golden.
// Exit codes: 0 success, 2 config error, 3 training divergence,
// 4 verification failure.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "rcsf/binio.hpp"
#include "rcsf/golden.hpp"
#include "rcsf/harness.hpp"

using namespace rcsf;

namespace {

struct CliOverrides {
    std::string config_path;
    std::string out_dir;
    std::string method;
    uint64_t seed = 0;
    long long intervals = -1;
    double gamma1 = -1.0;
    double gamma2 = -1.0;
    int n_q = 0;
    bool full_size = false;

    bool seed_set = false;
};

void add_common(CLI::App* cmd, CliOverrides& o) {
    cmd->add_option("--config", o.config_path,
                    "Key-value config file (key = value lines)");
    cmd->add_option("--out", o.out_dir, "Output directory");
    cmd->add_option("--seed", o.seed, "Master seed")->each([&o](const std::string&) {
        o.seed_set = true;
    });
    cmd->add_option("--method", o.method, "proposed or baseline");
    cmd->add_option("--T", o.intervals, "Ratio intervals per large timescale");
    cmd->add_option("--gamma1", o.gamma1, "AE1 compression ratio");
    cmd->add_option("--gamma2", o.gamma2, "AE2 compression ratio");
    cmd->add_option("--nq", o.n_q, "Quantizer bits per codeword element");
    cmd->add_flag("--full-size", o.full_size,
                  "Use the full geometry (32 antennas, 16x16 RIS)");
}

ExperimentConfig resolve_config(const CliOverrides& o) {
    KvFile kv;
    if (!o.config_path.empty()) kv = KvFile::load(o.config_path);
    ExperimentConfig cfg = ExperimentConfig::from_kv(kv);

    if (o.full_size) {
        cfg.geometry.n_t = 32;
        cfg.geometry.n1 = 16;
        cfg.geometry.n2 = 16;
    }
    if (o.seed_set) cfg.seed = o.seed;
    if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
    if (!o.method.empty()) cfg.method = parse_method(o.method);
    if (o.intervals >= 0) cfg.intervals = static_cast<size_t>(o.intervals);
    if (o.gamma1 > 0) {
        cfg.gamma1 = o.gamma1;
        cfg.n_s1 = 0;
    }
    if (o.gamma2 > 0) {
        cfg.gamma2 = o.gamma2;
        cfg.n_s2 = 0;
    }
    if (o.n_q > 0) cfg.n_q = o.n_q;
    cfg.validate();
    return cfg;
}

void write_manifest(const ExperimentConfig& cfg, const std::string& dir,
                    const std::vector<std::pair<std::string, std::string>>& extra) {
    KvFile manifest = cfg.to_kv();
    manifest.set_u64("dataset_format_version", kDatasetFormatVersion);
    manifest.set_u64("model_format_version", kModelFormatVersion);
    for (const auto& [k, v] : extra) manifest.set(k, v);
    manifest.save(dir + "/manifest.txt");
}

std::string dataset_file(const ExperimentConfig& cfg) {
    if (!cfg.dataset_path.empty()) return cfg.dataset_path;
    return cfg.out_dir + "/dataset.rcsf";
}

int cmd_gen_data(const CliOverrides& o) {
    ExperimentConfig cfg = resolve_config(o);
    std::filesystem::create_directories(cfg.out_dir);
    EpisodeDataset ds = gen_dataset(cfg.dataset_config());
    std::string path = dataset_file(cfg);
    save_dataset(ds, path);
    write_manifest(cfg, cfg.out_dir, {{"command", "gen-data"}, {"dataset_file", path}});
    std::cout << "wrote " << path << " (" << ds.episodes.size() << " episodes, T="
              << ds.intervals << ", n_ris=" << ds.geometry.n_ris()
              << ", n_t=" << ds.geometry.n_t << ")\n";
    return 0;
}

std::string history_csv(const TrainHistory& hist) {
    std::ostringstream out;
    out << "epoch,train_loss,val_loss,best_val_loss,lr\n";
    for (size_t e = 0; e < hist.epochs.size(); ++e) {
        const EpochRecord& r = hist.epochs[e];
        out << e << ',' << format_f64(r.train_loss) << ','
            << format_f64(r.val_loss) << ',' << format_f64(r.best_val_loss)
            << ',' << format_f64(r.lr) << "\n";
    }
    return out.str();
}

int cmd_train(const CliOverrides& o) {
    ExperimentConfig cfg = resolve_config(o);
    std::filesystem::create_directories(cfg.out_dir);
    EpisodeDataset ds = load_dataset(dataset_file(cfg));

    TrainOutcome outcome;
    TrainedBundle bundle = train_models(cfg, ds, cfg.seed, &outcome);
    bundle.save(cfg.out_dir);
    write_file_text(cfg.out_dir + "/ae1_history.csv",
                    history_csv(outcome.ae1_history));
    if (bundle.has_ae2) {
        write_file_text(cfg.out_dir + "/ae2_history.csv",
                        history_csv(outcome.ae2_history));
    }
    write_manifest(cfg, cfg.out_dir,
                   {{"command", "train"},
                    {"train_seconds", format_f64(outcome.seconds)}});
    std::cout << "trained " << (bundle.has_ae2 ? "AE1+AE2" : "AE1") << " in "
              << format_f64(outcome.seconds) << " s; models in " << cfg.out_dir
              << "\n";
    return 0;
}

int cmd_eval(const CliOverrides& o) {
    ExperimentConfig cfg = resolve_config(o);
    EpisodeDataset ds = load_dataset(dataset_file(cfg));
    TrainedBundle bundle = TrainedBundle::load(cfg.out_dir, cfg.method);

    size_t T = cfg.method == Method::proposed ? std::min(cfg.intervals, ds.intervals)
                                              : ds.intervals;
    EvalSummary sum = evaluate(bundle, ds.test_view(), T, cfg.method);

    std::ostringstream per_t;
    per_t << "t,nmse_linear,nmse_db\n";
    for (size_t t = 0; t < sum.per_interval_linear.size(); ++t) {
        per_t << t << ',' << format_f64(sum.per_interval_linear[t]) << ','
              << nmse_db_csv(sum.per_interval_linear[t]) << "\n";
    }
    write_file_text(cfg.out_dir + "/report.csv", per_t.str());

    NeuralModel empty;
    empty.input_shape = {1};
    ComplexityReport cr = report_complexity(
        bundle.ae1, bundle.has_ae2 ? bundle.ae2 : empty, T);

    std::ostringstream summary;
    summary << "method,T,n_s1,n_s2,n_q,avg_nmse_db,n_equ_bits,"
               "measured_bits_per_interval,ae1_flops,ae2_flops,"
               "avg_flops_per_interval,eval_seconds\n";
    summary << method_name(cfg.method) << ',' << T << ','
            << bundle.ae1.codeword_length() << ','
            << (bundle.has_ae2 ? bundle.ae2.codeword_length() : 0) << ','
            << bundle.quant.n_q << ',' << nmse_db_csv(sum.avg_linear) << ','
            << format_f64(sum.eq_overhead_bits) << ','
            << format_f64(sum.measured_bits_per_interval) << ',' << cr.ae1_flops
            << ',' << (bundle.has_ae2 ? cr.ae2_flops : 0) << ','
            << format_f64(cfg.method == Method::proposed
                              ? cr.proposed_per_interval
                              : cr.baseline_per_interval)
            << ',' << format_f64(sum.seconds) << "\n";
    write_file_text(cfg.out_dir + "/summary.csv", summary.str());

    write_manifest(cfg, cfg.out_dir, {{"command", "eval"}});
    std::cout << "avg NMSE (" << method_name(cfg.method)
              << "): " << nmse_db_csv(sum.avg_linear) << " dB, N_equ "
              << format_f64(sum.eq_overhead_bits) << " bits/interval\n"
              << "reports in " << cfg.out_dir << "\n";
    return 0;
}

int cmd_sweep(const CliOverrides& o) {
    ExperimentConfig cfg = resolve_config(o);
    std::filesystem::create_directories(cfg.out_dir);
    EpisodeDataset ds = load_dataset(dataset_file(cfg));

    std::vector<SweepRow> rows = run_sweep(cfg, ds);
    std::ostringstream csv;
    csv << sweep_csv_header();
    for (const SweepRow& row : rows) csv << sweep_csv_row(row);
    write_file_text(cfg.out_dir + "/sweep.csv", csv.str());
    write_manifest(cfg, cfg.out_dir, {{"command", "sweep"}});
    std::cout << "wrote " << rows.size() << " sweep rows to " << cfg.out_dir
              << "/sweep.csv\n";
    return 0;
}

int cmd_report(const CliOverrides& o) {
    ExperimentConfig cfg = resolve_config(o);
    TrainedBundle bundle = TrainedBundle::load(cfg.out_dir, cfg.method);
    NeuralModel empty;
    empty.input_shape = {1};
    ComplexityReport cr = report_complexity(
        bundle.ae1, bundle.has_ae2 ? bundle.ae2 : empty, cfg.intervals);
    std::string csv = complexity_csv(cr);
    write_file_text(cfg.out_dir + "/complexity.csv", csv);
    std::cout << csv;
    return 0;
}

int cmd_golden(const std::string& emit_dir, const std::string& verify_dir) {
    if (!emit_dir.empty()) {
        emit_golden(emit_dir);
        std::cout << "golden vectors written to " << emit_dir << "\n";
    }
    if (!verify_dir.empty()) {
        verify_golden(verify_dir);
        std::cout << "golden vectors verified in " << verify_dir << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-timescale cascaded-channel feedback simulator"};
    app.require_subcommand(1);

    CliOverrides o;
    std::string golden_emit, golden_verify;

    add_common(app.add_subcommand("gen-data", "Generate an episode dataset"), o);
    add_common(app.add_subcommand("train", "Train AE1/AE2 on a dataset"), o);
    add_common(app.add_subcommand("eval", "Evaluate trained models"), o);
    add_common(app.add_subcommand("sweep", "Grid sweep over gamma1/gamma2/T"), o);
    add_common(app.add_subcommand("report", "Complexity report for trained models"),
               o);
    CLI::App* golden = app.add_subcommand("golden", "Emit or verify golden vectors");
    golden->add_option("--emit", golden_emit, "Write golden vectors to a directory");
    golden->add_option("--verify", golden_verify,
                       "Verify golden vectors in a directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("gen-data")) return cmd_gen_data(o);
        if (app.got_subcommand("train")) return cmd_train(o);
        if (app.got_subcommand("eval")) return cmd_eval(o);
        if (app.got_subcommand("sweep")) return cmd_sweep(o);
        if (app.got_subcommand("report")) return cmd_report(o);
        if (app.got_subcommand("golden")) {
            if (golden_emit.empty() && golden_verify.empty()) {
                std::cerr << "golden: need --emit and/or --verify\n";
                return 2;
            }
            return cmd_golden(golden_emit, golden_verify);
        }
    } catch (const TrainingError& e) {
        std::cerr << "training diverged: " << e.what() << "\n";
        return 3;
    } catch (const VerificationError& e) {
        std::cerr << "verification failed: " << e.what() << "\n";
        return 4;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
