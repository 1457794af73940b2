#include "rcsf/config.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace rcsf {

std::string method_name(Method m) {
    return m == Method::proposed ? "proposed" : "baseline";
}

Method parse_method(const std::string& name) {
    if (name == "proposed") return Method::proposed;
    if (name == "baseline") return Method::baseline;
    throw ConfigError("method must be 'proposed' or 'baseline', got '" + name +
                      "'");
}

size_t ExperimentConfig::resolved_n_s1() const {
    if (n_s1 > 0) return n_s1;
    double flat = 2.0 * static_cast<double>(geometry.n_ris() * geometry.n_t);
    return static_cast<size_t>(std::llround(gamma1 * flat));
}

size_t ExperimentConfig::resolved_n_s2() const {
    if (n_s2 > 0) return n_s2;
    double flat = 2.0 * static_cast<double>(geometry.n_ris());
    return static_cast<size_t>(std::llround(gamma2 * flat));
}

void ExperimentConfig::validate() const {
    geometry.validate();
    bs_ris.validate();
    ris_ue.validate();
    if (episodes < 1) throw ConfigError("episodes must be >= 1");
    if (n_q < 1 || n_q > 16) throw ConfigError("n_q must lie in [1, 16]");
    size_t s1 = resolved_n_s1(), s2 = resolved_n_s2();
    if (s1 < 1 || s1 > 2 * geometry.n_ris() * geometry.n_t) {
        throw ConfigError("n_s1/gamma1 out of range");
    }
    if (s2 < 1 || s2 > 2 * geometry.n_ris()) {
        throw ConfigError("n_s2/gamma2 out of range");
    }
    if (sweep_seeds.empty()) throw ConfigError("seeds list must not be empty");
}

namespace {

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& text, Parse parse,
                          const std::string& key) {
    std::vector<T> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        size_t b = item.find_first_not_of(" \t");
        size_t e = item.find_last_not_of(" \t");
        if (b == std::string::npos) continue;
        item = item.substr(b, e - b + 1);
        try {
            out.push_back(parse(item));
        } catch (const std::exception&) {
            throw ConfigError("bad list entry '" + item + "' for key " + key);
        }
    }
    if (out.empty()) throw ConfigError("empty list for key " + key);
    return out;
}

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys{
        "n_t",        "ris_rows",    "ris_cols",   "spacing",
        "paths_bs",   "rho",         "paths_ue",   "speed_mps",
        "carrier_ghz", "dt_ms",      "episodes",   "T",
        "split",      "seed",        "gamma1",     "gamma2",
        "n_s1",       "n_s2",        "n_q",        "method",
        "dataset",    "out",         "ae1_epochs", "ae1_batch",
        "ae2_epochs", "ae2_batch",   "lr_initial", "lr_final",
        "patience",   "sweep_gamma1", "sweep_gamma2", "sweep_T",
        "seeds",
    };
    return keys;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_kv(const KvFile& kv) {
    for (const auto& [key, value] : kv.entries()) {
        if (!known_keys().count(key)) {
            throw ConfigError("unknown config key: " + key);
        }
    }

    ExperimentConfig cfg;
    if (kv.has("n_t")) cfg.geometry.n_t = kv.get_u64("n_t");
    if (kv.has("ris_rows")) cfg.geometry.n1 = kv.get_u64("ris_rows");
    if (kv.has("ris_cols")) cfg.geometry.n2 = kv.get_u64("ris_cols");
    if (kv.has("spacing")) cfg.geometry.spacing = kv.get_f64("spacing");
    if (kv.has("paths_bs")) cfg.bs_ris.path_count = kv.get_u64("paths_bs");
    if (kv.has("rho")) cfg.bs_ris.rho = kv.get_f64("rho");
    if (kv.has("paths_ue")) cfg.ris_ue.path_count = kv.get_u64("paths_ue");
    if (kv.has("speed_mps")) cfg.ris_ue.speed_mps = kv.get_f64("speed_mps");
    if (kv.has("carrier_ghz")) {
        double ghz = kv.get_f64("carrier_ghz");
        if (!(ghz > 0)) throw ConfigError("carrier_ghz must be > 0");
        cfg.ris_ue.wavelength_m = 299792458.0 / (ghz * 1e9);
    }
    if (kv.has("dt_ms")) cfg.ris_ue.dt_s = kv.get_f64("dt_ms") * 1e-3;
    if (kv.has("episodes")) cfg.episodes = kv.get_u64("episodes");
    if (kv.has("T")) cfg.intervals = kv.get_u64("T");
    if (kv.has("split")) {
        unsigned tr = 0, va = 0, te = 0;
        if (std::sscanf(kv.get("split")->c_str(), "%u:%u:%u", &tr, &va, &te) != 3 ||
            tr + va + te == 0) {
            throw ConfigError("split must look like 8:1:1");
        }
        cfg.split = SplitRatio{tr, va, te};
    }
    if (kv.has("seed")) cfg.seed = kv.get_u64("seed");
    if (kv.has("gamma1")) cfg.gamma1 = kv.get_f64("gamma1");
    if (kv.has("gamma2")) cfg.gamma2 = kv.get_f64("gamma2");
    if (kv.has("n_s1")) cfg.n_s1 = kv.get_u64("n_s1");
    if (kv.has("n_s2")) cfg.n_s2 = kv.get_u64("n_s2");
    if (kv.has("n_q")) cfg.n_q = static_cast<int>(kv.get_i64("n_q"));
    if (kv.has("method")) cfg.method = parse_method(*kv.get("method"));
    if (kv.has("dataset")) cfg.dataset_path = *kv.get("dataset");
    if (kv.has("out")) cfg.out_dir = *kv.get("out");
    if (kv.has("ae1_epochs")) cfg.ae1_train.epochs = kv.get_u64("ae1_epochs");
    if (kv.has("ae1_batch")) cfg.ae1_train.batch_size = kv.get_u64("ae1_batch");
    if (kv.has("ae2_epochs")) cfg.ae2_train.epochs = kv.get_u64("ae2_epochs");
    if (kv.has("ae2_batch")) cfg.ae2_train.batch_size = kv.get_u64("ae2_batch");
    if (kv.has("lr_initial")) {
        cfg.ae1_train.lr_initial = cfg.ae2_train.lr_initial =
            kv.get_f64("lr_initial");
    }
    if (kv.has("lr_final")) {
        cfg.ae1_train.lr_final = cfg.ae2_train.lr_final = kv.get_f64("lr_final");
    }
    if (kv.has("patience")) {
        cfg.ae1_train.plateau_patience = cfg.ae2_train.plateau_patience =
            kv.get_u64("patience");
    }
    if (kv.has("sweep_gamma1")) {
        cfg.sweep_gamma1 = parse_list<double>(
            *kv.get("sweep_gamma1"), [](const std::string& s) { return std::stod(s); },
            "sweep_gamma1");
    }
    if (kv.has("sweep_gamma2")) {
        cfg.sweep_gamma2 = parse_list<double>(
            *kv.get("sweep_gamma2"), [](const std::string& s) { return std::stod(s); },
            "sweep_gamma2");
    }
    if (kv.has("sweep_T")) {
        cfg.sweep_intervals = parse_list<size_t>(
            *kv.get("sweep_T"),
            [](const std::string& s) { return static_cast<size_t>(std::stoull(s)); },
            "sweep_T");
    }
    if (kv.has("seeds")) {
        cfg.sweep_seeds = parse_list<uint64_t>(
            *kv.get("seeds"),
            [](const std::string& s) { return std::stoull(s); }, "seeds");
    }
    cfg.validate();
    return cfg;
}

KvFile ExperimentConfig::to_kv() const {
    KvFile kv;
    kv.set("version", kProjectVersion);
    kv.set_u64("n_t", geometry.n_t);
    kv.set_u64("ris_rows", geometry.n1);
    kv.set_u64("ris_cols", geometry.n2);
    kv.set_f64("spacing", geometry.spacing);
    kv.set_u64("paths_bs", bs_ris.path_count);
    kv.set_f64("rho", bs_ris.rho);
    kv.set_u64("paths_ue", ris_ue.path_count);
    kv.set_f64("speed_mps", ris_ue.speed_mps);
    kv.set_f64("wavelength_m", ris_ue.wavelength_m);
    kv.set_f64("dt_ms", ris_ue.dt_s * 1e3);
    kv.set_u64("episodes", episodes);
    kv.set_u64("T", intervals);
    kv.set("split", std::to_string(split.train) + ":" + std::to_string(split.val) +
                        ":" + std::to_string(split.test));
    kv.set_u64("seed", seed);
    kv.set_f64("gamma1", gamma1);
    kv.set_f64("gamma2", gamma2);
    kv.set_u64("n_s1", resolved_n_s1());
    kv.set_u64("n_s2", resolved_n_s2());
    kv.set_i64("n_q", n_q);
    kv.set("method", method_name(method));
    kv.set("dataset", dataset_path);
    kv.set("out", out_dir);
    kv.set_u64("ae1_epochs", ae1_train.epochs);
    kv.set_u64("ae1_batch", ae1_train.batch_size);
    kv.set_u64("ae2_epochs", ae2_train.epochs);
    kv.set_u64("ae2_batch", ae2_train.batch_size);
    kv.set_f64("lr_initial", ae1_train.lr_initial);
    kv.set_f64("lr_final", ae1_train.lr_final);
    kv.set_u64("patience", ae1_train.plateau_patience);
    return kv;
}

DatasetConfig ExperimentConfig::dataset_config() const {
    DatasetConfig dc;
    dc.geometry = geometry;
    dc.bs_ris = bs_ris;
    dc.ris_ue = ris_ue;
    dc.episodes = episodes;
    dc.intervals = intervals;
    dc.split = split;
    dc.seed = seed;
    return dc;
}

}  // namespace rcsf
