#pragma once

#include <string>
#include <vector>

#include "rcsf/dataset.hpp"
#include "rcsf/kvfile.hpp"
#include "rcsf/train.hpp"

namespace rcsf {

enum class Method { proposed, baseline };

std::string method_name(Method m);
Method parse_method(const std::string& name);

struct ExperimentConfig {
    ArrayGeometry geometry;
    BsRisParams bs_ris;
    RisUeParams ris_ue;
    size_t episodes = 20000;
    size_t intervals = 9;  // T
    SplitRatio split;
    uint64_t seed = 1;

    // Codeword sizing: explicit n_s1/n_s2 win over the gammas when nonzero.
    double gamma1 = 0.25;
    double gamma2 = 0.25;
    size_t n_s1 = 0;
    size_t n_s2 = 0;
    int n_q = 4;

    Method method = Method::proposed;
    std::string dataset_path;
    std::string out_dir = "out";

    TrainConfig ae1_train{.lr_initial = 1e-3,
                          .lr_final = 1e-4,
                          .batch_size = 64,
                          .epochs = 50,
                          .seed = 1,
                          .plateau_patience = 10};
    TrainConfig ae2_train{.lr_initial = 1e-3,
                          .lr_final = 1e-4,
                          .batch_size = 256,
                          .epochs = 100,
                          .seed = 1,
                          .plateau_patience = 10};

    // Sweep grid; empty lists fall back to the scalar settings above.
    std::vector<double> sweep_gamma1;
    std::vector<double> sweep_gamma2;
    std::vector<size_t> sweep_intervals;
    std::vector<uint64_t> sweep_seeds{1, 2, 3};

    size_t resolved_n_s1() const;
    size_t resolved_n_s2() const;
    void validate() const;

    /// Strict parse: unknown keys are configuration errors.
    static ExperimentConfig from_kv(const KvFile& kv);
    /// Manifest view of every effective setting.
    KvFile to_kv() const;

    DatasetConfig dataset_config() const;
};

constexpr const char* kProjectVersion = "0.1.0";

}  // namespace rcsf
