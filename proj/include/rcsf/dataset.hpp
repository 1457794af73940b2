#pragma once

#include <span>
#include <string>
#include <vector>

#include "rcsf/channel.hpp"

namespace rcsf {

struct SplitRatio {
    unsigned train = 8;
    unsigned val = 1;
    unsigned test = 1;

    unsigned total() const { return train + val + test; }
};

struct DatasetConfig {
    ArrayGeometry geometry;
    BsRisParams bs_ris;
    RisUeParams ris_ue;
    size_t episodes = 20000;
    size_t intervals = 9;  // T: ratio intervals per large timescale
    SplitRatio split;
    uint64_t seed = 1;

    void validate() const;
};

/// One large timescale: T+1 cascaded channels sharing a single BS-RIS draw.
struct Episode {
    std::vector<CMat> h;  // h[t], t = 0..T
};

struct EpisodeDataset {
    ArrayGeometry geometry;
    size_t intervals = 0;  // T
    uint64_t seed = 0;
    SplitRatio split;
    std::vector<Episode> episodes;

    size_t train_count() const;
    size_t val_count() const;
    std::span<const Episode> train_view() const;
    std::span<const Episode> val_view() const;
    std::span<const Episode> test_view() const;
};

/// Episode e draws its AR innovation from substream 2e and its RIS-UE paths
/// from substream 2e+1 of the config seed, so generation order is
/// immaterial. B evolves once per episode boundary and is constant inside.
EpisodeDataset gen_dataset(const DatasetConfig& config);

/// Binary layout (little-endian): magic "RCSF", u32 version, u32 n_ris,
/// u32 n_t, u32 T, u32 episode count, u64 seed; then per episode, per
/// interval, the channel matrix row-major as interleaved (re, im) f64.
/// A key-value sidecar `<path>.meta` carries the generation parameters.
void save_dataset(const EpisodeDataset& ds, const std::string& path);
EpisodeDataset load_dataset(const std::string& path);

constexpr uint32_t kDatasetFormatVersion = 1;

}  // namespace rcsf
