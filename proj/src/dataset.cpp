#include "rcsf/dataset.hpp"

#include "rcsf/binio.hpp"
#include "rcsf/kvfile.hpp"

namespace rcsf {

namespace {
constexpr char kMagic[4] = {'R', 'C', 'S', 'F'};
}

void DatasetConfig::validate() const {
    geometry.validate();
    bs_ris.validate();
    ris_ue.validate();
    if (episodes < 1) throw DomainError("DatasetConfig: episodes must be >= 1");
    if (split.total() == 0) throw DomainError("DatasetConfig: empty split ratio");
}

size_t EpisodeDataset::train_count() const {
    return episodes.size() * split.train / split.total();
}

size_t EpisodeDataset::val_count() const {
    return episodes.size() * split.val / split.total();
}

std::span<const Episode> EpisodeDataset::train_view() const {
    return {episodes.data(), train_count()};
}

std::span<const Episode> EpisodeDataset::val_view() const {
    return {episodes.data() + train_count(), val_count()};
}

std::span<const Episode> EpisodeDataset::test_view() const {
    size_t used = train_count() + val_count();
    return {episodes.data() + used, episodes.size() - used};
}

EpisodeDataset gen_dataset(const DatasetConfig& config) {
    config.validate();

    EpisodeDataset ds;
    ds.geometry = config.geometry;
    ds.intervals = config.intervals;
    ds.seed = config.seed;
    ds.split = config.split;
    ds.episodes.resize(config.episodes);

    Rng master(config.seed);
    CMat b;
    for (size_t e = 0; e < config.episodes; ++e) {
        Rng innovation_rng = master.substream(2 * e);
        Rng path_rng = master.substream(2 * e + 1);

        if (e == 0) {
            b = gen_bs_ris(config.geometry, config.bs_ris, innovation_rng);
        } else {
            b = evolve_bs_ris(b, config.geometry, config.bs_ris, innovation_rng);
        }

        RisUePaths paths = gen_ris_ue_paths(config.geometry, config.ris_ue, path_rng);
        Episode& ep = ds.episodes[e];
        ep.h.reserve(config.intervals + 1);
        for (size_t t = 0; t <= config.intervals; ++t) {
            ep.h.push_back(cascade(ris_ue_at(paths, t), b));
        }
    }
    return ds;
}

void save_dataset(const EpisodeDataset& ds, const std::string& path) {
    const size_t n_ris = ds.geometry.n_ris();
    const size_t n_t = ds.geometry.n_t;

    std::vector<uint8_t> out;
    out.reserve(32 + ds.episodes.size() * (ds.intervals + 1) * n_ris * n_t * 16);
    out.insert(out.end(), kMagic, kMagic + 4);
    put_u32(out, kDatasetFormatVersion);
    put_u32(out, static_cast<uint32_t>(n_ris));
    put_u32(out, static_cast<uint32_t>(n_t));
    put_u32(out, static_cast<uint32_t>(ds.intervals));
    put_u32(out, static_cast<uint32_t>(ds.episodes.size()));
    put_u64(out, ds.seed);

    for (const Episode& ep : ds.episodes) {
        if (ep.h.size() != ds.intervals + 1) {
            throw DimensionError("save_dataset: episode with wrong interval count");
        }
        for (const CMat& h : ep.h) {
            if (h.rows != n_ris || h.cols != n_t) {
                throw DimensionError("save_dataset: channel with wrong shape");
            }
            if (!all_finite(h)) {
                throw DomainError("save_dataset: non-finite channel entry");
            }
            for (const cplx& v : h.data) {
                put_f64(out, v.real());
                put_f64(out, v.imag());
            }
        }
    }
    write_file_bytes(path, out);

    KvFile meta;
    meta.set_u64("format_version", kDatasetFormatVersion);
    meta.set_u64("seed", ds.seed);
    meta.set_u64("n_t", ds.geometry.n_t);
    meta.set_u64("ris_rows", ds.geometry.n1);
    meta.set_u64("ris_cols", ds.geometry.n2);
    meta.set_f64("spacing", ds.geometry.spacing);
    meta.set_u64("intervals", ds.intervals);
    meta.set_u64("episodes", ds.episodes.size());
    meta.set(
        "split",
        std::to_string(ds.split.train) + ":" + std::to_string(ds.split.val) +
            ":" + std::to_string(ds.split.test));
    meta.save(path + ".meta");
}

EpisodeDataset load_dataset(const std::string& path) {
    std::vector<uint8_t> bytes = read_file_bytes(path);
    ByteReader in(bytes);

    auto magic = in.bytes(4);
    if (!std::equal(magic.begin(), magic.end(), kMagic)) {
        throw DecodeError("not a dataset file (bad magic) [" + path + "]");
    }
    uint32_t version = in.u32();
    if (version != kDatasetFormatVersion) {
        throw DecodeError("unsupported dataset version " +
                          std::to_string(version) + " [" + path + "]");
    }

    EpisodeDataset ds;
    uint32_t n_ris = in.u32();
    uint32_t n_t = in.u32();
    ds.intervals = in.u32();
    uint32_t episodes = in.u32();
    ds.seed = in.u64();

    // Geometry factorization and split come from the sidecar when present.
    ds.geometry.n_t = n_t;
    ds.geometry.n1 = n_ris;
    ds.geometry.n2 = 1;
    try {
        KvFile meta = KvFile::load(path + ".meta");
        ds.geometry.n1 = meta.get_u64("ris_rows");
        ds.geometry.n2 = meta.get_u64("ris_cols");
        if (meta.has("spacing")) ds.geometry.spacing = meta.get_f64("spacing");
        std::string split = meta.get_or("split", "8:1:1");
        unsigned tr = 8, va = 1, te = 1;
        if (std::sscanf(split.c_str(), "%u:%u:%u", &tr, &va, &te) == 3) {
            ds.split = SplitRatio{tr, va, te};
        }
    } catch (const IoError&) {
        // No sidecar: keep defaults.
    }
    if (ds.geometry.n_ris() != n_ris) {
        throw DecodeError("sidecar geometry disagrees with header [" + path + "]");
    }

    ds.episodes.resize(episodes);
    for (Episode& ep : ds.episodes) {
        ep.h.reserve(ds.intervals + 1);
        for (size_t t = 0; t <= ds.intervals; ++t) {
            CMat h(n_ris, n_t);
            for (cplx& v : h.data) {
                double re = in.f64();
                double im = in.f64();
                v = cplx{re, im};
            }
            if (!all_finite(h)) {
                throw DecodeError("non-finite channel entry [" + path + "]");
            }
            ep.h.push_back(std::move(h));
        }
    }
    if (in.remaining() != 0) {
        throw DecodeError("trailing bytes after dataset body [" + path + "]");
    }
    return ds;
}

}  // namespace rcsf
