#include <doctest.h>

#include <filesystem>
#include <unistd.h>

#include "rcsf/binio.hpp"
#include "rcsf/codec.hpp"
#include "rcsf/dataset.hpp"

using namespace rcsf;

namespace {

DatasetConfig small_config(uint64_t seed) {
    DatasetConfig cfg;
    cfg.geometry = {.n_t = 3, .n1 = 2, .n2 = 2};
    cfg.bs_ris = {.path_count = 2, .rho = 0.9};
    cfg.ris_ue = {.path_count = 2};
    cfg.episodes = 20;
    cfg.intervals = 3;
    cfg.seed = seed;
    return cfg;
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("rcsf_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string file(const std::string& name) const {
        return (path / name).string();
    }
};

}  // namespace

TEST_CASE("gen_dataset shapes, splits and intra-episode stability") {
    DatasetConfig cfg = small_config(5);
    EpisodeDataset ds = gen_dataset(cfg);

    REQUIRE(ds.episodes.size() == cfg.episodes);
    CHECK(ds.train_view().size() == 16);
    CHECK(ds.val_view().size() == 2);
    CHECK(ds.test_view().size() == 2);

    for (const Episode& ep : ds.episodes) {
        REQUIRE(ep.h.size() == cfg.intervals + 1);
        for (const CMat& h : ep.h) {
            CHECK(h.rows == cfg.geometry.n_ris());
            CHECK(h.cols == cfg.geometry.n_t);
            CHECK(all_finite(h));
        }
    }

    // B stable inside the episode: extract_ratio recovers a_i(t)/a_i(0),
    // so reapplying it to row 0 of H(0) reproduces H(t) exactly.
    for (const Episode& ep : ds.episodes) {
        for (size_t t = 1; t < ep.h.size(); ++t) {
            RatioVector r = extract_ratio(ep.h[0], ep.h[t]);
            CMat rebuilt = reconstruct_from_ratio(ep.h[0], r);
            double err = 0.0, ref = 0.0;
            for (size_t i = 0; i < rebuilt.data.size(); ++i) {
                err += std::norm(rebuilt.data[i] - ep.h[t].data[i]);
                ref += std::norm(ep.h[t].data[i]);
            }
            CHECK(err <= 1e-20 * ref);
        }
    }
}

TEST_CASE("gen_dataset with T=0 degenerates to single-channel episodes") {
    DatasetConfig cfg = small_config(6);
    cfg.intervals = 0;
    EpisodeDataset ds = gen_dataset(cfg);
    for (const Episode& ep : ds.episodes) CHECK(ep.h.size() == 1);
}

TEST_CASE("gen_dataset is deterministic in the seed") {
    EpisodeDataset a = gen_dataset(small_config(123));
    EpisodeDataset b = gen_dataset(small_config(123));
    EpisodeDataset c = gen_dataset(small_config(124));

    REQUIRE(a.episodes.size() == b.episodes.size());
    bool all_equal = true;
    for (size_t e = 0; e < a.episodes.size(); ++e) {
        for (size_t t = 0; t <= a.intervals; ++t) {
            if (a.episodes[e].h[t].data != b.episodes[e].h[t].data) {
                all_equal = false;
            }
        }
    }
    CHECK(all_equal);
    CHECK(a.episodes[0].h[0].data != c.episodes[0].h[0].data);
}

TEST_CASE("dataset save/load roundtrip is bit-identical") {
    TempDir dir;
    EpisodeDataset ds = gen_dataset(small_config(9));
    std::string path = dir.file("data.rcsf");
    save_dataset(ds, path);

    EpisodeDataset back = load_dataset(path);
    CHECK(back.seed == ds.seed);
    CHECK(back.intervals == ds.intervals);
    CHECK(back.geometry.n1 == ds.geometry.n1);
    CHECK(back.geometry.n2 == ds.geometry.n2);
    REQUIRE(back.episodes.size() == ds.episodes.size());
    for (size_t e = 0; e < ds.episodes.size(); ++e) {
        for (size_t t = 0; t <= ds.intervals; ++t) {
            CHECK(back.episodes[e].h[t].data == ds.episodes[e].h[t].data);
        }
    }

    // Saving the loaded dataset reproduces the file byte for byte.
    std::string path2 = dir.file("data2.rcsf");
    save_dataset(back, path2);
    CHECK(read_file_bytes(path) == read_file_bytes(path2));
}

TEST_CASE("load_dataset rejects bad magic and version") {
    TempDir dir;
    EpisodeDataset ds = gen_dataset(small_config(2));
    std::string path = dir.file("data.rcsf");
    save_dataset(ds, path);

    auto bytes = read_file_bytes(path);
    auto corrupt_magic = bytes;
    corrupt_magic[0] = 'X';
    std::string bad1 = dir.file("bad1.rcsf");
    write_file_bytes(bad1, corrupt_magic);
    CHECK_THROWS_AS((void)load_dataset(bad1), DecodeError);

    auto corrupt_version = bytes;
    corrupt_version[4] = 0xEE;
    std::string bad2 = dir.file("bad2.rcsf");
    write_file_bytes(bad2, corrupt_version);
    CHECK_THROWS_WITH_AS((void)load_dataset(bad2),
                         doctest::Contains("version"), DecodeError);

    CHECK_THROWS_AS((void)load_dataset(dir.file("missing.rcsf")), IoError);
}
