#include "rcsf/golden.hpp"

#include <filesystem>
#include <sstream>

#include "rcsf/binio.hpp"
#include "rcsf/codec.hpp"
#include "rcsf/kvfile.hpp"
#include "rcsf/protocol.hpp"

namespace rcsf {

namespace {

std::vector<uint8_t> golden_frames() {
    // FULL frame: eight 4-bit codeword elements at t = 0.
    std::vector<double> full_values{0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0,
                                    0.5, 0.2,       0.8,       0.05};
    FeedbackMessage full;
    full.kind = FrameKind::full;
    full.t = 0;
    full.payload = pack_bits(quantize(full_values, 4), 4);
    full.payload_bits = 32;

    // RATIO frame: three elements at t = 1 (12 bits, padded to 2 bytes).
    std::vector<double> ratio_values{0.9, 0.1, 0.5};
    FeedbackMessage ratio;
    ratio.kind = FrameKind::ratio;
    ratio.t = 1;
    ratio.payload = pack_bits(quantize(ratio_values, 4), 4);
    ratio.payload_bits = 12;

    std::vector<uint8_t> out = serialize_frame(full);
    std::vector<uint8_t> second = serialize_frame(ratio);
    out.insert(out.end(), second.begin(), second.end());
    return out;
}

std::string golden_quantizer_table() {
    std::ostringstream out;
    out << "n_q,value,index,dequantized\n";
    const std::vector<double> probes{0.0, 0.05, 1.0 / 3.0, 0.5, 0.9, 1.0};
    for (int n_q : {1, 2, 4, 8}) {
        auto idx = quantize(probes, n_q);
        auto deq = dequantize(idx, n_q);
        for (size_t i = 0; i < probes.size(); ++i) {
            out << n_q << ',' << format_f64(probes[i]) << ',' << idx[i] << ','
                << format_f64(deq[i]) << "\n";
        }
    }
    return out.str();
}

std::string golden_ratio_chain() {
    // Fixed anchor and evolved channel; the table pins extract_ratio and
    // reconstruct_from_ratio outputs entry by entry.
    CMat h0(2, 2);
    h0(0, 0) = cplx{1.0, 0.0};
    h0(0, 1) = cplx{0.0, 1.0};
    h0(1, 0) = cplx{0.5, -0.5};
    h0(1, 1) = cplx{-1.0, 0.25};

    CMat ht(2, 2);
    const cplx r0{0.8, 0.6};    // |r0| = 1
    const cplx r1{-0.5, 1.25};
    for (size_t k = 0; k < 2; ++k) {
        ht(0, k) = r0 * h0(0, k);
        ht(1, k) = r1 * h0(1, k);
    }

    RatioVector p = extract_ratio(h0, ht);
    CMat rebuilt = reconstruct_from_ratio(h0, p);

    std::ostringstream out;
    out << "table,row,col,re,im\n";
    auto emit_mat = [&out](const char* name, const CMat& m) {
        for (size_t i = 0; i < m.rows; ++i) {
            for (size_t k = 0; k < m.cols; ++k) {
                out << name << ',' << i << ',' << k << ','
                    << format_f64(m(i, k).real()) << ','
                    << format_f64(m(i, k).imag()) << "\n";
            }
        }
    };
    emit_mat("h0", h0);
    emit_mat("ht", ht);
    for (size_t i = 0; i < p.size(); ++i) {
        out << "ratio," << i << ",0," << format_f64(p.p[i].real()) << ','
            << format_f64(p.p[i].imag()) << "\n";
    }
    emit_mat("rebuilt", rebuilt);
    return out.str();
}

struct GoldenFile {
    const char* name;
    std::vector<uint8_t> bytes;
};

std::vector<GoldenFile> compute_golden() {
    std::vector<GoldenFile> files;
    files.push_back({"frames.bin", golden_frames()});
    std::string q = golden_quantizer_table();
    files.push_back({"quantizer.csv", {q.begin(), q.end()}});
    std::string r = golden_ratio_chain();
    files.push_back({"ratio_chain.csv", {r.begin(), r.end()}});
    return files;
}

}  // namespace

void emit_golden(const std::string& dir) {
    std::filesystem::create_directories(dir);
    for (const GoldenFile& f : compute_golden()) {
        write_file_bytes(dir + "/" + f.name, f.bytes);
    }
}

void verify_golden(const std::string& dir) {
    for (const GoldenFile& f : compute_golden()) {
        std::string path = dir + "/" + f.name;
        std::vector<uint8_t> on_disk;
        try {
            on_disk = read_file_bytes(path);
        } catch (const IoError&) {
            throw VerificationError("golden file missing: " + path);
        }
        if (on_disk != f.bytes) {
            throw VerificationError("golden file mismatch: " + path);
        }
    }
}

}  // namespace rcsf
