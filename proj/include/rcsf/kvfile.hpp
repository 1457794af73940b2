#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rcsf {

/// Ordered `key = value` text file ('#' starts a comment). Used for config
/// files, dataset sidecars, and run manifests. Doubles are written with 17
/// significant digits so a read-back reproduces the exact bits.
class KvFile {
public:
    void set(const std::string& key, const std::string& value);
    void set_u64(const std::string& key, uint64_t value);
    void set_i64(const std::string& key, int64_t value);
    void set_f64(const std::string& key, double value);

    bool has(const std::string& key) const;
    std::optional<std::string> get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& fallback) const;
    uint64_t get_u64(const std::string& key) const;
    int64_t get_i64(const std::string& key) const;
    double get_f64(const std::string& key) const;

    const std::vector<std::pair<std::string, std::string>>& entries() const {
        return entries_;
    }

    std::string to_text() const;
    static KvFile from_text(const std::string& text);

    void save(const std::string& path) const;
    static KvFile load(const std::string& path);

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

std::string format_f64(double v);

}  // namespace rcsf
