#include "rcsf/kvfile.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "rcsf/binio.hpp"
#include "rcsf/errors.hpp"

namespace rcsf {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::string format_f64(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void KvFile::set(const std::string& key, const std::string& value) {
    for (auto& [k, v] : entries_) {
        if (k == key) {
            v = value;
            return;
        }
    }
    entries_.emplace_back(key, value);
}

void KvFile::set_u64(const std::string& key, uint64_t value) {
    set(key, std::to_string(value));
}

void KvFile::set_i64(const std::string& key, int64_t value) {
    set(key, std::to_string(value));
}

void KvFile::set_f64(const std::string& key, double value) {
    set(key, format_f64(value));
}

bool KvFile::has(const std::string& key) const {
    for (const auto& [k, v] : entries_) {
        if (k == key) return true;
    }
    return false;
}

std::optional<std::string> KvFile::get(const std::string& key) const {
    for (const auto& [k, v] : entries_) {
        if (k == key) return v;
    }
    return std::nullopt;
}

std::string KvFile::get_or(const std::string& key,
                           const std::string& fallback) const {
    auto v = get(key);
    return v ? *v : fallback;
}

uint64_t KvFile::get_u64(const std::string& key) const {
    auto v = get(key);
    if (!v) throw ConfigError("missing key: " + key);
    char* end = nullptr;
    uint64_t out = std::strtoull(v->c_str(), &end, 10);
    if (end == v->c_str() || *end != '\0') {
        throw ConfigError("key '" + key + "' is not an unsigned integer: " + *v);
    }
    return out;
}

int64_t KvFile::get_i64(const std::string& key) const {
    auto v = get(key);
    if (!v) throw ConfigError("missing key: " + key);
    char* end = nullptr;
    int64_t out = std::strtoll(v->c_str(), &end, 10);
    if (end == v->c_str() || *end != '\0') {
        throw ConfigError("key '" + key + "' is not an integer: " + *v);
    }
    return out;
}

double KvFile::get_f64(const std::string& key) const {
    auto v = get(key);
    if (!v) throw ConfigError("missing key: " + key);
    char* end = nullptr;
    double out = std::strtod(v->c_str(), &end);
    if (end == v->c_str() || *end != '\0') {
        throw ConfigError("key '" + key + "' is not a number: " + *v);
    }
    return out;
}

std::string KvFile::to_text() const {
    std::ostringstream out;
    for (const auto& [k, v] : entries_) {
        out << k << " = " << v << "\n";
    }
    return out.str();
}

KvFile KvFile::from_text(const std::string& text) {
    KvFile kv;
    std::istringstream in(text);
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) +
                              ": expected 'key = value', got: " + line);
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        }
        kv.set(key, value);
    }
    return kv;
}

void KvFile::save(const std::string& path) const {
    write_file_text(path, to_text());
}

KvFile KvFile::load(const std::string& path) {
    try {
        return from_text(read_file_text(path));
    } catch (const ConfigError& e) {
        throw ConfigError(std::string(e.what()) + " [" + path + "]");
    }
}

}  // namespace rcsf
