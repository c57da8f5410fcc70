#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace skelgen {

// Flat "key = value" text: one pair per line, '#' starts a comment.
class KeyValues {
public:
    static KeyValues parse(const std::string& text, const std::string& origin = "<string>");
    static KeyValues load(const std::filesystem::path& path);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key, long long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    // Keys that were present but never read through a getter.
    std::vector<std::string> unused_keys() const;

    std::string to_string() const;
    const std::map<std::string, std::string>& entries() const { return values_; }

private:
    std::map<std::string, std::string> values_;
    std::string origin_;
    mutable std::map<std::string, bool> read_;

    const std::string* find(const std::string& key) const;
};

}  // namespace skelgen
