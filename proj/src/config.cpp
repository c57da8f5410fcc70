#include "skelgen/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace skelgen {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

KeyValues KeyValues::parse(const std::string& text, const std::string& origin) {
    KeyValues kv;
    kv.origin_ = origin;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.resize(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
        }
        const auto key = trim(line.substr(0, eq));
        if (key.empty()) {
            throw std::invalid_argument(origin + ":" + std::to_string(lineno) + ": empty key");
        }
        kv.values_[key] = trim(line.substr(eq + 1));
    }
    return kv;
}

KeyValues KeyValues::load(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) {
        throw std::runtime_error("cannot open config file " + path.string());
    }
    std::stringstream ss;
    ss << is.rdbuf();
    return parse(ss.str(), path.string());
}

const std::string* KeyValues::find(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) {
        return nullptr;
    }
    read_[key] = true;
    return &it->second;
}

std::string KeyValues::get_string(const std::string& key, const std::string& fallback) const {
    const auto* v = find(key);
    return v ? *v : fallback;
}

double KeyValues::get_double(const std::string& key, double fallback) const {
    const auto* v = find(key);
    if (!v) {
        return fallback;
    }
    try {
        std::size_t pos = 0;
        const double d = std::stod(*v, &pos);
        if (pos != v->size()) {
            throw std::invalid_argument("trailing characters");
        }
        return d;
    } catch (const std::exception&) {
        throw std::invalid_argument(origin_ + ": key '" + key + "' expects a number, got '" + *v + "'");
    }
}

long long KeyValues::get_int(const std::string& key, long long fallback) const {
    const auto* v = find(key);
    if (!v) {
        return fallback;
    }
    try {
        std::size_t pos = 0;
        const long long i = std::stoll(*v, &pos);
        if (pos != v->size()) {
            throw std::invalid_argument("trailing characters");
        }
        return i;
    } catch (const std::exception&) {
        throw std::invalid_argument(origin_ + ": key '" + key + "' expects an integer, got '" + *v + "'");
    }
}

bool KeyValues::get_bool(const std::string& key, bool fallback) const {
    const auto* v = find(key);
    if (!v) {
        return fallback;
    }
    if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") {
        return true;
    }
    if (*v == "false" || *v == "0" || *v == "no" || *v == "off") {
        return false;
    }
    throw std::invalid_argument(origin_ + ": key '" + key + "' expects true/false, got '" + *v + "'");
}

std::vector<std::string> KeyValues::unused_keys() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : values_) {
        if (!read_.count(k)) {
            out.push_back(k);
        }
    }
    return out;
}

std::string KeyValues::to_string() const {
    std::ostringstream os;
    for (const auto& [k, v] : values_) {
        os << k << " = " << v << '\n';
    }
    return os.str();
}

}  // namespace skelgen
