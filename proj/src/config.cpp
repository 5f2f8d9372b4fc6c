#include "soec/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <stdexcept>

namespace soec {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

}  // namespace

std::map<std::string, std::string> parse_config_file(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("config: cannot open " + file.string());

    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config: " + file.string() + ":" + std::to_string(lineno) +
                                     ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const std::string val = trim(t.substr(eq + 1));
        if (key.empty() || val.empty())
            throw std::runtime_error("config: " + file.string() + ":" + std::to_string(lineno) +
                                     ": empty key or value");
        if (kv.count(key))
            throw std::runtime_error("config: " + file.string() + ":" + std::to_string(lineno) +
                                     ": duplicate key '" + key + "'");
        kv[key] = val;
    }
    return kv;
}

double config_double(const std::map<std::string, std::string>& kv, const std::string& key,
                     double fallback) {
    const auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    const std::string& s = it->second;
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw std::invalid_argument("config: value of '" + key + "' is not a number: " + s);
    return out;
}

std::string config_string(const std::map<std::string, std::string>& kv, const std::string& key,
                          const std::string& fallback) {
    const auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
}

}  // namespace soec
