#include "laftr/run_config.hpp"

#include "laftr/errors.hpp"
#include "laftr/fingerprint.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace laftr::cli {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* expected) {
    throw InputError("config key '" + key + "': expected " + expected + ", got '" + value + "'");
}

}  // namespace

RunConfig RunConfig::parse(std::string_view text, const std::string& origin) {
    RunConfig cfg;
    std::string section;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        auto line = raw;
        if (const auto hash = line.find_first_of("#;"); hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto where = origin + ":" + std::to_string(line_no);
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3) {
                throw InputError(where + ": malformed section header");
            }
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw InputError(where + ": expected 'key = value'");
        }
        const auto key = trim(std::string_view(line).substr(0, eq));
        if (key.empty()) {
            throw InputError(where + ": empty key");
        }
        if (section.empty()) {
            throw InputError(where + ": key '" + key + "' outside any section");
        }
        cfg.values_[section + "." + key] = trim(std::string_view(line).substr(eq + 1));
    }
    return cfg;
}

RunConfig RunConfig::read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputNotFoundError("cannot open config " + path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse(text.str(), path.string());
}

void RunConfig::set(const std::string& key, const std::string& value) {
    if (key.find('.') == std::string::npos) {
        throw InputError("config key '" + key + "' must have the form section.key");
    }
    values_[key] = value;
}

void RunConfig::set_assignment(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) {
        throw InputError("override '" + assignment + "' must have the form section.key=value");
    }
    set(trim(std::string_view(assignment).substr(0, eq)), trim(std::string_view(assignment).substr(eq + 1)));
}

std::string RunConfig::get_string(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double RunConfig::get_double(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) {
        return fallback;
    }
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(it->second.c_str(), &end);
    if (it->second.empty() || *end != '\0' || errno == ERANGE) {
        bad_value(key, it->second, "a number");
    }
    return v;
}

std::uint64_t RunConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) {
        return fallback;
    }
    const auto& s = it->second;
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
        bad_value(key, s, "a nonnegative integer");
    }
    errno = 0;
    const auto v = std::strtoull(s.c_str(), nullptr, 10);
    if (errno == ERANGE) {
        bad_value(key, s, "an integer in range");
    }
    return v;
}

std::size_t RunConfig::get_size(const std::string& key, std::size_t fallback) const {
    return static_cast<std::size_t>(get_u64(key, fallback));
}

bool RunConfig::get_bool(const std::string& key, bool fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) {
        return fallback;
    }
    const auto& s = it->second;
    if (s == "true" || s == "1" || s == "yes") {
        return true;
    }
    if (s == "false" || s == "0" || s == "no") {
        return false;
    }
    bad_value(key, s, "true or false");
}

std::vector<std::string> RunConfig::get_list(const std::string& key, const std::vector<std::string>& fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) {
        return fallback;
    }
    std::vector<std::string> out;
    std::istringstream in(it->second);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

std::vector<double> RunConfig::get_doubles(const std::string& key, const std::vector<double>& fallback) const {
    if (!has(key)) {
        return fallback;
    }
    std::vector<double> out;
    for (const auto& item : get_list(key, {})) {
        char* end = nullptr;
        const double v = std::strtod(item.c_str(), &end);
        if (*end != '\0') {
            bad_value(key, item, "a list of numbers");
        }
        out.push_back(v);
    }
    return out;
}

void RunConfig::check_keys(const std::set<std::string>& known) const {
    for (const auto& [key, value] : values_) {
        if (known.count(key) == 0) {
            throw InputError("unknown config key '" + key + "'");
        }
    }
}

std::string RunConfig::canonical() const {
    std::string out;
    for (const auto& [key, value] : values_) {
        out += key + "=" + value + "\n";
    }
    return out;
}

std::string RunConfig::fingerprint() const { return fingerprint_of(canonical()); }

}  // namespace laftr::cli
