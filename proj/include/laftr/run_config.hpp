#pragma once

// Declarative run configuration: an INI-style text file of `[section]`
// headers and `key = value` lines, addressed as "section.key". Command-line
// overrides are applied on top with set().

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace laftr::cli {

class RunConfig {
public:
    /// `origin` names the source in error messages.
    static RunConfig parse(std::string_view text, const std::string& origin = "config");
    static RunConfig read(const std::filesystem::path& path);

    void set(const std::string& key, const std::string& value);
    /// "section.key=value"
    void set_assignment(const std::string& assignment);

    bool has(const std::string& key) const { return values_.count(key) > 0; }
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::size_t get_size(const std::string& key, std::size_t fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    /// Comma-separated list; empty entries are dropped.
    std::vector<std::string> get_list(const std::string& key, const std::vector<std::string>& fallback) const;
    std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;

    /// InputError naming the first key not in `known`.
    void check_keys(const std::set<std::string>& known) const;

    /// Sorted "key=value" lines; the fingerprint hashes this text.
    std::string canonical() const;
    std::string fingerprint() const;
    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

}  // namespace laftr::cli
