#ifndef SWARMBO_CONFIG_HPP
#define SWARMBO_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace swarmbo {

/// Raised when an input violates a documented contract (bad arity, malformed
/// file, unknown identifier). The CLI maps it to a nonzero exit code.
class ContractViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Flat `key = value` text configuration. Keys may repeat (e.g. one `food`
/// line per source); `#` starts a comment.
class KeyValueConfig {
public:
    static KeyValueConfig parse(std::istream& in);
    static KeyValueConfig parse(std::string_view text);
    static KeyValueConfig load(const std::filesystem::path& path);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    const std::vector<std::string>& all(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    std::vector<std::string> keys() const;

private:
    const std::string& last(const std::string& key) const;
    std::map<std::string, std::vector<std::string>> values_;
};

double parse_double(std::string_view text);
std::int64_t parse_int(std::string_view text);
std::vector<std::string> split(std::string_view text, char sep);
std::string trim(std::string_view text);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

/// FNV-1a over the bytes of `text`; rendered as 16 hex digits.
std::string hash_hex(std::string_view text);

} // namespace swarmbo

#endif
