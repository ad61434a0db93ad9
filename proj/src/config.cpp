#include <swarmbo/config.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace swarmbo {

std::string trim(std::string_view text)
{
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos)
        return {};
    const auto last = text.find_last_not_of(" \t\r\n");
    return std::string(text.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view text, char sep)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        out.push_back(trim(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return out;
}

double parse_double(std::string_view text)
{
    const std::string s = trim(text);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        throw ContractViolation("expected a real number, got '" + s + "'");
    return value;
}

std::int64_t parse_int(std::string_view text)
{
    const std::string s = trim(text);
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        throw ContractViolation("expected an integer, got '" + s + "'");
    return value;
}

std::string format_double(double value)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

std::string hash_hex(std::string_view text)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

KeyValueConfig KeyValueConfig::parse(std::istream& in)
{
    KeyValueConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        const std::string body = trim(line);
        if (body.empty())
            continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw ContractViolation("config line " + std::to_string(lineno) + ": expected 'key = value'");
        std::string key = trim(std::string_view(body).substr(0, eq));
        if (key.empty())
            throw ContractViolation("config line " + std::to_string(lineno) + ": empty key");
        cfg.values_[key].push_back(trim(std::string_view(body).substr(eq + 1)));
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::parse(std::string_view text)
{
    std::istringstream in{std::string(text)};
    return parse(in);
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ContractViolation("cannot open config file " + path.string());
    return parse(in);
}

const std::vector<std::string>& KeyValueConfig::all(const std::string& key) const
{
    static const std::vector<std::string> empty;
    const auto it = values_.find(key);
    return it == values_.end() ? empty : it->second;
}

const std::string& KeyValueConfig::last(const std::string& key) const
{
    return values_.at(key).back();
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const
{
    return has(key) ? last(key) : fallback;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const
{
    if (!has(key))
        return fallback;
    try {
        return parse_double(last(key));
    }
    catch (const ContractViolation& e) {
        throw ContractViolation("config key '" + key + "': " + e.what());
    }
}

std::int64_t KeyValueConfig::get_int(const std::string& key, std::int64_t fallback) const
{
    if (!has(key))
        return fallback;
    try {
        return parse_int(last(key));
    }
    catch (const ContractViolation& e) {
        throw ContractViolation("config key '" + key + "': " + e.what());
    }
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const
{
    if (!has(key))
        return fallback;
    const auto& v = last(key);
    if (v == "true" || v == "1" || v == "yes")
        return true;
    if (v == "false" || v == "0" || v == "no")
        return false;
    throw ContractViolation("config key '" + key + "': expected a boolean, got '" + v + "'");
}

std::vector<std::string> KeyValueConfig::keys() const
{
    std::vector<std::string> out;
    for (const auto& [k, v] : values_)
        out.push_back(k);
    return out;
}

} // namespace swarmbo
