#include "tracegrowth/config.hpp"

#include "tracegrowth/error.hpp"

#include <boost/algorithm/string/split.hpp>
#include <boost/algorithm/string/trim.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cstdio>
#include <sstream>

namespace tracegrowth::cli {

namespace {

Config flatten(const boost::property_tree::ptree& tree) {
    Config c;
    for (const auto& [section, child] : tree) {
        if (child.empty()) {
            c.set(section, boost::algorithm::trim_copy(child.data()));
            continue;
        }
        for (const auto& [key, leaf] : child) c.set(section + "." + key, boost::algorithm::trim_copy(leaf.data()));
    }
    return c;
}

double parse_number(const std::string& key, const std::string& text) {
    double v = 0.0;
    const char* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end) {
        throw Error(ErrorCode::InvalidConfig, key + ": expected a number, got '" + text + "'");
    }
    return v;
}

} // namespace

Config Config::from_file(const std::string& path) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::read_ini(path, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw Error(ErrorCode::InvalidConfig, e.what());
    }
    return flatten(tree);
}

Config Config::from_string(const std::string& text) {
    boost::property_tree::ptree tree;
    std::istringstream in(text);
    try {
        boost::property_tree::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw Error(ErrorCode::InvalidConfig, e.what());
    }
    return flatten(tree);
}

std::string Config::get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw Error(ErrorCode::InvalidConfig, key + ": missing required key");
    read_.insert(key);
    return it->second;
}

std::string Config::get(const std::string& key, const std::string& fallback) const {
    return has(key) ? get(key) : fallback;
}

double Config::number(const std::string& key) const { return parse_number(key, get(key)); }

double Config::number(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
}

long Config::integer(const std::string& key, long fallback) const {
    if (!has(key)) return fallback;
    const double v = number(key);
    if (v != static_cast<double>(static_cast<long>(v))) {
        throw Error(ErrorCode::InvalidConfig, key + ": expected an integer");
    }
    return static_cast<long>(v);
}

std::vector<double> Config::numbers(const std::string& key) const {
    std::vector<double> out;
    for (const auto& item : list(key)) {
        std::vector<std::string> words;
        boost::algorithm::split(words, item, [](char c) { return c == ' ' || c == '\t'; },
                                boost::algorithm::token_compress_on);
        for (const auto& w : words) {
            if (!w.empty()) out.push_back(parse_number(key, w));
        }
    }
    return out;
}

std::vector<std::string> Config::list(const std::string& key) const {
    std::vector<std::string> out;
    const std::string text = get(key);
    if (boost::algorithm::trim_copy(text).empty()) return out;
    boost::algorithm::split(out, text, [](char c) { return c == ','; });
    for (auto& s : out) boost::algorithm::trim(s);
    return out;
}

std::vector<std::string> Config::unused() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : values_) {
        if (!read_.count(k)) out.push_back(k);
    }
    return out;
}

std::string Config::hash() const {
    std::uint64_t h = 14695981039346656037ull;
    for (const auto& [k, v] : values_) {
        for (char c : k + "=" + v + "\n") {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ull;
        }
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace tracegrowth::cli
