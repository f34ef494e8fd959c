#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rotkit::toml {

/// Minimal TOML document model covering the subset this project writes and
/// reads: nested tables, strings, booleans, numbers and flat arrays of
/// numbers or strings. Not a general TOML implementation.
class Table {
public:
    void set_number(const std::string& key, double v, bool integral = false) {
        auto& item = items_[key];
        item.kind = Kind::Number;
        item.num = v;
        item.integral = integral;
    }
    void set_int(const std::string& key, std::int64_t v) {
        set_number(key, static_cast<double>(v), true);
    }
    void set_bool(const std::string& key, bool v) {
        auto& item = items_[key];
        item.kind = Kind::Bool;
        item.flag = v;
    }
    void set_string(const std::string& key, std::string v) {
        auto& item = items_[key];
        item.kind = Kind::String;
        item.str = std::move(v);
    }
    void set_array(const std::string& key, std::vector<double> v) {
        auto& item = items_[key];
        item.kind = Kind::NumberArray;
        item.nums = std::move(v);
    }
    void set_string_array(const std::string& key, std::vector<std::string> v) {
        auto& item = items_[key];
        item.kind = Kind::StringArray;
        item.strs = std::move(v);
    }

    Table& table(const std::string& key) {
        auto& item = items_[key];
        if (item.kind != Kind::Child) {
            item.kind = Kind::Child;
            item.child = std::make_shared<Table>();
        }
        return *item.child;
    }

    bool has(const std::string& key) const { return items_.count(key) > 0; }
    bool has_table(const std::string& key) const {
        auto it = items_.find(key);
        return it != items_.end() && it->second.kind == Kind::Child;
    }
    const Table& table(const std::string& key) const {
        auto it = items_.find(key);
        if (it == items_.end() || it->second.kind != Kind::Child)
            throw std::runtime_error("toml: missing table '" + key + "'");
        return *it->second.child;
    }

    double number(const std::string& key) const {
        return expect(key, Kind::Number).num;
    }
    double number_or(const std::string& key, double fallback) const {
        auto it = items_.find(key);
        return (it != items_.end() && it->second.kind == Kind::Number) ? it->second.num
                                                                       : fallback;
    }
    std::int64_t integer(const std::string& key) const {
        return static_cast<std::int64_t>(expect(key, Kind::Number).num);
    }
    std::int64_t integer_or(const std::string& key, std::int64_t fallback) const {
        auto it = items_.find(key);
        return (it != items_.end() && it->second.kind == Kind::Number)
                   ? static_cast<std::int64_t>(it->second.num)
                   : fallback;
    }
    bool boolean_or(const std::string& key, bool fallback) const {
        auto it = items_.find(key);
        return (it != items_.end() && it->second.kind == Kind::Bool) ? it->second.flag
                                                                     : fallback;
    }
    std::string string_or(const std::string& key, const std::string& fallback) const {
        auto it = items_.find(key);
        return (it != items_.end() && it->second.kind == Kind::String) ? it->second.str
                                                                       : fallback;
    }
    const std::vector<double>& array(const std::string& key) const {
        return expect(key, Kind::NumberArray).nums;
    }
    std::vector<double> array_or(const std::string& key,
                                 std::vector<double> fallback) const {
        auto it = items_.find(key);
        return (it != items_.end() && it->second.kind == Kind::NumberArray)
                   ? it->second.nums
                   : std::move(fallback);
    }
    std::vector<std::string> string_array_or(const std::string& key,
                                             std::vector<std::string> fallback) const {
        auto it = items_.find(key);
        if (it == items_.end()) return fallback;
        if (it->second.kind == Kind::StringArray) return it->second.strs;
        if (it->second.kind == Kind::String) return {it->second.str};
        return fallback;
    }

    std::string serialize() const {
        std::ostringstream out;
        write(out, "");
        return out.str();
    }

    static Table parse(const std::string& text);
    static Table parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("toml: cannot open " + path);
        std::ostringstream buf;
        buf << in.rdbuf();
        return parse(buf.str());
    }
    void save_file(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("toml: cannot write " + path);
        out << serialize();
    }

private:
    enum class Kind { Number, Bool, String, NumberArray, StringArray, Child };

    struct Item {
        Kind kind = Kind::Number;
        double num = 0.0;
        bool integral = false;
        bool flag = false;
        std::string str;
        std::vector<double> nums;
        std::vector<std::string> strs;
        std::shared_ptr<Table> child;
    };

    const Item& expect(const std::string& key, Kind kind) const {
        auto it = items_.find(key);
        if (it == items_.end() || it->second.kind != kind)
            throw std::runtime_error("toml: missing or mistyped key '" + key + "'");
        return it->second;
    }

    static std::string format_number(double v, bool integral) {
        std::ostringstream out;
        if (integral) {
            out << static_cast<std::int64_t>(v);
        } else {
            out.precision(17);
            out << v;
            if (out.str().find_first_of(".eE") == std::string::npos) out << ".0";
        }
        return out.str();
    }

    void write(std::ostringstream& out, const std::string& prefix) const {
        for (const auto& [key, item] : items_) {
            if (item.kind == Kind::Child) continue;
            out << key << " = ";
            switch (item.kind) {
                case Kind::Number: out << format_number(item.num, item.integral); break;
                case Kind::Bool: out << (item.flag ? "true" : "false"); break;
                case Kind::String: out << '"' << item.str << '"'; break;
                case Kind::NumberArray: {
                    out << '[';
                    for (std::size_t i = 0; i < item.nums.size(); ++i) {
                        if (i) out << ", ";
                        out << format_number(item.nums[i], false);
                    }
                    out << ']';
                    break;
                }
                case Kind::StringArray: {
                    out << '[';
                    for (std::size_t i = 0; i < item.strs.size(); ++i) {
                        if (i) out << ", ";
                        out << '"' << item.strs[i] << '"';
                    }
                    out << ']';
                    break;
                }
                case Kind::Child: break;
            }
            out << '\n';
        }
        for (const auto& [key, item] : items_) {
            if (item.kind != Kind::Child) continue;
            const std::string path = prefix.empty() ? key : prefix + "." + key;
            out << "\n[" << path << "]\n";
            item.child->write(out, path);
        }
    }

    std::map<std::string, Item> items_;
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

inline std::vector<std::string> split_path(const std::string& path) {
    std::vector<std::string> parts;
    std::stringstream ss(path);
    std::string part;
    while (std::getline(ss, part, '.')) parts.push_back(trim(part));
    return parts;
}

inline void parse_scalar(Table& table, const std::string& key, const std::string& raw) {
    if (raw.empty()) throw std::runtime_error("toml: empty value for '" + key + "'");
    if (raw.front() == '"') {
        if (raw.size() < 2 || raw.back() != '"')
            throw std::runtime_error("toml: unterminated string for '" + key + "'");
        table.set_string(key, raw.substr(1, raw.size() - 2));
        return;
    }
    if (raw == "true" || raw == "false") {
        table.set_bool(key, raw == "true");
        return;
    }
    if (raw.front() == '[') {
        if (raw.back() != ']')
            throw std::runtime_error("toml: unterminated array for '" + key + "'");
        const std::string body = trim(raw.substr(1, raw.size() - 2));
        std::vector<double> nums;
        std::vector<std::string> strs;
        bool is_string = false;
        std::size_t pos = 0;
        while (pos < body.size()) {
            std::size_t comma = body.find(',', pos);
            if (comma == std::string::npos) comma = body.size();
            const std::string elem = trim(body.substr(pos, comma - pos));
            if (!elem.empty()) {
                if (elem.front() == '"') {
                    is_string = true;
                    strs.push_back(elem.substr(1, elem.size() - 2));
                } else {
                    nums.push_back(std::stod(elem));
                }
            }
            pos = comma + 1;
        }
        if (is_string)
            table.set_string_array(key, std::move(strs));
        else
            table.set_array(key, std::move(nums));
        return;
    }
    const bool integral = raw.find_first_of(".eE") == std::string::npos;
    std::size_t consumed = 0;
    const double value = std::stod(raw, &consumed);
    if (consumed != raw.size())
        throw std::runtime_error("toml: malformed number '" + raw + "'");
    table.set_number(key, value, integral);
}

}  // namespace detail

inline Table Table::parse(const std::string& text) {
    Table root;
    Table* current = &root;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        line = detail::trim(detail::strip_comment(line));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::runtime_error("toml: malformed table header: " + line);
            current = &root;
            for (const auto& part : detail::split_path(line.substr(1, line.size() - 2)))
                current = &current->table(part);
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("toml: expected key = value: " + line);
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        detail::parse_scalar(*current, key, value);
    }
    return root;
}

}  // namespace rotkit::toml
