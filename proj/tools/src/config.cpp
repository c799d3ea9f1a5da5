#include "collage/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace collage::cli {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Drops a trailing comment, leaving '#' inside double quotes alone.
std::string_view strip_comment(std::string_view line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

struct RawValue {
    std::string text;
    int line;
};

std::string unquote(const RawValue& v, std::string_view key) {
    const std::string_view t = v.text;
    if (t.size() < 2 || t.front() != '"' || t.back() != '"')
        throw ConfigError("value of '" + std::string(key) + "' must be a quoted string", v.line);
    return std::string(t.substr(1, t.size() - 2));
}

Expression as_expression(const RawValue& v, std::string_view key) {
    const std::string src = unquote(v, key);
    try {
        return parse(src);
    } catch (const ParseError& e) {
        throw ConfigError("expression for '" + std::string(key) + "': " + e.what(), v.line);
    }
}

double as_real(const RawValue& v, std::string_view key) {
    if (!v.text.empty() && v.text.front() == '"') {
        const Expression e = as_expression(v, key);
        try {
            return e.evaluate(0.0);
        } catch (const EvalError& err) {
            throw ConfigError("constant '" + std::string(key) + "': " + err.what(), v.line);
        }
    }
    double out = 0.0;
    const char* first = v.text.data();
    const char* last = first + v.text.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last || first == last)
        throw ConfigError("malformed real for '" + std::string(key) + "': " + v.text, v.line);
    return out;
}

int as_int(const RawValue& v, std::string_view key) {
    int out = 0;
    const char* first = v.text.data();
    const char* last = first + v.text.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last || first == last)
        throw ConfigError("malformed integer for '" + std::string(key) + "': " + v.text, v.line);
    return out;
}

std::vector<RawValue> as_list(const RawValue& v, std::string_view key) {
    const std::string_view t = v.text;
    if (t.size() < 2 || t.front() != '[' || t.back() != ']')
        throw ConfigError("value of '" + std::string(key) + "' must be a bracketed list", v.line);
    std::vector<RawValue> items;
    const std::string_view body = trim(t.substr(1, t.size() - 2));
    if (body.empty()) return items;
    std::size_t start = 0;
    for (;;) {
        const auto comma = body.find(',', start);
        const std::string_view item = trim(body.substr(start, comma == std::string_view::npos ? body.npos : comma - start));
        if (item.empty()) throw ConfigError("empty element in list '" + std::string(key) + "'", v.line);
        items.push_back({std::string(item), v.line});
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return items;
}

std::string as_string(const RawValue& v) {
    if (v.text.size() >= 2 && v.text.front() == '"' && v.text.back() == '"')
        return v.text.substr(1, v.text.size() - 2);
    return v.text;
}

const std::set<std::string, std::less<>> kKnownKeys{
    "lambda1", "lambda2", "alpha1", "alpha2", "beta1", "beta2", "f", "g", "exact_u", "exact_v",
    "m", "targets", "n", "box", "mode", "grid", "out", "plot", "command"};

const std::vector<std::string> kRequiredKeys{"lambda1", "lambda2", "alpha1", "alpha2",
                                              "beta1", "beta2", "f", "g"};

}  // namespace

void RunConfig::validate() const {
    try {
        spec.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (m_list.empty()) throw ConfigError("m-list must not be empty");
    if (targets.empty()) throw ConfigError("target list must not be empty");
    for (int m : m_list)
        if (m < 1 || m > 256) throw ConfigError("m = " + std::to_string(m) + " outside [1,256]");
    for (int m : targets)
        if (m < 1 || m > 256) throw ConfigError("target m = " + std::to_string(m) + " outside [1,256]");
    if (n < 1 || n > 256) throw ConfigError("n must be in [1,256]");
    if (grid < 2) throw ConfigError("grid must be at least 2");
    if (!(box.lambda1_min < box.lambda1_max) || !(box.lambda2_min < box.lambda2_max))
        throw ConfigError("box must satisfy min < max on each axis");
}

RunConfig parse_config(std::string_view text) {
    std::map<std::string, RawValue, std::less<>> values;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = trim(strip_comment(raw));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", line_no);
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) throw ConfigError("missing key before '='", line_no);
        if (!kKnownKeys.contains(key)) throw ConfigError("unknown key '" + key + "'", line_no);
        if (value.empty()) throw ConfigError("missing value for '" + key + "'", line_no);
        if (values.contains(key)) throw ConfigError("duplicate key '" + key + "'", line_no);
        values.emplace(key, RawValue{value, line_no});
    }
    for (const std::string& key : kRequiredKeys)
        if (!values.contains(key)) throw ConfigError("missing required key '" + key + "'");

    RunConfig cfg;
    auto get = [&](std::string_view key) -> const RawValue* {
        const auto it = values.find(key);
        return it == values.end() ? nullptr : &it->second;
    };

    cfg.spec.lambda1 = as_real(*get("lambda1"), "lambda1");
    cfg.spec.lambda2 = as_real(*get("lambda2"), "lambda2");
    cfg.spec.alpha1 = as_real(*get("alpha1"), "alpha1");
    cfg.spec.alpha2 = as_real(*get("alpha2"), "alpha2");
    cfg.spec.beta1 = as_real(*get("beta1"), "beta1");
    cfg.spec.beta2 = as_real(*get("beta2"), "beta2");
    cfg.spec.f = as_expression(*get("f"), "f");
    cfg.spec.g = as_expression(*get("g"), "g");
    if (const RawValue* v = get("exact_u")) cfg.spec.exact_u = as_expression(*v, "exact_u");
    if (const RawValue* v = get("exact_v")) cfg.spec.exact_v = as_expression(*v, "exact_v");

    auto int_list = [&](std::string_view key, std::vector<int>& dst) {
        if (const RawValue* v = get(key)) {
            dst.clear();
            for (const RawValue& item : as_list(*v, key)) dst.push_back(as_int(item, key));
            if (dst.empty()) throw ConfigError("list '" + std::string(key) + "' must not be empty", v->line);
        }
    };
    int_list("m", cfg.m_list);
    int_list("targets", cfg.targets);

    if (const RawValue* v = get("n")) cfg.n = as_int(*v, "n");
    if (const RawValue* v = get("grid")) cfg.grid = as_int(*v, "grid");
    if (const RawValue* v = get("box")) {
        const auto items = as_list(*v, "box");
        if (items.size() != 4) throw ConfigError("box needs four values [l1_min, l1_max, l2_min, l2_max]", v->line);
        cfg.box = {as_real(items[0], "box"), as_real(items[1], "box"), as_real(items[2], "box"),
                   as_real(items[3], "box")};
    }
    if (const RawValue* v = get("mode")) {
        const auto mode = parse_objective_mode(as_string(*v));
        if (!mode) throw ConfigError("unknown objective mode '" + as_string(*v) + "'", v->line);
        cfg.mode = *mode;
    }
    if (const RawValue* v = get("out")) cfg.out = as_string(*v);
    if (const RawValue* v = get("plot")) cfg.plot = as_string(*v);
    if (const RawValue* v = get("command")) cfg.command = as_string(*v);

    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

RunConfig reference_config() {
    RunConfig cfg;
    cfg.spec = reference_problem();
    return cfg;
}

}  // namespace collage::cli
