#include "omniport/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>

namespace omniport {

namespace {

// ---------------------------------------------------------------- parser --

struct Value {
    enum class Kind { number, boolean, string, array, table, table_array };
    Kind kind = Kind::table;
    double num = 0.0;
    bool flag = false;
    std::string str;
    std::vector<Value> items;  // array elements or table-array tables
    std::map<std::string, Value> entries;
    int line = 0;
    mutable bool used = false;
};

struct Parser {
    const std::string& text;
    const std::string& origin;
    std::size_t pos = 0;
    int line = 1;

    [[noreturn]] void fail(const std::string& msg, int at_line) const {
        throw ParseError(origin + ":" + std::to_string(at_line) + ": " + msg);
    }

    bool eof() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }
    void advance() {
        if (text[pos] == '\n') ++line;
        ++pos;
    }

    void skip_blank() {  // spaces and comments, not newlines
        while (!eof()) {
            const char c = peek();
            if (c == ' ' || c == '\t' || c == '\r') {
                advance();
            } else if (c == '#') {
                while (!eof() && peek() != '\n') advance();
            } else {
                break;
            }
        }
    }

    void expect_line_end() {
        skip_blank();
        if (eof()) return;
        if (peek() != '\n') fail("unexpected trailing characters", line);
        advance();
    }

    static bool key_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
               c == '-';
    }

    std::string parse_key() {
        skip_blank();
        std::string k;
        while (!eof() && key_char(peek())) {
            k.push_back(peek());
            advance();
        }
        if (k.empty()) fail("expected a key", line);
        return k;
    }

    std::vector<std::string> parse_dotted() {
        std::vector<std::string> path{parse_key()};
        skip_blank();
        while (!eof() && peek() == '.') {
            advance();
            path.push_back(parse_key());
            skip_blank();
        }
        return path;
    }

    std::string parse_string() {
        advance();  // opening quote
        std::string s;
        while (true) {
            if (eof() || peek() == '\n') fail("unterminated string", line);
            char c = peek();
            advance();
            if (c == '"') break;
            if (c == '\\') {
                if (eof()) fail("unterminated string", line);
                const char e = peek();
                advance();
                switch (e) {
                    case '"': c = '"'; break;
                    case '\\': c = '\\'; break;
                    case 'n': c = '\n'; break;
                    case 't': c = '\t'; break;
                    default: fail("unsupported escape sequence", line);
                }
            }
            s.push_back(c);
        }
        return s;
    }

    Value parse_value() {
        skip_blank();
        if (eof()) fail("expected a value", line);
        Value v;
        v.line = line;
        const char c = peek();
        if (c == '"') {
            v.kind = Value::Kind::string;
            v.str = parse_string();
            return v;
        }
        if (c == '[') {
            advance();
            v.kind = Value::Kind::array;
            skip_blank();
            if (!eof() && peek() == ']') {
                advance();
                return v;
            }
            while (true) {
                v.items.push_back(parse_value());
                skip_blank();
                if (!eof() && peek() == ',') {
                    advance();
                    skip_blank();
                    if (!eof() && peek() == ']') {  // trailing comma
                        advance();
                        break;
                    }
                    continue;
                }
                if (!eof() && peek() == ']') {
                    advance();
                    break;
                }
                fail("expected ',' or ']' in array", line);
            }
            return v;
        }
        // bare token: number or boolean
        std::string tok;
        while (!eof() && peek() != '\n' && peek() != ',' && peek() != ']' &&
               peek() != '#' && peek() != ' ' && peek() != '\t' &&
               peek() != '\r') {
            tok.push_back(peek());
            advance();
        }
        if (tok == "true" || tok == "false") {
            v.kind = Value::Kind::boolean;
            v.flag = tok == "true";
            return v;
        }
        char* end = nullptr;
        const double num = std::strtod(tok.c_str(), &end);
        if (tok.empty() || end != tok.c_str() + tok.size() || !std::isfinite(num))
            fail("cannot parse value '" + tok + "'", v.line);
        v.kind = Value::Kind::number;
        v.num = num;
        return v;
    }

    Value parse_document() {
        Value root;
        root.kind = Value::Kind::table;
        Value* current = &root;
        while (true) {
            skip_blank();
            if (eof()) break;
            if (peek() == '\n') {
                advance();
                continue;
            }
            const int at = line;
            if (peek() == '[') {
                advance();
                const bool is_array = !eof() && peek() == '[';
                if (is_array) advance();
                const auto path = parse_dotted();
                skip_blank();
                if (eof() || peek() != ']') fail("expected ']'", at);
                advance();
                if (is_array) {
                    if (eof() || peek() != ']') fail("expected ']]'", at);
                    advance();
                }
                current = resolve_header(root, path, is_array, at);
                expect_line_end();
                continue;
            }
            const std::string key = parse_key();
            skip_blank();
            if (eof() || peek() != '=')
                fail("expected '=' after key '" + key + "'", at);
            advance();
            Value v = parse_value();
            v.line = at;
            if (current->entries.count(key))
                fail("duplicate key '" + key + "'", at);
            current->entries.emplace(key, std::move(v));
            expect_line_end();
        }
        return root;
    }

    Value* resolve_header(Value& root, const std::vector<std::string>& path,
                          bool is_array, int at) {
        Value* node = &root;
        for (std::size_t i = 0; i < path.size(); ++i) {
            const bool last = i + 1 == path.size();
            auto it = node->entries.find(path[i]);
            if (it == node->entries.end()) {
                Value fresh;
                fresh.kind = (last && is_array) ? Value::Kind::table_array
                                                : Value::Kind::table;
                fresh.line = at;
                it = node->entries.emplace(path[i], std::move(fresh)).first;
            }
            Value& v = it->second;
            if (last && is_array) {
                if (v.kind != Value::Kind::table_array)
                    fail("'" + path[i] + "' is not an array of tables", at);
                Value elem;
                elem.kind = Value::Kind::table;
                elem.line = at;
                v.items.push_back(std::move(elem));
                return &v.items.back();
            }
            if (v.kind == Value::Kind::table_array) {
                if (v.items.empty())
                    fail("'" + path[i] + "' has no elements", at);
                node = &v.items.back();
            } else if (v.kind == Value::Kind::table) {
                node = &v;
            } else {
                fail("'" + path[i] + "' is not a table", at);
            }
        }
        return node;
    }
};

// --------------------------------------------------------------- readers --

struct Reader {
    const Value& table;
    const std::string& origin;

    [[noreturn]] void fail(const std::string& msg, int line) const {
        throw ParseError(origin + ":" + std::to_string(line) + ": " + msg);
    }

    const Value* find(const std::string& key) const {
        const auto it = table.entries.find(key);
        if (it == table.entries.end()) return nullptr;
        it->second.used = true;
        return &it->second;
    }

    const Value& need(const std::string& key, const std::string& where) const {
        const Value* v = find(key);
        if (!v) fail(where + " is missing key '" + key + "'", table.line);
        return *v;
    }

    double number(const Value& v, const std::string& key) const {
        if (v.kind != Value::Kind::number)
            fail("key '" + key + "' must be a number", v.line);
        return v.num;
    }

    double get_number(const std::string& key, const std::string& where) const {
        return number(need(key, where), key);
    }
    double get_number_or(const std::string& key, double fallback) const {
        const Value* v = find(key);
        return v ? number(*v, key) : fallback;
    }

    long get_integer(const std::string& key, const std::string& where) const {
        const double d = get_number(key, where);
        const double r = std::nearbyint(d);
        if (d != r) fail("key '" + key + "' must be an integer",
                         need(key, where).line);
        return static_cast<long>(r);
    }

    std::string get_string_or(const std::string& key,
                              const std::string& fallback) const {
        const Value* v = find(key);
        if (!v) return fallback;
        if (v->kind != Value::Kind::string)
            fail("key '" + key + "' must be a string", v->line);
        return v->str;
    }

    std::vector<double> number_array(const Value& v,
                                     const std::string& key) const {
        if (v.kind != Value::Kind::array)
            fail("key '" + key + "' must be an array", v.line);
        std::vector<double> out;
        out.reserve(v.items.size());
        for (const auto& item : v.items) out.push_back(number(item, key));
        return out;
    }
};

void mark_table_used(const Value& v) { v.used = true; }

// reject any leaf that was never consumed by the schema mapping, and any
// table nobody asked for (an unknown empty section would otherwise slip by)
void check_consumed(const Value& v, const std::string& path,
                    const std::string& origin) {
    if (!path.empty() && !v.used && v.entries.empty() && v.items.empty())
        throw ParseError(origin + ":" + std::to_string(v.line) +
                         ": unknown key '" + path + "'");
    for (std::size_t i = 0; i < v.items.size(); ++i)
        check_consumed(v.items[i], path, origin);
    for (const auto& [key, child] : v.entries) {
        const std::string sub = path.empty() ? key : path + "." + key;
        if (child.kind == Value::Kind::table ||
            child.kind == Value::Kind::table_array) {
            check_consumed(child, sub, origin);
        } else if (!child.used) {
            throw ParseError(origin + ":" + std::to_string(child.line) +
                             ": unknown key '" + sub + "'");
        }
    }
}

// ---------------------------------------------------------------- schema --

std::vector<double> axis_values(const Reader& r, const std::string& where) {
    if (const Value* vals = r.find("values")) {
        const auto out = r.number_array(*vals, "values");
        if (out.empty()) r.fail(where + ": 'values' is empty", vals->line);
        return out;
    }
    GridSpec g;
    g.min = r.get_number("min", where);
    g.max = r.get_number("max", where);
    g.count = r.get_integer("count", where);
    if (g.count < 1) r.fail(where + ": 'count' must be at least 1", r.table.line);
    if (g.count > 1 && !(g.max > g.min))
        r.fail(where + ": 'max' must exceed 'min'", r.table.line);
    return g.values();
}

ScenarioDocument map_schema(const Value& root, const std::string& origin) {
    const Reader top{root, origin};
    ScenarioDocument doc;

    // [network]
    const Value& network = top.need("network", "scenario");
    mark_table_used(network);
    const Reader net{network, origin};
    const std::string level = net.get_string_or("level", "");
    if (level != "physical" && level != "linearized")
        net.fail("network level must be \"physical\" or \"linearized\"",
                 network.line);

    const Value& mech = net.need("mech", "[network]");
    mark_table_used(mech);
    const Reader mr{mech, origin};
    doc.scenario.network.mech.omega_m = mr.get_number_or("omega_m", 100.0);
    doc.scenario.network.mech.gamma_m = mr.get_number("gamma_m", "[network.mech]");

    const Value& ports = net.need("ports", "[network]");
    mark_table_used(ports);
    if (ports.kind != Value::Kind::table_array || ports.items.empty())
        net.fail("at least one [[network.ports]] table is required", ports.line);

    if (level == "physical") {
        std::vector<PhysicalPort> list;
        for (const auto& item : ports.items) {
            mark_table_used(item);
            const Reader pr{item, origin};
            PhysicalPort p;
            p.kappa_0 = pr.get_number_or("kappa_0", 0.0);
            p.kappa_ex = pr.get_number("kappa_ex", "[[network.ports]]");
            p.g = pr.get_number("g", "[[network.ports]]");
            p.eps_c = pr.get_number("eps_c", "[[network.ports]]");
            p.drive_phase = pr.get_number_or("drive_phase", 0.0);
            p.delta = pr.get_number("delta", "[[network.ports]]");
            list.push_back(p);
        }
        doc.scenario.network.ports = std::move(list);
    } else {
        std::vector<LinearPort> list;
        for (const auto& item : ports.items) {
            mark_table_used(item);
            const Reader pr{item, origin};
            LinearPort p;
            p.kappa_0 = pr.get_number_or("kappa_0", 0.0);
            p.kappa_ex = pr.get_number("kappa_ex", "[[network.ports]]");
            p.G_mod = pr.get_number("G_mod", "[[network.ports]]");
            p.G_phase = pr.get_number_or("G_phase", 0.0);
            list.push_back(p);
        }
        doc.scenario.network.ports = std::move(list);
    }
    const std::size_t n = doc.scenario.network.num_ports();

    // [signals]: either a from/to pair with optional control, or the
    // all-ports routing form with explicit amplitude lists
    const Value& signals = top.need("signals", "scenario");
    mark_table_used(signals);
    const Reader sr{signals, origin};
    const bool pair_form = signals.entries.count("from") > 0;
    const bool routing_form = signals.entries.count("eps") > 0;
    if (pair_form == routing_form)
        sr.fail("[signals] needs either 'from'/'to' or 'eps'", signals.line);

    if (pair_form) {
        TwoPortDrive d;
        const long from = sr.get_integer("from", "[signals]");
        const long to = sr.get_integer("to", "[signals]");
        if (from < 1 || from > static_cast<long>(n))
            sr.fail("'from' is out of range", signals.line);
        if (to < 1 || to > static_cast<long>(n) || to == from)
            sr.fail("'to' must name a different port", signals.line);
        d.from = static_cast<std::size_t>(from - 1);
        d.to = static_cast<std::size_t>(to - 1);
        if (sr.find("control")) {
            const long c = sr.get_integer("control", "[signals]");
            if (c < 1 || c > static_cast<long>(n) || c == from || c == to)
                sr.fail("'control' must name a distinct port", signals.line);
            d.control = static_cast<int>(c - 1);
        }
        d.eta = sr.get_number_or("eta", 1.0);
        d.phi = sr.get_number_or("phi", 0.0);
        if (d.eta < 0) sr.fail("'eta' must be non-negative", signals.line);
        doc.scenario.drive = d;
    } else {
        RoutingDrive d;
        d.eps = sr.number_array(sr.need("eps", "[signals]"), "eps");
        if (const Value* ph = sr.find("phase"))
            d.phase = sr.number_array(*ph, "phase");
        else
            d.phase.assign(d.eps.size(), 0.0);
        const auto rep = validate(SignalSet{d.eps, d.phase}, n);
        if (!rep.ok()) sr.fail(rep.errors.front(), signals.line);
        doc.scenario.drive = std::move(d);
    }

    // [grid]
    if (const Value* grid = top.find("grid")) {
        mark_table_used(*grid);
        const Reader gr{*grid, origin};
        doc.grid.min = gr.get_number_or("min", doc.grid.min);
        doc.grid.max = gr.get_number_or("max", doc.grid.max);
        doc.grid.count = gr.get_integer("count", "[grid]");
        if (doc.grid.count < 1)
            gr.fail("'count' must be at least 1", grid->line);
        if (doc.grid.count > 1 && !(doc.grid.max > doc.grid.min))
            gr.fail("'max' must exceed 'min'", grid->line);
    }

    // [sweep]
    if (const Value* sweep = top.find("sweep")) {
        mark_table_used(*sweep);
        const Reader swr{*sweep, origin};
        SweepSpec spec;
        spec.xi = swr.get_number_or("xi", 0.0);

        const Value& metric = swr.need("metric", "[sweep]");
        std::vector<std::string> names;
        if (metric.kind == Value::Kind::string) {
            names.push_back(metric.str);
        } else if (metric.kind == Value::Kind::array) {
            for (const auto& item : metric.items) {
                if (item.kind != Value::Kind::string)
                    swr.fail("'metric' entries must be strings", item.line);
                names.push_back(item.str);
            }
        } else {
            swr.fail("'metric' must be a string or an array of strings",
                     metric.line);
        }
        for (const auto& name : names) {
            try {
                spec.metrics.push_back(MetricSelector::parse(name));
            } catch (const std::invalid_argument& e) {
                swr.fail(e.what(), metric.line);
            }
            const auto& m = spec.metrics.back();
            if (m.kind == MetricSelector::Kind::S && m.port >= n)
                swr.fail("unknown metric '" + name + "': the network has " +
                             std::to_string(n) + " ports",
                         metric.line);
        }

        const Value& axes = swr.need("axes", "[sweep]");
        mark_table_used(axes);
        if (axes.kind != Value::Kind::table_array || axes.items.empty())
            swr.fail("at least one [[sweep.axes]] table is required", axes.line);
        if (axes.items.size() > 2)
            swr.fail("at most two sweep axes are supported", axes.line);
        for (const auto& item : axes.items) {
            mark_table_used(item);
            const Reader ar{item, origin};
            SweepAxis ax;
            ax.knob = ar.get_string_or("knob", "");
            if (ax.knob.empty())
                ar.fail("[[sweep.axes]] is missing key 'knob'", item.line);
            const auto dot = ax.knob.rfind('.');
            ax.label = ar.get_string_or(
                "label",
                dot == std::string::npos ? ax.knob : ax.knob.substr(dot + 1));
            ax.values = axis_values(ar, "[[sweep.axes]]");
            spec.axes.push_back(std::move(ax));
        }
        doc.sweep = std::move(spec);
    }

    // [output]
    if (const Value* output = top.find("output")) {
        mark_table_used(*output);
        const Reader outr{*output, origin};
        doc.output.format = outr.get_string_or("format", "csv");
        if (doc.output.format != "csv" && doc.output.format != "json")
            outr.fail("output format must be \"csv\" or \"json\"", output->line);
        doc.output.path = outr.get_string_or("path", "");
    }

    check_consumed(root, "", origin);
    return doc;
}

// ------------------------------------------------------------------ hash --

struct Fnv {
    std::uint64_t h = 1469598103934665603ull;

    void feed(const std::string& s) {
        for (const unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
    }
    void feed_num(double v) { feed(format_double(v) + ";"); }
};

}  // namespace

std::vector<double> GridSpec::values() const {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    if (count == 1) {
        out.push_back(min);
        return out;
    }
    for (long i = 0; i < count; ++i)
        out.push_back(min + (max - min) * static_cast<double>(i) /
                                static_cast<double>(count - 1));
    return out;
}

std::string scenario_hash(const ScenarioDocument& doc) {
    Fnv fnv;
    const auto& net = doc.scenario.network;
    fnv.feed(net.is_physical() ? "physical;" : "linearized;");
    fnv.feed_num(net.mech.omega_m);
    fnv.feed_num(net.mech.gamma_m);
    if (net.is_physical()) {
        for (const auto& p : net.physical()) {
            fnv.feed("port;");
            fnv.feed_num(p.kappa_0);
            fnv.feed_num(p.kappa_ex);
            fnv.feed_num(p.g);
            fnv.feed_num(p.eps_c);
            fnv.feed_num(p.drive_phase);
            fnv.feed_num(p.delta);
        }
    } else {
        for (const auto& p : net.linearized()) {
            fnv.feed("port;");
            fnv.feed_num(p.kappa_0);
            fnv.feed_num(p.kappa_ex);
            fnv.feed_num(p.G_mod);
            fnv.feed_num(p.G_phase);
        }
    }
    if (doc.scenario.is_two_port()) {
        const auto& d = doc.scenario.two_port();
        fnv.feed("pair;");
        fnv.feed_num(static_cast<double>(d.from));
        fnv.feed_num(static_cast<double>(d.to));
        fnv.feed_num(static_cast<double>(d.control));
        fnv.feed_num(d.eta);
        fnv.feed_num(d.phi);
    } else {
        const auto& d = doc.scenario.routing();
        fnv.feed("routing;");
        for (double v : d.eps) fnv.feed_num(v);
        fnv.feed("phase;");
        for (double v : d.phase) fnv.feed_num(v);
    }
    fnv.feed("grid;");
    fnv.feed_num(doc.grid.min);
    fnv.feed_num(doc.grid.max);
    fnv.feed_num(static_cast<double>(doc.grid.count));
    if (doc.sweep) {
        fnv.feed("sweep;");
        fnv.feed_num(doc.sweep->xi);
        for (const auto& m : doc.sweep->metrics) fnv.feed(m.name() + ";");
        for (const auto& ax : doc.sweep->axes) {
            fnv.feed("axis;" + ax.knob + ";");
            for (double v : ax.values) fnv.feed_num(v);
        }
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv.h));
    return buf;
}

ScenarioDocument parse_scenario(const std::string& text,
                                const std::string& origin) {
    Parser parser{text, origin};
    const Value root = parser.parse_document();
    ScenarioDocument doc = map_schema(root, origin);
    doc.hash = scenario_hash(doc);
    return doc;
}

ScenarioDocument load_scenario(const std::string& path) {
    return parse_scenario(read_text_file(path), path);
}

}  // namespace omniport
