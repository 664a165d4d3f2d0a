#include "rrdd/config.hpp"

#include "rrdd/errors.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

namespace rrdd {

namespace {

std::string trim(const std::string& s)
{
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return "";
    }
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// --- expression parser -------------------------------------------------

struct ExprParser {
    const std::string& text;
    std::size_t pos = 0;

    explicit ExprParser(const std::string& t) : text(t) {}

    [[noreturn]] void fail(const std::string& msg) const
    {
        throw ConfigError("expression error at position " + std::to_string(pos) + " in '" +
                          text + "': " + msg);
    }

    void skip_ws()
    {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) {
            ++pos;
        }
    }

    bool eat(char c)
    {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    char peek()
    {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }

    using Node = std::function<double(double, double)>;

    Node parse_expr()
    {
        Node lhs = parse_term();
        for (;;) {
            if (eat('+')) {
                Node rhs = parse_term();
                lhs = [lhs, rhs](double x, double y) { return lhs(x, y) + rhs(x, y); };
            } else if (eat('-')) {
                Node rhs = parse_term();
                lhs = [lhs, rhs](double x, double y) { return lhs(x, y) - rhs(x, y); };
            } else {
                return lhs;
            }
        }
    }

    Node parse_term()
    {
        Node lhs = parse_factor();
        for (;;) {
            if (eat('*')) {
                Node rhs = parse_factor();
                lhs = [lhs, rhs](double x, double y) { return lhs(x, y) * rhs(x, y); };
            } else if (eat('/')) {
                Node rhs = parse_factor();
                lhs = [lhs, rhs](double x, double y) { return lhs(x, y) / rhs(x, y); };
            } else {
                return lhs;
            }
        }
    }

    Node parse_factor()
    {
        Node base = parse_unary();
        if (eat('^')) {
            Node expo = parse_factor(); // right associative
            return [base, expo](double x, double y) {
                return std::pow(base(x, y), expo(x, y));
            };
        }
        return base;
    }

    Node parse_unary()
    {
        if (eat('-')) {
            Node inner = parse_unary();
            return [inner](double x, double y) { return -inner(x, y); };
        }
        (void)eat('+');
        return parse_primary();
    }

    Node parse_primary()
    {
        const char c = peek();
        if (c == '(') {
            eat('(');
            Node inner = parse_expr();
            if (!eat(')')) {
                fail("expected ')'");
            }
            return inner;
        }
        if (c == '|') {
            eat('|');
            Node inner = parse_expr();
            if (!eat('|')) {
                fail("expected closing '|'");
            }
            return [inner](double x, double y) { return std::abs(inner(x, y)); };
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            return parse_number();
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            return parse_ident();
        }
        fail("unexpected character");
    }

    Node parse_number()
    {
        skip_ws();
        std::size_t end = pos;
        while (end < text.size() &&
               (std::isdigit(static_cast<unsigned char>(text[end])) || text[end] == '.' ||
                text[end] == 'e' || text[end] == 'E' ||
                ((text[end] == '+' || text[end] == '-') && end > pos &&
                 (text[end - 1] == 'e' || text[end - 1] == 'E')))) {
            ++end;
        }
        double value = 0.0;
        try {
            value = std::stod(text.substr(pos, end - pos));
        } catch (const std::exception&) {
            fail("malformed number");
        }
        pos = end;
        return [value](double, double) { return value; };
    }

    Node parse_ident()
    {
        skip_ws();
        std::size_t end = pos;
        while (end < text.size() && std::isalpha(static_cast<unsigned char>(text[end]))) {
            ++end;
        }
        const std::string name = text.substr(pos, end - pos);
        pos = end;

        if (name == "x") {
            return [](double x, double) { return x; };
        }
        if (name == "y") {
            return [](double, double y) { return y; };
        }
        if (name == "pi") {
            return [](double, double) { return M_PI; };
        }

        if (!eat('(')) {
            fail("unknown identifier '" + name + "'");
        }
        Node arg = parse_expr();
        if (!eat(')')) {
            fail("expected ')' after argument of " + name);
        }
        if (name == "abs") {
            return [arg](double x, double y) { return std::abs(arg(x, y)); };
        }
        if (name == "sin") {
            return [arg](double x, double y) { return std::sin(arg(x, y)); };
        }
        if (name == "cos") {
            return [arg](double x, double y) { return std::cos(arg(x, y)); };
        }
        if (name == "exp") {
            return [arg](double x, double y) { return std::exp(arg(x, y)); };
        }
        if (name == "sqrt") {
            return [arg](double x, double y) { return std::sqrt(arg(x, y)); };
        }
        fail("unknown function '" + name + "'");
    }
};

double to_double(const std::string& section, const std::string& key, const std::string& v)
{
    try {
        std::size_t used = 0;
        const double out = std::stod(v, &used);
        if (trim(v.substr(used)).empty()) {
            return out;
        }
    } catch (const std::exception&) {
    }
    throw ConfigError("[" + section + "] " + key + ": expected a number, got '" + v + "'");
}

int to_int(const std::string& section, const std::string& key, const std::string& v)
{
    try {
        std::size_t used = 0;
        const int out = std::stoi(v, &used);
        if (trim(v.substr(used)).empty()) {
            return out;
        }
    } catch (const std::exception&) {
    }
    throw ConfigError("[" + section + "] " + key + ": expected an integer, got '" + v + "'");
}

bool to_bool(const std::string& section, const std::string& key, const std::string& v)
{
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("[" + section + "] " + key + ": expected a boolean, got '" + v + "'");
}

} // namespace

SourceFn parse_expression(const std::string& expr)
{
    ExprParser parser(expr);
    auto node = parser.parse_expr();
    parser.skip_ws();
    if (parser.pos != expr.size()) {
        parser.fail("trailing characters");
    }
    return [node](const Vec2& xy) { return node(xy[0], xy[1]); };
}

std::map<std::string, std::map<std::string, std::string>> parse_ini(const std::string& text)
{
    std::map<std::string, std::map<std::string, std::string>> doc;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::size_t comment = line.find_first_of("#;");
        if (comment != std::string::npos) {
            line = line.substr(0, comment);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            doc[section];
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        }
        doc[section][key] = value;
    }
    return doc;
}

ExperimentConfig parse_config_text(const std::string& text)
{
    const auto doc = parse_ini(text);
    ExperimentConfig cfg;

    static const std::map<std::string, std::map<std::string, int>> known = {
        {"problem", {{"preset", 0}, {"p", 0}, {"lambda", 0}, {"f", 0}}},
        {"mesh",
         {{"dim", 0}, {"a", 0}, {"b", 0}, {"n", 0}, {"lx", 0}, {"ly", 0}, {"nx", 0},
          {"ny", 0}, {"axis", 0}, {"cut", 0}}},
        {"method",
         {{"s", 0}, {"tol_gap", 0}, {"max_outer", 0}, {"eta0", 0}, {"strict_recompute", 0}}},
        {"newton",
         {{"tol", 0}, {"max_iter", 0}, {"eps_reg", 0}, {"damping", 0},
          {"max_backtracks", 0}, {"quad_order", 0}}},
        {"output", {{"dir", 0}, {"seed", 0}, {"dump_meshes", 0}}},
    };
    for (const auto& [section, entries] : doc) {
        const auto sec = known.find(section);
        if (sec == known.end()) {
            throw ConfigError("unknown section [" + section + "]");
        }
        for (const auto& [key, value] : entries) {
            (void)value;
            if (sec->second.find(key) == sec->second.end()) {
                throw ConfigError("unknown key '" + key + "' in section [" + section + "]");
            }
        }
    }

    auto get = [&doc](const std::string& section, const std::string& key,
                      auto&& convert, auto fallback) {
        const auto sec = doc.find(section);
        if (sec == doc.end()) {
            return fallback;
        }
        const auto it = sec->second.find(key);
        if (it == sec->second.end()) {
            return fallback;
        }
        return convert(section, key, it->second);
    };
    auto str = [](const std::string&, const std::string&, const std::string& v) { return v; };

    cfg.preset = get("problem", "preset", str, cfg.preset);
    cfg.p = get("problem", "p", to_double, cfg.p);
    cfg.lambda = get("problem", "lambda", to_double, cfg.lambda);
    cfg.f_expr = get("problem", "f", str, cfg.f_expr);

    cfg.dim = get("mesh", "dim", to_int, cfg.dim);
    cfg.a = get("mesh", "a", to_double, cfg.a);
    cfg.b = get("mesh", "b", to_double, cfg.b);
    cfg.n = get("mesh", "n", to_int, cfg.n);
    cfg.lx = get("mesh", "lx", to_double, cfg.lx);
    cfg.ly = get("mesh", "ly", to_double, cfg.ly);
    cfg.nx = get("mesh", "nx", to_int, cfg.nx);
    cfg.ny = get("mesh", "ny", to_int, cfg.ny);
    cfg.axis = get("mesh", "axis", str, cfg.axis);
    cfg.cut = get("mesh", "cut", to_double, cfg.cut);

    cfg.s = get("method", "s", to_double, cfg.s);
    cfg.tol_gap = get("method", "tol_gap", to_double, cfg.tol_gap);
    cfg.max_outer = get("method", "max_outer", to_int, cfg.max_outer);
    cfg.eta0 = get("method", "eta0", str, cfg.eta0);
    cfg.strict_recompute = get("method", "strict_recompute", to_bool, cfg.strict_recompute);

    cfg.tol = get("newton", "tol", to_double, cfg.tol);
    cfg.max_iter = get("newton", "max_iter", to_int, cfg.max_iter);
    cfg.eps_reg = get("newton", "eps_reg", to_double, cfg.eps_reg);
    cfg.damping = get("newton", "damping", to_double, cfg.damping);
    cfg.max_backtracks = get("newton", "max_backtracks", to_int, cfg.max_backtracks);
    cfg.quad_order = get("newton", "quad_order", to_int, cfg.quad_order);

    cfg.out_dir = get("output", "dir", str, cfg.out_dir);
    cfg.seed = static_cast<std::uint64_t>(
        get("output", "seed", to_int, static_cast<int>(cfg.seed)));
    cfg.dump_meshes = get("output", "dump_meshes", to_bool, cfg.dump_meshes);

    cfg.validate();
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file: " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

void ExperimentConfig::validate() const
{
    if (preset != "resolvent" && preset != "reaction" && preset != "linear") {
        throw ConfigError("[problem] preset must be resolvent|reaction|linear, got '" +
                          preset + "'");
    }
    if (!(p >= 2.0)) {
        throw ConfigError("[problem] p must be >= 2");
    }
    if (!(lambda > 0.0)) {
        throw ConfigError("[problem] lambda must be > 0");
    }
    parse_expression(f_expr); // surfaces syntax errors at validation time

    if (dim != 1 && dim != 2) {
        throw ConfigError("[mesh] dim must be 1 or 2");
    }
    if (dim == 1) {
        if (!(a < b) || n < 2) {
            throw ConfigError("[mesh] requires a < b and n >= 2");
        }
        if (!(cut > a && cut < b)) {
            throw ConfigError("[mesh] cut must lie strictly inside (a, b)");
        }
    } else {
        if (!(lx > 0.0) || !(ly > 0.0) || nx < 2 || ny < 2) {
            throw ConfigError("[mesh] requires positive extents and nx, ny >= 2");
        }
        if (axis != "x" && axis != "y") {
            throw ConfigError("[mesh] axis must be x or y");
        }
        const double extent = axis == "x" ? lx : ly;
        if (!(cut > 0.0 && cut < extent)) {
            throw ConfigError("[mesh] cut must lie strictly inside the domain");
        }
    }

    if (!(s > 0.0)) {
        throw ConfigError("[method] s must be > 0");
    }
    if (!(tol_gap > 0.0) || max_outer < 1) {
        throw ConfigError("[method] requires tol_gap > 0 and max_outer >= 1");
    }
    if (eta0 != "zero" && eta0 != "neumann" && eta0 != "reference") {
        throw ConfigError("[method] eta0 must be zero|neumann|reference, got '" + eta0 + "'");
    }

    if (!(tol > 0.0) || max_iter < 1 || !(damping > 0.0 && damping < 1.0) ||
        max_backtracks < 0 || eps_reg < 0.0 || quad_order < 1) {
        throw ConfigError("[newton] invalid solver parameters");
    }
    if (out_dir.empty()) {
        throw ConfigError("[output] dir must not be empty");
    }
}

} // namespace rrdd
