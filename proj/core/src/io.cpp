#include <map>
#include "crnf/io.hpp"

#include <fstream>
#include <sstream>

#include "crnf/errors.hpp"
#include "crnf/expr_parser.hpp"

namespace crnf {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::string unquote(const std::string& s) {
    std::string t = trim(s);
    if (t.size() >= 2 && t.front() == '"' && t.back() == '"') return t.substr(1, t.size() - 2);
    return t;
}

std::map<std::string, std::string> parse_kv(const std::string& content) {
    std::map<std::string, std::string> kv;
    std::istringstream in(content);
    std::string line;
    while (std::getline(in, line)) {
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        size_t eq = t.find('=');
        if (eq == std::string::npos)
            raise(ErrorCode::IoError, "expected 'key = value', got: " + t);
        kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
    }
    return kv;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::IoError, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

QForm HypersurfaceFile::as_q() const {
    if (q) return *q;
    return phi_to_q(*phi);
}

HypersurfaceFile parse_hypersurface_file(const std::string& content) {
    HypersurfaceFile f;
    auto kv = parse_kv(content);
    if (auto it = kv.find("form"); it != kv.end()) f.form = it->second;
    if (auto it = kv.find("truncation"); it != kv.end()) f.truncation = std::stoi(it->second);
    if (auto it = kv.find("mode"); it != kv.end()) {
        if (it->second == "exact")
            f.mode = ArithMode::Exact;
        else if (it->second == "ball")
            f.mode = ArithMode::Ball;
        else
            raise(ErrorCode::IoError, "mode must be exact or ball");
    }
    if (auto it = kv.find("precision"); it != kv.end()) f.precision = std::stol(it->second);
    if (auto it = kv.find("expr"); it != kv.end())
        f.expr = unquote(it->second);
    else
        raise(ErrorCode::IoError, "missing expr");
    if (f.truncation < 1 || f.truncation > 64)
        raise(ErrorCode::IoError, "truncation must be between 1 and 64");

    if (f.form == "phi") {
        // parse high to detect whether the polynomial fits inside the order
        MultiSeries wide = parse_expr(f.expr, kPhiVars, 4 * f.truncation);
        f.polynomial_complete = wide.max_degree() <= static_cast<unsigned>(f.truncation);
        f.phi = validate_phi(wide.truncated(f.truncation));
    } else if (f.form == "q") {
        MultiSeries wide = parse_expr(f.expr, kQVars, 4 * f.truncation);
        f.polynomial_complete = wide.max_degree() <= static_cast<unsigned>(f.truncation);
        MultiSeries qs = MultiSeries::variable(kQVars, f.truncation, 2) + wide.truncated(f.truncation);
        f.q = validate_q(qs);
    } else {
        raise(ErrorCode::IoError, "form must be phi or q");
    }
    return f;
}

HypersurfaceFile load_hypersurface_file(const std::string& path) {
    return parse_hypersurface_file(slurp(path));
}

MapFile parse_map_file(const std::string& content, int default_truncation) {
    MapFile m;
    m.truncation = default_truncation;
    auto kv = parse_kv(content);
    if (auto it = kv.find("truncation"); it != kv.end()) m.truncation = std::stoi(it->second);
    auto fit = kv.find("F"), git = kv.find("G");
    if (fit == kv.end() || git == kv.end()) raise(ErrorCode::IoError, "map file needs F and G");
    m.f_expr = unquote(fit->second);
    m.g_expr = unquote(git->second);
    m.map = make_map(parse_expr(m.f_expr, kMapVars, m.truncation),
                     parse_expr(m.g_expr, kMapVars, m.truncation));
    return m;
}

MapFile load_map_file(const std::string& path, int default_truncation) {
    return parse_map_file(slurp(path), default_truncation);
}

}  // namespace crnf
