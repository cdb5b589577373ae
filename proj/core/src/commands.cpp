#include "crnf/commands.hpp"

#include <sstream>

#include "crnf/expr_parser.hpp"

namespace crnf {

namespace {

Json file_block(const HypersurfaceFile& f) {
    Json j;
    j["form"] = f.form;
    j["truncation"] = f.truncation;
    j["mode"] = f.mode == ArithMode::Exact ? "exact" : "ball";
    j["polynomial_complete"] = f.polynomial_complete;
    return j;
}

}  // namespace

Triple parse_triple_arg(const std::string& text) {
    std::istringstream in(text);
    Triple t;
    char c1, c2;
    if (!(in >> t.alpha >> c1 >> t.n >> c2 >> t.mu) || c1 != ',' || c2 != ',')
        raise(ErrorCode::IoError, "expected a triple 'alpha,n,mu': " + text);
    return t;
}

LambdaInput parse_lambda_arg(const std::string& text) {
    LambdaInput lam;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ';'))
        if (!item.empty()) lam.push_back(parse_triple_arg(item));
    if (lam.empty()) raise(ErrorCode::IoError, "empty triple list");
    validate_lambda(lam);
    return lam;
}

Rat parse_rat_arg(const std::string& text) {
    size_t slash = text.find('/');
    if (slash == std::string::npos) return Rat(mpz_class(text));
    return rat_from_parts(mpz_class(text.substr(0, slash)), mpz_class(text.substr(slash + 1)));
}

CommandResult cmd_analyze(const HypersurfaceFile& file, std::optional<int> degree) {
    CommandResult res;
    HypersurfaceFile f = file;
    if (degree && *degree != f.truncation) {
        std::string content = "form = " + f.form + "\ntruncation = " + std::to_string(*degree) +
                              "\nmode = " + (f.mode == ArithMode::Exact ? "exact" : "ball") +
                              "\nprecision = " + std::to_string(f.precision) +
                              "\nexpr = \"" + f.expr + "\"\n";
        f = parse_hypersurface_file(content);
    }
    res.doc["command"] = "analyze";
    res.doc["input"] = file_block(f);
    InvariantProfile prof =
        f.phi ? profile(*f.phi, f.polynomial_complete) : profile(*f.q, f.polynomial_complete);
    res.doc["profile"] = json_profile(prof);
    if (!prof.lambda.empty()) res.doc["symmetry"] = json_symmetry_block(prof.lambda);
    return res;
}

CommandResult cmd_normalize(const HypersurfaceFile& file, const NormalizeArgs& args) {
    CommandResult res;
    res.doc["command"] = "normalize";
    res.doc["input"] = file_block(file);
    QForm q = file.as_q();
    int degree = args.degree ? *args.degree : file.truncation;
    ArithMode mode = file.mode;
    if (args.mode) mode = *args.mode == "ball" ? ArithMode::Ball : ArithMode::Exact;
    mpfr_prec_t prec = args.precision ? *args.precision : file.precision;

    NormalizeOptions opts;
    opts.triple_choice = args.choice;
    opts.free_param = args.free_param;
    opts.leading_coefficient_complete = file.polynomial_complete;

    if (mode == ArithMode::Exact) {
        NormalizationResult r = normalize(q, degree, opts);
        res.doc["result"] = json_normalization(r);
        NormalFormCheck chk = is_normal_form(r.q_nf, r.t, r.tt);
        res.doc["normal_form_verified"] = chk.ok;
        if (!chk.ok) {  // the exact pipeline guarantees this; failure is a defect
            res.doc["violation"] = chk.violation;
            res.exit_code = 1;
        }
    } else {
        BasicNormalizationResult<CBall> r = normalize_ball(q, degree, opts, prec);
        res.doc["result"] = json_normalization(r);
        NormalFormCheck chk = is_normal_form(r.q_nf, r.t, r.tt);
        res.doc["normal_form_verified"] = chk.ok;
        if (!chk.ok) {
            res.doc["inconclusive"] = chk.violation;
            res.exit_code = 2;
        }
    }
    return res;
}

CommandResult cmd_equiv(const HypersurfaceFile& a, const HypersurfaceFile& b,
                        std::optional<int> degree) {
    CommandResult res;
    res.doc["command"] = "equiv";
    res.doc["first"] = file_block(a);
    res.doc["second"] = file_block(b);
    int d = degree ? *degree : std::min(a.truncation, b.truncation);
    EquivalenceResult r =
        equivalence(a.as_q(), b.as_q(), d, a.polynomial_complete && b.polynomial_complete);
    res.doc["result"] = json_equivalence(r);
    res.doc["truncation"] = d;
    if (r.kind == EquivalenceResult::Kind::Inconclusive) res.exit_code = 2;
    return res;
}

CommandResult cmd_check_map(const HypersurfaceFile& source, const MapFile& map,
                            const HypersurfaceFile& target) {
    CommandResult res;
    res.doc["command"] = "check-map";
    res.doc["source"] = file_block(source);
    res.doc["target"] = file_block(target);
    res.doc["map"] = Json{{"F", map.f_expr}, {"G", map.g_expr}};
    MapCheck c = check_map(source.as_q(), target.as_q(), map.map);
    res.doc["result"] = json_map_check(c);
    return res;
}

CommandResult cmd_symmetry(const LambdaInput& lambda) {
    CommandResult res;
    res.doc["command"] = "symmetry";
    res.doc["result"] = json_symmetry_block(lambda);
    return res;
}

}  // namespace crnf
