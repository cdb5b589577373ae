#include "crnf/report.hpp"

#include "crnf/expr_parser.hpp"
#include "crnf/unimodular.hpp"

namespace crnf {

Json json_pair(const InvariantPair& p) { return Json::array({p.alpha, p.mu}); }

Json json_triple(const Triple& t) { return Json::array({t.alpha, t.n, t.mu}); }

Json json_gauss(const GaussRat& v) {
    Json j;
    j["re"] = rat_to_string(v.re);
    j["im"] = rat_to_string(v.im);
    return j;
}

Json json_profile(const InvariantProfile& p) {
    Json j;
    j["truncation"] = p.trunc_certificate;
    j["verdict_scope"] = p.absolute ? "absolute" : "relative-to-truncation";
    Json pairs = Json::array();
    for (const auto& q : p.qm) pairs.push_back(json_pair(q));
    j["invariant_pairs"] = pairs;
    Json lam = Json::array();
    for (const auto& t : p.lambda) lam.push_back(json_triple(t));
    j["lambda"] = lam;
    Json tens = Json::array();
    for (const auto& t : p.tensors) {
        Json e;
        e["triple"] = json_triple(t.triple);
        e["value"] = json_gauss(t.value);
        tens.push_back(e);
    }
    j["tensors"] = tens;
    Json prov = Json::array();
    for (const auto& q : p.provisional) prov.push_back(json_pair(q));
    j["provisional_pairs"] = prov;
    j["finite_type_order"] =
        p.gamma0 ? Json(*p.gamma0) : Json("infinite-to-truncation");
    j["contact_order"] = p.m0 ? Json(*p.m0) : Json("levi-flat-to-truncation");
    return j;
}

Json json_group(const TorusSubgroup& g) {
    Json j;
    j["circle_plus"] = g.circle_plus;
    j["circle_minus"] = g.circle_minus;
    if (auto c = g.cardinality())
        j["order"] = *c;
    else
        j["order"] = "infinite";
    Json els = Json::array();
    for (const auto& e : g.finite) els.push_back(e.str());
    j["elements"] = els;
    return j;
}

Json json_symmetry_block(const LambdaInput& lambda) {
    Json j;
    Json lam = Json::array();
    for (const auto& t : lambda) lam.push_back(json_triple(t));
    j["lambda"] = lam;

    GcdInvariants g = gcd_invariants(lambda);
    Json gj;
    gj["all"] = g.g;
    gj["mu_odd"] = g.g_plus;
    gj["mu_even"] = g.g_minus;
    j["gcd"] = gj;

    TorusSubgroup grp = group_N(lambda);
    j["stabilizer_bound_group"] = json_group(grp);

    CardinalityResult card = cardinality_N(lambda);
    Json cj;
    cj["order"] = card.count ? Json(*card.count) : Json("infinite");
    cj["formula_applicable"] = card.formula_applicable;
    if (card.formula_applicable) {
        cj["formula_value"] = card.formula_value;
        cj["agrees"] = true;  // a mismatch raises before reaching the report
    }
    j["cardinality"] = cj;

    FinitenessDecision fin = finiteness_decision(lambda);
    Json fj;
    switch (fin.kind) {
        case FinitenessDecision::Kind::NotApplicable:
            fj["kind"] = "not-applicable";
            fj["reason"] = fin.reason;
            break;
        case FinitenessDecision::Kind::Finite:
            fj["kind"] = "finite";
            fj["bound"] = fin.bound;
            fj["designated_triple"] = json_triple(fin.designated);
            break;
        case FinitenessDecision::Kind::JetEmbedOnly:
            fj["kind"] = "jet-embedding-only";
            fj["jet_order"] = fin.jet_order;
            fj["designated_triple"] = json_triple(fin.designated);
            break;
    }
    if (fin.kind != FinitenessDecision::Kind::NotApplicable)
        fj["dimension_bound"] = 1;
    j["finiteness"] = fj;

    TrivialityDecision tr = triviality_decision(lambda);
    Json tj;
    switch (tr.kind) {
        case TrivialityDecision::Kind::NotApplicable:
            tj["kind"] = "not-applicable";
            tj["reason"] = tr.reason;
            break;
        case TrivialityDecision::Kind::Trivial:
            tj["kind"] = "trivial";
            break;
        case TrivialityDecision::Kind::NontrivialPossible:
            tj["kind"] = "nontrivial-possible";
            tj["reason"] = tr.reason;
            if (tr.witness) tj["witness"] = tr.witness->str();
            tj["at_most_two"] = tr.at_most_two;
            break;
    }
    tj["parity_reading"] = TrivialityDecision::kParityReadingNote;
    j["triviality"] = tj;

    // jet order for the canonical designated pair
    if (fin.kind != FinitenessDecision::Kind::NotApplicable) {
        std::optional<Triple> other;
        for (const auto& t : lambda)
            if (!(t == fin.designated) && (!other || t < *other)) other = t;
        if (other) j["jet_order"] = jet_order(fin.designated, *other);
    }
    return j;
}

namespace {

template <class K>
Json json_steps(const std::vector<StepRecord<K>>& steps) {
    Json arr = Json::array();
    for (const auto& s : steps) {
        Json e;
        e["k"] = s.k;
        e["pivot_determinant"] = rat_to_string(s.pivot_determinant);
        e["degenerate"] = s.degenerate;
        arr.push_back(e);
    }
    return arr;
}

Json json_common_normalization(const Json& qnf, const Json& mapf, const Json& mapg,
                               const Json& second, const NormalizationResult* ex,
                               const BasicNormalizationResult<CBall>* bl) {
    Json j;
    const auto& t = ex ? ex->t : bl->t;
    const auto& tt = ex ? ex->tt : bl->tt;
    j["triple"] = json_triple(t);
    j["second_triple"] = json_triple(tt);
    j["case"] = (ex ? ex->case_kind : bl->case_kind) == CaseAB::CaseA ? "A" : "B";
    j["second_leading_coefficient"] = second;
    if (ex && ex->c_squared) {
        j["c_squared"] = rat_to_string(*ex->c_squared);
        if (auto c = rational_root(*ex->c_squared, 2)) j["c"] = rat_to_string(*c);
    }
    auto lam = ex ? ex->lambda : bl->lambda;
    j["degenerate_index"] = lam ? Json(*lam) : Json(nullptr);
    // the free real parameter enters the transversal component one order
    // above the degenerate index, which is also the determining jet order
    if (lam) j["free_parameter_order"] = *lam + 1;
    Json ks = Json::array();
    for (long k : (ex ? ex->exceptional_set : bl->exceptional_set)) ks.push_back(k);
    j["exceptional_set"] = ks;
    auto fp = ex ? ex->free_param : bl->free_param;
    if (fp) j["free_parameter"] = rat_to_string(*fp);
    j["steps"] = ex ? json_steps(ex->steps) : json_steps(bl->steps);
    j["normal_form"] = qnf;
    j["map_F"] = mapf;
    j["map_G"] = mapg;
    Json tr = Json::array();
    for (const auto& s : (ex ? ex->trace : bl->trace)) tr.push_back(s);
    j["decision_trace"] = tr;
    return j;
}

std::string ball_series_text(const BallSeries& f) {
    std::string out;
    for (const auto& t : f.terms()) {
        out += t.second.brief() + " *";
        for (int i = 0; i < f.arity(); ++i)
            out += " " + f.vars()[static_cast<size_t>(i)] + "^" + std::to_string(t.first[i]);
        out += "\n";
    }
    return out.empty() ? "0\n" : out;
}

}  // namespace

Json json_normalization(const NormalizationResult& r) {
    Json j = json_common_normalization(canonical_text(r.q_nf.q), canonical_text(r.map.F),
                                       canonical_text(r.map.G), json_gauss(r.second_leading), &r,
                                       nullptr);
    j["mode"] = "exact";
    j["truncation"] = r.q_nf.trunc();
    return j;
}

Json json_normalization(const BasicNormalizationResult<CBall>& r) {
    Json j = json_common_normalization(ball_series_text(r.q_nf.q), ball_series_text(r.map.F),
                                       ball_series_text(r.map.G), r.second_leading.brief(),
                                       nullptr, &r);
    j["mode"] = "ball";
    j["precision"] = static_cast<long>(r.precision);
    j["truncation"] = r.q_nf.trunc();
    return j;
}

Json json_map_check(const MapCheck& c) {
    Json j;
    j["holds"] = c.holds;
    j["checked_to"] = c.checked_to;
    j["fail_degree"] = c.fail_degree ? Json(*c.fail_degree) : Json(nullptr);
    return j;
}

Json json_equivalence(const EquivalenceResult& r) {
    Json j;
    switch (r.kind) {
        case EquivalenceResult::Kind::Equivalent: j["verdict"] = "equivalent"; break;
        case EquivalenceResult::Kind::Distinct: j["verdict"] = "distinct"; break;
        case EquivalenceResult::Kind::Inconclusive: j["verdict"] = "inconclusive"; break;
    }
    if (!r.reason.empty()) j["reason"] = r.reason;
    if (r.residual) j["residual_rotation"] = r.residual->str();
    if (r.free_used) j["free_parameter"] = rat_to_string(*r.free_used);
    if (r.witness_map) {
        j["map_F"] = canonical_text(r.witness_map->F);
        j["map_G"] = canonical_text(r.witness_map->G);
    }
    return j;
}

Json json_error(const ToolkitError& e) {
    Json j;
    j["error"] = error_code_name(e.code());
    j["message"] = e.what();
    return j;
}

}  // namespace crnf
