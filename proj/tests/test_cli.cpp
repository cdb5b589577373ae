#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "crnf/commands.hpp"
#include "crnf/expr_parser.hpp"
#include "test_util.hpp"

using namespace crnf;
using namespace crnf::testutil;

TEST_CASE("expression parsing on stated examples") {
    MultiSeries a = parse_expr("s * abs2(z) * re(z)", kPhiVars, 9);
    CHECK(a == mono(kPhiVars, 9, {2, 1, 1}, gr(1, 2)) + mono(kPhiVars, 9, {1, 2, 1}, gr(1, 2)));

    CHECK(parse_expr("abs2(z)^4", kPhiVars, 9) == mono(kPhiVars, 9, {4, 4, 0}, gr(1)));

    MultiSeries c = parse_expr("(1/2 + 1/3 i) * z^2 * zb", kQVars, 9);
    CHECK(c == mono(kQVars, 9, {2, 1, 0}, gi(1, 2, 1, 3)));
}

TEST_CASE("expression parsing corners") {
    CHECK(parse_expr("2i * z * zb", kQVars, 6) == mono(kQVars, 6, {1, 1, 0}, gi(0, 1, 2, 1)));
    CHECK(parse_expr("-z^2 * zb^2", kPhiVars, 6) == mono(kPhiVars, 6, {2, 2, 0}, gr(-1)));
    CHECK(parse_expr("z*zb - 1/2 * z^2*zb^2", kPhiVars, 6) ==
          mono(kPhiVars, 6, {1, 1, 0}, gr(1)) + mono(kPhiVars, 6, {2, 2, 0}, gr(-1, 2)));
    CHECK(parse_expr("im(2i * z * zb)", kPhiVars, 6) == mono(kPhiVars, 6, {1, 1, 0}, gr(2)));
    CHECK(parse_expr("conj((0+1i) * z^2)", kPhiVars, 6) == mono(kPhiVars, 6, {0, 2, 0}, gi(0, 1, -1, 1)));
    CHECK(parse_expr("(z + zb)^2", kPhiVars, 6) ==
          mono(kPhiVars, 6, {2, 0, 0}, gr(1)) + mono(kPhiVars, 6, {1, 1, 0}, gr(2)) +
              mono(kPhiVars, 6, {0, 2, 0}, gr(1)));

    CHECK_THROWS_WITH_AS((void)parse_expr("q * z", kPhiVars, 6), doctest::Contains("UnknownVariable"),
                         ToolkitError);
    CHECK_THROWS_WITH_AS((void)parse_expr("z +", kPhiVars, 6), doctest::Contains("SyntaxError"),
                         ToolkitError);
    CHECK_THROWS_WITH_AS((void)parse_expr("re(w)", kMapVars, 6), doctest::Contains("SyntaxError"),
                         ToolkitError);
}

TEST_CASE("expressions round-trip through the grammar") {
    std::mt19937 rng(777);
    for (int it = 0; it < 20; ++it) {
        MultiSeries f = random_series(rng, kQVars, 8, 6);
        CHECK(parse_expr(to_expression(f), kQVars, 8) == f);
    }
    CHECK(parse_expr(to_expression(MultiSeries(kQVars, 8)), kQVars, 8).is_zero());
}

TEST_CASE("hypersurface files") {
    HypersurfaceFile f = parse_hypersurface_file(
        "# comment\nform = phi\ntruncation = 10\nmode = exact\nexpr = \"s * abs2(z) * re(z)\"\n");
    CHECK(f.phi.has_value());
    CHECK(f.polynomial_complete);
    CHECK(f.truncation == 10);

    HypersurfaceFile qf = parse_hypersurface_file(
        "form = q\ntruncation = 8\nexpr = \"2i * z * zb\"\n");
    REQUIRE(qf.q.has_value());
    CHECK(qf.q->q.coefficient(MultiIndex({0, 0, 1})) == gr(1));  // the implicit tau term

    CHECK_THROWS_AS((void)parse_hypersurface_file("form = phi\n"), ToolkitError);
    CHECK_THROWS_AS(
        (void)parse_hypersurface_file("form = q\ntruncation = 8\nexpr = \"z * zb\"\n"),
        ToolkitError);  // fails the reality identity
}

TEST_CASE("analyze reports are deterministic and carry certificates") {
    HypersurfaceFile f = parse_hypersurface_file(
        "form = phi\ntruncation = 16\nexpr = \"s * abs2(z) * re(z) + abs2(z)^4\"\n");
    CommandResult a = cmd_analyze(f, std::nullopt);
    CommandResult b = cmd_analyze(f, std::nullopt);
    CHECK(a.doc.dump() == b.doc.dump());
    CHECK(a.exit_code == 0);
    CHECK(a.doc["profile"]["truncation"] == 16);
    CHECK(a.doc["profile"]["verdict_scope"] == "absolute");
    CHECK(a.doc["symmetry"]["triviality"]["kind"] == "trivial");
    CHECK(a.doc["symmetry"]["cardinality"]["order"] == 1);

    // quadric: single pair, decisions not applicable
    HypersurfaceFile quad =
        parse_hypersurface_file("form = phi\ntruncation = 8\nexpr = \"abs2(z)\"\n");
    CommandResult c = cmd_analyze(quad, std::nullopt);
    CHECK(c.doc["symmetry"]["finiteness"]["kind"] == "not-applicable");
    CHECK(c.doc["profile"]["lambda"].dump() == "[[1,1,0]]");
}

TEST_CASE("normalize command on a file already in normal form") {
    // build a normal form, serialize it as a q file, and normalize again
    HypersurfaceFile f = parse_hypersurface_file(
        "form = phi\ntruncation = 12\nexpr = \"2 * re(z * zb^3) * s + 3/2 * re(z^3 * zb^4)\"\n");
    NormalizeOptions opts;
    opts.leading_coefficient_complete = true;
    NormalizationResult r = normalize(f.as_q(), 12, opts);
    MultiSeries tail = r.q_nf.q - MultiSeries::variable(kQVars, r.q_nf.trunc(), 2);
    std::string content = "form = q\ntruncation = " + std::to_string(r.q_nf.trunc()) +
                          "\nexpr = \"" + to_expression(tail) + "\"\n";
    HypersurfaceFile nf = parse_hypersurface_file(content);
    CommandResult res = cmd_normalize(nf, {});
    CHECK(res.exit_code == 0);
    CHECK(res.doc["normal_form_verified"] == true);
    // identity jet: F = z, G = w
    CHECK(res.doc["result"]["map_F"] == "(1/1)+(0/1)i * z^1 w^0\n");
    CHECK(res.doc["result"]["map_G"] == "(1/1)+(0/1)i * z^0 w^1\n");
}

TEST_CASE("check-map and equiv commands with exit codes") {
    HypersurfaceFile fin = parse_hypersurface_file(
        "form = phi\ntruncation = 14\nexpr = \"s * re(z)^2 * (abs2(z) * s^2 + abs2(z)^4)\"\n");
    MapFile neg = parse_map_file("F = \"-1 * z\"\nG = \"w\"\n", 14);
    CommandResult mc = cmd_check_map(fin, neg, fin);
    CHECK(mc.exit_code == 0);
    CHECK(mc.doc["result"]["holds"] == true);

    MapFile bad = parse_map_file("F = \"2 * z\"\nG = \"w\"\n", 14);
    CommandResult mc2 = cmd_check_map(fin, bad, fin);
    CHECK(mc2.doc["result"]["holds"] == false);

    HypersurfaceFile model = parse_hypersurface_file(
        "form = phi\ntruncation = 12\nexpr = \"2 * re(z * zb^3) * s + 3/2 * re(z^3 * zb^4)\"\n");
    CommandResult eq = cmd_equiv(model, model, std::nullopt);
    CHECK(eq.exit_code == 0);
    CHECK(eq.doc["result"]["verdict"] == "equivalent");

    // continuous-modulus family with matching modulus but an unmatched slot
    HypersurfaceFile ca1 = parse_hypersurface_file(
        "form = phi\ntruncation = 16\nexpr = \"s^2 * abs2(z)^3 + 2 * s^3 * re(z * zb^11) + "
        "s^3 * abs2(z)^2\"\n");
    HypersurfaceFile ca2 = parse_hypersurface_file(
        "form = phi\ntruncation = 16\nexpr = \"s^2 * abs2(z)^3 + 2 * s^3 * re(z * zb^11) + "
        "2 * s^3 * abs2(z)^2\"\n");
    CommandResult eq2 = cmd_equiv(ca1, ca2, std::nullopt);
    CHECK((eq2.exit_code == 0 || eq2.exit_code == 2));
    CHECK(eq2.doc["result"]["verdict"] != "equivalent");
    if (eq2.exit_code == 2) {
        // every inconclusive verdict carries a machine-readable reason
        CHECK(eq2.doc["result"]["verdict"] == "inconclusive");
        CHECK(!eq2.doc["result"]["reason"].get<std::string>().empty());
    }
}

TEST_CASE("symmetry command") {
    CommandResult res = cmd_symmetry(parse_lambda_arg("1,3,3;4,6,1"));
    CHECK(res.doc["result"]["cardinality"]["order"] == 4);
    CHECK(res.doc["result"]["finiteness"]["bound"] == 4);
    CHECK_THROWS_AS((void)parse_lambda_arg("3,1,0"), ToolkitError);  // n < alpha
}
