#pragma once

#include <mpfr.h>

#include <optional>
#include <string>

#include "crnf/hypersurface.hpp"

namespace crnf {

enum class ArithMode { Exact, Ball };

// One hypersurface per file: `key = value` lines, then expr = "...".
// Keys: form (phi|q), truncation (int), mode (exact|ball), precision (bits).
// For the q form the expression gives Q - tau; the leading tau is implicit.
struct HypersurfaceFile {
    std::string form = "phi";
    int truncation = 16;
    ArithMode mode = ArithMode::Exact;
    mpfr_prec_t precision = 256;
    std::string expr;

    // derived
    std::optional<PhiForm> phi;
    std::optional<QForm> q;
    bool polynomial_complete = false;  // the expression fit inside the truncation

    QForm as_q() const;
};

HypersurfaceFile parse_hypersurface_file(const std::string& content);
HypersurfaceFile load_hypersurface_file(const std::string& path);

// Map files: F = "..." and G = "..." in variables (z, w).
struct MapFile {
    std::string f_expr, g_expr;
    int truncation = 16;
    FormalMap map{MultiSeries(kMapVars, 0), MultiSeries(kMapVars, 0)};
};

MapFile parse_map_file(const std::string& content, int default_truncation);
MapFile load_map_file(const std::string& path, int default_truncation);

}  // namespace crnf
