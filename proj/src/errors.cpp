#include "schwarzlin/errors.hpp"

namespace schwarzlin {

const char* errc_name(Errc c) {
    switch (c) {
        case Errc::invalid_mesh: return "invalid-mesh";
        case Errc::incompatible_meshes: return "incompatible-meshes";
        case Errc::coloring_violation: return "coloring-violation";
        case Errc::covering_error: return "covering-error";
        case Errc::numeric_overflow: return "numeric-overflow";
        case Errc::unsupported_operation: return "unsupported-operation";
        case Errc::convexity_violation: return "convexity-violation";
        case Errc::line_search_failure: return "line-search-failure";
        case Errc::max_iterations: return "max-iterations";
        case Errc::missing_coarse: return "missing-coarse";
        case Errc::insufficient_data: return "insufficient-data";
        case Errc::algorithmic_regression: return "algorithmic-regression";
        case Errc::usage: return "usage";
        case Errc::io: return "io";
    }
    return "unknown";
}

}  // namespace schwarzlin
