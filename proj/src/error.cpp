#include "qplab/error.hpp"

namespace qplab {

const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::precision_exhausted: return "precision-exhausted";
    case ErrorCode::index_out_of_range: return "index-out-of-range";
    case ErrorCode::selection_failed: return "selection-failed";
    case ErrorCode::scan_cap_exceeded: return "scan-cap-exceeded";
    case ErrorCode::aliasing: return "aliasing";
    case ErrorCode::branch_cut: return "branch-cut";
    case ErrorCode::winding_nonzero: return "winding-nonzero";
    case ErrorCode::exact_resonance: return "exact-resonance";
    case ErrorCode::newton_divergence: return "newton-divergence";
    case ErrorCode::hypothesis_violated: return "hypothesis-violated";
    case ErrorCode::root_isolation: return "root-isolation";
    case ErrorCode::band_index_ambiguity: return "band-index-ambiguity";
    case ErrorCode::empty_set: return "empty-set";
    case ErrorCode::cf_exhausted: return "cf-exhausted";
    case ErrorCode::decay_certificate: return "decay-certificate";
    case ErrorCode::validation: return "validation";
  }
  return "unknown";
}

}  // namespace qplab
