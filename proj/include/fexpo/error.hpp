#pragma once

#include <stdexcept>
#include <string>

namespace fexpo {

enum class errc {
    component_required,
    disjointness_violated,
    weight_underflow,
    domain_error,
    assumption_violated,
    tset_invalid,
    taxonomy_mismatch,
    component_has_no_weight,
    tol_unachievable,
    index_out_of_range,
    too_large,
    non_positive_value,
    degree_too_large,
    circulant_embedding_failure,
    cholesky_cap_exceeded,
    resolution_mismatch,
    length_mismatch,
    quadrature_failure,
    kernel_missing,
    parse_error,
};

inline const char* errc_name(errc c) {
    switch (c) {
    case errc::component_required: return "ComponentRequired";
    case errc::disjointness_violated: return "DisjointnessViolated";
    case errc::weight_underflow: return "WeightUnderflow";
    case errc::domain_error: return "DomainError";
    case errc::assumption_violated: return "AssumptionViolated";
    case errc::tset_invalid: return "TSetInvalid";
    case errc::taxonomy_mismatch: return "TaxonomyMismatch";
    case errc::component_has_no_weight: return "ComponentHasNoWeight";
    case errc::tol_unachievable: return "TolUnachievable";
    case errc::index_out_of_range: return "IndexOutOfRange";
    case errc::too_large: return "TooLarge";
    case errc::non_positive_value: return "NonPositiveValue";
    case errc::degree_too_large: return "DegreeTooLarge";
    case errc::circulant_embedding_failure: return "CirculantEmbeddingFailure";
    case errc::cholesky_cap_exceeded: return "CholeskyCapExceeded";
    case errc::resolution_mismatch: return "ResolutionMismatch";
    case errc::length_mismatch: return "LengthMismatch";
    case errc::quadrature_failure: return "QuadratureFailure";
    case errc::kernel_missing: return "KernelMissing";
    case errc::parse_error: return "ParseError";
    }
    return "Unknown";
}

class error : public std::runtime_error {
public:
    error(errc c, const std::string& what)
        : std::runtime_error(std::string(errc_name(c)) + ": " + what), code_(c) {}
    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc c, const std::string& what) { throw error(c, what); }

} // namespace fexpo
