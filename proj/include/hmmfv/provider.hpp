#pragma once

#include "hmmfv/types.hpp"

#include <string_view>
#include <vector>

namespace hmmfv {

enum class Provenance { Hmm, Homogenized, Direct };

std::string_view to_string(Provenance p);

struct ElementCoefficients {
    Mat2 A = Mat2::Identity();
    Vec2 b = Vec2::Zero();
    double c = 0.0;
};

/// Per-element coefficient values at the barycenter, one record per element
/// of the mesh the provider was built for.
struct CoefficientProvider {
    std::vector<ElementCoefficients> elements;
    Provenance provenance = Provenance::Direct;

    [[nodiscard]] std::size_t size() const { return elements.size(); }
    const ElementCoefficients& operator[](std::size_t k) const { return elements[k]; }
};

} // namespace hmmfv
