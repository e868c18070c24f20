#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cashml/matrix.hpp"
#include "cashml/search_space.hpp"

namespace cashml {

struct ResamplePlan {
    ResampleMethod method = ResampleMethod::random_over;
    SmoteKind smote_kind = SmoteKind::regular;
    ResampleStrategy strategy = ResampleStrategy::minority;
    int n_neighbors = 5;
    double cleaning_threshold = 0.5;  // neighborhood cleaning only
    std::uint64_t seed = 0;
};

struct ResampleResult {
    Matrix values;
    std::vector<int> labels;
    std::vector<std::string> notes;  // degenerate-input degradations
};

// Applies the plan to a training fold only. Degenerate inputs (minority < 2
// for synthetic methods) degrade to identity with a recorded note.
ResampleResult resample(const Matrix& x, const std::vector<int>& labels,
                        const ResamplePlan& plan);

}  // namespace cashml
