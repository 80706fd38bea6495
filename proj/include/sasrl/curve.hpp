#pragma once

#include <string>
#include <vector>

namespace sasrl {

// Evaluation-return time series keyed by gradient-step count.
struct LearningCurve {
    struct Row {
        long gradient_step = 0;
        double mean_return = 0.0;
        double min_return = 0.0;
        double max_return = 0.0;
    };
    std::vector<Row> rows;
};

// CSV schema: header exactly "gradient_step,mean_return,min_return,max_return".
void write_curve_csv(const LearningCurve& curve, const std::string& path);
LearningCurve read_curve_csv(const std::string& path);

}  // namespace sasrl
