#include "sasrl/curve.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace sasrl {

void write_curve_csv(const LearningCurve& curve, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open curve csv for writing: " + path);
    out << "gradient_step,mean_return,min_return,max_return\n";
    out << std::setprecision(17);
    for (const auto& row : curve.rows)
        out << row.gradient_step << ',' << row.mean_return << ',' << row.min_return << ','
            << row.max_return << "\n";
    if (!out) throw std::runtime_error("write failed for curve csv: " + path);
}

LearningCurve read_curve_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open curve csv: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "gradient_step,mean_return,min_return,max_return")
        throw std::runtime_error("bad curve csv header in " + path);
    LearningCurve curve;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream is(line);
        LearningCurve::Row row;
        char c1, c2, c3;
        if (!(is >> row.gradient_step >> c1 >> row.mean_return >> c2 >> row.min_return >> c3 >>
              row.max_return) ||
            c1 != ',' || c2 != ',' || c3 != ',')
            throw std::runtime_error("bad curve csv row in " + path + ": " + line);
        curve.rows.push_back(row);
    }
    return curve;
}

}  // namespace sasrl
