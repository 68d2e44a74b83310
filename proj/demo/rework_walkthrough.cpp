// Planning estimate and execution-phase control chart for the ten-weld
// example in demo/data, straight from the library.
//
//   rework_walkthrough [specs.csv] [actuals.csv]

#include <fstream>
#include <iostream>

#include "bayesqc/bayesqc.hpp"

int main(int argc, char** argv) {
    using namespace bayesqc;
    const std::string specs_path = argc > 1 ? argv[1] : "demo/data/rework_specs.csv";
    const std::string actuals_path = argc > 2 ? argv[2] : "demo/data/actuals_over_control.csv";
    try {
        std::ifstream sin(specs_path);
        if (!sin) throw SchemaError("cannot open " + specs_path);
        const auto specs = rework::parse_specs(sin);

        const auto estimate = rework::simulate_total_rework(specs, 1000, 1);
        report::write_quantile_row(std::cout, estimate.quantiles, "rework_hours");

        std::ifstream ain(actuals_path);
        if (!ain) throw SchemaError("cannot open " + actuals_path);
        const auto chart = rework::control_chart(specs, rework::parse_actuals(ain));
        std::cout << '\n';
        report::write_control_chart(std::cout, chart);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(e.code());
    }
    return 0;
}
